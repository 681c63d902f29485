//! Short-cycle counts and BFS neighbourhoods.

use std::collections::VecDeque;

use super::Graph;
use crate::error::{Error, Result};

pub const MAX_CYCLE_LENGTH: usize = 12;

/// Visits every simple cycle of length `3..=k_max` once, as a vertex list
/// starting at its smallest vertex and oriented so that the second vertex is
/// smaller than the last.
fn for_each_cycle(g: &Graph, k_max: usize, mut f: impl FnMut(&[usize])) {
    let mut path = Vec::with_capacity(k_max);
    let mut on_path = vec![false; g.n()];
    for s in 0..g.n() {
        path.push(s);
        on_path[s] = true;
        dfs(g, s, k_max, &mut path, &mut on_path, &mut f);
        on_path[s] = false;
        path.pop();
    }
}

fn dfs(
    g: &Graph,
    s: usize,
    k_max: usize,
    path: &mut Vec<usize>,
    on_path: &mut [bool],
    f: &mut impl FnMut(&[usize]),
) {
    let v = *path.last().unwrap();
    for &(u, _) in g.neighbors(v) {
        if u == s && path.len() >= 3 && path[1] < v {
            f(path);
        } else if u > s && !on_path[u] && path.len() < k_max {
            path.push(u);
            on_path[u] = true;
            dfs(g, s, k_max, path, on_path, f);
            on_path[u] = false;
            path.pop();
        }
    }
}

/// Number of simple cycles of each length; entry `k` of the result is `X_k`
/// (entries 0..3 are zero).
pub fn count_cycles(g: &Graph, k_max: usize) -> Result<Vec<u64>> {
    if k_max > MAX_CYCLE_LENGTH {
        return Err(Error::Cap {
            what: "cycle length",
            got: k_max,
            cap: MAX_CYCLE_LENGTH,
        });
    }
    let mut counts = vec![0u64; k_max.max(2) + 1];
    for_each_cycle(g, k_max, |c| counts[c.len()] += 1);
    Ok(counts)
}

#[derive(Debug, Clone)]
pub struct Ball {
    /// Induced subgraph on the ball, vertices relabelled in BFS order (centre is 0).
    pub graph: Graph,
    /// Original id of each ball vertex.
    pub vertices: Vec<usize>,
    pub is_tree: bool,
    /// Cycles of the ball up to [`MAX_CYCLE_LENGTH`], in original vertex ids.
    pub cycles: Vec<Vec<usize>>,
}

pub fn ball(g: &Graph, v: usize, radius: usize) -> Ball {
    let mut local = vec![usize::MAX; g.n()];
    let mut vertices = vec![v];
    let mut depth = vec![0usize];
    local[v] = 0;
    let mut queue = VecDeque::from([v]);
    while let Some(x) = queue.pop_front() {
        let d = depth[local[x]];
        if d == radius {
            continue;
        }
        for &(u, _) in g.neighbors(x) {
            if local[u] == usize::MAX {
                local[u] = vertices.len();
                vertices.push(u);
                depth.push(d + 1);
                queue.push_back(u);
            }
        }
    }
    let edges: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .filter(|&&(a, b)| local[a] != usize::MAX && local[b] != usize::MAX)
        .map(|&(a, b)| (local[a], local[b]))
        .collect();
    let is_tree = edges.len() + 1 == vertices.len();
    let graph = Graph::new(vertices.len(), g.delta(), edges).expect("induced subgraph is simple");
    let mut cycles = Vec::new();
    if !is_tree {
        for_each_cycle(&graph, MAX_CYCLE_LENGTH.min(vertices.len()), |c| {
            cycles.push(c.iter().map(|&x| vertices[x]).collect())
        });
    }
    Ball {
        graph,
        vertices,
        is_tree,
        cycles,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::random_regular;

    #[test]
    fn small_counts() {
        assert_eq!(count_cycles(&Graph::cycle(5), 6).unwrap()[3..], [0, 0, 1, 0]);
        assert_eq!(count_cycles(&Graph::complete(4), 4).unwrap()[3..], [4, 3]);
        assert!(count_cycles(&Graph::path(8), 8).unwrap().iter().all(|&x| x == 0));
        assert!(count_cycles(&Graph::complete(4), 13).is_err());
    }

    #[test]
    fn complete_graph_counts() {
        // K_n has C(n,k)·(k−1)!/2 cycles of length k.
        let c = count_cycles(&Graph::complete(6), 6).unwrap();
        assert_eq!(c[3..], [20, 45, 72, 60]);
    }

    #[test]
    fn triangles_match_trace() {
        let g = random_regular(30, 5, 3).unwrap();
        let n = g.n();
        let mut a = vec![vec![0u64; n]; n];
        for &(u, v) in g.edges() {
            a[u][v] = 1;
            a[v][u] = 1;
        }
        let mut trace = 0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    trace += a[i][j] * a[j][k] * a[k][i];
                }
            }
        }
        assert_eq!(count_cycles(&g, 3).unwrap()[3], trace / 6);
    }

    #[test]
    fn balls() {
        let b = ball(&Graph::complete(6), 2, 1);
        assert_eq!(b.vertices.len(), 6);
        assert!(!b.is_tree);
        assert_eq!(b.cycles.iter().filter(|c| c.len() == 3).count(), 20);
        let p = ball(&Graph::path(9), 4, 2);
        assert!(p.is_tree);
        assert_eq!(p.vertices.len(), 5);
        assert!(p.cycles.is_empty());
    }
}
