//! Inductive boundary closure: repeatedly absorb every edge at a vertex that
//! already has at least `5Δ/9` incident edges in the set.

use crate::graph::{EdgeConfig, Graph};

/// `9·count ≥ 5Δ`, kept in integers.
#[inline]
pub fn meets_threshold(count: usize, delta: usize) -> bool {
    9 * count >= 5 * delta
}

/// `B_∞(b0)` via a worklist over triggered vertices.
pub fn boundary_closure(g: &Graph, b0: &EdgeConfig) -> EdgeConfig {
    let mut set = b0.clone();
    let mut count = vec![0usize; g.n()];
    for id in set.iter() {
        let (u, v) = g.edge(id);
        count[u] += 1;
        count[v] += 1;
    }
    let mut done = vec![false; g.n()];
    let mut stack: Vec<usize> = (0..g.n()).filter(|&v| meets_threshold(count[v], g.delta())).collect();
    while let Some(v) = stack.pop() {
        if done[v] {
            continue;
        }
        done[v] = true;
        for &(u, id) in g.neighbors(v) {
            if !set.contains(id) {
                set.insert(id);
                count[v] += 1;
                count[u] += 1;
                if !done[u] && meets_threshold(count[u], g.delta()) {
                    stack.push(u);
                }
            }
        }
    }
    set
}

/// Same closure computed by sweeping vertices in the given order, absorbing
/// edges immediately, until a sweep changes nothing.
pub fn boundary_closure_in_order(g: &Graph, b0: &EdgeConfig, order: &[usize]) -> EdgeConfig {
    let mut set = b0.clone();
    let mut changed = true;
    while changed {
        changed = false;
        for &v in order {
            let c = g.neighbors(v).iter().filter(|&&(_, id)| set.contains(id)).count();
            if meets_threshold(c, g.delta()) && c < g.degree(v) {
                for &(_, id) in g.neighbors(v) {
                    set.insert(id);
                }
                changed = true;
            }
        }
    }
    set
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::random_regular;

    #[test]
    fn single_edge_and_empty_are_fixed() {
        let g = random_regular(20, 5, 1).unwrap();
        let one = EdgeConfig::from_edges(g.num_edges(), [0]);
        assert_eq!(boundary_closure(&g, &one), one);
        let empty = EdgeConfig::empty(g.num_edges());
        assert_eq!(boundary_closure(&g, &empty), empty);
    }

    #[test]
    fn three_edges_at_a_vertex_close_to_its_star() {
        let g = random_regular(20, 5, 2).unwrap();
        let star: Vec<usize> = g.neighbors(0).iter().map(|&(_, id)| id).collect();
        let b0 = EdgeConfig::from_edges(g.num_edges(), star[..3].iter().copied());
        let b = boundary_closure(&g, &b0);
        assert_eq!(b, EdgeConfig::from_edges(g.num_edges(), star.iter().copied()));
        let order: Vec<usize> = (0..20).rev().collect();
        assert_eq!(boundary_closure_in_order(&g, &b0, &order), b);
    }
}
