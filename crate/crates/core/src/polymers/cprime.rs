//! Counting the "finite" components left after deleting an edge set.
//!
//! Without boundary marks a component is finite when it has fewer than `n/2`
//! vertices. With boundary marks (tree truncations) it is finite when it
//! contains no boundary vertex.

use std::collections::{HashSet, VecDeque};

use crate::graph::{components, EdgeConfig, Graph};

/// Precomputed component structure of the whole graph, reused across many
/// `c'` evaluations.
#[derive(Debug, Clone)]
pub struct SmallComponents<'g> {
    g: &'g Graph,
    labels: Vec<usize>,
    base_finite: Vec<bool>,
    base_finite_count: usize,
}

impl<'g> SmallComponents<'g> {
    pub fn new(g: &'g Graph) -> Self {
        let comps = components(g, &EdgeConfig::full(g.num_edges()));
        let mut size = vec![0usize; comps.count];
        let mut boundary = vec![false; comps.count];
        for v in 0..g.n() {
            size[comps.labels[v]] += 1;
            boundary[comps.labels[v]] |= g.is_boundary(v);
        }
        let base_finite: Vec<bool> = (0..comps.count)
            .map(|c| match g.boundary() {
                Some(_) => !boundary[c],
                None => 2 * size[c] < g.n(),
            })
            .collect();
        let base_finite_count = base_finite.iter().filter(|&&f| f).count();
        Self {
            g,
            labels: comps.labels,
            base_finite,
            base_finite_count,
        }
    }

    /// Number of finite components of `(V, E ∖ e_u)`.
    pub fn count(&self, e_u: &[usize]) -> usize {
        let g = self.g;
        let removed: HashSet<usize> = e_u.iter().copied().collect();
        let mut endpoints: Vec<usize> = e_u
            .iter()
            .flat_map(|&id| {
                let (u, v) = g.edge(id);
                [u, v]
            })
            .collect();
        endpoints.sort_unstable();
        endpoints.dedup();

        // Base components touched by e_u are re-examined below.
        let mut touched: Vec<usize> = endpoints.iter().map(|&v| self.labels[v]).collect();
        touched.sort_unstable();
        touched.dedup();
        let mut total = self.base_finite_count - touched.iter().filter(|&&c| self.base_finite[c]).count();

        let mut settled: HashSet<usize> = HashSet::new();
        for &s in &endpoints {
            if settled.contains(&s) {
                continue;
            }
            let (finite, seen) = self.explore(s, &removed, e_u.len());
            if finite {
                total += 1;
                settled.extend(seen);
            }
        }
        total
    }

    /// BFS from `s` avoiding removed edges. Stops as soon as the component
    /// is known to be infinite.
    fn explore(&self, s: usize, removed: &HashSet<usize>, cut: usize) -> (bool, Vec<usize>) {
        let g = self.g;
        let mut seen = vec![s];
        let mut in_seen: HashSet<usize> = HashSet::from([s]);
        let mut queue = VecDeque::from([s]);
        let bounded = g.boundary().is_some();
        if bounded && g.is_boundary(s) {
            return (false, seen);
        }
        while let Some(v) = queue.pop_front() {
            for &(u, id) in g.neighbors(v) {
                if removed.contains(&id) || !in_seen.insert(u) {
                    continue;
                }
                seen.push(u);
                if bounded {
                    if g.is_boundary(u) {
                        return (false, seen);
                    }
                    // every edge leaving a finite component is cut
                    if let Some(k) = g.finite_expansion() {
                        if k > 0 && k * seen.len() > cut {
                            return (false, seen);
                        }
                    }
                } else if 2 * seen.len() >= g.n() {
                    return (false, seen);
                }
                queue.push_back(u);
            }
        }
        (true, seen)
    }
}

/// One-shot `c'` of an unoccupied edge set.
pub fn c_prime(g: &Graph, e_u: &[usize]) -> usize {
    SmallComponents::new(g).count(e_u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::random_regular;

    fn brute(g: &Graph, e_u: &[usize]) -> usize {
        let mut a = EdgeConfig::full(g.num_edges());
        e_u.iter().for_each(|&id| a.remove(id));
        let comps = components(g, &a);
        let mut size = vec![0; comps.count];
        let mut bd = vec![false; comps.count];
        for v in 0..g.n() {
            size[comps.labels[v]] += 1;
            bd[comps.labels[v]] |= g.is_boundary(v);
        }
        (0..comps.count)
            .filter(|&c| if g.boundary().is_some() { !bd[c] } else { 2 * size[c] < g.n() })
            .count()
    }

    #[test]
    fn star_isolates_one_vertex() {
        let g = random_regular(20, 5, 4).unwrap();
        assert_eq!(c_prime(&g, &[]), 0);
        let star: Vec<usize> = g.neighbors(3).iter().map(|&(_, id)| id).collect();
        assert_eq!(c_prime(&g, &star), 1);
        let all: Vec<usize> = (0..g.num_edges()).collect();
        assert_eq!(c_prime(&g, &all), 20);
    }

    #[test]
    fn matches_full_census() {
        let g = random_regular(16, 3, 9).unwrap();
        let ctx = SmallComponents::new(&g);
        for start in 0..g.num_edges() {
            let e_u: Vec<usize> = (start..g.num_edges()).step_by(3).take(6).collect();
            assert_eq!(ctx.count(&e_u), brute(&g, &e_u));
        }
    }
}
