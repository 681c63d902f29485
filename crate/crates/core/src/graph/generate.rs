use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Graph;
use crate::error::{Error, Result};

/// Pairings tried before the configuration model gives up.
pub const MAX_REJECTIONS: u64 = 1_000_000;

/// Random `delta`-regular simple graph from the configuration model: pair up
/// `n·delta` half-edges uniformly and reject any pairing with a loop or a
/// repeated edge. Edges come out in canonical sorted order.
pub fn random_regular(n: usize, delta: usize, seed: u64) -> Result<Graph> {
    if !(n * delta).is_multiple_of(2) {
        return Err(Error::invalid(format!("n·delta = {} is odd", n * delta)));
    }
    if n <= delta {
        return Err(Error::invalid(format!("need n > delta, got n = {n}, delta = {delta}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, delta)).collect();
    let mut seen = HashSet::with_capacity(n * delta / 2);
    'attempt: for _ in 0..MAX_REJECTIONS {
        points.shuffle(&mut rng);
        seen.clear();
        let mut edges = Vec::with_capacity(n * delta / 2);
        for pair in points.chunks_exact(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || !seen.insert((u, v)) {
                continue 'attempt;
            }
            edges.push((u, v));
        }
        edges.sort_unstable();
        return Graph::regular(n, delta, edges);
    }
    Err(Error::Budget {
        what: "configuration-model rejection sampling",
        budget: MAX_REJECTIONS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_vertex_five_regular_is_k6() {
        let g = random_regular(6, 5, 1).unwrap();
        assert_eq!(g.edges(), Graph::complete(6).edges());
    }

    #[test]
    fn parity_and_size_violations() {
        assert!(random_regular(5, 5, 0).is_err());
        assert!(random_regular(7, 3, 0).is_err());
        assert!(random_regular(4, 4, 0).is_err());
    }

    #[test]
    fn degree_sum_and_determinism() {
        let g = random_regular(50, 5, 7).unwrap();
        assert_eq!(g.num_edges(), 125);
        assert!((0..50).all(|v| g.degree(v) == 5));
        assert_eq!(g, random_regular(50, 5, 7).unwrap());
        assert_ne!(g, random_regular(50, 5, 8).unwrap());
    }
}
