//! Ursell function `φ(H) = (1/|V|!) Σ_{A spanning connected} (−1)^{|A|}`.

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const URSELL_CAP: usize = 12;

/// `Σ_{A ⊆ E(H), (V,A) connected} (−1)^{|A|}` for `H` given by adjacency
/// bitmasks, exactly in integers.
///
/// Uses `Σ_{A ⊆ E(H[S])} (−1)^{|A|} = [H[S] has no edges]` and splits a
/// subset by the component of its lowest vertex: `O(3^k)` time.
pub fn connected_signed_sum(adj: &[u32]) -> i64 {
    let k = adj.len();
    assert!(k <= URSELL_CAP, "ursell sum limited to {URSELL_CAP} vertices");
    if k == 0 {
        return 0;
    }
    let full = (1usize << k) - 1;
    let mut edgeless = vec![false; full + 1];
    edgeless[0] = true;
    for s in 1..=full {
        let v = s.trailing_zeros() as usize;
        let rest = s & (s - 1);
        edgeless[s] = edgeless[rest] && (adj[v] as usize & rest) == 0;
    }
    let mut conn = vec![0i64; full + 1];
    for s in 1..=full {
        let low = s & s.wrapping_neg();
        let others = s ^ low;
        let mut acc = edgeless[s] as i64;
        // proper subsets T of s containing the lowest vertex
        let mut t = others;
        loop {
            let sub = t | low;
            if sub != s {
                acc -= conn[sub] * edgeless[s ^ sub] as i64;
            }
            if t == 0 {
                break;
            }
            t = (t - 1) & others;
        }
        conn[s] = acc;
    }
    conn[full]
}

pub(crate) fn adjacency_masks(h: &Graph) -> Vec<u32> {
    (0..h.n())
        .map(|v| h.neighbors(v).iter().fold(0u32, |m, &(u, _)| m | 1 << u))
        .collect()
}

/// `φ(H)` as a float; computed exactly and divided by `|V|!` at the end.
pub fn ursell(h: &Graph) -> Result<f64> {
    if h.n() > URSELL_CAP {
        return Err(Error::Cap {
            what: "ursell function (vertices)",
            got: h.n(),
            cap: URSELL_CAP,
        });
    }
    if h.n() == 0 {
        return Err(Error::invalid("ursell function of the empty graph"));
    }
    let s = connected_signed_sum(&adjacency_masks(h));
    let fact: f64 = (1..=h.n()).map(|i| i as f64).product();
    Ok(s as f64 / fact)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct sum over edge subsets.
    fn brute(h: &Graph) -> i64 {
        let m = h.num_edges();
        (0u64..1 << m)
            .filter(|&mask| crate::graph::component_count_mask(h, mask) == 1)
            .map(|mask| if mask.count_ones() % 2 == 0 { 1 } else { -1 })
            .sum()
    }

    #[test]
    fn small_values() {
        assert_eq!(ursell(&Graph::complete(1)).unwrap(), 1.0);
        assert_eq!(ursell(&Graph::complete(2)).unwrap(), -0.5);
        assert!((ursell(&Graph::complete(3)).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        // K_n: (−1)^{n−1}(n−1)!
        assert_eq!(connected_signed_sum(&adjacency_masks(&Graph::complete(6))), -120);
        assert_eq!(connected_signed_sum(&adjacency_masks(&Graph::path(4))), -1);
    }

    #[test]
    fn agrees_with_edge_subset_sum() {
        let graphs = [
            Graph::cycle(5),
            Graph::complete(5),
            Graph::new(5, 4, vec![(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2), (0, 4)]).unwrap(),
            Graph::new(4, 3, vec![(0, 1), (0, 2), (0, 3)]).unwrap(),
            Graph::new(4, 3, vec![(0, 1), (2, 3)]).unwrap(),
        ];
        for h in &graphs {
            assert_eq!(connected_signed_sum(&adjacency_masks(h)), brute(h));
        }
    }
}
