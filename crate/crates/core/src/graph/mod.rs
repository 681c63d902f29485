//! Simple undirected graphs with dense edge ids, edge configurations and
//! connectivity helpers.

mod cycles;
mod expansion;
mod generate;

pub use cycles::{ball, count_cycles, Ball, MAX_CYCLE_LENGTH};
pub use expansion::{
    class_check, expansion_profile_exact, spectral_lambda2, ClassCheckOptions, ClassEvidence,
    ExpansionProfile, Verdict, DEFAULT_EXACT_CAP, DEFAULT_SMALL_SET_CAP,
};
pub use generate::{random_regular, MAX_REJECTIONS};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    delta: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<(usize, usize)>>,
    boundary: Option<Vec<bool>>,
    finite_expansion: Option<usize>,
}

impl Graph {
    /// Builds a simple graph. `delta` is the declared degree bound; every
    /// vertex must have degree at most `delta`.
    pub fn new(n: usize, delta: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        let mut seen = std::collections::HashSet::with_capacity(edges.len());
        for (id, &(u, v)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(Error::invalid(format!("edge {id} = ({u},{v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(Error::invalid(format!("edge {id} is a loop at {u}")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::invalid(format!("edge {id} = ({u},{v}) is a parallel edge")));
            }
            adjacency[u].push((v, id));
            adjacency[v].push((u, id));
        }
        if let Some(v) = (0..n).find(|&v| adjacency[v].len() > delta) {
            return Err(Error::invalid(format!(
                "vertex {v} has degree {} > delta = {delta}",
                adjacency[v].len()
            )));
        }
        Ok(Self {
            n,
            delta,
            edges,
            adjacency,
            boundary: None,
            finite_expansion: None,
        })
    }

    /// Like [`Graph::new`] but also requires every vertex to have degree exactly `delta`.
    pub fn regular(n: usize, delta: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let g = Self::new(n, delta, edges)?;
        if let Some(v) = (0..n).find(|&v| g.degree(v) != delta) {
            return Err(Error::invalid(format!(
                "vertex {v} has degree {} but the graph is declared {delta}-regular",
                g.degree(v)
            )));
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        Self::new(n, n.saturating_sub(1), edges).expect("complete graph is simple")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least 3 vertices");
        let edges = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::new(n, 2, edges).expect("cycle is simple")
    }

    pub fn path(n: usize) -> Self {
        let edges = (1..n).map(|i| (i - 1, i)).collect();
        Self::new(n, if n > 2 { 2 } else { 1 }, edges).expect("path is simple")
    }

    /// Disjoint union; edges of `other` are appended after those of `self`.
    pub fn disjoint_union(&self, other: &Graph) -> Result<Graph> {
        let shift = self.n;
        let edges = self
            .edges
            .iter()
            .copied()
            .chain(other.edges.iter().map(|&(u, v)| (u + shift, v + shift)))
            .collect();
        Graph::new(self.n + other.n, self.delta.max(other.delta), edges)
    }

    /// Attaches boundary marks. `finite_expansion = Some(k)` asserts that every
    /// vertex set S free of boundary vertices has at least `k·|S|` edges leaving
    /// it, which lets component searches stop early.
    pub fn with_boundary(mut self, marks: Vec<bool>, finite_expansion: Option<usize>) -> Result<Self> {
        if marks.len() != self.n {
            return Err(Error::invalid("boundary mark vector has wrong length"));
        }
        self.boundary = Some(marks);
        self.finite_expansion = finite_expansion;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> (usize, usize) {
        self.edges[id]
    }

    /// `(neighbor, edge id)` pairs incident to `v`.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn is_regular(&self) -> bool {
        (0..self.n).all(|v| self.degree(v) == self.delta)
    }

    pub fn boundary(&self) -> Option<&[bool]> {
        self.boundary.as_deref()
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary.as_ref().is_some_and(|b| b[v])
    }

    pub fn finite_expansion(&self) -> Option<usize> {
        self.finite_expansion
    }

    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        self.adjacency[u]
            .iter()
            .find(|&&(w, _)| w == v)
            .map(|&(_, id)| id)
    }

    /// Edge ids with canonical `(min, max)` endpoint order, sorted.
    pub fn canonical(&self) -> Graph {
        let mut edges: Vec<_> = self.edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
        edges.sort_unstable();
        let mut g = Graph::new(self.n, self.delta, edges).expect("relabelled simple graph");
        g.boundary = self.boundary.clone();
        g.finite_expansion = self.finite_expansion;
        g
    }

    pub fn is_connected(&self) -> bool {
        components(self, &EdgeConfig::full(self.num_edges())).count <= 1
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            n: self.n,
            delta: self.delta,
            edges: self.edges.iter().map(|&(u, v)| [u, v]).collect(),
        }
    }

    /// Parses the graph JSON format; the graph must be simple and regular.
    pub fn from_json_str(s: &str) -> Result<Graph> {
        let raw: GraphJson = serde_json::from_str(s)?;
        Graph::regular(raw.n, raw.delta, raw.edges.iter().map(|e| (e[0], e[1])).collect())
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("graph JSON serializes")
    }
}

/// On-disk graph format `{"n": .., "delta": .., "edges": [[u, v], ..]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub delta: usize,
    pub edges: Vec<[usize; 2]>,
}

/// A subset of the edge set, stored as a bit vector over edge ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EdgeConfig {
    bits: Vec<u64>,
    len: usize,
}

impl EdgeConfig {
    pub fn empty(len: usize) -> Self {
        Self {
            bits: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn full(len: usize) -> Self {
        let mut c = Self::empty(len);
        for i in 0..len {
            c.insert(i);
        }
        c
    }

    /// Low `len` bits of `mask`, bit i = edge i.
    pub fn from_mask(len: usize, mask: u64) -> Self {
        assert!(len <= 64);
        let mut c = Self::empty(len);
        if len > 0 {
            c.bits[0] = if len == 64 { mask } else { mask & ((1u64 << len) - 1) };
        }
        c
    }

    pub fn from_edges(len: usize, ids: impl IntoIterator<Item = usize>) -> Self {
        let mut c = Self::empty(len);
        for id in ids {
            c.insert(id);
        }
        c
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, id: usize) -> bool {
        debug_assert!(id < self.len);
        self.bits[id / 64] >> (id % 64) & 1 == 1
    }

    pub fn insert(&mut self, id: usize) {
        assert!(id < self.len, "edge id {id} out of range");
        self.bits[id / 64] |= 1 << (id % 64);
    }

    pub fn remove(&mut self, id: usize) {
        assert!(id < self.len, "edge id {id} out of range");
        self.bits[id / 64] &= !(1 << (id % 64));
    }

    pub fn set(&mut self, id: usize, on: bool) {
        if on {
            self.insert(id)
        } else {
            self.remove(id)
        }
    }

    /// Number of occupied edges |A|.
    pub fn count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.contains(i))
    }

    pub fn to_mask(&self) -> Option<u64> {
        match self.bits.len() {
            0 => Some(0),
            1 => Some(self.bits[0]),
            _ => None,
        }
    }

    /// Big-endian hexadecimal rendering of the bitmask (edge 0 is the least
    /// significant bit), zero padded to `ceil(len / 4)` digits.
    pub fn to_hex(&self) -> String {
        let digits = self.len.div_ceil(4).max(1);
        (0..digits)
            .rev()
            .map(|d| {
                let nibble = (0..4).fold(0u32, |acc, b| {
                    let id = d * 4 + b;
                    acc | (u32::from(id < self.len && self.contains(id)) << b)
                });
                char::from_digit(nibble, 16).unwrap()
            })
            .collect()
    }

    pub fn from_hex(len: usize, hex: &str) -> Result<Self> {
        let mut c = Self::empty(len);
        for (d, ch) in hex.trim().chars().rev().enumerate() {
            let nibble = ch
                .to_digit(16)
                .ok_or_else(|| Error::invalid(format!("bad hex digit {ch:?}")))?;
            for b in 0..4 {
                if nibble >> b & 1 == 1 {
                    let id = d * 4 + b;
                    if id >= len {
                        return Err(Error::invalid("hex mask longer than edge count"));
                    }
                    c.insert(id);
                }
            }
        }
        Ok(c)
    }
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    sets: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
            sets: n,
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns true when two distinct sets were merged.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.sets -= 1;
        true
    }

    pub fn set_size(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r]
    }

    pub fn sets(&self) -> usize {
        self.sets
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    /// Dense component id per vertex, numbered by first appearance.
    pub labels: Vec<usize>,
    pub count: usize,
}

/// Connected components of `(V, A)`; isolated vertices count as components.
pub fn components(g: &Graph, a: &EdgeConfig) -> Components {
    assert_eq!(a.len(), g.num_edges(), "edge configuration sized for another graph");
    let mut uf = UnionFind::new(g.n());
    for id in a.iter() {
        let (u, v) = g.edge(id);
        uf.union(u, v);
    }
    let mut dense = vec![usize::MAX; g.n()];
    let mut labels = vec![0; g.n()];
    let mut count = 0;
    for v in 0..g.n() {
        let r = uf.find(v);
        if dense[r] == usize::MAX {
            dense[r] = count;
            count += 1;
        }
        labels[v] = dense[r];
    }
    Components { labels, count }
}

/// Component count for an edge subset given as a bitmask (graphs with ≤ 64 edges).
pub fn component_count_mask(g: &Graph, mask: u64) -> usize {
    let mut uf = UnionFind::new(g.n());
    let mut m = mask;
    while m != 0 {
        let id = m.trailing_zeros() as usize;
        m &= m - 1;
        let (u, v) = g.edge(id);
        uf.union(u, v);
    }
    uf.sets()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn components_of_empty_and_full() {
        let k6 = Graph::complete(6);
        assert_eq!(components(&k6, &EdgeConfig::empty(15)).count, 6);
        assert_eq!(components(&k6, &EdgeConfig::full(15)).count, 1);
        let c3 = Graph::cycle(3);
        assert_eq!(components(&c3, &EdgeConfig::from_edges(3, [0])).count, 2);
    }

    #[test]
    fn removing_one_edge_changes_count_by_zero_or_one() {
        let g = random_regular(20, 3, 5).unwrap();
        let full = EdgeConfig::full(g.num_edges());
        let base = components(&g, &full).count;
        for e in 0..g.num_edges() {
            let mut a = full.clone();
            a.remove(e);
            let c = components(&g, &a).count;
            assert!(c == base || c == base + 1);
        }
    }

    #[test]
    fn rejects_loops_and_parallel_edges() {
        assert!(Graph::new(3, 2, vec![(0, 0)]).is_err());
        assert!(Graph::new(3, 2, vec![(0, 1), (1, 0)]).is_err());
        assert!(Graph::regular(4, 2, vec![(0, 1), (1, 2), (2, 3)]).is_err());
    }

    #[test]
    fn hex_round_trip() {
        let a = EdgeConfig::from_edges(70, [0, 3, 4, 64, 69]);
        let h = a.to_hex();
        assert_eq!(h.len(), 18);
        assert_eq!(EdgeConfig::from_hex(70, &h).unwrap(), a);
        assert_eq!(EdgeConfig::from_edges(3, [0, 1]).to_hex(), "3");
        assert_eq!(EdgeConfig::empty(0).to_hex(), "0");
    }

    #[test]
    fn json_round_trip_is_canonical() {
        let g = random_regular(12, 3, 9).unwrap();
        let s = g.to_json_string();
        let back = Graph::from_json_str(&s).unwrap();
        assert_eq!(back.to_json_string(), s);
        assert!(Graph::from_json_str(r#"{"n":3,"delta":2,"edges":[[0,1],[1,2]]}"#).is_err());
    }
}
