//! Disordered and ordered polymers: enumeration and weights.
//!
//! A disordered polymer is a connected edge set `γ` with weight
//! `q^{1−|γ|} x^{|E(γ)|}`, where `|γ|` counts vertices and `x = e^β − 1`.
//! An ordered polymer is a connected edge set whose unoccupied edges `E_u`
//! close (under [`boundary_closure`]) to exactly `γ`; its weight is
//! `q^{c'} x^{−|E_u|}`.

mod closure;
mod cprime;

pub use closure::{boundary_closure, boundary_closure_in_order, meets_threshold};
pub use cprime::{c_prime, SmallComponents};

use std::collections::VecDeque;

use nalgebra::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::esu::{self, Adjacency};
use crate::exact::log_x;
use crate::graph::Graph;

pub const DIS_CAP: usize = 12;
pub const ORD_CAP: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct DisPolymer {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct OrdPolymer {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    /// Unoccupied edges `E_u ⊆ edges`; the rest of `edges` are occupied.
    pub unoccupied: Vec<usize>,
    pub c_prime: usize,
}

impl DisPolymer {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }
}

impl OrdPolymer {
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }
    pub fn labels(&self) -> Vec<bool> {
        self.edges.iter().map(|e| self.unoccupied.binary_search(e).is_err()).collect()
    }
}

/// Anything occupying a set of vertices; compatibility is vertex-disjointness.
pub trait Support {
    fn support(&self) -> &[usize];
}

impl Support for DisPolymer {
    fn support(&self) -> &[usize] {
        &self.vertices
    }
}

impl Support for OrdPolymer {
    fn support(&self) -> &[usize] {
        &self.vertices
    }
}

pub(crate) fn sorted_disjoint(a: &[usize], b: &[usize]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return false,
        }
    }
    true
}

pub fn compatible<P: Support, Q: Support>(a: &P, b: &Q) -> bool {
    sorted_disjoint(a.support(), b.support())
}

/// `ln w = (1−|γ|) ln q + |E(γ)| ln(e^β−1)`.
pub fn w_dis(p: &DisPolymer, q: f64, beta: f64) -> f64 {
    (1.0 - p.num_vertices() as f64) * q.ln() + p.num_edges() as f64 * log_x(beta)
}

/// `ln w = c' ln q − |E_u| ln(e^β−1)`; requires `β > 0`.
pub fn w_ord(p: &OrdPolymer, q: f64, beta: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::invalid(format!("ordered weights need e^β − 1 > 0, got β = {beta}")));
    }
    Ok(p.c_prime as f64 * q.ln() - p.unoccupied.len() as f64 * log_x(beta))
}

/// Log-modulus and phase of `e^β − 1` at complex `β`.
fn log_x_complex(beta: Complex<f64>) -> (f64, f64) {
    let x = beta.exp() - Complex::new(1.0, 0.0);
    (x.norm().ln(), x.arg())
}

/// Disordered weight at complex `β` as (log-modulus, phase).
pub fn w_dis_complex(p: &DisPolymer, q: f64, beta: Complex<f64>) -> (f64, f64) {
    let (lm, ph) = log_x_complex(beta);
    let e = p.num_edges() as f64;
    ((1.0 - p.num_vertices() as f64) * q.ln() + e * lm, e * ph)
}

/// Ordered weight at complex `β` as (log-modulus, phase).
pub fn w_ord_complex(p: &OrdPolymer, q: f64, beta: Complex<f64>) -> (f64, f64) {
    let (lm, ph) = log_x_complex(beta);
    let k = p.unoccupied.len() as f64;
    (p.c_prime as f64 * q.ln() - k * lm, -k * ph)
}

/// Which polymers to enumerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    All,
    /// Polymers with `dist(root, γ) + |E(γ)| ≤ budget`. Edge ids must be
    /// ordered by distance of their nearer endpoint from `root`, as produced
    /// by the tree builders.
    Near { root: usize, budget: usize },
}

struct LineGraph<'a>(&'a Graph);

impl Adjacency for LineGraph<'_> {
    fn size(&self) -> usize {
        self.0.num_edges()
    }
    fn for_each_neighbor(&self, e: usize, f: &mut dyn FnMut(usize)) {
        let (u, v) = self.0.edge(e);
        for w in [u, v] {
            for &(_, id) in self.0.neighbors(w) {
                if id != e {
                    f(id);
                }
            }
        }
    }
}

fn vertex_distances(g: &Graph, root: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.n()];
    dist[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &(u, _) in g.neighbors(v) {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    dist
}

/// Per-anchor edge budget for the connected-edge-set search.
fn anchor_budgets(g: &Graph, m: usize, scope: Scope) -> Result<Vec<usize>> {
    match scope {
        Scope::All => Ok(vec![m; g.num_edges()]),
        Scope::Near { root, budget } => {
            let dist = vertex_distances(g, root);
            let d: Vec<usize> = g.edges().iter().map(|&(u, v)| dist[u].min(dist[v])).collect();
            if d.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::invalid("rooted enumeration needs edges ordered by distance from the root"));
            }
            Ok(d.iter().map(|&de| m.min(budget.saturating_sub(de))).collect())
        }
    }
}

/// Runs `visit` on every connected edge set of at most `m` edges allowed by
/// `scope`, in parallel over anchor edges. Results are concatenated in anchor
/// order, so output is deterministic.
fn par_edge_sets<T: Send>(
    g: &Graph,
    m: usize,
    scope: Scope,
    visit: impl Fn(&[usize], &mut Vec<T>) + Sync,
) -> Result<Vec<T>> {
    let budgets = anchor_budgets(g, m, scope)?;
    let line = LineGraph(g);
    let parts: Vec<Vec<T>> = (0..g.num_edges())
        .into_par_iter()
        .filter(|&a| budgets[a] > 0)
        .map(|a| {
            let mut out = Vec::new();
            esu::connected_sets(&line, a..a + 1, |a| budgets[a], |_| 1, |set, _| {
                visit(set, &mut out);
                true
            });
            out
        })
        .collect();
    Ok(parts.into_iter().flatten().collect())
}

fn vertices_of(g: &Graph, edges: &[usize]) -> Vec<usize> {
    let mut vs: Vec<usize> = edges
        .iter()
        .flat_map(|&id| {
            let (u, v) = g.edge(id);
            [u, v]
        })
        .collect();
    vs.sort_unstable();
    vs.dedup();
    vs
}

fn check_cap(m: usize, cap: usize, what: &'static str) -> Result<()> {
    if m > cap {
        return Err(Error::Cap { what, got: m, cap });
    }
    Ok(())
}

/// All disordered polymers with at most `m` edges.
pub fn enumerate_dis_polymers(g: &Graph, m: usize) -> Result<Vec<DisPolymer>> {
    enumerate_dis_polymers_in(g, m, Scope::All)
}

pub fn enumerate_dis_polymers_in(g: &Graph, m: usize, scope: Scope) -> Result<Vec<DisPolymer>> {
    check_cap(m, DIS_CAP, "disordered polymer size")?;
    par_edge_sets(g, m, scope, |set, out| {
        let mut edges = set.to_vec();
        edges.sort_unstable();
        out.push(DisPolymer {
            vertices: vertices_of(g, &edges),
            edges,
        });
    })
}

/// All ordered polymers with at most `m` edges in total.
pub fn enumerate_ord_polymers(g: &Graph, m: usize) -> Result<Vec<OrdPolymer>> {
    enumerate_ord_polymers_in(g, m, Scope::All)
}

pub fn enumerate_ord_polymers_in(g: &Graph, m: usize, scope: Scope) -> Result<Vec<OrdPolymer>> {
    check_cap(m, ORD_CAP, "ordered polymer size")?;
    let ctx = SmallComponents::new(g);
    par_edge_sets(g, m, scope, |set, out| {
        let mut edges = set.to_vec();
        edges.sort_unstable();
        for unoccupied in closing_subsets(g, &edges) {
            debug_assert!(edges.len() <= 10 * unoccupied.len());
            let c_prime = ctx.count(&unoccupied);
            out.push(OrdPolymer {
                vertices: vertices_of(g, &edges),
                edges: edges.clone(),
                unoccupied,
                c_prime,
            });
        }
    })
}

/// Every `U ⊆ γ` with `B_∞(U) = γ`, for a connected edge set `γ` (sorted).
fn closing_subsets(g: &Graph, gamma: &[usize]) -> Vec<Vec<usize>> {
    let delta = g.delta();
    let verts = vertices_of(g, gamma);
    let local = |v: usize| verts.binary_search(&v).unwrap();
    let mut deg = vec![0usize; verts.len()];
    for &id in gamma {
        let (u, v) = g.edge(id);
        deg[local(u)] += 1;
        deg[local(v)] += 1;
    }
    // γ must be closed: a vertex meeting the threshold inside γ has all its edges in γ.
    let full: Vec<bool> = verts.iter().zip(&deg).map(|(&v, &d)| meets_threshold(d, delta) && d == g.degree(v)).collect();
    if verts.iter().zip(&deg).any(|(&v, &d)| meets_threshold(d, delta) && d < g.degree(v)) {
        return Vec::new();
    }
    let ends: Vec<(usize, usize)> = gamma.iter().map(|&id| {
        let (u, v) = g.edge(id);
        (local(u), local(v))
    }).collect();
    // edges with no full endpoint can never be absorbed, so they are unoccupied
    let free: Vec<usize> = (0..gamma.len()).filter(|&i| full[ends[i].0] || full[ends[i].1]).collect();
    let mut out = Vec::new();
    let mut in_set = vec![false; gamma.len()];
    let mut count = vec![0usize; verts.len()];
    for sub in 0u32..(1u32 << free.len()) {
        in_set.iter_mut().for_each(|b| *b = true);
        for (j, &i) in free.iter().enumerate() {
            in_set[i] = sub >> j & 1 == 1;
        }
        if !in_set.iter().any(|&b| b) {
            continue;
        }
        let unocc: Vec<usize> = (0..gamma.len()).filter(|&i| in_set[i]).collect();
        // closure restricted to γ (γ is closed, so nothing outside can join)
        count.iter_mut().for_each(|c| *c = 0);
        for &i in &unocc {
            count[ends[i].0] += 1;
            count[ends[i].1] += 1;
        }
        let mut size = unocc.len();
        let mut changed = true;
        while changed {
            changed = false;
            for i in 0..gamma.len() {
                if !in_set[i] {
                    let (a, b) = ends[i];
                    if meets_threshold(count[a], delta) || meets_threshold(count[b], delta) {
                        in_set[i] = true;
                        count[a] += 1;
                        count[b] += 1;
                        size += 1;
                        changed = true;
                    }
                }
            }
        }
        if size == gamma.len() {
            out.push(unocc.iter().map(|&i| gamma[i]).collect());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{random_regular, EdgeConfig};

    #[test]
    fn dis_counts_on_small_graphs() {
        assert_eq!(enumerate_dis_polymers(&Graph::complete(2), 1).unwrap().len(), 1);
        assert_eq!(enumerate_dis_polymers(&Graph::cycle(3), 3).unwrap().len(), 7);
        assert!(enumerate_dis_polymers(&Graph::cycle(3), 0).unwrap().is_empty());
        assert!(enumerate_dis_polymers(&Graph::cycle(3), 13).is_err());
    }

    #[test]
    fn dis_weights() {
        let p = DisPolymer { vertices: vec![0, 1], edges: vec![0] };
        assert!((w_dis(&p, 100.0, 11f64.ln()).exp() - 0.1).abs() < 1e-14);
        assert_eq!(w_dis(&p, 100.0, 0.0), f64::NEG_INFINITY);
        let p2 = DisPolymer { vertices: vec![0, 1, 2], edges: vec![0, 1] };
        assert!((w_dis(&p2, 100.0, 11f64.ln()).exp() - 0.01).abs() < 1e-15);
    }

    #[test]
    fn ord_weights() {
        let p = OrdPolymer { vertices: vec![0, 1], edges: vec![0], unoccupied: vec![0], c_prime: 0 };
        assert!((w_ord(&p, 100.0, 101f64.ln()).unwrap().exp() - 0.01).abs() < 1e-14);
        let p = OrdPolymer { vertices: vec![0, 1, 2, 3], edges: vec![0, 1, 2], unoccupied: vec![0, 1, 2], c_prime: 1 };
        assert!((w_ord(&p, 100.0, 101f64.ln()).unwrap().exp() - 1e-4).abs() < 1e-16);
        assert!(w_ord(&p, 100.0, 0.0).is_err());
    }

    #[test]
    fn complex_weight_reduces_to_real() {
        let p = DisPolymer { vertices: vec![0, 1, 2], edges: vec![0, 1] };
        let (lm, ph) = w_dis_complex(&p, 50.0, Complex::new(0.8, 0.0));
        assert!((lm - w_dis(&p, 50.0, 0.8)).abs() < 1e-12);
        assert!(ph.abs() < 1e-15);
    }

    #[test]
    fn ord_single_edges_are_unoccupied() {
        let g = random_regular(12, 5, 3).unwrap();
        let ps = enumerate_ord_polymers(&g, 1).unwrap();
        assert_eq!(ps.len(), g.num_edges());
        assert!(ps.iter().all(|p| p.unoccupied == p.edges));
        assert!(enumerate_ord_polymers(&g, 0).unwrap().is_empty());
    }

    #[test]
    fn ord_polymers_are_closure_fixed_points() {
        let g = random_regular(10, 5, 5).unwrap();
        for p in enumerate_ord_polymers(&g, 6).unwrap() {
            let u = EdgeConfig::from_edges(g.num_edges(), p.unoccupied.iter().copied());
            let closed: Vec<usize> = boundary_closure(&g, &u).iter().collect();
            assert_eq!(closed, p.edges);
            assert!(p.edges.len() <= 10 * p.unoccupied.len());
        }
    }

    #[test]
    fn compatibility() {
        let a = DisPolymer { vertices: vec![0, 1], edges: vec![0] };
        let b = DisPolymer { vertices: vec![2, 3], edges: vec![5] };
        let c = DisPolymer { vertices: vec![1, 2], edges: vec![1] };
        assert!(compatible(&a, &b));
        assert!(!compatible(&a, &c));
        assert!(!compatible(&a, &a));
    }
}
