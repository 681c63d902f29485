//! Cluster expansion of polymer partition functions.
//!
//! A cluster is a multiset of polymers whose incompatibility graph is
//! connected. With `H` the incompatibility graph on the tuple of copies and
//! `S(H) = Σ_{A spanning connected} (−1)^{|A|}`, the multiset `{γ_j^{m_j}}`
//! contributes `S(H) / Π m_j! · Π w_j^{m_j}` to `ln Ξ`. This equals the sum
//! over all orderings of the tuple of `φ(H) Π w`.

mod ursell;

pub use ursell::{connected_signed_sum, ursell, URSELL_CAP};

use std::collections::HashMap;
use std::ops::Range;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::log_x;
use crate::graph::Graph;
use crate::logspace::{log_add, KahanSum};
use crate::polymers::{
    enumerate_dis_polymers_in, enumerate_ord_polymers_in, sorted_disjoint, DisPolymer, OrdPolymer, Scope,
};

pub const DEFAULT_CLUSTER_BUDGET: u64 = 10_000_000;
pub const XI_BRUTE_CAP: usize = 25;
/// Largest truncation `m`; clusters then have at most 11 members, whose
/// incompatibility graphs fit a 64-bit cache key.
pub const MAX_TRUNCATION: usize = 12;
const CHUNKS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Dis,
    Ord,
}

impl std::str::FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dis" => Ok(Model::Dis),
            "ord" => Ok(Model::Ord),
            _ => Err(Error::invalid(format!("unknown model {s:?}, expected dis or ord"))),
        }
    }
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Model::Dis => "dis",
            Model::Ord => "ord",
        })
    }
}

/// A polymer as the expansion sees it: a vertex support, a size `|E(γ)|`,
/// and a weight monomial `q^{qa} x^{xb}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Site {
    pub vertices: Vec<usize>,
    pub size: usize,
    pub qa: i32,
    pub xb: i32,
}

impl Site {
    pub fn log_weight(&self, q: f64, beta: f64) -> f64 {
        let lx = log_x(beta);
        let xt = if self.xb == 0 { 0.0 } else { self.xb as f64 * lx };
        self.qa as f64 * q.ln() + xt
    }
}

impl From<&DisPolymer> for Site {
    fn from(p: &DisPolymer) -> Self {
        Site {
            vertices: p.vertices.clone(),
            size: p.num_edges(),
            qa: 1 - p.num_vertices() as i32,
            xb: p.num_edges() as i32,
        }
    }
}

impl From<&OrdPolymer> for Site {
    fn from(p: &OrdPolymer) -> Self {
        Site {
            vertices: p.vertices.clone(),
            size: p.num_edges(),
            qa: p.c_prime as i32,
            xb: -(p.unoccupied.len() as i32),
        }
    }
}

/// Polymer arena with a per-vertex index ordered by size, so neighbour scans
/// can stop at the remaining size budget.
#[derive(Debug, Clone)]
pub struct Arena {
    sites: Vec<Site>,
    by_vertex: Vec<Vec<usize>>,
    n_vertices: usize,
}

impl Arena {
    pub fn new(sites: Vec<Site>) -> Self {
        assert!(sites.iter().all(|s| s.size >= 1), "polymers must have size at least 1");
        let n_vertices = sites.iter().flat_map(|s| s.vertices.iter()).map(|&v| v + 1).max().unwrap_or(0);
        let mut by_vertex = vec![Vec::new(); n_vertices];
        for (i, s) in sites.iter().enumerate() {
            for &v in &s.vertices {
                by_vertex[v].push(i);
            }
        }
        for list in &mut by_vertex {
            list.sort_by_key(|&i| (sites[i].size, i));
        }
        Self { sites, by_vertex, n_vertices }
    }

    pub fn from_dis(ps: &[DisPolymer]) -> Self {
        Self::new(ps.iter().map(Site::from).collect())
    }

    pub fn from_ord(ps: &[OrdPolymer]) -> Self {
        Self::new(ps.iter().map(Site::from).collect())
    }

    /// Reorders so that polymers containing `root` come first; returns how
    /// many there are. Clusters anchored in `0..count` are then exactly the
    /// clusters containing `root`.
    pub fn rooted(mut sites: Vec<Site>, root: usize) -> (Self, usize) {
        sites.sort_by_key(|s| !s.vertices.contains(&root));
        let count = sites.iter().take_while(|s| s.vertices.contains(&root)).count();
        (Self::new(sites), count)
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn log_weights(&self, q: f64, beta: f64) -> Vec<f64> {
        self.sites.iter().map(|s| s.log_weight(q, beta)).collect()
    }

    pub fn compatible(&self, i: usize, j: usize) -> bool {
        i != j && sorted_disjoint(&self.sites[i].vertices, &self.sites[j].vertices)
    }
}

/// One multiset cluster handed to visitors.
#[derive(Debug)]
pub struct ClusterRef<'a> {
    pub polymers: &'a [usize],
    pub multiplicities: &'a [usize],
    /// `‖Γ‖ = Σ m_j |E(γ_j)|`.
    pub size: usize,
    /// `S(H)`; the coefficient is `S(H) / Π m_j!`.
    pub signed_sum: i64,
    pub mult_factorial: u64,
    /// Number of distinct vertices covered.
    pub union_vertices: usize,
}

impl ClusterRef<'_> {
    pub fn coefficient(&self) -> f64 {
        self.signed_sum as f64 / self.mult_factorial as f64
    }
}

struct Walker<'a> {
    arena: &'a Arena,
    cap: usize,
    in_set: Vec<bool>,
    near: Vec<u32>,
    stamp: Vec<u32>,
    gen: u32,
    vstamp: Vec<u32>,
    vgen: u32,
    set: Vec<usize>,
    limits: Vec<usize>,
    weight: usize,
    cache: HashMap<(usize, u64), i64>,
    mults: Vec<usize>,
}

impl<'a> Walker<'a> {
    fn new(arena: &'a Arena, cap: usize) -> Self {
        let n = arena.len();
        Self {
            arena,
            cap,
            in_set: vec![false; n],
            near: vec![0; n],
            stamp: vec![0; n],
            gen: 0,
            vstamp: vec![0; arena.n_vertices],
            vgen: 0,
            set: Vec::new(),
            limits: Vec::new(),
            weight: 0,
            cache: HashMap::new(),
            mults: Vec::new(),
        }
    }

    fn for_neighbors(arena: &Arena, p: usize, limit: usize, mut f: impl FnMut(usize)) {
        for &v in &arena.sites[p].vertices {
            for &u in &arena.by_vertex[v] {
                if arena.sites[u].size > limit {
                    break;
                }
                f(u);
            }
        }
    }

    fn push(&mut self, p: usize) {
        self.weight += self.arena.sites[p].size;
        let limit = self.cap - self.weight;
        self.set.push(p);
        self.limits.push(limit);
        self.in_set[p] = true;
        let near = &mut self.near;
        near[p] += 1;
        Self::for_neighbors(self.arena, p, limit, |u| near[u] += 1);
    }

    fn pop(&mut self) {
        let p = self.set.pop().unwrap();
        let limit = self.limits.pop().unwrap();
        self.in_set[p] = false;
        let near = &mut self.near;
        near[p] -= 1;
        Self::for_neighbors(self.arena, p, limit, |u| near[u] -= 1);
        self.weight -= self.arena.sites[p].size;
    }

    fn run(
        &mut self,
        anchor: usize,
        counter: &AtomicU64,
        budget: u64,
        visit: &mut dyn FnMut(&ClusterRef),
    ) -> Result<()> {
        if self.arena.sites[anchor].size > self.cap {
            return Ok(());
        }
        self.push(anchor);
        let limit = self.cap - self.weight;
        let mut ext = Vec::new();
        self.gen += 1;
        let (stamp, gen) = (&mut self.stamp, self.gen);
        Self::for_neighbors(self.arena, anchor, limit, |u| {
            if u > anchor && stamp[u] != gen {
                stamp[u] = gen;
                ext.push(u);
            }
        });
        let r = self.extend(anchor, ext, counter, budget, visit);
        self.pop();
        r
    }

    fn extend(
        &mut self,
        anchor: usize,
        mut ext: Vec<usize>,
        counter: &AtomicU64,
        budget: u64,
        visit: &mut dyn FnMut(&ClusterRef),
    ) -> Result<()> {
        self.emit(counter, budget, visit)?;
        while let Some(w) = ext.pop() {
            let ws = self.arena.sites[w].size;
            if self.weight + ws > self.cap {
                continue;
            }
            let limit = self.cap - self.weight - ws;
            let mut next = ext.clone();
            self.gen += 1;
            let (stamp, gen, near, in_set) = (&mut self.stamp, self.gen, &self.near, &self.in_set);
            Self::for_neighbors(self.arena, w, limit, |u| {
                if u > anchor && near[u] == 0 && !in_set[u] && stamp[u] != gen {
                    stamp[u] = gen;
                    next.push(u);
                }
            });
            self.push(w);
            let r = self.extend(anchor, next, counter, budget, visit);
            self.pop();
            r?;
        }
        Ok(())
    }

    /// Visits every multiplicity assignment on the current distinct set.
    fn emit(&mut self, counter: &AtomicU64, budget: u64, visit: &mut dyn FnMut(&ClusterRef)) -> Result<()> {
        let t = self.set.len();
        let arena = self.arena;
        let mut inc = vec![0u32; t];
        for i in 0..t {
            for j in i + 1..t {
                if !arena.compatible(self.set[i], self.set[j]) {
                    inc[i] |= 1 << j;
                    inc[j] |= 1 << i;
                }
            }
        }
        self.vgen += 1;
        let mut union_vertices = 0;
        for &p in &self.set {
            for &v in &arena.sites[p].vertices {
                if self.vstamp[v] != self.vgen {
                    self.vstamp[v] = self.vgen;
                    union_vertices += 1;
                }
            }
        }
        self.mults.clear();
        self.mults.resize(t, 1);
        let spare = self.cap - self.weight;
        self.assign(0, spare, &inc, union_vertices, counter, budget, visit)
    }

    #[allow(clippy::too_many_arguments)]
    fn assign(
        &mut self,
        i: usize,
        spare: usize,
        inc: &[u32],
        union_vertices: usize,
        counter: &AtomicU64,
        budget: u64,
        visit: &mut dyn FnMut(&ClusterRef),
    ) -> Result<()> {
        let t = self.set.len();
        if i == t {
            if counter.fetch_add(1, Ordering::Relaxed) >= budget {
                return Err(Error::Budget {
                    what: "cluster representatives",
                    budget,
                });
            }
            let signed_sum = self.signed_sum(inc);
            let mult_factorial = self.mults.iter().map(|&m| factorial(m)).product();
            let size = self.cap - spare;
            visit(&ClusterRef {
                polymers: &self.set,
                multiplicities: &self.mults,
                size,
                signed_sum,
                mult_factorial,
                union_vertices,
            });
            return Ok(());
        }
        let s = self.arena.sites[self.set[i]].size;
        let base = self.mults[i];
        let mut extra = 0;
        loop {
            self.mults[i] = base + extra;
            self.assign(i + 1, spare - extra * s, inc, union_vertices, counter, budget, visit)?;
            extra += 1;
            if extra * s > spare {
                break;
            }
        }
        self.mults[i] = base;
        Ok(())
    }

    /// `S(H)` for the tuple expansion of the current multiset, cached by shape.
    fn signed_sum(&mut self, inc: &[u32]) -> i64 {
        let t = self.set.len();
        let mut block = Vec::with_capacity(URSELL_CAP);
        for i in 0..t {
            block.extend(std::iter::repeat_n(i, self.mults[i]));
        }
        let k = block.len();
        let mut adj = vec![0u32; k];
        let mut key = 0u64;
        let mut bit = 0;
        for a in 0..k {
            for b in a + 1..k {
                let (x, y) = (block[a], block[b]);
                if x == y || inc[x] >> y & 1 == 1 {
                    adj[a] |= 1 << b;
                    adj[b] |= 1 << a;
                    key |= 1 << bit;
                }
                bit += 1;
            }
        }
        *self.cache.entry((k, key)).or_insert_with(|| connected_signed_sum(&adj))
    }
}

fn factorial(m: usize) -> u64 {
    (1..=m as u64).product()
}

fn check_truncation(m: usize) -> Result<()> {
    if m > MAX_TRUNCATION {
        return Err(Error::Cap {
            what: "cluster truncation m",
            got: m,
            cap: MAX_TRUNCATION,
        });
    }
    Ok(())
}

/// Runs `visit` on every cluster with `‖Γ‖ < m` whose smallest polymer id is
/// in `anchors`. Work is split into a fixed number of anchor chunks and the
/// per-chunk states are returned in chunk order.
pub fn par_clusters<T, I, V>(
    arena: &Arena,
    m: usize,
    anchors: Range<usize>,
    budget: u64,
    init: I,
    visit: V,
) -> Result<Vec<T>>
where
    T: Send,
    I: Fn() -> T + Sync,
    V: Fn(&mut T, &ClusterRef) + Sync,
{
    check_truncation(m)?;
    if m <= 1 || anchors.is_empty() {
        return Ok(vec![init()]);
    }
    let cap = m - 1;
    let len = anchors.len();
    let per = len.div_ceil(CHUNKS);
    let counter = AtomicU64::new(0);
    (0..len.div_ceil(per))
        .into_par_iter()
        .map(|c| {
            let mut state = init();
            let mut walker = Walker::new(arena, cap);
            let lo = anchors.start + c * per;
            let hi = (lo + per).min(anchors.end);
            for a in lo..hi {
                walker.run(a, &counter, budget, &mut |cl| visit(&mut state, cl))?;
            }
            Ok(state)
        })
        .collect()
}

/// Sequential visitor over all clusters, convenient for tests and tiny arenas.
pub fn for_each_cluster(arena: &Arena, m: usize, budget: u64, mut visit: impl FnMut(&ClusterRef)) -> Result<()> {
    check_truncation(m)?;
    if m <= 1 {
        return Ok(());
    }
    let counter = AtomicU64::new(0);
    let mut walker = Walker::new(arena, m - 1);
    for a in 0..arena.len() {
        walker.run(a, &counter, budget, &mut visit)?;
    }
    Ok(())
}

/// `Σ_{‖Γ‖<m} coefficient · Π w` with the given log-weights.
pub fn cluster_sum(arena: &Arena, m: usize, log_w: &[f64], budget: u64) -> Result<f64> {
    assert_eq!(log_w.len(), arena.len());
    let parts = par_clusters(arena, m, 0..arena.len(), budget, KahanSum::new, |acc, cl| {
        let lw: f64 = cl.polymers.iter().zip(cl.multiplicities).map(|(&p, &k)| k as f64 * log_w[p]).sum();
        acc.add(cl.coefficient() * lw.exp());
    })?;
    Ok(parts.iter().map(|k| k.value()).collect::<KahanSum>().value())
}

/// Whether cluster terms are divided by the number of covered vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pinning {
    Plain,
    InverseU,
}

/// Truncated cluster expansion as an exact polynomial in `q` and `x = e^β − 1`:
/// `Σ (num / denom) q^{qa} x^{xb}`, kept per cluster size so any smaller
/// truncation can also be read off.
#[derive(Debug, Clone)]
pub struct ClusterSeries {
    pub m: usize,
    pub denom: i128,
    pub terms: HashMap<(usize, i32, i32), i128>,
    pub clusters: u64,
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}

fn lcm_upto(k: usize) -> i128 {
    (1..=k as i128).fold(1, |l, i| l / gcd(l, i) * i)
}

impl ClusterSeries {
    pub fn build(arena: &Arena, m: usize, anchors: Range<usize>, pinning: Pinning, budget: u64) -> Result<Self> {
        check_truncation(m)?;
        let cap = m.saturating_sub(1);
        let fact: i128 = (1..=cap as i128).product();
        let denom = match pinning {
            Pinning::Plain => fact.max(1),
            Pinning::InverseU => fact.max(1) * lcm_upto(2 * cap.max(1)),
        };
        type Acc = (HashMap<(usize, i32, i32), i128>, u64);
        let parts = par_clusters(arena, m, anchors, budget, Acc::default, |(map, count), cl| {
            let (mut qa, mut xb) = (0i32, 0i32);
            for (&p, &k) in cl.polymers.iter().zip(cl.multiplicities) {
                qa += k as i32 * arena.sites[p].qa;
                xb += k as i32 * arena.sites[p].xb;
            }
            let mut div = cl.mult_factorial as i128;
            if pinning == Pinning::InverseU {
                div *= cl.union_vertices as i128;
            }
            debug_assert_eq!(denom % div, 0);
            *map.entry((cl.size, qa, xb)).or_insert(0) += cl.signed_sum as i128 * (denom / div);
            *count += 1;
        })?;
        let mut terms = HashMap::new();
        let mut clusters = 0;
        for (map, c) in parts {
            clusters += c;
            for (k, v) in map {
                *terms.entry(k).or_insert(0) += v;
            }
        }
        terms.retain(|_, v| *v != 0);
        Ok(Self { m, denom, terms, clusters })
    }

    /// Value with clusters of size `< m_eval` (`m_eval ≤ m`).
    pub fn evaluate_upto(&self, q: f64, beta: f64, m_eval: usize) -> f64 {
        let (lq, lx) = (q.ln(), log_x(beta));
        let mut keys: Vec<_> = self.terms.iter().filter(|((s, _, _), _)| *s < m_eval).collect();
        keys.sort_by_key(|(k, _)| **k);
        let mut acc = KahanSum::new();
        for (&(_, qa, xb), &num) in keys {
            let xt = if xb == 0 { 0.0 } else { xb as f64 * lx };
            acc.add(num as f64 / self.denom as f64 * (qa as f64 * lq + xt).exp());
        }
        acc.value()
    }

    pub fn evaluate(&self, q: f64, beta: f64) -> f64 {
        self.evaluate_upto(q, beta, self.m)
    }

    /// `self − other` computed on the exact coefficients, so small
    /// differences of large sums keep full relative precision.
    pub fn difference(&self, other: &Self) -> Self {
        let denom = self.denom / gcd(self.denom, other.denom) * other.denom;
        let (a, b) = (denom / self.denom, denom / other.denom);
        let mut terms: HashMap<(usize, i32, i32), i128> = self.terms.iter().map(|(&k, &v)| (k, v * a)).collect();
        for (&k, &v) in &other.terms {
            *terms.entry(k).or_insert(0) -= v * b;
        }
        terms.retain(|_, v| *v != 0);
        Self {
            m: self.m.min(other.m),
            denom,
            terms,
            clusters: self.clusters + other.clusters,
        }
    }
}

/// `n · q^{−m/(200Δ)}`.
pub fn tail_bound(n: usize, q: f64, delta: usize, m: usize) -> f64 {
    n as f64 * (-(m as f64) * q.ln() / (200.0 * delta as f64)).exp()
}

#[derive(Debug, Clone, Serialize)]
pub struct TruncatedSeries {
    pub model: Model,
    pub m: usize,
    pub value: f64,
    pub tail_bound: f64,
    pub polymers: usize,
    pub clusters: u64,
}

/// Polymers with at most `m − 1` edges, i.e. all that can occur in a cluster
/// with `‖Γ‖ < m`, as an arena.
pub fn polymer_arena(g: &Graph, model: Model, m: usize, scope: Scope) -> Result<Arena> {
    let size = m.saturating_sub(1);
    Ok(match model {
        Model::Dis => Arena::from_dis(&enumerate_dis_polymers_in(g, size, scope)?),
        Model::Ord => Arena::from_ord(&enumerate_ord_polymers_in(g, size, scope)?),
    })
}

/// `T_m` for the chosen model on `g`, with its tail bound attached.
pub fn truncated_log_xi(g: &Graph, q: f64, beta: f64, m: usize, model: Model) -> Result<TruncatedSeries> {
    let arena = polymer_arena(g, model, m, Scope::All)?;
    let series = ClusterSeries::build(&arena, m, 0..arena.len(), Pinning::Plain, DEFAULT_CLUSTER_BUDGET)?;
    Ok(TruncatedSeries {
        model,
        m,
        value: series.evaluate(q, beta),
        tail_bound: tail_bound(g.n(), q, g.delta(), m),
        polymers: arena.len(),
        clusters: series.clusters,
    })
}

/// `ln Ξ` by summing over every pairwise-compatible subset of the arena.
pub fn xi_brute(arena: &Arena, log_w: &[f64]) -> Result<f64> {
    let n = arena.len();
    if n > XI_BRUTE_CAP {
        return Err(Error::Cap {
            what: "brute-force polymer partition function",
            got: n,
            cap: XI_BRUTE_CAP,
        });
    }
    let clash: Vec<u32> = (0..n)
        .map(|i| (0..n).filter(|&j| j == i || !arena.compatible(i, j)).fold(0, |m, j| m | 1 << j))
        .collect();
    fn rec(allowed: u32, clash: &[u32], log_w: &[f64]) -> f64 {
        if allowed == 0 {
            return 0.0;
        }
        let i = allowed.trailing_zeros() as usize;
        let without = rec(allowed & !(1 << i), clash, log_w);
        let with = log_w[i] + rec(allowed & !clash[i], clash, log_w);
        log_add(without, with)
    }
    Ok(rec(if n == 0 { 0 } else { u32::MAX >> (32 - n) }, &clash, log_w))
}

#[derive(Debug, Clone, Serialize)]
pub struct KpReport {
    pub model: Model,
    pub holds_up_to_m: bool,
    pub worst_ratio: f64,
    pub worst_vertex: usize,
    pub r: f64,
    /// Polymers larger than this were not audited.
    pub audited_size: usize,
}

/// Default decay rate: `ln q/(4Δ)` (disordered), `ln q/(200Δ)` (ordered).
pub fn default_kp_rate(model: Model, q: f64, delta: usize) -> f64 {
    match model {
        Model::Dis => q.ln() / (4.0 * delta as f64),
        Model::Ord => q.ln() / (200.0 * delta as f64),
    }
}

/// Per-vertex audit `Σ_{γ∋v, |E(γ)|≤m} e^{(1+r)|E(γ)|} |w_γ| ≤ 1/2` over
/// a given arena.
pub fn kp_audit(arena: &Arena, n: usize, log_w: &[f64], r: f64, model: Model, m: usize) -> KpReport {
    let mut per = vec![f64::NEG_INFINITY; n];
    for (s, &lw) in arena.sites().iter().zip(log_w) {
        let term = (1.0 + r) * s.size as f64 + lw;
        for &v in &s.vertices {
            per[v] = log_add(per[v], term);
        }
    }
    let (worst_vertex, worst) = per
        .iter()
        .copied()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or((0, f64::NEG_INFINITY));
    let worst_ratio = worst.exp();
    KpReport {
        model,
        holds_up_to_m: worst_ratio <= 0.5,
        worst_ratio,
        worst_vertex,
        r,
        audited_size: m,
    }
}

/// Enumerates polymers up to `m` edges and audits the per-vertex condition.
pub fn kp_check(g: &Graph, q: f64, beta: f64, model: Model, r: f64, m: usize) -> Result<KpReport> {
    let arena = polymer_arena(g, model, m + 1, Scope::All)?;
    let lw = arena.log_weights(q, beta);
    Ok(kp_audit(&arena, g.n(), &lw, r, model, m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn site(vs: &[usize], size: usize) -> Site {
        Site { vertices: vs.to_vec(), size, qa: 0, xb: size as i32 }
    }

    #[test]
    fn compatible_pair_gives_only_singletons() {
        let a = Arena::new(vec![site(&[0, 1], 1), site(&[2, 3], 1)]);
        let mut n = 0;
        for_each_cluster(&a, 100.min(MAX_TRUNCATION), u64::MAX, |cl| {
            assert!(cl.polymers.len() == 1);
            n += 1;
        })
        .unwrap();
        // (γ1)^k and (γ2)^k for k ≤ 11
        assert_eq!(n, 22);
    }

    #[test]
    fn strict_size_bound() {
        let a = Arena::new(vec![site(&[0, 1, 2], 2)]);
        let mut n = 0;
        for_each_cluster(&a, 2, u64::MAX, |_| n += 1).unwrap();
        assert_eq!(n, 0);
        let mut got = Vec::new();
        for_each_cluster(&a, 5, u64::MAX, |cl| got.push((cl.multiplicities[0], cl.coefficient()))).unwrap();
        got.sort_by_key(|g| g.0);
        assert_eq!(got, vec![(1, 1.0), (2, -0.5)]);
    }

    #[test]
    fn single_polymer_is_log_one_plus_w() {
        let a = Arena::new(vec![site(&[0, 1], 1)]);
        let w: f64 = 0.3;
        for m in 2..=MAX_TRUNCATION {
            let t = cluster_sum(&a, m, &[w.ln()], u64::MAX).unwrap();
            let series: f64 = (1..m).map(|k| (-1f64).powi(k as i32 - 1) * w.powi(k as i32) / k as f64).sum();
            assert!((t - series).abs() < 1e-15);
        }
    }

    #[test]
    fn brute_partition_function() {
        let empty = Arena::new(vec![]);
        assert_eq!(xi_brute(&empty, &[]).unwrap(), 0.0);
        let two = Arena::new(vec![site(&[0, 1], 1), site(&[1, 2], 1)]);
        let lw = [0.2f64.ln(), 0.3f64.ln()];
        assert!((xi_brute(&two, &lw).unwrap() - 1.5f64.ln()).abs() < 1e-14);
        let apart = Arena::new(vec![site(&[0, 1], 1), site(&[2, 3], 1)]);
        assert!((xi_brute(&apart, &lw).unwrap() - (1.2f64 * 1.3).ln()).abs() < 1e-14);
    }

    #[test]
    fn series_matches_direct_sum() {
        let g = Graph::cycle(5);
        let arena = polymer_arena(&g, Model::Dis, 5, Scope::All).unwrap();
        let (q, beta) = (50.0, 0.9);
        let s = ClusterSeries::build(&arena, 5, 0..arena.len(), Pinning::Plain, u64::MAX).unwrap();
        let d = cluster_sum(&arena, 5, &arena.log_weights(q, beta), u64::MAX).unwrap();
        assert!((s.evaluate(q, beta) - d).abs() < 1e-14);
    }

    #[test]
    fn budget_aborts() {
        let g = Graph::complete(5);
        let arena = polymer_arena(&g, Model::Dis, 5, Scope::All).unwrap();
        let r = cluster_sum(&arena, 5, &arena.log_weights(10.0, 0.5), 10);
        assert!(matches!(r, Err(Error::Budget { .. })));
    }

    #[test]
    fn tail_bound_values() {
        assert_eq!(tail_bound(7, 1e4, 5, 0), 7.0);
        let q = 200f64.exp();
        assert!((tail_bound(3, q, 1, 1) - 3.0 / std::f64::consts::E).abs() < 1e-12);
        let one = tail_bound(1, 1e4, 5, 7);
        assert!((tail_bound(1, 1e4, 5, 14) - one * one).abs() < 1e-15);
    }

    #[test]
    fn kp_zero_at_beta_zero() {
        let g = Graph::complete(6);
        let r = kp_check(&g, 100.0, 0.0, Model::Dis, 1.0, 3).unwrap();
        assert!(r.holds_up_to_m);
        assert_eq!(r.worst_ratio, 0.0);
    }
}
