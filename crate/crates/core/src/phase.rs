//! Free energies on the infinite Δ-regular tree, the order/disorder critical
//! point, and cycle corrections for finite-size scaling.
//!
//! Infinite-tree quantities are computed on depth-`L` truncations with
//! `L ≥ m`. Clusters of size `< m` that contain the root cannot reach depth
//! `L`, so the truncation changes nothing.

use std::collections::{HashMap, VecDeque};
use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::Serialize;

use crate::cluster::{Arena, ClusterSeries, Model, Pinning, Site, DEFAULT_CLUSTER_BUDGET};
use crate::engine::{beta0, beta1};
use crate::error::{Error, Result};
use crate::exact::log_x;
use crate::graph::Graph;
use crate::polymers::{enumerate_dis_polymers_in, enumerate_ord_polymers_in, Scope};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TreeSpec {
    pub delta: usize,
    pub depth: usize,
    /// Root the tree at a `k`-cycle: every cycle vertex gets `Δ − 2` subtrees.
    pub cycle: Option<usize>,
}

/// Builds the truncated tree with vertices labelled in BFS order from the
/// root (vertex 0) and edges sorted, so edge ids grow with distance from the
/// root. Vertices at depth `L` are boundary. A bare cycle (`L = 0`) has no
/// boundary vertices.
pub fn build_tree(spec: TreeSpec) -> Result<Graph> {
    let d = spec.delta;
    if d < 2 {
        return Err(Error::invalid("trees need delta ≥ 2"));
    }
    let mut edges = Vec::new();
    let mut depth = Vec::new();
    let mut frontier: Vec<(usize, usize)> = Vec::new(); // (vertex, children to add)
    match spec.cycle {
        None => {
            depth.push(0);
            frontier.push((0, d));
        }
        Some(k) => {
            if k < 3 {
                return Err(Error::invalid("cycle length must be at least 3"));
            }
            for v in 0..k {
                depth.push(0);
                edges.push((v, (v + 1) % k));
                frontier.push((v, d - 2));
            }
        }
    }
    for level in 1..=spec.depth {
        let mut next = Vec::new();
        for &(v, children) in &frontier {
            for _ in 0..children {
                let c = depth.len();
                depth.push(level);
                edges.push((v, c));
                next.push((c, d - 1));
            }
        }
        frontier = next;
    }
    let n = depth.len();
    let marks: Vec<bool> = depth.iter().map(|&l| spec.depth > 0 && l == spec.depth).collect();
    let adj = {
        let mut a = vec![Vec::new(); n];
        for &(u, v) in &edges {
            a[u].push(v);
            a[v].push(u);
        }
        a
    };
    let mut label = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::from([0usize]);
    label[0] = 0;
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &u in &adj[v] {
            if label[u] == usize::MAX {
                label[u] = order.len() + queue.len();
                queue.push_back(u);
            }
        }
    }
    let mut relabelled: Vec<(usize, usize)> = edges
        .iter()
        .map(|&(u, v)| (label[u].min(label[v]), label[u].max(label[v])))
        .collect();
    relabelled.sort_unstable();
    let mut new_marks = vec![false; n];
    for v in 0..n {
        new_marks[label[v]] = marks[v];
    }
    let expansion = (spec.depth > 0).then_some(d - 2);
    Graph::new(n, d, relabelled)?.with_boundary(new_marks, expansion)
}

/// `ln q + (Δ/2) ln(1 + (e^β − 1)/q)`.
pub fn f_dis_closed(q: f64, beta: f64, delta: usize) -> f64 {
    q.ln() + delta as f64 / 2.0 * (beta.exp_m1() / q).ln_1p()
}

/// Edge retention probability of the free measure on the tree.
pub fn free_tree_edge_prob(q: f64, beta: f64) -> f64 {
    let x = beta.exp_m1();
    x / (x + q)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct SeriesKey {
    model: Model,
    spec: TreeSpec,
    m: usize,
    inverse_u: bool,
}

fn series_cache() -> &'static Mutex<HashMap<SeriesKey, Arc<ClusterSeries>>> {
    static CACHE: OnceLock<Mutex<HashMap<SeriesKey, Arc<ClusterSeries>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Sum over clusters containing the root with `‖Γ‖ < m`, as a polynomial in
/// `q` and `x` (cached per shape). `Pinning::InverseU` divides each cluster
/// by the number of vertices it covers.
pub fn root_cluster_series(model: Model, delta: usize, cycle: Option<usize>, m: usize, pinning: Pinning) -> Result<Arc<ClusterSeries>> {
    let spec = TreeSpec { delta, depth: m, cycle };
    let key = SeriesKey {
        model,
        spec,
        m,
        inverse_u: pinning == Pinning::InverseU,
    };
    if let Some(s) = series_cache().lock().unwrap().get(&key) {
        return Ok(s.clone());
    }
    let g = build_tree(spec)?;
    let scope = Scope::Near {
        root: 0,
        budget: m.saturating_sub(1),
    };
    let size = m.saturating_sub(1);
    let sites: Vec<Site> = match model {
        Model::Dis => enumerate_dis_polymers_in(&g, size, scope)?.iter().map(Site::from).collect(),
        Model::Ord => enumerate_ord_polymers_in(&g, size, scope)?.iter().map(Site::from).collect(),
    };
    let (arena, count) = Arena::rooted(sites, 0);
    let series = Arc::new(ClusterSeries::build(&arena, m, 0..count, pinning, DEFAULT_CLUSTER_BUDGET)?);
    series_cache().lock().unwrap().insert(key, series.clone());
    Ok(series)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TreeFreeEnergy {
    pub value: f64,
    pub m: usize,
    /// `q^{−m/(200Δ)}`.
    pub tail_bound: f64,
    /// `β < β₀`: outside the range where the ordered expansion is proven to
    /// converge.
    pub unverified: bool,
}

/// `ln q + Σ_{Γ∋r, ‖Γ‖<m} φ(Γ)w(Γ)/u(Γ)` for the disordered polymers of the
/// tree; converges to [`f_dis_closed`].
pub fn f_dis_truncated(q: f64, beta: f64, delta: usize, m: usize) -> Result<f64> {
    let s = root_cluster_series(Model::Dis, delta, None, m, Pinning::InverseU)?;
    Ok(q.ln() + s.evaluate(q, beta))
}

/// `(Δ/2) ln(e^β − 1) + Σ_{Γ∋r, ‖Γ‖<m} φ(Γ)w(Γ)/u(Γ)` for ordered polymers
/// of the tree.
pub fn f_ord_truncated(q: f64, beta: f64, delta: usize, m: usize) -> Result<TreeFreeEnergy> {
    if !(beta > 0.0) {
        return Err(Error::invalid("the ordered free energy needs β > 0"));
    }
    let s = root_cluster_series(Model::Ord, delta, None, m, Pinning::InverseU)?;
    Ok(TreeFreeEnergy {
        value: delta as f64 / 2.0 * log_x(beta) + s.evaluate(q, beta),
        m,
        tail_bound: (-(m as f64) * q.ln() / (200.0 * delta as f64)).exp(),
        unverified: beta < beta0(q, delta),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaC {
    pub beta_c: f64,
    pub bracket: (f64, f64),
    pub g_at_bracket: (f64, f64),
    pub m: usize,
    pub iterations: u32,
    pub beta0: f64,
    pub beta1: f64,
}

/// Bisection for the root of `f_ord − f_dis` on `[β₀, β₁]`.
pub fn beta_c_solve(q: f64, delta: usize, m: usize, tol: f64) -> Result<BetaC> {
    if !(q > 1.0) || delta < 3 {
        return Err(Error::invalid("critical point needs q > 1 and delta ≥ 3"));
    }
    let series = root_cluster_series(Model::Ord, delta, None, m, Pinning::InverseU)?;
    let g = |beta: f64| delta as f64 / 2.0 * log_x(beta) + series.evaluate(q, beta) - f_dis_closed(q, beta, delta);
    let (b0, b1) = (beta0(q, delta), beta1(q, delta));
    let (mut lo, mut hi) = (b0, b1);
    let (mut g_lo, mut g_hi) = (g(lo), g(hi));
    if !(g_lo < 0.0 && g_hi > 0.0) {
        return Err(Error::NoBracket {
            what: "f_ord - f_dis on [beta0, beta1]",
            lo: g_lo,
            hi: g_hi,
        });
    }
    let mut iterations = 0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid);
        if gm < 0.0 {
            (lo, g_lo) = (mid, gm);
        } else {
            (hi, g_hi) = (mid, gm);
        }
        iterations += 1;
    }
    Ok(BetaC {
        beta_c: 0.5 * (lo + hi),
        bracket: (lo, hi),
        g_at_bracket: (g_lo, g_hi),
        m,
        iterations,
        beta0: b0,
        beta1: b1,
    })
}

/// Solution without clusters: `(Δ/2) ln x = ln q + (Δ/2) ln(1 + x/q)` gives
/// `x = q^{2/Δ} / (1 − q^{2/Δ − 1})`.
pub fn beta_c_first_order(q: f64, delta: usize) -> Result<f64> {
    let a = 2.0 / delta as f64;
    let denom = 1.0 - q.powf(a - 1.0);
    if !(denom > 0.0) {
        return Err(Error::invalid("no first-order critical point for these parameters"));
    }
    Ok((q.powf(a) / denom).ln_1p())
}

/// `ln((q − 2)/((q − 1)^{1 − 2/Δ} − 1))`, defined for `q > 2`.
pub fn beta_c_potts_formula(q: f64, delta: usize) -> Result<f64> {
    if !(q > 2.0) || delta < 3 {
        return Err(Error::invalid(format!("formula needs q > 2 and delta ≥ 3, got q={q}")));
    }
    let denom = (q - 1.0).powf(1.0 - 2.0 / delta as f64) - 1.0;
    Ok(((q - 2.0) / denom).ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaCRow {
    pub q: f64,
    pub beta_c: f64,
    pub potts_formula: f64,
    pub asymptotic: f64,
    pub ratio_to_formula: f64,
}

/// Solver output against the explicit Potts formula and `2 ln q/Δ`.
pub fn beta_c_table(qs: &[f64], delta: usize, m: usize, tol: f64) -> Result<Vec<BetaCRow>> {
    qs.iter()
        .map(|&q| {
            let b = beta_c_solve(q, delta, m, tol)?.beta_c;
            let f = beta_c_potts_formula(q, delta)?;
            Ok(BetaCRow {
                q,
                beta_c: b,
                potts_formula: f,
                asymptotic: 2.0 * q.ln() / delta as f64,
                ratio_to_formula: b / f,
            })
        })
        .collect()
}

/// Root cluster sum on the cycle-rooted tree minus the same sum on the plain
/// tree, both truncated at `m` and without the `1/u` factor. Zero when
/// `k ≥ m`.
pub fn alpha_k(model: Model, k: usize, q: f64, beta: f64, delta: usize, m: usize) -> Result<f64> {
    if k < 3 {
        return Err(Error::invalid("cycle length must be at least 3"));
    }
    if k >= m {
        return Ok(0.0);
    }
    let with = root_cluster_series(model, delta, Some(k), m, Pinning::Plain)?;
    let without = root_cluster_series(model, delta, None, m, Pinning::Plain)?;
    Ok(with.difference(&without).evaluate(q, beta))
}

/// `α_k` for `3 ≤ k ≤ k_max` in both models.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingCoefficients {
    pub k_max: usize,
    pub alpha_dis: Vec<f64>,
    pub alpha_ord: Vec<f64>,
}

impl ScalingCoefficients {
    pub fn compute(q: f64, beta: f64, delta: usize, m: usize, k_max: usize) -> Result<Self> {
        let ks = 3..=k_max;
        Ok(Self {
            k_max,
            alpha_dis: ks.clone().map(|k| alpha_k(Model::Dis, k, q, beta, delta, m)).collect::<Result<_>>()?,
            alpha_ord: ks.map(|k| alpha_k(Model::Ord, k, q, beta, delta, m)).collect::<Result<_>>()?,
        })
    }

    pub fn zeros(k_max: usize) -> Self {
        let len = k_max.saturating_sub(2);
        Self {
            k_max,
            alpha_dis: vec![0.0; len],
            alpha_ord: vec![0.0; len],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingSample {
    /// `Y_3, …, Y_{k_max}`.
    pub y: Vec<u64>,
    pub w_dis: f64,
    pub w_ord: f64,
    pub w: f64,
    /// `Q = e^W`, formed as `q · e^{W − ln q}` so that vanishing
    /// coefficients give exactly `q`.
    pub q_value: f64,
}

/// Mean number of `k`-cycles in a random Δ-regular graph: `(Δ−1)^k/(2k)`.
pub fn cycle_mean(delta: usize, k: usize) -> f64 {
    (delta as f64 - 1.0).powi(k as i32) / (2.0 * k as f64)
}

/// Draws independent `Y_k ~ Poisson((Δ−1)^k/(2k))` and forms
/// `W^dis = Σ α_k^dis Y_k`, `W^ord = ln q + Σ α_k^ord Y_k`, `Q = e^{W^ord − W^dis}`.
pub fn sample_w<R: Rng + ?Sized>(coeffs: &ScalingCoefficients, q: f64, delta: usize, draws: usize, rng: &mut R) -> Result<Vec<ScalingSample>> {
    let dists: Vec<Poisson<f64>> = (3..=coeffs.k_max)
        .map(|k| Poisson::new(cycle_mean(delta, k)).map_err(|e| Error::invalid(format!("poisson mean: {e}"))))
        .collect::<Result<_>>()?;
    Ok((0..draws)
        .map(|_| {
            let y: Vec<u64> = dists.iter().map(|d| d.sample(rng) as u64).collect();
            let w_dis: f64 = coeffs.alpha_dis.iter().zip(&y).map(|(a, &n)| a * n as f64).sum();
            let shift: f64 = coeffs.alpha_ord.iter().zip(&y).map(|(a, &n)| a * n as f64).sum();
            let w_ord = q.ln() + shift;
            ScalingSample {
                y,
                w_dis,
                w_ord,
                w: w_ord - w_dis,
                q_value: q * (shift - w_dis).exp(),
            }
        })
        .collect())
}
