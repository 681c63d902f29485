//! Approximate counting and sampling from the two polymer expansions:
//! `Z̃ = q^n Ξ^dis + q x^{Δn/2} Ξ^ord` with `x = e^β − 1`.

use std::sync::OnceLock;

use rand::Rng;
use serde::Serialize;

use crate::cluster::{
    default_kp_rate, kp_audit, polymer_arena, tail_bound, Arena, ClusterSeries, KpReport, Model, Pinning,
    DEFAULT_CLUSTER_BUDGET, MAX_TRUNCATION,
};
use crate::error::{Error, Result};
use crate::exact::{self, edwards_sokal_color, log_x};
use crate::graph::{class_check, ClassCheckOptions, EdgeConfig, Graph, Verdict};
use crate::logspace::logsumexp;
use crate::polymers::{enumerate_dis_polymers, enumerate_ord_polymers, DisPolymer, OrdPolymer, DIS_CAP, ORD_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Regime {
    DisOnly,
    Both,
    OrdOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeInfo {
    pub regime: Regime,
    pub beta0: f64,
    pub beta1: f64,
}

/// `β₀ = ln(1 + q^{1.9/Δ})`.
pub fn beta0(q: f64, delta: usize) -> f64 {
    (1.9 * q.ln() / delta as f64).exp().ln_1p()
}

/// `β₁ = ln(1 + q^{2.1/Δ})`.
pub fn beta1(q: f64, delta: usize) -> f64 {
    (2.1 * q.ln() / delta as f64).exp().ln_1p()
}

pub fn regime(q: f64, delta: usize, beta: f64) -> Result<RegimeInfo> {
    if !(q > 1.0) {
        return Err(Error::invalid(format!("regimes need q > 1, got {q}")));
    }
    if delta == 0 {
        return Err(Error::invalid("regimes need delta ≥ 1"));
    }
    let (b0, b1) = (beta0(q, delta), beta1(q, delta));
    let regime = if beta <= b0 {
        Regime::DisOnly
    } else if beta >= b1 {
        Regime::OrdOnly
    } else {
        Regime::Both
    };
    Ok(RegimeInfo {
        regime,
        beta0: b0,
        beta1: b1,
    })
}

/// Smallest `m` with `n q^{−m/(200Δ)} ≤ ε/4`, at least 1.
pub fn choose_m(n: usize, epsilon: f64, q: f64, delta: usize) -> usize {
    let ratio = 4.0 * n as f64 / epsilon;
    if ratio <= 1.0 {
        return 1;
    }
    let m = (200.0 * delta as f64 * ratio.ln() / q.ln()).ceil();
    if m.is_finite() { (m as usize).max(1) } else { usize::MAX }
}

/// How the error budget ε is spent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpsilonSplit {
    pub tail_dis: f64,
    pub tail_ord: f64,
    pub sampler_tv: f64,
    pub reserve: f64,
}

impl EpsilonSplit {
    fn new(eps: f64) -> Self {
        Self {
            tail_dis: eps / 4.0,
            tail_ord: eps / 4.0,
            sampler_tv: eps / 4.0,
            reserve: eps / 4.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PhaseReport {
    pub n: usize,
    pub delta: usize,
    pub q: f64,
    pub beta: f64,
    pub epsilon: f64,
    pub method: &'static str,
    pub regime: Regime,
    pub beta0: f64,
    pub beta1: f64,
    pub m: usize,
    pub m_required: usize,
    /// `n ln q + T_m^dis`, when the disordered term is active.
    pub log_zdis_hat: Option<f64>,
    /// `ln q + (Δn/2) ln(e^β−1) + T_m^ord`, when the ordered term is active.
    pub log_zord_hat: Option<f64>,
    pub log_ztilde: f64,
    pub t_dis: Option<f64>,
    pub t_ord: Option<f64>,
    /// `n q^{−m/(200Δ)}` at the `m` actually used.
    pub tail_bound: f64,
    /// The enumeration caps stopped `m` short of the required value.
    pub degraded: bool,
    pub kp_dis: Option<KpReport>,
    pub kp_ord: Option<KpReport>,
    pub class_verdict: Option<Verdict>,
    pub epsilon_split: EpsilonSplit,
}

impl PhaseReport {
    /// Every active expansion passed its audit.
    pub fn kp_verified(&self) -> bool {
        self.kp_dis.as_ref().is_none_or(|k| k.holds_up_to_m) && self.kp_ord.as_ref().is_none_or(|k| k.holds_up_to_m)
    }
}

#[derive(Debug, Clone)]
pub struct CountOptions {
    /// Truncation override; otherwise [`choose_m`] clamped to the caps.
    pub m: Option<usize>,
    /// Skip the expander class check.
    pub force: bool,
    pub class: ClassCheckOptions,
    pub budget: u64,
}

impl Default for CountOptions {
    fn default() -> Self {
        Self {
            m: None,
            force: false,
            class: ClassCheckOptions::default(),
            budget: DEFAULT_CLUSTER_BUDGET,
        }
    }
}

/// Automatic truncation is clamped here (the report is then marked
/// degraded); larger values up to [`truncation_cap`] must be asked for.
pub const AUTO_TRUNCATION_CAP: usize = 6;

/// Largest truncation supported for each model (polymers of size `m − 1`).
pub fn truncation_cap(model: Model) -> usize {
    match model {
        Model::Dis => MAX_TRUNCATION.min(DIS_CAP + 1),
        Model::Ord => MAX_TRUNCATION.min(ORD_CAP + 1),
    }
}

struct Expansion {
    arena: Arena,
    series: ClusterSeries,
}

/// Cluster series for one graph at a fixed truncation, reusable across any
/// number of `(q, β)` points.
pub struct Counter {
    g: Graph,
    m_dis: usize,
    m_ord: usize,
    budget: u64,
    class_verdict: Option<Verdict>,
    dis: OnceLock<Expansion>,
    ord: OnceLock<Expansion>,
}

impl Counter {
    /// Checks the graph (unless forced) and fixes the truncation. Series are
    /// built lazily on first use.
    pub fn new(g: &Graph, m: usize, opts: &CountOptions) -> Result<Self> {
        let class_verdict = if opts.force {
            None
        } else {
            let ev = class_check(g, &opts.class);
            if ev.verdict == Verdict::Fail {
                return Err(Error::invalid(
                    "graph fails the expander class check (use force to override)",
                ));
            }
            Some(ev.verdict)
        };
        if m == 0 {
            return Err(Error::invalid("truncation m must be at least 1"));
        }
        Ok(Self {
            g: g.clone(),
            m_dis: m.min(truncation_cap(Model::Dis)),
            m_ord: m.min(truncation_cap(Model::Ord)),
            budget: opts.budget,
            class_verdict,
            dis: OnceLock::new(),
            ord: OnceLock::new(),
        })
    }

    fn expansion(&self, model: Model) -> Result<&Expansion> {
        let (slot, m) = match model {
            Model::Dis => (&self.dis, self.m_dis),
            Model::Ord => (&self.ord, self.m_ord),
        };
        if slot.get().is_none() {
            let arena = polymer_arena(&self.g, model, m, crate::polymers::Scope::All)?;
            let series = ClusterSeries::build(&arena, m, 0..arena.len(), Pinning::Plain, self.budget)?;
            let _ = slot.set(Expansion { arena, series });
        }
        Ok(slot.get().expect("expansion initialised"))
    }

    /// Builds both expansions now rather than on first use.
    pub fn prepare(&self) -> Result<()> {
        self.expansion(Model::Dis)?;
        self.expansion(Model::Ord)?;
        Ok(())
    }

    fn kp(&self, model: Model, q: f64, beta: f64) -> Result<KpReport> {
        let (n, delta) = (self.g.n(), self.g.delta());
        let m = match model {
            Model::Dis => self.m_dis,
            Model::Ord => self.m_ord,
        };
        let e = self.expansion(model)?;
        let lw = e.arena.log_weights(q, beta);
        Ok(kp_audit(&e.arena, n, &lw, default_kp_rate(model, q, delta), model, m.saturating_sub(1)))
    }

    pub fn report(&self, q: f64, beta: f64, epsilon: f64) -> Result<PhaseReport> {
        check_inputs(q, beta, epsilon)?;
        let (n, delta) = (self.g.n(), self.g.delta());
        let info = regime(q, delta, beta)?;
        let m_required = choose_m(n, epsilon, q, delta);
        let dis_active = info.regime != Regime::OrdOnly;
        let ord_active = info.regime != Regime::DisOnly;
        let mut m_used = usize::MAX;
        let (mut t_dis, mut t_ord, mut kp_dis, mut kp_ord) = (None, None, None, None);
        if dis_active {
            t_dis = Some(self.expansion(Model::Dis)?.series.evaluate(q, beta));
            kp_dis = Some(self.kp(Model::Dis, q, beta)?);
            m_used = m_used.min(self.m_dis);
        }
        if ord_active {
            t_ord = Some(self.expansion(Model::Ord)?.series.evaluate(q, beta));
            kp_ord = Some(self.kp(Model::Ord, q, beta)?);
            m_used = m_used.min(self.m_ord);
        }
        let log_zdis_hat = t_dis.map(|t| n as f64 * q.ln() + t);
        let log_zord_hat = t_ord.map(|t| q.ln() + self.g.num_edges() as f64 * log_x(beta) + t);
        let active: Vec<f64> = log_zdis_hat.iter().chain(log_zord_hat.iter()).copied().collect();
        Ok(PhaseReport {
            n,
            delta,
            q,
            beta,
            epsilon,
            method: "polymer",
            regime: info.regime,
            beta0: info.beta0,
            beta1: info.beta1,
            m: m_used,
            m_required,
            log_zdis_hat,
            log_zord_hat,
            log_ztilde: logsumexp(&active),
            t_dis,
            t_ord,
            tail_bound: tail_bound(n, q, delta, m_used),
            degraded: m_used < m_required,
            kp_dis,
            kp_ord,
            class_verdict: self.class_verdict,
            epsilon_split: EpsilonSplit::new(epsilon),
        })
    }
}

fn check_inputs(q: f64, beta: f64, epsilon: f64) -> Result<()> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::invalid(format!("beta must be nonnegative and finite, got {beta}")));
    }
    if !(epsilon > 0.0) {
        return Err(Error::invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(q > 1.0 && q.is_finite()) {
        return Err(Error::invalid(format!("q must be finite and > 1, got {q}")));
    }
    Ok(())
}

/// Approximates `ln Z`. For `ε < e^{−n/2}` the polymer route cannot meet the
/// target and the exact enumeration is used instead (small graphs only).
pub fn log_z_tilde(g: &Graph, q: f64, beta: f64, epsilon: f64, opts: &CountOptions) -> Result<PhaseReport> {
    check_inputs(q, beta, epsilon)?;
    if epsilon < (-(g.n() as f64) / 2.0).exp() {
        return exact_report(g, q, beta, epsilon, opts);
    }
    let m_required = choose_m(g.n(), epsilon, q, g.delta());
    let m = opts.m.unwrap_or(m_required.min(AUTO_TRUNCATION_CAP));
    if opts.m.is_none() && m < m_required {
        log::warn!("truncation clamped to m = {m}; required m = {m_required}");
    }
    Counter::new(g, m, opts)?.report(q, beta, epsilon)
}

fn exact_report(g: &Graph, q: f64, beta: f64, epsilon: f64, opts: &CountOptions) -> Result<PhaseReport> {
    if g.num_edges() > exact::RC_EXACT_CAP {
        return Err(Error::invalid(format!(
            "epsilon = {epsilon} is below e^(-n/2) and the graph is too large for exact enumeration"
        )));
    }
    let info = regime(q, g.delta(), beta)?;
    let r = exact::z_rc_exact(g, q, beta, exact::default_eta(opts.class.delta_small))?;
    Ok(PhaseReport {
        n: g.n(),
        delta: g.delta(),
        q,
        beta,
        epsilon,
        method: "exact",
        regime: info.regime,
        beta0: info.beta0,
        beta1: info.beta1,
        m: 0,
        m_required: choose_m(g.n(), epsilon, q, g.delta()),
        log_zdis_hat: None,
        log_zord_hat: None,
        log_ztilde: r.log_z,
        t_dis: None,
        t_ord: None,
        tail_bound: 0.0,
        degraded: false,
        kp_dis: None,
        kp_ord: None,
        class_verdict: None,
        epsilon_split: EpsilonSplit::new(epsilon),
    })
}

/// Probability `w/(1+w)` from `ln w`.
fn occupation_prob(log_w: f64) -> f64 {
    1.0 / (1.0 + (-log_w).exp())
}

/// `⌈C·N·ln(N/ε_tv)⌉` single-polymer updates.
pub fn polymer_chain_steps(n_polymers: usize, eps_tv: f64, c: f64) -> u64 {
    if n_polymers == 0 {
        return 0;
    }
    let n = n_polymers as f64;
    (c * n * (n / eps_tv).ln().max(1.0)).ceil() as u64
}

/// Heat-bath dynamics on the hard-core polymer system: pick a polymer
/// uniformly, and if it is compatible with the rest set it present with
/// probability `w/(1+w)`. Returns the final configuration as arena indices.
pub fn sample_polymer_config<R: Rng + ?Sized>(arena: &Arena, log_w: &[f64], steps: u64, rng: &mut R) -> Vec<usize> {
    let n = arena.len();
    if n == 0 {
        return Vec::new();
    }
    let probs: Vec<f64> = log_w.iter().map(|&l| occupation_prob(l)).collect();
    let n_vertices = arena.sites().iter().flat_map(|s| s.vertices.iter()).map(|&v| v + 1).max().unwrap_or(0);
    let mut used = vec![false; n_vertices];
    let mut present = vec![false; n];
    for _ in 0..steps {
        let i = rng.random_range(0..n);
        let u: f64 = rng.random();
        let verts = &arena.sites()[i].vertices;
        if present[i] {
            if u >= probs[i] {
                present[i] = false;
                verts.iter().for_each(|&v| used[v] = false);
            }
        } else if u < probs[i] && verts.iter().all(|&v| !used[v]) {
            present[i] = true;
            verts.iter().for_each(|&v| used[v] = true);
        }
    }
    (0..n).filter(|&i| present[i]).collect()
}

/// Edge configuration of a polymer configuration: the union of `E(γ)` for
/// disordered polymers, or `E` minus the union of `E_u(γ)` for ordered ones.
/// `sets` holds `E(γ)` or `E_u(γ)` accordingly.
pub fn polymer_to_edges(g: &Graph, model: Model, sets: &[&[usize]]) -> EdgeConfig {
    let m = g.num_edges();
    match model {
        Model::Dis => EdgeConfig::from_edges(m, sets.iter().flat_map(|s| s.iter().copied())),
        Model::Ord => {
            let mut a = EdgeConfig::full(m);
            sets.iter().flat_map(|s| s.iter()).for_each(|&id| a.remove(id));
            a
        }
    }
}

#[derive(Debug, Clone)]
pub struct SamplerOptions {
    pub count: CountOptions,
    /// Constant `C` in the step budget.
    pub chain_constant: f64,
    /// Largest polymer size in the sampling arenas; defaults to `m`.
    pub polymer_size: Option<usize>,
}

impl Default for SamplerOptions {
    fn default() -> Self {
        Self {
            count: CountOptions::default(),
            chain_constant: 50.0,
            polymer_size: None,
        }
    }
}

struct PhaseSampler<P> {
    polymers: Vec<P>,
    arena: Arena,
    log_w: Vec<f64>,
    steps: u64,
}

/// Reusable random cluster sampler: picks a phase by the relative weights of
/// the active terms, runs the polymer chain, and maps polymers to edges.
pub struct RcSampler {
    g: Graph,
    pub report: PhaseReport,
    p_dis: f64,
    dis: Option<PhaseSampler<DisPolymer>>,
    ord: Option<PhaseSampler<OrdPolymer>>,
}

impl RcSampler {
    pub fn new(g: &Graph, q: f64, beta: f64, epsilon: f64, opts: &SamplerOptions) -> Result<Self> {
        let report = log_z_tilde(g, q, beta, epsilon, &opts.count)?;
        if report.method == "exact" {
            return Err(Error::invalid("sampling needs the polymer route; epsilon is below e^(-n/2)"));
        }
        let eps_tv = report.epsilon_split.sampler_tv;
        let size = opts.polymer_size.unwrap_or(report.m);
        let dis = match report.log_zdis_hat {
            Some(_) => {
                let polymers = enumerate_dis_polymers(g, size.min(DIS_CAP))?;
                let arena = Arena::from_dis(&polymers);
                let log_w = arena.log_weights(q, beta);
                let steps = polymer_chain_steps(arena.len(), eps_tv, opts.chain_constant);
                Some(PhaseSampler { polymers, arena, log_w, steps })
            }
            None => None,
        };
        let ord = match report.log_zord_hat {
            Some(_) => {
                let polymers = enumerate_ord_polymers(g, size.min(ORD_CAP))?;
                let arena = Arena::from_ord(&polymers);
                let log_w = arena.log_weights(q, beta);
                let steps = polymer_chain_steps(arena.len(), eps_tv, opts.chain_constant);
                Some(PhaseSampler { polymers, arena, log_w, steps })
            }
            None => None,
        };
        let p_dis = match (report.log_zdis_hat, report.log_zord_hat) {
            (Some(d), Some(o)) => 1.0 / (1.0 + (o - d).exp()),
            (Some(_), None) => 1.0,
            _ => 0.0,
        };
        Ok(Self {
            g: g.clone(),
            report,
            p_dis,
            dis,
            ord,
        })
    }

    /// Probability of choosing the disordered phase.
    pub fn p_dis(&self) -> f64 {
        self.p_dis
    }

    /// Outputs are best effort when an active expansion failed its audit.
    pub fn verified(&self) -> bool {
        self.report.kp_verified()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> EdgeConfig {
        let model = if rng.random::<f64>() < self.p_dis { Model::Dis } else { Model::Ord };
        self.sample_phase(model, rng)
    }

    /// Sample from one phase's polymer measure. Panics if that phase is
    /// inactive at this `β`.
    pub fn sample_phase<R: Rng + ?Sized>(&self, model: Model, rng: &mut R) -> EdgeConfig {
        if model == Model::Dis {
            let s = self.dis.as_ref().expect("disordered phase active");
            let chosen = sample_polymer_config(&s.arena, &s.log_w, s.steps, rng);
            let sets: Vec<&[usize]> = chosen.iter().map(|&i| s.polymers[i].edges.as_slice()).collect();
            polymer_to_edges(&self.g, Model::Dis, &sets)
        } else {
            let s = self.ord.as_ref().expect("ordered phase active");
            let chosen = sample_polymer_config(&s.arena, &s.log_w, s.steps, rng);
            let sets: Vec<&[usize]> = chosen.iter().map(|&i| s.polymers[i].unoccupied.as_slice()).collect();
            polymer_to_edges(&self.g, Model::Ord, &sets)
        }
    }

    pub fn sample_potts<R: Rng + ?Sized>(&self, q: u32, rng: &mut R) -> Vec<u32> {
        let a = self.sample(rng);
        edwards_sokal_color(&self.g, &a, q, rng)
    }
}

pub fn sample_rc<R: Rng + ?Sized>(g: &Graph, q: f64, beta: f64, epsilon: f64, rng: &mut R) -> Result<EdgeConfig> {
    Ok(RcSampler::new(g, q, beta, epsilon, &SamplerOptions::default())?.sample(rng))
}

pub fn sample_potts<R: Rng + ?Sized>(g: &Graph, q: u32, beta: f64, epsilon: f64, rng: &mut R) -> Result<Vec<u32>> {
    if q == 1 {
        return Ok(vec![0; g.n()]);
    }
    Ok(RcSampler::new(g, q as f64, beta, epsilon, &SamplerOptions::default())?.sample_potts(q, rng))
}
