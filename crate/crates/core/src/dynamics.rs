//! Markov chains on random cluster and Potts configurations, with exact
//! kernels for tiny graphs and slow-mixing experiments for larger ones.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cluster::Model;
use crate::engine::{RcSampler, SamplerOptions};
use crate::error::{Error, Result};
use crate::exact::{self, classify, rc_distribution, Phase};
use crate::graph::{components, EdgeConfig, Graph};

/// One Chayes–Machta step: activate each component with probability `1/q`,
/// delete the edges inside the active set, and re-add each of them
/// independently with probability `1 − e^{−β}`.
pub fn cm_step<R: Rng + ?Sized>(g: &Graph, a: &EdgeConfig, q: f64, beta: f64, rng: &mut R) -> EdgeConfig {
    let comps = components(g, a);
    let active_comp: Vec<bool> = (0..comps.count).map(|_| rng.random::<f64>() * q < 1.0).collect();
    let p = -(-beta).exp_m1();
    let mut out = a.clone();
    for (id, &(u, v)) in g.edges().iter().enumerate() {
        if active_comp[comps.labels[u]] && active_comp[comps.labels[v]] {
            out.set(id, rng.random::<f64>() < p);
        }
    }
    out
}

/// Whether `u` and `v` are joined in `a ∖ {skip}`.
fn connected_without(g: &Graph, a: &EdgeConfig, u: usize, v: usize, skip: usize) -> bool {
    if u == v {
        return true;
    }
    let mut seen = vec![false; g.n()];
    seen[u] = true;
    let mut queue = VecDeque::from([u]);
    while let Some(w) = queue.pop_front() {
        for &(z, id) in g.neighbors(w) {
            if id == skip || !a.contains(id) || seen[z] {
                continue;
            }
            if z == v {
                return true;
            }
            seen[z] = true;
            queue.push_back(z);
        }
    }
    false
}

/// Probability of keeping edge `id` in a heat-bath update from `a`.
pub fn rc_glauber_add_prob(g: &Graph, a: &EdgeConfig, id: usize, q: f64, beta: f64) -> f64 {
    let x = beta.exp_m1();
    let (u, v) = g.edge(id);
    let joins = if connected_without(g, a, u, v, id) { 1.0 } else { q };
    x / (x + joins)
}

/// Heat-bath update of a uniformly chosen edge.
pub fn rc_glauber_step<R: Rng + ?Sized>(g: &Graph, a: &EdgeConfig, q: f64, beta: f64, rng: &mut R) -> EdgeConfig {
    let mut out = a.clone();
    if g.num_edges() == 0 {
        return out;
    }
    let id = rng.random_range(0..g.num_edges());
    let p = rc_glauber_add_prob(g, a, id, q, beta);
    out.set(id, rng.random::<f64>() < p);
    out
}

/// Heat-bath update of a uniformly chosen vertex colour.
pub fn potts_glauber_step<R: Rng + ?Sized>(g: &Graph, sigma: &[u32], q: u32, beta: f64, rng: &mut R) -> Vec<u32> {
    let mut out = sigma.to_vec();
    if g.n() == 0 {
        return out;
    }
    let v = rng.random_range(0..g.n());
    let mut agree: BTreeMap<u32, u32> = BTreeMap::new();
    for &(u, _) in g.neighbors(v) {
        *agree.entry(sigma[u]).or_default() += 1;
    }
    // colours with no agreeing neighbour share weight 1
    let boosted: Vec<(u32, f64)> = agree.iter().map(|(&c, &k)| (c, (beta * k as f64).exp())).collect();
    let total = (q as f64 - boosted.len() as f64) + boosted.iter().map(|b| b.1).sum::<f64>();
    let mut u = rng.random::<f64>() * total;
    for &(c, w) in &boosted {
        if u < w {
            out[v] = c;
            return out;
        }
        u -= w;
    }
    // uniform among the remaining colours
    let free = q - boosted.len() as u32;
    let mut k = ((u.max(0.0) as u32).min(free.saturating_sub(1))) as i64;
    for c in 0..q {
        if agree.contains_key(&c) {
            continue;
        }
        if k == 0 {
            out[v] = c;
            break;
        }
        k -= 1;
    }
    out
}

pub fn classify_phase(a: &EdgeConfig, eta: f64) -> Phase {
    classify(a.count(), a.len(), eta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kernel {
    Cm,
    RcGlauber,
    PottsGlauber,
}

impl FromStr for Kernel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cm" => Ok(Kernel::Cm),
            "rc-glauber" => Ok(Kernel::RcGlauber),
            "potts-glauber" => Ok(Kernel::PottsGlauber),
            _ => Err(Error::invalid(format!("unknown kernel '{s}' (cm, rc-glauber, potts-glauber)"))),
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kernel::Cm => "cm",
            Kernel::RcGlauber => "rc-glauber",
            Kernel::PottsGlauber => "potts-glauber",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Start {
    Empty,
    Full,
}

impl FromStr for Start {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "empty" => Ok(Start::Empty),
            "full" => Ok(Start::Full),
            _ => Err(Error::invalid(format!("unknown start '{s}' (empty, full)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum State {
    Edges(EdgeConfig),
    Colors(Vec<u32>),
}

/// A running chain. Potts states are read through their monochromatic edge
/// set, so phases are defined for every kernel.
#[derive(Debug, Clone)]
pub struct Chain<'g> {
    g: &'g Graph,
    kernel: Kernel,
    q: f64,
    beta: f64,
    pub state: State,
    pub steps: u64,
}

impl<'g> Chain<'g> {
    /// `Full` for Potts is the all-zero colouring; `Empty` draws i.i.d.
    /// uniform colours.
    pub fn new<R: Rng + ?Sized>(g: &'g Graph, kernel: Kernel, q: f64, beta: f64, start: Start, rng: &mut R) -> Result<Self> {
        if !(q >= 1.0) || !(beta >= 0.0) {
            return Err(Error::invalid(format!("need q ≥ 1 and β ≥ 0, got q={q}, β={beta}")));
        }
        let m = g.num_edges();
        let state = match kernel {
            Kernel::PottsGlauber => {
                if q.fract() != 0.0 || q > u32::MAX as f64 {
                    return Err(Error::invalid("Potts dynamics needs an integer q"));
                }
                let qi = q as u32;
                State::Colors(match start {
                    Start::Full => vec![0; g.n()],
                    Start::Empty => (0..g.n()).map(|_| rng.random_range(0..qi)).collect(),
                })
            }
            _ => State::Edges(match start {
                Start::Full => EdgeConfig::full(m),
                Start::Empty => EdgeConfig::empty(m),
            }),
        };
        Ok(Self {
            g,
            kernel,
            q,
            beta,
            state,
            steps: 0,
        })
    }

    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let (g, q, beta) = (self.g, self.q, self.beta);
        self.state = match (&self.state, self.kernel) {
            (State::Edges(a), Kernel::Cm) => State::Edges(cm_step(g, a, q, beta, rng)),
            (State::Edges(a), Kernel::RcGlauber) => State::Edges(rc_glauber_step(g, a, q, beta, rng)),
            (State::Colors(s), Kernel::PottsGlauber) => State::Colors(potts_glauber_step(g, s, q as u32, beta, rng)),
            _ => unreachable!("state matches kernel"),
        };
        self.steps += 1;
    }

    pub fn edges(&self) -> EdgeConfig {
        match &self.state {
            State::Edges(a) => a.clone(),
            State::Colors(s) => monochromatic(self.g, s),
        }
    }

    pub fn edge_count(&self) -> usize {
        match &self.state {
            State::Edges(a) => a.count(),
            State::Colors(s) => self.g.edges().iter().filter(|&&(u, v)| s[u] == s[v]).count(),
        }
    }

    pub fn phase(&self, eta: f64) -> Phase {
        classify(self.edge_count(), self.g.num_edges(), eta)
    }
}

pub fn monochromatic(g: &Graph, sigma: &[u32]) -> EdgeConfig {
    EdgeConfig::from_edges(
        g.num_edges(),
        g.edges().iter().enumerate().filter(|(_, &(u, v))| sigma[u] == sigma[v]).map(|(id, _)| id),
    )
}

/// RNG for trial `index` of a run seeded by `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseOccupancy {
    pub dis: f64,
    pub ord: f64,
    pub err: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EscapeReport {
    pub kernel: Kernel,
    pub start: Start,
    pub trials: u64,
    pub max_steps: u64,
    pub eta: f64,
    /// Single steps that went from the ordered phase straight to the
    /// disordered one.
    pub escape_count: u64,
    /// `(step, trials)` pairs: the step at which a trial first left its
    /// starting phase.
    pub first_escape_histogram: Vec<(u64, u64)>,
    pub occupancy: PhaseOccupancy,
    /// Changes of the last visited non-error phase, summed over trials.
    pub flips: u64,
    pub flip_rate: f64,
}

#[derive(Default)]
struct TrialStats {
    escapes: u64,
    first_escape: Option<u64>,
    counts: [u64; 3],
    flips: u64,
}

#[allow(clippy::too_many_arguments)]
pub fn escape_experiment(
    g: &Graph,
    q: f64,
    beta: f64,
    kernel: Kernel,
    start: Start,
    trials: u64,
    max_steps: u64,
    eta: f64,
    seed: u64,
) -> Result<EscapeReport> {
    let stats: Vec<TrialStats> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<TrialStats> {
            let mut rng = trial_rng(seed, t);
            let mut chain = Chain::new(g, kernel, q, beta, start, &mut rng)?;
            let mut st = TrialStats::default();
            let initial = chain.phase(eta);
            let mut prev = initial;
            let mut last_pure = (initial != Phase::Err).then_some(initial);
            for step in 1..=max_steps {
                chain.step(&mut rng);
                let ph = chain.phase(eta);
                st.counts[phase_index(ph)] += 1;
                if prev == Phase::Ord && ph == Phase::Dis {
                    st.escapes += 1;
                }
                if st.first_escape.is_none() && ph != initial {
                    st.first_escape = Some(step);
                }
                if ph != Phase::Err {
                    if last_pure.is_some_and(|l| l != ph) {
                        st.flips += 1;
                    }
                    last_pure = Some(ph);
                }
                prev = ph;
            }
            Ok(st)
        })
        .collect::<Result<_>>()?;
    let mut hist: BTreeMap<u64, u64> = BTreeMap::new();
    let mut counts = [0u64; 3];
    let (mut escapes, mut flips) = (0, 0);
    for st in &stats {
        escapes += st.escapes;
        flips += st.flips;
        if let Some(s) = st.first_escape {
            *hist.entry(s).or_default() += 1;
        }
        (0..3).for_each(|i| counts[i] += st.counts[i]);
    }
    let total = (trials * max_steps).max(1) as f64;
    Ok(EscapeReport {
        kernel,
        start,
        trials,
        max_steps,
        eta,
        escape_count: escapes,
        first_escape_histogram: hist.into_iter().collect(),
        occupancy: PhaseOccupancy {
            dis: counts[0] as f64 / total,
            ord: counts[1] as f64 / total,
            err: counts[2] as f64 / total,
        },
        flips,
        flip_rate: flips as f64 / total,
    })
}

fn phase_index(p: Phase) -> usize {
    match p {
        Phase::Dis => 0,
        Phase::Ord => 1,
        Phase::Err => 2,
    }
}

/// Largest edge count for the dense exact kernels.
pub const KERNEL_EDGE_CAP: usize = 10;

/// Transition matrix of a random cluster kernel over edge masks.
pub fn exact_kernel(g: &Graph, q: f64, beta: f64, kernel: Kernel) -> Result<Vec<Vec<f64>>> {
    let m = g.num_edges();
    if m > KERNEL_EDGE_CAP {
        return Err(Error::Cap {
            what: "exact kernel (edges)",
            got: m,
            cap: KERNEL_EDGE_CAP,
        });
    }
    let size = 1usize << m;
    let mut p = vec![vec![0.0; size]; size];
    match kernel {
        Kernel::Cm => {
            let pe = -(-beta).exp_m1();
            for (s, row) in p.iter_mut().enumerate() {
                let a = EdgeConfig::from_mask(m, s as u64);
                let comps = components(g, &a);
                for act in 0u64..1 << comps.count {
                    let k = act.count_ones() as i32;
                    let pa = (1.0 / q).powi(k) * (1.0 - 1.0 / q).powi(comps.count as i32 - k);
                    if pa == 0.0 {
                        continue;
                    }
                    let inside: Vec<usize> = (0..m)
                        .filter(|&id| {
                            let (u, v) = g.edge(id);
                            act >> comps.labels[u] & 1 == 1 && act >> comps.labels[v] & 1 == 1
                        })
                        .collect();
                    let base = inside.iter().fold(s, |b, &id| b & !(1 << id));
                    for sub in 0u64..1 << inside.len() {
                        let j = sub.count_ones() as i32;
                        let pr = pa * pe.powi(j) * (1.0 - pe).powi(inside.len() as i32 - j);
                        let t = inside
                            .iter()
                            .enumerate()
                            .filter(|&(i, _)| sub >> i & 1 == 1)
                            .fold(base, |b, (_, &id)| b | 1 << id);
                        row[t] += pr;
                    }
                }
            }
        }
        Kernel::RcGlauber => {
            for (s, row) in p.iter_mut().enumerate() {
                let a = EdgeConfig::from_mask(m, s as u64);
                for id in 0..m {
                    let add = rc_glauber_add_prob(g, &a, id, q, beta);
                    row[s | 1 << id] += add / m as f64;
                    row[s & !(1 << id)] += (1.0 - add) / m as f64;
                }
                if m == 0 {
                    row[s] = 1.0;
                }
            }
        }
        Kernel::PottsGlauber => return Err(Error::invalid("exact kernels are defined on edge configurations")),
    }
    Ok(p)
}

/// `μP` for a row vector `μ`.
pub fn apply_kernel(mu: &[f64], p: &[Vec<f64>]) -> Vec<f64> {
    let mut out = vec![0.0; mu.len()];
    for (i, row) in p.iter().enumerate() {
        if mu[i] == 0.0 {
            continue;
        }
        for (j, &pij) in row.iter().enumerate() {
            out[j] += mu[i] * pij;
        }
    }
    out
}

pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// TV distance to the random cluster measure after `0..=steps` steps from a
/// deterministic start.
pub fn tv_curve(g: &Graph, q: f64, beta: f64, kernel: Kernel, start: Start, steps: usize) -> Result<Vec<f64>> {
    let p = exact_kernel(g, q, beta, kernel)?;
    let pi = rc_distribution(g, q, beta)?;
    let mut mu = vec![0.0; pi.len()];
    mu[match start {
        Start::Empty => 0,
        Start::Full => pi.len() - 1,
    }] = 1.0;
    let mut out = vec![total_variation(&mu, &pi)];
    for _ in 0..steps {
        mu = apply_kernel(&mu, &p);
        out.push(total_variation(&mu, &pi));
    }
    Ok(out)
}

/// `Φ(Ω_dis) = Σ_{A∈Ω_dis} μ(A)P(A,Ω_disᶜ) / (μ(Ω_dis)μ(Ω_disᶜ))` for the
/// Chayes–Machta kernel, by full enumeration.
pub fn conductance_exact(g: &Graph, q: f64, beta: f64, eta: f64) -> Result<f64> {
    let m = g.num_edges();
    let p = exact_kernel(g, q, beta, Kernel::Cm)?;
    let mu = rc_distribution(g, q, beta)?;
    let in_s = |s: usize| classify(s.count_ones() as usize, m, eta) == Phase::Dis;
    let mut num = 0.0;
    let mut mass = 0.0;
    for (s, row) in p.iter().enumerate() {
        if !in_s(s) {
            continue;
        }
        mass += mu[s];
        num += mu[s] * row.iter().enumerate().filter(|&(t, _)| !in_s(t)).map(|(_, &v)| v).sum::<f64>();
    }
    let denom = mass * (1.0 - mass);
    if denom <= 0.0 {
        return Err(Error::invalid("conductance undefined: one side has zero mass"));
    }
    Ok(num / denom)
}

#[derive(Debug, Clone, Serialize)]
pub struct ConductanceEstimate {
    pub method: &'static str,
    pub trials: u64,
    /// Fraction of one-step CM moves from `μ(·|Ω_dis)` that left `Ω_dis`.
    pub escape_prob: f64,
    pub escape_std_err: f64,
    pub mu_dis: f64,
    /// `Φ = escape_prob / μ(Ω_disᶜ)`, absent when the complement has no mass.
    pub estimate: Option<f64>,
    pub ci95: Option<(f64, f64)>,
    /// Set when the denominator vanished; only `escape_prob` is meaningful.
    pub one_sided: bool,
}

/// Monte-Carlo estimate of `Φ_CM(Ω_dis)`: draws from `μ(·|Ω_dis)` (exact
/// table when small enough, otherwise the polymer sampler's disordered
/// phase), takes one CM step each, and divides by `μ(Ω_disᶜ)`.
pub fn conductance_estimate<R: Rng>(
    g: &Graph,
    q: f64,
    beta: f64,
    eta: f64,
    epsilon: f64,
    trials: u64,
    rng: &mut R,
) -> Result<ConductanceEstimate> {
    let m = g.num_edges();
    let (method, mu_dis, draw): (&'static str, f64, Box<dyn Fn(&mut dyn rand::RngCore) -> EdgeConfig>) =
        if m <= exact::RC_TABLE_CAP {
            let pi = rc_distribution(g, q, beta)?;
            let dis: Vec<(usize, f64)> = pi
                .iter()
                .enumerate()
                .filter(|&(s, _)| classify(s.count_ones() as usize, m, eta) == Phase::Dis)
                .map(|(s, &p)| (s, p))
                .collect();
            let mass: f64 = dis.iter().map(|d| d.1).sum();
            let dist = rand_distr::weighted::WeightedIndex::new(dis.iter().map(|d| d.1))
                .map_err(|e| Error::invalid(format!("disordered phase has no mass: {e}")))?;
            let draw = move |r: &mut dyn rand::RngCore| {
                use rand_distr::Distribution;
                EdgeConfig::from_mask(m, dis[dist.sample(r)].0 as u64)
            };
            ("exact-table", mass, Box::new(draw))
        } else {
            let sampler = RcSampler::new(g, q, beta, epsilon, &SamplerOptions::default())?;
            let rep = &sampler.report;
            let mass = match (rep.log_zdis_hat, rep.log_zord_hat) {
                (Some(d), Some(o)) => 1.0 / (1.0 + (o - d).exp()),
                (Some(_), None) => 1.0,
                _ => return Err(Error::invalid("disordered phase inactive at this β")),
            };
            let draw = move |r: &mut dyn rand::RngCore| sampler.sample_phase(Model::Dis, r);
            ("polymer-sampler", mass, Box::new(draw))
        };
    let mut left = 0u64;
    for _ in 0..trials {
        let a = draw(rng);
        if classify_phase(&cm_step(g, &a, q, beta, rng), eta) != Phase::Dis {
            left += 1;
        }
    }
    let t = trials.max(1) as f64;
    let esc = left as f64 / t;
    let se = (esc * (1.0 - esc) / t).sqrt();
    let rest = 1.0 - mu_dis;
    let one_sided = !(rest > 0.0);
    let (estimate, ci95) = if one_sided {
        (None, None)
    } else {
        (Some(esc / rest), Some(((esc - 1.96 * se).max(0.0) / rest, (esc + 1.96 * se) / rest)))
    };
    Ok(ConductanceEstimate {
        method,
        trials,
        escape_prob: esc,
        escape_std_err: se,
        mu_dis,
        estimate,
        ci95,
        one_sided,
    })
}
