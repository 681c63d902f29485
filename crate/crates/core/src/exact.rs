//! Brute-force oracles: random cluster and Potts partition functions by full
//! enumeration, the exact configuration law, and the Edwards–Sokal colouring.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{component_count_mask, components, EdgeConfig, Graph};
use crate::logspace::{logsumexp, LogAccumulator};

pub const RC_EXACT_CAP: usize = 30;
pub const RC_TABLE_CAP: usize = 22;
pub const POTTS_STATES_CAP: f64 = 1e8;

/// Phase of an edge configuration relative to the split at `η|E|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Phase {
    Dis,
    Ord,
    Err,
}

/// `Dis` if `|A| ≤ η|E|`, `Ord` if `|A| ≥ (1−η)|E|`, `Err` otherwise.
pub fn classify(size: usize, num_edges: usize, eta: f64) -> Phase {
    let m = num_edges as f64;
    let s = size as f64;
    if s <= eta * m {
        Phase::Dis
    } else if s >= (1.0 - eta) * m {
        Phase::Ord
    } else {
        Phase::Err
    }
}

/// `η = min(1/100, δ/5)`.
pub fn default_eta(delta_small: f64) -> f64 {
    (0.01f64).min(delta_small / 5.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExactResult {
    pub log_z: f64,
    pub log_z_dis: f64,
    pub log_z_ord: f64,
    pub log_z_err: f64,
    pub eta: f64,
}

/// Number of edge subsets with each (size, component count): `counts[k][c]`.
/// Independent of `q` and `β`, so one census serves a whole parameter sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct RcCensus {
    pub n: usize,
    pub num_edges: usize,
    pub counts: Vec<Vec<u64>>,
}

pub fn rc_census(g: &Graph) -> Result<RcCensus> {
    let m = g.num_edges();
    if m > RC_EXACT_CAP {
        return Err(Error::Cap {
            what: "exact random cluster enumeration (edges)",
            got: m,
            cap: RC_EXACT_CAP,
        });
    }
    let n = g.n();
    let total = 1u64 << m;
    let chunks = 256u64.min(total);
    let per = total.div_ceil(chunks);
    let zero = || vec![vec![0u64; n + 1]; m + 1];
    let counts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut local = zero();
            for mask in c * per..((c + 1) * per).min(total) {
                local[mask.count_ones() as usize][component_count_mask(g, mask)] += 1;
            }
            local
        })
        .reduce(zero, |mut a, b| {
            for (ra, rb) in a.iter_mut().zip(b) {
                for (x, y) in ra.iter_mut().zip(rb) {
                    *x += y;
                }
            }
            a
        });
    Ok(RcCensus {
        n,
        num_edges: m,
        counts,
    })
}

/// `ln(e^β − 1)`, `-inf` at `β = 0`.
pub fn log_x(beta: f64) -> f64 {
    if beta == 0.0 {
        f64::NEG_INFINITY
    } else {
        beta.exp_m1().ln()
    }
}

fn check_params(q: f64, beta: f64) -> Result<()> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::invalid(format!("q must be positive and finite, got {q}")));
    }
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::invalid(format!("beta must be nonnegative and finite, got {beta}")));
    }
    Ok(())
}

impl RcCensus {
    pub fn evaluate(&self, q: f64, beta: f64, eta: f64) -> Result<ExactResult> {
        check_params(q, beta)?;
        let (lq, lx) = (q.ln(), log_x(beta));
        let mut acc = [LogAccumulator::new(); 3];
        for (k, row) in self.counts.iter().enumerate() {
            let edge_term = if k == 0 { 0.0 } else { k as f64 * lx };
            let slot = match classify(k, self.num_edges, eta) {
                Phase::Dis => 0,
                Phase::Ord => 1,
                Phase::Err => 2,
            };
            for (c, &cnt) in row.iter().enumerate() {
                if cnt > 0 {
                    acc[slot].add((cnt as f64).ln() + c as f64 * lq + edge_term);
                }
            }
        }
        let [d, o, e] = acc.map(|a| a.value());
        Ok(ExactResult {
            log_z: logsumexp(&[d, o, e]),
            log_z_dis: d,
            log_z_ord: o,
            log_z_err: e,
            eta,
        })
    }
}

/// `Z = Σ_A q^{c(A)} (e^β−1)^{|A|}` by enumerating all `2^|E|` subsets,
/// split into the three phases.
pub fn z_rc_exact(g: &Graph, q: f64, beta: f64, eta: f64) -> Result<ExactResult> {
    check_params(q, beta)?;
    rc_census(g)?.evaluate(q, beta, eta)
}

/// Number of colourings with each count of monochromatic edges.
pub fn potts_census(g: &Graph, q: u32) -> Result<Vec<u64>> {
    if q == 0 {
        return Err(Error::invalid("q must be at least 1"));
    }
    let states = (q as f64).powi(g.n() as i32);
    if states > POTTS_STATES_CAP {
        return Err(Error::Cap {
            what: "exact Potts enumeration (vertices at this q)",
            got: g.n(),
            cap: (POTTS_STATES_CAP.ln() / (q as f64).ln()).floor() as usize,
        });
    }
    let n = g.n();
    let total = states as u64;
    let chunks = 256u64.min(total);
    let per = total.div_ceil(chunks);
    let m = g.num_edges();
    let counts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut local = vec![0u64; m + 1];
            let start = c * per;
            let end = ((c + 1) * per).min(total);
            if start >= end {
                return local;
            }
            let mut sigma = vec![0u32; n];
            let mut x = start;
            for s in sigma.iter_mut() {
                *s = (x % q as u64) as u32;
                x /= q as u64;
            }
            for _ in start..end {
                let mono = g.edges().iter().filter(|&&(u, v)| sigma[u] == sigma[v]).count();
                local[mono] += 1;
                for s in sigma.iter_mut() {
                    *s += 1;
                    if *s < q {
                        break;
                    }
                    *s = 0;
                }
            }
            local
        })
        .reduce(
            || vec![0u64; m + 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(counts)
}

/// `ln Σ_σ exp(β · #{monochromatic edges})`.
pub fn z_potts_exact(g: &Graph, q: u32, beta: f64) -> Result<f64> {
    check_params(q as f64, beta)?;
    let counts = potts_census(g, q)?;
    let terms: Vec<f64> = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(k, &c)| (c as f64).ln() + beta * k as f64)
        .collect();
    Ok(logsumexp(&terms))
}

/// Probability of every edge configuration, indexed by bitmask (edge `i` is bit `i`).
pub fn rc_distribution(g: &Graph, q: f64, beta: f64) -> Result<Vec<f64>> {
    check_params(q, beta)?;
    let m = g.num_edges();
    if m > RC_TABLE_CAP {
        return Err(Error::Cap {
            what: "exact random cluster table (edges)",
            got: m,
            cap: RC_TABLE_CAP,
        });
    }
    let (lq, lx) = (q.ln(), log_x(beta));
    let logs: Vec<f64> = (0..1u64 << m)
        .into_par_iter()
        .map(|mask| {
            let k = mask.count_ones();
            let edge_term = if k == 0 { 0.0 } else { k as f64 * lx };
            component_count_mask(g, mask) as f64 * lq + edge_term
        })
        .collect();
    let log_z = logsumexp(&logs);
    Ok(logs.into_iter().map(|l| (l - log_z).exp()).collect())
}

/// Gibbs probabilities of every colouring, indexed by `Σ σ(v) q^v`.
pub fn potts_distribution(g: &Graph, q: u32, beta: f64) -> Result<Vec<f64>> {
    let log_z = z_potts_exact(g, q, beta)?;
    let n = g.n();
    let total = (q as usize).pow(n as u32);
    let mut sigma = vec![0u32; n];
    let mut out = Vec::with_capacity(total);
    for _ in 0..total {
        let mono = g.edges().iter().filter(|&&(u, v)| sigma[u] == sigma[v]).count();
        out.push((beta * mono as f64 - log_z).exp());
        for s in sigma.iter_mut() {
            *s += 1;
            if *s < q {
                break;
            }
            *s = 0;
        }
    }
    Ok(out)
}

/// Index of a colouring in [`potts_distribution`].
pub fn coloring_index(sigma: &[u32], q: u32) -> usize {
    sigma.iter().rev().fold(0usize, |acc, &s| acc * q as usize + s as usize)
}

/// Gives each component of `(V, A)` one uniform colour in `0..q`.
pub fn edwards_sokal_color<R: Rng + ?Sized>(g: &Graph, a: &EdgeConfig, q: u32, rng: &mut R) -> Vec<u32> {
    assert!(q >= 1, "q must be at least 1");
    let comps = components(g, a);
    let colors: Vec<u32> = (0..comps.count).map(|_| rng.random_range(0..q)).collect();
    comps.labels.iter().map(|&c| colors[c]).collect()
}
