//! Expansion profile `φ_G(α) = min |E(S,Sᶜ)| / (Δ|S|)` over `0 < |S| ≤ αn`,
//! and a certifying membership check for the expander class used by the
//! polymer estimates.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use super::{components, EdgeConfig, Graph};
use crate::error::{Error, Result};
use crate::esu::{self, Adjacency};

pub const DEFAULT_EXACT_CAP: usize = 24;
pub const DEFAULT_SMALL_SET_CAP: usize = 8;
/// Largest graph handed to the dense eigensolver.
const SPECTRAL_CAP: usize = 4000;
const RATIO_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionProfile {
    pub ratio: f64,
    pub boundary: usize,
    pub size: usize,
    pub witness: Vec<usize>,
}

fn max_set_size(alpha: f64, n: usize) -> usize {
    (alpha * n as f64 + 1e-9).floor().max(0.0) as usize
}

fn better(b: usize, s: usize, best: &Option<(usize, usize)>) -> bool {
    match *best {
        None => true,
        Some((bb, bs)) => b * bs < bb * s,
    }
}

/// Exact profile by enumerating every vertex subset with `|S| ≤ αn`.
/// Only for `n ≤ 24`.
pub fn expansion_profile_exact(g: &Graph, alpha: f64) -> Result<ExpansionProfile> {
    profile_exact_capped(g, alpha, DEFAULT_EXACT_CAP)
}

pub(crate) fn profile_exact_capped(g: &Graph, alpha: f64, cap: usize) -> Result<ExpansionProfile> {
    let n = g.n();
    if n > cap.min(30) {
        return Err(Error::Cap {
            what: "exact expansion profile",
            got: n,
            cap,
        });
    }
    let k = max_set_size(alpha, n).min(n);
    if k == 0 {
        return Err(Error::invalid(format!("no admissible set: floor({alpha}·{n}) = 0")));
    }
    let adj: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &(u, _)| m | 1 << u))
        .collect();
    let mut best: Option<(usize, usize)> = None;
    let mut best_mask = 0u32;
    for mask in 1u32..(1u32 << n) {
        let s = mask.count_ones() as usize;
        if s > k {
            continue;
        }
        let mut b = 0usize;
        let mut m = mask;
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            b += (adj[v] & !mask).count_ones() as usize;
        }
        if better(b, s, &best) {
            best = Some((b, s));
            best_mask = mask;
        }
    }
    let (b, s) = best.expect("at least one admissible set");
    Ok(ExpansionProfile {
        ratio: b as f64 / (g.delta() * s) as f64,
        boundary: b,
        size: s,
        witness: (0..n).filter(|&v| best_mask >> v & 1 == 1).collect(),
    })
}

struct VertexAdjacency<'a>(&'a Graph);

impl Adjacency for VertexAdjacency<'_> {
    fn size(&self) -> usize {
        self.0.n()
    }
    fn for_each_neighbor(&self, v: usize, f: &mut dyn FnMut(usize)) {
        self.0.neighbors(v).iter().for_each(|&(u, _)| f(u));
    }
}

/// Minimum ratio over connected vertex sets of size at most `k`. Since the
/// boundary of a disconnected set is the sum of its parts' boundaries, this
/// equals the minimum over all sets of size at most `k`.
pub(crate) fn min_connected_ratio(g: &Graph, k: usize) -> Option<ExpansionProfile> {
    if k == 0 || g.n() == 0 {
        return None;
    }
    let mut in_set = vec![false; g.n()];
    let mut best: Option<(usize, usize)> = None;
    let mut witness = Vec::new();
    esu::connected_sets(&VertexAdjacency(g), 0..g.n(), |_| k, |_| 1, |set, s| {
        for &v in set {
            in_set[v] = true;
        }
        let b: usize = set
            .iter()
            .map(|&v| g.neighbors(v).iter().filter(|&&(u, _)| !in_set[u]).count())
            .sum();
        for &v in set {
            in_set[v] = false;
        }
        if better(b, s, &best) {
            best = Some((b, s));
            witness = set.to_vec();
        }
        true
    });
    let (b, s) = best?;
    witness.sort_unstable();
    Some(ExpansionProfile {
        ratio: b as f64 / (g.delta() * s) as f64,
        boundary: b,
        size: s,
        witness,
    })
}

/// Second largest adjacency eigenvalue (dense symmetric solver).
pub fn spectral_lambda2(g: &Graph) -> Option<f64> {
    let n = g.n();
    if !(2..=SPECTRAL_CAP).contains(&n) {
        return None;
    }
    let mut a = DMatrix::<f64>::zeros(n, n);
    for &(u, v) in g.edges() {
        a[(u, v)] = 1.0;
        a[(v, u)] = 1.0;
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(a).eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    Some(ev[1])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassCheckOptions {
    /// Small-set fraction δ.
    pub delta_small: f64,
    pub t_half: f64,
    pub t_small: f64,
    pub exact_cap: usize,
    pub small_set_cap: usize,
}

impl Default for ClassCheckOptions {
    fn default() -> Self {
        Self {
            delta_small: 0.1,
            t_half: 0.1,
            t_small: 5.0 / 9.0,
            exact_cap: DEFAULT_EXACT_CAP,
            small_set_cap: DEFAULT_SMALL_SET_CAP,
        }
    }
}

impl ClassCheckOptions {
    pub fn with_delta(delta_small: f64) -> Self {
        Self {
            delta_small,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassEvidence {
    pub verdict: Verdict,
    pub method: &'static str,
    /// Exact φ(1/2) when computed.
    pub phi_half: Option<f64>,
    /// Certified lower bound on φ(1/2) from the spectral Cheeger inequality.
    pub phi_half_lower: Option<f64>,
    /// Minimum ratio over the small sets that were examined.
    pub phi_small: Option<f64>,
    /// Small sets were examined up to this size.
    pub small_checked_to: usize,
    /// Size bound ⌊δn⌋ required by the class definition.
    pub small_required_to: usize,
    pub lambda2: Option<f64>,
    pub witness: Option<Vec<usize>>,
    pub notes: Vec<String>,
}

/// Decides membership in the class of Δ-regular graphs with `φ(1/2) ≥ t_half`
/// and `φ(δ) ≥ t_small`. `Pass` is only returned with a certificate: the
/// exact profile for small graphs, otherwise an exhaustive small-set scan
/// together with the spectral bound `φ(1/2) ≥ (Δ − λ₂)/(2Δ)`.
pub fn class_check(g: &Graph, opts: &ClassCheckOptions) -> ClassEvidence {
    let n = g.n();
    let small_required_to = max_set_size(opts.delta_small, n);
    let mut ev = ClassEvidence {
        verdict: Verdict::Unknown,
        method: "exact",
        phi_half: None,
        phi_half_lower: None,
        phi_small: None,
        small_checked_to: 0,
        small_required_to,
        lambda2: None,
        witness: None,
        notes: Vec::new(),
    };
    if !g.is_regular() {
        ev.verdict = Verdict::Fail;
        ev.notes.push("graph is not regular".into());
        return ev;
    }
    if n < 2 {
        ev.verdict = Verdict::Fail;
        ev.notes.push("graph has fewer than two vertices".into());
        return ev;
    }

    if n <= opts.exact_cap.min(DEFAULT_EXACT_CAP) {
        let half = profile_exact_capped(g, 0.5, opts.exact_cap).expect("n within exact cap");
        ev.phi_half = Some(half.ratio);
        let mut ok = half.ratio + RATIO_EPS >= opts.t_half;
        if !ok {
            ev.witness = Some(half.witness.clone());
        }
        if small_required_to > 0 {
            let small = profile_exact_capped(g, opts.delta_small, opts.exact_cap).expect("n within exact cap");
            ev.phi_small = Some(small.ratio);
            ev.small_checked_to = small_required_to;
            if small.ratio + RATIO_EPS < opts.t_small {
                ok = false;
                ev.witness.get_or_insert(small.witness);
            }
        } else {
            ev.notes.push("no set satisfies |S| ≤ δn; small-set condition is vacuous".into());
        }
        ev.verdict = if ok { Verdict::Pass } else { Verdict::Fail };
        return ev;
    }

    ev.method = "small-set scan + spectral";
    let comps = components(g, &EdgeConfig::full(g.num_edges()));
    if comps.count > 1 {
        let mut sizes = vec![0usize; comps.count];
        comps.labels.iter().for_each(|&c| sizes[c] += 1);
        let smallest = (0..comps.count).min_by_key(|&c| sizes[c]).unwrap();
        ev.phi_half = Some(0.0);
        ev.witness = Some((0..n).filter(|&v| comps.labels[v] == smallest).collect());
        ev.verdict = Verdict::Fail;
        ev.notes.push(format!("graph has {} components", comps.count));
        return ev;
    }

    let scan_to = small_required_to.min(opts.small_set_cap).max(1.min(small_required_to));
    let mut failed = false;
    if scan_to > 0 {
        if let Some(p) = min_connected_ratio(g, scan_to) {
            ev.phi_small = Some(p.ratio);
            ev.small_checked_to = scan_to;
            if p.ratio + RATIO_EPS < opts.t_small {
                failed = true;
                ev.witness = Some(p.witness.clone());
            }
            if p.size <= n / 2 && p.ratio + RATIO_EPS < opts.t_half {
                failed = true;
                ev.phi_half = Some(p.ratio);
                ev.witness = Some(p.witness);
            }
        }
    }
    let small_certified = small_required_to <= opts.small_set_cap;
    if !small_certified {
        ev.notes.push(format!(
            "small sets only scanned to size {scan_to}; class requires {small_required_to}"
        ));
    }

    match spectral_lambda2(g) {
        Some(l2) => {
            ev.lambda2 = Some(l2);
            let delta = g.delta() as f64;
            // absorb eigensolver rounding on the safe side
            ev.phi_half_lower = Some((delta - l2 - 1e-9) / (2.0 * delta));
        }
        None => ev.notes.push("graph too large for the spectral bound".into()),
    }
    let half_certified = ev.phi_half_lower.is_some_and(|l| l >= opts.t_half);

    ev.verdict = if failed {
        Verdict::Fail
    } else if small_certified && half_certified {
        Verdict::Pass
    } else {
        Verdict::Unknown
    };
    ev
}
