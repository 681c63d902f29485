//! Cycle-rooted tree coefficients and the fluctuating ratio between the two
//! phase weights on random regular graphs.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rcx::phase::{beta_c_solve, sample_w, ScalingCoefficients};

fn main() -> rcx::Result<()> {
    let (q, delta) = (1e10, 5);
    let beta = beta_c_solve(q, delta, 4, 1e-10)?.beta_c;
    let c = ScalingCoefficients::compute(q, beta, delta, 6, 5)?;
    for (k, (d, o)) in c.alpha_dis.iter().zip(&c.alpha_ord).enumerate() {
        println!("k={}: alpha_dis={d:.3e} alpha_ord={o:.3e}", k + 3);
    }
    let draws = sample_w(&c, q, delta, 10_000, &mut ChaCha8Rng::seed_from_u64(0))?;
    let mut r: Vec<f64> = draws.iter().map(|s| s.q_value / q).collect();
    r.sort_by(f64::total_cmp);
    println!("Q/q quantiles: 5% {:.8} 50% {:.8} 95% {:.8}", r[500], r[5000], r[9500]);
    Ok(())
}
