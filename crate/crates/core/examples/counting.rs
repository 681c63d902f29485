//! Approximate log Z from both expansions across the transition, compared
//! with exact enumeration.

use rcx::engine::{beta1, CountOptions, Counter};
use rcx::exact::rc_census;
use rcx::Graph;

fn main() -> rcx::Result<()> {
    let g = Graph::complete(6);
    let q = 1e4;
    let counter = Counter::new(&g, 6, &CountOptions { m: Some(6), ..CountOptions::default() })?;
    let census = rc_census(&g)?;
    println!("{:>7} {:>9} {:>12} {:>12} {:>10} kp", "beta", "regime", "log Z~", "exact", "err/n");
    for i in 0..=10 {
        let beta = 2.0 * beta1(q, g.delta()) * i as f64 / 10.0;
        let r = counter.report(q, beta, 0.1)?;
        let exact = census.evaluate(q, beta, 0.01)?.log_z;
        println!(
            "{beta:7.3} {:>9?} {:12.6} {exact:12.6} {:10.2e} {}",
            r.regime,
            r.log_ztilde,
            (r.log_ztilde - exact).abs() / g.n() as f64,
            if r.kp_verified() { "ok" } else { "unverified" }
        );
    }
    Ok(())
}
