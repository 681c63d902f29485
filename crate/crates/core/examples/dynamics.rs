//! Chayes-Machta and Glauber chains: exact convergence on a tiny graph and
//! an escape experiment from the ordered state on a larger one.

use rcx::dynamics::{escape_experiment, tv_curve, Kernel, Start};
use rcx::graph::random_regular;
use rcx::phase::beta_c_solve;
use rcx::Graph;

fn main() -> rcx::Result<()> {
    let tri = Graph::cycle(3);
    for kernel in [Kernel::Cm, Kernel::RcGlauber] {
        let tv = tv_curve(&tri, 3.0, 1.0, kernel, Start::Empty, 20)?;
        println!("{kernel}: TV after 1, 5, 20 steps = {:.3e} {:.3e} {:.3e}", tv[1], tv[5], tv[20]);
    }

    let q = 1e4;
    let beta = beta_c_solve(q, 5, 4, 1e-10)?.beta_c;
    let g = random_regular(50, 5, 1)?;
    let r = escape_experiment(&g, q, beta, Kernel::Cm, Start::Full, 4, 2000, 0.01, 0)?;
    println!(
        "CM from A=E at beta_c={beta:.4}: {} ord->dis steps, occupancy dis {:.3} ord {:.3} err {:.3}",
        r.escape_count, r.occupancy.dis, r.occupancy.ord, r.occupancy.err
    );
    Ok(())
}
