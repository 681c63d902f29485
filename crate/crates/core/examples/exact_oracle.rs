//! Exact random cluster and Potts partition functions on a small graph, with
//! the split into disordered, ordered and intermediate edge counts.

use rcx::exact::{z_potts_exact, z_rc_exact};
use rcx::graph::random_regular;

fn main() -> rcx::Result<()> {
    let g = random_regular(8, 3, 1)?;
    println!("random 3-regular graph, n={} |E|={}", g.n(), g.num_edges());
    for beta in [0.5, 1.0, 2.0] {
        let rc = z_rc_exact(&g, 3.0, beta, 0.01)?;
        let potts = z_potts_exact(&g, 3, beta)?;
        println!(
            "beta={beta}: log Z_rc={:.10} log Z_potts={:.10}  dis={:.4} ord={:.4} err={:.4}",
            rc.log_z, potts, rc.log_z_dis, rc.log_z_ord, rc.log_z_err
        );
    }
    Ok(())
}
