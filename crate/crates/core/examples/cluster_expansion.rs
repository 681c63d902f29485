//! Truncated cluster expansion against the brute-force polymer partition
//! function and the exact random cluster partition function.

use rcx::cluster::{polymer_arena, truncated_log_xi, xi_brute, Model};
use rcx::exact::z_rc_exact;
use rcx::polymers::Scope;
use rcx::Graph;

fn main() -> rcx::Result<()> {
    let g = Graph::cycle(4);
    let (q, beta) = (1000.0, 1.0);
    let arena = polymer_arena(&g, Model::Dis, g.num_edges() + 1, Scope::All)?;
    let brute = xi_brute(&arena, &arena.log_weights(q, beta))?;
    let exact = z_rc_exact(&g, q, beta, 0.01)?.log_z - g.n() as f64 * q.ln();
    println!("ln Xi: brute force {brute:.15}, exact {exact:.15}");
    for m in 2..=8 {
        let t = truncated_log_xi(&g, q, beta, m, Model::Dis)?;
        println!("m={m}: T_m={:.15} error={:.2e} ({} clusters)", t.value, (t.value - brute).abs(), t.clusters);
    }
    Ok(())
}
