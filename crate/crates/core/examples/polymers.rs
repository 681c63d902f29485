//! Polymer enumeration for both ground states, and the boundary closure that
//! defines the ordered polymers.

use rcx::graph::random_regular;
use rcx::polymers::{boundary_closure, enumerate_dis_polymers, enumerate_ord_polymers};
use rcx::EdgeConfig;

fn main() -> rcx::Result<()> {
    let g = random_regular(12, 5, 3)?;
    for m in 1..=6 {
        let dis = enumerate_dis_polymers(&g, m)?.len();
        let ord = enumerate_ord_polymers(&g, m)?.len();
        println!("size <= {m}: {dis} disordered, {ord} ordered polymers");
    }

    // three edges at vertex 0 reach the 5Δ/9 threshold and pull in the rest
    let star: Vec<usize> = g.neighbors(0).iter().take(3).map(|&(_, id)| id).collect();
    let b0 = EdgeConfig::from_edges(g.num_edges(), star);
    let b = boundary_closure(&g, &b0);
    println!("closure of {} edges at vertex 0 has {} edges", b0.count(), b.count());

    if let Some(p) = enumerate_ord_polymers(&g, 4)?.last() {
        println!("an ordered polymer: vertices {:?}, unoccupied {:?}, c' = {}", p.vertices, p.unoccupied, p.c_prime);
    }
    Ok(())
}
