//! Certifying expansion for the graphs the counting guarantees apply to.

use rcx::graph::{class_check, random_regular, ClassCheckOptions};
use rcx::Graph;

fn main() -> rcx::Result<()> {
    let opts = ClassCheckOptions::default();
    let graphs = [
        ("K6", Graph::complete(6)),
        ("C12", Graph::cycle(12)),
        ("rr(16,5)", random_regular(16, 5, 2)?),
        ("rr(40,5)", random_regular(40, 5, 2)?),
    ];
    for (name, g) in graphs {
        let ev = class_check(&g, &opts);
        println!(
            "{name}: {:?} via {} phi(1/2)={:?} lower={:?} small={:?}",
            ev.verdict, ev.method, ev.phi_half, ev.phi_half_lower, ev.phi_small
        );
    }
    Ok(())
}
