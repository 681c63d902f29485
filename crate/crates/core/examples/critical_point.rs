//! Tree free energies and the transition point where they cross.

use rcx::phase::{beta_c_solve, beta_c_table, f_dis_truncated, f_ord_truncated};

fn main() -> rcx::Result<()> {
    let (q, delta) = (1e8, 5);
    let bc = beta_c_solve(q, delta, 4, 1e-12)?;
    println!("beta_c = {:.8} in ({:.4}, {:.4})", bc.beta_c, bc.beta0, bc.beta1);
    for beta in [bc.beta0, bc.beta_c, bc.beta1] {
        let fd = f_dis_truncated(q, beta, delta, 4)?;
        let fo = f_ord_truncated(q, beta, delta, 4)?.value;
        println!("beta={beta:.4}: f_dis={fd:.6} f_ord={fo:.6}");
    }
    let qs: Vec<f64> = (4..=12).step_by(2).map(|e| 10f64.powi(e)).collect();
    for row in beta_c_table(&qs, delta, 4, 1e-10)? {
        println!("q={:e}: solver {:.6}, Potts formula {:.6}, 2 ln q/D {:.6}", row.q, row.beta_c, row.potts_formula, row.asymptotic);
    }
    Ok(())
}
