//! Unitary dilations of a contraction: Halmos' 2x2 dilation reproduces A,
//! and the (N+1)-block construction reproduces A^m for every m <= N.

use dilation::contraction::{self, Contraction};
use dilation::linalg::{self, real};
use dilation::Tolerance;

fn main() -> dilation::Result<()> {
    let tol = Tolerance::default();
    let a = real(2, 2, &[0.5, 0.4, 0.0, -0.6]);
    let c = Contraction::new(a.clone(), &tol)?;
    println!("||A|| = {:.4}", linalg::operator_norm(&a));

    let u = contraction::halmos_dilate(&c);
    println!("Halmos: {}x{} unitary, residual {:.2e}", u.nrows(), u.ncols(), linalg::unitarity_residual(&u));
    let u2 = &u * &u;
    let corner = u2.view((0, 0), (2, 2)).into_owned();
    println!("  but its square misses A^2 by {:.3}", linalg::distance(&corner, &(&a * &a)));

    let horizon = 5;
    let d = contraction::sznagy_finite(&c, horizon, &tol)?;
    println!("power dilation on C^{}: unitarity {:.2e}", d.u.nrows(), d.unitarity_residual());
    for (m, r) in d.residuals(&a).iter().enumerate() {
        println!("  m = {m}: |A^m - P U^m P| = {r:.2e}");
    }
    let beyond = linalg::distance(&d.compression(horizon + 1), &linalg::matrix_power(&a, horizon + 1));
    println!("  m = {}: {beyond:.3} (past the horizon)", horizon + 1);
    Ok(())
}
