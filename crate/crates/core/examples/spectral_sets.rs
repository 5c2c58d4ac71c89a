//! von Neumann's inequality and spectral-set checks on the unit disk.

use dilation::contraction::{self, Contraction, Polynomial, RationalMatrixFunction};
use dilation::linalg::{c, real};
use dilation::Tolerance;

fn main() -> dilation::Result<()> {
    let tol = Tolerance::default();
    let jordan = Contraction::new(real(2, 2, &[0.0, 1.0, 0.0, 0.0]), &tol)?;

    // p(z) = 1 + z: ||1 + J|| is the golden ratio, and sup |1 + z| on the circle is 2.
    let p = Polynomial(vec![c(1.0, 0.0), c(1.0, 0.0)]);
    let r = contraction::von_neumann_check(&jordan, &p, 256, &tol)?;
    println!("||p(J)|| = {:.6} <= {:.6} (grid slack {:.3e}): {}", r.lhs, r.rhs, r.slack, r.holds);

    // A rational function with its pole outside the closed disk.
    let a = real(2, 2, &[0.3, 0.5, -0.2, 0.4]);
    let f = RationalMatrixFunction::scalar(&[c(0.0, 0.0), c(1.0, 0.0)], &[c(-2.0, 0.0), c(1.0, 0.0)])?;
    let circle = contraction::unit_circle(512);
    let report = contraction::spectral_set_check(&a, &circle, &[f], &tol)?;
    for e in &report.entries {
        println!("||f(A)|| = {:.6}, sup |f| = {:.6}, violated = {}", e.lhs, e.rhs, e.violated);
    }

    // Matrix-valued polynomials: the disk is a complete spectral set for contractions.
    let coeffs = vec![real(2, 2, &[1.0, 0.0, 0.0, -1.0]), real(2, 2, &[0.0, 1.0, 1.0, 0.0])];
    let g = RationalMatrixFunction::matrix_polynomial(coeffs)?;
    let report = contraction::complete_spectral_check(&a, &circle, &[g], &tol)?;
    println!(
        "matrix polynomial: violation = {} (evidence from {} samples, spectral radius {:.3})",
        report.any_violation(),
        circle.len(),
        report.spectral_radius
    );
    Ok(())
}
