//! Naimark dilation of the trine measurement on a qubit: three rank-one
//! effects become three orthogonal projections on C^3.

use dilation::linalg::{self, real};
use dilation::povm::{self, Povm};
use dilation::Tolerance;

fn main() -> dilation::Result<()> {
    let tol = Tolerance::default();
    let effects = (0..3)
        .map(|j| {
            let t = std::f64::consts::TAU * j as f64 / 3.0;
            let (c, s) = ((t / 2.0).cos(), (t / 2.0).sin());
            real(2, 2, &[c * c, c * s, c * s, s * s]).scale(2.0 / 3.0)
        })
        .collect();
    let trine = Povm::new(effects)?;
    println!("valid POVM: {}", povm::validate_povm(&trine, &tol).valid);

    let d = povm::naimark_dilate(&trine, &tol)?;
    println!("dilation space: C^{}", d.k_dim());
    let r = povm::verify_naimark(&trine, &d, &tol)?;
    println!("max |V*Q_iV - E_i| = {:.2e}, isometry {:.2e}, projections {:.2e}", r.max_residual, r.isometry_residual, r.pvm_residual);

    // Outcome probabilities agree for a sample state.
    let xi = dilation::ComplexVector::from_vec(vec![linalg::c(0.6, 0.0), linalg::c(0.0, 0.8)]);
    for (i, (e, q)) in trine.effects().iter().zip(&d.projections).enumerate() {
        let p = linalg::inner(&(e * &xi), &xi).re;
        println!("  outcome {i}: <E xi, xi> = {p:.6}, |Q V xi|^2 = {:.6}", (q * &d.v * &xi).norm_squared());
    }

    // The same dilation, obtained through the Stinespring construction.
    let other = povm::naimark_via_stinespring(&trine, &tol)?;
    let w = povm::match_naimark(&d, &other, &tol)?;
    println!("Stinespring route matches up to a unitary: {:.2e}", linalg::unitarity_residual(&w));
    Ok(())
}
