//! Factor a positive definite kernel into feature vectors, then lift a
//! symmetry of the point set to a unitary on the feature space.

use dilation::kernel::{self, FiniteKernel};
use dilation::linalg::{self, c};
use dilation::{ComplexVector, Tolerance};

fn main() -> dilation::Result<()> {
    let tol = Tolerance::default();

    // Gaussian kernel on four equally spaced points of a circle.
    let points: Vec<(f64, f64)> = (0..4)
        .map(|k| {
            let t = std::f64::consts::FRAC_PI_2 * k as f64;
            (t.cos(), t.sin())
        })
        .collect();
    let gram = linalg::ComplexMatrix::from_fn(4, 4, |i, j| {
        let (dx, dy) = (points[i].0 - points[j].0, points[i].1 - points[j].1);
        c((-(dx * dx + dy * dy)).exp(), 0.0)
    });
    let k = FiniteKernel::new(vec!["east".into(), "north".into(), "west".into(), "south".into()], gram)?;
    println!("min kernel eigenvalue: {:.6}", kernel::validate_kernel(&k, &tol)?.min_eigenvalue);

    let e = kernel::build_embedding(&k, &tol)?;
    println!("feature dimension {}, round trip residual {:.2e}", e.dim(), e.round_trip_residual());

    // Rotating by a quarter turn permutes the points and preserves the kernel.
    let quarter = [1, 2, 3, 0];
    let u = kernel::automorphism_unitary(&e, &quarter, &tol)?;
    let u4 = linalg::matrix_power(&u, 4);
    println!("U is unitary: {:.2e}", linalg::unitarity_residual(&u));
    println!("U^4 = 1: {:.2e}", linalg::distance(&u4, &linalg::identity(e.dim())));

    // The exponential kernel exp(<z, w>) and the second quantization of a phase.
    let omega = num_complex::Complex64::from_polar(1.0, std::f64::consts::TAU / 3.0);
    let samples: Vec<ComplexVector> = (0..3).map(|j| ComplexVector::from_element(1, omega.powi(j) * 0.5)).collect();
    let w = linalg::ComplexMatrix::from_element(1, 1, omega);
    let fock = kernel::build_embedding(&kernel::exp_kernel(&samples)?, &tol)?;
    let sq = kernel::second_quantize(&fock, &samples, &w, &tol)?;
    println!("second quantization permutes the samples as {:?}", sq.permutation);
    println!("Gamma(U) is unitary: {:.2e}", linalg::unitarity_residual(&sq.gamma));
    Ok(())
}
