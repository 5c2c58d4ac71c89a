//! The Paulsen system of an operator space. The transpose on M_2 is an
//! isometry, but its 2x2 amplification is not contractive, so its lift to
//! the Paulsen system is positive at level 1 and fails at level 2.

use dilation::cp::{paulsen_lift, OperatorSpaceSpan};
use dilation::linalg::{matrix_unit, ComplexMatrix};
use dilation::Tolerance;

fn main() -> dilation::Result<()> {
    let tol = Tolerance::default();
    let units: Vec<ComplexMatrix> = (0..4).map(|i| matrix_unit(2, i / 2, i % 2)).collect();
    let span = OperatorSpaceSpan::new(2, units.clone(), &tol)?;
    let transposed = units.iter().map(|u| u.transpose()).collect();
    let lift = paulsen_lift(span, transposed)?;

    let a = matrix_unit(2, 0, 1) + matrix_unit(2, 1, 1);
    let one = lift.contractive_probe(&[vec![a]], &tol)?;
    println!("level 1: positive = {}, min eigenvalue {:+.3}", one.is_positive, one.min_eigenvalue);

    // [[e11, e21], [e12, e22]] is the swap on C^2 (x) C^2, of norm 1; its
    // transpose amplification is [[e11, e12], [e21, e22]], of norm 2.
    let corners = vec![
        vec![matrix_unit(2, 0, 0), matrix_unit(2, 1, 0)],
        vec![matrix_unit(2, 0, 1), matrix_unit(2, 1, 1)],
    ];
    let two = lift.contractive_probe(&corners, &tol)?;
    println!("level 2: positive = {}, min eigenvalue {:+.3}", two.is_positive, two.min_eigenvalue);

    // A complete isometry (conjugation by a unitary) survives every level tried.
    let span = OperatorSpaceSpan::new(2, units.clone(), &tol)?;
    let w = ComplexMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0].map(|x| dilation::linalg::c(x, 0.0)));
    let lift = paulsen_lift(span, units.iter().map(|u| &w * u * w.adjoint()).collect())?;
    println!("conjugation at level 2: positive = {}", lift.contractive_probe(&corners, &tol)?.is_positive);
    Ok(())
}
