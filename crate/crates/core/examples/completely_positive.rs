//! Completely positive maps: the Choi test, Kraus operators, the Stinespring
//! dilation and the uniqueness of minimal dilations.

use dilation::cp::{self, MatrixMap};
use dilation::linalg;
use dilation::Tolerance;

fn main() -> dilation::Result<()> {
    let tol = Tolerance::default();

    // Positive but not completely positive.
    let transpose = MatrixMap::transpose(2);
    let v = cp::is_completely_positive(&transpose, &tol);
    println!("transpose: cp = {}, min Choi eigenvalue {:+.3}", v.is_cp, v.min_eigenvalue);
    let level = cp::cp_level_check(&transpose, &cp::matrix_units(2), &tol)?;
    println!("  matrix-unit level check agrees: positive = {}", level.is_positive);

    // The completely depolarizing channel on M_2, a(x) -> tr(a)/2 * 1.
    let phi = MatrixMap::depolarizing(2);
    let kraus = cp::kraus_of(&phi, &tol)?;
    println!("depolarizing: {} Kraus operators", kraus.len());

    let pair = cp::stinespring(&phi, &tol)?;
    println!(
        "  Stinespring space of dimension {}, minimal = {}, dilation residual {:.2e}",
        pair.k_dim(),
        pair.is_minimal(&tol),
        pair.dilation_residual(&phi)
    );
    println!("  |  ||V||^2 - ||phi(1)||  | = {:.2e}", pair.norm_residual(&phi));

    // A second minimal pair, built from the Kraus operators, is unitarily equivalent.
    let other = cp::kraus_pair(&phi, &tol)?;
    let w = cp::match_minimal(&pair, &other, &tol)?;
    println!("  matching unitary: residual {:.2e}", linalg::unitarity_residual(&w));
    println!("  W V1 = V2: {:.2e}", linalg::distance(&(&w * &pair.v), &other.v));
    Ok(())
}
