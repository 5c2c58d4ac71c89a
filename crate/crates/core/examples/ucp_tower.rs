//! The dilation tower of a unital completely positive map: isometries
//! iota_k with iota_k* (a (x) 1) iota_k = phi^k(a), and the increasing ladder
//! of range projections.

use dilation::cp::MatrixMap;
use dilation::linalg::real;
use dilation::tower::{self, UcpMap};
use dilation::Tolerance;

fn main() -> dilation::Result<()> {
    let tol = Tolerance::default();

    // Phase damping on a qubit: off-diagonal entries shrink by 0.8 per step.
    let k0 = real(2, 2, &[1.0, 0.0, 0.0, 0.8]);
    let k1 = real(2, 2, &[0.0, 0.0, 0.0, 0.6]);
    let u = UcpMap::from_kraus(&[k0, k1], &tol)?;
    let t = tower::build_tower(&u, 3, &tol)?;
    println!("horizon {}, top space C^{}", t.horizon, t.top_dim());
    let a = real(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    for k in 1..=3 {
        let m = t.moment(k, &a);
        println!("  k = {k}: off-diagonal {:.4}, residual {:.2e}", m[(0, 1)].re, t.moment_residuals[k - 1]);
    }
    let ladder = tower::projection_ladder(&t, &tol)?;
    println!("  ladder ranks {:?}, increasing = {}", ladder.ranks, ladder.is_increasing(&tol));

    let depolarizing = UcpMap::new(MatrixMap::depolarizing(2), &tol)?;
    let t = tower::build_tower(&depolarizing, 2, &tol)?;
    let ladder = tower::projection_ladder(&t, &tol)?;
    println!("depolarizing: E = {}, ranks {:?}", depolarizing.e_dim(), ladder.ranks);

    match tower::build_tower(&depolarizing, 6, &tol) {
        Err(e) => println!("horizon 6: {e}"),
        Ok(t) => println!("horizon 6: C^{}", t.top_dim()),
    }
    Ok(())
}
