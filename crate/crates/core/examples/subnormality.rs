//! Obstructions to subnormality: the commutator test and the positivity of
//! the block matrices [A(s_j)* A(s_i)] over words in the semigroup.

use dilation::linalg::real;
use dilation::subnormal::{self, CommutingTuple};
use dilation::Tolerance;

fn main() -> dilation::Result<()> {
    let tol = Tolerance::default();

    let jordan = real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
    let h = subnormal::hyponormal_check(&jordan, &tol)?;
    println!("Jordan block: hyponormal = {}, min eigenvalue of [J*, J] = {:+.3}", h.is_hyponormal, h.min_eigenvalue);

    let t = CommutingTuple::single(jordan, &tol)?;
    let cert = subnormal::bram_test(&t, &subnormal::words_up_to(1, 1), &tol)?;
    println!(
        "  words of degree <= 1: passes = {}, min eigenvalue {:+.6}, after eliminating the unit block {:+.6}",
        cert.passes,
        cert.min_eigenvalue,
        cert.schur_min_eigenvalue.unwrap_or(f64::NAN)
    );

    // A truncated unilateral shift fails too, at any size.
    for k in [3, 5, 8] {
        let t = CommutingTuple::single(subnormal::truncated_shift(k), &tol)?;
        let cert = subnormal::bram_test(&t, &subnormal::words_up_to(1, 2), &tol)?;
        println!("shift on C^{k}: passes = {}", cert.passes);
    }

    // Commuting normal matrices pass at every degree.
    let a = real(2, 2, &[1.0, 0.0, 0.0, -0.5]);
    let b = real(2, 2, &[0.2, 0.0, 0.0, 0.7]);
    let t = CommutingTuple::new(vec![a, b], &tol)?;
    let cert = subnormal::bram_test(&t, &subnormal::words_up_to(2, 3), &tol)?;
    println!(
        "diagonal pair: {} words, passes = {} (degree cap {})",
        cert.words.len(),
        cert.passes,
        cert.degree_cap
    );
    Ok(())
}
