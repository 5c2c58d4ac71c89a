//! Positivity criterion for subnormal commuting tuples, and hyponormality.
//!
//! For a commuting tuple `A_1, ..., A_d` write `A(s) = A_1^{s_1} ... A_d^{s_d}`.
//! A subnormal tuple satisfies
//!
//! ```text
//! sum_{i,j} <A(s_i) xi_j, A(s_j) xi_i> >= 0
//! ```
//!
//! for every finite word list `s_1, ..., s_m` and vectors `xi_1, ..., xi_m`.
//! That double sum is `Xi* M Xi` for the block matrix
//! `M[i][j] = A(s_j)* A(s_i)`, so a word list gives a finite PSD test.
//!
//! In finite dimensions a subnormal tuple is already normal. A failing test
//! therefore refutes subnormality, while a passing test only reports that the
//! inequalities hold up to the given word degree.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ComplexVector, Tolerance};

#[derive(Debug, Clone, PartialEq)]
pub struct CommutingTuple {
    mats: Vec<ComplexMatrix>,
}

impl CommutingTuple {
    /// Checks shapes and `||A_i A_j - A_j A_i|| <= eq_tol * (1 + ||A_i|| ||A_j||)`.
    pub fn new(mats: Vec<ComplexMatrix>, tol: &Tolerance) -> Result<Self> {
        let n = match mats.first() {
            Some(m) => linalg::ensure_square(m)?,
            None => return Err(Error::DimensionMismatch("empty tuple".into())),
        };
        for m in &mats {
            if linalg::ensure_square(m)? != n {
                return Err(Error::DimensionMismatch(format!("expected {n}x{n} generators, got {}x{}", m.nrows(), m.ncols())));
            }
            linalg::check_finite(m)?;
        }
        let norms: Vec<f64> = mats.iter().map(linalg::operator_norm).collect();
        for i in 0..mats.len() {
            for j in i + 1..mats.len() {
                let residual = linalg::distance(&(&mats[i] * &mats[j]), &(&mats[j] * &mats[i]));
                if residual > tol.eq_tol * (1.0 + norms[i] * norms[j]) {
                    return Err(Error::NotCommuting { i, j, residual });
                }
            }
        }
        Ok(CommutingTuple { mats })
    }

    pub fn single(a: ComplexMatrix, tol: &Tolerance) -> Result<Self> {
        Self::new(vec![a], tol)
    }

    pub fn d(&self) -> usize {
        self.mats.len()
    }

    pub fn n(&self) -> usize {
        self.mats[0].nrows()
    }

    pub fn mats(&self) -> &[ComplexMatrix] {
        &self.mats
    }
}

/// Multi-index `(s_1, ..., s_d)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SemigroupWord(pub Vec<usize>);

impl SemigroupWord {
    pub fn zero(d: usize) -> Self {
        SemigroupWord(vec![0; d])
    }

    pub fn degree(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn add(&self, other: &SemigroupWord) -> SemigroupWord {
        SemigroupWord(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

/// All words in `d` letters of total degree at most `degree`, in lexicographic order.
pub fn words_up_to(d: usize, degree: usize) -> Vec<SemigroupWord> {
    fn fill(prefix: &mut Vec<usize>, d: usize, budget: usize, out: &mut Vec<SemigroupWord>) {
        if prefix.len() == d {
            out.push(SemigroupWord(prefix.clone()));
            return;
        }
        for e in 0..=budget {
            prefix.push(e);
            fill(prefix, d, budget - e, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    fill(&mut Vec::with_capacity(d), d, degree, &mut out);
    out
}

pub fn evaluate_word(t: &CommutingTuple, w: &SemigroupWord) -> Result<ComplexMatrix> {
    if w.0.len() != t.d() {
        return Err(Error::DimensionMismatch(format!("word has {} letters, tuple has {}", w.0.len(), t.d())));
    }
    Ok(t.mats.iter().zip(&w.0).fold(linalg::identity(t.n()), |acc, (a, &e)| acc * linalg::matrix_power(a, e)))
}

#[derive(Debug, Clone)]
pub struct BramCertificate {
    pub words: Vec<SemigroupWord>,
    /// Block `(i, j)` is `A(s_j)* A(s_i)`.
    pub block_matrix: ComplexMatrix,
    pub min_eigenvalue: f64,
    /// When the first word is `0` its block is the identity, and `M` is PSD
    /// exactly when the Schur complement of that block is. This is the
    /// smallest eigenvalue of that complement; for the words `{0, s}` it is
    /// the smallest eigenvalue of `A(s)*A(s) - A(s)A(s)*`.
    pub schur_min_eigenvalue: Option<f64>,
    /// Unit vector `Xi` (stacked `xi_i`) with `Xi* M Xi = min_eigenvalue`.
    pub witness: ComplexVector,
    pub passes: bool,
    /// Highest word degree that was tested.
    pub degree_cap: usize,
}

pub fn bram_block_matrix(t: &CommutingTuple, words: &[SemigroupWord]) -> Result<ComplexMatrix> {
    let evaluated = words.iter().map(|w| evaluate_word(t, w)).collect::<Result<Vec<_>>>()?;
    let m = words.len();
    let mut grid: Vec<Vec<ComplexMatrix>> = vec![vec![linalg::zeros(t.n(), t.n()); m]; m];
    for i in 0..m {
        for j in i..m {
            let b = evaluated[j].adjoint() * &evaluated[i];
            grid[j][i] = b.adjoint();
            grid[i][j] = b;
        }
    }
    Ok(linalg::block_matrix(&grid))
}

pub fn bram_test(t: &CommutingTuple, words: &[SemigroupWord], tol: &Tolerance) -> Result<BramCertificate> {
    let block_matrix = bram_block_matrix(t, words)?;
    let verdict = linalg::is_psd(&block_matrix, tol)?;
    let n = t.n();
    let schur_min_eigenvalue = match words.first() {
        Some(w) if w.is_zero() && words.len() > 1 => {
            let rest = block_matrix.nrows() - n;
            let tail = block_matrix.view((n, n), (rest, rest)).into_owned();
            let col = block_matrix.view((n, 0), (rest, n)).into_owned();
            Some(linalg::min_eigenvalue(&(tail - &col * col.adjoint()))?)
        }
        _ => None,
    };
    Ok(BramCertificate {
        degree_cap: words.iter().map(SemigroupWord::degree).max().unwrap_or(0),
        words: words.to_vec(),
        min_eigenvalue: verdict.min_eigenvalue,
        schur_min_eigenvalue,
        witness: verdict.witness,
        passes: verdict.is_psd,
        block_matrix,
    })
}

/// `sum_{i,j} <A(s_i) xi_j, A(s_j) xi_i>` evaluated term by term.
pub fn bram_form(t: &CommutingTuple, words: &[SemigroupWord], xis: &[ComplexVector]) -> Result<num_complex::Complex64> {
    if xis.len() != words.len() {
        return Err(Error::DimensionMismatch(format!("{} vectors for {} words", xis.len(), words.len())));
    }
    let evaluated = words.iter().map(|w| evaluate_word(t, w)).collect::<Result<Vec<_>>>()?;
    let mut total = linalg::ZERO;
    for i in 0..words.len() {
        for j in 0..words.len() {
            total += linalg::inner(&(&evaluated[i] * &xis[j]), &(&evaluated[j] * &xis[i]));
        }
    }
    Ok(total)
}

#[derive(Debug, Clone)]
pub struct HyponormalVerdict {
    pub is_hyponormal: bool,
    /// `A*A - AA*`.
    pub commutator: ComplexMatrix,
    pub min_eigenvalue: f64,
    /// Unit vector with `<(A*A - AA*) x, x> = min_eigenvalue` when the test fails.
    pub witness: Option<ComplexVector>,
}

/// Tests `A*A >= AA*`, with the eigenvalue floor scaled by `||A||^2`.
pub fn hyponormal_check(a: &ComplexMatrix, tol: &Tolerance) -> Result<HyponormalVerdict> {
    linalg::ensure_square(a)?;
    let commutator = a.adjoint() * a - a * a.adjoint();
    let scale = linalg::operator_norm(a).powi(2);
    let v = linalg::is_psd_scaled(&commutator, scale, tol)?;
    Ok(HyponormalVerdict {
        is_hyponormal: v.is_psd,
        min_eigenvalue: v.min_eigenvalue,
        witness: (!v.is_psd).then_some(v.witness),
        commutator,
    })
}

/// Truncated unilateral shift on `C^k`: `e_j -> e_{j+1}`, `e_{k-1} -> 0`.
pub fn truncated_shift(k: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(k, k, |i, j| if i == j + 1 { linalg::ONE } else { linalg::ZERO })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag, real};
    use approx::assert_abs_diff_eq;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn binomial(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn word_enumeration() {
        assert_eq!(words_up_to(1, 2), vec![SemigroupWord(vec![0]), SemigroupWord(vec![1]), SemigroupWord(vec![2])]);
        assert_eq!(
            words_up_to(2, 1),
            vec![SemigroupWord(vec![0, 0]), SemigroupWord(vec![0, 1]), SemigroupWord(vec![1, 0])]
        );
        assert_eq!(words_up_to(3, 2).len(), 10);
        for d in 1..4 {
            for deg in 0..5 {
                let w = words_up_to(d, deg);
                assert_eq!(w.len(), binomial(deg + d, d));
                assert!(w.windows(2).all(|p| p[0] < p[1]));
            }
        }
    }

    #[test]
    fn word_evaluation() {
        let a = real(2, 2, &[1., 2., 3., 4.]);
        let t = CommutingTuple::single(a.clone(), &tol()).unwrap();
        assert_eq!(evaluate_word(&t, &SemigroupWord(vec![0])).unwrap(), linalg::identity(2));
        assert!(linalg::distance(&evaluate_word(&t, &SemigroupWord(vec![3])).unwrap(), &(&a * &a * &a)) < 1e-12);

        let t = CommutingTuple::new(vec![diag(&[1.0, 2.0]), diag(&[3.0, -1.0])], &tol()).unwrap();
        assert_eq!(evaluate_word(&t, &SemigroupWord(vec![1, 1])).unwrap(), diag(&[3.0, -2.0]));
    }

    #[test]
    fn non_commuting_rejected() {
        let x = real(2, 2, &[0., 1., 1., 0.]);
        let z = diag(&[1.0, -1.0]);
        assert!(matches!(CommutingTuple::new(vec![x, z], &tol()), Err(Error::NotCommuting { i: 0, j: 1, .. })));
    }

    #[test]
    fn jordan_block_fails() {
        let j = real(2, 2, &[0., 1., 0., 0.]);
        let t = CommutingTuple::single(j, &tol()).unwrap();
        let cert = bram_test(&t, &words_up_to(1, 1), &tol()).unwrap();
        assert!(!cert.passes);
        assert_abs_diff_eq!(cert.min_eigenvalue, (1.0 - 5f64.sqrt()) / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cert.schur_min_eigenvalue.unwrap(), -1.0, epsilon = 1e-12);
        let m = &cert.block_matrix;
        assert_eq!(linalg::hermitian_defect(m), 0.0);
    }

    #[test]
    fn normal_and_diagonal_pass() {
        let mut rng = crate::random::rng(5);
        let a = crate::random::normal(&mut rng, 3, 1.5);
        let t = CommutingTuple::single(a, &tol()).unwrap();
        assert!(bram_test(&t, &words_up_to(1, 3), &tol()).unwrap().passes);

        let t = CommutingTuple::new(vec![diag(&[0.5, -2.0, 1.0]), diag(&[1.0, 0.3, -0.7])], &tol()).unwrap();
        assert!(bram_test(&t, &words_up_to(2, 3), &tol()).unwrap().passes);
    }

    #[test]
    fn quadratic_form_matches_block_matrix() {
        let mut rng = crate::random::rng(9);
        let a = crate::random::matrix(&mut rng, 3, 3);
        let t = CommutingTuple::single(a, &tol()).unwrap();
        let words = words_up_to(1, 2);
        let xis: Vec<ComplexVector> = (0..words.len()).map(|_| crate::random::vector(&mut rng, 3)).collect();
        let m = bram_block_matrix(&t, &words).unwrap();
        let stacked = ComplexVector::from_iterator(9, xis.iter().flat_map(|x| x.iter().cloned()));
        let direct = bram_form(&t, &words, &xis).unwrap();
        let via_m = (stacked.adjoint() * &m * &stacked)[(0, 0)];
        assert!((direct - via_m).norm() < 1e-10 * (1.0 + direct.norm()));
        assert!(direct.im.abs() < 1e-10 * (1.0 + direct.norm()));
    }

    #[test]
    fn hyponormal_examples() {
        let r = hyponormal_check(&real(2, 2, &[0., 1., 0., 0.]), &tol()).unwrap();
        assert!(!r.is_hyponormal);
        assert_abs_diff_eq!(r.min_eigenvalue, -1.0, epsilon = 1e-12);
        let w = r.witness.unwrap();
        assert_abs_diff_eq!(w[0].norm(), 1.0, epsilon = 1e-12);

        let u = crate::random::normal(&mut crate::random::rng(2), 4, 3.0);
        let r = hyponormal_check(&u, &tol()).unwrap();
        assert!(r.is_hyponormal);
        assert!(linalg::max_abs(&r.commutator) < 1e-12 * 9.0);

        for k in 2..6 {
            let r = hyponormal_check(&truncated_shift(k), &tol()).unwrap();
            assert!(!r.is_hyponormal);
            let mut expected = vec![0.0; k];
            expected[0] = 1.0;
            expected[k - 1] = -1.0;
            assert_eq!(r.commutator, diag(&expected));
        }

        assert!(matches!(hyponormal_check(&linalg::zeros(2, 3), &tol()), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn hyponormal_failure_implies_bram_failure() {
        let t = CommutingTuple::single(real(2, 2, &[1., 1., 0., 0.5]), &tol()).unwrap();
        let s = SemigroupWord(vec![1]);
        let h = hyponormal_check(&evaluate_word(&t, &s).unwrap(), &tol()).unwrap();
        let b = bram_test(&t, &[SemigroupWord::zero(1), s], &tol()).unwrap();
        assert!(!h.is_hyponormal);
        assert!(!b.passes);
    }
}
