//! Dense complex linear algebra shared by every construction in the crate.
//!
//! Matrices are plain [`nalgebra::DMatrix`] values over `Complex64`. All
//! numerical judgements (equality, positivity, rank) go through one
//! [`Tolerance`] value so that a whole pipeline can be tightened or loosened
//! in one place.
//!
//! Inner products are linear in the first argument:
//! `inner(a, b) = sum_k a_k * conj(b_k)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Numerical tolerances.
///
/// * `eq_tol`: absolute tolerance for entrywise and norm equalities.
/// * `psd_tol`: relative eigenvalue floor; a Hermitian `M` is accepted as
///   positive when its smallest eigenvalue is at least `-psd_tol * ||M||`.
/// * `rank_tol`: relative eigenvalue cutoff used for numerical rank.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub eq_tol: f64,
    pub psd_tol: f64,
    pub rank_tol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { eq_tol: 1e-9, psd_tol: 1e-9, rank_tol: 1e-10 }
    }
}

impl Tolerance {
    pub fn new(eq_tol: f64, psd_tol: f64, rank_tol: f64) -> Result<Self> {
        let tol = Tolerance { eq_tol, psd_tol, rank_tol };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("eq_tol", self.eq_tol), ("psd_tol", self.psd_tol), ("rank_tol", self.rank_tol)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidTolerance(format!("{name} = {v} must lie in (0, 1)")));
            }
        }
        Ok(())
    }
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Builds a matrix from row-major entries, rejecting bad lengths and non-finite values.
pub fn matrix(rows: usize, cols: usize, entries: &[Complex64]) -> Result<ComplexMatrix> {
    if entries.len() != rows * cols {
        return Err(Error::DimensionMismatch(format!(
            "{} entries supplied for a {rows}x{cols} matrix",
            entries.len()
        )));
    }
    let m = ComplexMatrix::from_row_slice(rows, cols, entries);
    check_finite(&m)?;
    Ok(m)
}

/// Real row-major convenience constructor. Panics on a length mismatch.
pub fn real(rows: usize, cols: usize, entries: &[f64]) -> ComplexMatrix {
    assert_eq!(entries.len(), rows * cols, "entry count does not match shape");
    ComplexMatrix::from_row_iterator(rows, cols, entries.iter().map(|&x| c(x, 0.0)))
}

pub fn diag(values: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&ComplexVector::from_iterator(
        values.len(),
        values.iter().map(|&x| c(x, 0.0)),
    ))
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(rows, cols)
}

/// The matrix unit `e_pq` in the `d x d` matrix algebra.
pub fn matrix_unit(d: usize, p: usize, q: usize) -> ComplexMatrix {
    let mut e = zeros(d, d);
    e[(p, q)] = ONE;
    e
}

pub fn check_finite(m: &ComplexMatrix) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

pub fn ensure_square(m: &ComplexMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    Ok(m.nrows())
}

/// Conjugate transpose.
pub fn adjoint(m: &ComplexMatrix) -> ComplexMatrix {
    m.adjoint()
}

pub fn inner(a: &ComplexVector, b: &ComplexVector) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum()
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Largest singular value.
pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let svd = SVD::new(m.clone(), false, false);
    svd.singular_values.iter().cloned().fold(0.0, f64::max)
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Operator-norm distance between two equally shaped matrices.
pub fn distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    operator_norm(&(a - b))
}

pub fn hermitian_defect(m: &ComplexMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// `||M* M - 1||`, the distance of `M` from being an isometry.
pub fn isometry_residual(m: &ComplexMatrix) -> f64 {
    distance(&(m.adjoint() * m), &identity(m.ncols()))
}

/// `max(||U*U - 1||, ||UU* - 1||)`.
pub fn unitarity_residual(u: &ComplexMatrix) -> f64 {
    isometry_residual(u).max(isometry_residual(&u.adjoint()))
}

/// Residual of the projection identities `P = P* = P^2`.
pub fn projection_residual(p: &ComplexMatrix) -> f64 {
    distance(p, &p.adjoint()).max(distance(&(p * p), p))
}

pub fn matrix_power(a: &ComplexMatrix, k: usize) -> ComplexMatrix {
    let mut out = identity(a.nrows());
    for _ in 0..k {
        out = &out * a;
    }
    out
}

/// Eigendecomposition of the Hermitian part of a square matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<HermitianEigen> {
    let n = ensure_square(m)?;
    if n == 0 {
        return Ok(HermitianEigen { values: vec![], vectors: zeros(0, 0) });
    }
    let h = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, k| eig.eigenvectors[(r, order[k])]);
    Ok(HermitianEigen { values, vectors })
}

/// Positivity verdict for a square matrix, with the eigenpair that decides it.
#[derive(Debug, Clone)]
pub struct PsdVerdict {
    pub is_psd: bool,
    pub min_eigenvalue: f64,
    /// Unit eigenvector for `min_eigenvalue`.
    pub witness: ComplexVector,
    pub hermitian_defect: f64,
}

/// Positivity test with the eigenvalue floor scaled by `||M||`.
pub fn is_psd(m: &ComplexMatrix, tol: &Tolerance) -> Result<PsdVerdict> {
    psd_verdict(m, None, tol)
}

/// Positivity test with the eigenvalue floor `-psd_tol * scale`.
///
/// Useful when `M` is a difference of large, nearly equal terms and its own
/// norm is the wrong yardstick (for example `A*A - AA*` of a normal `A`).
pub fn is_psd_scaled(m: &ComplexMatrix, scale: f64, tol: &Tolerance) -> Result<PsdVerdict> {
    psd_verdict(m, Some(scale), tol)
}

fn psd_verdict(m: &ComplexMatrix, scale: Option<f64>, tol: &Tolerance) -> Result<PsdVerdict> {
    let n = ensure_square(m)?;
    if n == 0 {
        return Ok(PsdVerdict { is_psd: true, min_eigenvalue: 0.0, witness: ComplexVector::zeros(0), hermitian_defect: 0.0 });
    }
    let defect = hermitian_defect(m);
    let eig = hermitian_eigen(m)?;
    let min_eigenvalue = eig.values[0];
    let scale = scale.unwrap_or_else(|| min_eigenvalue.abs().max(eig.values[n - 1].abs()));
    let witness = eig.vectors.column(0).into_owned();
    let hermitian = defect <= tol.eq_tol * (1.0 + max_abs(m));
    let is_psd = hermitian && min_eigenvalue >= -tol.psd_tol * scale;
    Ok(PsdVerdict { is_psd, min_eigenvalue, witness, hermitian_defect: defect })
}

/// Smallest eigenvalue of the Hermitian part.
pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigen(m)?.values.first().copied().unwrap_or(0.0))
}

/// Positive square root of a positive semidefinite matrix.
///
/// Eigenvalues at or below `rank_tol * ||m||` are taken as zero: the square
/// root would otherwise turn rounding noise of order `1e-16` into `1e-8`.
pub fn sqrt_psd(m: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
    let verdict = is_psd(m, tol)?;
    if !verdict.is_psd {
        return Err(Error::NotPsd { min_eigenvalue: verdict.min_eigenvalue });
    }
    let floor = tol.rank_tol * operator_norm(m);
    Ok(psd_function(m, |x| if x > floor { x.sqrt() } else { 0.0 }))
}

/// Applies `f` to the eigenvalues of the Hermitian part of `m`.
pub(crate) fn psd_function(m: &ComplexMatrix, f: impl Fn(f64) -> f64) -> ComplexMatrix {
    let eig = hermitian_eigen(m).expect("square matrix");
    let n = eig.values.len();
    let mut scaled = eig.vectors.clone();
    for k in 0..n {
        let s = f(eig.values[k]);
        scaled.column_mut(k).scale_mut(s);
    }
    scaled * eig.vectors.adjoint()
}

/// Rank factorization `G = F* F` of a positive semidefinite matrix.
#[derive(Debug, Clone)]
pub struct GramFactor {
    /// `r x m`, rows are `sqrt(lambda_k) u_k*` for the retained eigenpairs.
    pub factor: ComplexMatrix,
    pub rank: usize,
    /// Retained eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    /// Retained unit eigenvectors as columns (`m x r`).
    pub basis: ComplexMatrix,
}

/// Factors a PSD matrix by eigenvalue truncation.
///
/// Eigenvalues at or below `rank_tol * ||G||` are treated as zero, so the
/// rows of the factor span exactly the numerical range of `G`.
pub fn gram_factor(g: &ComplexMatrix, tol: &Tolerance) -> Result<GramFactor> {
    let m = ensure_square(g)?;
    let verdict = is_psd(g, tol)?;
    if !verdict.is_psd {
        return Err(Error::NotPsd { min_eigenvalue: verdict.min_eigenvalue });
    }
    Ok(truncated_factor(g, m, tol))
}

fn truncated_factor(g: &ComplexMatrix, m: usize, tol: &Tolerance) -> GramFactor {
    let eig = hermitian_eigen(g).expect("square matrix");
    let top = eig.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let cutoff = tol.rank_tol * top;
    let kept: Vec<usize> = (0..m).rev().filter(|&k| eig.values[k] > cutoff && eig.values[k] > 0.0).collect();
    let rank = kept.len();
    let eigenvalues: Vec<f64> = kept.iter().map(|&k| eig.values[k]).collect();
    let basis = ComplexMatrix::from_fn(m, rank, |i, j| eig.vectors[(i, kept[j])]);
    let mut factor = basis.adjoint();
    for (row, lambda) in eigenvalues.iter().enumerate() {
        factor.row_mut(row).scale_mut(lambda.sqrt());
    }
    GramFactor { factor, rank, eigenvalues, basis }
}

/// Orthonormal basis (as columns) for the column span of `gens`.
pub fn span_basis(gens: &ComplexMatrix, tol: &Tolerance) -> ComplexMatrix {
    let k = gens.nrows();
    if k == 0 || gens.ncols() == 0 {
        return zeros(k, 0);
    }
    truncated_factor(&(gens * gens.adjoint()), k, tol).basis
}

/// Solves `W * src = dst` for `W` when `src` has full row rank.
///
/// This is the Gram-matching step behind every uniqueness statement in the
/// crate: when the columns of `src` and `dst` have the same Gram matrix the
/// solution is an isometry carrying each generator onto its partner.
pub fn intertwiner(src: &ComplexMatrix, dst: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
    if src.ncols() != dst.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "{} source generators vs {} target generators",
            src.ncols(),
            dst.ncols()
        )));
    }
    let k = src.nrows();
    if k == 0 {
        return Ok(zeros(dst.nrows(), 0));
    }
    let f = truncated_factor(&(src * src.adjoint()), k, tol);
    if f.rank < k {
        return Err(Error::RankDeficient { rank: f.rank, expected: k });
    }
    // (src src*)^{-1} from its eigendecomposition
    let mut inv = f.basis.clone();
    for (j, lambda) in f.eigenvalues.iter().enumerate() {
        inv.column_mut(j).scale_mut(1.0 / lambda);
    }
    let gram_inv = inv * f.basis.adjoint();
    Ok(dst * src.adjoint() * gram_inv)
}

/// Singular values, descending.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    if m.is_empty() {
        return vec![];
    }
    let mut s: Vec<f64> = SVD::new(m.clone(), false, false).singular_values.iter().cloned().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// `sigma_max / sigma_min`, infinite for singular input.
pub fn condition_number(m: &ComplexMatrix) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    }
}

/// Eigenvalues of a general square matrix from its complex Schur form.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let n = ensure_square(m)?;
    if n == 0 {
        return Ok(vec![]);
    }
    let schur = nalgebra::Schur::new(m.clone());
    let (_, t) = schur.unpack();
    Ok((0..n).map(|i| t[(i, i)]).collect())
}

pub fn spectral_radius(m: &ComplexMatrix) -> Result<f64> {
    Ok(eigenvalues(m)?.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Assembles a block matrix from a square grid of equally sized blocks.
pub fn block_matrix(blocks: &[Vec<ComplexMatrix>]) -> ComplexMatrix {
    let k = blocks.len();
    if k == 0 {
        return zeros(0, 0);
    }
    let (r, c) = blocks[0][0].shape();
    let mut out = zeros(k * r, blocks[0].len() * c);
    for (i, row) in blocks.iter().enumerate() {
        for (j, b) in row.iter().enumerate() {
            out.view_mut((i * r, j * c), (r, c)).copy_from(b);
        }
    }
    out
}

/// Block `(i, j)` of size `r x c`.
pub fn block(m: &ComplexMatrix, i: usize, j: usize, r: usize, c: usize) -> ComplexMatrix {
    m.view((i * r, j * c), (r, c)).into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn adjoint_examples() {
        assert_eq!(adjoint(&identity(2)), identity(2));
        assert_eq!(adjoint(&real(2, 2, &[0., 1., 0., 0.])), real(2, 2, &[0., 0., 1., 0.]));
        let m = matrix(1, 1, &[c(0.0, 1.0)]).unwrap();
        assert_eq!(adjoint(&m)[(0, 0)], c(0.0, -1.0));
        assert_eq!(adjoint(&adjoint(&m)), m);
    }

    #[test]
    fn matrix_constructor_rejects_bad_input() {
        assert!(matches!(matrix(2, 2, &[ONE; 3]), Err(Error::DimensionMismatch(_))));
        assert!(matches!(matrix(1, 1, &[c(f64::NAN, 0.0)]), Err(Error::NonFinite { row: 0, col: 0 })));
    }

    #[test]
    fn tolerance_bounds() {
        assert!(Tolerance::new(1e-9, 1e-9, 1e-10).is_ok());
        assert!(Tolerance::new(0.0, 1e-9, 1e-10).is_err());
        assert!(Tolerance::new(1e-9, 1.0, 1e-10).is_err());
    }

    #[test]
    fn psd_examples() {
        let v = is_psd(&identity(3), &tol()).unwrap();
        assert!(v.is_psd);
        assert_abs_diff_eq!(v.min_eigenvalue, 1.0, epsilon = 1e-12);

        let v = is_psd(&diag(&[1.0, -1.0]), &tol()).unwrap();
        assert!(!v.is_psd);
        assert_abs_diff_eq!(v.min_eigenvalue, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v.witness[1].norm(), 1.0, epsilon = 1e-12);

        // characteristic polynomial t^2 - 2t has roots 0 and 2
        let v = is_psd(&real(2, 2, &[1., 1., 1., 1.]), &tol()).unwrap();
        assert!(v.is_psd);
        assert_abs_diff_eq!(v.min_eigenvalue, 0.0, epsilon = 1e-12);

        assert!(matches!(is_psd(&zeros(2, 3), &tol()), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn non_hermitian_is_not_psd() {
        let v = is_psd(&real(2, 2, &[1., 1., 0., 1.]), &tol()).unwrap();
        assert!(!v.is_psd);
    }

    #[test]
    fn sqrt_examples() {
        assert_abs_diff_eq!(distance(&sqrt_psd(&identity(2), &tol()).unwrap(), &identity(2)), 0.0, epsilon = 1e-12);
        let s = sqrt_psd(&diag(&[4.0, 9.0]), &tol()).unwrap();
        assert_abs_diff_eq!(distance(&s, &diag(&[2.0, 3.0])), 0.0, epsilon = 1e-12);

        // eigen-oracle: [[2,1],[1,2]] = Q diag(3,1) Q*, Q = [[1,1],[1,-1]]/sqrt2
        let m = real(2, 2, &[2., 1., 1., 2.]);
        let s = sqrt_psd(&m, &tol()).unwrap();
        let (a, b) = ((3f64.sqrt() + 1.0) / 2.0, (3f64.sqrt() - 1.0) / 2.0);
        assert_abs_diff_eq!(distance(&s, &real(2, 2, &[a, b, b, a])), 0.0, epsilon = 1e-12);
        assert!(distance(&(&s * &s), &m) <= 1e-9 * (1.0 + operator_norm(&m)));

        assert!(matches!(sqrt_psd(&diag(&[1.0, -1.0]), &tol()), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn gram_factor_examples() {
        let f = gram_factor(&identity(4), &tol()).unwrap();
        assert_eq!(f.rank, 4);
        assert_abs_diff_eq!(distance(&(f.factor.adjoint() * &f.factor), &identity(4)), 0.0, epsilon = 1e-12);

        let ones = real(3, 3, &[1.0; 9]);
        let f = gram_factor(&ones, &tol()).unwrap();
        assert_eq!(f.rank, 1);
        for j in 0..3 {
            assert_abs_diff_eq!(f.factor[(0, j)].norm(), 1.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(distance(&(f.factor.adjoint() * &f.factor), &ones), 0.0, epsilon = 1e-12);

        let f = gram_factor(&zeros(3, 3), &tol()).unwrap();
        assert_eq!(f.rank, 0);
        assert_eq!(f.factor.shape(), (0, 3));

        assert!(matches!(gram_factor(&diag(&[1.0, -0.5]), &tol()), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn operator_norm_examples() {
        assert_abs_diff_eq!(operator_norm(&identity(3)), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(operator_norm(&diag(&[3.0, -5.0])), 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(operator_norm(&real(2, 2, &[0., 2., 0., 0.])), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn sqrt_of_projection_is_itself() {
        let v = ComplexVector::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0), c(1.0, -1.0)]);
        let p = (&v * v.adjoint()).unscale(v.norm_squared());
        let s = sqrt_psd(&p, &tol()).unwrap();
        assert!(distance(&s, &p) < 1e-9);
    }

    #[test]
    fn intertwiner_recovers_rotation() {
        let src = real(2, 3, &[1., 0., 1., 0., 1., 1.]);
        let rot = real(2, 2, &[0., -1., 1., 0.]);
        let dst = &rot * &src;
        let w = intertwiner(&src, &dst, &tol()).unwrap();
        assert!(distance(&w, &rot) < 1e-12);
        assert!(matches!(
            intertwiner(&real(2, 2, &[1., 1., 1., 1.]), &identity(2), &tol()),
            Err(Error::RankDeficient { rank: 1, expected: 2 })
        ));
    }

    #[test]
    fn eigenvalues_of_triangular() {
        let m = matrix(2, 2, &[c(1.0, 1.0), c(3.0, 0.0), ZERO, c(-2.0, 0.0)]).unwrap();
        let mut ev = eigenvalues(&m).unwrap();
        ev.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert_abs_diff_eq!((ev[0] - c(-2.0, 0.0)).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!((ev[1] - c(1.0, 1.0)).norm(), 0.0, epsilon = 1e-12);
    }
}
