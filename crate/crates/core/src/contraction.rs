//! Unitary dilations of a single contraction, the von Neumann inequality, and
//! sampled spectral-set checks.
//!
//! For a contraction `A` with defect operators `D_A = (1 - A*A)^{1/2}` and
//! `D_{A*} = (1 - AA*)^{1/2}`, the block matrix
//!
//! ```text
//! [ A     D_{A*} ]
//! [ D_A   -A*    ]
//! ```
//!
//! is unitary. Inserting an identity shift of `N - 1` blocks between the two
//! block rows gives an `(N + 1)`-block unitary `U` whose powers compress to
//! `A^m` for every `m <= N`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, Tolerance};

#[derive(Debug, Clone, PartialEq)]
pub struct Contraction(ComplexMatrix);

impl Contraction {
    pub fn new(a: ComplexMatrix, tol: &Tolerance) -> Result<Self> {
        linalg::ensure_square(&a)?;
        linalg::check_finite(&a)?;
        let norm = linalg::operator_norm(&a);
        if norm > 1.0 + tol.eq_tol {
            return Err(Error::NotContraction { norm });
        }
        Ok(Contraction(a))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    /// `(D_A, D_{A*})` from one singular value decomposition.
    ///
    /// With `A = W S X*`, `D_A = X (1 - S^2)^{1/2} X*` and
    /// `D_{A*} = W (1 - S^2)^{1/2} W*`, so `A D_A = D_{A*} A` holds to rounding
    /// even when singular values sit at 1.
    pub fn defects(&self) -> (ComplexMatrix, ComplexMatrix) {
        let n = self.dim();
        if n == 0 {
            return (linalg::zeros(0, 0), linalg::zeros(0, 0));
        }
        let svd = nalgebra::SVD::new(self.0.clone(), true, true);
        let w = svd.u.expect("requested");
        let x = svd.v_t.expect("requested").adjoint();
        let root: Vec<f64> = svd.singular_values.iter().map(|s| (1.0 - s * s).max(0.0).sqrt()).collect();
        let mid = linalg::diag(&root);
        (&x * &mid * x.adjoint(), &w * &mid * w.adjoint())
    }

    /// `||A D_A - D_{A*} A||`.
    pub fn intertwining_residual(&self) -> f64 {
        let (da, dastar) = self.defects();
        linalg::distance(&(&self.0 * da), &(dastar * &self.0))
    }
}

/// Halmos' one-step unitary dilation `[[A, D_{A*}], [D_A, -A*]]`.
pub fn halmos_dilate(c: &Contraction) -> ComplexMatrix {
    let a = c.matrix();
    let (da, dastar) = c.defects();
    linalg::block_matrix(&[vec![a.clone(), dastar], vec![da, -a.adjoint()]])
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerDilation {
    pub horizon: usize,
    /// Size of the original space; `H` sits in the first block.
    pub n: usize,
    pub u: ComplexMatrix,
}

impl PowerDilation {
    /// Top-left `n x n` block of `U^m`.
    pub fn compression(&self, m: usize) -> ComplexMatrix {
        linalg::block(&linalg::matrix_power(&self.u, m), 0, 0, self.n, self.n)
    }

    /// `||A^m - P_H U^m|_H||` for each `m = 0..=horizon`.
    pub fn residuals(&self, a: &ComplexMatrix) -> Vec<f64> {
        let mut upow = linalg::identity(self.u.nrows());
        let mut apow = linalg::identity(self.n);
        let mut out = Vec::with_capacity(self.horizon + 1);
        for _ in 0..=self.horizon {
            out.push(linalg::distance(&apow, &linalg::block(&upow, 0, 0, self.n, self.n)));
            upow = &upow * &self.u;
            apow = &apow * a;
        }
        out
    }

    pub fn unitarity_residual(&self) -> f64 {
        linalg::unitarity_residual(&self.u)
    }
}

/// Unitary on `N + 1` copies of `H` whose first `N` powers compress to `A^m`.
pub fn sznagy_finite(c: &Contraction, horizon: usize, tol: &Tolerance) -> Result<PowerDilation> {
    if horizon == 0 {
        return Err(Error::ZeroHorizon);
    }
    let residual = c.intertwining_residual();
    if residual > tol.eq_tol {
        return Err(Error::ConstructionCheck { what: "defect intertwining", residual });
    }
    let n = c.dim();
    let a = c.matrix();
    let (da, dastar) = c.defects();
    let blocks = horizon + 1;
    let mut u = linalg::zeros(blocks * n, blocks * n);
    let mut put = |i: usize, j: usize, m: &ComplexMatrix| u.view_mut((i * n, j * n), (n, n)).copy_from(m);
    put(0, 0, a);
    put(0, horizon, &dastar);
    put(1, 0, &da);
    put(1, horizon, &-a.adjoint());
    for j in 2..blocks {
        put(j, j - 1, &linalg::identity(n));
    }
    let dilation = PowerDilation { horizon, n, u };
    let residual = dilation.unitarity_residual();
    if residual > tol.eq_tol {
        return Err(Error::ConstructionCheck { what: "unitarity", residual });
    }
    Ok(dilation)
}

/// Polynomial with complex coefficients, constant term first.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial(pub Vec<Complex64>);

impl Polynomial {
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.0.iter().rev().fold(linalg::ZERO, |acc, a| acc * z + a)
    }

    pub fn eval_matrix(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let n = a.nrows();
        let id = linalg::identity(n);
        self.0.iter().rev().fold(linalg::zeros(n, n), |acc, c| acc * a + &id * *c)
    }

    /// `sum_k k |a_k|`, a Lipschitz constant for `f` on the unit circle.
    pub fn derivative_bound(&self) -> f64 {
        self.0.iter().enumerate().map(|(k, a)| k as f64 * a.norm()).sum()
    }
}

#[derive(Debug, Clone)]
pub struct VonNeumannReport {
    /// `||f(A)||`.
    pub lhs: f64,
    /// `max |f|` over the grid of roots of unity.
    pub rhs: f64,
    /// `derivative_bound * 2 pi / grid`: bounds the gap between the grid
    /// maximum and the true maximum on the circle.
    pub slack: f64,
    /// `rhs + slack - lhs`; negative means a violation.
    pub margin: f64,
    pub holds: bool,
}

pub fn von_neumann_check(c: &Contraction, poly: &Polynomial, grid: usize, tol: &Tolerance) -> Result<VonNeumannReport> {
    let required = 4 * (poly.degree() + 1);
    if grid < required {
        return Err(Error::GridTooCoarse { grid, degree: poly.degree(), required });
    }
    let lhs = linalg::operator_norm(&poly.eval_matrix(c.matrix()));
    let rhs = unit_circle(grid).iter().map(|z| poly.eval(*z).norm()).fold(0.0, f64::max);
    let slack = poly.derivative_bound() * std::f64::consts::TAU / grid as f64;
    let margin = rhs + slack - lhs;
    let holds = margin >= -tol.eq_tol * (1.0 + rhs);
    Ok(VonNeumannReport { lhs, rhs, slack, margin, holds })
}

/// `grid` equally spaced points on the unit circle, starting at 1.
pub fn unit_circle(grid: usize) -> Vec<Complex64> {
    (0..grid).map(|j| Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / grid as f64)).collect()
}

/// `F(z) = (sum_k C_k z^k) / q(z)` with `s x s` coefficients `C_k` and a
/// scalar denominator `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalMatrixFunction {
    pub numerator: Vec<ComplexMatrix>,
    pub denominator: Vec<Complex64>,
    /// Declared poles, informational.
    pub poles: Vec<Complex64>,
}

impl RationalMatrixFunction {
    pub fn new(numerator: Vec<ComplexMatrix>, denominator: Vec<Complex64>, poles: Vec<Complex64>) -> Result<Self> {
        let s = numerator.first().map(|c| c.nrows()).unwrap_or(1);
        if numerator.iter().any(|c| c.shape() != (s, s)) {
            return Err(Error::DimensionMismatch("numerator coefficients have different shapes".into()));
        }
        if denominator.is_empty() || denominator.iter().all(|c| *c == linalg::ZERO) {
            return Err(Error::DimensionMismatch("denominator is the zero polynomial".into()));
        }
        Ok(RationalMatrixFunction { numerator, denominator, poles })
    }

    /// Scalar rational function `p / q`.
    pub fn scalar(p: &[Complex64], q: &[Complex64]) -> Result<Self> {
        Self::new(p.iter().map(|c| ComplexMatrix::from_element(1, 1, *c)).collect(), q.to_vec(), vec![])
    }

    pub fn polynomial(p: &[Complex64]) -> Self {
        Self::scalar(p, &[linalg::ONE]).expect("nonzero denominator")
    }

    /// Matrix polynomial with denominator 1.
    pub fn matrix_polynomial(coefficients: Vec<ComplexMatrix>) -> Result<Self> {
        Self::new(coefficients, vec![linalg::ONE], vec![])
    }

    pub fn size(&self) -> usize {
        self.numerator.first().map(|c| c.nrows()).unwrap_or(1)
    }

    fn denominator_poly(&self) -> Polynomial {
        Polynomial(self.denominator.clone())
    }

    pub fn eval(&self, z: Complex64) -> Option<ComplexMatrix> {
        let q = self.denominator_poly().eval(z);
        if q == linalg::ZERO {
            return None;
        }
        let s = self.size();
        let num = self.numerator.iter().rev().fold(linalg::zeros(s, s), |acc, c| acc * z + c);
        Some(num / q)
    }
}

#[derive(Debug, Clone)]
pub struct RationalEvaluation {
    /// `(s n) x (s n)`; block `(i, j)` is `F_ij(A)`.
    pub value: ComplexMatrix,
    /// Condition number of `q(A)`.
    pub condition: f64,
}

pub fn eval_rational_matrix(f: &RationalMatrixFunction, a: &ComplexMatrix, tol: &Tolerance) -> Result<RationalEvaluation> {
    let n = linalg::ensure_square(a)?;
    let s = f.size();
    let q = f.denominator_poly().eval_matrix(a);
    let condition = linalg::condition_number(&q);
    if !(condition.is_finite() && condition * tol.eq_tol < 1.0) {
        return Err(Error::SingularDenominator { condition });
    }
    let q_inv = q.try_inverse().ok_or(Error::SingularDenominator { condition })?;
    // Horner in (1_s (x) A)
    let lift = linalg::kron(&linalg::identity(s), a);
    let id = linalg::identity(n);
    let num = f.numerator.iter().rev().fold(linalg::zeros(s * n, s * n), |acc, c| acc * &lift + linalg::kron(c, &id));
    let value = num * linalg::kron(&linalg::identity(s), &q_inv);
    Ok(RationalEvaluation { value, condition })
}

#[derive(Debug, Clone)]
pub struct SpectralEntry {
    /// `||F(A)||`.
    pub lhs: f64,
    /// `max ||F(z)||` over the boundary samples.
    pub rhs: f64,
    /// Largest jump of `||F(z)||` between consecutive samples.
    pub slack: f64,
    pub violated: bool,
}

#[derive(Debug, Clone)]
pub struct SpectralReport {
    pub spectral_radius: f64,
    pub sample_radius: f64,
    pub entries: Vec<SpectralEntry>,
    /// Always true: passing a sampled check is evidence, not a proof.
    pub evidence_only: bool,
}

impl SpectralReport {
    pub fn any_violation(&self) -> bool {
        self.entries.iter().any(|e| e.violated)
    }
}

/// Sampled check of `||f(A)|| <= sup_X |f|` for scalar rational functions.
pub fn spectral_set_check(
    a: &ComplexMatrix,
    boundary: &[Complex64],
    functions: &[RationalMatrixFunction],
    tol: &Tolerance,
) -> Result<SpectralReport> {
    if let Some(f) = functions.iter().find(|f| f.size() != 1) {
        return Err(Error::DimensionMismatch(format!("expected scalar functions, got size {}", f.size())));
    }
    complete_spectral_check(a, boundary, functions, tol)
}

/// Sampled check of `||F(A)|| <= sup_X ||F||` for matrix-valued rational functions.
///
/// `boundary` is read as consecutive points of a closed curve; the slack is
/// the largest change of `||F||` between neighbours.
pub fn complete_spectral_check(
    a: &ComplexMatrix,
    boundary: &[Complex64],
    functions: &[RationalMatrixFunction],
    tol: &Tolerance,
) -> Result<SpectralReport> {
    linalg::ensure_square(a)?;
    if boundary.is_empty() {
        return Err(Error::DimensionMismatch("no boundary samples".into()));
    }
    let spectral_radius = linalg::spectral_radius(a)?;
    let sample_radius = boundary.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut entries = Vec::with_capacity(functions.len());
    for f in functions {
        let mut norms = Vec::with_capacity(boundary.len());
        for (index, z) in boundary.iter().enumerate() {
            let value = f.eval(*z).ok_or(Error::PoleOnSample { index })?;
            norms.push(linalg::operator_norm(&value));
        }
        let rhs = norms.iter().cloned().fold(0.0, f64::max);
        let slack = (0..norms.len()).map(|i| (norms[i] - norms[(i + 1) % norms.len()]).abs()).fold(0.0, f64::max);
        let lhs = linalg::operator_norm(&eval_rational_matrix(f, a, tol)?.value);
        let violated = lhs > rhs + slack + tol.eq_tol * (1.0 + rhs);
        entries.push(SpectralEntry { lhs, rhs, slack, violated });
    }
    Ok(SpectralReport { spectral_radius, sample_radius, entries, evidence_only: true })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, diag, identity, real};
    use approx::assert_abs_diff_eq;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn contraction(a: ComplexMatrix) -> Contraction {
        Contraction::new(a, &tol()).unwrap()
    }

    #[test]
    fn halmos_examples() {
        let u = halmos_dilate(&contraction(real(1, 1, &[0.0])));
        assert!(linalg::distance(&u, &real(2, 2, &[0., 1., 1., 0.])) < 1e-15);

        let h = 3f64.sqrt() / 2.0;
        let u = halmos_dilate(&contraction(real(1, 1, &[0.5])));
        assert!(linalg::distance(&u, &real(2, 2, &[0.5, h, h, -0.5])) < 1e-15);

        let rot = real(2, 2, &[0.6, -0.8, 0.8, 0.6]);
        let u = halmos_dilate(&contraction(rot.clone()));
        let expected = linalg::block_matrix(&[vec![rot.clone(), linalg::zeros(2, 2)], vec![linalg::zeros(2, 2), -rot.adjoint()]]);
        assert!(linalg::distance(&u, &expected) < 1e-7);
        assert!(linalg::unitarity_residual(&u) < 1e-12);
    }

    #[test]
    fn non_contraction_rejected() {
        assert!(matches!(Contraction::new(diag(&[1.5]), &tol()), Err(Error::NotContraction { .. })));
        assert!(matches!(Contraction::new(linalg::zeros(1, 2), &tol()), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn one_step_power_dilation_is_halmos() {
        let c = contraction(real(2, 2, &[0.3, 0.4, -0.1, 0.2]));
        let d = sznagy_finite(&c, 1, &tol()).unwrap();
        assert!(linalg::distance(&d.u, &halmos_dilate(&c)) < 1e-15);
        assert!(matches!(sznagy_finite(&c, 0, &tol()), Err(Error::ZeroHorizon)));
    }

    #[test]
    fn zero_contraction_gives_cyclic_shift() {
        let c = contraction(linalg::zeros(2, 2));
        let d = sznagy_finite(&c, 4, &tol()).unwrap();
        for m in 1..=4 {
            assert!(linalg::max_abs(&d.compression(m)) < 1e-15);
        }
        // U^(N+1) returns to the identity
        assert!(linalg::distance(&linalg::matrix_power(&d.u, 5), &identity(10)) < 1e-12);
    }

    #[test]
    fn power_dilation_against_direct_powers() {
        let a = crate::random::contraction(&mut crate::random::rng(3), 3);
        let c = contraction(a.clone());
        let d = sznagy_finite(&c, 6, &tol()).unwrap();
        let r = d.residuals(&a);
        assert_eq!(r.len(), 7);
        assert!(r.iter().all(|&x| x <= 1e-9), "{r:?}");
        // N + 1 is beyond the horizon and generally fails
        let beyond = linalg::distance(&linalg::matrix_power(&a, 7), &d.compression(7));
        assert!(beyond > 1e-6);
    }

    #[test]
    fn von_neumann_examples() {
        let a = real(2, 2, &[0.5, 0.2, 0.0, -0.7]);
        let op = contraction(a);
        for k in 0..5 {
            let mut coeffs = vec![linalg::ZERO; k + 1];
            coeffs[k] = linalg::ONE;
            let r = von_neumann_check(&op, &Polynomial(coeffs), 64, &tol()).unwrap();
            assert!(r.holds);
            assert_abs_diff_eq!(r.rhs, 1.0, epsilon = 1e-12);
        }
        let r = von_neumann_check(&op, &Polynomial(vec![c(2.0, -1.0)]), 16, &tol()).unwrap();
        assert_abs_diff_eq!(r.lhs, 5f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(r.rhs, 5f64.sqrt(), epsilon = 1e-12);
        assert_eq!(r.slack, 0.0);

        // ||I + J|| is the golden ratio
        let j = contraction(real(2, 2, &[0., 1., 0., 0.]));
        let r = von_neumann_check(&j, &Polynomial(vec![linalg::ONE, linalg::ONE]), 8, &tol()).unwrap();
        assert_abs_diff_eq!(r.lhs, (1.0 + 5f64.sqrt()) / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.rhs, 2.0, epsilon = 1e-12);
        assert!(r.holds);

        assert!(matches!(
            von_neumann_check(&j, &Polynomial(vec![linalg::ONE; 4]), 15, &tol()),
            Err(Error::GridTooCoarse { required: 16, .. })
        ));
    }

    #[test]
    fn rational_examples() {
        let a = real(2, 2, &[1., 2., 0., 3.]);
        let z = RationalMatrixFunction::polynomial(&[linalg::ZERO, linalg::ONE]);
        assert!(linalg::distance(&eval_rational_matrix(&z, &a, &tol()).unwrap().value, &a) < 1e-15);

        let inv = RationalMatrixFunction::scalar(&[linalg::ONE], &[linalg::ZERO, linalg::ONE]).unwrap();
        let got = eval_rational_matrix(&inv, &a, &tol()).unwrap().value;
        assert!(linalg::distance(&(&got * &a), &identity(2)) < 1e-12);

        // (z^2 - 1)/(z - 2) at 0 is 1/2 and at 1 is 0
        let f = RationalMatrixFunction::scalar(&[c(-1.0, 0.0), linalg::ZERO, linalg::ONE], &[c(-2.0, 0.0), linalg::ONE]).unwrap();
        let got = eval_rational_matrix(&f, &diag(&[0.0, 1.0]), &tol()).unwrap().value;
        assert!(linalg::distance(&got, &diag(&[0.5, 0.0])) < 1e-15);

        let sing = RationalMatrixFunction::scalar(&[linalg::ONE], &[c(-1.0, 0.0), linalg::ONE]).unwrap();
        assert!(matches!(eval_rational_matrix(&sing, &diag(&[1.0, 0.0]), &tol()), Err(Error::SingularDenominator { .. })));
    }

    #[test]
    fn rational_multiplicativity() {
        let a = crate::random::matrix(&mut crate::random::rng(11), 3, 3) * c(0.3, 0.0);
        let f = RationalMatrixFunction::scalar(&[c(1.0, 0.5), c(-2.0, 0.0), c(0.3, 0.1)], &[c(3.0, 0.0), linalg::ONE]).unwrap();
        let g = RationalMatrixFunction::scalar(&[c(0.0, 1.0), linalg::ONE], &[c(-4.0, 1.0)]).unwrap();
        // fg = (p_f p_g) / (q_f q_g)
        let mul = |x: &[Complex64], y: &[Complex64]| {
            let mut out = vec![linalg::ZERO; x.len() + y.len() - 1];
            for (i, a) in x.iter().enumerate() {
                for (j, b) in y.iter().enumerate() {
                    out[i + j] += a * b;
                }
            }
            out
        };
        let fp: Vec<Complex64> = f.numerator.iter().map(|m| m[(0, 0)]).collect();
        let gp: Vec<Complex64> = g.numerator.iter().map(|m| m[(0, 0)]).collect();
        let fg = RationalMatrixFunction::scalar(&mul(&fp, &gp), &mul(&f.denominator, &g.denominator)).unwrap();
        let lhs = eval_rational_matrix(&fg, &a, &tol()).unwrap().value;
        let rhs = eval_rational_matrix(&f, &a, &tol()).unwrap().value * eval_rational_matrix(&g, &a, &tol()).unwrap().value;
        assert!(linalg::distance(&lhs, &rhs) < 1e-9);
    }

    #[test]
    fn spectral_examples() {
        let disk = unit_circle(256);
        let z = RationalMatrixFunction::polynomial(&[linalg::ZERO, linalg::ONE]);
        let c2 = contraction(real(2, 2, &[0.2, 0.9, 0.0, -0.3]));
        let p = RationalMatrixFunction::polynomial(&[c(0.1, 0.0), c(0.0, 1.0), c(-0.5, 0.0)]);
        let r = spectral_set_check(c2.matrix(), &disk, &[z.clone(), p], &tol()).unwrap();
        assert!(!r.any_violation());
        assert!(r.evidence_only);

        let r = spectral_set_check(&diag(&[0.0, 2.0]), &disk, &[z], &tol()).unwrap();
        assert!(r.entries[0].violated);
        assert_abs_diff_eq!(r.spectral_radius, 2.0, epsilon = 1e-12);

        let pole = RationalMatrixFunction::scalar(&[linalg::ONE], &[c(-1.0, 0.0), linalg::ONE]).unwrap();
        assert!(matches!(
            spectral_set_check(&diag(&[0.0]), &disk, &[pole], &tol()),
            Err(Error::PoleOnSample { index: 0 })
        ));
    }

    #[test]
    fn complete_check_decouples_on_diagonal_functions() {
        let disk = unit_circle(128);
        let a = diag(&[0.0, 2.0]);
        let f1 = [linalg::ZERO, linalg::ONE];
        let f2 = [c(0.5, 0.0)];
        let coeffs = vec![diag(&[0.0, 0.5]), diag(&[1.0, 0.0])];
        let big = RationalMatrixFunction::matrix_polynomial(coeffs).unwrap();
        let r = complete_spectral_check(&a, &disk, &[big], &tol()).unwrap();
        let s1 = spectral_set_check(&a, &disk, &[RationalMatrixFunction::polynomial(&f1)], &tol()).unwrap();
        let s2 = spectral_set_check(&a, &disk, &[RationalMatrixFunction::polynomial(&f2)], &tol()).unwrap();
        assert_eq!(r.entries[0].violated, s1.entries[0].violated || s2.entries[0].violated);
        assert!(r.entries[0].violated);
    }
}
