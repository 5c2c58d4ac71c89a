//! Naimark dilation of finite-outcome POVMs.
//!
//! The isometry `V: H -> C^k (x) H` stacks the square roots of the effects,
//! `V xi = (E_1^{1/2} xi, ..., E_k^{1/2} xi)`, and `Q_i` projects onto the
//! i-th block. Compressing to the span of `Q_i V H` leaves a space of
//! dimension `sum_i rank(E_i)`.

use crate::cp::{self, DilationPair, MatrixMap};
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, Tolerance};

#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    n: usize,
    effects: Vec<ComplexMatrix>,
}

impl Povm {
    /// Checks shapes only; positivity and normalization are [`validate_povm`]'s job.
    pub fn new(effects: Vec<ComplexMatrix>) -> Result<Self> {
        let first = effects.first().ok_or_else(|| Error::InvalidPovm("no effects".into()))?;
        let n = linalg::ensure_square(first)?;
        if effects.iter().any(|e| e.shape() != (n, n)) {
            return Err(Error::DimensionMismatch("effects have different shapes".into()));
        }
        for e in &effects {
            linalg::check_finite(e)?;
        }
        Ok(Povm { n, effects })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    pub fn outcomes(&self) -> usize {
        self.effects.len()
    }

    /// Sum of the effects over a set of outcomes.
    pub fn measure(&self, outcomes: &[usize]) -> ComplexMatrix {
        outcomes.iter().fold(linalg::zeros(self.n, self.n), |acc, &i| acc + &self.effects[i])
    }
}

#[derive(Debug, Clone)]
pub struct PovmReport {
    pub valid: bool,
    pub min_eigenvalues: Vec<f64>,
    /// Indices of effects that fail positivity.
    pub negative_effects: Vec<usize>,
    /// `||sum E_i - 1||`.
    pub sum_residual: f64,
}

pub fn validate_povm(p: &Povm, tol: &Tolerance) -> PovmReport {
    let mut min_eigenvalues = Vec::with_capacity(p.outcomes());
    let mut negative_effects = Vec::new();
    for (i, e) in p.effects.iter().enumerate() {
        let v = linalg::is_psd(e, tol).expect("effects are square");
        min_eigenvalues.push(v.min_eigenvalue);
        if !v.is_psd {
            negative_effects.push(i);
        }
    }
    let sum_residual = linalg::distance(&p.measure(&(0..p.outcomes()).collect::<Vec<_>>()), &linalg::identity(p.n));
    let valid = negative_effects.is_empty() && sum_residual <= tol.eq_tol;
    PovmReport { valid, min_eigenvalues, negative_effects, sum_residual }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NaimarkDilation {
    /// `K_dim x n` isometry.
    pub v: ComplexMatrix,
    /// Mutually orthogonal projections on `K` summing to the identity.
    pub projections: Vec<ComplexMatrix>,
}

impl NaimarkDilation {
    pub fn k_dim(&self) -> usize {
        self.v.nrows()
    }

    /// Columns `Q_i V e_r`.
    pub fn generators(&self) -> ComplexMatrix {
        let n = self.v.ncols();
        let mut out = linalg::zeros(self.k_dim(), self.projections.len() * n);
        for (i, q) in self.projections.iter().enumerate() {
            out.view_mut((0, i * n), (self.k_dim(), n)).copy_from(&(q * &self.v));
        }
        out
    }

    /// Restricts to the span of `Q_i V H`.
    pub fn reduce(&self, tol: &Tolerance) -> NaimarkDilation {
        let basis = linalg::span_basis(&self.generators(), tol);
        NaimarkDilation {
            v: basis.adjoint() * &self.v,
            projections: self.projections.iter().map(|q| basis.adjoint() * q * &basis).collect(),
        }
    }
}

/// Naimark dilation by stacked square roots, reduced to minimal size.
pub fn naimark_dilate(p: &Povm, tol: &Tolerance) -> Result<NaimarkDilation> {
    let report = validate_povm(p, tol);
    if !report.valid {
        return Err(Error::InvalidPovm(format!(
            "negative effects {:?}, sum residual {:e}",
            report.negative_effects, report.sum_residual
        )));
    }
    let (n, k) = (p.n, p.outcomes());
    let mut v = linalg::zeros(k * n, n);
    let mut projections = Vec::with_capacity(k);
    for (i, e) in p.effects.iter().enumerate() {
        v.view_mut((i * n, 0), (n, n)).copy_from(&linalg::sqrt_psd(e, tol)?);
        let mut q = linalg::zeros(k * n, k * n);
        q.view_mut((i * n, i * n), (n, n)).fill_with_identity();
        projections.push(q);
    }
    Ok(NaimarkDilation { v, projections }.reduce(tol))
}

#[derive(Debug, Clone)]
pub struct NaimarkReport {
    /// `max_i ||V* Q_i V - E_i||`.
    pub max_residual: f64,
    pub isometry_residual: f64,
    /// Worst of the projection, orthogonality and resolution-of-identity residuals.
    pub pvm_residual: f64,
    pub passes: bool,
}

pub fn verify_naimark(p: &Povm, d: &NaimarkDilation, tol: &Tolerance) -> Result<NaimarkReport> {
    let k = d.k_dim();
    if d.v.ncols() != p.n || d.projections.len() != p.outcomes() || d.projections.iter().any(|q| q.shape() != (k, k)) {
        return Err(Error::DimensionMismatch("dilation does not match the POVM".into()));
    }
    let max_residual = d
        .projections
        .iter()
        .zip(&p.effects)
        .map(|(q, e)| linalg::distance(&(d.v.adjoint() * q * &d.v), e))
        .fold(0.0, f64::max);
    let isometry_residual = linalg::isometry_residual(&d.v);
    let mut pvm_residual = 0f64;
    let mut total = linalg::zeros(k, k);
    for (i, qi) in d.projections.iter().enumerate() {
        pvm_residual = pvm_residual.max(linalg::projection_residual(qi));
        for qj in &d.projections[i + 1..] {
            pvm_residual = pvm_residual.max(linalg::operator_norm(&(qi * qj)));
        }
        total += qi;
    }
    pvm_residual = pvm_residual.max(linalg::distance(&total, &linalg::identity(k)));
    let passes = max_residual <= tol.eq_tol && isometry_residual <= tol.eq_tol && pvm_residual <= tol.eq_tol;
    Ok(NaimarkReport { max_residual, isometry_residual, pvm_residual, passes })
}

/// The map `a -> sum_i a_ii E_i` on `M_k`; its restriction to the diagonal
/// algebra is the POVM viewed as a positive map on `C^k`.
pub fn povm_map(p: &Povm) -> MatrixMap {
    let k = p.outcomes();
    MatrixMap::from_fn(k, p.n, |a| (0..k).fold(linalg::zeros(p.n, p.n), |acc, i| acc + &p.effects[i] * a[(i, i)]))
        .expect("shapes agree")
}

/// Naimark dilation obtained from the Stinespring dilation of [`povm_map`],
/// restricted to the diagonal subalgebra.
pub fn naimark_via_stinespring(p: &Povm, tol: &Tolerance) -> Result<NaimarkDilation> {
    let phi = povm_map(p);
    let pair: DilationPair = cp::stinespring(&phi, tol)?;
    let k = p.outcomes();
    let n = p.n;
    let mut gens = linalg::zeros(pair.k_dim(), k * n);
    for i in 0..k {
        gens.view_mut((0, i * n), (pair.k_dim(), n)).copy_from(&(pair.rep_unit(i, i) * &pair.v));
    }
    let reduced = cp::compress_to_generators(&pair, &gens, tol);
    Ok(NaimarkDilation { v: reduced.v.clone(), projections: (0..k).map(|i| reduced.rep_unit(i, i).clone()).collect() })
}

/// Unitary `W` with `W V1 = V2` and `W Q1_i = Q2_i W`, by Gram matching on generators.
pub fn match_naimark(d1: &NaimarkDilation, d2: &NaimarkDilation, tol: &Tolerance) -> Result<ComplexMatrix> {
    if d1.projections.len() != d2.projections.len() || d1.v.ncols() != d2.v.ncols() {
        return Err(Error::DimensionMismatch("dilations of different POVMs".into()));
    }
    let (g1, g2) = (d1.generators(), d2.generators());
    let residual = linalg::max_abs(&(g1.adjoint() * &g1 - g2.adjoint() * &g2));
    if residual > tol.eq_tol {
        return Err(Error::CompressionMismatch { residual });
    }
    linalg::intertwiner(&g1, &g2, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, diag, identity};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn trine() -> Povm {
        let effects = (0..3)
            .map(|j| {
                let t = 2.0 * std::f64::consts::PI * j as f64 / 3.0;
                let psi = crate::linalg::ComplexVector::from_vec(vec![c((t / 2.0).cos(), 0.0), c((t / 2.0).sin(), 0.0)]);
                &psi * psi.adjoint() * c(2.0 / 3.0, 0.0)
            })
            .collect();
        Povm::new(effects).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(validate_povm(&Povm::new(vec![identity(2)]).unwrap(), &tol()).valid);
        assert!(validate_povm(&Povm::new(vec![diag(&[0.5, 0.5]), diag(&[0.5, 0.5])]).unwrap(), &tol()).valid);
        let r = validate_povm(&Povm::new(vec![diag(&[2.0, 0.0]), diag(&[-1.0, 1.0])]).unwrap(), &tol());
        assert!(!r.valid);
        assert_eq!(r.negative_effects, vec![1]);
        assert!((r.min_eigenvalues[1] + 1.0).abs() < 1e-12);
        assert!(matches!(naimark_dilate(&Povm::new(vec![diag(&[0.5, 0.5])]).unwrap(), &tol()), Err(Error::InvalidPovm(_))));
        assert!(Povm::new(vec![]).is_err());
    }

    #[test]
    fn pvm_is_its_own_dilation() {
        let p = Povm::new(vec![diag(&[1.0, 0.0, 0.0]), diag(&[0.0, 1.0, 1.0])]).unwrap();
        let d = naimark_dilate(&p, &tol()).unwrap();
        assert_eq!(d.k_dim(), 3);
        assert!(linalg::unitarity_residual(&d.v) < 1e-12);
        let w = &d.v;
        for (q, e) in d.projections.iter().zip(p.effects()) {
            assert!(linalg::distance(&(w.adjoint() * q * w), e) < 1e-12);
        }
    }

    #[test]
    fn trine_needs_three_dimensions() {
        let p = trine();
        assert!(validate_povm(&p, &tol()).valid);
        let d = naimark_dilate(&p, &tol()).unwrap();
        assert_eq!(d.k_dim(), 3);
        assert!(verify_naimark(&p, &d, &tol()).unwrap().passes);
    }

    #[test]
    fn halves_double_the_space() {
        let n = 3;
        let half = identity(n) * c(0.5, 0.0);
        let p = Povm::new(vec![half.clone(), half]).unwrap();
        let d = naimark_dilate(&p, &tol()).unwrap();
        assert_eq!(d.k_dim(), 2 * n);
        assert!(verify_naimark(&p, &d, &tol()).unwrap().passes);
    }

    #[test]
    fn corrupted_dilation_is_caught() {
        let p = Povm::new(vec![diag(&[0.9, 0.2]), diag(&[0.1, 0.8])]).unwrap();
        let mut d = naimark_dilate(&p, &tol()).unwrap();
        assert!(verify_naimark(&p, &d, &tol()).unwrap().passes);
        d.projections.swap(0, 1);
        let r = verify_naimark(&p, &d, &tol()).unwrap();
        assert!(!r.passes);
        assert!(r.max_residual > 0.5);
        assert!(r.pvm_residual < 1e-12);
    }

    #[test]
    fn single_effect_identity() {
        let p = Povm::new(vec![identity(2)]).unwrap();
        let d = NaimarkDilation { v: identity(2), projections: vec![identity(2)] };
        let r = verify_naimark(&p, &d, &tol()).unwrap();
        assert_eq!(r.max_residual, 0.0);
        assert!(r.passes);
    }

    #[test]
    fn stinespring_route_agrees() {
        let p = trine();
        let d1 = naimark_dilate(&p, &tol()).unwrap();
        let d2 = naimark_via_stinespring(&p, &tol()).unwrap();
        assert_eq!(d2.k_dim(), 3);
        assert!(verify_naimark(&p, &d2, &tol()).unwrap().passes);
        let w = match_naimark(&d1, &d2, &tol()).unwrap();
        assert!(linalg::unitarity_residual(&w) < 1e-9);
        assert!(linalg::distance(&(&w * &d1.v), &d2.v) < 1e-9);
        for (q1, q2) in d1.projections.iter().zip(&d2.projections) {
            assert!(linalg::distance(&(&w * q1), &(q2 * &w)) < 1e-9);
        }
    }

    #[test]
    fn subset_additivity() {
        let p = trine();
        let d = naimark_dilate(&p, &tol()).unwrap();
        let q: ComplexMatrix = d.projections[0].clone() + &d.projections[2];
        assert!(linalg::distance(&(d.v.adjoint() * q * &d.v), &p.measure(&[0, 2])) < 1e-12);
    }
}
