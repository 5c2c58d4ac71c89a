//! Linear maps on matrix algebras and complete positivity.
//!
//! A [`MatrixMap`] `phi: M_d -> M_n` is stored by its values on the matrix
//! units `e_pq` together with its Choi matrix, the `d x d` block matrix whose
//! `(p, q)` block is `phi(e_pq)`.

mod paulsen;
mod stinespring;

pub use paulsen::{paulsen_lift, OperatorSpaceSpan, PaulsenElement, PaulsenLift};
pub use stinespring::{
    compress_to_generators, kraus_pair, match_minimal, minimal_reduce, stinespring, DilationPair, StinespringSpace,
};

use crate::error::{Error, Result};
use crate::linalg::{self, matrix_unit, ComplexMatrix, ComplexVector, Tolerance};

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixMap {
    d: usize,
    n: usize,
    images: Vec<ComplexMatrix>,
    choi: ComplexMatrix,
}

/// Choi matrix of the map with the given values on matrix units (row-major `p * d + q`).
pub fn choi_of(d: usize, n: usize, images: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    if images.len() != d * d {
        return Err(Error::DimensionMismatch(format!("{} images for a map on {d}x{d} matrices", images.len())));
    }
    if let Some(bad) = images.iter().find(|m| m.shape() != (n, n)) {
        return Err(Error::DimensionMismatch(format!("image of shape {:?}, expected {n}x{n}", bad.shape())));
    }
    let mut choi = linalg::zeros(d * n, d * n);
    for p in 0..d {
        for q in 0..d {
            choi.view_mut((p * n, q * n), (n, n)).copy_from(&images[p * d + q]);
        }
    }
    Ok(choi)
}

/// Inverse of [`choi_of`].
pub fn map_of_choi(choi: &ComplexMatrix, d: usize, n: usize) -> Result<MatrixMap> {
    if choi.shape() != (d * n, d * n) {
        return Err(Error::DimensionMismatch(format!("Choi matrix {:?} for d = {d}, n = {n}", choi.shape())));
    }
    linalg::check_finite(choi)?;
    let images = (0..d * d).map(|i| linalg::block(choi, i / d, i % d, n, n)).collect();
    Ok(MatrixMap { d, n, images, choi: choi.clone() })
}

impl MatrixMap {
    pub fn from_images(d: usize, n: usize, images: Vec<ComplexMatrix>) -> Result<Self> {
        let choi = choi_of(d, n, &images)?;
        for m in &images {
            linalg::check_finite(m)?;
        }
        Ok(MatrixMap { d, n, images, choi })
    }

    /// `phi(a) = sum_i K_i* a K_i` with each `K_i` of shape `d x n`.
    pub fn from_kraus(kraus: &[ComplexMatrix]) -> Result<Self> {
        let (d, n) = kraus.first().map(|k| k.shape()).ok_or_else(|| Error::DimensionMismatch("no Kraus operators".into()))?;
        if kraus.iter().any(|k| k.shape() != (d, n)) {
            return Err(Error::DimensionMismatch("Kraus operators have different shapes".into()));
        }
        let images = (0..d * d)
            .map(|i| {
                let e = matrix_unit(d, i / d, i % d);
                kraus.iter().map(|k| k.adjoint() * &e * k).sum()
            })
            .collect();
        Self::from_images(d, n, images)
    }

    /// Builds a map by evaluating `f` on matrix units.
    pub fn from_fn(d: usize, n: usize, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Result<Self> {
        Self::from_images(d, n, (0..d * d).map(|i| f(&matrix_unit(d, i / d, i % d))).collect())
    }

    pub fn identity(d: usize) -> Self {
        Self::from_fn(d, d, |a| a.clone()).expect("shapes agree")
    }

    pub fn transpose(d: usize) -> Self {
        Self::from_fn(d, d, |a| a.transpose()).expect("shapes agree")
    }

    pub fn zero(d: usize, n: usize) -> Self {
        Self::from_fn(d, n, |_| linalg::zeros(n, n)).expect("shapes agree")
    }

    /// The completely depolarizing map `a -> tr(a)/d * 1`.
    pub fn depolarizing(d: usize) -> Self {
        Self::from_fn(d, d, |a| linalg::identity(d) * (a.trace() / d as f64)).expect("shapes agree")
    }

    /// `a -> W* a W` for a `d x n` matrix `W`.
    pub fn conjugation(w: &ComplexMatrix) -> Self {
        Self::from_kraus(std::slice::from_ref(w)).expect("single Kraus operator")
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn images(&self) -> &[ComplexMatrix] {
        &self.images
    }

    pub fn image(&self, p: usize, q: usize) -> &ComplexMatrix {
        &self.images[p * self.d + q]
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    pub fn apply(&self, a: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(a.shape(), (self.d, self.d), "argument does not match the source algebra");
        let mut out = linalg::zeros(self.n, self.n);
        for p in 0..self.d {
            for q in 0..self.d {
                let coeff = a[(p, q)];
                if coeff != linalg::ZERO {
                    out += self.image(p, q) * coeff;
                }
            }
        }
        out
    }

    pub fn is_hermiticity_preserving(&self, tol: &Tolerance) -> bool {
        linalg::hermitian_defect(&self.choi) <= tol.eq_tol
    }

    /// `other` after `self`.
    pub fn then(&self, other: &MatrixMap) -> Result<MatrixMap> {
        if other.d != self.n {
            return Err(Error::DimensionMismatch(format!("cannot compose M_{} -> M_{} with M_{} -> M_{}", self.d, self.n, other.d, other.n)));
        }
        MatrixMap::from_images(self.d, other.n, self.images.iter().map(|m| other.apply(m)).collect())
    }

    pub fn add(&self, other: &MatrixMap) -> Result<MatrixMap> {
        if (self.d, self.n) != (other.d, other.n) {
            return Err(Error::DimensionMismatch("maps act between different algebras".into()));
        }
        MatrixMap::from_images(self.d, self.n, self.images.iter().zip(&other.images).map(|(a, b)| a + b).collect())
    }

    /// Largest `||phi(e_pq) - other(e_pq)||`.
    pub fn distance(&self, other: &MatrixMap) -> f64 {
        self.images.iter().zip(&other.images).map(|(a, b)| linalg::distance(a, b)).fold(0.0, f64::max)
    }
}

/// Verdict of a positivity test on an assembled block matrix.
#[derive(Debug, Clone)]
pub struct LevelVerdict {
    pub is_positive: bool,
    pub min_eigenvalue: f64,
    /// On failure, the block vector `(xi_1, ..., xi_k)` with a negative form value.
    pub witness: Option<Vec<ComplexVector>>,
}

impl LevelVerdict {
    pub(crate) fn from_psd(v: linalg::PsdVerdict, block: usize) -> Self {
        let witness = (!v.is_psd).then(|| {
            let k = if block == 0 { 0 } else { v.witness.len() / block };
            (0..k).map(|i| v.witness.rows(i * block, block).into_owned()).collect()
        });
        LevelVerdict { is_positive: v.is_psd, min_eigenvalue: v.min_eigenvalue, witness }
    }
}

/// Positivity of the block matrix `[phi(a_i* a_j)]` for the given elements.
pub fn cp_level_check(phi: &MatrixMap, elements: &[ComplexMatrix], tol: &Tolerance) -> Result<LevelVerdict> {
    if let Some(bad) = elements.iter().find(|a| a.shape() != (phi.d, phi.d)) {
        return Err(Error::DimensionMismatch(format!("element of shape {:?} for M_{}", bad.shape(), phi.d)));
    }
    let blocks: Vec<Vec<ComplexMatrix>> = elements
        .iter()
        .map(|ai| elements.iter().map(|aj| phi.apply(&(ai.adjoint() * aj))).collect())
        .collect();
    let m = linalg::block_matrix(&blocks);
    Ok(LevelVerdict::from_psd(linalg::is_psd(&m, tol)?, phi.n))
}

/// All `d^2` matrix units of `M_d`, row-major.
pub fn matrix_units(d: usize) -> Vec<ComplexMatrix> {
    (0..d * d).map(|i| matrix_unit(d, i / d, i % d)).collect()
}

#[derive(Debug, Clone)]
pub struct CpVerdict {
    pub is_cp: bool,
    pub min_eigenvalue: f64,
    /// Eigenvector of the Choi matrix for `min_eigenvalue`.
    pub witness: ComplexVector,
}

/// Complete positivity through positivity of the Choi matrix.
pub fn is_completely_positive(phi: &MatrixMap, tol: &Tolerance) -> CpVerdict {
    let v = linalg::is_psd(&phi.choi, tol).expect("Choi matrix is square");
    CpVerdict { is_cp: v.is_psd, min_eigenvalue: v.min_eigenvalue, witness: v.witness }
}

/// Kraus operators (`d x n` each) read off the Choi eigendecomposition.
///
/// With `choi = F* F`, row `k` of `F` reshaped row-major is `K_k`, and
/// `phi(a) = sum_k K_k* a K_k`. The count equals the numerical Choi rank.
pub fn kraus_of(phi: &MatrixMap, tol: &Tolerance) -> Result<Vec<ComplexMatrix>> {
    let verdict = is_completely_positive(phi, tol);
    if !verdict.is_cp {
        return Err(Error::NotCompletelyPositive { min_eigenvalue: verdict.min_eigenvalue });
    }
    let f = linalg::gram_factor(&phi.choi, tol)?;
    let (d, n) = (phi.d, phi.n);
    Ok((0..f.rank).map(|k| ComplexMatrix::from_fn(d, n, |p, r| f.factor[(k, p * n + r)])).collect())
}
