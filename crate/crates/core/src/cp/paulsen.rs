//! Paulsen's 2x2 device: an operator space `E` inside `M_n` generates the
//! operator system of block matrices `[[l*1, A], [B*, l*1]]`, `A, B in E`, and
//! a map `phi` on `E` lifts to `[[l*1, phi(A)], [phi(B)*, l*1]]`.
//!
//! Positivity of the lift is tested level by level on positive elements of
//! `M_k` over the system. The extension of the lift to all of `M_2n` is not
//! constructed.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ComplexVector, Tolerance};

use super::LevelVerdict;

#[derive(Debug, Clone)]
pub struct OperatorSpaceSpan {
    n: usize,
    basis: Vec<ComplexMatrix>,
}

fn vectorize(m: &ComplexMatrix) -> ComplexVector {
    ComplexVector::from_iterator(m.len(), m.iter().copied())
}

impl OperatorSpaceSpan {
    pub fn new(n: usize, basis: Vec<ComplexMatrix>, tol: &Tolerance) -> Result<Self> {
        if let Some(bad) = basis.iter().find(|b| b.shape() != (n, n)) {
            return Err(Error::DimensionMismatch(format!("basis element of shape {:?} in M_{n}", bad.shape())));
        }
        let span = OperatorSpaceSpan { n, basis };
        let rank = linalg::span_basis(&span.stacked(), tol).ncols();
        if rank != span.basis.len() {
            return Err(Error::RankDeficient { rank, expected: span.basis.len() });
        }
        Ok(span)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    fn stacked(&self) -> ComplexMatrix {
        let cols: Vec<ComplexVector> = self.basis.iter().map(vectorize).collect();
        if cols.is_empty() {
            return linalg::zeros(self.n * self.n, 0);
        }
        ComplexMatrix::from_columns(&cols)
    }

    /// Coefficients of `a` in the basis; fails when `a` is not in the span.
    pub fn coordinates(&self, a: &ComplexMatrix, tol: &Tolerance) -> Result<Vec<Complex64>> {
        if a.shape() != (self.n, self.n) {
            return Err(Error::DimensionMismatch(format!("element of shape {:?} in M_{}", a.shape(), self.n)));
        }
        let stacked = self.stacked();
        let target = vectorize(a);
        if self.basis.is_empty() {
            return if target.norm() <= tol.eq_tol { Ok(vec![]) } else { Err(Error::NotInSystem("corner is not in the span".into())) };
        }
        // normal equations; the basis is independent so the Gram matrix is invertible
        let gram = stacked.adjoint() * &stacked;
        let rhs = stacked.adjoint() * &target;
        let coeffs = gram
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::RankDeficient { rank: 0, expected: self.basis.len() })?;
        let residual = (&stacked * &coeffs - &target).norm();
        if residual > tol.eq_tol * (1.0 + target.norm()) {
            return Err(Error::NotInSystem(format!("corner is at distance {residual:e} from the span")));
        }
        Ok(coeffs.iter().copied().collect())
    }
}

/// `[[lambda*1, a], [b*, lambda*1]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PaulsenElement {
    pub lambda: Complex64,
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
}

impl PaulsenElement {
    pub fn to_matrix(&self) -> ComplexMatrix {
        let n = self.a.nrows();
        let scalar = linalg::identity(n) * self.lambda;
        linalg::block_matrix(&[vec![scalar.clone(), self.a.clone()], vec![self.b.adjoint(), scalar]])
    }

    /// Reads a `2n x 2n` matrix as a system element.
    pub fn from_matrix(m: &ComplexMatrix, span: &OperatorSpaceSpan, tol: &Tolerance) -> Result<Self> {
        let n = span.n();
        if m.shape() != (2 * n, 2 * n) {
            return Err(Error::DimensionMismatch(format!("{:?} is not {}x{}", m.shape(), 2 * n, 2 * n)));
        }
        let lambda = m[(0, 0)];
        let scalar = linalg::identity(n) * lambda;
        let residual = linalg::max_abs(&(linalg::block(m, 0, 0, n, n) - &scalar))
            .max(linalg::max_abs(&(linalg::block(m, 1, 1, n, n) - &scalar)));
        if residual > tol.eq_tol {
            return Err(Error::NotInSystem("diagonal blocks are not equal scalars".into()));
        }
        let a = linalg::block(m, 0, 1, n, n);
        let b = linalg::block(m, 1, 0, n, n).adjoint();
        span.coordinates(&a, tol)?;
        span.coordinates(&b, tol)?;
        Ok(PaulsenElement { lambda, a, b })
    }
}

/// The lifted map on the Paulsen system of `span`, with `phi` given on the basis.
#[derive(Debug, Clone)]
pub struct PaulsenLift {
    span: OperatorSpaceSpan,
    images: Vec<ComplexMatrix>,
    m: usize,
}

pub fn paulsen_lift(span: OperatorSpaceSpan, images: Vec<ComplexMatrix>) -> Result<PaulsenLift> {
    if images.len() != span.basis().len() {
        return Err(Error::DimensionMismatch(format!("{} images for {} basis elements", images.len(), span.basis().len())));
    }
    let m = images.first().map(|x| x.nrows()).unwrap_or(span.n());
    if images.iter().any(|x| x.shape() != (m, m)) {
        return Err(Error::DimensionMismatch("images have different shapes".into()));
    }
    Ok(PaulsenLift { span, images, m })
}

impl PaulsenLift {
    pub fn span(&self) -> &OperatorSpaceSpan {
        &self.span
    }

    /// Dimension of the space `phi` maps into.
    pub fn target_dim(&self) -> usize {
        self.m
    }

    pub fn phi(&self, a: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
        let coeffs = self.span.coordinates(a, tol)?;
        Ok(coeffs.iter().zip(&self.images).fold(linalg::zeros(self.m, self.m), |acc, (c, img)| acc + img * *c))
    }

    pub fn apply(&self, x: &PaulsenElement, tol: &Tolerance) -> Result<ComplexMatrix> {
        let scalar = linalg::identity(self.m) * x.lambda;
        let pa = self.phi(&x.a, tol)?;
        let pb = self.phi(&x.b, tol)?;
        Ok(linalg::block_matrix(&[vec![scalar.clone(), pa], vec![pb.adjoint(), scalar]]))
    }

    /// Level-k positivity: for a positive `k x k` matrix `X` over the system,
    /// checks that `[lift(x_ij)]` is positive.
    pub fn level_check(&self, grid: &[Vec<PaulsenElement>], tol: &Tolerance) -> Result<LevelVerdict> {
        let k = grid.len();
        if grid.iter().any(|row| row.len() != k) {
            return Err(Error::DimensionMismatch("element grid is not square".into()));
        }
        let input: Vec<Vec<ComplexMatrix>> = grid.iter().map(|row| row.iter().map(PaulsenElement::to_matrix).collect()).collect();
        let input = linalg::block_matrix(&input);
        let v = linalg::is_psd(&input, tol)?;
        if !v.is_psd {
            return Err(Error::NotPsd { min_eigenvalue: v.min_eigenvalue });
        }
        let mut images = Vec::with_capacity(k);
        for row in grid {
            images.push(row.iter().map(|x| self.apply(x, tol)).collect::<Result<Vec<_>>>()?);
        }
        let out = linalg::block_matrix(&images);
        Ok(LevelVerdict::from_psd(linalg::is_psd(&out, tol)?, 2 * self.m))
    }

    /// Level-k test on `[[t*1, A], [A*, t*1]]` with `t = ||A||` and `A` a
    /// `k x k` matrix over `E`. This element is positive, and its image is
    /// positive exactly when the k-th amplification of `phi` does not expand `A`.
    pub fn contractive_probe(&self, corners: &[Vec<ComplexMatrix>], tol: &Tolerance) -> Result<LevelVerdict> {
        let k = corners.len();
        if corners.iter().any(|row| row.len() != k) {
            return Err(Error::DimensionMismatch("corner grid is not square".into()));
        }
        let t = linalg::operator_norm(&linalg::block_matrix(corners));
        let grid: Vec<Vec<PaulsenElement>> = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| PaulsenElement {
                        lambda: if i == j { linalg::c(t, 0.0) } else { linalg::ZERO },
                        a: corners[i][j].clone(),
                        b: corners[j][i].clone(),
                    })
                    .collect()
            })
            .collect();
        self.level_check(&grid, tol)
    }
}
