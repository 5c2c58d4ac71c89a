//! Dilation pairs `(V, pi)` with `phi(a) = V* pi(a) V`.
//!
//! [`stinespring`] follows the classical construction literally. The
//! algebraic tensor product `M_d (x) C^n` has basis `e_pq (x) e_r`, indexed
//! `(p * d + q) * n + r`, and carries the form
//! `<a (x) xi, b (x) eta> = <phi(b* a) xi, eta>`. Its Gram matrix is factored
//! by eigenvalue truncation, which performs the quotient by the null space in
//! one step; no completion is needed in finite dimensions. Left
//! multiplication descends to the quotient because it maps null vectors to
//! null vectors, and `V xi` is the class of `1 (x) xi`.

use crate::error::{Error, Result};
use crate::linalg::{self, matrix_unit, ComplexMatrix, ComplexVector, Tolerance};

use super::{is_completely_positive, kraus_of, MatrixMap};

#[derive(Debug, Clone, PartialEq)]
pub struct DilationPair {
    pub d: usize,
    pub n: usize,
    /// `pi(e_pq)` on `K`, row-major in `(p, q)`.
    pub rep_images: Vec<ComplexMatrix>,
    /// `K_dim x n`.
    pub v: ComplexMatrix,
}

impl DilationPair {
    pub fn k_dim(&self) -> usize {
        self.v.nrows()
    }

    pub fn rep_unit(&self, p: usize, q: usize) -> &ComplexMatrix {
        &self.rep_images[p * self.d + q]
    }

    pub fn rep(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let mut out = linalg::zeros(self.k_dim(), self.k_dim());
        for p in 0..self.d {
            for q in 0..self.d {
                out += self.rep_unit(p, q) * a[(p, q)];
            }
        }
        out
    }

    /// `a -> V* pi(a) V` as a map.
    pub fn compression(&self) -> MatrixMap {
        let images = self.rep_images.iter().map(|r| self.v.adjoint() * r * &self.v).collect();
        MatrixMap::from_images(self.d, self.n, images).expect("shapes agree")
    }

    /// `max_pq ||phi(e_pq) - V* pi(e_pq) V||`.
    pub fn dilation_residual(&self, phi: &MatrixMap) -> f64 {
        self.compression().distance(phi)
    }

    /// `| ||V||^2 - ||phi(1)|| |`.
    pub fn norm_residual(&self, phi: &MatrixMap) -> f64 {
        let v = linalg::operator_norm(&self.v);
        let unit = phi.apply(&linalg::identity(self.d));
        (v * v - linalg::operator_norm(&unit)).abs()
    }

    /// Worst violation of the *-representation laws on matrix units.
    pub fn representation_residual(&self) -> f64 {
        let d = self.d;
        let k = self.k_dim();
        let mut worst = 0f64;
        let mut unit = linalg::zeros(k, k);
        for p in 0..d {
            unit += self.rep_unit(p, p);
            for q in 0..d {
                worst = worst.max(linalg::distance(&self.rep_unit(p, q).adjoint(), self.rep_unit(q, p)));
                for r in 0..d {
                    for s in 0..d {
                        let prod = self.rep_unit(p, q) * self.rep_unit(r, s);
                        let expected = if q == r { self.rep_unit(p, s).clone() } else { linalg::zeros(k, k) };
                        worst = worst.max(linalg::distance(&prod, &expected));
                    }
                }
            }
        }
        worst.max(linalg::distance(&unit, &linalg::identity(k)))
    }

    /// Columns `pi(e_pq) V e_r`, the generating set of the pair.
    pub fn generators(&self) -> ComplexMatrix {
        let blocks: Vec<ComplexMatrix> = self.rep_images.iter().map(|r| r * &self.v).collect();
        let mut out = linalg::zeros(self.k_dim(), blocks.len() * self.n);
        for (i, b) in blocks.iter().enumerate() {
            out.view_mut((0, i * self.n), (self.k_dim(), self.n)).copy_from(b);
        }
        out
    }

    pub fn span_rank(&self, tol: &Tolerance) -> usize {
        linalg::span_basis(&self.generators(), tol).ncols()
    }

    pub fn is_minimal(&self, tol: &Tolerance) -> bool {
        self.span_rank(tol) == self.k_dim()
    }
}

/// The pre-quotient space `M_d (x) C^n` with its semi-inner product.
#[derive(Debug, Clone)]
pub struct StinespringSpace {
    pub d: usize,
    pub n: usize,
    /// `gram[i][j] = <basis_i, basis_j>`, linear in the first slot.
    pub gram: ComplexMatrix,
}

impl StinespringSpace {
    pub fn new(phi: &MatrixMap) -> Self {
        let (d, n) = (phi.d(), phi.n());
        let units = super::matrix_units(d);
        let m = d * d * n;
        let mut gram = linalg::zeros(m, m);
        for (alpha, a) in units.iter().enumerate() {
            for (beta, b) in units.iter().enumerate() {
                // <a (x) e_r, b (x) e_s> = <phi(b* a) e_r, e_s> = phi(b* a)[s][r]
                let val = phi.apply(&(b.adjoint() * a));
                for r in 0..n {
                    for s in 0..n {
                        gram[(alpha * n + r, beta * n + s)] = val[(s, r)];
                    }
                }
            }
        }
        StinespringSpace { d, n, gram }
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn index(&self, p: usize, q: usize, r: usize) -> usize {
        (p * self.d + q) * self.n + r
    }

    /// `<zeta, eta>` for coefficient vectors in the tensor basis.
    pub fn form(&self, zeta: &ComplexVector, eta: &ComplexVector) -> num_complex::Complex64 {
        // sum_ij zeta_i conj(eta_j) gram[i][j]
        (zeta.transpose() * &self.gram * eta.conjugate())[(0, 0)]
    }

    /// Left multiplication by `a` on coefficient vectors.
    pub fn left_mul(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let (d, n) = (self.d, self.n);
        let mut l = linalg::zeros(self.dim(), self.dim());
        // a * e_pq = sum_s a[s][p] e_sq
        for p in 0..d {
            for q in 0..d {
                for s in 0..d {
                    let coeff = a[(s, p)];
                    if coeff == linalg::ZERO {
                        continue;
                    }
                    for r in 0..n {
                        l[(self.index(s, q, r), self.index(p, q, r))] += coeff;
                    }
                }
            }
        }
        l
    }

    /// Coefficients of `1 (x) e_r`.
    pub fn unit_vector(&self, r: usize) -> ComplexVector {
        let mut v = ComplexVector::zeros(self.dim());
        for p in 0..self.d {
            v[self.index(p, p, r)] = linalg::ONE;
        }
        v
    }
}

/// Stinespring dilation of a completely positive map.
pub fn stinespring(phi: &MatrixMap, tol: &Tolerance) -> Result<DilationPair> {
    let verdict = is_completely_positive(phi, tol);
    if !verdict.is_cp {
        return Err(Error::NotCompletelyPositive { min_eigenvalue: verdict.min_eigenvalue });
    }
    let space = StinespringSpace::new(phi);
    let factor = linalg::gram_factor(&space.gram, tol).map_err(|e| match e {
        Error::NotPsd { min_eigenvalue } => Error::NotCompletelyPositive { min_eigenvalue },
        other => other,
    })?;
    // quotient map J: coefficients -> K with <J x, J y> = form(x, y)
    let j = factor.factor.conjugate();
    // J J* = diag(lambda), so J^+ = J* diag(1/lambda)
    let mut j_pinv = j.adjoint();
    for (k, lambda) in factor.eigenvalues.iter().enumerate() {
        j_pinv.column_mut(k).scale_mut(1.0 / lambda);
    }
    let (d, n) = (phi.d(), phi.n());
    let rep_images = (0..d * d)
        .map(|i| &j * space.left_mul(&matrix_unit(d, i / d, i % d)) * &j_pinv)
        .collect();
    let v = ComplexMatrix::from_columns(&(0..n).map(|r| &j * space.unit_vector(r)).collect::<Vec<_>>());
    Ok(DilationPair { d, n, rep_images, v })
}

/// The pair `pi(a) = a (x) 1_k`, `V xi = sum_i K_i xi (x) e_i` built from Kraus operators.
pub fn kraus_pair(phi: &MatrixMap, tol: &Tolerance) -> Result<DilationPair> {
    let kraus = kraus_of(phi, tol)?;
    let (d, n, k) = (phi.d(), phi.n(), kraus.len());
    let rep_images = (0..d * d).map(|i| linalg::kron(&matrix_unit(d, i / d, i % d), &linalg::identity(k))).collect();
    let v = ComplexMatrix::from_fn(d * k, n, |row, col| kraus[row % k][(row / k, col)]);
    Ok(DilationPair { d, n, rep_images, v })
}

/// Compresses `(V, pi)` onto the span of the given generator columns.
///
/// The span must be invariant under `pi`, which holds for spans of the form
/// `pi(A) V H` with `A` a *-closed set of matrix units.
pub fn compress_to_generators(pair: &DilationPair, gens: &ComplexMatrix, tol: &Tolerance) -> DilationPair {
    let basis = linalg::span_basis(gens, tol);
    let rep_images = pair.rep_images.iter().map(|r| basis.adjoint() * r * &basis).collect();
    DilationPair { d: pair.d, n: pair.n, rep_images, v: basis.adjoint() * &pair.v }
}

/// Restricts a pair to the closed span of `pi(M_d) V H`.
pub fn minimal_reduce(pair: &DilationPair, tol: &Tolerance) -> DilationPair {
    compress_to_generators(pair, &pair.generators(), tol)
}

/// The unitary `W` with `W V1 = V2` and `W pi1(a) = pi2(a) W` between two
/// minimal pairs of the same map.
pub fn match_minimal(p1: &DilationPair, p2: &DilationPair, tol: &Tolerance) -> Result<ComplexMatrix> {
    if (p1.d, p1.n) != (p2.d, p2.n) {
        return Err(Error::DimensionMismatch(format!("pairs for M_{} -> M_{} and M_{} -> M_{}", p1.d, p1.n, p2.d, p2.n)));
    }
    let (c1, c2) = (p1.compression(), p2.compression());
    let scale = 1.0 + c1.images().iter().map(linalg::operator_norm).fold(0.0, f64::max);
    let residual = c1.distance(&c2);
    if residual > tol.eq_tol * scale {
        return Err(Error::CompressionMismatch { residual });
    }
    for (which, p) in [(1, p1), (2, p2)] {
        let rank = p.span_rank(tol);
        if rank != p.k_dim() {
            return Err(Error::NotMinimal { which, rank, dim: p.k_dim() });
        }
    }
    let w = linalg::intertwiner(&p1.generators(), &p2.generators(), tol)?;
    let residual = linalg::unitarity_residual(&w);
    if residual > tol.eq_tol.sqrt() {
        return Err(Error::ConstructionCheck { what: "matching unitary", residual });
    }
    Ok(w)
}
