//! Hilbert spaces generated by positive definite kernels on finite sets.
//!
//! A kernel `u` on points `x_1..x_m` is stored by its Gram matrix
//! `gram[i][j] = u(x_i, x_j)`. The embedding `f` into `H(u)` is minimal and
//! satisfies `<f(x_i), f(x_j)> = u(x_i, x_j)` with the inner product linear in
//! the first slot. Kernel-preserving point maps act on `H(u)` as isometries,
//! and bijections as unitaries, functorially.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ComplexVector, Tolerance};

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteKernel {
    points: Vec<String>,
    gram: ComplexMatrix,
}

impl FiniteKernel {
    pub fn new(points: Vec<String>, gram: ComplexMatrix) -> Result<Self> {
        let m = linalg::ensure_square(&gram)?;
        if points.len() != m {
            return Err(Error::DimensionMismatch(format!("{} point labels for a {m}x{m} Gram matrix", points.len())));
        }
        linalg::check_finite(&gram)?;
        Ok(FiniteKernel { points, gram })
    }

    /// Kernel on points labelled `x0, x1, ...`.
    pub fn from_gram(gram: ComplexMatrix) -> Result<Self> {
        let labels = (0..gram.nrows()).map(|i| format!("x{i}")).collect();
        Self::new(labels, gram)
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn gram(&self) -> &ComplexMatrix {
        &self.gram
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn value(&self, i: usize, j: usize) -> Complex64 {
        self.gram[(i, j)]
    }
}

/// The quadratic form `sum_{k,j} u(x_k, x_j) conj(l_j) l_k`.
pub fn kernel_form(gram: &ComplexMatrix, coefficients: &[Complex64]) -> Complex64 {
    let mut s = linalg::ZERO;
    for (k, lk) in coefficients.iter().enumerate() {
        for (j, lj) in coefficients.iter().enumerate() {
            s += gram[(k, j)] * lj.conj() * lk;
        }
    }
    s
}

#[derive(Debug, Clone)]
pub struct KernelVerdict {
    pub is_positive: bool,
    pub min_eigenvalue: f64,
    /// Coefficients making the kernel form negative, when there are any.
    pub witness: Option<Vec<Complex64>>,
}

pub fn validate_kernel(k: &FiniteKernel, tol: &Tolerance) -> Result<KernelVerdict> {
    let v = linalg::is_psd(&k.gram, tol)?;
    // the form is mu* G mu with mu = conj(lambda)
    let witness = (!v.is_psd).then(|| normalize_phase(v.witness.iter().map(|z| z.conj()).collect()));
    Ok(KernelVerdict { is_positive: v.is_psd, min_eigenvalue: v.min_eigenvalue, witness })
}

/// Rotates a vector so that its largest component is real and positive.
fn normalize_phase(mut v: Vec<Complex64>) -> Vec<Complex64> {
    if let Some(big) = v.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())) {
        if big.norm() > 0.0 {
            let phase = big.conj() / big.norm();
            v.iter_mut().for_each(|z| *z *= phase);
        }
    }
    v
}

/// A minimal feature map `x_j -> features.column(j)` for a kernel.
#[derive(Debug, Clone)]
pub struct FeatureEmbedding {
    pub kernel: FiniteKernel,
    /// `r x m`; column `j` is `f(x_j)`.
    pub features: ComplexMatrix,
}

impl FeatureEmbedding {
    pub fn dim(&self) -> usize {
        self.features.nrows()
    }

    pub fn feature(&self, j: usize) -> ComplexVector {
        self.features.column(j).into_owned()
    }

    /// Recomputed kernel `<f(x_i), f(x_j)>`.
    pub fn reproduced_gram(&self) -> ComplexMatrix {
        // <f_i, f_j> = sum_k f[k,i] conj(f[k,j]) = (f^T conj(f))[i][j]
        self.features.transpose() * self.features.conjugate()
    }

    pub fn round_trip_residual(&self) -> f64 {
        linalg::max_abs(&(self.reproduced_gram() - self.kernel.gram()))
    }
}

/// Builds `H(u)` as the quotient of the free space on the points by the null
/// vectors of the kernel form, realized through a truncated eigen-factorization.
pub fn build_embedding(k: &FiniteKernel, tol: &Tolerance) -> Result<FeatureEmbedding> {
    let verdict = validate_kernel(k, tol)?;
    if !verdict.is_positive {
        return Err(Error::InvalidKernel { min_eigenvalue: verdict.min_eigenvalue });
    }
    let factor = linalg::gram_factor(&k.gram, tol)?.factor;
    // Rotate F into upper-trapezoidal form, leading entries real and
    // nonnegative, so the embedding does not depend on the eigensolver's
    // choice of basis inside degenerate eigenspaces.
    let mut r = if factor.nrows() == 0 { factor } else { factor.qr().r() };
    for row in 0..r.nrows() {
        if let Some(lead) = r.row(row).iter().find(|z| z.norm() > tol.rank_tol).copied() {
            let phase = lead.conj() / lead.norm();
            r.row_mut(row).apply(|z| *z *= phase);
        }
    }
    // F* F = G gives columns with <F_i, F_j> = G[j][i]; conjugating fixes the order
    Ok(FeatureEmbedding { kernel: k.clone(), features: r.conjugate() })
}

/// A point map between kernels.
#[derive(Debug, Clone)]
pub struct KernelMorphism {
    pub source: FiniteKernel,
    pub target: FiniteKernel,
    pub point_map: Vec<usize>,
}

impl KernelMorphism {
    pub fn new(source: FiniteKernel, target: FiniteKernel, point_map: Vec<usize>) -> Result<Self> {
        if point_map.len() != source.len() {
            return Err(Error::DimensionMismatch(format!(
                "point map has {} entries for {} source points",
                point_map.len(),
                source.len()
            )));
        }
        if let Some(&bad) = point_map.iter().find(|&&j| j >= target.len()) {
            return Err(Error::DimensionMismatch(format!("point map sends into index {bad} of a {}-point target", target.len())));
        }
        Ok(KernelMorphism { source, target, point_map })
    }

    /// `max |u2(phi x, phi y) - u1(x, y)|`.
    pub fn preservation_residual(&self) -> f64 {
        let m = self.source.len();
        let mut worst = 0f64;
        for i in 0..m {
            for j in 0..m {
                let d = self.target.value(self.point_map[i], self.point_map[j]) - self.source.value(i, j);
                worst = worst.max(d.norm());
            }
        }
        worst
    }
}

/// The unique isometry `U: H(u1) -> H(u2)` with `U f1(x) = f2(phi(x))`.
pub fn morphism_isometry(
    m: &KernelMorphism,
    e1: &FeatureEmbedding,
    e2: &FeatureEmbedding,
    tol: &Tolerance,
) -> Result<ComplexMatrix> {
    if e1.kernel.gram() != m.source.gram() || e2.kernel.gram() != m.target.gram() {
        return Err(Error::DimensionMismatch("embeddings were not built from the morphism's kernels".into()));
    }
    let residual = m.preservation_residual();
    if residual > tol.eq_tol {
        return Err(Error::MorphismViolation { residual });
    }
    let images = e2.features.select_columns(m.point_map.iter());
    let u = linalg::intertwiner(&e1.features, &images, tol)?;
    let residual = linalg::isometry_residual(&u);
    if residual > tol.eq_tol * 10.0 {
        return Err(Error::ConstructionCheck { what: "morphism isometry", residual });
    }
    Ok(u)
}

pub fn check_permutation(perm: &[usize], m: usize) -> Result<()> {
    if perm.len() != m {
        return Err(Error::InvalidPermutation(format!("{} entries for {m} points", perm.len())));
    }
    let mut seen = vec![false; m];
    for &j in perm {
        if j >= m || std::mem::replace(&mut seen[j], true) {
            return Err(Error::InvalidPermutation(format!("{perm:?} is not a bijection of 0..{m}")));
        }
    }
    Ok(())
}

/// The unitary `U_phi` on `H(u)` induced by a kernel-preserving bijection.
pub fn automorphism_unitary(e: &FeatureEmbedding, bijection: &[usize], tol: &Tolerance) -> Result<ComplexMatrix> {
    let m = e.kernel.len();
    check_permutation(bijection, m)?;
    let gram = e.kernel.gram();
    let mut residual = 0f64;
    for i in 0..m {
        for j in 0..m {
            residual = residual.max((gram[(bijection[i], bijection[j])] - gram[(i, j)]).norm());
        }
    }
    if residual > tol.eq_tol {
        return Err(Error::MorphismViolation { residual });
    }
    let images = e.features.select_columns(bijection.iter());
    linalg::intertwiner(&e.features, &images, tol)
}

/// The unitary relating two minimal feature maps of the same kernel.
pub fn embedding_isomorphism(e1: &FeatureEmbedding, e2: &FeatureEmbedding, tol: &Tolerance) -> Result<ComplexMatrix> {
    if e1.features.ncols() != e2.features.ncols() {
        return Err(Error::DimensionMismatch("embeddings have different point counts".into()));
    }
    let residual = linalg::max_abs(&(e1.reproduced_gram() - e2.reproduced_gram()));
    if residual > tol.eq_tol {
        return Err(Error::MorphismViolation { residual });
    }
    linalg::intertwiner(&e1.features, &e2.features, tol)
}

/// The exponential kernel `u(z, w) = exp(<z, w>)` on a finite vector sample.
pub fn exp_kernel(vectors: &[ComplexVector]) -> Result<FiniteKernel> {
    let m = vectors.len();
    if let Some(first) = vectors.first() {
        if vectors.iter().any(|v| v.len() != first.len()) {
            return Err(Error::DimensionMismatch("sample vectors have different lengths".into()));
        }
    }
    let gram = ComplexMatrix::from_fn(m, m, |i, j| linalg::inner(&vectors[i], &vectors[j]).exp());
    let labels = (0..m).map(|i| format!("z{i}")).collect();
    FiniteKernel::new(labels, gram)
}

#[derive(Debug, Clone)]
pub struct SecondQuantization {
    /// `permutation[i] = j` when `U z_i = z_j`.
    pub permutation: Vec<usize>,
    pub gamma: ComplexMatrix,
}

/// `Gamma(U)` on the span of the exponential vectors `e^z`, `z` in the sample.
///
/// The sample must be closed under `U`; the induced permutation is found by
/// nearest-neighbour matching within `eq_tol` and must be unambiguous.
pub fn second_quantize(
    e: &FeatureEmbedding,
    samples: &[ComplexVector],
    u: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<SecondQuantization> {
    let expected = exp_kernel(samples)?;
    if expected.len() != e.kernel.len() || linalg::max_abs(&(expected.gram() - e.kernel.gram())) > tol.eq_tol {
        return Err(Error::DimensionMismatch("embedding was not built from the exponential kernel of these samples".into()));
    }
    if let Some(z) = samples.first() {
        if u.shape() != (z.len(), z.len()) {
            return Err(Error::DimensionMismatch(format!("unitary is {:?}, samples have length {}", u.shape(), z.len())));
        }
    }
    let residual = linalg::unitarity_residual(u);
    if residual > tol.eq_tol {
        return Err(Error::NotUnitary { residual });
    }
    let mut permutation = Vec::with_capacity(samples.len());
    for (i, z) in samples.iter().enumerate() {
        let image = u * z;
        let hits: Vec<usize> = samples
            .iter()
            .enumerate()
            .filter(|(_, w)| (&image - *w).norm() <= tol.eq_tol)
            .map(|(j, _)| j)
            .collect();
        match hits.as_slice() {
            [] => return Err(Error::NotClosed { index: i, image: image.iter().copied().collect() }),
            [j] => permutation.push(*j),
            _ => return Err(Error::AmbiguousMatch { index: i, candidates: hits.len() }),
        }
    }
    let gamma = automorphism_unitary(e, &permutation, tol)?;
    Ok(SecondQuantization { permutation, gamma })
}
