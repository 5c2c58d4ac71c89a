//! Seeded random instances for property checks and the `fuzz-*` commands.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::cp::MatrixMap;
use crate::linalg::{self, ComplexMatrix, ComplexVector};
use crate::povm::Povm;
use crate::tower::UcpMap;

pub type DetRng = ChaCha8Rng;

pub fn rng(seed: u64) -> DetRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexVector {
    ComplexVector::from_fn(n, |_, _| gaussian(rng))
}

pub fn matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = matrix(rng, n, n);
    (&g + g.adjoint()).scale(0.5)
}

/// Haar-ish unitary from the QR factorization of a Gaussian matrix.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let qr = matrix(rng, n, n).qr();
    let (q, r) = (qr.q(), qr.r());
    let mut u = q;
    for j in 0..n {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            u.column_mut(j).apply(|x| *x *= phase);
        }
    }
    u
}

/// PSD matrix of the given rank, `B B*` with `B` Gaussian `m x rank`.
pub fn psd<R: Rng + ?Sized>(rng: &mut R, m: usize, rank: usize) -> ComplexMatrix {
    let b = matrix(rng, m, rank);
    &b * b.adjoint()
}

/// Contraction with norm in `(0, 1]`; every fourth draw has norm exactly one.
pub fn contraction<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = matrix(rng, n, n);
    let norm = linalg::operator_norm(&g);
    let target = if rng.random_ratio(1, 4) { 1.0 } else { rng.random_range(0.05..1.0) };
    g * Complex64::new(target / norm, 0.0)
}

/// Normal matrix `U D U*` with eigenvalues in the disk of the given radius.
pub fn normal<R: Rng + ?Sized>(rng: &mut R, n: usize, radius: f64) -> ComplexMatrix {
    let u = unitary(rng, n);
    let diag = ComplexVector::from_fn(n, |_, _| {
        Complex64::from_polar(radius * rng.random::<f64>().sqrt(), rng.random_range(0.0..std::f64::consts::TAU))
    });
    &u * ComplexMatrix::from_diagonal(&diag) * u.adjoint()
}

/// CP map `M_d -> M_n` with `count` Gaussian Kraus operators.
pub fn cp_map<R: Rng + ?Sized>(rng: &mut R, d: usize, n: usize, count: usize) -> MatrixMap {
    let kraus: Vec<ComplexMatrix> = (0..count).map(|_| matrix(rng, d, n)).collect();
    MatrixMap::from_kraus(&kraus).expect("equal shapes")
}

/// Hermiticity-preserving map whose Choi matrix has its smallest eigenvalue
/// at distance at least `gap` from zero, on either side.
pub fn hermiticity_preserving<R: Rng + ?Sized>(rng: &mut R, d: usize, n: usize, gap: f64) -> MatrixMap {
    let dn = d * n;
    let u = unitary(rng, dn);
    let positive = rng.random_bool(0.5);
    let values: Vec<f64> = (0..dn)
        .map(|i| {
            let mag = rng.random_range(gap..1.0 + gap);
            let flip = !positive && (i == 0 || rng.random_bool(0.3));
            if flip { -mag } else { mag }
        })
        .collect();
    let choi = &u * linalg::diag(&values) * u.adjoint();
    let choi = (&choi + choi.adjoint()).scale(0.5);
    crate::cp::map_of_choi(&choi, d, n).expect("shape matches")
}

/// POVM with `k` effects of prescribed random ranks, `E_i = S^{-1/2} B_i B_i* S^{-1/2}`.
pub fn povm<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Povm {
    loop {
        let ranks: Vec<usize> = (0..k).map(|_| rng.random_range(1..=n)).collect();
        if ranks.iter().sum::<usize>() < n {
            continue;
        }
        let parts: Vec<ComplexMatrix> = ranks.iter().map(|&r| psd(rng, n, r)).collect();
        let total: ComplexMatrix = parts.iter().sum();
        if linalg::condition_number(&total) > 1e4 {
            continue;
        }
        let inv_sqrt = linalg::psd_function(&total, |x| 1.0 / x.sqrt());
        let effects = parts.iter().map(|p| &inv_sqrt * p * &inv_sqrt).map(|e| (&e + e.adjoint()).scale(0.5)).collect();
        return Povm::new(effects).expect("equal shapes");
    }
}

/// Unital CP map on `M_n` with `count` Kraus operators normalized so that
/// `sum K_i* K_i = 1`.
pub fn ucp<R: Rng + ?Sized>(rng: &mut R, n: usize, count: usize) -> UcpMap {
    let raw: Vec<ComplexMatrix> = (0..count).map(|_| matrix(rng, n, n)).collect();
    let total: ComplexMatrix = raw.iter().map(|k| k.adjoint() * k).sum();
    let inv_sqrt = linalg::psd_function(&total, |x| 1.0 / x.sqrt());
    let kraus: Vec<ComplexMatrix> = raw.iter().map(|k| k * &inv_sqrt).collect();
    UcpMap::from_kraus(&kraus, &Default::default()).expect("normalized Kraus family")
}

pub fn polynomial<R: Rng + ?Sized>(rng: &mut R, degree: usize) -> Vec<Complex64> {
    (0..=degree).map(|_| gaussian(rng)).collect()
}
