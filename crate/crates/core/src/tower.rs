//! Finite-horizon dilation towers for unital completely positive maps on `M_n`.
//!
//! With Kraus operators `K_1, ..., K_E` and `sum K_i* K_i = 1`, the map
//! `V xi = sum_i (K_i xi) (x) e_i` is an isometry `H -> H (x) E` with
//! `V* (a (x) 1) V = phi(a)`. Stacking copies of `V`,
//!
//! ```text
//! iota_1 = V,    iota_{k+1} = (iota_k (x) 1_E) V,
//! ```
//!
//! gives isometries `H -> H (x) E^k` whose compressions reproduce the powers
//! `phi^k`. New `E` factors are always appended on the right, which is what
//! makes the range projections increase along the ladder.
//!
//! A unital *-endomorphism of a finite-dimensional full matrix algebra is an
//! automorphism, so no finite tower carries a genuine dilating endomorphism.
//! The tower stops at a horizon `N` and reproduces every compression identity
//! up to that horizon, together with the increasing ladder of projections
//! ending at the identity.

use crate::cp::{self, MatrixMap};
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, Tolerance};

/// Largest top-space dimension `n * E^N` built without an explicit override.
pub const DEFAULT_SIZE_CAP: usize = 4096;

#[derive(Debug, Clone)]
pub struct UcpMap {
    map: MatrixMap,
    kraus: Vec<ComplexMatrix>,
}

impl UcpMap {
    /// Checks that `phi` acts on one algebra `M_n`, is completely positive and
    /// unital; the Kraus family is the minimal one read off the Choi matrix.
    pub fn new(map: MatrixMap, tol: &Tolerance) -> Result<Self> {
        if map.d() != map.n() {
            return Err(Error::DimensionMismatch(format!("expected an endomap, got M_{} -> M_{}", map.d(), map.n())));
        }
        let kraus = cp::kraus_of(&map, tol)?;
        let u = UcpMap { map, kraus };
        u.check_unital(tol)?;
        Ok(u)
    }

    /// Uses the given family as is; `E` is its length.
    pub fn from_kraus(kraus: &[ComplexMatrix], tol: &Tolerance) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| Error::DimensionMismatch("empty Kraus family".into()))?;
        linalg::ensure_square(first)?;
        let map = MatrixMap::from_kraus(kraus)?;
        let u = UcpMap { map, kraus: kraus.to_vec() };
        u.check_unital(tol)?;
        Ok(u)
    }

    fn check_unital(&self, tol: &Tolerance) -> Result<()> {
        let n = self.n();
        let total: ComplexMatrix = self.kraus.iter().map(|k| k.adjoint() * k).sum();
        let id = linalg::identity(n);
        let residual = linalg::distance(&total, &id).max(linalg::distance(&self.map.apply(&id), &id));
        if residual > tol.eq_tol {
            return Err(Error::NotUnital { residual });
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.map.n()
    }

    pub fn e_dim(&self) -> usize {
        self.kraus.len()
    }

    pub fn map(&self) -> &MatrixMap {
        &self.map
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn apply(&self, a: &ComplexMatrix) -> ComplexMatrix {
        self.map.apply(a)
    }

    /// `phi^k(a)` by direct iteration.
    pub fn iterate(&self, a: &ComplexMatrix, k: usize) -> ComplexMatrix {
        (0..k).fold(a.clone(), |acc, _| self.apply(&acc))
    }
}

/// `V` with `V[h * E + i, c] = K_i[h, c]`, an isometry `C^n -> C^n (x) C^E`.
pub fn stinespring_isometry(u: &UcpMap) -> ComplexMatrix {
    let (n, e) = (u.n(), u.e_dim());
    ComplexMatrix::from_fn(n * e, n, |row, c| u.kraus[row % e][(row / e, c)])
}

#[derive(Debug, Clone)]
pub struct DilationTower {
    pub horizon: usize,
    pub n: usize,
    pub e_dim: usize,
    pub v: ComplexMatrix,
    /// `iotas[k - 1]` is `iota_k`, of shape `n E^k x n`.
    pub iotas: Vec<ComplexMatrix>,
    /// Largest deviation of `iota_k* (a (x) 1) iota_k` from `phi^k(a)` over
    /// the matrix units, for `k = 1..=N`.
    pub moment_residuals: Vec<f64>,
    /// `||iota_k* iota_k - 1||` for `k = 1..=N`.
    pub isometry_residuals: Vec<f64>,
}

pub fn build_tower(u: &UcpMap, horizon: usize, tol: &Tolerance) -> Result<DilationTower> {
    build_tower_with_cap(u, horizon, DEFAULT_SIZE_CAP, tol)
}

pub fn build_tower_with_cap(u: &UcpMap, horizon: usize, cap: usize, tol: &Tolerance) -> Result<DilationTower> {
    if horizon == 0 {
        return Err(Error::ZeroHorizon);
    }
    let (n, e) = (u.n(), u.e_dim());
    let required = u32::try_from(horizon).ok().and_then(|h| e.checked_pow(h)).and_then(|p| p.checked_mul(n));
    match required {
        Some(r) if r <= cap => {}
        _ => return Err(Error::SizeCapExceeded { required: required.unwrap_or(usize::MAX), cap }),
    }

    let v = stinespring_isometry(u);
    let iotas = iterate_isometry(&v, n, e, horizon);
    assemble(u, v, iotas, tol)
}

fn iterate_isometry(v: &ComplexMatrix, n: usize, e: usize, horizon: usize) -> Vec<ComplexMatrix> {
    let mut iotas: Vec<ComplexMatrix> = vec![v.clone()];
    for _ in 1..horizon {
        let prev = iotas.last().expect("nonempty");
        let rows = prev.nrows();
        // (iota_k (x) 1_E) V: row (x, f) collects iota_k[x, c] V[(c, f), .]
        let next = ComplexMatrix::from_fn(rows * e, n, |row, col| {
            let (x, f) = (row / e, row % e);
            (0..n).map(|c| prev[(x, c)] * v[(c * e + f, col)]).sum()
        });
        iotas.push(next);
    }
    iotas
}

/// Re-checks a tower given as data: `v` must be the isometry of `u`'s Kraus
/// family, each `iota_k` must follow the recursion, and the isometry and
/// moment identities must hold.
pub fn verify_tower(u: &UcpMap, v: &ComplexMatrix, iotas: &[ComplexMatrix], tol: &Tolerance) -> Result<DilationTower> {
    let (n, e) = (u.n(), u.e_dim());
    if iotas.is_empty() {
        return Err(Error::ZeroHorizon);
    }
    let expected = iterate_isometry(&stinespring_isometry(u), n, e, iotas.len());
    if v.shape() != expected[0].shape() || iotas.iter().zip(&expected).any(|(a, b)| a.shape() != b.shape()) {
        return Err(Error::DimensionMismatch("tower shapes do not match the Kraus family".into()));
    }
    let residual = std::iter::once(linalg::distance(v, &expected[0]))
        .chain(iotas.iter().zip(&expected).map(|(a, b)| linalg::distance(a, b)))
        .fold(0.0, f64::max);
    if residual > tol.eq_tol {
        return Err(Error::ConstructionCheck { what: "tower recursion", residual });
    }
    assemble(u, v.clone(), iotas.to_vec(), tol)
}

fn assemble(u: &UcpMap, v: ComplexMatrix, iotas: Vec<ComplexMatrix>, tol: &Tolerance) -> Result<DilationTower> {
    let (n, e, horizon) = (u.n(), u.e_dim(), iotas.len());
    let mut tower = DilationTower { horizon, n, e_dim: e, v, iotas, moment_residuals: vec![], isometry_residuals: vec![] };
    tower.isometry_residuals = tower.iotas.iter().map(linalg::isometry_residual).collect();
    let mut powers: Vec<ComplexMatrix> = cp::matrix_units(n);
    for k in 1..=horizon {
        powers = powers.iter().map(|a| u.apply(a)).collect();
        let grams = tower.leading_grams(k);
        let worst = cp::matrix_units(n)
            .iter()
            .zip(&powers)
            .map(|(a, expected)| linalg::distance(&moment_from_grams(&grams, a), expected))
            .fold(0.0, f64::max);
        tower.moment_residuals.push(worst);
    }

    let iso = tower.isometry_residuals.iter().cloned().fold(0.0, f64::max);
    if iso > tol.eq_tol {
        return Err(Error::ConstructionCheck { what: "tower isometry", residual: iso });
    }
    let moment = tower.moment_residuals.iter().cloned().fold(0.0, f64::max);
    if moment > tol.eq_tol {
        return Err(Error::ConstructionCheck { what: "moment identity", residual: moment });
    }
    Ok(tower)
}

/// `grams[h][h'] = Y_h* Y_h'` where `Y_h` is the block of rows of `iota_k`
/// whose leading `H` index is `h`.
fn moment_from_grams(grams: &[Vec<ComplexMatrix>], a: &ComplexMatrix) -> ComplexMatrix {
    let n = grams.len();
    let mut out = linalg::zeros(n, n);
    for h in 0..n {
        for g in 0..n {
            if a[(h, g)] != linalg::ZERO {
                out += &grams[h][g] * a[(h, g)];
            }
        }
    }
    out
}

impl DilationTower {
    /// `iota_k`, with `iota_0` the identity on `H`.
    pub fn iota(&self, k: usize) -> ComplexMatrix {
        if k == 0 {
            linalg::identity(self.n)
        } else {
            self.iotas[k - 1].clone()
        }
    }

    pub fn top_dim(&self) -> usize {
        self.n * self.e_dim.pow(self.horizon as u32)
    }

    fn leading_grams(&self, k: usize) -> Vec<Vec<ComplexMatrix>> {
        let iota = self.iota(k);
        let tail = iota.nrows() / self.n;
        let blocks: Vec<ComplexMatrix> = (0..self.n).map(|h| iota.rows(h * tail, tail).into_owned()).collect();
        blocks.iter().map(|yh| blocks.iter().map(|yg| yh.adjoint() * yg).collect()).collect()
    }

    /// `iota_k* (a (x) 1_{E^k}) iota_k`, without forming `a (x) 1`.
    pub fn moment(&self, k: usize, a: &ComplexMatrix) -> ComplexMatrix {
        moment_from_grams(&self.leading_grams(k), a)
    }
}

#[derive(Debug, Clone)]
pub struct ProjectionLadder {
    /// `Q_0, ..., Q_N` on `H (x) E^N`.
    pub projections: Vec<ComplexMatrix>,
    pub ranks: Vec<usize>,
    /// `||Q_k^2 - Q_k|| + ||Q_k - Q_k*||` per rung.
    pub projection_residuals: Vec<f64>,
    /// Smallest eigenvalue of `Q_{k+1} - Q_k`, `k = 0..N`.
    pub gaps: Vec<f64>,
    /// `||Q_N - 1||`.
    pub top_residual: f64,
}

impl ProjectionLadder {
    pub fn is_increasing(&self, tol: &Tolerance) -> bool {
        self.gaps.iter().all(|&g| g >= -tol.psd_tol)
    }
}

/// `Q_k = iota_{N-k} iota_{N-k}* (x) 1_{E^k}`; checks `Q_0 <= ... <= Q_N = 1`.
pub fn projection_ladder(t: &DilationTower, tol: &Tolerance) -> Result<ProjectionLadder> {
    let dim = t.top_dim();
    let mut projections = Vec::with_capacity(t.horizon + 1);
    for k in 0..=t.horizon {
        let iota = t.iota(t.horizon - k);
        let range = &iota * iota.adjoint();
        projections.push(linalg::kron(&range, &linalg::identity(t.e_dim.pow(k as u32))));
    }
    let projection_residuals: Vec<f64> = projections.iter().map(linalg::projection_residual).collect();
    let ranks = projections.iter().map(|q| q.trace().re.round().max(0.0) as usize).collect();
    let gaps = projections.windows(2).map(|w| linalg::min_eigenvalue(&(&w[1] - &w[0]))).collect::<Result<Vec<_>>>()?;
    let top_residual = linalg::distance(projections.last().expect("nonempty"), &linalg::identity(dim));

    let proj = projection_residuals.iter().cloned().fold(0.0, f64::max);
    if proj > tol.eq_tol {
        return Err(Error::ConstructionCheck { what: "ladder projections", residual: proj });
    }
    if top_residual > tol.eq_tol {
        return Err(Error::ConstructionCheck { what: "top of ladder", residual: top_residual });
    }
    if let Some(&g) = gaps.iter().find(|&&g| g < -tol.psd_tol) {
        return Err(Error::ConstructionCheck { what: "ladder monotonicity", residual: -g });
    }
    Ok(ProjectionLadder { projections, ranks, projection_residuals, gaps, top_residual })
}
