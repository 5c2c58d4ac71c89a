//! Certificates written by the constructive subcommands, and their verifiers.
//!
//! A verifier trusts nothing but the numbers in the file: it recomputes every
//! residual from the stored matrices and compares it with the stored (or
//! overridden) tolerance.

use serde::{Deserialize, Serialize};

use super::document::{self, Document, InputError, KernelDoc, MapDoc, MatrixDoc, PovmDoc, VectorsDoc};
use super::{Context, Failure, Outcome, Report};
use crate::contraction::{Contraction, PowerDilation};
use crate::cp::DilationPair;
use crate::kernel;
use crate::linalg::{self, ComplexMatrix, Tolerance};
use crate::povm::{self, NaimarkDilation};
use crate::tower::{self, UcpMap};

pub const KINDS: [&str; 8] = [
    "stinespring-certificate",
    "match-certificate",
    "naimark-certificate",
    "unitary-dilation-certificate",
    "ucp-tower-certificate",
    "kernel-embedding-certificate",
    "kernel-morphism-certificate",
    "second-quantization-certificate",
];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairDoc {
    pub d: usize,
    pub n: usize,
    pub k_dim: usize,
    pub rep_images: Vec<MatrixDoc>,
    pub v: MatrixDoc,
}

impl PairDoc {
    pub fn from_pair(p: &DilationPair) -> Self {
        PairDoc { d: p.d, n: p.n, k_dim: p.k_dim(), rep_images: document::matrix_docs(&p.rep_images), v: MatrixDoc::from_matrix(&p.v) }
    }

    pub fn to_pair(&self) -> Result<DilationPair, InputError> {
        let rep_images = document::matrices(&self.rep_images, "rep_images")?;
        let v = self.v.to_matrix("v")?;
        let k = self.k_dim;
        if rep_images.len() != self.d * self.d || rep_images.iter().any(|r| r.shape() != (k, k)) || v.shape() != (k, self.n) {
            return Err(InputError(format!("pair: shapes do not fit d = {}, n = {}, k_dim = {k}", self.d, self.n)));
        }
        Ok(DilationPair { d: self.d, n: self.n, rep_images, v })
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct StinespringCert {
    pub map: MapDoc,
    pub pair: PairDoc,
}

#[derive(Debug, Clone, Deserialize)]
struct MatchCert {
    map: MapDoc,
    first: PairDoc,
    second: PairDoc,
    w: MatrixDoc,
}

#[derive(Debug, Clone, Deserialize)]
struct NaimarkCert {
    povm: PovmDoc,
    v: MatrixDoc,
    projections: Vec<MatrixDoc>,
}

#[derive(Debug, Clone, Deserialize)]
struct UnitaryDilationCert {
    a: MatrixDoc,
    steps: usize,
    u: MatrixDoc,
}

#[derive(Debug, Clone, Deserialize)]
struct TowerCert {
    kraus: Vec<MatrixDoc>,
    horizon: usize,
    v: MatrixDoc,
    iotas: Vec<MatrixDoc>,
}

#[derive(Debug, Clone, Deserialize)]
struct EmbeddingCert {
    kernel: KernelDoc,
    features: MatrixDoc,
}

#[derive(Debug, Clone, Deserialize)]
struct MorphismCert {
    source: KernelDoc,
    target: KernelDoc,
    map: Vec<usize>,
    source_features: MatrixDoc,
    target_features: MatrixDoc,
    u: MatrixDoc,
}

#[derive(Debug, Clone, Deserialize)]
struct SecondQuantizationCert {
    vectors: VectorsDoc,
    unitary: MatrixDoc,
    features: MatrixDoc,
    permutation: Vec<usize>,
    gamma: MatrixDoc,
}

pub struct MatchResiduals {
    pub unitarity: f64,
    /// `||W V1 - V2||`.
    pub link: f64,
    /// `max_pq ||W pi1(e_pq) - pi2(e_pq) W||`.
    pub intertwining: f64,
}

pub fn match_residuals(p1: &DilationPair, p2: &DilationPair, w: &ComplexMatrix) -> MatchResiduals {
    let intertwining = p1
        .rep_images
        .iter()
        .zip(&p2.rep_images)
        .map(|(a, b)| linalg::distance(&(w * a), &(b * w)))
        .fold(0.0, f64::max);
    MatchResiduals { unitarity: linalg::unitarity_residual(w), link: linalg::distance(&(w * &p1.v), &p2.v), intertwining }
}

pub fn verify(name: &str, doc: &Document, ctx: &Context, allowed: Option<&[&str]>) -> Outcome {
    doc.expect(allowed.unwrap_or(&KINDS))?;
    let tol = ctx.tol(Some(doc))?;
    let report = match doc.header.kind.as_str() {
        "stinespring-certificate" => verify_stinespring(name, doc.body()?, &tol),
        "match-certificate" => verify_match(name, doc.body()?, &tol),
        "naimark-certificate" => verify_naimark(name, doc.body()?, &tol),
        "unitary-dilation-certificate" => verify_unitary_dilation(name, doc.body()?, &tol),
        "ucp-tower-certificate" => verify_tower(name, doc.body()?, &tol),
        "kernel-embedding-certificate" => verify_embedding(name, doc.body()?, &tol),
        "kernel-morphism-certificate" => verify_morphism(name, doc.body()?, &tol),
        "second-quantization-certificate" => verify_second_quantization(name, doc.body()?, &tol),
        other => return Err(Failure::Input(format!("unknown certificate kind `{other}`"))),
    };
    let report = report.map_err(|f| match f {
        Failure::Input(msg) => Failure::Input(format!("{}: {msg}", doc.source)),
        refuted => refuted,
    })?;
    Ok(report.field("kind", &doc.header.kind))
}

fn map_scale(phi: &crate::cp::MatrixMap) -> f64 {
    1.0 + phi.images().iter().map(linalg::operator_norm).fold(0.0, f64::max)
}

fn verify_stinespring(name: &str, c: StinespringCert, tol: &Tolerance) -> Outcome {
    let phi = c.map.to_map()?;
    let pair = c.pair.to_pair()?;
    if (pair.d, pair.n) != (phi.d(), phi.n()) {
        return Err(InputError("pair and map act on different algebras".into()).into());
    }
    let bound = tol.eq_tol * map_scale(&phi);
    let dilation = pair.dilation_residual(&phi);
    let norm = pair.norm_residual(&phi);
    let rep = pair.representation_residual();
    Ok(Report::pass_if(name, dilation <= bound && norm <= bound && rep <= bound)
        .field("k_dim", pair.k_dim())
        .field("minimal", pair.is_minimal(tol))
        .field("dilation_residual", dilation)
        .field("norm_residual", norm)
        .field("representation_residual", rep)
        .field("bound", bound))
}

fn verify_match(name: &str, c: MatchCert, tol: &Tolerance) -> Outcome {
    let phi = c.map.to_map()?;
    let (p1, p2) = (c.first.to_pair()?, c.second.to_pair()?);
    let w = c.w.to_matrix("w")?;
    if w.shape() != (p2.k_dim(), p1.k_dim()) || (p1.d, p1.n) != (p2.d, p2.n) {
        return Err(InputError("matching unitary does not fit the pairs".into()).into());
    }
    let scale = map_scale(&phi);
    let compression = p1.dilation_residual(&phi).max(p2.dilation_residual(&phi));
    let r = match_residuals(&p1, &p2, &w);
    let loose = tol.eq_tol.sqrt() * scale;
    let ok = compression <= tol.eq_tol * scale && r.unitarity <= tol.eq_tol.sqrt() && r.link <= loose && r.intertwining <= loose;
    Ok(Report::pass_if(name, ok)
        .field("compression_residual", compression)
        .field("unitarity_residual", r.unitarity)
        .field("link_residual", r.link)
        .field("intertwining_residual", r.intertwining))
}

fn verify_naimark(name: &str, c: NaimarkCert, tol: &Tolerance) -> Outcome {
    let p = c.povm.to_povm()?;
    let d = NaimarkDilation { v: c.v.to_matrix("v")?, projections: document::matrices(&c.projections, "projections")? };
    let r = povm::verify_naimark(&p, &d, tol)?;
    Ok(Report::pass_if(name, r.passes)
        .field("k_dim", d.k_dim())
        .field("max_residual", r.max_residual)
        .field("isometry_residual", r.isometry_residual)
        .field("pvm_residual", r.pvm_residual))
}

fn verify_unitary_dilation(name: &str, c: UnitaryDilationCert, tol: &Tolerance) -> Outcome {
    let a = c.a.to_matrix("a")?;
    let u = c.u.to_matrix("u")?;
    let contraction = Contraction::new(a.clone(), tol)?;
    let n = contraction.dim();
    if c.steps == 0 || u.shape() != ((c.steps + 1) * n, (c.steps + 1) * n) {
        return Err(InputError(format!("u must be {0}x{0} for {1} steps", (c.steps + 1) * n, c.steps)).into());
    }
    let d = PowerDilation { horizon: c.steps, n, u };
    let unitarity = d.unitarity_residual();
    let worst = d.residuals(&a).into_iter().fold(0.0, f64::max);
    let ok = unitarity <= tol.eq_tol && worst <= tol.eq_tol * (1.0 + c.steps as f64);
    Ok(Report::pass_if(name, ok)
        .field("steps", c.steps)
        .field("unitarity_residual", unitarity)
        .field("max_power_residual", worst))
}

fn verify_tower(name: &str, c: TowerCert, tol: &Tolerance) -> Outcome {
    let kraus = document::matrices(&c.kraus, "kraus")?;
    let u = UcpMap::from_kraus(&kraus, tol)?;
    let iotas = document::matrices(&c.iotas, "iotas")?;
    if iotas.len() != c.horizon {
        return Err(InputError(format!("{} isometries for horizon {}", iotas.len(), c.horizon)).into());
    }
    let t = tower::verify_tower(&u, &c.v.to_matrix("v")?, &iotas, tol)?;
    let ladder = tower::projection_ladder(&t, tol)?;
    Ok(Report::pass_if(name, ladder.is_increasing(tol))
        .field("horizon", t.horizon)
        .field("moment_residuals", &t.moment_residuals)
        .field("isometry_residuals", &t.isometry_residuals)
        .field("ladder_ranks", &ladder.ranks))
}

fn feature_rank(features: &ComplexMatrix, tol: &Tolerance) -> usize {
    linalg::span_basis(features, tol).ncols()
}

fn verify_embedding(name: &str, c: EmbeddingCert, tol: &Tolerance) -> Outcome {
    let k = c.kernel.to_kernel()?;
    let features = c.features.to_matrix("features")?;
    if features.ncols() != k.len() {
        return Err(InputError(format!("{} feature columns for {} points", features.ncols(), k.len())).into());
    }
    let e = kernel::FeatureEmbedding { kernel: k, features };
    let residual = e.round_trip_residual();
    let bound = tol.eq_tol * (1.0 + linalg::max_abs(e.kernel.gram()));
    let rank = feature_rank(&e.features, tol);
    Ok(Report::pass_if(name, residual <= bound && rank == e.dim())
        .field("dim", e.dim())
        .field("rank", rank)
        .field("round_trip_residual", residual)
        .field("bound", bound))
}

fn verify_morphism(name: &str, c: MorphismCert, tol: &Tolerance) -> Outcome {
    let m = kernel::KernelMorphism::new(c.source.to_kernel()?, c.target.to_kernel()?, c.map.clone())?;
    let e1 = kernel::FeatureEmbedding { kernel: m.source.clone(), features: c.source_features.to_matrix("source_features")? };
    let e2 = kernel::FeatureEmbedding { kernel: m.target.clone(), features: c.target_features.to_matrix("target_features")? };
    let u = c.u.to_matrix("u")?;
    if e1.features.ncols() != m.source.len() || e2.features.ncols() != m.target.len() || u.shape() != (e2.dim(), e1.dim()) {
        return Err(InputError("feature or isometry shapes do not fit the kernels".into()).into());
    }
    let scale = 1.0 + linalg::max_abs(m.source.gram()).max(linalg::max_abs(m.target.gram()));
    let preservation = m.preservation_residual();
    let round_trip = e1.round_trip_residual().max(e2.round_trip_residual());
    let isometry = linalg::isometry_residual(&u);
    let link = linalg::distance(&(&u * &e1.features), &e2.features.select_columns(c.map.iter()));
    let ok = preservation <= tol.eq_tol
        && round_trip <= tol.eq_tol * scale
        && isometry <= tol.eq_tol.sqrt()
        && link <= tol.eq_tol.sqrt() * scale;
    Ok(Report::pass_if(name, ok)
        .field("preservation_residual", preservation)
        .field("round_trip_residual", round_trip)
        .field("isometry_residual", isometry)
        .field("link_residual", link))
}

fn verify_second_quantization(name: &str, c: SecondQuantizationCert, tol: &Tolerance) -> Outcome {
    let samples = c.vectors.to_vectors()?;
    let u = c.unitary.to_matrix("unitary")?;
    let k = kernel::exp_kernel(&samples)?;
    kernel::check_permutation(&c.permutation, samples.len())?;
    let e = kernel::FeatureEmbedding { kernel: k, features: c.features.to_matrix("features")? };
    let gamma = c.gamma.to_matrix("gamma")?;
    if e.features.ncols() != samples.len() || gamma.shape() != (e.dim(), e.dim()) || u.shape() != (c.vectors.dim, c.vectors.dim) {
        return Err(InputError("feature, unitary or gamma shapes do not fit the sample".into()).into());
    }
    let scale = 1.0 + linalg::max_abs(e.kernel.gram());
    let round_trip = e.round_trip_residual();
    let closure = samples
        .iter()
        .zip(&c.permutation)
        .map(|(z, &j)| (&u * z - &samples[j]).norm())
        .fold(0.0, f64::max);
    let unitary = linalg::unitarity_residual(&u);
    let gamma_unitary = linalg::unitarity_residual(&gamma);
    let link = linalg::distance(&(&gamma * &e.features), &e.features.select_columns(c.permutation.iter()));
    let ok = round_trip <= tol.eq_tol * scale
        && unitary <= tol.eq_tol
        && closure <= tol.eq_tol
        && gamma_unitary <= tol.eq_tol.sqrt()
        && link <= tol.eq_tol.sqrt() * scale;
    Ok(Report::pass_if(name, ok)
        .field("round_trip_residual", round_trip)
        .field("closure_residual", closure)
        .field("gamma_unitarity_residual", gamma_unitary)
        .field("link_residual", link))
}
