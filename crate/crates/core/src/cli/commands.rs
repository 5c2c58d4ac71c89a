use std::path::Path;

use num_complex::Complex64;
use serde_json::json;

use super::certificate::{self, PairDoc};
use super::document::{self, parse_coefficients, Document, InputError, KernelDoc, MapDoc, MatrixDoc, PovmDoc, TupleDoc, VectorsDoc};
use super::{fuzz, Command, Context, Failure, Outcome, Report, Verdict};
use crate::contraction::{self, Contraction, Polynomial, RationalMatrixFunction};
use crate::cp::{self, MatrixMap};
use crate::kernel::{self, KernelMorphism};
use crate::linalg::{self, ComplexMatrix, ComplexVector, Tolerance};
use crate::povm;
use crate::subnormal::{self, CommutingTuple};
use crate::tower::{self, UcpMap};

pub(super) fn dispatch(command: &Command, ctx: &Context) -> Outcome {
    let name = command.name();
    match command {
        Command::CheckCp { input } => check_cp(name, input, ctx),
        Command::Stinespring { input } => stinespring(name, input, ctx),
        Command::VerifyDilation { certificate } => certificate::verify(name, &load(certificate)?, ctx, None),
        Command::MatchMinimal { input, second } => match_minimal(name, input, second.as_deref(), ctx),
        Command::Naimark { input } => naimark(name, input, ctx),
        Command::VerifyNaimark { certificate } => {
            certificate::verify(name, &load(certificate)?, ctx, Some(&["naimark-certificate"]))
        }
        Command::Halmos { input } => dilate(name, input, None, ctx),
        Command::DilateContraction { steps, input } => dilate(name, input, Some(*steps), ctx),
        Command::VonNeumann { poly, grid, input } => von_neumann(name, input, poly, *grid, ctx),
        Command::SpectralCheck { poly, den, grid, center, radius, input } => {
            spectral(name, input, poly, den.as_deref(), *grid, center, *radius, ctx)
        }
        Command::Bram { degree, input } => bram(name, input, *degree, ctx),
        Command::Hyponormal { input } => hyponormal(name, input, ctx),
        Command::KernelEmbed { input } => kernel_embed(name, input, ctx),
        Command::KernelMorphism { source, target, map } => kernel_morphism(name, source, target, map, ctx),
        Command::SecondQuantize { vectors, unitary } => second_quantize(name, vectors, unitary, ctx),
        Command::UcpTower { horizon, cap, input } => ucp_tower(name, input, *horizon, *cap, ctx),
        Command::FuzzKernel(a) => fuzz::run(name, fuzz::Suite::Kernel, a, ctx),
        Command::FuzzCp(a) => fuzz::run(name, fuzz::Suite::Cp, a, ctx),
        Command::FuzzStinespring(a) => fuzz::run(name, fuzz::Suite::Stinespring, a, ctx),
        Command::FuzzNaimark(a) => fuzz::run(name, fuzz::Suite::Naimark, a, ctx),
        Command::FuzzContraction(a) => fuzz::run(name, fuzz::Suite::Contraction, a, ctx),
        Command::FuzzVonNeumann(a) => fuzz::run(name, fuzz::Suite::VonNeumann, a, ctx),
        Command::FuzzBram(a) => fuzz::run(name, fuzz::Suite::Bram, a, ctx),
        Command::FuzzTower(a) => fuzz::run(name, fuzz::Suite::Tower, a, ctx),
    }
}

fn load(path: &Path) -> Result<Document, Failure> {
    Ok(Document::read(path)?)
}

fn load_kind(path: &Path, kinds: &[&str]) -> Result<Document, Failure> {
    let doc = load(path)?;
    doc.expect(kinds)?;
    Ok(doc)
}

pub(super) fn vector_json(v: &ComplexVector) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn load_map(path: &Path, ctx: &Context) -> Result<(MapDoc, MatrixMap, Tolerance), Failure> {
    let doc = load_kind(path, &["map"])?;
    let body: MapDoc = doc.body()?;
    let phi = doc.within(body.to_map())?;
    Ok((body, phi, ctx.tol(Some(&doc))?))
}

fn load_matrix(path: &Path, ctx: &Context) -> Result<(ComplexMatrix, Tolerance), Failure> {
    let doc = load_kind(path, &["matrix"])?;
    let m = doc.within(doc.body::<MatrixDoc>()?.to_matrix("matrix"))?;
    Ok((m, ctx.tol(Some(&doc))?))
}

fn check_cp(name: &str, input: &Path, ctx: &Context) -> Outcome {
    let (_, phi, tol) = load_map(input, ctx)?;
    let v = cp::is_completely_positive(&phi, &tol);
    let mut r = Report::pass_if(name, v.is_cp).field("d", phi.d()).field("n", phi.n()).field("min_choi_eigenvalue", v.min_eigenvalue);
    if v.is_cp {
        r = r.field("kraus_count", cp::kraus_of(&phi, &tol)?.len());
    } else {
        r = r.field("witness", vector_json(&v.witness));
    }
    Ok(r)
}

fn stinespring(name: &str, input: &Path, ctx: &Context) -> Outcome {
    let (_, phi, tol) = load_map(input, ctx)?;
    let pair = cp::stinespring(&phi, &tol)?;
    let cert = document::to_document(
        "stinespring-certificate",
        Some(&tol),
        &json!({ "map": MapDoc::from_map(&phi), "pair": PairDoc::from_pair(&pair) }),
    );
    Ok(Report::new(name, Verdict::Constructed)
        .field("k_dim", pair.k_dim())
        .field("minimal", pair.is_minimal(&tol))
        .field("dilation_residual", pair.dilation_residual(&phi))
        .field("norm_residual", pair.norm_residual(&phi))
        .field("representation_residual", pair.representation_residual())
        .matrix("v", &pair.v)
        .certificate(cert))
}

fn match_minimal(name: &str, input: &Path, second: Option<&Path>, ctx: &Context) -> Outcome {
    let (map_doc, p1, p2, tol) = match second {
        None => {
            let (body, phi, tol) = load_map(input, ctx)?;
            let p1 = cp::stinespring(&phi, &tol)?;
            let p2 = cp::kraus_pair(&phi, &tol)?;
            (body, p1, p2, tol)
        }
        Some(second) => {
            let d1 = load_kind(input, &["stinespring-certificate"])?;
            let d2 = load_kind(second, &["stinespring-certificate"])?;
            let tol = ctx.tol(Some(&d1))?;
            let c1: certificate::StinespringCert = d1.body()?;
            let c2: certificate::StinespringCert = d2.body()?;
            (c1.map, c1.pair.to_pair()?, c2.pair.to_pair()?, tol)
        }
    };
    let w = cp::match_minimal(&p1, &p2, &tol)?;
    let residuals = certificate::match_residuals(&p1, &p2, &w);
    let cert = document::to_document(
        "match-certificate",
        Some(&tol),
        &json!({
            "map": map_doc,
            "first": PairDoc::from_pair(&p1),
            "second": PairDoc::from_pair(&p2),
            "w": MatrixDoc::from_matrix(&w),
        }),
    );
    Ok(Report::new(name, Verdict::Constructed)
        .field("k_dim", p1.k_dim())
        .field("unitarity_residual", residuals.unitarity)
        .field("link_residual", residuals.link)
        .field("intertwining_residual", residuals.intertwining)
        .matrix("w", &w)
        .certificate(cert))
}

fn naimark(name: &str, input: &Path, ctx: &Context) -> Outcome {
    let doc = load_kind(input, &["povm"])?;
    let tol = ctx.tol(Some(&doc))?;
    let body: PovmDoc = doc.body()?;
    let p = doc.within(body.to_povm())?;
    let check = povm::validate_povm(&p, &tol);
    if !check.valid {
        return Ok(Report::new(name, Verdict::Fail)
            .field("negative_effects", &check.negative_effects)
            .field("min_eigenvalues", &check.min_eigenvalues)
            .field("sum_residual", check.sum_residual));
    }
    let d = povm::naimark_dilate(&p, &tol)?;
    let report = povm::verify_naimark(&p, &d, &tol)?;
    let rank_sum: usize = p.effects().iter().map(|e| linalg::gram_factor(e, &tol).map(|f| f.rank)).sum::<crate::Result<usize>>()?;
    let cert = document::to_document(
        "naimark-certificate",
        Some(&tol),
        &json!({
            "povm": body,
            "v": MatrixDoc::from_matrix(&d.v),
            "projections": document::matrix_docs(&d.projections),
        }),
    );
    let mut r = Report::new(name, Verdict::Constructed)
        .field("k_dim", d.k_dim())
        .field("rank_sum", rank_sum)
        .field("max_residual", report.max_residual)
        .field("isometry_residual", report.isometry_residual)
        .field("pvm_residual", report.pvm_residual)
        .matrix("v", &d.v);
    for (i, q) in d.projections.iter().enumerate() {
        r = r.matrix(&format!("q[{i}]"), q);
    }
    Ok(r.certificate(cert))
}

fn dilate(name: &str, input: &Path, steps: Option<usize>, ctx: &Context) -> Outcome {
    let (a, tol) = load_matrix(input, ctx)?;
    let c = Contraction::new(a.clone(), &tol)?;
    let d = contraction::sznagy_finite(&c, steps.unwrap_or(1), &tol)?;
    let residuals = d.residuals(&a);
    let rows = residuals.iter().enumerate().map(|(m, r)| vec![json!(m), json!(r)]).collect();
    let cert = document::to_document(
        "unitary-dilation-certificate",
        Some(&tol),
        &json!({ "a": MatrixDoc::from_matrix(&a), "steps": d.horizon, "u": MatrixDoc::from_matrix(&d.u) }),
    );
    Ok(Report::new(name, Verdict::Constructed)
        .field("norm", linalg::operator_norm(&a))
        .field("steps", d.horizon)
        .field("unitarity_residual", d.unitarity_residual())
        .field("intertwining_residual", c.intertwining_residual())
        .table("power_residuals", &["m", "residual"], rows)
        .matrix("u", &d.u)
        .certificate(cert))
}

fn von_neumann(name: &str, input: &Path, poly: &str, grid: usize, ctx: &Context) -> Outcome {
    let (a, tol) = load_matrix(input, ctx)?;
    let p = Polynomial(parse_coefficients(poly)?);
    let c = Contraction::new(a, &tol)?;
    let r = contraction::von_neumann_check(&c, &p, grid, &tol)?;
    Ok(Report::pass_if(name, r.holds)
        .field("degree", p.degree())
        .field("grid", grid)
        .field("lhs", r.lhs)
        .field("rhs", r.rhs)
        .field("slack", r.slack)
        .field("margin", r.margin))
}

#[allow(clippy::too_many_arguments)]
fn spectral(
    name: &str,
    input: &Path,
    polys: &[String],
    den: Option<&str>,
    grid: usize,
    center: &str,
    radius: f64,
    ctx: &Context,
) -> Outcome {
    let (a, tol) = load_matrix(input, ctx)?;
    let center = parse_coefficients(center)?;
    let [center] = center.as_slice() else {
        return Err(InputError("--center takes one complex number".into()).into());
    };
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(InputError(format!("--radius must be positive, got {radius}")).into());
    }
    if grid == 0 {
        return Err(InputError("--grid must be positive".into()).into());
    }
    let q = match den {
        Some(s) => parse_coefficients(s)?,
        None => vec![linalg::ONE],
    };
    let functions = polys
        .iter()
        .map(|p| Ok(RationalMatrixFunction::scalar(&parse_coefficients(p)?, &q)?))
        .collect::<Result<Vec<_>, Failure>>()?;
    let boundary: Vec<Complex64> = contraction::unit_circle(grid).iter().map(|z| center + z * radius).collect();
    let r = contraction::spectral_set_check(&a, &boundary, &functions, &tol)?;
    let rows = r
        .entries
        .iter()
        .enumerate()
        .map(|(i, e)| vec![json!(i), json!(e.lhs), json!(e.rhs), json!(e.slack), json!(e.violated)])
        .collect();
    Ok(Report::pass_if(name, !r.any_violation())
        .field("spectral_radius", r.spectral_radius)
        .field("sample_radius", r.sample_radius)
        .field("evidence_only", r.evidence_only)
        .table("functions", &["index", "lhs", "rhs", "slack", "violated"], rows))
}

fn load_tuple(path: &Path, ctx: &Context) -> Result<(CommutingTuple, Tolerance), Failure> {
    let doc = load_kind(path, &["tuple", "matrix"])?;
    let tol = ctx.tol(Some(&doc))?;
    let mats = if doc.header.kind == "tuple" {
        doc.within(document::matrices(&doc.body::<TupleDoc>()?.mats, "mats"))?
    } else {
        vec![doc.within(doc.body::<MatrixDoc>()?.to_matrix("matrix"))?]
    };
    Ok((CommutingTuple::new(mats, &tol)?, tol))
}

fn bram(name: &str, input: &Path, degree: usize, ctx: &Context) -> Outcome {
    let (t, tol) = load_tuple(input, ctx)?;
    let words = subnormal::words_up_to(t.d(), degree);
    let cert = subnormal::bram_test(&t, &words, &tol)?;
    let mut r = Report::pass_if(name, cert.passes)
        .field("generators", t.d())
        .field("words", words.len())
        .field("degree_cap", cert.degree_cap)
        .field("min_eigenvalue", cert.min_eigenvalue);
    if let Some(s) = cert.schur_min_eigenvalue {
        r = r.field("schur_min_eigenvalue", s);
    }
    if cert.passes {
        r = r.field("note", format!("inequalities hold for all words of degree <= {degree}; this is evidence, not a proof"));
    } else {
        r = r.field("witness", vector_json(&cert.witness));
    }
    Ok(r)
}

fn hyponormal(name: &str, input: &Path, ctx: &Context) -> Outcome {
    let (a, tol) = load_matrix(input, ctx)?;
    let v = subnormal::hyponormal_check(&a, &tol)?;
    let mut r = Report::pass_if(name, v.is_hyponormal).field("min_eigenvalue", v.min_eigenvalue);
    if let Some(w) = &v.witness {
        r = r.field("witness", vector_json(w));
    }
    Ok(r.matrix("commutator", &v.commutator))
}

fn load_kernel(path: &Path, ctx: &Context) -> Result<(KernelDoc, kernel::FiniteKernel, Tolerance), Failure> {
    let doc = load_kind(path, &["kernel"])?;
    let body: KernelDoc = doc.body()?;
    let k = doc.within(body.to_kernel())?;
    Ok((body, k, ctx.tol(Some(&doc))?))
}

fn kernel_failure(name: &str, k: &kernel::FiniteKernel, tol: &Tolerance) -> Result<Option<Report>, Failure> {
    let v = kernel::validate_kernel(k, tol)?;
    Ok((!v.is_positive).then(|| {
        let mut r = Report::new(name, Verdict::Fail).field("min_eigenvalue", v.min_eigenvalue);
        if let Some(w) = &v.witness {
            r = r.field("witness", w.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>());
        }
        r
    }))
}

fn kernel_embed(name: &str, input: &Path, ctx: &Context) -> Outcome {
    let (_, k, tol) = load_kernel(input, ctx)?;
    if let Some(fail) = kernel_failure(name, &k, &tol)? {
        return Ok(fail);
    }
    let e = kernel::build_embedding(&k, &tol)?;
    let cert = document::to_document(
        "kernel-embedding-certificate",
        Some(&tol),
        &json!({ "kernel": KernelDoc::from_kernel(&k), "features": MatrixDoc::from_matrix(&e.features) }),
    );
    Ok(Report::new(name, Verdict::Constructed)
        .field("points", k.len())
        .field("dim", e.dim())
        .field("round_trip_residual", e.round_trip_residual())
        .matrix("features", &e.features)
        .certificate(cert))
}

fn parse_indices(s: &str) -> Result<Vec<usize>, InputError> {
    let t = s.trim();
    if t.starts_with('[') {
        return serde_json::from_str(t).map_err(|e| InputError(format!("--map `{s}`: {e}")));
    }
    t.split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|e| InputError(format!("--map entry `{}`: {e}", p.trim()))))
        .collect()
}

fn kernel_morphism(name: &str, source: &Path, target: &Path, map: &str, ctx: &Context) -> Outcome {
    let (_, k1, tol) = load_kernel(source, ctx)?;
    let (_, k2, _) = load_kernel(target, ctx)?;
    let point_map = parse_indices(map)?;
    for k in [&k1, &k2] {
        if let Some(fail) = kernel_failure(name, k, &tol)? {
            return Ok(fail);
        }
    }
    let m = KernelMorphism::new(k1.clone(), k2.clone(), point_map.clone())?;
    let preservation = m.preservation_residual();
    if preservation > tol.eq_tol {
        return Ok(Report::new(name, Verdict::Fail).field("preservation_residual", preservation));
    }
    let e1 = kernel::build_embedding(&k1, &tol)?;
    let e2 = kernel::build_embedding(&k2, &tol)?;
    let u = kernel::morphism_isometry(&m, &e1, &e2, &tol)?;
    let link = linalg::distance(&(&u * &e1.features), &e2.features.select_columns(point_map.iter()));
    let cert = document::to_document(
        "kernel-morphism-certificate",
        Some(&tol),
        &json!({
            "source": KernelDoc::from_kernel(&k1),
            "target": KernelDoc::from_kernel(&k2),
            "map": point_map,
            "source_features": MatrixDoc::from_matrix(&e1.features),
            "target_features": MatrixDoc::from_matrix(&e2.features),
            "u": MatrixDoc::from_matrix(&u),
        }),
    );
    Ok(Report::new(name, Verdict::Constructed)
        .field("preservation_residual", preservation)
        .field("isometry_residual", linalg::isometry_residual(&u))
        .field("link_residual", link)
        .matrix("u", &u)
        .certificate(cert))
}

fn second_quantize(name: &str, vectors: &Path, unitary: &Path, ctx: &Context) -> Outcome {
    let doc = load_kind(vectors, &["vectors"])?;
    let tol = ctx.tol(Some(&doc))?;
    let body: VectorsDoc = doc.body()?;
    let samples = doc.within(body.to_vectors())?;
    let (u, _) = load_matrix(unitary, ctx)?;
    let k = kernel::exp_kernel(&samples)?;
    let e = kernel::build_embedding(&k, &tol)?;
    let sq = kernel::second_quantize(&e, &samples, &u, &tol)?;
    let cert = document::to_document(
        "second-quantization-certificate",
        Some(&tol),
        &json!({
            "vectors": body,
            "unitary": MatrixDoc::from_matrix(&u),
            "features": MatrixDoc::from_matrix(&e.features),
            "permutation": sq.permutation,
            "gamma": MatrixDoc::from_matrix(&sq.gamma),
        }),
    );
    Ok(Report::new(name, Verdict::Constructed)
        .field("permutation", &sq.permutation)
        .field("dim", e.dim())
        .field("unitarity_residual", linalg::unitarity_residual(&sq.gamma))
        .matrix("gamma", &sq.gamma)
        .certificate(cert))
}

fn ucp_tower(name: &str, input: &Path, horizon: usize, cap: Option<usize>, ctx: &Context) -> Outcome {
    let (body, phi, tol) = load_map(input, ctx)?;
    let u = match body.kraus_matrices()? {
        Some(kraus) => UcpMap::from_kraus(&kraus, &tol)?,
        None => UcpMap::new(phi, &tol)?,
    };
    let t = tower::build_tower_with_cap(&u, horizon, cap.unwrap_or(tower::DEFAULT_SIZE_CAP), &tol)?;
    let ladder = tower::projection_ladder(&t, &tol)?;
    let rows = (1..=horizon)
        .map(|k| vec![json!(k), json!(t.moment_residuals[k - 1]), json!(t.isometry_residuals[k - 1])])
        .collect();
    let cert = document::to_document(
        "ucp-tower-certificate",
        Some(&tol),
        &json!({
            "kraus": document::matrix_docs(u.kraus()),
            "horizon": horizon,
            "v": MatrixDoc::from_matrix(&t.v),
            "iotas": document::matrix_docs(&t.iotas),
        }),
    );
    Ok(Report::new(name, Verdict::Constructed)
        .field("n", t.n)
        .field("e_dim", t.e_dim)
        .field("top_dim", t.top_dim())
        .table("levels", &["k", "moment_residual", "isometry_residual"], rows)
        .field("ladder_ranks", &ladder.ranks)
        .field("ladder_gaps", &ladder.gaps)
        .certificate(cert))
}
