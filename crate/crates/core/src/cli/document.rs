//! JSON documents read and written by the command-line tool.
//!
//! Every document is an object with `"format": 1` and a `"kind"` tag; the
//! remaining fields depend on the kind. Complex numbers are `[re, im]` pairs
//! and matrices list their entries row-major:
//!
//! ```json
//! {"format": 1, "kind": "matrix", "rows": 2, "cols": 2,
//!  "entries": [[0, 0], [1, 0], [0, 0], [0, 0]]}
//! ```
//!
//! An optional `"tol"` object overrides any of `eq_tol`, `psd_tol`, `rank_tol`.

use std::path::Path;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::cp::MatrixMap;
use crate::kernel::FiniteKernel;
use crate::linalg::{ComplexMatrix, ComplexVector, Tolerance};
use crate::povm::Povm;

pub const FORMAT: u32 = 1;

/// Problem with an input file; always exit code 2.
#[derive(Debug, Clone)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<crate::Error> for InputError {
    fn from(e: crate::Error) -> Self {
        InputError(e.to_string())
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct TolDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eq_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psd_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_tol: Option<f64>,
}

impl TolDoc {
    pub fn apply(&self, mut tol: Tolerance) -> Tolerance {
        tol.eq_tol = self.eq_tol.unwrap_or(tol.eq_tol);
        tol.psd_tol = self.psd_tol.unwrap_or(tol.psd_tol);
        tol.rank_tol = self.rank_tol.unwrap_or(tol.rank_tol);
        tol
    }

    pub fn full(tol: &Tolerance) -> Self {
        TolDoc { eq_tol: Some(tol.eq_tol), psd_tol: Some(tol.psd_tol), rank_tol: Some(tol.rank_tol) }
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct Header {
    pub format: u32,
    pub kind: String,
    #[serde(default)]
    pub tol: Option<TolDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDoc {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixDoc {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let mut entries = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let z = m[(i, j)];
                entries.push([z.re, z.im]);
            }
        }
        MatrixDoc { rows: m.nrows(), cols: m.ncols(), entries }
    }

    pub fn to_matrix(&self, what: &str) -> Result<ComplexMatrix, InputError> {
        if self.entries.len() != self.rows * self.cols {
            return Err(InputError(format!(
                "{what}: {} entries for a {}x{} matrix",
                self.entries.len(),
                self.rows,
                self.cols
            )));
        }
        if let Some(k) = self.entries.iter().position(|[re, im]| !(re.is_finite() && im.is_finite())) {
            return Err(InputError(format!("{what}: non-finite entry at ({}, {})", k / self.cols.max(1), k % self.cols.max(1))));
        }
        Ok(ComplexMatrix::from_fn(self.rows, self.cols, |i, j| {
            let [re, im] = self.entries[i * self.cols + j];
            Complex64::new(re, im)
        }))
    }
}

pub fn matrices(docs: &[MatrixDoc], what: &str) -> Result<Vec<ComplexMatrix>, InputError> {
    docs.iter().enumerate().map(|(i, m)| m.to_matrix(&format!("{what}[{i}]"))).collect()
}

pub fn matrix_docs(ms: &[ComplexMatrix]) -> Vec<MatrixDoc> {
    ms.iter().map(MatrixDoc::from_matrix).collect()
}

/// A map `M_d -> M_n`, by its images of the matrix units (row-major in
/// `(p, q)`) or by Kraus operators `K_i` (`d x n`) with `phi(a) = sum K_i* a K_i`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MapDoc {
    pub d: usize,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub images: Option<Vec<MatrixDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kraus: Option<Vec<MatrixDoc>>,
}

impl MapDoc {
    pub fn from_map(phi: &MatrixMap) -> Self {
        MapDoc { d: phi.d(), n: phi.n(), images: Some(matrix_docs(phi.images())), kraus: None }
    }

    pub fn to_map(&self) -> Result<MatrixMap, InputError> {
        let phi = match (&self.images, &self.kraus) {
            (Some(images), None) => MatrixMap::from_images(self.d, self.n, matrices(images, "images")?)?,
            (None, Some(kraus)) => MatrixMap::from_kraus(&matrices(kraus, "kraus")?)?,
            _ => return Err(InputError("map: give exactly one of `images` and `kraus`".into())),
        };
        if (phi.d(), phi.n()) != (self.d, self.n) {
            return Err(InputError(format!("map: declared M_{} -> M_{}, data gives M_{} -> M_{}", self.d, self.n, phi.d(), phi.n())));
        }
        Ok(phi)
    }

    pub fn kraus_matrices(&self) -> Result<Option<Vec<ComplexMatrix>>, InputError> {
        self.kraus.as_ref().map(|k| matrices(k, "kraus")).transpose()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PovmDoc {
    pub n: usize,
    pub effects: Vec<MatrixDoc>,
}

impl PovmDoc {
    pub fn from_povm(p: &Povm) -> Self {
        PovmDoc { n: p.n(), effects: matrix_docs(p.effects()) }
    }

    pub fn to_povm(&self) -> Result<Povm, InputError> {
        let p = Povm::new(matrices(&self.effects, "effects")?)?;
        if p.n() != self.n {
            return Err(InputError(format!("povm: declared n = {}, effects are {}x{}", self.n, p.n(), p.n())));
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<String>>,
    pub gram: MatrixDoc,
}

impl KernelDoc {
    pub fn from_kernel(k: &FiniteKernel) -> Self {
        KernelDoc { points: Some(k.points().to_vec()), gram: MatrixDoc::from_matrix(k.gram()) }
    }

    pub fn to_kernel(&self) -> Result<FiniteKernel, InputError> {
        let gram = self.gram.to_matrix("gram")?;
        Ok(match &self.points {
            Some(points) => FiniteKernel::new(points.clone(), gram)?,
            None => FiniteKernel::from_gram(gram)?,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TupleDoc {
    pub mats: Vec<MatrixDoc>,
}

/// Sample vectors for the exponential kernel.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VectorsDoc {
    pub dim: usize,
    pub vectors: Vec<Vec<[f64; 2]>>,
}

impl VectorsDoc {
    pub fn from_vectors(dim: usize, vs: &[ComplexVector]) -> Self {
        VectorsDoc { dim, vectors: vs.iter().map(|v| v.iter().map(|z| [z.re, z.im]).collect()).collect() }
    }

    pub fn to_vectors(&self) -> Result<Vec<ComplexVector>, InputError> {
        self.vectors
            .iter()
            .enumerate()
            .map(|(i, v)| {
                if v.len() != self.dim {
                    return Err(InputError(format!("vectors[{i}]: length {} but dim = {}", v.len(), self.dim)));
                }
                if v.iter().any(|[re, im]| !(re.is_finite() && im.is_finite())) {
                    return Err(InputError(format!("vectors[{i}]: non-finite entry")));
                }
                Ok(ComplexVector::from_iterator(self.dim, v.iter().map(|[re, im]| Complex64::new(*re, *im))))
            })
            .collect()
    }
}

/// Parsed document: header plus the raw text for the kind-specific pass.
#[derive(Debug, Clone)]
pub struct Document {
    pub header: Header,
    pub source: String,
    text: String,
}

impl Document {
    pub fn read(path: &Path) -> Result<Self, InputError> {
        let source = path.display().to_string();
        let text = if source == "-" {
            let mut s = String::new();
            std::io::Read::read_to_string(&mut std::io::stdin(), &mut s).map_err(|e| InputError(format!("stdin: {e}")))?;
            s
        } else {
            std::fs::read_to_string(path).map_err(|e| InputError(format!("{source}: {e}")))?
        };
        Self::parse(source, text)
    }

    pub fn parse(source: String, text: String) -> Result<Self, InputError> {
        let header: Header = deserialize(&source, &text)?;
        if header.format != FORMAT {
            return Err(InputError(format!("{source}: unsupported format {} (expected {FORMAT})", header.format)));
        }
        Ok(Document { header, source, text })
    }

    pub fn expect(&self, kinds: &[&str]) -> Result<(), InputError> {
        if kinds.contains(&self.header.kind.as_str()) {
            Ok(())
        } else {
            Err(InputError(format!("{}: expected kind {}, found `{}`", self.source, kinds.join(" or "), self.header.kind)))
        }
    }

    pub fn body<T: DeserializeOwned>(&self) -> Result<T, InputError> {
        deserialize(&self.source, &self.text)
    }

    /// Attributes a semantic error in the body to this document.
    pub fn within<T>(&self, r: Result<T, InputError>) -> Result<T, InputError> {
        r.map_err(|e| InputError(format!("{}: {}", self.source, e.0)))
    }

    pub fn tol(&self, base: Tolerance) -> Tolerance {
        self.header.tol.as_ref().map(|t| t.apply(base)).unwrap_or(base)
    }
}

fn deserialize<T: DeserializeOwned>(source: &str, text: &str) -> Result<T, InputError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "?" || path == "." {
            InputError(format!("{source}: {inner}"))
        } else {
            InputError(format!("{source}: field `{path}`: {inner}"))
        }
    })?;
    de.end().map_err(|e| InputError(format!("{source}: {e}")))?;
    Ok(value)
}

/// Serializes a body with the `format` and `kind` header fields added.
pub fn to_document<T: Serialize>(kind: &str, tol: Option<&Tolerance>, body: &T) -> serde_json::Value {
    let mut value = serde_json::to_value(body).expect("documents serialize");
    let map = value.as_object_mut().expect("bodies are objects");
    map.insert("format".into(), FORMAT.into());
    map.insert("kind".into(), kind.into());
    if let Some(tol) = tol {
        map.insert("tol".into(), serde_json::to_value(TolDoc::full(tol)).expect("tolerances serialize"));
    }
    value
}

/// Parses `"1,0:1,-2"` or `"[[1,0],[0,1],[-2,0]]"` into coefficients.
pub fn parse_coefficients(s: &str) -> Result<Vec<Complex64>, InputError> {
    let t = s.trim();
    if t.starts_with('[') {
        let pairs: Vec<[f64; 2]> =
            serde_json::from_str(t).map_err(|e| InputError(format!("coefficients `{s}`: {e}")))?;
        return Ok(pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect());
    }
    t.split(',')
        .map(|part| {
            let part = part.trim();
            let (re, im) = part.split_once(':').unwrap_or((part, "0"));
            let parse = |x: &str| x.trim().parse::<f64>().map_err(|e| InputError(format!("coefficient `{part}`: {e}")));
            Ok(Complex64::new(parse(re)?, parse(im)?))
        })
        .collect()
}
