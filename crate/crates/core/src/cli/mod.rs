//! The `dilation` command-line tool.
//!
//! Exit codes: `0` when the verdict is true or the object was constructed,
//! `1` when the verdict is false (the report carries the witness), `2` for
//! usage and input errors.

mod certificate;
mod commands;
pub mod document;
mod fuzz;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use crate::linalg::{ComplexMatrix, Tolerance};
use document::{Document, InputError, MatrixDoc};

#[derive(Debug, Parser)]
#[command(name = "dilation", version, about = "Construct and verify finite-dimensional dilations")]
pub struct Cli {
    /// Sets both the equality and the positivity tolerance
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Print the report as JSON
    #[arg(long, global = true)]
    pub json: bool,

    /// Print nothing; the exit code carries the verdict
    #[arg(long, global = true)]
    pub quiet: bool,

    /// Write the certificate of a constructive command to this path
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Complete positivity of a map, via its Choi matrix
    CheckCp { input: PathBuf },
    /// Minimal Stinespring dilation of a completely positive map
    Stinespring { input: PathBuf },
    /// Re-check any certificate written with --out
    VerifyDilation { certificate: PathBuf },
    /// Unitary between two minimal dilation pairs of the same map
    ///
    /// With one map document, matches the Stinespring pair against the Kraus
    /// pair. With two stinespring certificates, matches their pairs.
    MatchMinimal { input: PathBuf, second: Option<PathBuf> },
    /// Naimark dilation of a POVM
    Naimark { input: PathBuf },
    /// Re-check a Naimark certificate
    VerifyNaimark { certificate: PathBuf },
    /// One-step unitary dilation of a contraction
    Halmos { input: PathBuf },
    /// Unitary whose first N powers compress to the powers of a contraction
    DilateContraction {
        #[arg(long)]
        steps: usize,
        input: PathBuf,
    },
    /// von Neumann inequality for one polynomial
    VonNeumann {
        /// Coefficients, constant term first: `1,0:1,-2` or `[[1,0],[0,1],[-2,0]]`
        #[arg(long)]
        poly: String,
        #[arg(long, default_value_t = 4096)]
        grid: usize,
        input: PathBuf,
    },
    /// Sampled spectral-set check on a circle
    SpectralCheck {
        /// Numerator coefficients; repeat for several functions
        #[arg(long, required = true)]
        poly: Vec<String>,
        /// Common denominator coefficients
        #[arg(long)]
        den: Option<String>,
        #[arg(long, default_value_t = 256)]
        grid: usize,
        /// Circle centre, `re` or `re:im`
        #[arg(long, default_value = "0")]
        center: String,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        input: PathBuf,
    },
    /// Subnormality inequalities over all words up to a degree
    Bram {
        #[arg(long)]
        degree: usize,
        input: PathBuf,
    },
    /// Hyponormality A*A >= AA*
    Hyponormal { input: PathBuf },
    /// Feature embedding of a positive definite kernel
    KernelEmbed { input: PathBuf },
    /// Isometry induced by a kernel-preserving point map
    KernelMorphism {
        source: PathBuf,
        target: PathBuf,
        /// Image index of each source point: `0,2,1`
        #[arg(long)]
        map: String,
    },
    /// Unitary induced on exponential vectors by a unitary of the sample space
    SecondQuantize { vectors: PathBuf, unitary: PathBuf },
    /// Finite-horizon dilation tower of a unital completely positive map
    UcpTower {
        #[arg(long)]
        horizon: usize,
        /// Largest allowed top-space dimension
        #[arg(long)]
        cap: Option<usize>,
        input: PathBuf,
    },
    /// Random kernels: embedding round trip and minimal dimension
    FuzzKernel(FuzzArgs),
    /// Random Hermiticity-preserving maps: Choi test against the matrix-unit check
    FuzzCp(FuzzArgs),
    /// Random CP maps: dilation and norm identities
    FuzzStinespring(FuzzArgs),
    /// Random POVMs: Naimark residuals and dimension
    FuzzNaimark(FuzzArgs),
    /// Random contractions: power dilation residuals and unitarity
    FuzzContraction(FuzzArgs),
    /// Random contractions and polynomials: von Neumann's inequality
    FuzzVonNeumann(FuzzArgs),
    /// Random normal matrices: the subnormality inequalities hold
    FuzzBram(FuzzArgs),
    /// Random UCP maps: tower moments and ladder monotonicity
    FuzzTower(FuzzArgs),
}

#[derive(Debug, Clone, Args)]
pub struct FuzzArgs {
    /// Seed for the deterministic generator
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Number of random instances
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Constructed,
}

impl Verdict {
    fn code(self) -> i32 {
        match self {
            Verdict::Pass | Verdict::Constructed => 0,
            Verdict::Fail => 1,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Constructed => "CONSTRUCTED",
        }
    }
}

#[derive(Debug, Clone)]
enum Field {
    Value(Value),
    Matrix(ComplexMatrix),
    Table(Vec<String>, Vec<Vec<Value>>),
}

/// What a subcommand found, in a form that prints as text or JSON.
#[derive(Debug, Clone)]
pub struct Report {
    command: String,
    verdict: Verdict,
    fields: Vec<(String, Field)>,
    certificate: Option<Value>,
}

impl Report {
    fn new(command: &str, verdict: Verdict) -> Self {
        Report { command: command.into(), verdict, fields: vec![], certificate: None }
    }

    fn pass_if(command: &str, ok: bool) -> Self {
        Self::new(command, if ok { Verdict::Pass } else { Verdict::Fail })
    }

    fn field(mut self, name: &str, value: impl Serialize) -> Self {
        self.fields.push((name.into(), Field::Value(serde_json::to_value(value).expect("report values serialize"))));
        self
    }

    fn matrix(mut self, name: &str, m: &ComplexMatrix) -> Self {
        self.fields.push((name.into(), Field::Matrix(m.clone())));
        self
    }

    fn table(mut self, name: &str, headers: &[&str], rows: Vec<Vec<Value>>) -> Self {
        self.fields.push((name.into(), Field::Table(headers.iter().map(|h| h.to_string()).collect(), rows)));
        self
    }

    fn certificate(mut self, cert: Value) -> Self {
        self.certificate = Some(cert);
        self
    }

    pub fn verdict(&self) -> Verdict {
        self.verdict
    }

    fn to_json(&self) -> Value {
        let mut map = serde_json::Map::new();
        map.insert("command".into(), self.command.clone().into());
        map.insert("verdict".into(), serde_json::to_value(self.verdict).expect("verdict serializes"));
        for (name, field) in &self.fields {
            let v = match field {
                Field::Value(v) => v.clone(),
                Field::Matrix(m) => serde_json::to_value(MatrixDoc::from_matrix(m)).expect("matrix serializes"),
                Field::Table(headers, rows) => Value::Array(
                    rows.iter()
                        .map(|r| Value::Object(headers.iter().cloned().zip(r.iter().cloned()).collect()))
                        .collect(),
                ),
            };
            map.insert(name.clone(), v);
        }
        Value::Object(map)
    }

    fn render_text(&self, w: &mut dyn Write) -> std::io::Result<()> {
        writeln!(w, "{}: {}", self.command, self.verdict.label())?;
        for (name, field) in &self.fields {
            match field {
                Field::Value(v) => writeln!(w, "  {name}: {v}")?,
                Field::Matrix(m) => {
                    writeln!(w, "  {name}: {}x{}", m.nrows(), m.ncols())?;
                    for i in 0..m.nrows() {
                        let row: Vec<String> = m.row(i).iter().map(|z| format!("{:>10.6}{:+.6}i", z.re, z.im)).collect();
                        writeln!(w, "    [ {} ]", row.join("  "))?;
                    }
                }
                Field::Table(headers, rows) => {
                    writeln!(w, "  {name}:")?;
                    let cells: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(Value::to_string).collect()).collect();
                    let widths: Vec<usize> = (0..headers.len())
                        .map(|j| cells.iter().filter_map(|r| r.get(j)).chain(Some(&headers[j])).map(String::len).max().unwrap_or(0))
                        .collect();
                    let line = |cols: &[String]| {
                        cols.iter().zip(&widths).map(|(c, &wd)| format!("{c:>wd$}")).collect::<Vec<_>>().join("  ")
                    };
                    writeln!(w, "    {}", line(headers))?;
                    for r in &cells {
                        writeln!(w, "    {}", line(r))?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Why a subcommand stopped without a report.
#[derive(Debug)]
enum Failure {
    Input(String),
    /// The input is well formed but lacks a property the construction needs.
    Refuted(crate::Error),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Input(e.0)
    }
}

impl From<crate::Error> for Failure {
    fn from(e: crate::Error) -> Self {
        use crate::Error::*;
        match e {
            NotPsd { .. }
            | InvalidKernel { .. }
            | NotCompletelyPositive { .. }
            | MorphismViolation { .. }
            | NotClosed { .. }
            | AmbiguousMatch { .. }
            | NotUnitary { .. }
            | NotUnital { .. }
            | NotMinimal { .. }
            | CompressionMismatch { .. }
            | InvalidPovm(_)
            | NotContraction { .. }
            | ConstructionCheck { .. } => Failure::Refuted(e),
            other => Failure::Input(other.to_string()),
        }
    }
}

type Outcome = std::result::Result<Report, Failure>;

/// Tolerance resolution: defaults, then the document's `tol`, then `--tol`.
#[derive(Debug, Clone, Copy)]
struct Context {
    tol_flag: Option<f64>,
}

impl Context {
    fn tol(&self, doc: Option<&Document>) -> Result<Tolerance, InputError> {
        let mut tol = doc.map(|d| d.tol(Tolerance::default())).unwrap_or_default();
        if let Some(t) = self.tol_flag {
            tol.eq_tol = t;
            tol.psd_tol = t;
        }
        tol.validate()?;
        Ok(tol)
    }
}

/// Parses `args` (program name first), runs the subcommand, writes the
/// report to `out` and diagnostics to `err`, and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let ctx = Context { tol_flag: cli.tol };
    if let Err(e) = ctx.tol(None) {
        let _ = writeln!(err, "error: {e}");
        return 2;
    }
    let command = cli.command.name();
    let report = match commands::dispatch(&cli.command, &ctx) {
        Ok(report) => report,
        Err(Failure::Input(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            return 2;
        }
        Err(Failure::Refuted(e)) => Report::new(command, Verdict::Fail).field("reason", e.to_string()),
    };

    if let Some(path) = &cli.out {
        match &report.certificate {
            Some(cert) => {
                let text = serde_json::to_string_pretty(cert).expect("certificates serialize") + "\n";
                if let Err(e) = std::fs::write(path, text) {
                    let _ = writeln!(err, "error: {}: {e}", path.display());
                    return 2;
                }
            }
            None if report.verdict == Verdict::Fail => {}
            None => {
                let _ = writeln!(err, "error: `{command}` does not produce a certificate");
                return 2;
            }
        }
    }

    if !cli.quiet {
        let written = if cli.json {
            writeln!(out, "{}", serde_json::to_string_pretty(&report.to_json()).expect("reports serialize"))
        } else {
            report.render_text(out)
        };
        // a closed pipe (`| head`) is the reader's choice, not an error
        if let Err(e) = written.and_then(|_| out.flush()) {
            if e.kind() != std::io::ErrorKind::BrokenPipe {
                let _ = writeln!(err, "error: {e}");
                return 2;
            }
        }
    }
    report.verdict.code()
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::CheckCp { .. } => "check-cp",
            Command::Stinespring { .. } => "stinespring",
            Command::VerifyDilation { .. } => "verify-dilation",
            Command::MatchMinimal { .. } => "match-minimal",
            Command::Naimark { .. } => "naimark",
            Command::VerifyNaimark { .. } => "verify-naimark",
            Command::Halmos { .. } => "halmos",
            Command::DilateContraction { .. } => "dilate-contraction",
            Command::VonNeumann { .. } => "von-neumann",
            Command::SpectralCheck { .. } => "spectral-check",
            Command::Bram { .. } => "bram",
            Command::Hyponormal { .. } => "hyponormal",
            Command::KernelEmbed { .. } => "kernel-embed",
            Command::KernelMorphism { .. } => "kernel-morphism",
            Command::SecondQuantize { .. } => "second-quantize",
            Command::UcpTower { .. } => "ucp-tower",
            Command::FuzzKernel(_) => "fuzz-kernel",
            Command::FuzzCp(_) => "fuzz-cp",
            Command::FuzzStinespring(_) => "fuzz-stinespring",
            Command::FuzzNaimark(_) => "fuzz-naimark",
            Command::FuzzContraction(_) => "fuzz-contraction",
            Command::FuzzVonNeumann(_) => "fuzz-von-neumann",
            Command::FuzzBram(_) => "fuzz-bram",
            Command::FuzzTower(_) => "fuzz-tower",
        }
    }
}
