//! `tlseq` command-line front end.
//!
//! Every command prints one JSON report on stdout:
//!
//! ```text
//! {"command": "...", "version": "...", "params": {...}, "seed": 0,
//!  "result": {...}, "timing_ms": 12}
//! ```
//!
//! Exit codes: 0 success, 1 invalid input, 2 numerically inconclusive.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use tlseq::matrices::{is_expansive, ExpansiveMatrix, ExpansiveVerdict, ExpansivenessConfig, Matrix, MatrixDocument};
use tlseq::norms::{norm, CoefficientSequence, Method, NormConfig, SequenceDocument};
use tlseq::orbit::{
    brute_force_orbit_count, classify_spaces, orbit_decomposition, orbit_is_finite, Classification, ClassifyOptions,
    Exponent, SpaceDocument, SpaceParams,
};
use tlseq::witnesses::{verify_norm_law, FamilyKind, LawReport, LawTarget, WitnessManifest};
use tlseq::{Error, McConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "tlseq",
    version,
    about = "Anisotropic Triebel-Lizorkin sequence space toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether a matrix is expansive.
    Expansive {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, default_value_t = 64)]
        n_max: u32,
    },
    /// Finiteness of the orbit {B^j A^-j} and its classes.
    Orbit {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 64)]
        mmax: u32,
        /// Also count distinct D_j for |j| <= JRANGE by brute force.
        #[arg(long)]
        jrange: Option<u32>,
    },
    /// Decide whether two spaces coincide.
    Classify {
        #[arg(long)]
        space_a: PathBuf,
        #[arg(long)]
        space_b: PathBuf,
        #[arg(long, default_value_t = 64)]
        mmax: u32,
        /// Report unknown instead of not-equal when the orbit search is inconclusive.
        #[arg(long)]
        unknown_if_inconclusive: bool,
    },
    /// Norm of an explicit coefficient sequence.
    Norm {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        seq: PathBuf,
        #[command(flatten)]
        eval: EvalArgs,
    },
    /// Build a witness family and write its manifest.
    Witness {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        size: i64,
        /// Write the manifest here as well as embedding it in the report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measure how a witness family's norm grows with its size.
    Verify {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<i64>,
        #[arg(long, value_enum)]
        target: Option<TargetArg>,
        #[command(flatten)]
        eval: EvalArgs,
        /// CSV file for the per-size table.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// Matrix of the first space (or a space document).
    #[arg(long)]
    pub a: Option<PathBuf>,
    #[arg(long)]
    pub b: Option<PathBuf>,
    /// `{"a": matrix, "b": matrix}` in one file.
    #[arg(long)]
    pub pair: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, default_value = "exact")]
    pub method: String,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// Space document of the first space.
    #[arg(long)]
    pub space: Option<PathBuf>,
    /// Pair file `{"a": matrix, "b": matrix}`; the first space is then built
    /// from `a` with --alpha, --p and --q1.
    #[arg(long)]
    pub pair: Option<PathBuf>,
    /// Second matrix when --space is used.
    #[arg(long)]
    pub b: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub p: Option<Exponent>,
    #[arg(long)]
    pub q1: Option<Exponent>,
    #[arg(long)]
    pub q2: Option<Exponent>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub weights: Option<Vec<f64>>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// A full manifest; overrides the other family flags.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Delta,
    SingleScale,
    Case1,
    Case2,
    Multiscale,
}

impl From<FamilyArg> for FamilyKind {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Delta => FamilyKind::Delta,
            FamilyArg::SingleScale => FamilyKind::SingleScale,
            FamilyArg::Case1 => FamilyKind::Case1,
            FamilyArg::Case2 => FamilyKind::Case2,
            FamilyArg::Multiscale => FamilyKind::Multiscale,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    A,
    B,
    Ratio,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Indeterminate { .. } => EXIT_INCONCLUSIVE,
            _ => EXIT_INVALID,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INVALID,
        message: message.into(),
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// Report body plus whether the result is numerically inconclusive.
struct Report {
    params: Value,
    seed: Option<u64>,
    result: Value,
    inconclusive: bool,
    csv: Option<String>,
}

#[derive(Serialize)]
struct RunManifest<'a> {
    command: &'a str,
    version: &'a str,
    params: &'a Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    result: &'a Value,
    inconclusive: bool,
    timing_ms: u128,
}

fn read(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))
}

fn parse<T: serde::de::DeserializeOwned>(path: &Path) -> Outcome<T> {
    serde_json::from_str(&read(path)?).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

/// A matrix document, or the matrix inside a space document.
fn load_matrix(path: &Path) -> Outcome<Matrix> {
    let v: Value = parse(path)?;
    let doc = match v.get("matrix") {
        Some(m) => m.clone(),
        None => v,
    };
    let doc: MatrixDocument = serde_json::from_value(doc).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    Ok(doc.to_matrix()?)
}

fn load_space(path: &Path) -> Outcome<SpaceParams> {
    Ok(parse::<SpaceDocument>(path)?.to_params()?)
}

fn load_pair(path: &Path) -> Outcome<(Matrix, Matrix)> {
    #[derive(serde::Deserialize)]
    struct Pair {
        a: MatrixDocument,
        b: MatrixDocument,
    }
    let p: Pair = parse(path)?;
    Ok((p.a.to_matrix()?, p.b.to_matrix()?))
}

fn pair_matrices(p: &PairArgs) -> Outcome<(Matrix, Matrix)> {
    match (&p.pair, &p.a, &p.b) {
        (Some(f), None, None) => load_pair(f),
        (None, Some(a), Some(b)) => Ok((load_matrix(a)?, load_matrix(b)?)),
        _ => Err(invalid("give either --pair or both --a and --b")),
    }
}

fn norm_config(e: &EvalArgs) -> Outcome<NormConfig> {
    let method: Method = e.method.parse()?;
    if e.samples == 0 {
        return Err(invalid("--samples must be positive"));
    }
    Ok(NormConfig {
        method,
        mc: McConfig {
            samples: e.samples,
            seed: e.seed,
        },
        ..Default::default()
    })
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable report")
}

fn family_manifest(f: &FamilyArgs, size: i64) -> Outcome<WitnessManifest> {
    if let Some(path) = &f.manifest {
        let mut m = WitnessManifest::from_json(&read(path)?)?;
        m.family = f.family.into();
        return Ok(m.with_size(size));
    }
    let (space, b) = match (&f.space, &f.pair) {
        (Some(s), None) => {
            let doc: SpaceDocument = parse(s)?;
            let b = f.b.as_deref().map(load_matrix).transpose()?;
            (doc, b)
        }
        (None, Some(pair)) => {
            let (a, b) = load_pair(pair)?;
            let p = f.p.ok_or_else(|| invalid("--pair needs --p"))?;
            let q = f.q1.ok_or_else(|| invalid("--pair needs --q1"))?;
            let doc = SpaceDocument {
                matrix: MatrixDocument::from_matrix(&a),
                alpha: json!(f.alpha.unwrap_or(0.0)),
                p,
                q,
            };
            (doc, Some(b))
        }
        _ => return Err(invalid("give exactly one of --space, --pair or --manifest")),
    };
    let mut space = space;
    if f.space.is_some() {
        if let Some(p) = f.p {
            space.p = p;
        }
        if let Some(q) = f.q1 {
            space.q = q;
        }
        if let Some(a) = f.alpha {
            space.alpha = json!(a);
        }
    }
    let mut m = WitnessManifest::new(f.family.into(), space, size);
    m.b = b.as_ref().map(MatrixDocument::from_matrix);
    m.q2 = f.q2;
    m.weights = f.weights.clone();
    m.delta = f.delta;
    Ok(m)
}

fn law_csv(r: &LawReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["size", "x", "measured", "error_bound", "predicted", "ratio", "methods"])
        .expect("in-memory csv");
    for row in &r.rows {
        let methods: Vec<String> = row
            .methods
            .iter()
            .map(|m| to_value(m).as_str().unwrap_or_default().to_string())
            .collect();
        w.write_record([
            row.size.to_string(),
            row.x.to_string(),
            row.measured.to_string(),
            row.error_bound.to_string(),
            row.predicted.to_string(),
            row.ratio.to_string(),
            methods.join("+"),
        ])
        .expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

fn execute(cmd: &Command) -> Outcome<Report> {
    match cmd {
        Command::Expansive { matrix, n_max } => {
            let m = load_matrix(matrix)?;
            let cfg = ExpansivenessConfig {
                n_max: *n_max,
                ..Default::default()
            };
            let v = is_expansive(&m, &cfg)?;
            Ok(Report {
                params: json!({ "matrix": MatrixDocument::from_matrix(&m), "n_max": n_max }),
                seed: None,
                inconclusive: matches!(v, ExpansiveVerdict::Indeterminate { .. }),
                result: to_value(&v),
                csv: None,
            })
        }
        Command::Orbit { pair, mmax, jrange } => {
            let (a, b) = pair_matrices(pair)?;
            let (a, b) = (ExpansiveMatrix::new(a)?, ExpansiveMatrix::new(b)?);
            let verdict = orbit_is_finite(&a, &b, *mmax)?;
            let mut result = json!({ "verdict": verdict });
            if verdict.is_finite() {
                let dec = orbit_decomposition(&a, &b, *mmax)?;
                let reps: Vec<MatrixDocument> = dec.representatives.iter().map(MatrixDocument::from_matrix).collect();
                result["decomposition"] = json!({
                    "period": dec.period,
                    "count": dec.count(),
                    "representatives": reps,
                    "classes": dec.classes,
                });
            }
            if let Some(r) = jrange {
                result["brute_force_count"] = json!(brute_force_orbit_count(&a, &b, *r, 1e-9)?);
            }
            Ok(Report {
                params: json!({
                    "a": MatrixDocument::from_matrix(a.matrix()),
                    "b": MatrixDocument::from_matrix(b.matrix()),
                    "mmax": mmax,
                    "jrange": jrange,
                }),
                seed: None,
                result,
                inconclusive: false,
                csv: None,
            })
        }
        Command::Classify {
            space_a,
            space_b,
            mmax,
            unknown_if_inconclusive,
        } => {
            let (sa, sb) = (load_space(space_a)?, load_space(space_b)?);
            let opts = ClassifyOptions {
                m_max: *mmax,
                m_max_insufficient: *unknown_if_inconclusive,
                ..Default::default()
            };
            let report = classify_spaces(&sa, &sb, &opts)?;
            Ok(Report {
                params: json!({
                    "space_a": SpaceDocument::from_params(&sa),
                    "space_b": SpaceDocument::from_params(&sb),
                    "mmax": mmax,
                }),
                seed: None,
                inconclusive: matches!(report.classification, Classification::Unknown { .. }),
                result: to_value(&report),
                csv: None,
            })
        }
        Command::Norm { space, seq, eval } => {
            let s = load_space(space)?;
            let doc: SequenceDocument = parse(seq)?;
            let c: CoefficientSequence = doc.to_sequence()?.into();
            let cfg = norm_config(eval)?;
            let r = norm(&c, &s, &cfg)?;
            Ok(Report {
                params: json!({ "space": SpaceDocument::from_params(&s), "sequence": doc, "config": cfg }),
                seed: (cfg.method == Method::Mc).then_some(cfg.mc.seed),
                result: to_value(&r),
                inconclusive: false,
                csv: None,
            })
        }
        Command::Witness { family, size, out } => {
            let m = family_manifest(family, *size)?;
            let built = m.build()?;
            if let Some(path) = out {
                fs::write(path, m.to_json()).map_err(|e| invalid(format!("cannot write {}: {e}", path.display())))?;
            }
            let describe = |f: &tlseq::witnesses::WitnessFamily| {
                let support = match &f.sequence {
                    CoefficientSequence::Explicit(e) => {
                        json!({ "kind": "explicit", "entries": e.len(), "scales": e.scales() })
                    }
                    CoefficientSequence::Implicit(im) => {
                        let scales: Vec<Value> = im
                            .scales()
                            .iter()
                            .map(|s| json!({ "j": s.j, "lo": s.lo, "hi": s.hi, "max_modulus": s.max_modulus }))
                            .collect();
                        json!({ "kind": "implicit", "scales": scales })
                    }
                };
                json!({
                    "space": SpaceDocument::from_params(&f.space),
                    "law": f.law,
                    "params": f.params,
                    "support": support,
                })
            };
            let mut result = json!({ "a": describe(&built.a) });
            if let Some(b) = &built.b {
                result["b"] = describe(b);
            }
            if let Some(sep) = &built.separation {
                result["separation"] = to_value(sep);
            }
            Ok(Report {
                params: json!({ "manifest": m }),
                seed: Some(m.search.seed),
                result,
                inconclusive: false,
                csv: None,
            })
        }
        Command::Verify {
            family,
            sizes,
            target,
            eval,
            out,
            format,
        } => {
            let m = family_manifest(family, sizes.first().copied().unwrap_or(1))?;
            let paired = matches!(m.family, FamilyKind::Case1 | FamilyKind::Case2);
            let target = match target {
                Some(TargetArg::A) => LawTarget::A,
                Some(TargetArg::B) => LawTarget::B,
                Some(TargetArg::Ratio) => LawTarget::Ratio,
                None if paired => LawTarget::Ratio,
                None => LawTarget::A,
            };
            let cfg = norm_config(eval)?;
            let r = verify_norm_law(&m, sizes, target, &cfg)?;
            let csv = law_csv(&r);
            if let Some(path) = out {
                fs::write(path, &csv).map_err(|e| invalid(format!("cannot write {}: {e}", path.display())))?;
            }
            Ok(Report {
                params: json!({ "manifest": m, "sizes": sizes, "target": target, "config": cfg }),
                seed: Some(cfg.mc.seed),
                inconclusive: r.inconclusive,
                result: to_value(&r),
                csv: (*format == Format::Csv).then_some(csv),
            })
        }
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Expansive { .. } => "expansive",
        Command::Orbit { .. } => "orbit",
        Command::Classify { .. } => "classify",
        Command::Norm { .. } => "norm",
        Command::Witness { .. } => "witness",
        Command::Verify { .. } => "verify",
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let start = Instant::now();
    let name = command_name(&cli.command);
    match execute(&cli.command) {
        Ok(report) => {
            if let Some(csv) = &report.csv {
                let _ = out.write_all(csv.as_bytes());
            } else {
                let manifest = RunManifest {
                    command: name,
                    version: env!("CARGO_PKG_VERSION"),
                    params: &report.params,
                    seed: report.seed,
                    result: &report.result,
                    inconclusive: report.inconclusive,
                    timing_ms: start.elapsed().as_millis(),
                };
                let _ = writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&manifest).expect("report serializes")
                );
            }
            if report.inconclusive {
                EXIT_INCONCLUSIVE
            } else {
                EXIT_OK
            }
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
