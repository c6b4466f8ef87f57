//! Command-line front end: curve specs, the `frame`, `check`, `synthesize` and
//! `family` commands, and their CSV/JSON artifacts.
//!
//! Exit codes: 0 pass, 1 usage or input error, 2 degenerate frame,
//! 3 criterion failure.

use std::f64::consts::TAU;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::curve::{helix1, NullCurve};
use crate::error::Error;
use crate::families::{closure_check, make_null_geodesic, FamilySpec};
use crate::frame::{frame_curve, integrate_frenet, FrameSample, FramedCurve, FrenetOptions};
use crate::grid::ParameterGrid;
use crate::lorentz::Vec3;
use crate::profile::Profile;
use crate::quad::cumulative_integral;
use crate::similarity::{
    binormal_criterion, check_tangent_similarity, fit_end, is_bertrand_pair, normal_criterion,
    ratio_criterion, synthesize_similar, AnchorPair, VariableTransformation,
};

/// Column order of `frame` output.
pub const FRAME_COLUMNS: [&str; 17] = [
    "s", "x1", "x2", "x3", "alpha1", "alpha2", "alpha3", "beta1", "beta2", "beta3", "gamma1",
    "gamma2", "gamma3", "kappa", "tau", "phi", "f",
];

/// Columns appended by `synthesize`.
pub const SYNTH_COLUMNS: [&str; 4] = ["s_a", "lambda", "kappa_residual", "tau_residual"];

pub const DEFAULT_SAMPLES: usize = 1001;
const DEFAULT_DOMAIN: (f64, f64) = (0.0, TAU);

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("Usage: {0}")]
    Usage(String),
    #[error("ParseError: {file}: {message}")]
    Parse {
        file: String,
        message: String,
        line: usize,
        column: usize,
    },
    #[error("UnknownBuiltin: {0:?} (known: helix1, geodesic)")]
    UnknownBuiltin(String),
    #[error("ValidationError: {0}")]
    Validation(String),
    #[error("IoError: {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {}", .0.name(), .0)]
    Core(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::GeodesicDegeneracy { .. } | Error::NotNull { .. }) => 2,
            _ => 1,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Tangent,
    Normal,
    Binormal,
    Ratio,
    Bertrand,
}

/// Tolerances, resolution and output options shared by all commands.
#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Criterion tolerance
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Grid resolution, overriding the curve spec
    #[arg(long)]
    pub samples: Option<usize>,
    /// Output format for tables (reports are always JSON)
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file (default: standard output)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Nullity tolerance applied when a curve spec is resolved
    #[arg(long, default_value_t = 1e-6)]
    pub eps_null: f64,
}

impl RunConfig {
    fn validate(&self) -> CliResult<()> {
        if !(self.tol > 0.0) || !(self.eps_null > 0.0) {
            return Err(CliError::Usage("tolerances must be positive".into()));
        }
        if let Some(n) = self.samples {
            if n < 5 {
                return Err(CliError::Usage(format!(
                    "--samples must be at least 5, got {n}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "nullframe",
    version,
    about = "Cartan frames and similarity checks for null curves in Minkowski 3-space"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Frame a curve: s, position, frame, kappa, tau, phi and f per grid point
    Frame {
        #[arg(long)]
        curve: PathBuf,
        #[command(flatten)]
        config: RunConfig,
    },
    /// Run a similarity criterion on two curves (exit 0 pass, 3 fail)
    Check {
        #[arg(long)]
        curve_a: PathBuf,
        #[arg(long)]
        curve_b: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long, allow_negative_numbers = true)]
        anchor_a: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        anchor_b: Option<f64>,
        /// Density for tangent/bertrand modes (default: inferred from curvatures)
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        #[command(flatten)]
        config: RunConfig,
    },
    /// Synthesize the curve similar to --curve under the density --lambda
    Synthesize {
        #[arg(long)]
        curve: PathBuf,
        /// A constant or a named profile: "2+sin", "affine:a,b", "sin:a,b,c"
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        /// Parameter domain of the new curve as "t0,t1"
        #[arg(long, allow_hyphen_values = true)]
        domain: Option<String>,
        #[arg(long, allow_negative_numbers = true)]
        anchor_a: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        anchor_b: Option<f64>,
        #[command(flatten)]
        config: RunConfig,
    },
    /// Check that a family is closed under synthesis with --lambda
    Family {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        #[command(flatten)]
        config: RunConfig,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    /// `(t, cos t, sin t)`
    Helix1,
    /// `s (1, 1, 0)`
    Geodesic,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Builtin(Builtin),
    Samples {
        s: Vec<f64>,
        points: Vec<Vec3>,
    },
    Frenet {
        kappa: Profile,
        tau: Profile,
        initial: Option<InitialFrame>,
        origin: Vec3,
    },
    Family(FamilySpec),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveSpec {
    pub source: Source,
    pub domain: (f64, f64),
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialFrame {
    pub alpha: Vec3,
    pub beta: Vec3,
    pub gamma: Vec3,
}

impl InitialFrame {
    fn at(&self, s: f64, kappa: f64, tau: f64) -> FrameSample {
        FrameSample {
            s,
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            kappa,
            tau,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    kappa: Option<Profile>,
    tau: Option<f64>,
    point: Option<Vec3>,
    direction: Option<Vec3>,
    initial: Option<InitialFrame>,
    origin: Option<Vec3>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    kind: String,
    name: Option<String>,
    params: Option<RawParams>,
    domain: Option<[f64; 2]>,
    samples: Option<usize>,
    path: Option<PathBuf>,
    s: Option<Vec<f64>>,
    points: Option<Vec<Vec3>>,
    kappa: Option<Profile>,
    tau: Option<Profile>,
    initial: Option<InitialFrame>,
    origin: Option<Vec3>,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

/// Parses a curve-spec JSON document. Relative sample-file paths are resolved
/// against `base`.
pub fn parse_curve_spec(text: &str, file: &str, base: Option<&Path>) -> CliResult<CurveSpec> {
    let raw: RawSpec = serde_json::from_str(text).map_err(|e| CliError::Parse {
        file: file.to_string(),
        message: e.to_string(),
        line: e.line(),
        column: e.column(),
    })?;
    let domain = match raw.domain {
        Some([a, b]) => {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(invalid(format!(
                    "domain [{a}, {b}] must be finite and increasing"
                )));
            }
            (a, b)
        }
        None => DEFAULT_DOMAIN,
    };
    let samples = raw.samples.unwrap_or(DEFAULT_SAMPLES);
    if samples < 5 {
        return Err(invalid(format!(
            "samples must be at least 5, got {samples}"
        )));
    }
    let name = || {
        raw.name
            .clone()
            .ok_or_else(|| invalid(format!("kind {:?} needs a name", raw.kind)))
    };
    let source = match raw.kind.as_str() {
        "builtin" => match name()?.as_str() {
            "helix1" => Source::Builtin(Builtin::Helix1),
            "geodesic" => Source::Builtin(Builtin::Geodesic),
            other => return Err(CliError::UnknownBuiltin(other.to_string())),
        },
        "samples" => {
            let (s, points) = match (&raw.path, raw.s, raw.points) {
                (Some(p), None, None) => {
                    let path = match base {
                        Some(b) if p.is_relative() => b.join(p),
                        _ => p.clone(),
                    };
                    read_samples_csv(&path)?
                }
                (None, Some(s), Some(points)) => (s, points),
                _ => {
                    return Err(invalid(
                        "samples spec needs either \"path\" or both \"s\" and \"points\"",
                    ))
                }
            };
            if s.len() != points.len() {
                return Err(invalid(format!(
                    "{} parameters for {} points",
                    s.len(),
                    points.len()
                )));
            }
            Source::Samples { s, points }
        }
        "frenet" => Source::Frenet {
            kappa: raw
                .kappa
                .ok_or_else(|| invalid("frenet spec needs \"kappa\""))?,
            tau: raw
                .tau
                .ok_or_else(|| invalid("frenet spec needs \"tau\""))?,
            initial: raw.initial,
            origin: raw.origin.unwrap_or(Vec3::ZERO),
        },
        "family" => {
            let p = raw
                .params
                .ok_or_else(|| invalid("family spec needs \"params\""))?;
            let origin = p.origin.unwrap_or(Vec3::ZERO);
            Source::Family(match name()?.as_str() {
                "geodesic" => FamilySpec::Geodesic {
                    point: p.point.unwrap_or(Vec3::ZERO),
                    direction: p
                        .direction
                        .ok_or_else(|| invalid("geodesic family needs \"direction\""))?,
                },
                "helix" => {
                    let kappa = match p.kappa {
                        Some(Profile::Constant(k)) => k,
                        Some(_) => return Err(invalid("helix curvature must be a constant")),
                        None => return Err(invalid("helix family needs \"kappa\"")),
                    };
                    let tau = p.tau.ok_or_else(|| invalid("helix family needs \"tau\""))?;
                    FamilySpec::Helix {
                        kappa,
                        tau,
                        initial: frame_or_default(p.initial, domain.0, kappa, tau),
                        origin,
                    }
                }
                "torsion_free" => {
                    let kappa = p
                        .kappa
                        .ok_or_else(|| invalid("torsion_free family needs \"kappa\""))?;
                    FamilySpec::TorsionFree {
                        kappa,
                        initial: frame_or_default(p.initial, domain.0, kappa.eval(domain.0), 0.0),
                        origin,
                    }
                }
                other => return Err(invalid(format!("unknown family {other:?}"))),
            })
        }
        other => return Err(invalid(format!("unknown kind {other:?}"))),
    };
    Ok(CurveSpec {
        source,
        domain,
        samples,
    })
}

fn frame_or_default(initial: Option<InitialFrame>, s: f64, kappa: f64, tau: f64) -> FrameSample {
    match initial {
        Some(f) => f.at(s, kappa, tau),
        None => FrameSample::canonical(s, kappa, tau),
    }
}

/// Reads `s,x1,x2,x3` columns (by header name) from a CSV file, such as the
/// output of `frame` or `synthesize`.
pub fn read_samples_csv(path: &Path) -> CliResult<(Vec<f64>, Vec<Vec3>)> {
    let label = path.display().to_string();
    let bad = |e: csv::Error| invalid(format!("{label}: {e}"));
    let mut rdr = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(source) => CliError::Io {
            path: label.clone(),
            source,
        },
        other => invalid(format!("{label}: {other:?}")),
    })?;
    let headers = rdr.headers().map_err(bad)?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| invalid(format!("{label}: missing column {name:?}")))
    };
    let idx = [col("s")?, col("x1")?, col("x2")?, col("x3")?];
    let (mut s, mut points) = (Vec::new(), Vec::new());
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(bad)?;
        let mut v = [0.0; 4];
        for (k, &i) in idx.iter().enumerate() {
            let cell = rec.get(i).unwrap_or("");
            v[k] = cell
                .trim()
                .parse()
                .map_err(|_| invalid(format!("{label}: row {}: bad number {cell:?}", row + 2)))?;
        }
        s.push(v[0]);
        points.push(Vec3::new(v[1], v[2], v[3]));
    }
    Ok((s, points))
}

/// A resolved curve with its evaluation grid.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub curve: Arc<NullCurve>,
    pub grid: ParameterGrid,
}

/// Builds the curve described by `spec` and checks that it is null on its grid.
pub fn resolve(spec: &CurveSpec, samples: Option<usize>, eps_null: f64) -> CliResult<Resolved> {
    let n = samples.unwrap_or(spec.samples);
    let (t0, t1) = spec.domain;
    let uniform = || ParameterGrid::uniform(t0, t1, n);
    let (curve, grid) = match &spec.source {
        Source::Builtin(Builtin::Helix1) => (helix1(spec.domain)?, uniform()?),
        Source::Builtin(Builtin::Geodesic) => (
            make_null_geodesic(Vec3::ZERO, Vec3::new(1.0, 1.0, 0.0), spec.domain)?,
            uniform()?,
        ),
        Source::Samples { s, points } => {
            let grid = ParameterGrid::new(s.clone())?;
            (NullCurve::sampled(&grid, points.clone())?, grid)
        }
        Source::Frenet {
            kappa,
            tau,
            initial,
            origin,
        } => {
            let grid = uniform()?;
            let init = frame_or_default(*initial, t0, kappa.eval(t0), tau.eval(t0));
            let fc = integrate_frenet(
                kappa.to_fn(),
                tau.to_fn(),
                &init,
                *origin,
                &grid,
                &FrenetOptions::default(),
            )?;
            let curve = Arc::clone(fc.curve());
            return check_null(curve, grid, eps_null);
        }
        Source::Family(f) => {
            let grid = uniform()?;
            let curve = Arc::clone(f.generate(&grid)?.curve());
            return check_null(curve, grid, eps_null);
        }
    };
    check_null(Arc::new(curve), grid, eps_null)
}

fn check_null(curve: Arc<NullCurve>, grid: ParameterGrid, eps_null: f64) -> CliResult<Resolved> {
    let report = curve.nullity_check(&grid, eps_null)?;
    if !report.pass {
        return Err(invalid(format!(
            "curve is not null: residual {:e} at s = {}",
            report.max_residual, report.worst_s
        )));
    }
    Ok(Resolved { curve, grid })
}

pub fn load_curve_spec(path: &Path) -> CliResult<CurveSpec> {
    let label = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: label.clone(),
        source,
    })?;
    parse_curve_spec(&text, &label, path.parent())
}

/// Numeric table with named columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    /// CSV with 17 significant digits per value.
    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format!("{v:.16e}")))
                .expect("in-memory write");
        }
        w.into_inner().expect("in-memory write")
    }

    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("serializable table");
        out.push(b'\n');
        out
    }

    pub fn render(&self, format: Format) -> Vec<u8> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// One row per grid point in [`FRAME_COLUMNS`] order; φ is the running
/// integral of κ from the first grid point.
pub fn frame_table(fc: &FramedCurve) -> CliResult<Table> {
    let s = fc.grid().values();
    let phi = cumulative_integral(s, &fc.kappas());
    let mut rows = Vec::with_capacity(s.len());
    for (f, p) in fc.samples().iter().zip(&phi) {
        let x = fc.curve().evaluate(f.s, 0)?;
        let mut row = vec![f.s];
        for v in [x, f.alpha, f.beta, f.gamma] {
            row.extend(v.to_array());
        }
        row.extend([f.kappa, f.tau, *p, f.ratio()]);
        rows.push(row);
    }
    Ok(Table {
        columns: FRAME_COLUMNS.iter().map(|c| c.to_string()).collect(),
        rows,
    })
}

fn emit(bytes: &[u8], out: &Option<PathBuf>, stdout: &mut dyn Write) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => match stdout.write_all(bytes) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Io {
                path: "<stdout>".into(),
                source: e,
            }),
            _ => Ok(()),
        },
    }
}

fn emit_json(v: &Value, out: &Option<PathBuf>, stdout: &mut dyn Write) -> CliResult<()> {
    let mut bytes = serde_json::to_vec_pretty(v).expect("serializable report");
    bytes.push(b'\n');
    emit(&bytes, out, stdout)
}

fn parse_profile(text: &str) -> CliResult<Profile> {
    text.parse()
        .map_err(|e: Error| CliError::Usage(format!("--lambda: {e}")))
}

fn parse_domain(text: &str) -> CliResult<(f64, f64)> {
    let parts: Vec<&str> = text.split(',').collect();
    let nums: Option<Vec<f64>> = parts.iter().map(|p| p.trim().parse().ok()).collect();
    match nums.as_deref() {
        Some([a, b]) if a.is_finite() && b.is_finite() && a < b => Ok((*a, *b)),
        _ => Err(CliError::Usage(format!(
            "--domain expects \"t0,t1\" with t0 < t1, got {text:?}"
        ))),
    }
}

/// Errors that make a criterion inapplicable to the pair; reported as a failed check.
fn inapplicable(e: &Error) -> bool {
    matches!(
        e,
        Error::KappaVanishes { .. }
            | Error::TauVanishes { .. }
            | Error::SignChange { .. }
            | Error::NonPositiveLambda { .. }
            | Error::DomainOverflow { .. }
    )
}

fn run_frame(curve: &Path, config: &RunConfig, stdout: &mut dyn Write) -> CliResult<i32> {
    let r = resolve(&load_curve_spec(curve)?, config.samples, config.eps_null)?;
    let fc = frame_curve(r.curve, &r.grid)?;
    emit(
        &frame_table(&fc)?.render(config.format),
        &config.out,
        stdout,
    )?;
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn run_check(
    curve_a: &Path,
    curve_b: &Path,
    mode: Mode,
    anchor_a: Option<f64>,
    anchor_b: Option<f64>,
    lambda: Option<&str>,
    config: &RunConfig,
    stdout: &mut dyn Write,
) -> CliResult<i32> {
    let profile = lambda.map(parse_profile).transpose()?;
    let ra = resolve(&load_curve_spec(curve_a)?, config.samples, config.eps_null)?;
    let rb = resolve(&load_curve_spec(curve_b)?, config.samples, config.eps_null)?;
    let fa = frame_curve(ra.curve, &ra.grid)?;
    let fb = frame_curve(rb.curve, &rb.grid)?;
    let anchor = match (anchor_a, anchor_b) {
        (Some(a), Some(b)) => Some(AnchorPair::new(a, b)),
        _ => None,
    };
    let tol = config.tol;
    let transformation = |anchor: AnchorPair| -> crate::error::Result<VariableTransformation> {
        match profile {
            Some(p) => VariableTransformation::from_density(p.to_fn(), fb.grid(), anchor),
            None => Ok(normal_criterion(&fa, &fb, Some(anchor), tol)?.1),
        }
    };
    let outcome = (|| -> crate::error::Result<(Value, bool)> {
        Ok(match mode {
            Mode::Tangent => {
                let t = transformation(anchor.ok_or(Error::AnchorRequired)?)?;
                let r = check_tangent_similarity(&fa, &fb, &t, tol)?;
                (json!(r), r.pass)
            }
            Mode::Normal => {
                let r = normal_criterion(&fa, &fb, anchor, tol)?.0;
                (json!(r), r.pass)
            }
            Mode::Binormal => {
                let r = binormal_criterion(&fa, &fb, anchor, tol)?.0;
                (json!(r), r.pass)
            }
            Mode::Ratio => {
                let r = ratio_criterion(&fa, &fb, anchor, tol)?;
                (json!(r), r.pass)
            }
            Mode::Bertrand => {
                let t = transformation(anchor.ok_or(Error::AnchorRequired)?)?;
                let r = is_bertrand_pair(&fa, &fb, &t, tol)?;
                (json!(r), r.dependent)
            }
        })
    })();
    match outcome {
        Ok((report, pass)) => {
            emit_json(
                &json!({"mode": mode, "pass": pass, "report": report}),
                &config.out,
                stdout,
            )?;
            Ok(if pass { 0 } else { 3 })
        }
        Err(e) if inapplicable(&e) => {
            let error = json!({"kind": e.name(), "message": e.to_string()});
            emit_json(
                &json!({"mode": mode, "pass": false, "error": error}),
                &config.out,
                stdout,
            )?;
            Ok(3)
        }
        Err(e) => Err(e.into()),
    }
}

fn run_synthesize(
    curve: &Path,
    lambda: &str,
    domain: Option<&str>,
    anchor_a: Option<f64>,
    anchor_b: Option<f64>,
    config: &RunConfig,
    stdout: &mut dyn Write,
) -> CliResult<i32> {
    let profile = parse_profile(lambda)?;
    let domain = domain.map(parse_domain).transpose()?;
    let spec = load_curve_spec(curve)?;
    let ra = resolve(&spec, config.samples, config.eps_null)?;
    let fa = frame_curve(ra.curve, &ra.grid)?;
    let (lo, hi) = fa.curve().domain();
    let s_a0 = anchor_a.unwrap_or(lo);
    let anchor = AnchorPair::new(s_a0, anchor_b.unwrap_or(s_a0));
    let lam = profile.to_fn();
    let (t0, t1) = match domain {
        Some(d) => d,
        None => (anchor.s_b, fit_end(&lam, anchor, hi)?),
    };
    let n = config.samples.unwrap_or(ra.grid.len());
    let grid = ParameterGrid::uniform(t0, t1, n)?;
    let syn = synthesize_similar(&fa, lam, &grid, anchor, fa.curve().evaluate(s_a0, 0)?)?;
    let fb = frame_curve(Arc::clone(&syn.curve), &grid)?;
    let mut table = frame_table(&fb)?;
    table
        .columns
        .extend(SYNTH_COLUMNS.iter().map(|c| c.to_string()));
    let t = &syn.transformation;
    for ((row, b), (&s_a, &l)) in table
        .rows
        .iter_mut()
        .zip(fb.samples())
        .zip(t.s_a().iter().zip(t.lambda()))
    {
        let a = fa.frame_at(s_a)?;
        row.extend([s_a, l, b.kappa - l * a.kappa, b.tau - l * a.tau]);
    }
    emit(&table.render(config.format), &config.out, stdout)?;
    Ok(0)
}

fn run_family(
    curve: &Path,
    lambda: Option<&str>,
    config: &RunConfig,
    stdout: &mut dyn Write,
) -> CliResult<i32> {
    let profile = lambda
        .map(parse_profile)
        .transpose()?
        .unwrap_or(Profile::Constant(1.0));
    let spec = load_curve_spec(curve)?;
    let Source::Family(family) = &spec.source else {
        return Err(invalid(
            "the family command needs a spec of kind \"family\"",
        ));
    };
    let n = config.samples.unwrap_or(spec.samples);
    let grid = ParameterGrid::uniform(spec.domain.0, spec.domain.1, n).map_err(CliError::from)?;
    let report = closure_check(family, &grid, profile.to_fn(), config.tol)?;
    emit_json(&json!(report), &config.out, stdout)?;
    Ok(if report.pass { 0 } else { 3 })
}

fn execute(command: &Command, stdout: &mut dyn Write) -> CliResult<i32> {
    match command {
        Command::Frame { curve, config } => {
            config.validate()?;
            run_frame(curve, config, stdout)
        }
        Command::Check {
            curve_a,
            curve_b,
            mode,
            anchor_a,
            anchor_b,
            lambda,
            config,
        } => {
            config.validate()?;
            run_check(
                curve_a,
                curve_b,
                *mode,
                *anchor_a,
                *anchor_b,
                lambda.as_deref(),
                config,
                stdout,
            )
        }
        Command::Synthesize {
            curve,
            lambda,
            domain,
            anchor_a,
            anchor_b,
            config,
        } => {
            config.validate()?;
            run_synthesize(
                curve,
                lambda,
                domain.as_deref(),
                *anchor_a,
                *anchor_b,
                config,
                stdout,
            )
        }
        Command::Family {
            curve,
            lambda,
            config,
        } => {
            config.validate()?;
            run_family(curve, lambda.as_deref(), config, stdout)
        }
    }
}

/// Runs the command line `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                1
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    match execute(&cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
