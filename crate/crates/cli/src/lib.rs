//! Command-line front end: evaluation, counting, zero location, verification
//! matrices and figure output.

pub mod config;
pub mod svg;
pub mod verify;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use eisenzero::bounds;
use eisenzero::eisenstein::{self, EvalError};
use eisenzero::moebius::gamma_for_lambda;
use eisenzero::winding::{self, count_zeros, WindingError};
use eisenzero::zerofinder::{figure_dataset, to_csv, FigureRow, ZeroError};
use eisenzero::{ExtRational, HalfPlanePoint, SeriesKind};
use serde_json::{json, Value};

use config::RunConfig;
use verify::Suite;

#[derive(Parser, Debug)]
#[command(name = "eisenzero", version, about = "Evaluate Eisenstein series and count and locate their zeros")]
pub struct Cli {
    /// Plain `key = value` configuration file (falls back to $EISENZERO_CONFIG).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Target absolute error of evaluations.
    #[arg(long, global = true)]
    pub prec: Option<f64>,
    /// Worker threads for verification matrices.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Machine-readable output for `zeros` and `verify`.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Value of a series at a point (`a+bi` or `inf`), optionally slashed by γ_λ.
    Eval {
        #[arg(long)]
        kind: SeriesKind,
        #[arg(long)]
        k: u32,
        #[arg(long, allow_hyphen_values = true)]
        tau: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<ExtRational>,
    },
    /// Weighted number of zeros in the translate γ_λ F.
    Count {
        #[arg(long)]
        kind: SeriesKind,
        #[arg(long)]
        k: u32,
        #[arg(long, allow_hyphen_values = true, default_value = "inf")]
        lambda: ExtRational,
    },
    /// Located zeros in the translate γ_λ F, as CSV (or JSON with --json).
    Zeros {
        #[arg(long)]
        kind: SeriesKind,
        #[arg(long)]
        k: u32,
        #[arg(long, allow_hyphen_values = true, default_value = "inf")]
        lambda: ExtRational,
    },
    /// Runs a verification matrix; exits non-zero if a proven cell fails.
    Verify {
        /// table1, thm2, thm3, thm4, bounds or valence
        suite: Suite,
        #[arg(long, default_value_t = 51)]
        k_max: u32,
    },
    /// Zero dataset over several translates, as CSV or SVG.
    Figure {
        #[arg(long)]
        kind: SeriesKind,
        #[arg(long)]
        k: u32,
        /// Comma-separated cusps, e.g. "0,1/2,-1/2,inf".
        #[arg(long, allow_hyphen_values = true, default_value = "")]
        lambdas: String,
        /// Comma-separated horizontal shifts.
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        shifts: String,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Svg,
}

/// Failure with its process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

pub mod exit {
    pub const FAILED: i32 = 1;
    pub const PARSE: i32 = 2;
    pub const ACCURACY: i32 = 3;
    pub const UNRELIABLE_SNAP: i32 = 4;
    pub const IO: i32 = 5;
    pub const COUNT_MISMATCH: i32 = 6;
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        let code = match e {
            EvalError::AccuracyUnreachable { .. } | EvalError::NonConvergent { .. } => exit::ACCURACY,
            EvalError::Moebius(_) => exit::PARSE,
            _ => exit::FAILED,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<WindingError> for Failure {
    fn from(e: WindingError) -> Self {
        match e {
            WindingError::UnreliableSnap { .. } => Failure::new(exit::UNRELIABLE_SNAP, e.to_string()),
            WindingError::Eval(inner) => inner.into(),
            WindingError::InvalidInput(_) => Failure::new(exit::PARSE, e.to_string()),
            _ => Failure::new(exit::FAILED, e.to_string()),
        }
    }
}

impl From<ZeroError> for Failure {
    fn from(e: ZeroError) -> Self {
        match e {
            ZeroError::CountMismatch { .. } => Failure::new(exit::COUNT_MISMATCH, e.to_string()),
            ZeroError::Winding(inner) => inner.into(),
            ZeroError::Eval(inner) => inner.into(),
            _ => Failure::new(exit::FAILED, e.to_string()),
        }
    }
}

/// Parses `inf`, `a+bi`, `a-bi`, `bi`, `i` and `a+i`.
pub fn parse_tau(s: &str) -> Result<HalfPlanePoint, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if matches!(t.as_str(), "inf" | "∞" | "i∞" | "iinf") {
        return Ok(HalfPlanePoint::i_infinity());
    }
    let bad = || format!("cannot parse τ = {s:?} (expected a+bi or inf)");
    let body = t.strip_suffix('i').ok_or_else(bad)?;
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&j| {
        (bytes[j] == b'+' || bytes[j] == b'-') && !matches!(bytes[j - 1], b'e' | b'E')
    });
    let (re, im) = match split {
        Some(j) => (&body[..j], &body[j..]),
        None => ("0", body),
    };
    let re: f64 = re.parse().map_err(|_| bad())?;
    let im: f64 = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse().map_err(|_| bad())?,
    };
    if !re.is_finite() || !im.is_finite() {
        return Err(bad());
    }
    HalfPlanePoint::finite(re, im).map_err(|e| e.to_string())
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, Failure>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse::<T>().map_err(|e| Failure::new(exit::PARSE, format!("{x:?}: {e}"))))
        .collect()
}

fn compact(v: &Value) -> String {
    serde_json::to_string(v).expect("json")
}

/// Parses the arguments and runs the command, writing to `out`. Returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return exit::PARSE;
            }
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    let mut cfg = RunConfig::load(cli.config.as_deref()).map_err(|e| {
        let code = match e {
            config::ConfigError::Io { .. } => exit::IO,
            _ => exit::PARSE,
        };
        Failure::new(code, e.to_string())
    })?;
    if let Some(p) = cli.prec {
        cfg.target_abs_err = p;
    }
    if let Some(w) = cli.workers {
        cfg.workers = w;
    }
    cfg.validate().map_err(|e| Failure::new(exit::PARSE, e.to_string()))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Failure::new(exit::FAILED, e.to_string()))?;
    let io = |e: std::io::Error| Failure::new(exit::IO, e.to_string());

    match cli.command {
        Command::Eval { kind, k, tau, lambda } => {
            let point = parse_tau(&tau).map_err(|m| Failure::new(exit::PARSE, m))?;
            let params = cfg.eval_params();
            let v = match &lambda {
                None => eisenstein::eval_series(kind, k, &point, &params)?,
                Some(l) => eisenstein::eval_slashed(kind, k, &gamma_for_lambda(l), &point, &params)?,
            };
            let doc = json!({
                "kind": kind.to_string(),
                "k": k,
                "tau": tau,
                "lambda": lambda.map(|l| l.to_string()),
                "re": v.value.re,
                "im": v.value.im,
                "abs_err": v.abs_err,
            });
            writeln!(out, "{}", compact(&doc)).map_err(io)?;
            Ok(0)
        }
        Command::Count { kind, k, lambda } => {
            let opts = cfg.count_options();
            let w = if kind == SeriesKind::GG && lambda.is_infinite() && k % 2 == 1 {
                winding::count_by_sign_changes(k)?
            } else {
                count_zeros(kind, k, &lambda, &opts)?
            };
            let expected = bounds::expected_count(kind, k, &lambda).ok();
            let doc = json!({
                "kind": kind.to_string(),
                "k": k,
                "lambda": lambda.to_string(),
                "count": w.value.to_string(),
                "raw": w.raw,
                "snap_dist": w.snap_dist,
                "method": w.method.to_string(),
                "boundary_zeros": w.boundary_zeros.iter().map(|z| json!([z.re, z.im])).collect::<Vec<_>>(),
                "expected": expected.as_ref().map(|e| e.value.to_string()),
                "provenance": expected.as_ref().map(|e| e.provenance.to_string()),
            });
            writeln!(out, "{}", compact(&doc)).map_err(io)?;
            Ok(0)
        }
        Command::Zeros { kind, k, lambda } => {
            let opts = cfg.count_options();
            let rows = pool.install(|| figure_dataset(kind, k, &[lambda], &[0], &opts))?;
            if cli.json {
                writeln!(out, "{}", compact(&rows_json(&rows))).map_err(io)?;
            } else {
                write!(out, "{}", to_csv(&rows)).map_err(io)?;
            }
            Ok(0)
        }
        Command::Verify { suite, k_max } => {
            if k_max < 3 || k_max % 2 == 0 {
                return Err(Failure::new(exit::PARSE, format!("--k-max must be odd and at least 3, got {k_max}")));
            }
            let opts = cfg.count_options();
            let report = pool.install(|| verify::run(suite, k_max, &opts));
            if cli.json {
                writeln!(out, "{}", compact(&report.to_json())).map_err(io)?;
            } else {
                write!(out, "{}", report.to_text()).map_err(io)?;
            }
            Ok(if report.passed() { 0 } else { exit::FAILED })
        }
        Command::Figure { kind, k, lambdas, shifts, format, out: path } => {
            let lams: Vec<ExtRational> = parse_list(&lambdas)?;
            let shifts: Vec<i64> = parse_list(&shifts)?;
            let opts = cfg.count_options();
            let rows = pool.install(|| figure_dataset(kind, k, &lams, &shifts, &opts))?;
            let text = match format {
                Format::Csv => to_csv(&rows),
                Format::Svg => svg::render(&rows, &lams, &format!("zeros of {kind}_{k}")),
            };
            match path {
                Some(p) => fs::write(&p, text).map_err(|e| Failure::new(exit::IO, format!("{}: {e}", p.display())))?,
                None => write!(out, "{text}").map_err(io)?,
            }
            Ok(0)
        }
    }
}

fn rows_json(rows: &[FigureRow]) -> Value {
    let items: Vec<Value> = rows
        .iter()
        .map(|r| {
            let z = r.location();
            json!({
                "kind": r.kind.to_string(),
                "k": r.k,
                "lambda": r.zero.lambda.to_string(),
                "re": z.map(|z| z.re),
                "im": z.map(|z| z.im),
                "residual": r.zero.residual,
                "multiplicity": r.zero.multiplicity,
                "is_cusp": r.zero.is_cusp,
                "domain_tag": r.domain_tag(),
            })
        })
        .collect();
    Value::Array(items)
}

#[cfg(test)]
mod tests {
    use super::*;
    use eisenzero::Complex64;

    #[test]
    fn tau_forms() {
        let c = |s: &str| parse_tau(s).unwrap().as_complex().unwrap();
        assert_eq!(c("0.5+3.63271i"), Complex64::new(0.5, 3.63271));
        assert_eq!(c("0+2i"), Complex64::new(0.0, 2.0));
        assert_eq!(c("2i"), Complex64::new(0.0, 2.0));
        assert_eq!(c("i"), Complex64::new(0.0, 1.0));
        assert_eq!(c("-0.5+i"), Complex64::new(-0.5, 1.0));
        assert_eq!(c("1e-3+1.5e+0i"), Complex64::new(1e-3, 1.5));
        assert!(parse_tau("inf").unwrap().is_i_infinity());
        for bad in ["", "1", "0.5-2i", "x+yi", "0.5+0i", "nan+1i"] {
            assert!(parse_tau(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn lists() {
        let v: Vec<ExtRational> = parse_list("0, 1/2,-1/2,inf").unwrap();
        assert_eq!(v.len(), 4);
        let e: Vec<ExtRational> = parse_list("").unwrap();
        assert!(e.is_empty());
        assert_eq!(parse_list::<i64>("1,x").unwrap_err().code, exit::PARSE);
    }

    #[test]
    fn exit_code_mapping() {
        let snap: Failure = WindingError::UnreliableSnap { raw: 0.4, dist: 0.1 }.into();
        assert_eq!(snap.code, exit::UNRELIABLE_SNAP);
        let acc: Failure = EvalError::AccuracyUnreachable { achieved: 1.0, target: 0.1 }.into();
        assert_eq!(acc.code, exit::ACCURACY);
        let nested: Failure = ZeroError::Winding(WindingError::Eval(EvalError::AccuracyUnreachable {
            achieved: 1.0,
            target: 0.1,
        }))
        .into();
        assert_eq!(nested.code, exit::ACCURACY);
    }
}
