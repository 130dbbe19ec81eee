mod commands;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use dowling_core::ratcore::parse_rational;
use dowling_core::{Error, ModelKind, Rational, Route};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Whitney triangle rows (equivalently, Dowling polynomial coefficients).
    Table,
    /// Exact Dowling polynomial values at `--x`.
    Eval,
    /// Identity suite over a model/parameter grid.
    Check,
    /// Truncated Dobinski series against exact values.
    Dobinski,
    /// Monte Carlo estimate of a random-sum degenerate moment.
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RouteArg {
    Egf,
    AltSum,
    StirlingExpand,
    BellForm,
}

impl From<RouteArg> for Route {
    fn from(r: RouteArg) -> Self {
        match r {
            RouteArg::Egf => Route::Egf,
            RouteArg::AltSum => Route::AltSum,
            RouteArg::StirlingExpand => Route::StirlingExpand,
            RouteArg::BellForm => Route::BellForm,
        }
    }
}

/// Probabilistic degenerate Whitney numbers and Dowling polynomials.
#[derive(Debug, Parser)]
#[command(name = "dowling", version)]
pub struct Args {
    #[arg(long, value_enum)]
    pub command: Command,

    /// Model as inline JSON, a path to a JSON file, or `all` (check only).
    /// Defaults to the point mass at 1, or every built-in model for check.
    #[arg(long)]
    pub model: Option<String>,

    /// Scale `m`; check sweeps 1, 2, 3 when omitted.
    #[arg(long = "m")]
    pub m: Option<u32>,

    /// Degeneracy `λ` as `num/den`; check sweeps 0, 1, 1/2, -1/3 when omitted.
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
    pub lambda: Option<Rational>,

    /// Shift `r`.
    #[arg(long = "r", default_value_t = 1)]
    pub r: u32,

    #[arg(long)]
    pub max_n: Option<usize>,

    /// Drop table columns with `k > max_k`.
    #[arg(long)]
    pub max_k: Option<usize>,

    /// Largest `N` in the summation identity.
    #[arg(long = "N", default_value_t = 6)]
    pub big_n: usize,

    /// Single `n` (eval, dobinski, mc) instead of the range `0..=max_n`.
    #[arg(long = "n")]
    pub n: Option<usize>,

    /// Number of summands `k` for mc.
    #[arg(long = "k", default_value_t = 1)]
    pub k: usize,

    #[arg(long = "x", value_parser = rational_arg, allow_hyphen_values = true)]
    pub x: Option<Rational>,

    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,

    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,

    #[arg(long, value_enum, default_value_t = RouteArg::Egf)]
    pub route: RouteArg,

    /// Output path; `stdout` or `-` writes to standard output.
    #[arg(long, default_value = "stdout")]
    pub out: String,

    /// Add 1 to the cached `r = 1` triangle entry `n,k` before checking.
    #[arg(long, hide = true, value_parser = pair_arg)]
    pub inject_fault: Option<(usize, usize)>,
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn pair_arg(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected n,k")?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| e.to_string());
    Ok((parse(a)?, parse(b)?))
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::MomentUnavailable { .. } => 3,
            Error::NonConvergence { .. } | Error::Inconsistent(_) => 1,
            _ => 2,
        };
        Self { code, message: e.to_string() }
    }
}

/// Rendered output plus whether every check in it passed.
pub struct Report {
    pub body: String,
    pub pass: bool,
}

/// `None` means every built-in model.
pub fn load_models(spec: Option<&str>, allow_all: bool) -> Result<Option<ModelKind>, Failure> {
    let Some(spec) = spec.map(str::trim) else {
        return Ok(None);
    };
    if spec == "all" {
        return if allow_all { Ok(None) } else { Err(Failure::config("--model all is only valid for check")) };
    }
    let text = if spec.starts_with('{') {
        spec.to_string()
    } else {
        fs::read_to_string(PathBuf::from(spec)).map_err(|e| Failure::config(format!("reading {spec}: {e}")))?
    };
    let kind: ModelKind =
        serde_json::from_str(&text).map_err(|e| Failure::config(format!("invalid model JSON: {e}")))?;
    kind.validate()?;
    Ok(Some(kind))
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("DOWLING_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::config(format!("DOWLING_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::config(e.to_string()))
}

fn emit(out: &str, body: &str) -> Result<(), Failure> {
    if out == "stdout" || out == "-" {
        let mut stdout = std::io::stdout().lock();
        stdout.write_all(body.as_bytes()).map_err(|e| Failure { code: 2, message: e.to_string() })
    } else {
        fs::write(out, body).map_err(|e| Failure::config(format!("writing {out}: {e}")))
    }
}

fn run(args: &Args) -> Result<bool, Failure> {
    if args.tol.is_nan() || args.tol <= 0.0 {
        return Err(Failure::config("--tol must be positive"));
    }
    configure_threads()?;
    let report = match args.command {
        Command::Table => commands::table(args)?,
        Command::Eval => commands::eval(args)?,
        Command::Check => commands::check(args)?,
        Command::Dobinski => commands::dobinski(args)?,
        Command::Mc => commands::mc(args)?,
    };
    emit(&args.out, &report.body)?;
    Ok(report.pass)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("dowling: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
