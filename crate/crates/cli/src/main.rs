use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bograph::corpus;
use bograph::expr::parse_rational;
use bograph::plot::{eigen_csv, eigen_svg};
use bograph::stability::{
    analyze, char_poly, clean, factored_cubic_criterion, match_cubic_factorization, CubicMode, StabilityError,
    DEFAULT_TOL,
};
use bograph::{
    check_causal_completeness, derive_system, from_json, parse, state_space, BondGraphModel, DeriveError,
    NumericMatrix, ParseReport, Rational, Semantics, StateSpaceError, StateSpaceModel,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Parser)]
#[command(name = "bograph", version, about = "Bond-graph models to state space and stability verdicts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, check labels and report causality.
    Validate(Opts),
    /// List the derived equations.
    Derive(Opts),
    /// Symbolic A and B matrices.
    Statespace(Opts),
    /// Eigenvalue-based stability verdict.
    Stability(Opts),
    /// Eigenvalues as CSV and an SVG scatter.
    Eigenplot(Opts),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
    Svg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SemanticsArg {
    Standard,
    PaperLiteral,
}

#[derive(Args)]
struct Opts {
    /// Built-in model name, e.g. rlc.
    #[arg(long, conflicts_with_all = ["input", "matrix"])]
    example: Option<String>,
    /// Model file, DSL or JSON (by .json extension).
    #[arg(long, conflicts_with = "matrix")]
    input: Option<PathBuf>,
    /// System matrix as JSON rows, e.g. '[[0,1],[-1,0]]'.
    #[arg(long)]
    matrix: Option<String>,
    /// Parameter bindings `k=v,k=v`; `all=v` binds every declared parameter.
    #[arg(long)]
    params: Option<String>,
    #[arg(long, value_enum, default_value = "standard")]
    semantics: SemanticsArg,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file; for eigenplot a base name receiving .csv and .svg.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Sweep one parameter: `name=start:end:count`.
    #[arg(long)]
    sweep: Option<String>,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Causality(String),
    #[error(transparent)]
    Derive(#[from] DeriveError),
    #[error(transparent)]
    StateSpace(StateSpaceError),
    #[error("missing parameter bindings: {}", .0.join(", "))]
    Bindings(Vec<String>),
    #[error("bindings make the model singular: {0}")]
    Singular(String),
    #[error(transparent)]
    Stability(#[from] StabilityError),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Causality(_) => 3,
            CliError::Derive(_) => 4,
            CliError::StateSpace(_) => 5,
            CliError::Bindings(_) | CliError::Singular(_) => 6,
            CliError::Stability(_) => 7,
        }
    }
}

impl From<StateSpaceError> for CliError {
    fn from(e: StateSpaceError) -> Self {
        match e {
            StateSpaceError::Derive(d) => CliError::Derive(d),
            StateSpaceError::Eval(x) => CliError::Input(x.to_string()),
            other => CliError::StateSpace(other),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn render_diagnostics(report: &ParseReport) -> String {
    report.diagnostics.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n")
}

fn load(opts: &Opts) -> Result<BondGraphModel> {
    let (text, json) = match (&opts.example, &opts.input) {
        (Some(name), None) => match std::env::var_os("BOGRAPH_CORPUS_DIR") {
            Some(dir) => {
                let path = Path::new(&dir).join(format!("{name}.bg"));
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
                (text, false)
            }
            None => {
                let text = corpus::source(name).ok_or_else(|| {
                    CliError::Input(format!("unknown example '{name}' (known: {})", corpus::NAMES.join(", ")))
                })?;
                (text.to_string(), false)
            }
        },
        (None, Some(path)) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            (text, path.extension().is_some_and(|x| x == "json"))
        }
        _ => return Err(CliError::Input("give exactly one of --example or --input".into())),
    };
    let report = if json { from_json(&text) } else { parse(&text) };
    if report.has_errors() {
        return Err(CliError::Input(render_diagnostics(&report)));
    }
    report.model.ok_or_else(|| CliError::Input("no model".into()))
}

fn require_complete(model: &BondGraphModel) -> Result<()> {
    let report = check_causal_completeness(model);
    if report.complete {
        Ok(())
    } else {
        Err(CliError::Causality(report.to_text().trim_end().to_string()))
    }
}

fn parse_bindings(arg: Option<&str>, model: &BondGraphModel) -> Result<BTreeMap<String, Rational>> {
    let mut out = model.default_bindings();
    let Some(arg) = arg else { return Ok(out) };
    for item in arg.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| CliError::Input(format!("binding '{item}' is not of the form name=value")))?;
        let value = parse_rational(v).ok_or_else(|| CliError::Input(format!("binding '{item}': bad number")))?;
        if k.trim() == "all" {
            for p in model.parameters.keys() {
                out.insert(p.clone(), value.clone());
            }
        } else {
            out.insert(k.trim().to_string(), value);
        }
    }
    Ok(out)
}

fn check_bound(ss: &StateSpaceModel, bindings: &BTreeMap<String, Rational>) -> Result<()> {
    let missing: Vec<String> = ss.params().into_iter().filter(|p| !bindings.contains_key(p)).collect();
    if missing.is_empty() {
        Ok(())
    } else {
        Err(CliError::Bindings(missing))
    }
}

fn numeric(ss: &StateSpaceModel, bindings: &BTreeMap<String, Rational>) -> Result<(NumericMatrix, NumericMatrix)> {
    check_bound(ss, bindings)?;
    ss.instantiate(bindings).map_err(|e| CliError::Singular(e.to_string()))
}

fn emit(opts: &Opts, text: &str) -> Result<()> {
    match &opts.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &Value) -> String {
    format!("{}\n", serde_json::to_string_pretty(v).expect("json value serializes"))
}

fn cmd_validate(opts: &Opts) -> Result<()> {
    let model = load(opts)?;
    let report = check_causal_completeness(&model);
    let out = match opts.format.unwrap_or(Format::Text) {
        Format::Json => pretty(&json!({
            "name": model.name,
            "valid": true,
            "complete": report.complete,
            "strong_bonds": report
                .strong_bonds
                .iter()
                .map(|((b, j), s)| json!({"branch": b, "junction": j, "bond": s}))
                .collect::<Vec<_>>(),
            "differential_storage_bonds": report.differential_storage_bonds,
            "violations": report.violations,
        })),
        _ => format!("model: {}\nlabels: ok\n{}", model.name, report.to_text()),
    };
    emit(opts, &out)?;
    if report.complete {
        Ok(())
    } else {
        Err(CliError::Causality("causality check failed".into()))
    }
}

fn cmd_derive(opts: &Opts) -> Result<()> {
    let model = load(opts)?;
    require_complete(&model)?;
    let sys = derive_system(&model)?;
    let dump = sys.dump();
    let out = match opts.format.unwrap_or(Format::Text) {
        Format::Json => pretty(&json!({ "equations": dump.lines().collect::<Vec<_>>() })),
        _ => dump,
    };
    emit(opts, &out)
}

fn matrix_json(m: &NumericMatrix) -> Value {
    json!(m.to_rows())
}

fn cmd_statespace(opts: &Opts) -> Result<()> {
    let model = load(opts)?;
    require_complete(&model)?;
    let ss = state_space(&model)?;
    let bound = match &opts.params {
        Some(arg) => Some(numeric(&ss, &parse_bindings(Some(arg), &model)?)?),
        None => None,
    };
    let out = match opts.format.unwrap_or(Format::Json) {
        Format::Text => {
            let mut s = ss.to_text();
            if let Some((a, b)) = &bound {
                s.push_str(&format!("numeric A: {:?}\nnumeric B: {:?}\n", a.to_rows(), b.to_rows()));
            }
            s
        }
        _ => {
            let mut v = ss.to_json();
            if let Some((a, b)) = &bound {
                v["numeric"] = json!({"A": matrix_json(a), "B": matrix_json(b)});
            }
            pretty(&v)
        }
    };
    emit(opts, &out)
}

fn semantics(opts: &Opts) -> Semantics {
    match opts.semantics {
        SemanticsArg::Standard => Semantics::Standard,
        SemanticsArg::PaperLiteral => Semantics::PaperLiteral,
    }
}

/// The system matrix named by the options, and a title for plots.
fn system_matrix(opts: &Opts) -> Result<(NumericMatrix, String)> {
    if let Some(text) = &opts.matrix {
        let rows: Vec<Vec<f64>> =
            serde_json::from_str(text).map_err(|e| CliError::Input(format!("--matrix: {e}")))?;
        if rows.is_empty() || rows.iter().any(|r| r.len() != rows[0].len()) {
            return Err(CliError::Input("--matrix: rows must be non-empty and of equal length".into()));
        }
        return Ok((NumericMatrix::from_rows(&rows), "matrix".into()));
    }
    let model = load(opts)?;
    require_complete(&model)?;
    let ss = state_space(&model)?;
    let (a, _) = numeric(&ss, &parse_bindings(opts.params.as_deref(), &model)?)?;
    Ok((a, model.name))
}

fn linspace(arg: &str) -> Result<(String, Vec<f64>)> {
    let bad = || CliError::Input(format!("--sweep '{arg}' is not name=start:end:count"));
    let (name, range) = arg.split_once('=').ok_or_else(bad)?;
    let parts: Vec<&str> = range.split(':').collect();
    let [a, b, n] = parts.as_slice() else { return Err(bad()) };
    let (a, b): (f64, f64) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
    let n: usize = n.parse().map_err(|_| bad())?;
    if n == 0 {
        return Err(bad());
    }
    let step = if n == 1 { 0.0 } else { (b - a) / (n - 1) as f64 };
    Ok((name.trim().to_string(), (0..n).map(|i| a + step * i as f64).collect()))
}

fn cmd_sweep(opts: &Opts, arg: &str) -> Result<()> {
    let (name, values) = linspace(arg)?;
    let model = load(opts)?;
    require_complete(&model)?;
    let ss = state_space(&model)?;
    let base = parse_bindings(opts.params.as_deref(), &model)?;
    if !model.parameters.contains_key(&name) {
        return Err(CliError::Input(format!("--sweep: unknown parameter {name}")));
    }
    let sem = semantics(opts);
    let rows: Vec<Result<Value>> = values
        .par_iter()
        .map(|&x| {
            let mut b = base.clone();
            let v = Rational::from_float(x).ok_or_else(|| CliError::Input(format!("--sweep: {x} is not finite")))?;
            b.insert(name.clone(), v);
            let (a, _) = numeric(&ss, &b)?;
            let verdict = analyze(&a, sem, opts.tol)?;
            let max_re = verdict.eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
            Ok(json!({"value": x, "classification": verdict.classification.to_string(), "max_re": clean(max_re)}))
        })
        .collect();
    let rows: Vec<Value> = rows.into_iter().collect::<Result<_>>()?;
    emit(opts, &pretty(&json!({"parameter": name, "points": rows})))
}

fn cmd_stability(opts: &Opts) -> Result<()> {
    if let Some(arg) = &opts.sweep {
        return cmd_sweep(opts, arg);
    }
    let (a, _) = system_matrix(opts)?;
    let verdict = analyze(&a, semantics(opts), opts.tol)?;
    let cp = char_poly(&a)?;
    let out = match opts.format.unwrap_or(Format::Json) {
        Format::Text => {
            let mut s = format!("classification: {}\n", verdict.classification);
            s.push_str(&format!("semantics: {}\nmethod: {}\n", verdict.semantics, verdict.method));
            for z in &verdict.eigenvalues {
                s.push_str(&format!("eigenvalue: {} {:+}i\n", clean(z.re), clean(z.im)));
            }
            if let Some(l) = verdict.literal {
                s.push_str(&format!(
                    "stable_sys: {}\nunstable_sys: {}\nmarginally_stable_sys: {}\n",
                    l.stable_sys, l.unstable_sys, l.marginally_stable_sys
                ));
            }
            s
        }
        _ => {
            let mut v = verdict.to_json();
            v["char_poly"] = json!(cp.coefficients.iter().map(|c| clean(*c)).collect::<Vec<_>>());
            if let Ok(f) = match_cubic_factorization(&a, opts.tol) {
                v["factored_cubic"] = json!({
                    "r": clean(f.r),
                    "b1": clean(f.b1),
                    "c1": clean(f.c1),
                    "corrected": factored_cubic_criterion(f.b1, f.c1, f.r, CubicMode::Corrected),
                    "literal": factored_cubic_criterion(f.b1, f.c1, f.r, CubicMode::PaperLiteral),
                });
            }
            pretty(&v)
        }
    };
    emit(opts, &out)
}

fn cmd_eigenplot(opts: &Opts) -> Result<()> {
    let (a, title) = system_matrix(opts)?;
    let verdict = analyze(&a, Semantics::Standard, opts.tol)?;
    let csv = eigen_csv(&verdict.eigenvalues);
    let svg = eigen_svg(&verdict.eigenvalues, &title);
    match &opts.out {
        Some(base) => {
            for (ext, body) in [("csv", &csv), ("svg", &svg)] {
                let path = base.with_extension(ext);
                std::fs::write(&path, body).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            }
            Ok(())
        }
        None => {
            match opts.format {
                Some(Format::Svg) => print!("{svg}"),
                _ => print!("{csv}"),
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Validate(o) => cmd_validate(o),
        Command::Derive(o) => cmd_derive(o),
        Command::Statespace(o) => cmd_statespace(o),
        Command::Stability(o) => cmd_stability(o),
        Command::Eigenplot(o) => cmd_eigenplot(o),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
