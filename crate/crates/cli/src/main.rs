//! `bellcover` command-line front end.
//!
//! Every command writes newline-delimited JSON to stdout, except `render` in
//! text or SVG format, which writes the drawing itself. Exit codes: 0 when the
//! form is proven or the check passes, 1 when it is refuted or violated, 2 on
//! usage or input errors.

use std::fs;
use std::io::{self, Read};
use std::process::ExitCode;
use std::time::Instant;

use bellcover::inequality::{catalog, certify_given_zeros, hardy_deduce, Deduction, Family};
use bellcover::json::{
    axes_to_json, certificate_to_json, form_from_json, marginals_to_json, membership_to_json, parse_axes,
    parse_state, Either, WireScalar,
};
use bellcover::polytope::{membership, FLOAT_FEASIBILITY_TOL};
use bellcover::quantum::{born_marginals, ghz_check, hardy_scan, violation_scan_with, AxisChoice, PureState, ScanOptions, VIOLATION_TOL};
use bellcover::render::{diagram_of_form, diagram_of_marginal, emit_many, Format};
use bellcover::reproduce::{self, DEFAULT_SEED};
use bellcover::{Event, LinearForm, MarginalSet, Rational, Scalar, Scenario};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

#[derive(Parser)]
#[command(name = "bellcover", version, about = "Certify Bell inequalities by covering underlying-probability grids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify linear forms read from a JSON file (or `-` for stdin); one document or an NDJSON stream.
    Certify {
        file: String,
        /// Events assumed to vanish, e.g. `P_10(0,0)`; repeatable.
        #[arg(long = "zero")]
        zeros: Vec<String>,
    },
    /// Stream a named family with verdicts: hardy64, chsh, nhardy:N, zukowski, threeaxes.
    Catalog { family: String },
    /// Decide whether vanishing events force a target event to vanish.
    Deduce {
        #[arg(long = "zero", required = true)]
        zeros: Vec<String>,
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 2)]
        parties: usize,
        #[arg(long, default_value_t = 2)]
        settings: usize,
    },
    /// Born-rule marginals for a state and axes, optionally evaluating a form on them.
    QuantumEval {
        /// Preset (singlet, ghz, zero2, zero3) or a JSON file of `[re, im]` amplitudes.
        #[arg(long)]
        state: String,
        /// JSON file `{"axes": [[{"theta", "phi"}, ..], ..]}`.
        #[arg(long)]
        axes: String,
        /// Form file to evaluate on the marginals.
        #[arg(long)]
        form: Option<String>,
        /// Values below `-tol` count as violations.
        #[arg(long, default_value_t = VIOLATION_TOL)]
        tol: f64,
    },
    /// Minimize a proven form over measurement axes for a fixed state.
    Scan {
        form: String,
        #[arg(long, default_value = "singlet")]
        state: String,
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// Maximize the Hardy probability over two-qubit states and axes.
    HardyScan {
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// GHZ correlations against the three-party bound.
    Ghz,
    /// Decide local-polytope membership of a marginal set.
    Membership {
        file: String,
        /// Arithmetic; defaults to the document's own mode.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Feasibility tolerance; defaults to 0 for rational and 1e-8 for float.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Draw forms (file) or single marginals (`--event`) on the cell grid.
    Render {
        file: Option<String>,
        #[arg(long = "event")]
        events: Vec<String>,
        #[arg(long, default_value_t = 2)]
        parties: usize,
        #[arg(long, default_value_t = 2)]
        settings: usize,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
        /// Plain `+-|` frame instead of box-drawing characters.
        #[arg(long)]
        ascii: bool,
    },
    /// Run every acceptance criterion and emit a run report.
    Reproduce {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(clap::Args)]
struct ScanArgs {
    /// Polar samples per axis on [0, π], endpoints included.
    #[arg(long, default_value_t = 8)]
    grid_steps: usize,
    /// Sample azimuths around the full circle instead of the four principal planes.
    #[arg(long)]
    full_sphere: bool,
}

impl ScanArgs {
    fn options(&self) -> ScanOptions {
        ScanOptions { grid_steps: self.grid_steps, full_sphere: self.full_sphere, ..ScanOptions::default() }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Rational,
    Float,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Text,
    Svg,
    Json,
}

/// What a command concluded, mapped onto the exit code.
enum Outcome {
    Pass,
    Fail,
}

type CliResult = Result<Outcome, String>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> CliResult {
    match command {
        Command::Certify { file, zeros } => certify(&file, &zeros),
        Command::Catalog { family } => catalog_cmd(&family),
        Command::Deduce { zeros, target, parties, settings } => deduce(&zeros, &target, scenario(parties, settings)?),
        Command::QuantumEval { state, axes, form, tol } => quantum_eval(&state, &axes, form.as_deref(), tol),
        Command::Scan { form, state, scan } => scan_cmd(&form, &state, &scan.options()),
        Command::HardyScan { scan } => {
            let report = hardy_scan(&scan.options()).map_err(err)?;
            emit_json(&report);
            Ok(Outcome::Pass)
        }
        Command::Ghz => {
            let report = ghz_check().map_err(err)?;
            emit_json(&report);
            Ok(if report.violated { Outcome::Fail } else { Outcome::Pass })
        }
        Command::Membership { file, mode, tol } => membership_cmd(&file, mode, tol),
        Command::Render { file, events, parties, settings, format, ascii } => {
            render(file.as_deref(), &events, scenario(parties, settings)?, format, ascii)
        }
        Command::Reproduce { seed } => reproduce_cmd(seed),
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn scenario(parties: usize, settings: usize) -> Result<Scenario, String> {
    Scenario::new(parties, settings).map_err(err)
}

fn emit_json(v: &impl Serialize) {
    println!("{}", serde_json::to_string(v).expect("serializable output"));
}

fn read_input(path: &str) -> Result<String, String> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| format!("stdin: {e}"))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))
    }
}

/// One JSON document or a newline-delimited stream of them.
fn json_documents(path: &str) -> Result<Vec<Value>, String> {
    let text = read_input(path)?;
    let docs = serde_json::Deserializer::from_str(&text)
        .into_iter::<Value>()
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| format!("{path}: malformed JSON: {e}"))?;
    if docs.is_empty() {
        return Err(format!("{path}: no JSON documents"));
    }
    Ok(docs)
}

fn single_document(path: &str) -> Result<Value, String> {
    let mut docs = json_documents(path)?;
    if docs.len() != 1 {
        return Err(format!("{path}: expected one JSON document, found {}", docs.len()));
    }
    Ok(docs.remove(0))
}

fn events(texts: &[String]) -> Result<Vec<Event>, String> {
    texts.iter().map(|t| t.parse::<Event>().map_err(err)).collect()
}

fn read_forms(path: &str) -> Result<Vec<LinearForm>, String> {
    json_documents(path)?.iter().map(|d| form_from_json(d).map_err(|e| format!("{path}: {e}"))).collect()
}

fn certify(path: &str, zeros: &[String]) -> CliResult {
    let zeros = events(zeros)?;
    let mut all_proven = true;
    for form in read_forms(path)? {
        let cert = certify_given_zeros(&form, &zeros).map_err(err)?;
        all_proven &= cert.is_proven();
        println!("{}", certificate_to_json(&cert));
    }
    Ok(if all_proven { Outcome::Pass } else { Outcome::Fail })
}

fn catalog_cmd(family: &str) -> CliResult {
    let family: Family = family.parse().map_err(err)?;
    let mut all_proven = true;
    for form in catalog(family).map_err(err)? {
        let proven = form.certify().is_proven();
        all_proven &= proven;
        let mut doc = bellcover::json::form_to_json(&form);
        doc["verdict"] = json!(if proven { "proven" } else { "refuted" });
        println!("{doc}");
    }
    Ok(if all_proven { Outcome::Pass } else { Outcome::Fail })
}

fn deduce(zeros: &[String], target: &str, sc: Scenario) -> CliResult {
    let zeros = events(zeros)?;
    let target: Event = target.parse().map_err(err)?;
    let out = hardy_deduce(sc, &zeros, &target).map_err(err)?;
    let witness = match &out {
        Deduction::Deducible => Value::Null,
        Deduction::NotDeducible { witness } => json!(witness.coords),
    };
    println!(
        "{}",
        json!({
            "scenario": sc,
            "zeros": zeros.iter().map(Event::to_string).collect::<Vec<_>>(),
            "target": target.to_string(),
            "deducible": out.is_deducible(),
            "witness": witness,
        })
    );
    Ok(if out.is_deducible() { Outcome::Pass } else { Outcome::Fail })
}

fn load_state(spec: &str) -> Result<PureState, String> {
    match PureState::preset(spec) {
        Ok(s) => Ok(s),
        Err(_) if fs::metadata(spec).is_ok() || spec == "-" => parse_state(&single_document(spec)?).map_err(err),
        Err(e) => Err(err(e)),
    }
}

fn load_axes(path: &str) -> Result<AxisChoice, String> {
    parse_axes(&single_document(path)?).map_err(err)
}

fn quantum_eval(state: &str, axes: &str, form: Option<&str>, tol: f64) -> CliResult {
    let state = load_state(state)?;
    let axes = load_axes(axes)?;
    let ms = born_marginals(&state, &axes).map_err(err)?;
    let mut doc = json!({"axes": axes_to_json(&axes), "marginals": marginals_to_json(&ms), "max_signaling": ms.max_signaling()});
    let mut outcome = Outcome::Pass;
    if let Some(path) = form {
        let mut values = Vec::new();
        for f in read_forms(path)? {
            let v = f.evaluate(&ms).map_err(err)?;
            let violated = v < -tol;
            if violated {
                outcome = Outcome::Fail;
            }
            values.push(json!({"form": f.to_string(), "value": v, "violated": violated}));
        }
        doc["forms"] = json!(values);
    }
    println!("{doc}");
    Ok(outcome)
}

fn scan_cmd(path: &str, state: &str, opts: &ScanOptions) -> CliResult {
    let state = load_state(state)?;
    let mut outcome = Outcome::Pass;
    for form in read_forms(path)? {
        let report = violation_scan_with(&form, &state, opts).map_err(err)?;
        if report.violated {
            outcome = Outcome::Fail;
        }
        emit_json(&report);
    }
    Ok(outcome)
}

fn membership_cmd(path: &str, mode: Option<ModeArg>, tol: Option<f64>) -> CliResult {
    let doc = single_document(path)?;
    let parsed = bellcover::json::parse_marginals(&doc).map_err(err)?;
    let rational_tol = |t: Option<f64>| match t {
        None => Ok(Rational::from_integer(0.into())),
        Some(t) => Rational::from_float(t).ok_or_else(|| format!("bad tolerance {t}")),
    };
    match (parsed, mode) {
        (Either::Rational(ms), None | Some(ModeArg::Rational)) => decide(&ms, &rational_tol(tol)?),
        (Either::Rational(ms), Some(ModeArg::Float)) => decide(&ms.to_float(), &tol.unwrap_or(FLOAT_FEASIBILITY_TOL)),
        (Either::Float(ms), None | Some(ModeArg::Float)) => decide(&ms, &tol.unwrap_or(FLOAT_FEASIBILITY_TOL)),
        (Either::Float(_), Some(ModeArg::Rational)) => {
            Err(format!("{path}: float marginals cannot be decided exactly; write them as rationals"))
        }
    }
}

fn decide<T: Scalar + WireScalar>(ms: &MarginalSet<T>, tol: &T) -> CliResult {
    let res = membership(ms, tol).map_err(err)?;
    println!("{}", membership_to_json(&res));
    Ok(if res.is_feasible() { Outcome::Pass } else { Outcome::Fail })
}

fn render(file: Option<&str>, event_texts: &[String], sc: Scenario, format: FormatArg, ascii: bool) -> CliResult {
    let mut diagrams = Vec::new();
    if let Some(path) = file {
        for form in read_forms(path)? {
            diagrams.push(diagram_of_form(&form).map_err(err)?);
        }
    }
    for e in events(event_texts)? {
        diagrams.push(diagram_of_marginal(sc, &e).map_err(err)?);
    }
    if diagrams.is_empty() {
        return Err("nothing to render: give a form file or --event".into());
    }
    match format {
        FormatArg::Json => diagrams.iter().for_each(emit_json),
        FormatArg::Text => print!("{}", emit_many(&diagrams, Format::Text { ascii }).map_err(err)?),
        FormatArg::Svg => print!("{}", emit_many(&diagrams, Format::Svg).map_err(err)?),
    }
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct RunReport {
    command: String,
    inputs_digest: String,
    results: Vec<reproduce::CriterionResult>,
    timings: Timings,
    artifact_version: &'static str,
    passed: bool,
}

#[derive(Serialize)]
struct Timings {
    total_secs: f64,
    per_criterion_secs: Vec<f64>,
}

fn reproduce_cmd(seed: u64) -> CliResult {
    let command = format!("reproduce --seed {seed}");
    let start = Instant::now();
    let results = reproduce::run_all(seed);
    let total_secs = start.elapsed().as_secs_f64();
    for r in &results {
        eprintln!("{}", r.line());
    }
    let passed = results.iter().all(|r| r.passed);
    let report = RunReport {
        inputs_digest: hex::encode(Sha256::digest(format!("{command}\n{}", env!("CARGO_PKG_VERSION")).as_bytes())),
        command,
        timings: Timings { total_secs, per_criterion_secs: results.iter().map(|r| r.elapsed_secs).collect() },
        results,
        artifact_version: env!("CARGO_PKG_VERSION"),
        passed,
    };
    emit_json(&report);
    Ok(if passed { Outcome::Pass } else { Outcome::Fail })
}
