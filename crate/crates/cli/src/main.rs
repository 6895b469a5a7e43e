//! `nullag`: certify or refute triviality of null Lagrangian measures on matrix subspaces,
//! run the five-atom construction on the conservation-law manifold, and scan charts for
//! genericity.

mod analyze;
mod report;
mod verify;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nullag_core::certify::{exact_span_dim, grassmann_genericity, grassmann_scan, Chart};
use nullag_core::conslaw::{negative_branch_evidence, run_k1, EpsChoice, FluxFunction, IterationOptions};
use nullag_core::{fixtures, Error, RationalMatrix, Result};
use serde_json::{json, Value};

use report::{exit_code_for, RunReport, Timer, EXIT_OK, EXIT_PRECONDITION, EXIT_SCHEMA};

#[derive(Parser, Debug)]
#[command(name = "nullag", version, about = "Null Lagrangian measures on matrix subspaces")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Numeric tolerance; the default depends on the command.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Sample budget for the measure construction.
    #[arg(long, global = true, default_value_t = 512)]
    budget: usize,
    /// Also write the report to this path.
    #[arg(long, global = true, value_name = "PATH")]
    json_out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether a subspace carries a non-trivial commuting measure.
    Analyze {
        /// Subspace JSON, or any JSON object with a `subspace` key.
        input: Option<PathBuf>,
        /// Analyze a built-in fixture instead of a file.
        #[arg(long, conflicts_with = "input")]
        fixture: Option<String>,
        /// Offer catalogued atoms from the input to the measure construction.
        #[arg(long)]
        use_candidates: bool,
    },
    /// Five-atom measure on the conservation-law manifold for a flux a(v).
    K1 {
        /// "linear", "quadratic:c", "cubic:c", "custom:EXPR" or an expression in v.
        #[arg(long, default_value = "linear")]
        flux: String,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        alpha1: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        alpha2: f64,
        #[arg(long, default_value_t = 0.1)]
        s0: f64,
        #[arg(long, default_value_t = 0.1)]
        t0: f64,
        /// Mass off the base atom: a number, or "auto" for half the admissible bound.
        #[arg(long, default_value = "auto")]
        eps: String,
        #[arg(long, default_value_t = 64)]
        k_max: usize,
        /// Radius for the sign sampler used when the flux decreases.
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Re-verify a certificate or measure, exactly when it is rational.
    Verify { artifact: PathBuf },
    /// Λ and positive definite combinations over random chart coordinates.
    GrassmannScan {
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 4)]
        m: usize,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Also evaluate the chart through diag(y1, y1, ..., yk, yk, 0, ...) at its origin.
        #[arg(long)]
        through_v0: bool,
        /// Include one line per sample in the report.
        #[arg(long)]
        per_sample: bool,
    },
    /// Built-in subspaces and measures.
    Fixtures {
        #[command(subcommand)]
        action: FixtureAction,
    },
}

#[derive(Subcommand, Debug)]
enum FixtureAction {
    List,
    Dump { name: String },
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Schema(format!("{}: {e}", path.display())))
}

fn emit(value: &Value, json_out: Option<&Path>) -> i32 {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    // A closed stdout (e.g. piped into `head`) is not an error for the command itself.
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    if let Some(p) = json_out {
        if let Err(e) = fs::write(p, format!("{text}\n")) {
            eprintln!("nullag: cannot write {}: {e}", p.display());
            return EXIT_SCHEMA;
        }
    }
    EXIT_OK
}

fn configure_threads() {
    if let Some(n) = std::env::var("NULLAG_THREADS").ok().and_then(|s| s.parse::<usize>().ok()).filter(|&n| n > 0) {
        // Ignore failure: the pool can only be configured once per process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn run_analyze(common: &Common, input: Option<&Path>, fixture: Option<&str>, use_candidates: bool) -> RunReport {
    let timer = Timer::start();
    let flags_json = json!({ "seed": common.seed, "tol": common.tol, "budget": common.budget, "use_candidates": use_candidates });
    let loaded: Result<(Value, analyze::AnalyzeInput)> = match (input, fixture) {
        (_, Some(name)) => fixtures::builtin(name).map(|e| {
            (json!({ "fixture": name }), analyze::AnalyzeInput { subspace: e.subspace, candidates: e.candidates })
        }),
        (Some(p), None) => read_json(p).and_then(|v| analyze::parse_input(&v).map(|a| (v, a))),
        (None, None) => Err(Error::Schema("analyze needs an input file or --fixture".into())),
    };
    let (inputs, parsed) = match loaded {
        Ok(x) => x,
        Err(e) => return RunReport::new("analyze", &json!({ "flags": flags_json })).fail("parse_input", &e),
    };
    let report = RunReport::new("analyze", &json!({ "input": inputs, "flags": flags_json }));
    let flags = analyze::AnalyzeFlags {
        seed: common.seed,
        tol: common.tol.unwrap_or(1e-9),
        budget: common.budget,
        use_candidates,
    };
    let digest_copy = report.inputs_digest.clone();
    let mut out = match analyze::analyze(&parsed, &flags, report) {
        Ok(r) => r,
        Err(e) => {
            let mut r = RunReport::new("analyze", &json!({}));
            r.inputs_digest = digest_copy;
            r.fail("analyze", &e)
        }
    };
    timer.record(&mut out, "total");
    out
}

#[allow(clippy::too_many_arguments)]
fn run_k1_cmd(
    common: &Common,
    flux: &str,
    alpha: [f64; 2],
    s0: f64,
    t0: f64,
    eps: &str,
    k_max: usize,
    delta: f64,
    samples: usize,
) -> RunReport {
    let timer = Timer::start();
    let inputs = json!({
        "flux": flux, "alpha": alpha, "s0": s0, "t0": t0, "eps": eps, "k_max": k_max,
        "tol": common.tol, "seed": common.seed, "delta": delta, "samples": samples,
    });
    let report = RunReport::new("k1", &inputs);
    let f = match FluxFunction::by_name(flux) {
        Ok(f) => f,
        Err(e) => return report.fail("FluxFunction::by_name", &e),
    };
    let eps_choice = match eps {
        "auto" => EpsChoice::Auto,
        s => match s.parse::<f64>() {
            Ok(v) => EpsChoice::Value(v),
            Err(_) => return report.fail("parse_eps", &Error::Parse(format!("--eps must be a number or \"auto\", got `{s}`"))),
        },
    };
    let opts = IterationOptions { tol: common.tol.unwrap_or(1e-12), k_max };
    let mut out = match run_k1(&f, alpha, s0, t0, eps_choice, &opts) {
        Ok(run) => {
            let artifact = json!({ "kind": "float_measure", "measure": run.pushed.measure, "tolerance": 1e-9 });
            let details = serde_json::to_value(&run).expect("serializable");
            let mut r = report.finish("nontrivial_measure", "run_k1", EXIT_OK, details);
            r.artifact = Some(artifact);
            r
        }
        Err(e) => {
            let mut r = report.fail("run_k1", &e);
            if f.da(alpha[1]) < 0.0 {
                if let Ok(ev) = negative_branch_evidence(&f, alpha, delta, samples, common.seed) {
                    r.details["negative_branch_evidence"] = serde_json::to_value(ev).expect("serializable");
                }
            }
            r
        }
    };
    if out.exit_code != EXIT_OK && out.exit_code != EXIT_SCHEMA {
        out.exit_code = EXIT_PRECONDITION;
    }
    timer.record(&mut out, "total");
    out
}

fn run_verify(common: &Common, path: &Path) -> RunReport {
    let timer = Timer::start();
    let input = match read_json(path) {
        Ok(v) => v,
        Err(e) => return RunReport::new("verify", &json!({ "path": path.display().to_string() })).fail("read", &e),
    };
    let report = RunReport::new("verify", &json!({ "artifact": input, "tol": common.tol }));
    let digest = report.inputs_digest.clone();
    let mut out = verify::verify(&input, common.tol.unwrap_or(1e-9), report).unwrap_or_else(|e| {
        let mut r = RunReport::new("verify", &json!({}));
        r.inputs_digest = digest;
        r.fail("verify", &e)
    });
    timer.record(&mut out, "total");
    out
}

fn run_scan(common: &Common, k: usize, m: usize, n: usize, samples: usize, through_v0: bool, per_sample: bool) -> RunReport {
    let timer = Timer::start();
    let report = RunReport::new("grassmann-scan", &json!({ "k": k, "m": m, "n": n, "samples": samples, "seed": common.seed, "through_v0": through_v0 }));
    let result = (|| -> Result<Value> {
        if k == 0 || k > m * n {
            return Err(Error::DimensionMismatch(format!("need 1 ≤ k ≤ mn, got k = {k}, m = {m}, n = {n}")));
        }
        let mut summary = grassmann_scan(k, m, n, samples, common.seed)?;
        if !per_sample {
            summary.per_sample.clear();
        }
        let mut v = serde_json::to_value(&summary).expect("serializable");
        if through_v0 {
            let v0 = fixtures::v0(k, m, n)?;
            let chart = Chart::through(v0.basis())?;
            let zero = nalgebra::DMatrix::zeros(m * n - k, k);
            let rep = grassmann_genericity(&chart, &zero, common.seed)?;
            let exact = exact_span_dim(&chart, &RationalMatrix::zeros(m * n - k, k))?;
            v["v0_chart"] = json!({ "report": rep, "exact_span_dim": exact, "lambda_nonzero": rep.lambda.abs() > nullag_core::certify::LAMBDA_TOL });
        }
        Ok(v)
    })();
    let mut out = match result {
        Ok(v) => {
            let all = v["lambda_nonzero"] == v["samples"] && v["positive_definite"] == v["samples"];
            let verdict = if all { "generic" } else { "degenerate_samples_found" };
            report.finish(verdict, "grassmann_scan", EXIT_OK, v)
        }
        Err(e) => report.fail("grassmann_scan", &e),
    };
    timer.record(&mut out, "total");
    out
}

fn run_fixtures(action: &FixtureAction) -> (Value, i32) {
    match action {
        FixtureAction::List => {
            let list: Vec<Value> = fixtures::builtin_names()
                .into_iter()
                .map(|name| match fixtures::builtin(name) {
                    Ok(e) => json!({
                        "name": name,
                        "description": e.description,
                        "shape": [e.subspace.m(), e.subspace.n()],
                        "d": e.subspace.d(),
                        "expected": e.expected,
                    }),
                    Err(err) => json!({ "name": name, "error": err.to_string() }),
                })
                .collect();
            (json!(list), EXIT_OK)
        }
        FixtureAction::Dump { name } => match fixtures::builtin(name) {
            Ok(e) => (serde_json::to_value(&e).expect("serializable"), EXIT_OK),
            Err(err) => (json!({ "error": err.to_string() }), exit_code_for(&err)),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let common = &cli.common;
    let (value, code) = match &cli.command {
        Command::Analyze { input, fixture, use_candidates } => {
            let r = run_analyze(common, input.as_deref(), fixture.as_deref(), *use_candidates);
            let code = r.exit_code;
            (serde_json::to_value(&r).expect("serializable"), code)
        }
        Command::K1 { flux, alpha1, alpha2, s0, t0, eps, k_max, delta, samples } => {
            let r = run_k1_cmd(common, flux, [*alpha1, *alpha2], *s0, *t0, eps, *k_max, *delta, *samples);
            let code = r.exit_code;
            (serde_json::to_value(&r).expect("serializable"), code)
        }
        Command::Verify { artifact } => {
            let r = run_verify(common, artifact);
            let code = r.exit_code;
            (serde_json::to_value(&r).expect("serializable"), code)
        }
        Command::GrassmannScan { k, m, n, samples, through_v0, per_sample } => {
            let r = run_scan(common, *k, *m, *n, *samples, *through_v0, *per_sample);
            let code = r.exit_code;
            (serde_json::to_value(&r).expect("serializable"), code)
        }
        Command::Fixtures { action } => run_fixtures(action),
    };
    if let Some(msg) = value.pointer("/details/error").and_then(Value::as_str) {
        eprintln!("nullag: {msg}");
    }
    let write_code = emit(&value, common.json_out.as_deref());
    ExitCode::from(if code == EXIT_OK { write_code } else { code } as u8)
}
