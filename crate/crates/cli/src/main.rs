mod descriptor;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use otline::constants::{
    a_opt_bracket, equivalence_chain, kappa, kappas, lambda_from_a, poincare_constants, solve_co,
};
use otline::criteria::criterion_report;
use otline::examples::{example_by_name, EXAMPLE_NAMES};
use otline::verify::{run_suite, Suite, SuiteConfig};
use otline::{transport_cost, CostFunction, Error, GridSpec};

use descriptor::{parse_cost, parse_measure};

#[derive(Parser, Debug)]
#[command(name = "otline", version, about = "One-dimensional optimal transport and transport-entropy criteria")]
struct Cli {
    #[command(flatten)]
    run: RunArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    /// Grid window, two reals.
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true, global = true)]
    window: Option<Vec<f64>>,
    /// Nodes per side of the center.
    #[arg(long, global = true)]
    nodes: Option<usize>,
    /// Geometric ratio of the nodes refining toward the center.
    #[arg(long, global = true)]
    ratio: Option<f64>,
    /// Quantile-space truncation level.
    #[arg(long, global = true)]
    eps: Option<f64>,
    /// Tolerance for pass/fail decisions.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Window-doubling levels for suprema.
    #[arg(long, global = true)]
    levels: Option<usize>,
    #[arg(long, default_value_t = 1, global = true)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Optimal transport cost between two measures.
    Cost {
        /// Cost preset or JSON.
        #[arg(long, default_value = "quadratic")]
        cost: String,
        /// Measure preset, JSON descriptor, or path to one.
        #[arg(long)]
        mu: String,
        #[arg(long)]
        nu: String,
    },
    /// Muckenhoupt, Bobkov-Goetze and exponential-moment criteria.
    Criteria {
        /// Measure preset, JSON descriptor, or path to one.
        #[arg(long)]
        measure: String,
        /// Cost beta for K(b) and the contraction constant.
        #[arg(long, requires = "b")]
        beta: Option<String>,
        #[arg(long, requires = "beta")]
        b: Option<f64>,
    },
    /// Run every claim of a named example.
    Reproduce {
        /// One of ceil-sqrt, section41, staircase, tbar.
        name: String,
    },
    /// Seeded margin suite.
    Verify {
        /// maurey, dual, poincare or bgdual.
        #[arg(value_parser = parse_suite)]
        suite: Suite,
        /// Measure for dual, bgdual and poincare (default mu1).
        #[arg(long)]
        measure: Option<String>,
        /// Cost for dual and bgdual (default beta2).
        #[arg(long)]
        cost: Option<String>,
        /// Poincare constant to test (default 1/4).
        #[arg(long)]
        lambda: Option<f64>,
        /// Number of test functions (default 50, or 100 for poincare).
        #[arg(long)]
        size: Option<usize>,
    },
    /// Explicit constants for given parameters.
    Constants {
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        h: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
    },
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|_| "expected one of maurey, dual, poincare, bgdual".to_string())
}

/// Reproducibility record printed in every JSON report.
#[derive(Debug, Serialize)]
struct RunConfig {
    window: (f64, f64),
    nodes: usize,
    ratio: f64,
    eps: f64,
    tol: f64,
    levels: usize,
    seed: u64,
    format: Format,
    out: Option<PathBuf>,
}

impl RunConfig {
    fn from_args(a: &RunArgs) -> Result<(Self, GridSpec), String> {
        let mut g = GridSpec::default();
        if let Some(w) = &a.window {
            g.window = (w[0], w[1]);
        }
        g.nodes_per_side = a.nodes.unwrap_or(g.nodes_per_side);
        g.ratio = a.ratio.unwrap_or(g.ratio);
        g.eps = a.eps.unwrap_or(g.eps);
        g.tol = a.tol.unwrap_or(g.tol);
        g.levels = a.levels.unwrap_or(g.levels);
        if g.nodes_per_side < 16 {
            return Err(format!("--nodes: {} is below the minimum 16", g.nodes_per_side));
        }
        if !(g.tol > 0.0) {
            return Err(format!("--tol: {} must be positive", g.tol));
        }
        g.validate().map_err(|e| format!("grid: {e}"))?;
        let cfg = RunConfig {
            window: g.window,
            nodes: g.nodes_per_side,
            ratio: g.ratio,
            eps: g.eps,
            tol: g.tol,
            levels: g.levels,
            seed: a.seed,
            format: a.format,
            out: a.out.clone(),
        };
        Ok((cfg, g))
    }
}

/// Outcome of a command: the JSON report, its CSV rendering, and whether
/// the mathematical check passed.
struct Outcome {
    report: Value,
    csv: String,
    passed: bool,
}

enum Failure {
    Usage(String),
    Math(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Divergence(_) => Failure::Math(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn usage(field: &str) -> impl FnOnce(String) -> Failure + '_ {
    move |m| Failure::Usage(format!("--{field}: {m}"))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn csv_lines(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut s = format!("{header}\n");
    for r in rows {
        s.push_str(&r);
        s.push('\n');
    }
    s
}

fn fmt_ext(v: f64) -> String {
    if v.is_finite() {
        v.to_string()
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn run(command: &Command, grid: &GridSpec, seed: u64) -> Result<Outcome, Failure> {
    match command {
        Command::Cost { cost, mu, nu } => {
            let alpha = parse_cost(cost).map_err(usage("cost"))?;
            let mu = parse_measure(mu).map_err(usage("mu"))?;
            let nu = parse_measure(nu).map_err(usage("nu"))?;
            let c = transport_cost(&alpha, &mu, &nu, grid)?;
            Ok(Outcome {
                csv: csv_lines(
                    "cost,error_estimate,diverged,panels",
                    [format!("{},{},{},{}", fmt_ext(c.cost), fmt_ext(c.error_estimate), c.diverged, c.panels)],
                ),
                passed: !c.diverged,
                report: to_value(&c),
            })
        }
        Command::Criteria { measure, beta, b } => {
            let mu = parse_measure(measure).map_err(usage("measure"))?;
            let beta = beta.as_deref().map(parse_cost).transpose().map_err(usage("beta"))?;
            let pair = beta.as_ref().zip(*b);
            let r = criterion_report(&mu, pair, grid)?;
            let mut rows = vec![
                ("A_plus", r.a_plus),
                ("A_minus", r.a_minus),
                ("D_plus", r.d_plus),
                ("D_minus", r.d_minus),
                ("lambda_lower", r.lambda_lower),
                ("lambda_upper", r.lambda_upper),
            ];
            for (name, v) in [("K_plus", r.k_plus), ("K_minus", r.k_minus), ("d", r.d)] {
                if let Some(v) = v {
                    rows.push((name, v));
                }
            }
            let csv = csv_lines(
                "criterion,value,diverged",
                rows.iter()
                    .map(|(n, v)| format!("{n},{},{}", fmt_ext(*v), r.diverged.iter().any(|d| d == n))),
            );
            Ok(Outcome {
                passed: r.diverged.is_empty(),
                report: to_value(&r),
                csv,
            })
        }
        Command::Reproduce { name } => {
            let bundle = example_by_name(name).map_err(|_| {
                Failure::Usage(format!("unknown example {name:?}; valid names: {}", EXAMPLE_NAMES.join(", ")))
            })?;
            let claims = bundle.run_claims(grid);
            let table = bundle.table(grid)?;
            let passed = claims.iter().all(|c| c.passed);
            let csv = match &table {
                Some(t) => {
                    let mut buf = Vec::new();
                    t.write_csv(&mut buf)?;
                    String::from_utf8(buf).expect("utf-8 csv")
                }
                None => csv_lines("claim,passed", claims.iter().map(|c| format!("{},{}", c.name, c.passed))),
            };
            let report = json!({
                "example": bundle.name,
                "description": bundle.description,
                "params": bundle.params,
                "passed": passed,
                "claims": claims,
                "table": table,
            });
            Ok(Outcome { report, csv, passed })
        }
        Command::Verify {
            suite,
            measure,
            cost,
            lambda,
            size,
        } => {
            let default_size = if *suite == Suite::Poincare { 100 } else { 50 };
            let mut cfg = SuiteConfig::new(*suite, size.unwrap_or(default_size), seed);
            cfg.measure = measure.as_deref().map(parse_measure).transpose().map_err(usage("measure"))?;
            cfg.cost = cost.as_deref().map(parse_cost).transpose().map_err(usage("cost"))?;
            if let Some(l) = lambda {
                if !(*l > 0.0 && l.is_finite()) {
                    return Err(Failure::Usage(format!("--lambda: {l} must be positive")));
                }
            }
            cfg.lambda = *lambda;
            let r = run_suite(&cfg, grid)?;
            let mut buf = Vec::new();
            r.write_csv(&mut buf)?;
            let passed = r.min_margin >= -grid.tol;
            let mut report = to_value(&r);
            report["passed"] = json!(passed);
            report["size"] = json!(cfg.size);
            Ok(Outcome {
                report,
                csv: String::from_utf8(buf).expect("utf-8 csv"),
                passed,
            })
        }
        Command::Constants { a, h, lambda } => {
            let beta = CostFunction::beta2();
            let chain = equivalence_chain(&beta, *a)?;
            let (lo, hi) = a_opt_bracket(&beta, 1.0)?;
            let (k1, k2) = kappas(*h)?;
            let co = solve_co(*lambda, *h)?;
            let pc = poincare_constants(*lambda, 0.0)?;
            let mut rows: Vec<(String, f64)> = vec![
                ("kappa".into(), kappa()),
                ("kappa1".into(), k1),
                ("kappa2".into(), k2),
                ("a_opt_lower".into(), lo),
                ("a_opt_upper".into(), hi),
                ("lambda_from_a".into(), lambda_from_a(*a)),
                ("c_o".into(), co.c_o),
                ("c_o_residual".into(), co.residual),
                ("poincare_a_at_c0".into(), pc.a),
            ];
            rows.extend(chain.steps.iter().map(|s| (format!("chain_{}", s.name), s.value)));
            let csv = csv_lines("name,value", rows.iter().map(|(n, v)| format!("{n},{}", fmt_ext(*v))));
            let report = json!({
                "values": rows.iter().map(|(n, v)| json!({"name": n, "value": v})).collect::<Vec<_>>(),
                "chain": chain,
                "c_o": co,
            });
            Ok(Outcome {
                report,
                csv,
                passed: true,
            })
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Cost { .. } => "cost",
        Command::Criteria { .. } => "criteria",
        Command::Reproduce { .. } => "reproduce",
        Command::Verify { .. } => "verify",
        Command::Constants { .. } => "constants",
    }
}

fn emit(text: &str, out: &Option<PathBuf>) -> std::io::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let (config, grid) = match RunConfig::from_args(&cli.run) {
        Ok(v) => v,
        Err(m) => {
            eprintln!("error: {m}");
            return ExitCode::from(1);
        }
    };
    let outcome = match run(&cli.command, &grid, cli.run.seed) {
        Ok(o) => o,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(1);
        }
        Err(Failure::Math(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(2);
        }
    };
    let text = match config.format {
        Format::Csv => outcome.csv,
        Format::Json => {
            let doc = json!({
                "command": command_name(&cli.command),
                "config": config,
                "report": outcome.report,
            });
            serde_json::to_string_pretty(&doc).expect("reports serialize") + "\n"
        }
    };
    if let Err(e) = emit(&text, &config.out) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(1);
    }
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}
