//! `cdouble`: batch verification and exploration on top of the
//! clusterdouble engine. Every command prints one JSON document.
//!
//! Exit codes: 0 when all checks pass, 1 when a numeric or exact check
//! fails, 2 for usage errors (bad flags, unreadable input, bad indices).

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use clusterdouble::cluster::{exchange_graph, mutation, ClusterTransformation, Space};
use clusterdouble::intertwiner::{default_tests, unitarity_defect, verify_relation_numeric};
use clusterdouble::qdilog::{check_property, default_grid, quantum_dilog, Planck, Property};
use clusterdouble::suites::{named_word, parse_complex, run_suite, Status, Suite, SuiteOptions};
use clusterdouble::surface::Triangulation;
use clusterdouble::Feed;

#[derive(Parser)]
#[command(name = "cdouble", version, about = "Cluster X/A/D mutations, quantum dilogarithms and intertwiners")]
struct Cli {
    #[command(flatten)]
    output: OutputFlags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputFlags {
    /// Compact single-line JSON (the default).
    #[arg(long, global = true, conflicts_with = "pretty")]
    json: bool,
    /// Indented JSON.
    #[arg(long, global = true)]
    pretty: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Mutate a feed in direction k and print the pullback formulas.
    Mutate {
        /// Feed: A1xA1, A2, B2, G2, inline JSON or a JSON file.
        #[arg(long)]
        feed: String,
        /// Direction, 1-based.
        #[arg(long)]
        k: usize,
        /// X, A or D.
        #[arg(long, default_value = "X")]
        space: String,
    },
    /// Run a verification suite.
    Verify {
        /// hgon, decompose, double, k2, quantum, phi, intertwine, surface or positivity.
        suite: String,
        #[command(flatten)]
        numeric: NumericFlags,
        /// Random feeds per randomized family.
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Explore the exchange graph of a feed.
    ExchangeGraph {
        #[arg(long)]
        feed: String,
        #[arg(long, default_value_t = 24)]
        max_depth: usize,
        #[arg(long, default_value_t = 5000)]
        max_vertices: usize,
    },
    /// The non-compact quantum dilogarithm.
    Phi {
        #[command(subcommand)]
        action: PhiAction,
    },
    /// Grid intertwiners of quantum cluster transformations.
    Intertwine {
        #[command(subcommand)]
        action: IntertwineAction,
    },
    /// Ideal triangulations and flips.
    Surface {
        #[command(subcommand)]
        action: SurfaceAction,
    },
}

#[derive(Args, Clone)]
struct NumericFlags {
    #[arg(long)]
    hbar: Option<f64>,
    /// Points per direction of the intertwiner grid.
    #[arg(long, default_value_t = 512)]
    grid: usize,
    /// Override the suite's tolerances.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// square, pentagon, hexagon, octagon, inline JSON or a JSON file.
    #[arg(long)]
    word: Option<String>,
}

#[derive(Subcommand)]
enum PhiAction {
    /// Evaluate Φ^ℏ(z).
    Eval {
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, default_value_t = 0.7)]
        hbar: f64,
    },
    /// Check properties (default: all) on the standard 20-point grid.
    Check {
        #[arg(long, value_delimiter = ',')]
        property: Vec<String>,
        #[arg(long, default_value_t = 0.7)]
        hbar: f64,
    },
}

#[derive(Subcommand)]
enum IntertwineAction {
    /// Compose the intertwiners along a relation and estimate its scalar λ.
    Check {
        #[arg(long, default_value = "pentagon")]
        word: String,
        #[arg(long, default_value_t = 0.7)]
        hbar: f64,
        #[arg(long, default_value_t = 256)]
        grid: usize,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
    },
}

#[derive(Subcommand)]
enum SurfaceAction {
    /// Feed and topology of a triangulation.
    Feed {
        /// disc-N, annulus-P-Q, punctured-torus, inline JSON or a JSON file.
        #[arg(long)]
        triangulation: String,
    },
    /// Flip an internal edge.
    Flip {
        #[arg(long)]
        triangulation: String,
        #[arg(long)]
        edge: usize,
    },
}

/// Result of a command: the document to print and whether all checks passed.
struct Outcome {
    doc: Value,
    passed: bool,
}

impl Outcome {
    fn ok(doc: Value) -> Self {
        Outcome { doc, passed: true }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(out) => {
            let text = if cli.output.pretty { serde_json::to_string_pretty(&out.doc) } else { serde_json::to_string(&out.doc) };
            // a closed pipe (e.g. `| head`) is not an error of the command
            let _ = writeln!(std::io::stdout().lock(), "{}", text.expect("JSON values serialise"));
            if out.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: &Command) -> Result<Outcome> {
    match command {
        Command::Mutate { feed, k, space } => cmd_mutate(feed, *k, space),
        Command::Verify { suite, numeric, samples } => cmd_verify(suite, numeric, *samples),
        Command::ExchangeGraph { feed, max_depth, max_vertices } => {
            let f = load_feed(feed)?;
            let g = exchange_graph(&f, *max_depth, *max_vertices)?;
            Ok(Outcome::ok(json!({ "command": "exchange-graph", "feed": f.to_json(), "graph": g.to_json() })))
        }
        Command::Phi { action } => cmd_phi(action),
        Command::Intertwine { action: IntertwineAction::Check { word, hbar, grid, tol } } => cmd_intertwine(word, *hbar, *grid, *tol),
        Command::Surface { action } => cmd_surface(action),
    }
}

/// Inline JSON, a file, or (when `named` recognises it) a built-in name.
fn load_text<T>(input: &str, named: impl Fn(&str) -> Option<Result<T>>, parse: impl Fn(&str) -> Result<T>) -> Result<T> {
    if let Some(v) = named(input) {
        return v;
    }
    if input.trim_start().starts_with('{') {
        return parse(input);
    }
    let text = std::fs::read_to_string(Path::new(input)).with_context(|| format!("reading `{input}`"))?;
    parse(&text).with_context(|| format!("parsing `{input}`"))
}

fn load_feed(input: &str) -> Result<Feed> {
    let named = |s: &str| {
        let p = match s {
            "A1xA1" => 0,
            "A2" => 1,
            "B2" => 2,
            "G2" => 3,
            _ => return None,
        };
        Some(Ok(Feed::rank2(p)))
    };
    load_text(input, named, |t| Ok(Feed::from_json(t)?))
}

fn load_word(input: &str) -> Result<ClusterTransformation> {
    let named = |s: &str| matches!(s, "square" | "pentagon" | "hexagon" | "octagon").then(|| Ok(named_word(s)?));
    load_text(input, named, |t| Ok(ClusterTransformation::from_json(t)?))
}

fn load_triangulation(input: &str) -> Result<Triangulation> {
    let named = |s: &str| -> Option<Result<Triangulation>> {
        if s == "punctured-torus" {
            return Some(Ok(Triangulation::punctured_torus()));
        }
        let parts: Vec<&str> = s.split('-').collect();
        let num = |x: &str| x.parse::<usize>().map_err(|_| anyhow!("bad number `{x}` in `{s}`"));
        match parts.as_slice() {
            ["disc", n] => Some(num(n).and_then(|n| Ok(Triangulation::polygon(n)?))),
            ["annulus", p, q] => Some(num(p).and_then(|p| Ok(Triangulation::annulus(p, num(q)?)?))),
            _ => None,
        }
    };
    load_text(input, named, |t| Ok(Triangulation::from_json(t)?))
}

fn cmd_mutate(feed: &str, k: usize, space: &str) -> Result<Outcome> {
    let f = load_feed(feed)?;
    if k == 0 || k > f.rank() {
        bail!("--k must be between 1 and {} (directions are 1-based), got {k}", f.rank());
    }
    let space = Space::parse(space)?;
    let sub = mutation(space, &f, k - 1)?;
    Ok(Outcome::ok(json!({
        "command": "mutate",
        "k": k,
        "space": format!("{space:?}"),
        "substitution": sub.to_json(),
        "mutated_feed": f.mutate(k - 1)?.to_json(),
    })))
}

fn cmd_verify(suite: &str, flags: &NumericFlags, samples: usize) -> Result<Outcome> {
    let which: Suite = suite.parse()?;
    let word = flags.word.as_deref().map(load_word).transpose()?;
    let opts = SuiteOptions { hbar: flags.hbar, grid: flags.grid, tol: flags.tol, seed: flags.seed, word, samples };
    let start = Instant::now();
    let checks = run_suite(which, &opts)?;
    let passed = checks.iter().all(|c| c.status.passed());
    let count = |s: Status| checks.iter().filter(|c| c.status == s).count();
    Ok(Outcome {
        passed,
        doc: json!({
            "command": format!("verify {which}"),
            "options": { "hbar": flags.hbar, "grid": flags.grid, "tol": flags.tol, "seed": flags.seed, "word": flags.word, "samples": samples },
            "passed": passed,
            "counts": { "exact-pass": count(Status::ExactPass), "numeric-pass": count(Status::NumericPass), "fail": count(Status::Fail) },
            "checks": serde_json::to_value(&checks)?,
            "seconds": start.elapsed().as_secs_f64(),
        }),
    })
}

fn cmd_phi(action: &PhiAction) -> Result<Outcome> {
    match action {
        PhiAction::Eval { z, hbar } => {
            let z = parse_complex(z)?;
            let v = quantum_dilog(z, Planck::new(*hbar)?)?;
            Ok(Outcome::ok(json!({ "command": "phi eval", "z": [z.re, z.im], "hbar": hbar, "value": [v.value.re, v.value.im], "err": v.err })))
        }
        PhiAction::Check { property, hbar } => {
            let props: Vec<Property> = if property.is_empty() {
                Property::ALL.to_vec()
            } else {
                property.iter().map(|p| p.parse()).collect::<std::result::Result<_, _>>()?
            };
            let grid = default_grid();
            let mut reports = props.iter().map(|&p| check_property(p, *hbar, &grid, (2, 1))).collect::<std::result::Result<Vec<_>, _>>()?;
            reports.sort_by(|a, b| a.property.cmp(&b.property));
            let passed = reports.iter().all(|r| r.passed);
            Ok(Outcome { passed, doc: json!({ "command": "phi check", "hbar": hbar, "passed": passed, "checks": serde_json::to_value(&reports)? }) })
        }
    }
}

fn cmd_intertwine(word: &str, hbar: f64, grid: usize, tol: f64) -> Result<Outcome> {
    let t = load_word(word)?;
    let tests = default_tests(t.source.rank())?;
    let report = verify_relation_numeric(&t, hbar, &tests, grid)?;
    let unitarity = unitarity_defect(&t.source, hbar, grid)?;
    let passed = report.passes(tol) && unitarity < tol;
    Ok(Outcome {
        passed,
        doc: json!({
            "command": "intertwine check",
            "word": word,
            "hbar": hbar,
            "grid": grid,
            "lambda": report.lambdas.first(),
            "lambdas": report.lambdas,
            "abs_dev": report.abs_dev,
            "phase_spread": report.phase_spread,
            "closed": report.closed,
            "residuals": { "scalar_deviation": report.deviation, "unitarity": unitarity },
            "passed": passed,
        }),
    })
}

fn cmd_surface(action: &SurfaceAction) -> Result<Outcome> {
    match action {
        SurfaceAction::Feed { triangulation } => {
            let t = load_triangulation(triangulation)?;
            Ok(Outcome::ok(json!({
                "command": "surface feed",
                "triangulation": t.to_json(),
                "internal_edges": t.internal_edges(),
                "feed": t.feed().to_json(),
            })))
        }
        SurfaceAction::Flip { triangulation, edge } => {
            let t = load_triangulation(triangulation)?;
            let (next, mu) = t.flip(*edge)?;
            let natural = next.feed() == t.feed().mutate(t.index_of(*edge)?)?;
            Ok(Outcome {
                passed: natural,
                doc: json!({
                    "command": "surface flip",
                    "edge": edge,
                    "triangulation": next.to_json(),
                    "feed": next.feed().to_json(),
                    "mutation": mu.to_json(),
                    "feed_is_mutated_feed": natural,
                }),
            })
        }
    }
}
