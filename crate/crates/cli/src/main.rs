//! `qli` — quantum link invariants of planar diagrams.
//!
//! Subcommands:
//!   compute        evaluate the invariant of a PD-coded diagram
//!   decompose      search for a carving decomposition and report it
//!   check-category load ribbon-category data and run the axiom suite
//!   oracle         run the brute-force reference evaluators
//!   bench          measure scalar-operation scaling on T(2,k) closures
//!
//! Exit codes: 0 success, 1 input/parse error, 2 category or axiom
//! error, 3 decomposition/realization failure with no fallback left,
//! 4 internal (engine, plan, pipeline, or oracle disagreement).

use clap::{Parser, Subcommand, ValueEnum};
use qli_core::carving;
use qli_core::category::{builtin, load_category, CategoryError, RibbonData};
use qli_core::compute::{
    carve_named, colouring_of, compute_invariant, Backend, ComputeError, ComputeOptions, Strategy,
};
use qli_core::corpus;
use qli_core::diagram::{parse_pd, LinkDiagram};
use qli_core::engine::{framing_normalize, Stats};
use qli_core::oracle::{kauffman_closed, morse_evaluate};
use qli_core::planner;
use qli_core::ring::{text, LaurentPoly};
use serde_json::json;
use std::fs;
use std::io::Read;

#[derive(Parser)]
#[command(name = "qli", version, about = "Quantum link invariants from planar diagrams")]
struct Cli {
    /// Worker threads for modular point/prime fan-out (default: all cores)
    #[arg(long, global = true, value_name = "K")]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute the invariant of a diagram
    Compute(ComputeArgs),
    /// Search for a carving decomposition and report it
    Decompose(DecomposeArgs),
    /// Load a ribbon-category file and run the axiom suite
    CheckCategory {
        /// Category JSON file, or a builtin name (trivial, sl2)
        file: String,
    },
    /// Run the brute-force reference evaluators on a diagram
    Oracle(OracleArgs),
    /// Measure scalar-operation scaling on the T(2,k) closure family
    Bench(BenchArgs),
}

#[derive(Parser)]
struct ComputeArgs {
    /// PD file, or `-` for stdin
    input: String,
    /// Builtin category name (trivial, sl2) or a category JSON file
    #[arg(long, default_value = "sl2")]
    category: String,
    /// Colour component I (1-based) with object NAME; repeatable
    #[arg(long = "color", value_name = "I=NAME")]
    color: Vec<String>,
    #[arg(long, value_enum, default_value_t = BackendArg::Exact)]
    backend: BackendArg,
    /// Redundant safety primes added to the modular backend
    #[arg(long = "primes-extra", value_name = "K", default_value_t = 0)]
    primes_extra: usize,
    #[arg(long, value_enum, default_value_t = StrategyArg::Auto)]
    decomposition: StrategyArg,
    /// Divide out one framing unit per writhe unit
    #[arg(long)]
    normalize_framing: bool,
    /// Include the contraction plan and its cost estimate (implies --json)
    #[arg(long)]
    emit_plan: bool,
    /// Re-root the carving tree at node K; errors out instead of falling back
    #[arg(long, value_name = "K")]
    root_edge: Option<usize>,
    /// Cross-check the unnormalized value against the dense sweep oracle
    #[arg(long)]
    oracle_check: bool,
    /// Print one versioned JSON document instead of text lines
    #[arg(long)]
    json: bool,
}

#[derive(Parser)]
struct DecomposeArgs {
    /// PD file, or `-` for stdin
    input: String,
    #[arg(long, value_enum, default_value_t = StrategyArg::Auto)]
    decomposition: StrategyArg,
}

#[derive(Parser)]
struct OracleArgs {
    /// PD file, or `-` for stdin
    input: String,
    /// Builtin category name (trivial, sl2) or a category JSON file
    #[arg(long, default_value = "sl2")]
    category: String,
    /// Colour component I (1-based) with object NAME; repeatable
    #[arg(long = "color", value_name = "I=NAME")]
    color: Vec<String>,
}

#[derive(Parser)]
struct BenchArgs {
    /// Diagram family (only torus2 is available)
    #[arg(long, default_value = "torus2")]
    family: String,
    /// Largest k in the T(2,k) sweep
    #[arg(long, default_value_t = 11)]
    max: i64,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Exact,
    Modular,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Auto,
    Exact,
    Heuristic,
    Sweep,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::Auto => Strategy::Auto,
            StrategyArg::Exact => Strategy::Exact,
            StrategyArg::Heuristic => Strategy::Heuristic,
            StrategyArg::Sweep => Strategy::Sweep,
        }
    }
}

/// An error already mapped to its exit code.
struct Failure {
    code: i32,
    msg: String,
}

impl Failure {
    fn new(code: i32, msg: impl Into<String>) -> Self {
        Failure { code, msg: msg.into() }
    }
}

type CliResult<T> = Result<T, Failure>;

fn category_failure(e: CategoryError) -> Failure {
    Failure::new(2, e.to_string())
}

fn compute_failure(e: ComputeError) -> Failure {
    let code = match &e {
        ComputeError::UnknownColour { .. } => 2,
        ComputeError::Carving(_)
        | ComputeError::RootEdgeSplit { .. }
        | ComputeError::RootEdgeRange { .. } => 3,
        _ => 4,
    };
    Failure::new(code, e.to_string())
}

fn main() {
    // Die quietly when a downstream consumer (`head`, a closed pager)
    // stops reading, instead of panicking on EPIPE.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        // The global pool can only be installed once; a second attempt
        // (e.g. under tests) is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global();
    }
    let result = match cli.cmd {
        Cmd::Compute(args) => cmd_compute(args),
        Cmd::Decompose(args) => cmd_decompose(args),
        Cmd::CheckCategory { file } => cmd_check_category(&file),
        Cmd::Oracle(args) => cmd_oracle(args),
        Cmd::Bench(args) => cmd_bench(args),
    };
    if let Err(f) = result {
        eprintln!("error: {}", f.msg);
        std::process::exit(f.code);
    }
}

fn read_input(path: &str) -> CliResult<String> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Failure::new(1, format!("cannot read stdin: {e}")))?;
        Ok(buf)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::new(1, format!("cannot read {path}: {e}")))
    }
}

/// Parse the PD input and apply `--color I=NAME` overrides (1-based
/// component indices, matching the `component i color NAME` header).
fn read_diagram(path: &str, colors: &[String]) -> CliResult<LinkDiagram> {
    let input = read_input(path)?;
    let mut d = parse_pd(&input).map_err(|e| Failure::new(1, e.to_string()))?;
    for spec in colors {
        let (idx, name) = spec
            .split_once('=')
            .ok_or_else(|| Failure::new(1, format!("--color expects I=NAME, got `{spec}`")))?;
        let i: usize = idx
            .trim()
            .parse()
            .map_err(|_| Failure::new(1, format!("--color index `{idx}` is not a number")))?;
        if i == 0 || i > d.components.len() {
            return Err(Failure::new(
                1,
                format!(
                    "--color component {i} out of range; diagram has {} components (1-based)",
                    d.components.len()
                ),
            ));
        }
        d.components[i - 1].color = Some(name.trim().to_string());
    }
    Ok(d)
}

/// Resolve `--category`: builtin name first, then a JSON file path.
/// Both routes run the full axiom suite before returning data.
fn load_cat(spec: &str) -> CliResult<RibbonData> {
    match builtin(spec) {
        Ok(cat) => Ok(cat),
        Err(CategoryError::UnknownBuiltin(_)) => {
            let text = fs::read_to_string(spec)
                .map_err(|e| Failure::new(2, format!("cannot read category `{spec}`: {e}")))?;
            load_category(&text).map_err(category_failure)
        }
        Err(e) => Err(category_failure(e)),
    }
}

fn stats_json(s: &Stats) -> serde_json::Value {
    json!({
        "congestion": s.congestion,
        "peak_len": s.peak_len,
        "scalar_ops": s.scalar_ops,
        "merges_small": s.merges_small,
        "merges_large": s.merges_large,
        "slides": s.slides,
    })
}

/// Product over connected components of the dense sweep oracle; the
/// reference value for `--oracle-check`.
fn sweep_oracle_product(d: &LinkDiagram, cat: &RibbonData) -> CliResult<LaurentPoly> {
    let mut product = LaurentPoly::one();
    for piece in d.split_components() {
        let piece = piece.broken_self_loops();
        let colouring = colouring_of(&piece, cat).map_err(compute_failure)?;
        let v = morse_evaluate(&piece, cat, &colouring)
            .map_err(|e| Failure::new(4, format!("dense sweep oracle failed: {e}")))?;
        product = product.checked_mul(&v).map_err(|e| Failure::new(4, e.to_string()))?;
    }
    Ok(product)
}

fn cmd_compute(args: ComputeArgs) -> CliResult<()> {
    let cat = load_cat(&args.category)?;
    let d = read_diagram(&args.input, &args.color)?;
    let opts = ComputeOptions {
        strategy: args.decomposition.into(),
        backend: match args.backend {
            BackendArg::Exact => Backend::Exact,
            BackendArg::Modular => Backend::Modular { extra_primes: args.primes_extra },
        },
        // Normalization happens below so the oracle comparison always
        // sees the raw framed value.
        normalize_framing: false,
        root_edge: args.root_edge,
    };
    let outcome = compute_invariant(&d, &cat, &opts).map_err(compute_failure)?;

    let mut oracle_verdict = None;
    if args.oracle_check {
        let reference = sweep_oracle_product(&d, &cat)?;
        if reference != outcome.value {
            return Err(Failure::new(
                4,
                format!(
                    "oracle mismatch: engine {} vs dense sweep {}",
                    text::render(&outcome.value, &cat.variable),
                    text::render(&reference, &cat.variable)
                ),
            ));
        }
        oracle_verdict = Some("agree");
    }

    let value = if args.normalize_framing {
        framing_normalize(&outcome.value, outcome.writhe, &cat)
    } else {
        outcome.value.clone()
    };
    let rendered = text::render(&value, &cat.variable);

    if args.json || args.emit_plan {
        let mut doc = json!({
            "version": 1,
            "invariant": rendered,
            "variable": cat.variable,
            "normalized": args.normalize_framing,
            "writhe": outcome.writhe,
            "components": outcome.components,
            "stats": stats_json(&outcome.stats),
        });
        if !outcome.modular.is_empty() {
            doc["modular"] = json!(outcome.modular);
        }
        if args.emit_plan {
            let mut plans = Vec::new();
            for plan in &outcome.plans {
                let cost = planner::estimate_cost(plan, &cat)
                    .map_err(|e| Failure::new(4, e.to_string()))?;
                plans.push(json!({ "plan": plan, "cost": cost }));
            }
            doc["plans"] = json!(plans);
        }
        if let Some(v) = oracle_verdict {
            doc["oracle"] = json!(v);
        }
        println!("{}", serde_json::to_string_pretty(&doc).expect("serializable document"));
    } else {
        println!("{rendered}");
        println!("writhe: {}", outcome.writhe);
        if outcome.components > 1 {
            println!("components: {}", outcome.components);
        }
        let s = &outcome.stats;
        println!(
            "stats: congestion={} peak_len={} scalar_ops={} merges_small={} merges_large={} slides={}",
            s.congestion, s.peak_len, s.scalar_ops, s.merges_small, s.merges_large, s.slides
        );
        for (i, m) in outcome.modular.iter().enumerate() {
            println!(
                "modular[{i}]: points={} primes={:?} max_point_bits={} shift={} degree_bound={}",
                m.points, m.primes, m.max_point_bits, m.shift, m.degree_bound
            );
        }
        if let Some(v) = oracle_verdict {
            println!("oracle: {v}");
        }
    }
    Ok(())
}

fn cmd_decompose(args: DecomposeArgs) -> CliResult<()> {
    let d = read_diagram(&args.input, &[])?;
    let strategy: Strategy = args.decomposition.into();
    let pieces = d.split_components();
    let mut reports = Vec::new();
    for (ci, piece) in pieces.iter().enumerate() {
        let piece = piece.broken_self_loops();
        let (tree, used) =
            carve_named(&piece, strategy).map_err(|e| Failure::new(3, e.to_string()))?;
        let realizable = carving::realize(&tree, &piece).is_ok();
        if pieces.len() > 1 {
            println!("# component {}", ci + 1);
        }
        let rendered = tree.render_text(&piece);
        print!("{rendered}");
        if !rendered.ends_with('\n') {
            println!();
        }
        reports.push(json!({
            "congestion": tree.congestion(&piece),
            "weights": tree.weights(&piece),
            "realizable": realizable,
            "strategy": used,
        }));
    }
    let doc = if reports.len() == 1 {
        let mut only = reports.pop().expect("one report");
        only["version"] = json!(1);
        only
    } else {
        json!({ "version": 1, "components": reports })
    };
    println!("{}", serde_json::to_string_pretty(&doc).expect("serializable document"));
    Ok(())
}

fn cmd_check_category(file: &str) -> CliResult<()> {
    let cat = load_cat(file)?;
    println!("variable: {}", cat.variable);
    for (i, obj) in cat.objects.iter().enumerate() {
        println!(
            "object {i}: {} (dim {}, dual {})",
            obj.name, obj.dim, cat.objects[obj.dual].name
        );
    }
    println!("{}", cat.axiom_check());
    Ok(())
}

fn cmd_oracle(args: OracleArgs) -> CliResult<()> {
    let cat = load_cat(&args.category)?;
    let d = read_diagram(&args.input, &args.color)?;
    let sweep = sweep_oracle_product(&d, &cat)?;
    println!("dense sweep oracle: {}", text::render(&sweep, &cat.variable));
    let default_sl2 = args.category == "sl2" && d.components.iter().all(|c| c.color.is_none());
    if default_sl2 {
        let bracket = kauffman_closed(&d);
        println!("state sum oracle:   {}", text::render(&bracket, &cat.variable));
        if bracket != sweep {
            return Err(Failure::new(4, "the two oracles disagree"));
        }
        println!("oracle: agree");
    } else {
        println!("state sum oracle:   skipped (defined for builtin sl2 with default colouring)");
    }
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> CliResult<()> {
    if args.family != "torus2" {
        return Err(Failure::new(1, format!("unknown family `{}`; available: torus2", args.family)));
    }
    if args.max < 3 {
        return Err(Failure::new(1, "--max must be at least 3"));
    }
    let cat = builtin("sl2").map_err(category_failure)?;
    let start = std::time::Instant::now();
    println!("family torus2: T(2,k) closures, sweep decomposition, builtin sl2 (N = 2)");
    println!(
        "{:>3} {:>10} {:>11} {:>12} {:>10} {:>9}",
        "k", "crossings", "congestion", "scalar_ops", "bound 64k", "ops/64k"
    );
    let mut ratios = Vec::new();
    for k in 3..=args.max {
        let d = parse_pd(&corpus::torus2(k)).map_err(|e| Failure::new(4, e.to_string()))?;
        let tree = carving::sweep_carving(&d).map_err(|e| Failure::new(3, e.to_string()))?;
        let real = carving::realize(&tree, &d).map_err(|e| Failure::new(3, e.to_string()))?;
        let colouring = vec![0; d.components.len()];
        let plan = planner::build_plan(&d, &tree, &real, &cat, &colouring)
            .map_err(|e| Failure::new(4, e.to_string()))?;
        let cost =
            planner::estimate_cost(&plan, &cat).map_err(|e| Failure::new(4, e.to_string()))?;
        let bound = 64 * k as u64;
        let ratio = cost.scalar_ops as f64 / bound as f64;
        ratios.push(ratio);
        println!(
            "{:>3} {:>10} {:>11} {:>12} {:>10} {:>9.3}",
            k,
            d.crossing_count(),
            plan.congestion,
            cost.scalar_ops,
            bound,
            ratio
        );
    }
    let hi = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let lo = ratios.iter().cloned().fold(f64::MAX, f64::min);
    println!("ratio spread max/min: {:.3}", hi / lo);
    println!("wall time: {:.3?}", start.elapsed());
    Ok(())
}
