//! The `ccl` command line: instance generation, single runs, oracle
//! comparisons, formula analysis and parallel sweeps.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 algorithmic failure
//! (sampling abort after all retries, infeasible instance), 3 an oracle
//! comparison found a violation.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::analyzer::{self, eval_memory, formula_table_csv, standard_crossovers, MemoryKind};
use crate::apsp::{apsp_with_routing, floyd_warshall, ApspConfig, ApspResult};
use crate::dmst::{edmonds_oracle, iteration_bound, run_dmst};
use crate::error::Error;
use crate::graph::{
    fourth_root, gen_random_graph, gen_spanning_graph, is_finite, next_fourth_power, pad_to_fourth_power, parse_instance,
    serialize_instance, DmstInstance, ParsedInstance, SteinerInstance, WeightedGraph,
};
use crate::grover::GroverParams;
use crate::sim::sampling::splitmix64;
use crate::sim::{CostMode, CostModel};
use crate::steiner::{run_steiner, steiner_exact_oracle, within_ratio};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_ALGORITHMIC: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "ccl", version, about = "Congested-clique simulator for quantum distributed graph algorithms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a random instance file.
    Gen(GenArgs),
    /// Run one algorithm on an instance file.
    Run(RunArgs),
    /// Run an algorithm and check it against its exact oracle.
    Compare(CompareArgs),
    /// Evaluate the closed-form cost and memory formulas.
    Analyze {
        #[command(subcommand)]
        which: Analysis,
    },
    /// Run many seeded comparison trials in parallel (CCL_THREADS caps workers).
    Sweep(SweepArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    Apsp,
    Steiner,
    Dmst,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Graph,
    Steiner,
    Dmst,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    Measured,
    Paper,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// Cost accounting: simulate messages, or charge the closed-form counts.
    #[arg(long, value_enum, default_value = "paper")]
    pub model: Model,
    /// Message size in multiples of ceil(log2 n) bits.
    #[arg(long, default_value_t = 2)]
    pub bandwidth: u32,
    #[arg(long)]
    pub seed: u64,
    /// Extra FindEdges attempts after a sampling abort.
    #[arg(long, default_value_t = 3)]
    pub retries: u32,
    /// Probability that an individual quantum search reports failure.
    #[arg(long, default_value_t = 0.0)]
    pub failure_rate: f64,
}

impl ModelArgs {
    pub fn config(&self) -> ApspConfig {
        let mode = match self.model {
            Model::Measured => CostMode::Measured,
            Model::Paper => CostMode::PaperCharged,
        };
        ApspConfig {
            model: CostModel {
                mode,
                bandwidth_factor: self.bandwidth,
            },
            seed: self.seed,
            retry_limit: self.retries,
            grover: GroverParams {
                failure_rate: self.failure_rate,
                ..GroverParams::default()
            },
            ..ApspConfig::default()
        }
    }

    fn describe(&self) -> Value {
        json!({
            "model": match self.model { Model::Measured => "measured", Model::Paper => "paper" },
            "bandwidth_factor": self.bandwidth,
            "seed": self.seed,
            "retries": self.retries,
            "failure_rate": self.failure_rate,
        })
    }
}

#[derive(Args, Debug, Clone)]
pub struct InstanceArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0.3)]
    pub density: f64,
    #[arg(long, default_value_t = 10)]
    pub wmax: i64,
    /// Terminal count for Steiner instances.
    #[arg(long, default_value_t = 3)]
    pub terminals: usize,
    /// Root (1-based) for DMST instances.
    #[arg(long, default_value_t = 1)]
    pub root: usize,
    /// Directed plain graph.
    #[arg(long)]
    pub directed: bool,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, value_enum, default_value = "graph")]
    pub kind: Kind,
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long)]
    pub seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[arg(value_enum)]
    pub algorithm: Algorithm,
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[arg(value_enum)]
    pub algorithm: Algorithm,
    /// Instance file; otherwise one is generated from the flags below.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0.3)]
    pub density: f64,
    #[arg(long, default_value_t = 10)]
    pub wmax: i64,
    #[arg(long, default_value_t = 3)]
    pub terminals: usize,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Analysis {
    /// Where each quantum formula drops below its comparator.
    Crossovers {
        /// Multiplicative step of the fine scan.
        #[arg(long, default_value_t = analyzer::DEFAULT_GRANULARITY)]
        granularity: f64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// f, h, g and the trivial bound at the given sizes.
    Formulas {
        #[arg(long, num_args = 1.., default_values_t = [4096.0])]
        n: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        wmax: f64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Peak per-node memory of the three APSP strategies.
    Memory {
        #[arg(long, default_value_t = 1.0)]
        wmax: f64,
        #[arg(long, num_args = 1.., default_values_t = [1e6, 1e8, 1e10, 1.6e10, 1e12])]
        n: Vec<f64>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(value_enum)]
    pub algorithm: Algorithm,
    #[arg(long, default_value_t = 10)]
    pub trials: u64,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0.3)]
    pub density: f64,
    #[arg(long, default_value_t = 10)]
    pub wmax: i64,
    #[arg(long, default_value_t = 3)]
    pub terminals: usize,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError {
            code: if e.is_algorithmic() { EXIT_ALGORITHMIC } else { EXIT_USAGE },
            message: e.to_string(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

fn usage(message: impl Into<String>) -> CliError {
    CliError {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

fn execute(cmd: Command) -> CliResult<i32> {
    match cmd {
        Command::Gen(a) => cmd_gen(&a).map(|_| EXIT_OK),
        Command::Run(a) => cmd_run(&a).map(|_| EXIT_OK),
        Command::Compare(a) => cmd_compare(&a),
        Command::Analyze { which } => cmd_analyze(&which).map(|_| EXIT_OK),
        Command::Sweep(a) => cmd_sweep(&a),
    }
}

fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| usage(format!("cannot write to stdout: {e}")))
        }
    }
}

fn emit_json(path: Option<&Path>, mut v: Value) -> CliResult<()> {
    if let Value::Object(m) = &mut v {
        m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    }
    let text = serde_json::to_string_pretty(&v).expect("values serialise") + "\n";
    emit(path, &text)
}

fn check_instance_args(a: &InstanceArgs) -> CliResult<()> {
    if a.n == 0 {
        return Err(usage("--n must be positive"));
    }
    if !(a.density > 0.0 && a.density <= 1.0) {
        return Err(usage("--density must lie in (0, 1]"));
    }
    if a.wmax < 1 {
        return Err(usage("--wmax must be at least 1"));
    }
    Ok(())
}

/// Picks `k` distinct nodes with a seeded shuffle.
fn pick_terminals(n: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7e4d);
    let mut nodes: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        nodes.swap(i, rng.gen_range(0..=i));
    }
    nodes.truncate(k.clamp(1, n));
    nodes.sort_unstable();
    nodes
}

/// The generated instance and any header comment lines.
pub fn generate(kind: Kind, a: &InstanceArgs, seed: u64) -> CliResult<(ParsedInstance, Vec<String>)> {
    check_instance_args(a)?;
    let mut notes = Vec::new();
    let parsed = match kind {
        Kind::Graph => {
            let g = gen_random_graph(a.n, a.density, a.wmax, a.directed, seed);
            let graph = if fourth_root(a.n).is_none() {
                notes.push(format!("padded from n={} to n'={} with isolated nodes", a.n, next_fourth_power(a.n)));
                pad_to_fourth_power(&g)
            } else {
                g
            };
            ParsedInstance {
                graph,
                terminals: None,
                root: None,
            }
        }
        Kind::Steiner => ParsedInstance {
            graph: gen_spanning_graph(a.n, a.density, a.wmax, false, 0, seed),
            terminals: Some(pick_terminals(a.n, a.terminals, seed)),
            root: None,
        },
        Kind::Dmst => {
            if a.root == 0 || a.root > a.n {
                return Err(usage(format!("--root must lie in [1, {}]", a.n)));
            }
            ParsedInstance {
                graph: gen_spanning_graph(a.n, a.density, a.wmax, true, a.root - 1, seed),
                terminals: None,
                root: Some(a.root - 1),
            }
        }
    };
    Ok((parsed, notes))
}

/// The instance file text for `ccl gen`, with the padding notes it printed.
pub fn instance_text(kind: Kind, a: &InstanceArgs, seed: u64) -> CliResult<(String, Vec<String>)> {
    let (inst, notes) = generate(kind, a, seed)?;
    let mut text =
        format!("# ccl gen --kind {:?} --n {} --density {} --wmax {} --seed {}\n", kind, a.n, a.density, a.wmax, seed)
            .to_lowercase();
    for note in &notes {
        text.push_str(&format!("# {note}\n"));
    }
    text.push_str(&serialize_instance(&inst));
    Ok((text, notes))
}

fn cmd_gen(a: &GenArgs) -> CliResult<()> {
    let (text, notes) = instance_text(a.kind, &a.instance, a.seed)?;
    for note in &notes {
        eprintln!("note: {note}");
    }
    emit(a.out.as_deref(), &text)
}

pub fn read_instance(path: &Path) -> CliResult<ParsedInstance> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_instance(&text)?)
}

fn steiner_instance(p: &ParsedInstance) -> CliResult<SteinerInstance> {
    let z = p.terminals.clone().ok_or_else(|| usage("Steiner instance needs a `Z` terminal line"))?;
    Ok(SteinerInstance::new(p.graph.clone(), z)?)
}

fn dmst_instance(p: &ParsedInstance) -> CliResult<DmstInstance> {
    let r = p.root.ok_or_else(|| usage("DMST instance needs an `R` root line"))?;
    Ok(DmstInstance::new(p.graph.clone(), r)?)
}

fn cmd_run(a: &RunArgs) -> CliResult<()> {
    let p = read_instance(&a.input)?;
    let result = run_algorithm(a.algorithm, &p, &a.model.config())?;
    emit_json(
        a.output.as_deref(),
        json!({
            "command": "run",
            "algorithm": algorithm_name(a.algorithm),
            "n": p.graph.n(),
            "config": a.model.describe(),
            "result": result,
        }),
    )
}

/// Runs one algorithm and returns its JSON report.
pub fn run_algorithm(algorithm: Algorithm, p: &ParsedInstance, cfg: &ApspConfig) -> CliResult<Value> {
    Ok(match algorithm {
        Algorithm::Apsp => {
            p.graph.validate_input()?;
            apsp_with_routing(&p.graph, cfg)?.to_json()
        }
        Algorithm::Steiner => run_steiner(&steiner_instance(p)?, cfg)?.to_json(None),
        Algorithm::Dmst => {
            let inst = dmst_instance(p)?;
            run_dmst(&inst, cfg)?.to_json(inst.root, None)
        }
    })
}

pub fn algorithm_name(a: Algorithm) -> &'static str {
    match a {
        Algorithm::Apsp => "apsp",
        Algorithm::Steiner => "steiner",
        Algorithm::Dmst => "dmst",
    }
}

/// Outcome of one oracle comparison.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub ok: bool,
    pub verdict: String,
    pub rounds: u64,
    pub classical_bits: u64,
    pub detail: Value,
}

fn apsp_walks_exact(g: &WeightedGraph, r: &ApspResult) -> bool {
    let d = &r.distances;
    (0..g.n()).all(|v| {
        (0..g.n()).all(|u| {
            v == u
                || !is_finite(d.get(v, u))
                || r.routing
                    .walk(v, u)
                    .is_some_and(|p| p.windows(2).map(|h| g.weight(h[0], h[1])).sum::<i64>() == d.get(v, u))
        })
    })
}

pub fn compare(algorithm: Algorithm, p: &ParsedInstance, cfg: &ApspConfig) -> CliResult<Comparison> {
    Ok(match algorithm {
        Algorithm::Apsp => {
            p.graph.validate_input()?;
            let r = apsp_with_routing(&p.graph, cfg)?;
            let same = r.distances == floyd_warshall(&p.graph);
            let walks = apsp_walks_exact(&p.graph, &r);
            Comparison {
                ok: same && walks,
                verdict: if same { "matrices identical" } else { "matrices differ" }.into(),
                rounds: r.ledger.rounds,
                classical_bits: r.ledger.classical_bits,
                detail: json!({ "distances_equal": same, "routing_walks_exact": walks, "ledger": r.ledger.to_json() }),
            }
        }
        Algorithm::Steiner => {
            let inst = steiner_instance(p)?;
            let run = run_steiner(&inst, cfg)?;
            let opt = steiner_exact_oracle(&inst)?;
            let l = opt.terminal_leaves.max(1);
            let ok = within_ratio(run.tree.weight, opt.weight, l)
                && run.tree.is_tree()
                && run.tree.spans(&inst.terminals)
                && run.tree.leaves().iter().all(|&v| inst.is_terminal(v));
            let bound = 2.0 * (1.0 - 1.0 / l as f64);
            let ratio = if opt.weight == 0 { 1.0 } else { run.tree.weight as f64 / opt.weight as f64 };
            Comparison {
                ok,
                verdict: format!("ratio {ratio:.4} against bound {bound:.4} (l = {l})"),
                rounds: run.ledger.rounds,
                classical_bits: run.ledger.classical_bits,
                detail: json!({ "weight": run.tree.weight, "optimum": opt.weight, "l": l, "ratio": ratio, "bound": bound, "within_bound": ok, "run": run.to_json(Some(&opt)) }),
            }
        }
        Algorithm::Dmst => {
            let inst = dmst_instance(p)?;
            let run = run_dmst(&inst, cfg)?;
            let want = edmonds_oracle(&inst)?;
            let equal = run.result.weight == want.weight;
            let within = run.iterations <= iteration_bound(inst.graph.n());
            let valid = run.result.is_arborescence(&inst.graph, inst.root);
            Comparison {
                ok: equal && within && valid,
                verdict: if equal { "weight equal" } else { "weight differs" }.into(),
                rounds: run.ledger.rounds,
                classical_bits: run.ledger.classical_bits,
                detail: json!({
                    "weight": run.result.weight,
                    "optimum": want.weight,
                    "iterations": run.iterations,
                    "iteration_bound": iteration_bound(inst.graph.n()),
                    "arborescence": valid,
                    "run": run.to_json(inst.root, Some(want.weight)),
                }),
            }
        }
    })
}

fn generated_for(algorithm: Algorithm, n: usize, density: f64, wmax: i64, terminals: usize, seed: u64) -> CliResult<ParsedInstance> {
    let a = InstanceArgs {
        n,
        density,
        wmax,
        terminals,
        root: 1,
        directed: false,
    };
    let kind = match algorithm {
        Algorithm::Apsp => Kind::Graph,
        Algorithm::Steiner => Kind::Steiner,
        Algorithm::Dmst => Kind::Dmst,
    };
    Ok(generate(kind, &a, seed)?.0)
}

fn cmd_compare(a: &CompareArgs) -> CliResult<i32> {
    let p = match (&a.input, a.n) {
        (Some(path), _) => read_instance(path)?,
        (None, Some(n)) => generated_for(a.algorithm, n, a.density, a.wmax, a.terminals, a.model.seed)?,
        (None, None) => return Err(usage("give --input or --n")),
    };
    let c = compare(a.algorithm, &p, &a.model.config())?;
    emit_json(
        a.output.as_deref(),
        json!({
            "command": "compare",
            "algorithm": algorithm_name(a.algorithm),
            "n": p.graph.n(),
            "config": a.model.describe(),
            "ok": c.ok,
            "verdict": c.verdict,
            "detail": c.detail,
        }),
    )?;
    Ok(if c.ok { EXIT_OK } else { EXIT_VIOLATION })
}

/// Reference orders of magnitude for each standard crossover, in the order
/// `standard_crossovers` returns them.
const CROSSOVER_REFERENCES: [&str; 7] = ["1e18", "1e18", "1e16", "2.6e11", ">1e21", ">1e14", "1.6e10"];

fn csv_string(header: &[&str], rows: Vec<Vec<String>>) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| usage(e.to_string());
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(r).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn cmd_analyze(which: &Analysis) -> CliResult<()> {
    match which {
        Analysis::Crossovers { granularity, format } => {
            let rows = standard_crossovers(*granularity)?;
            match format {
                Format::Json => emit_json(
                    None,
                    json!({
                        "command": "analyze crossovers",
                        "crossovers": rows.iter().zip(CROSSOVER_REFERENCES).map(|(r, reference)| {
                            let mut v = serde_json::to_value(r).expect("serialisable");
                            v["reference"] = json!(reference);
                            v
                        }).collect::<Vec<_>>(),
                    }),
                ),
                Format::Csv => {
                    let header = [
                        "formula",
                        "comparator",
                        "threshold",
                        "reference",
                        "formula_at_threshold",
                        "comparator_at_threshold",
                        "previous",
                        "formula_at_previous",
                        "comparator_at_previous",
                    ];
                    let body = rows
                        .iter()
                        .zip(CROSSOVER_REFERENCES)
                        .map(|(r, reference)| {
                            vec![
                                r.formula.to_string(),
                                r.comparator.to_string(),
                                format!("{:e}", r.threshold),
                                reference.to_string(),
                                format!("{:e}", r.formula_at_threshold),
                                format!("{:e}", r.comparator_at_threshold),
                                format!("{:e}", r.previous),
                                format!("{:e}", r.formula_at_previous),
                                format!("{:e}", r.comparator_at_previous),
                            ]
                        })
                        .collect();
                    emit(None, &csv_string(&header, body)?)
                }
            }
        }
        Analysis::Formulas { n, wmax, format } => match format {
            Format::Csv => emit(None, &formula_table_csv(n, *wmax)?),
            Format::Json => {
                let rows: Vec<Value> = n
                    .iter()
                    .map(|&x| {
                        json!({
                            "n": x,
                            "f": analyzer::eval_f_full_w(x, *wmax),
                            "f_distances": analyzer::eval_f_distances(x),
                            "h": analyzer::eval_h(x),
                            "g": analyzer::eval_g_full_w(x, *wmax),
                            "trivial": analyzer::eval_trivial(x),
                        })
                    })
                    .collect();
                emit_json(None, json!({ "command": "analyze formulas", "wmax": wmax, "rows": rows }))
            }
        },
        Analysis::Memory { wmax, n, format } => {
            let kinds = [MemoryKind::QuantumApsp, MemoryKind::Trivial, MemoryKind::ClassicalApsp];
            let mut rows = Vec::new();
            for &x in n {
                let mut row = vec![x];
                for k in kinds {
                    row.push(eval_memory(k, x, *wmax)?);
                }
                rows.push(row);
            }
            match format {
                Format::Csv => emit(
                    None,
                    &csv_string(
                        &["n", "memory_quantum", "memory_trivial", "memory_classical"],
                        rows.iter().map(|r| r.iter().map(|v| format!("{v:e}")).collect()).collect(),
                    )?,
                ),
                Format::Json => emit_json(
                    None,
                    json!({
                        "command": "analyze memory",
                        "wmax": wmax,
                        "rows": rows.iter().map(|r| json!({
                            "n": r[0], "memory_quantum": r[1], "memory_trivial": r[2], "memory_classical": r[3],
                        })).collect::<Vec<_>>(),
                    }),
                ),
            }
        }
    }
}

/// Worker count: `CCL_THREADS` when set to a positive integer, else rayon's default.
pub fn worker_count() -> Option<usize> {
    std::env::var("CCL_THREADS").ok()?.trim().parse().ok().filter(|&t| t > 0)
}

#[derive(Debug, Clone)]
struct TrialRow {
    trial: u64,
    seed: u64,
    status: &'static str,
    verdict: String,
    rounds: u64,
    classical_bits: u64,
}

fn cmd_sweep(a: &SweepArgs) -> CliResult<i32> {
    let base = a.model.clone();
    let trial = |t: u64| -> TrialRow {
        let seed = splitmix64(base.seed ^ t.wrapping_mul(0x9e37_79b9));
        let cfg = ApspConfig { seed, ..base.config() };
        let outcome = generated_for(a.algorithm, a.n, a.density, a.wmax, a.terminals, seed).and_then(|p| compare(a.algorithm, &p, &cfg));
        match outcome {
            Ok(c) => TrialRow {
                trial: t,
                seed,
                status: if c.ok { "ok" } else { "violation" },
                verdict: c.verdict,
                rounds: c.rounds,
                classical_bits: c.classical_bits,
            },
            Err(e) => TrialRow {
                trial: t,
                seed,
                status: if e.code == EXIT_ALGORITHMIC { "failure" } else { "error" },
                verdict: e.message,
                rounds: 0,
                classical_bits: 0,
            },
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = worker_count() {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| usage(e.to_string()))?;
    let rows: Vec<TrialRow> = pool.install(|| (0..a.trials).into_par_iter().map(trial).collect());

    if let Some(bad) = rows.iter().find(|r| r.status == "error") {
        return Err(usage(bad.verdict.clone()));
    }
    let text = match a.format {
        Format::Csv => csv_string(
            &["trial", "seed", "status", "verdict", "rounds", "classical_bits"],
            rows.iter()
                .map(|r| {
                    vec![
                        r.trial.to_string(),
                        r.seed.to_string(),
                        r.status.to_string(),
                        r.verdict.clone(),
                        r.rounds.to_string(),
                        r.classical_bits.to_string(),
                    ]
                })
                .collect(),
        )?,
        Format::Json => {
            let mut v = json!({
                "command": "sweep",
                "algorithm": algorithm_name(a.algorithm),
                "config": a.model.describe(),
                "trials": rows.iter().map(|r| json!({
                    "trial": r.trial, "seed": r.seed, "status": r.status, "verdict": r.verdict,
                    "rounds": r.rounds, "classical_bits": r.classical_bits,
                })).collect::<Vec<_>>(),
                "schema_version": SCHEMA_VERSION,
            });
            v["summary"] = json!({
                "ok": rows.iter().filter(|r| r.status == "ok").count(),
                "failure": rows.iter().filter(|r| r.status == "failure").count(),
                "violation": rows.iter().filter(|r| r.status == "violation").count(),
            });
            serde_json::to_string_pretty(&v).expect("serialisable") + "\n"
        }
    };
    emit(a.output.as_deref(), &text)?;
    Ok(if rows.iter().any(|r| r.status == "violation") { EXIT_VIOLATION } else { EXIT_OK })
}
