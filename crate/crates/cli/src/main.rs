use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use log::info;

use vcsynth::config::LocalConfiguration;
use vcsynth::graph::{vc_oracle, Graph, Instance};
use vcsynth::measure::{branching_number, combine_bound, to_f64, BranchVector, Measure};
use vcsynth::rulegen::{gensa, verify_table, GenConfig, Limits, RuleMode, RuleTable};
use vcsynth::runtime::{solve_deterministic, solve_randomized, TableSet, TrialPlan};
use vcsynth::subspace::{classify, name, parse_name, root_config, SUBSPACE_COUNT};

/// Seed used when `--seed` is not given.
const DEFAULT_SEED: u64 = 20_241_019;

const EXIT_NO: u8 = 1;
const EXIT_GENERATION: u8 = 2;
const EXIT_INPUT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "vcsynth",
    version,
    about = "Generate, certify and run branching algorithms for vertex cover on subcubic graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate and certify rule tables.
    Generate(GenerateArgs),
    /// Decide a vertex cover instance with certified rule tables.
    Solve(SolveArgs),
    /// Running-time arithmetic: branching numbers and bound combination.
    Bound(BoundArgs),
    /// Print the subspace (P1..P19) of a graph.
    Classify { graph: PathBuf },
    /// Re-check rule tables and print their certificates.
    Verify { tables: Vec<PathBuf> },
    /// Exact minimum vertex cover size of a small graph.
    Oracle { graph: PathBuf },
}

#[derive(Args)]
struct GenerateArgs {
    /// Measure, e.g. `n-mode b3=0.2` or `k-mode a=0.178 b1=-0.0445 b2=-0.089`.
    #[arg(long, num_args = 1.., required = true)]
    measure: Vec<String>,
    /// `randomized` (LP) or `deterministic` (ILP), also `rand` / `det`.
    #[arg(long, default_value = "randomized")]
    mode: RuleMode,
    /// Subspaces to generate (repeatable); `generic` builds one table that
    /// serves every instance. Default: P1..P19.
    #[arg(long)]
    subspace: Vec<String>,
    #[arg(long, default_value_t = 3)]
    delta: usize,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    seconds: Option<f64>,
    /// Directory receiving one JSON table per subspace.
    #[arg(long, default_value = "tables")]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file (`p vc n m`, `e u v` lines and `k <budget>`).
    instance: PathBuf,
    /// Rule table files; all must be certified and share one measure.
    #[arg(long, num_args = 1.., required = true)]
    tables: Vec<PathBuf>,
    /// Base seed of the per-trial random streams.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Trials are `ceil(2^mu(I))` times this factor.
    #[arg(long, default_value_t = 20)]
    safety: u64,
    /// Print one line per branching step: subspace, leaf, branch, probability.
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct BoundArgs {
    /// Branch vector as `weight:decrease` pairs, e.g. `1:1,1:3`; a bare
    /// number is a decrease with weight 1.
    #[arg(long, conflicts_with = "combine")]
    vector: Option<String>,
    /// `a=.. b=.. base_n=..`: combine `e^(a k + b n)` with `base_n^n`.
    #[arg(long, num_args = 1..)]
    combine: Vec<String>,
}

/// Errors in arguments or input files, reported with exit code 3.
#[derive(Debug)]
struct InputError(anyhow::Error);

fn input<T>(r: Result<T, impl Into<anyhow::Error>>) -> anyhow::Result<T> {
    r.map_err(|e| anyhow::Error::new(InputError(e.into())))
}

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for InputError {}

fn read(path: &Path) -> anyhow::Result<String> {
    input(fs::read_to_string(path).with_context(|| format!("reading {}", path.display())))
}

fn read_graph(path: &Path) -> anyhow::Result<Graph> {
    input(Graph::parse(&read(path)?).with_context(|| format!("parsing {}", path.display())))
}

fn read_table(path: &Path) -> anyhow::Result<RuleTable> {
    input(RuleTable::from_json(&read(path)?).with_context(|| format!("parsing {}", path.display())))
}

fn generate(args: GenerateArgs) -> anyhow::Result<u8> {
    let measure: Measure = input(args.measure.join(" ").parse())?;
    let report = measure.check_feasibility();
    if !report.pass {
        eprintln!("measure `{measure}` is not feasible:");
        for v in &report.violations {
            eprintln!("  violated: {v}");
        }
        return Ok(EXIT_INPUT);
    }
    let defaults = Limits::default();
    let limits = Limits {
        max_depth: args.depth.unwrap_or(defaults.max_depth),
        max_nodes: args.nodes.unwrap_or(defaults.max_nodes),
        max_seconds: args.seconds.unwrap_or(defaults.max_seconds),
        ..defaults
    };
    let targets: Vec<Option<u8>> = if args.subspace.is_empty() {
        (1..=SUBSPACE_COUNT).map(Some).collect()
    } else {
        let mut v = Vec::new();
        for s in &args.subspace {
            v.push(if s == "generic" {
                None
            } else {
                Some(input(parse_name(s))?)
            });
        }
        v
    };
    input(fs::create_dir_all(&args.out))?;
    let mut failed = 0;
    for target in targets {
        let (root, mut cfg) = match target {
            None => (
                LocalConfiguration::lone(3, args.delta),
                GenConfig::generic(measure, args.mode),
            ),
            Some(id) => (
                input(root_config(id))?,
                GenConfig::for_subspace(measure, args.mode, id),
            ),
        };
        cfg.delta = args.delta;
        cfg.limits = limits;
        let label = target.map_or("generic".into(), name);
        match gensa(&root, &cfg) {
            Ok(generation) => {
                let cert = verify_table(&generation.table);
                let path = args.out.join(format!("{label}.json"));
                fs::write(&path, generation.table.to_json()?)?;
                println!(
                    "{label}: {} nodes, {} rules, largest objective {}, certificate {} -> {}",
                    generation.table.tree.nodes.len(),
                    generation.stats.rules,
                    cert.max_objective()
                        .map_or("-".into(), |o| format!("{o:.6}")),
                    if cert.pass { "PASS" } else { "FAIL" },
                    path.display()
                );
                if !cert.pass {
                    print!("{cert}");
                    failed += 1;
                }
            }
            Err(failure) => {
                println!("{label}: FAILED");
                print!("{failure}");
                failed += 1;
            }
        }
    }
    Ok(if failed == 0 { 0 } else { EXIT_GENERATION })
}

fn solve(args: SolveArgs) -> anyhow::Result<u8> {
    let inst = input(Instance::parse(&read(&args.instance)?))?;
    let tables = args
        .tables
        .iter()
        .map(|p| read_table(p))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let tables = input(TableSet::new(tables))?;
    let (cover, trace) = match tables.mode() {
        RuleMode::Deterministic => {
            let out = solve_deterministic(&inst, &tables)?;
            (out.cover, out.trace)
        }
        RuleMode::Randomized => {
            let mu = input(tables.measure().evaluate(&inst))?;
            let plan = TrialPlan::for_instance(&inst, tables.measure(), args.safety, args.seed)?;
            println!(
                "mu(I) = {:.6}, trials = {}, seed = {}",
                to_f64(mu),
                plan.trials,
                args.seed
            );
            let out = solve_randomized(&inst, &tables, &plan)?;
            info!("ran {} trials", out.trials_run);
            let trace = match (&out.cover, args.trace) {
                (Some(_), true) => {
                    let last = vcsynth::runtime::rsearch(
                        &inst,
                        &tables,
                        &mut plan.rng(out.trials_run - 1),
                    )?;
                    last.trace
                }
                _ => Vec::new(),
            };
            (out.cover, trace)
        }
    };
    if args.trace {
        for step in &trace {
            println!("{step}");
        }
    }
    match cover {
        Some(c) => {
            let vs: Vec<String> = c.iter().map(|v| v.to_string()).collect();
            println!("YES");
            println!("cover ({}): {}", c.len(), vs.join(" "));
            Ok(0)
        }
        None => {
            println!("NO");
            Ok(EXIT_NO)
        }
    }
}

fn parse_vector(s: &str) -> anyhow::Result<BranchVector> {
    let mut entries = Vec::new();
    for part in s.split(',') {
        let (w, d) = part.split_once(':').unwrap_or(("1", part));
        let w: f64 = w
            .trim()
            .parse()
            .with_context(|| format!("bad weight in `{part}`"))?;
        let d: f64 = d
            .trim()
            .parse()
            .with_context(|| format!("bad decrease in `{part}`"))?;
        entries.push((w, d));
    }
    Ok(BranchVector::new(entries)?)
}

fn bound(args: BoundArgs) -> anyhow::Result<u8> {
    if let Some(v) = args.vector {
        let v = input(parse_vector(&v))?;
        println!("{:.5}", branching_number(&v));
        return Ok(0);
    }
    if args.combine.is_empty() {
        return input(Err(anyhow!("give --vector or --combine")));
    }
    let (mut a, mut b, mut base) = (None, None, None);
    for kv in args.combine.iter().flat_map(|s| s.split_whitespace()) {
        let (k, v) = input(
            kv.split_once('=')
                .ok_or_else(|| anyhow!("expected key=value, got `{kv}`")),
        )?;
        let x: f64 = input(
            v.parse::<f64>()
                .with_context(|| format!("bad number `{v}`")),
        )?;
        match k {
            "a" => a = Some(x),
            "b" => b = Some(x),
            "base_n" => base = Some(x),
            _ => return input(Err(anyhow!("unknown key `{k}`"))),
        }
    }
    let (Some(a), Some(b), Some(base)) = (a, b, base) else {
        return input(Err(anyhow!("--combine needs a, b and base_n")));
    };
    if base < 1.0 {
        return input(Err(anyhow!("base_n must be at least 1")));
    }
    let d = input(combine_bound(a, b, base.ln()))?;
    println!("d = {d:.6}");
    println!("e^d = {:.5}", d.exp());
    Ok(0)
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Generate(args) => generate(args),
        Command::Solve(args) => solve(args),
        Command::Bound(args) => bound(args),
        Command::Classify { graph } => {
            let g = read_graph(&graph)?;
            println!("{}", name(input(classify(&g))?));
            Ok(0)
        }
        Command::Verify { tables } => {
            if tables.is_empty() {
                bail!(InputError(anyhow!("no table files given")));
            }
            let mut all = true;
            for path in &tables {
                let cert = verify_table(&read_table(path)?);
                println!("{}", path.display());
                print!("{cert}");
                all &= cert.pass;
            }
            Ok(if all { 0 } else { EXIT_GENERATION })
        }
        Command::Oracle { graph } => {
            let g = read_graph(&graph)?;
            let size = input(vc_oracle(&g).context(
                "the exact oracle handles at most 24 vertices; use `solve` for larger graphs",
            ))?;
            println!("{size}");
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::new()
        .filter_level(log::LevelFilter::Warn)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let bad_input = e.downcast_ref::<InputError>().is_some()
                || matches!(
                    e.downcast_ref::<vcsynth::Error>(),
                    Some(
                        vcsynth::Error::Domain(_)
                            | vcsynth::Error::InvalidInput(_)
                            | vcsynth::Error::Parse { .. }
                            | vcsynth::Error::Capacity { .. }
                            | vcsynth::Error::UnknownVertex(_)
                    )
                );
            if bad_input {
                ExitCode::from(EXIT_INPUT)
            } else {
                ExitCode::from(EXIT_GENERATION)
            }
        }
    }
}
