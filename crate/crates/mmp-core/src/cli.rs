//! Command-line surface: analyze, generate, strip, fill, critical, vecfind,
//! export, fixtures.

use crate::analysis::{analyze, render_text, AnalysisOptions};
use crate::assign::{find_criticals_budgeted, is_critical_budgeted, DEFAULT_NODE_BUDGET};
use crate::catalog;
use crate::coord::{fill, generate_master, vecfind, ComponentSet, Coordinatization, VecfindOutcome};
use crate::error::{Error, Result};
use crate::lang::{
    decompose_components, export_dot, export_incidence_csv, parse_mmp_file, serialize_mmp,
    validate, Hypergraph,
};
use crate::structure::strip_unishared;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::io::Read;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "mmp", version, about = "MMP hypergraph analysis and generation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse inputs and report structure, verdicts, indices, inequalities.
    Analyze(AnalyzeArgs),
    /// Generate the master hypergraph of a component pool.
    Generate(GenerateArgs),
    /// Remove vertices that lie in a single hyperedge.
    Strip(StripArgs),
    /// Extend hyperedges to full bases using a coordinatization.
    Fill(FillArgs),
    /// Criticality test, optionally searching for critical subsets.
    Critical(CriticalArgs),
    /// Search for a coordinatization over a component pool.
    Vecfind(VecfindArgs),
    /// Export to other formats.
    Export(ExportArgs),
    /// List or dump the embedded fixture catalog.
    Fixtures(FixturesArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Input files, `-` for stdin, or `fixture:NAME`.
    inputs: Vec<String>,
    /// Exact branch-and-bound indices (default).
    #[arg(long, conflicts_with = "heuristic")]
    exact: bool,
    /// Randomized sampling instead of the exact solver.
    #[arg(long)]
    heuristic: bool,
    #[arg(long, default_value_t = 50_000)]
    runs: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Override the declared hypergraph dimension.
    #[arg(long)]
    n: Option<usize>,
    /// Emit one JSON record per input instead of text.
    #[arg(long)]
    json: bool,
    /// Skip the per-hyperedge criticality test.
    #[arg(long)]
    no_critical: bool,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    dim: usize,
    /// Comma-separated scalar pool, e.g. `0,1,-1` or `0,1,w,w2`.
    #[arg(long)]
    components: String,
    /// Write the MMP string here (a `.coords.json` sidecar goes next to it).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StripArgs {
    input: String,
    /// Re-strip until no multiplicity-1 vertex remains.
    #[arg(long)]
    fixpoint: bool,
}

#[derive(Args)]
struct FillArgs {
    input: String,
    /// Coordinatization JSON (vertex label -> [[re, im], ...]); defaults to
    /// the fixture's own vectors when the input is `fixture:NAME`.
    #[arg(long)]
    coords: Option<PathBuf>,
    /// Write the filled MMP string here (plus `.coords.json` sidecar).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CriticalArgs {
    input: String,
    /// Randomized search for critical subsets instead of the yes/no test.
    #[arg(long)]
    find: bool,
    #[arg(long, default_value_t = 32)]
    restarts: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct VecfindArgs {
    input: String,
    #[arg(long)]
    components: String,
    #[arg(long, default_value_t = 50_000_000)]
    budget: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the found coordinatization here as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ExportFormat {
    Mmp,
    Json,
    Dot,
    Incidence,
}

#[derive(Args)]
struct ExportArgs {
    input: String,
    #[arg(long, value_enum, default_value_t = ExportFormat::Mmp)]
    format: ExportFormat,
    /// Validate strictly and fail on violations.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct FixturesArgs {
    /// Dump one fixture's MMP string (and vectors, with --coords).
    name: Option<String>,
    /// Also print the coordinatization JSON.
    #[arg(long)]
    coords: bool,
    /// Write every fixture into this directory as NAME.mmp files.
    #[arg(long)]
    export_dir: Option<PathBuf>,
}

fn node_budget() -> u64 {
    std::env::var("MMP_BUDGET_NODES")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_NODE_BUDGET)
}

fn read_inputs(spec: &str, n_override: Option<usize>) -> Result<Vec<(String, Hypergraph)>> {
    if let Some(name) = spec.strip_prefix("fixture:") {
        let f = catalog::get(name)?;
        let mut h = f.hypergraph()?;
        if let Some(n) = n_override {
            h = h.with_n(n);
        }
        return Ok(vec![(f.name.clone(), h)]);
    }
    let text = if spec == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        buf
    } else {
        std::fs::read_to_string(spec)?
    };
    let parsed = parse_mmp_file(&text)?;
    Ok(parsed
        .into_iter()
        .enumerate()
        .map(|(i, h)| {
            let name = if spec == "-" {
                format!("stdin[{i}]")
            } else {
                format!("{spec}[{i}]")
            };
            let h = match n_override {
                Some(n) => h.with_n(n),
                None => h,
            };
            (name, h)
        })
        .collect())
}

fn read_single(spec: &str) -> Result<(String, Hypergraph)> {
    let mut list = read_inputs(spec, None)?;
    if list.len() != 1 {
        return Err(Error::Invalid(format!(
            "expected exactly one hypergraph in `{spec}`, found {}",
            list.len()
        )));
    }
    Ok(list.remove(0))
}

fn load_coords(args_coords: &Option<PathBuf>, spec: &str, h: &Hypergraph) -> Result<Coordinatization> {
    if let Some(path) = args_coords {
        let value: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        return Coordinatization::from_json(h, &value);
    }
    if let Some(name) = spec.strip_prefix("fixture:") {
        if let Some(c) = catalog::get(name)?.coordinatization()? {
            return Ok(c);
        }
    }
    Err(Error::Coord(
        "no coordinatization: pass --coords FILE.json".into(),
    ))
}

fn write_hypergraph(
    h: &Hypergraph,
    coords: Option<&Coordinatization>,
    out: &Option<PathBuf>,
) -> Result<()> {
    let text = serialize_mmp(h);
    match out {
        Some(path) => {
            std::fs::write(path, format!("{text}\n"))?;
            if let Some(c) = coords {
                let sidecar = path.with_extension("coords.json");
                std::fs::write(&sidecar, serde_json::to_string_pretty(&c.to_json(h))?)?;
            }
        }
        None => {
            println!("{text}");
        }
    }
    Ok(())
}

/// Entry point used by the `mmp` binary. Exit codes: 0 success, 1 budget
/// exhausted (indeterminate), 2 input or usage error.
pub fn cli_main() -> Result<()> {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => Ok(()),
        Err(Error::BudgetExceeded(n)) => {
            eprintln!("error: {}", Error::BudgetExceeded(n));
            std::process::exit(1);
        }
        Err(e) => Err(e),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Analyze(args) => {
            let mut opts = AnalysisOptions {
                exact: !args.heuristic,
                runs: args.runs,
                seed: args.seed,
                criticality: !args.no_critical,
                node_budget: node_budget(),
                ..AnalysisOptions::default()
            };
            if args.heuristic {
                opts.exact = false;
            }
            let inputs = if args.inputs.is_empty() {
                vec!["-".to_string()]
            } else {
                args.inputs.clone()
            };
            for spec in &inputs {
                for (name, h) in read_inputs(spec, args.n)? {
                    let rec = analyze(&h, &opts)?;
                    if args.json {
                        println!("{}", serde_json::to_string(&rec)?);
                    } else {
                        print!("{}", render_text(&name, &rec));
                    }
                }
            }
            Ok(())
        }
        Command::Generate(args) => {
            let cs = ComponentSet::parse(&args.components)?;
            let (h, c) = generate_master(&cs, args.dim)?;
            println!("master: {}", h.kl());
            let comps = decompose_components(&h);
            if comps.len() > 1 {
                println!(
                    "components: {}",
                    comps
                        .iter()
                        .map(|c| c.kl())
                        .collect::<Vec<_>>()
                        .join(" + ")
                );
            }
            if args.out.is_some() {
                write_hypergraph(&h, Some(&c), &args.out)?;
            } else {
                println!("{}", serialize_mmp(&h));
            }
            Ok(())
        }
        Command::Strip(args) => {
            let (_, h) = read_single(&args.input)?;
            let stripped = strip_unishared(&h, args.fixpoint)?;
            println!("{}", serialize_mmp(&stripped));
            eprintln!("{} -> {}", h.kl(), stripped.kl());
            Ok(())
        }
        Command::Fill(args) => {
            let (_, h) = read_single(&args.input)?;
            let coords = load_coords(&args.coords, &args.input, &h)?;
            let (filled, fc) = fill(&h, &coords)?;
            write_hypergraph(&filled, Some(&fc), &args.out)?;
            eprintln!("{} -> {}", h.kl(), filled.kl());
            Ok(())
        }
        Command::Critical(args) => {
            let (_, h) = read_single(&args.input)?;
            let budget = node_budget();
            if args.find {
                let found = find_criticals_budgeted(&h, args.seed, args.restarts, budget)?;
                eprintln!("{} critical subset(s)", found.len());
                for c in found {
                    println!("{}  {}", c.kl(), serialize_mmp(&c));
                }
            } else {
                let crit = is_critical_budgeted(&h, budget)?;
                println!("critical: {}", if crit { "yes" } else { "no" });
            }
            Ok(())
        }
        Command::Vecfind(args) => {
            let (_, h) = read_single(&args.input)?;
            let cs = ComponentSet::parse(&args.components)?;
            match vecfind(&h, &cs, args.budget, args.seed)? {
                VecfindOutcome::Found(c) => {
                    println!("found");
                    let json = serde_json::to_string_pretty(&c.to_json(&h))?;
                    match &args.out {
                        Some(path) => std::fs::write(path, json)?,
                        None => println!("{json}"),
                    }
                    Ok(())
                }
                VecfindOutcome::ProvedNone => {
                    println!("none (search complete: no coordinatization over this pool)");
                    Ok(())
                }
                VecfindOutcome::Unknown => {
                    println!("none (budget exhausted; existence undecided)");
                    std::process::exit(1);
                }
            }
        }
        Command::Export(args) => {
            let (_, h) = read_single(&args.input)?;
            if args.strict {
                let report = validate(&h, true);
                if !report.ok() {
                    for v in &report.violations {
                        eprintln!("violation [{}] at {:?}: {}", v.rule, v.locus, v.message);
                    }
                    return Err(Error::Invalid("strict validation failed".into()));
                }
            }
            match args.format {
                ExportFormat::Mmp => println!("{}", serialize_mmp(&h)),
                ExportFormat::Json => println!("{}", serde_json::to_string_pretty(&h)?),
                ExportFormat::Dot => print!("{}", export_dot(&h)),
                ExportFormat::Incidence => print!("{}", export_incidence_csv(&h)),
            }
            Ok(())
        }
        Command::Fixtures(args) => {
            if let Some(dir) = &args.export_dir {
                std::fs::create_dir_all(dir)?;
                for f in catalog::all() {
                    std::fs::write(dir.join(format!("{}.mmp", f.name)), format!("{}\n", f.mmp))?;
                    if let Some(c) = f.coordinatization()? {
                        let h = f.hypergraph()?;
                        std::fs::write(
                            dir.join(format!("{}.coords.json", f.name)),
                            serde_json::to_string_pretty(&c.to_json(&h))?,
                        )?;
                    }
                }
                eprintln!("wrote {} fixtures to {}", catalog::all().len(), dir.display());
                return Ok(());
            }
            match &args.name {
                None => {
                    for f in catalog::all() {
                        println!(
                            "{:<14} dim={} {}  [{}]",
                            f.name,
                            f.dim,
                            if f.vectors.is_some() { "coordinatized" } else { "bare" },
                            f.source
                        );
                    }
                }
                Some(name) => {
                    let f = catalog::get(name)?;
                    println!("{}", f.mmp);
                    if args.coords {
                        if let Some(c) = f.coordinatization()? {
                            let h = f.hypergraph()?;
                            println!("{}", serde_json::to_string_pretty(&c.to_json(&h))?);
                        }
                    }
                }
            }
            Ok(())
        }
    }
}
