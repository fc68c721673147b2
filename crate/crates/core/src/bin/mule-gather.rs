use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use mule_gather::geom_graph::{generate_random_udg, read_graph, write_graph, GenParams, UnitDiskGraph};
use mule_gather::oracles::OracleBudget;
use mule_gather::sim::{run_sweep, write_csv, SweepPolicy, SweepSpec};
use mule_gather::tour_cost::{solution_cost, CostBreakdown};
use mule_gather::tree_builder::{build_gathering_tree_with, MuleParams, MulePolicy, MuleSolution};
use mule_gather::verify::{certify, Certificate};
use mule_gather::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_GENERATION: u8 = 2;
const EXIT_VERIFICATION: u8 = 3;

#[derive(Parser)]
#[command(name = "mule-gather", version, about = "Gathering trees with a data MULE on unit disk graphs")]
struct Cli {
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random connected unit disk graph.
    Gen {
        /// Square area in units².
        #[arg(long)]
        area: f64,
        /// Expected nodes per unit².
        #[arg(long)]
        density: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = GenParams::DEFAULT_MAX_REJECTIONS)]
        max_rejections: u32,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Build the gathering tree for a graph file and print it as JSON.
    Solve {
        graph: PathBuf,
        #[command(flatten)]
        mule: MuleArgs,
        /// Evaluate the tree's total tour cost.
        #[arg(long)]
        cost: bool,
        /// Run every check, including the exact oracles on small graphs.
        #[arg(long)]
        verify: bool,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Sweep densities for each area and write a CSV.
    SweepDensity(SweepArgs),
    /// Sweep areas for each density and write a CSV with the estimator column.
    SweepArea(SweepArgs),
    /// Emit a JSON certificate for a graph file; exit 3 if any check fails.
    Verify {
        graph: PathBuf,
        #[command(flatten)]
        mule: MuleArgs,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct MuleArgs {
    /// MULE transmission range, in (0, 0.3).
    #[arg(long, default_value_t = MuleParams::DEFAULT_RANGE)]
    rm: f64,
    /// full-scan, center-node, or a node index.
    #[arg(long, default_value = "full-scan")]
    mule_policy: PolicyArg,
}

#[derive(Args)]
struct SweepArgs {
    /// Square areas in units², comma separated.
    #[arg(long = "area", value_delimiter = ',')]
    areas: Vec<f64>,
    /// Densities in nodes per unit², comma separated.
    #[arg(long = "density", value_delimiter = ',')]
    densities: Vec<f64>,
    /// Base seed mixed into every cell seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Graphs per (area, density) cell.
    #[arg(long, default_value_t = 5)]
    seeds_per_cell: u32,
    #[arg(long, default_value_t = MuleParams::DEFAULT_RANGE)]
    rm: f64,
    /// full-scan or center-node.
    #[arg(long, default_value = "center-node")]
    mule_policy: PolicyArg,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy)]
enum PolicyArg {
    FullScan,
    CenterNode,
    Node(usize),
}

impl FromStr for PolicyArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "full-scan" => Ok(PolicyArg::FullScan),
            "center-node" => Ok(PolicyArg::CenterNode),
            _ => s
                .parse()
                .map(PolicyArg::Node)
                .map_err(|_| format!("expected full-scan, center-node or a node index, got {s:?}")),
        }
    }
}

impl From<PolicyArg> for MulePolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::FullScan => MulePolicy::FullScan,
            PolicyArg::CenterNode => MulePolicy::CenterNode,
            PolicyArg::Node(v) => MulePolicy::Fixed(v),
        }
    }
}

enum Failure {
    Usage(String),
    Generation(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::GenerationFailed { .. } | Error::NoNodes { .. } => Failure::Generation(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load(path: &Path) -> Result<UnitDiskGraph, Failure> {
    let f = File::open(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Ok(read_graph(BufReader::new(f))?)
}

fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<(), Failure> {
    let mut out = output(path)?;
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Failure::Usage(e.to_string()))?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct SolveReport {
    solution: MuleSolution,
    #[serde(skip_serializing_if = "Option::is_none")]
    cost: Option<CostBreakdown>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<Certificate>,
}

fn sweep(mut spec: SweepSpec, args: SweepArgs, jobs: usize) -> Result<(), Failure> {
    if !args.areas.is_empty() {
        spec.areas = args.areas;
    }
    if !args.densities.is_empty() {
        spec.densities = args.densities;
    }
    spec.base_seed = args.seed;
    spec.seeds_per_cell = args.seeds_per_cell;
    spec.r_m = args.rm;
    spec.jobs = jobs;
    spec.policy = match args.mule_policy {
        PolicyArg::FullScan => SweepPolicy::FullScan,
        PolicyArg::CenterNode => SweepPolicy::CenterNode,
        PolicyArg::Node(_) => return Err(Failure::Usage("sweeps accept full-scan or center-node".into())),
    };
    let outcome = run_sweep(&spec)?;
    for f in &outcome.failures {
        eprintln!("cell area={} density={} replicate={} seed={} failed: {}", f.area, f.density, f.replicate, f.seed, f.message);
    }
    let mut out = output(args.out.as_deref())?;
    write_csv(spec.mode, &outcome.records(), &mut out)?;
    out.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    if cli.jobs > 0 {
        // Only fails if a pool already exists, in which case it is kept.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global();
    }
    match cli.command {
        Command::Gen { area, density, seed, max_rejections, out } => {
            let params = GenParams { max_rejections, ..GenParams::from_area(area, density, seed) };
            let g = generate_random_udg(&params)?;
            let mut w = output(out.as_deref())?;
            write_graph(&g, &mut w)?;
            w.flush()?;
        }
        Command::Solve { graph, mule, cost, verify, out } => {
            let g = load(&graph)?;
            let params = MuleParams::new(mule.rm)?;
            let policy = mule.mule_policy.into();
            let solution = build_gathering_tree_with(&g, &params, policy)?;
            let cost = if cost { Some(solution_cost(&g, &solution.tree, solution.mule)?) } else { None };
            let certificate = if verify { Some(certify(&g, &params, policy, &OracleBudget::default())?) } else { None };
            let failed = certificate.as_ref().is_some_and(|c| !c.passed);
            write_json(&SolveReport { solution, cost, certificate }, out.as_deref())?;
            if failed {
                return Err(Failure::Verification("verification failed".into()));
            }
        }
        Command::SweepDensity(args) => sweep(SweepSpec::density_sweep(), args, cli.jobs)?,
        Command::SweepArea(args) => sweep(SweepSpec::area_sweep(), args, cli.jobs)?,
        Command::Verify { graph, mule, out } => {
            let g = load(&graph)?;
            let cert = certify(&g, &MuleParams::new(mule.rm)?, mule.mule_policy.into(), &OracleBudget::default())?;
            write_json(&cert, out.as_deref())?;
            if !cert.passed {
                let failed: Vec<&str> =
                    cert.checks.iter().filter(|c| c.enforced && !c.passed).map(|c| c.name.as_str()).collect();
                return Err(Failure::Verification(format!("failed checks: {}", failed.join(", "))));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Generation(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_GENERATION)
        }
        Err(Failure::Verification(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_VERIFICATION)
        }
    }
}
