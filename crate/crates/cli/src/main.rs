use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use jones_core::bracket::{Engine, DEFAULT_MAX_CROSSINGS};
use jones_core::geometry::Direction;
use jones_core::par::Parallelism;
use jones_core::reidemeister::{parse_sequence, DEFAULT_SEQUENCE};
use jones_core::run::{run_bench, run_compute, BenchConfig, InputFormat, RunConfig, Variable};

/// Jones polynomials of open and closed polygonal curves.
#[derive(Parser)]
#[command(name = "jones", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the (expected) Jones polynomial of one curve.
    Compute(ComputeArgs),
    /// Time engines on one or more structures.
    Bench(BenchArgs),
}

#[derive(Args)]
struct Common {
    /// Largest crossing count a state sum may enumerate.
    #[arg(long, default_value_t = DEFAULT_MAX_CROSSINGS)]
    max_crossings: usize,
    /// Run on the calling thread only.
    #[arg(long)]
    sequential: bool,
    /// Reidemeister moves used by the split-rm engine, e.g. RM1,RM2,RM3.
    #[arg(long)]
    rm_sequence: Option<String>,
}

impl Common {
    fn parallelism(&self) -> Parallelism {
        if self.sequential {
            Parallelism::Sequential
        } else {
            Parallelism::Parallel
        }
    }

    fn moves(&self) -> Result<Vec<jones_core::Move>> {
        match &self.rm_sequence {
            Some(s) => parse_sequence(s).map_err(anyhow::Error::msg),
            None => Ok(DEFAULT_SEQUENCE.to_vec()),
        }
    }
}

#[derive(Args)]
struct ComputeArgs {
    #[arg(long)]
    input: PathBuf,
    /// Input format: xyz or pdb.
    #[arg(long)]
    format: InputFormat,
    /// PDB chain identifier (default: first chain in the file).
    #[arg(long)]
    chain: Option<char>,
    /// Use only the first K points (CA atoms for PDB input).
    #[arg(long = "atoms")]
    atoms: Option<usize>,
    /// Treat the curve as closed.
    #[arg(long)]
    closed: bool,
    /// Number of projection directions.
    #[arg(long, default_value_t = 1)]
    projections: usize,
    #[arg(long, default_value = "split")]
    engine: Engine,
    /// Explicit projection direction X,Y,Z.
    #[arg(long, conflicts_with = "seed", allow_hyphen_values = true)]
    direction: Option<String>,
    /// Seed for random projection directions.
    #[arg(long)]
    seed: Option<u64>,
    /// Output variable: A or t.
    #[arg(long, default_value = "t")]
    var: Variable,
    /// Emit JSON.
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated input files.
    #[arg(long, value_delimiter = ',', required = true)]
    input: Vec<PathBuf>,
    /// Comma-separated prefix lengths.
    #[arg(long, value_delimiter = ',')]
    atoms: Vec<usize>,
    /// Comma-separated engines.
    #[arg(long, value_delimiter = ',', default_value = "oracle,split,split-rm")]
    engines: Vec<Engine>,
    #[arg(long, default_value_t = 5)]
    reps: usize,
    /// Also write the results as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    chain: Option<char>,
    #[arg(long)]
    closed: bool,
    #[command(flatten)]
    common: Common,
}

fn parse_direction(s: &str) -> Result<Direction> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .with_context(|| format!("bad direction `{s}`"))?;
    let [x, y, z] = parts[..] else {
        bail!("direction needs three components, got `{s}`");
    };
    Ok(Direction::new([x, y, z])?)
}

fn compute(args: ComputeArgs) -> Result<()> {
    let mut cfg = RunConfig::new(args.input, args.format);
    cfg.chain = args.chain;
    cfg.atom_limit = args.atoms;
    cfg.closed = args.closed;
    cfg.projections = args.projections;
    cfg.engine = args.engine;
    cfg.direction = args.direction.as_deref().map(parse_direction).transpose()?;
    cfg.seed = args.seed;
    cfg.variable = args.var;
    cfg.json = args.json;
    cfg.rm_sequence = args.common.moves()?;
    cfg.max_crossings = args.common.max_crossings;
    cfg.parallelism = args.common.parallelism();
    let report = run_compute(&cfg)?;
    print!("{}", report.render(cfg.json));
    Ok(())
}

fn bench(args: BenchArgs) -> Result<()> {
    let mut cfg = BenchConfig::new(args.input, args.engines);
    cfg.atoms = args.atoms;
    cfg.reps = args.reps;
    cfg.csv = args.csv;
    cfg.chain = args.chain;
    cfg.closed = args.closed;
    cfg.max_crossings = args.common.max_crossings;
    cfg.parallelism = args.common.parallelism();
    cfg.rm_sequence = args.common.moves()?;
    let report = run_bench(&cfg)?;
    print!("{}", report.to_table());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compute(a) => compute(a),
        Command::Bench(a) => bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
