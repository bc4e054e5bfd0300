use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use sft::bench::{bench, parse_grid};
use sft::{run, Algorithm, MultidimMode, RunConfig, SignalSpec};

#[derive(Parser)]
#[command(name = "sft", version, about = "Sparse Fourier transforms over coprime aliasing grids")]
struct Cli {
    /// Worker threads; 0 picks one per core.
    #[arg(long, env = "SFT_THREADS", default_value_t = 0, global = true)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recover one signal and check the error bound. Exits 0 iff it holds.
    Run(RunArgs),
    /// Sweep a grid of cases and print a timing table.
    Bench(BenchArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_enum)]
    algorithm: Algorithm,
    /// Bandwidth of a one-dimensional signal.
    #[arg(long)]
    n: Option<u64>,
    /// Sparsity.
    #[arg(long)]
    k: u64,
    #[arg(long, default_value_t = 2)]
    epsilon_inv: u64,
    /// Modulus constant (default 4; randomized plans use 14).
    #[arg(long)]
    c: Option<u64>,
    #[arg(long, default_value_t = 0.9)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Signal description; `k` random unit tones when absent.
    #[arg(long)]
    signal: Option<PathBuf>,
    /// Dimension of a synthesized multidim signal.
    #[arg(long)]
    dims: Option<usize>,
    /// Per-axis bandwidth `M` of a multidim signal.
    #[arg(long)]
    bandwidth: Option<u64>,
    #[arg(long, value_enum, default_value_t = MultidimMode::Det)]
    mode: MultidimMode,
    /// CSV of recovered coefficients; `-` for stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON report destination; stdout when absent.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    bench_grid: PathBuf,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn check_flag(name: &str, flag: Option<u64>, actual: u64) -> Result<()> {
    match flag {
        Some(v) if v != actual => bail!("--{name} {v} disagrees with the signal file ({actual})"),
        _ => Ok(()),
    }
}

fn load_signal(args: &RunArgs) -> Result<SignalSpec> {
    let multidim = args.algorithm == Algorithm::Multidim;
    if let Some(path) = &args.signal {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let spec = SignalSpec::parse(&text).with_context(|| format!("parsing {}", path.display()))?;
        check_flag("dims", args.dims.map(|d| d as u64), spec.dim as u64)?;
        check_flag(if multidim { "bandwidth" } else { "n" }, if multidim { args.bandwidth } else { args.n }, spec.band)?;
        return Ok(spec);
    }
    let (dim, band) = if multidim {
        let m = args.bandwidth.context("multidim needs --bandwidth or --signal")?;
        (args.dims.unwrap_or(2), m)
    } else {
        (1, args.n.context("--n or --signal is required")?)
    };
    Ok(SignalSpec::random_tones(dim, band, args.k as usize, args.seed)?)
}

fn run_command(args: RunArgs) -> Result<bool> {
    let spec = load_signal(&args)?;
    let config = RunConfig {
        algorithm: args.algorithm,
        k: args.k,
        epsilon_inv: args.epsilon_inv,
        c: args.c,
        sigma: args.sigma,
        seed: args.seed,
        mode: args.mode,
    };
    let outcome = run(&config, &spec)?;
    for w in &outcome.report.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(out) = &args.out {
        outcome.table.write(out).with_context(|| format!("writing {}", out.display()))?;
    }
    let json = serde_json::to_string_pretty(&outcome.report)?;
    match &args.report {
        Some(path) => std::fs::write(path, json + "\n").with_context(|| format!("writing {}", path.display()))?,
        None => println!("{json}"),
    }
    Ok(outcome.report.satisfied)
}

fn bench_command(args: BenchArgs) -> Result<bool> {
    let path = &args.bench_grid;
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let cases = parse_grid(&text).with_context(|| format!("parsing {}", path.display()))?;
    let table = bench(&cases)?;
    match &args.out {
        Some(out) => table.write(out).with_context(|| format!("writing {}", out.display()))?,
        None => print!("{table}"),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("error: configuring {} threads: {e}", cli.threads);
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Run(args) => run_command(args),
        Command::Bench(args) => bench_command(args),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
