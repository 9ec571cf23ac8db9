//! Command-line entry point.
//!
//! Exit codes: 0 all checks/targets pass, 1 a bound or claim failed,
//! 2 usage or parse error, 3 enumeration cap exceeded.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rocrs::adversary::Strategy;
use rocrs::fileio;
use rocrs::gen;
use rocrs::harness::{estimate_selectability, mofs_run, HarnessConfig, SchemeId};
use rocrs::verify::{self, Suite, EXIT_FAIL, EXIT_OK, EXIT_USAGE};
use rocrs_core::Instance;

/// Selection schemes and exact verification oracles for contention
/// resolution on graphic matroids.
#[derive(Parser)]
#[command(name = "rocrs", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance file.
    Gen(GenArgs),
    /// Estimate per-edge selection frequencies of a scheme.
    Simulate(SimulateArgs),
    /// Run an exhaustive verification suite.
    Verify(VerifyArgs),
    /// Run the fair-selection driver on a union of random spanning trees.
    Mofs(MofsArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Family: fig5 | fig6 | path | broom | cycle-chords | forest-union | random.
    family: String,
    /// Vertex count (cycle-chords, forest-union, random).
    #[arg(long, default_value_t = 6)]
    n: usize,
    /// Edge count (path, random).
    #[arg(long, default_value_t = 5)]
    m: usize,
    /// Number of forests (forest-union).
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Number of chords (cycle-chords).
    #[arg(long, default_value_t = 1)]
    chords: usize,
    /// Handle length (broom).
    #[arg(long, default_value_t = 1)]
    handle: usize,
    /// Leaf count (broom).
    #[arg(long, default_value_t = 5)]
    leaves: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Instance file to simulate.
    #[arg(long)]
    instance: PathBuf,
    /// Scheme: prior | rocrs | sample-ocrs.
    #[arg(long)]
    scheme: SchemeId,
    #[arg(long, default_value_t = 1_000_000)]
    trials: u64,
    #[arg(long)]
    seed: Option<u64>,
    /// Adversary strategy (sample-ocrs only): identity | reverse |
    /// heavy-bucket-first | light-bucket-first | random-fixed | labeling-attack.
    #[arg(long)]
    adversary: Option<Strategy>,
    /// Worker threads; 0 uses all cores. Output is identical either way.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// CSV output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite: appendix | coupling | expectation | prefix | load-bounds | all.
    suite: Suite,
    /// Instance file; the built-in counterexample pair when absent.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Accepted for interface symmetry; the enumeration suites are
    /// single-threaded at desk scale, so the output never depends on it.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Args)]
struct MofsArgs {
    /// Number of spanning trees in the union.
    #[arg(long)]
    k: usize,
    /// Vertex count.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1_000_000)]
    trials: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// CSV output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Seed resolution: flag, then the CRS_SEED environment variable, then 0.
fn resolve_seed(flag: Option<u64>) -> Result<u64, String> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("CRS_SEED") {
        Ok(raw) => raw
            .parse()
            .map_err(|_| format!("CRS_SEED is not an unsigned integer: '{}'", raw)),
        Err(_) => Ok(0),
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {}", path.display(), e)),
        None => {
            print!("{}", text);
            std::io::stdout().flush().map_err(|e| e.to_string())
        }
    }
}

fn cmd_gen(args: &GenArgs) -> Result<i32, String> {
    let seed = resolve_seed(args.seed)?;
    let inst: Instance = match args.family.as_str() {
        "fig5" => gen::fig5(),
        "fig6" => gen::fig6(),
        "path" => gen::path(args.m, seed).map_err(|e| e.to_string())?,
        "broom" => gen::broom(args.handle, args.leaves).map_err(|e| e.to_string())?,
        "cycle-chords" => {
            gen::cycle_chords(args.n, args.chords, seed).map_err(|e| e.to_string())?
        }
        "forest-union" => {
            gen::forest_union(args.k, args.n, seed)
                .map_err(|e| e.to_string())?
                .0
        }
        "random" => gen::random_multigraph(args.n, args.m, seed).map_err(|e| e.to_string())?,
        other => return Err(format!("unknown family '{}'", other)),
    };
    emit(args.out.as_ref(), &fileio::format_instance(&inst))?;
    Ok(EXIT_OK)
}

fn cmd_simulate(args: &SimulateArgs) -> Result<i32, String> {
    let seed = resolve_seed(args.seed)?;
    let inst = fileio::read_instance(&args.instance)
        .map_err(|e| format!("{}: {}", args.instance.display(), e))?;
    let adversary = match (args.scheme, args.adversary) {
        (SchemeId::SampleOcrs, None) => Some(Strategy::Identity),
        (SchemeId::SampleOcrs, chosen) => chosen,
        (_, Some(_)) => {
            return Err("--adversary only applies to --scheme sample-ocrs".to_string())
        }
        (_, None) => None,
    };
    let cfg = HarnessConfig {
        workers: args.workers,
        ..HarnessConfig::default()
    };
    let report = estimate_selectability(args.scheme, &inst, args.trials, seed, adversary, &cfg)
        .map_err(|e| e.to_string())?;
    emit(args.out.as_ref(), &report.to_csv())?;
    eprintln!(
        "{}: {} trials in {} ms, all_pass={}",
        report.scheme,
        report.trials,
        report.wall_ms,
        report.all_pass()
    );
    Ok(if report.all_pass() { EXIT_OK } else { EXIT_FAIL })
}

fn cmd_verify(args: &VerifyArgs) -> Result<i32, String> {
    let instances = match &args.instance {
        Some(path) => {
            let inst = fileio::read_instance(path)
                .map_err(|e| format!("{}: {}", path.display(), e))?;
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "instance".to_string());
            vec![(name, inst)]
        }
        None => verify::default_instances(),
    };
    let mut stdout = std::io::stdout();
    let outcome = verify::run_suite(args.suite, &instances, &mut stdout)
        .map_err(|e| e.to_string())?;
    outcome
}

fn cmd_mofs(args: &MofsArgs) -> Result<i32, String> {
    let seed = resolve_seed(args.seed)?;
    let (inst, forests) =
        gen::forest_union(args.k, args.n, seed).map_err(|e| e.to_string())?;
    let skeleton: Vec<(usize, usize)> = inst.edges().iter().map(|e| (e.u, e.v)).collect();
    let cfg = HarnessConfig {
        workers: args.workers,
        ..HarnessConfig::default()
    };
    let report = mofs_run(args.n, &skeleton, &forests, args.trials, seed, &cfg)
        .map_err(|e| e.to_string())?;
    emit(args.out.as_ref(), &report.to_csv())?;
    eprintln!(
        "{}: {} trials in {} ms, all_pass={}",
        report.scheme,
        report.trials,
        report.wall_ms,
        report.all_pass()
    );
    Ok(if report.all_pass() { EXIT_OK } else { EXIT_FAIL })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Mofs(args) => cmd_mofs(args),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(message) => {
            eprintln!("error: {}", message);
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
