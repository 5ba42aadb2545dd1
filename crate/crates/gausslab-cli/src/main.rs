//! `gausslab` — exponential-sum kernels and value-distribution experiments
//! from the command line.

mod config;
mod outputs;

use anyhow::{anyhow, bail, Result};
use clap::{Args, Parser, Subcommand};
use gausslab::expsums;
use gausslab::numtheory::TorusSet;
use gausslab::ExecPolicy;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "gausslab", version, about = "Gauss/theta sum toolkit and experiment harness")]
struct Cli {
    /// RNG seed override for experiments.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (1 = sequential; default: all cores, or GAUSSLAB_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory for experiment files.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a single exponential sum and print it as "re,im".
    Sum {
        #[command(subcommand)]
        which: SumCommand,
    },
    /// Run an experiment described by a key = value config file.
    Experiment { config: PathBuf },
    /// Run an invariant suite and print one line per check.
    Verify { suite: String },
}

#[derive(Subcommand)]
enum SumCommand {
    /// Classical complete Gauss sum, or the incomplete sum when --terms is given.
    Gauss(GaussArgs),
    /// Theta sum S_f(x, N) at real argument.
    Theta(ThetaArgs),
    /// Kloosterman sum K(m, n, q); --twisted for the eps_p (q/p) twist.
    Kloosterman(KloostermanArgs),
    /// Salié sum S(m, n, q) for odd q.
    Salie(KloostermanArgs),
    /// Mean square M_f(q, N) over a torus window.
    Meansquare(MeanSquareArgs),
}

#[derive(Args)]
struct GaussArgs {
    #[arg(long)]
    p: i64,
    #[arg(long)]
    q: u64,
    /// Evaluate by direct summation (default).
    #[arg(long, conflicts_with = "closed")]
    direct: bool,
    /// Evaluate by the closed form.
    #[arg(long)]
    closed: bool,
    /// Number of terms N of the incomplete sum g_f(p, q, N).
    #[arg(long, value_name = "N")]
    terms: Option<u64>,
    /// Cutoff weight: indicator:lo:hi, hermite:nu, or zero.
    #[arg(long, default_value = "indicator:0:1")]
    weight: String,
}

#[derive(Args)]
struct ThetaArgs {
    #[arg(long)]
    x: f64,
    #[arg(long, value_name = "N")]
    terms: u64,
    #[arg(long, default_value = "indicator:0:1")]
    weight: String,
}

#[derive(Args)]
struct KloostermanArgs {
    #[arg(long)]
    m: i64,
    #[arg(long)]
    n: i64,
    #[arg(long)]
    q: u64,
    /// Twist by eps_p (q/p) (kloosterman only; requires q ≡ 0 mod 4).
    #[arg(long, default_value_t = false)]
    twisted: bool,
}

#[derive(Args)]
struct MeanSquareArgs {
    #[arg(long)]
    q: u64,
    #[arg(long, value_name = "N")]
    terms: u64,
    /// Torus window, e.g. "0:1" or "0:1/2,3/4:1".
    #[arg(long, default_value = "0:1")]
    d: String,
    #[arg(long, default_value = "indicator:0:1")]
    weight: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = setup_threads(cli.threads);
    match dispatch(cli, exec) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

/// Pick the execution policy and size the worker pool: --threads beats
/// GAUSSLAB_THREADS beats the default pool.
fn setup_threads(flag: Option<usize>) -> ExecPolicy {
    let from_env = std::env::var("GAUSSLAB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok());
    match flag.or(from_env) {
        Some(0) | None => ExecPolicy::default(),
        Some(1) => ExecPolicy::Sequential,
        Some(n) => {
            #[cfg(feature = "parallel")]
            {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .ok();
            }
            let _ = n;
            ExecPolicy::default()
        }
    }
}

fn format_complex(z: gausslab::Complex) -> String {
    format!("{:.15},{:.15}", z.re, z.im)
}

fn dispatch(cli: Cli, exec: ExecPolicy) -> Result<()> {
    match cli.command {
        Command::Sum { which } => run_sum(which),
        Command::Experiment { config } => {
            // unreadable or malformed configs are usage errors (status 2)
            let parsed = std::fs::read_to_string(&config)
                .map_err(|e| anyhow!("cannot read {}: {e}", config.display()))
                .and_then(|raw| config::parse(&raw));
            let mut parsed = match parsed {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("config error: {e:#}");
                    std::process::exit(2);
                }
            };
            if let Some(seed) = cli.seed {
                parsed.experiment.seed = seed;
            }
            outputs::run(&parsed, &cli.out_dir, exec)
        }
        Command::Verify { suite } => run_verify(&suite, exec),
    }
}

fn run_sum(cmd: SumCommand) -> Result<()> {
    let value = match cmd {
        SumCommand::Gauss(args) => {
            if let Some(n) = args.terms {
                let weight = config::parse_weight(&args.weight)?;
                expsums::incomplete_gauss_sum(&weight, args.p, args.q, n)
                    .map_err(anyhow::Error::from)?
                    .value
            } else if args.closed {
                expsums::classical_gauss_sum_closed(args.p, args.q)
                    .map_err(anyhow::Error::from)?
                    .value
            } else {
                expsums::classical_gauss_sum_direct(args.p, args.q)
                    .map_err(anyhow::Error::from)?
                    .value
            }
        }
        SumCommand::Theta(args) => {
            let weight = config::parse_weight(&args.weight)?;
            expsums::theta_sum(&weight, args.x, args.terms).value
        }
        SumCommand::Kloosterman(args) => {
            if args.twisted {
                expsums::twisted_kloosterman(args.m, args.n, args.q)
                    .map_err(anyhow::Error::from)?
                    .value
            } else {
                expsums::kloosterman(args.m, args.n, args.q).value
            }
        }
        SumCommand::Salie(args) => {
            if args.twisted {
                bail!("--twisted applies to kloosterman only");
            }
            expsums::salie(args.m, args.n, args.q)
                .map_err(anyhow::Error::from)?
                .value
        }
        SumCommand::Meansquare(args) => {
            let weight = config::parse_weight(&args.weight)?;
            let d: TorusSet = args.d.parse().map_err(anyhow::Error::from)?;
            let m = expsums::mean_square(&weight, args.q, args.terms, &d)
                .map_err(anyhow::Error::from)?;
            println!("{m:.15}");
            return Ok(());
        }
    };
    println!("{}", format_complex(value));
    Ok(())
}

fn run_verify(suite: &str, exec: ExecPolicy) -> Result<()> {
    if !gausslab::verify::SUITES.contains(&suite) {
        // unknown suite is a usage error
        eprintln!(
            "unknown suite {suite:?}; expected one of {:?}",
            gausslab::verify::SUITES
        );
        std::process::exit(2);
    }
    let results = gausslab::verify::run_suite(suite, exec).map_err(anyhow::Error::from)?;
    let mut all_ok = true;
    for r in &results {
        println!(
            "{} {} — {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.detail
        );
        all_ok &= r.passed;
    }
    if !all_ok {
        bail!("{} of {} checks failed", results.iter().filter(|r| !r.passed).count(), results.len());
    }
    Ok(())
}
