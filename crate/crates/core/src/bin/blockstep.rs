use std::path::PathBuf;
use std::process::ExitCode;

use blockstep::harness::{run_experiment, summary_line, sweep, ExperimentConfig};
use blockstep::perf::{run_bop_microbenchmark, BenchConfig};
use blockstep::Error;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "blockstep", version, about = "Block time stepping experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        s: Option<usize>,
        #[arg(long)]
        nx: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        vtk: bool,
        /// Extra `key=value` overrides.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Run one experiment per window size.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        s: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Time the sparse block product.
    BenchBop {
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16")]
        k: Vec<usize>,
        #[arg(long, default_value_t = 1 << 20)]
        n: usize,
        #[arg(long, default_value_t = 7)]
        z: usize,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// CSV file; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NonConvergence { .. } | Error::LinearSolver { .. } => 2,
        Error::Config(_) | Error::Parse { .. } | Error::InvalidInput(_) | Error::Unsupported(_) => 3,
        _ => 1,
    }
}

fn load(config: &PathBuf, out: Option<PathBuf>, set: &[String]) -> Result<ExperimentConfig, Error> {
    let mut cfg = ExperimentConfig::from_file(config)?;
    if let Some(o) = out {
        cfg.out = o;
    }
    for kv in set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override '{kv}' is not key=value")))?;
        cfg.set(k.trim(), v.trim())?;
    }
    Ok(cfg)
}

fn check_threads() -> Result<(), Error> {
    match std::env::var("BLOCKSTEP_THREADS") {
        Ok(v) if v.trim() != "1" => Err(Error::Config(format!("BLOCKSTEP_THREADS must be 1, got '{v}'"))),
        _ => Ok(()),
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    check_threads()?;
    match cli.command {
        Command::Run {
            config,
            s,
            nx,
            out,
            vtk,
            set,
        } => {
            let mut cfg = load(&config, out, &set)?;
            if let Some(s) = s {
                cfg.s = s;
            }
            if let Some(nx) = nx {
                cfg.nx = nx;
            }
            cfg.vtk |= vtk;
            cfg.validate()?;
            let o = run_experiment(&cfg)?;
            println!("{}", blockstep::harness::SUMMARY_HEADER);
            println!("{}", summary_line(cfg.s, &o.stats));
            eprintln!("wall time {:.3} s, results in {}", o.wall_time, cfg.out.display());
            Ok(())
        }
        Command::Sweep { config, s, out, set } => {
            let cfg = load(&config, out, &set)?;
            let rows = sweep(&cfg, &s)?;
            println!("{}", blockstep::harness::SUMMARY_HEADER);
            let mut first_err = None;
            for (s, r) in rows {
                match r {
                    Ok(o) => println!("{}", summary_line(s, &o.stats)),
                    Err(e) => {
                        eprintln!("s={s}: {e}");
                        first_err.get_or_insert(e);
                    }
                }
            }
            first_err.map_or(Ok(()), Err)
        }
        Command::BenchBop {
            k,
            n,
            z,
            reps,
            seed,
            out,
        } => {
            let cfg = BenchConfig {
                n_rows: n,
                nnz_per_row: z,
                k_values: k,
                repetitions: reps,
                seed,
                ..Default::default()
            };
            let report = run_bop_microbenchmark(&cfg)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            match out {
                Some(p) => report.write_csv(&p)?,
                None => print!("{}", report.to_csv()),
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
