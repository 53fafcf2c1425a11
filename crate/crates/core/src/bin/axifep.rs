use std::path::PathBuf;
use std::process::ExitCode;

use axifep::app_cli::{cmd_cavity, cmd_matpoint, cmd_run, cmd_verify, load_config, RunConfig};
use axifep::AxiError;
use clap::{Parser, Subcommand};

/// Axisymmetric finite-strain solver for modified Cam-clay.
#[derive(Parser)]
#[command(name = "axifep", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Stepped solve of a configuration file.
    Run { config: PathBuf },
    /// Cavity-expansion kinematics report.
    Cavity {
        #[arg(long, default_value_t = 1.1)]
        alpha: f64,
    },
    /// Material-point driver over a strain-path file; CSV on stdout.
    Matpoint { path: PathBuf },
    /// Oracle suites: tangent, ul-vs-tl, quadrature, constitutive or all.
    Verify {
        suite: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Configuration for the benchmark-based suites.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn code(e: &AxiError) -> u8 {
    match e {
        AxiError::Config { .. } | AxiError::Invalid(_) | AxiError::Io(_) => 2,
        _ => 3,
    }
}

fn run(cli: Cli) -> Result<u8, AxiError> {
    match cli.cmd {
        Cmd::Run { config } => {
            let cfg = load_config(&config)?;
            let sim = cmd_run(&cfg)?;
            let s = sim.stats();
            println!(
                "{:?}: {} steps, iterations min {} max {} avg {:.3}, outputs in {}",
                sim.formulation,
                sim.steps.len(),
                s.min,
                s.max,
                s.avg,
                cfg.out_dir.display()
            );
        }
        Cmd::Cavity { alpha } => print!("{}", cmd_cavity(alpha)?),
        Cmd::Matpoint { path } => {
            let text = std::fs::read_to_string(&path).map_err(|e| AxiError::Io(format!("{}: {e}", path.display())))?;
            print!("{}", cmd_matpoint(&text)?);
        }
        Cmd::Verify { suite, out, config } => {
            let cfg = match config {
                Some(p) => load_config(&p)?,
                None => RunConfig::default(),
            };
            let rep = cmd_verify(&suite, &cfg, &out)?;
            for s in &rep.suites {
                for c in &s.checks {
                    let op = if c.at_least { ">=" } else { "<=" };
                    let tag = if c.passed { "ok  " } else { "FAIL" };
                    println!("{tag} [{}] {}: {:.3e} {op} {:.1e}", s.suite, c.name, c.value, c.limit);
                }
            }
            if !rep.passed {
                return Ok(4);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("AXIFEP_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(cli) {
        Ok(c) => ExitCode::from(c),
        Err(e) => {
            eprintln!("axifep: {e}");
            ExitCode::from(code(&e))
        }
    }
}
