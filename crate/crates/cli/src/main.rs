use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qpfeas_cli::bench::cmd_bench;
use qpfeas_cli::{cmd_check, cmd_maxfs, cmd_scenario, CommandOutput, Strategy, EXIT_INPUT};
use qpfeas_core::GridSpec;

#[derive(Parser)]
#[command(
    name = "qpfeas",
    version,
    about = "QP feasibility checks, constraint selection and timing grids"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide feasibility of a problem file (exit 0 feasible, 3 infeasible).
    Check {
        file: PathBuf,
        /// One `+`/`-` per constraint; `-` disregards a soft constraint.
        #[arg(long, allow_hyphen_values = true)]
        config: Option<String>,
        /// Use the elastic Phase-1 LP instead of the dual LP.
        #[arg(long)]
        baseline: bool,
        /// Also solve the QP with the enumeration oracle.
        #[arg(long)]
        solve: bool,
    },
    /// Pick a feasible configuration of maximal level (exit 4 if none exists).
    Maxfs {
        file: PathBuf,
        #[arg(long, value_enum)]
        strategy: Strategy,
    },
    /// Time both feasibility tests over a grid of random instances.
    Bench {
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        m: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        c: Option<Vec<usize>>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run both searches over the time-varying scenario.
    Scenario {
        #[arg(long, default_value_t = 0.1)]
        dt: f64,
        #[arg(long, default_value_t = 10.0)]
        horizon: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> anyhow::Result<CommandOutput> {
    match cli.command {
        Command::Check {
            file,
            config,
            baseline,
            solve,
        } => cmd_check(&file, config.as_deref(), baseline, solve),
        Command::Maxfs { file, strategy } => cmd_maxfs(&file, strategy),
        Command::Bench {
            m,
            c,
            trials,
            seed,
            out,
        } => {
            let mut spec = GridSpec::default();
            if let Some(m) = m {
                spec.m_values = m;
            }
            if let Some(c) = c {
                spec.c_values = c;
            }
            if let Some(t) = trials {
                spec.trials = t;
            }
            if let Some(s) = seed {
                spec.seed = s;
            }
            if spec.m_values.contains(&0) || spec.c_values.contains(&0) {
                anyhow::bail!("--m and --c values must be positive");
            }
            cmd_bench(&spec, &out)
        }
        Command::Scenario { dt, horizon, out } => cmd_scenario(dt, horizon, &out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            println!("{}", out.document);
            ExitCode::from(out.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT as u8)
        }
    }
}
