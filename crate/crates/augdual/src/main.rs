use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use augdual::{checks, config, experiment, instance, CliError};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "augdual",
    version,
    about = "Dual gradient solvers for augmented recovery models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic instance into a directory
    Gen {
        /// Instance spec (JSON)
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run experiments from config files
    Solve {
        /// Experiment config (JSON); repeat for several experiments
        #[arg(long = "config", required = true)]
        configs: Vec<PathBuf>,
        /// Experiments to run concurrently
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// KKT residual of a stored solution
    Check {
        /// Instance directory or its instance.json
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        solution: PathBuf,
        /// Largest acceptable max violation
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Run the seeded property and oracle suites
    Props {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn fail(e: &CliError) -> i32 {
    eprintln!("augdual: {e}");
    e.exit_code()
}

fn run_one(path: &Path) -> (String, i32) {
    let result = config::load_config(path).and_then(|cfg| experiment::run_experiment(&cfg));
    match result {
        Ok(r) => (
            format!(
                "{}: model={} termination={} n_iter={} primal_residual={:e} kkt_max_violation={:e}",
                path.display(),
                r.model,
                r.termination,
                r.n_iter,
                r.primal_residual,
                r.kkt_max_violation
            ),
            r.exit_code(),
        ),
        Err(e) => (format!("{}: {e}", path.display()), e.exit_code()),
    }
}

fn solve_all(configs: &[PathBuf], jobs: usize) -> i32 {
    let results: Vec<Mutex<Option<(String, i32)>>> = configs.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..jobs.clamp(1, configs.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(path) = configs.get(i) else { break };
                *results[i].lock().expect("unpoisoned") = Some(run_one(path));
            });
        }
    });
    let mut code = 0;
    for slot in results {
        let (line, c) = slot.into_inner().expect("unpoisoned").expect("every config ran");
        if c == 0 {
            println!("{line}");
        } else {
            eprintln!("{line}");
            if code == 0 {
                code = c;
            }
        }
    }
    code
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Gen { spec, out } => {
            match config::load_instance_spec(&spec)
                .and_then(|s| instance::generate_instance(&s))
                .and_then(|inst| instance::save_instance(&inst, &out))
            {
                Ok(()) => {
                    println!("{}", out.display());
                    0
                }
                Err(e) => fail(&e),
            }
        }
        Command::Solve { configs, jobs } => solve_all(&configs, jobs),
        Command::Check { problem, solution, tol } => match experiment::check_solution(&problem, &solution) {
            Ok(k) => {
                println!(
                    "{{\"feasibility\": {:e}, \"stationarity\": {:e}, \"max_violation\": {:e}}}",
                    k.feasibility, k.stationarity, k.max_violation
                );
                if k.max_violation <= tol {
                    0
                } else {
                    eprintln!("augdual: max violation {:e} exceeds {tol:e}", k.max_violation);
                    1
                }
            }
            Err(e) => fail(&e),
        },
        Command::Props { seed } => {
            let outcomes = checks::run_all(seed);
            for o in &outcomes {
                println!("{o}");
            }
            if outcomes.iter().all(|o| o.passed) {
                0
            } else {
                1
            }
        }
    };
    ExitCode::from(code as u8)
}
