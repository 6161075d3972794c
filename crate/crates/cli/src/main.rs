use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use magpl_runner::config::{parse_config, ExperimentKind};

/// Numerical experiments for the magnetic p-Laplacian with critical growth.
#[derive(Debug, Parser)]
#[command(name = "magpl", version)]
struct Cli {
    experiment: ExperimentKind,
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides MAGPL_OUT and the config's output_dir).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Size of the worker pool; results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        #[cfg(feature = "parallel")]
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot size the thread pool: {e}");
            return ExitCode::from(EXIT_RUNTIME);
        }
        #[cfg(not(feature = "parallel"))]
        let _ = n;
    }
    let mut config = match parse_config(&cli.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if config.experiment.kind() != cli.experiment {
        eprintln!(
            "error: {} describes a '{}' experiment, not '{}'",
            cli.config.display(),
            config.experiment.kind(),
            cli.experiment
        );
        return ExitCode::from(EXIT_CONFIG);
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    let env_root = std::env::var_os("MAGPL_OUT").map(PathBuf::from);
    let dir = magpl_runner::resolve_output(&config, cli.out.as_deref(), env_root);
    let record = match magpl_runner::run(&config, Some(&cli.config), dir.clone()) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_RUNTIME);
        }
    };
    for c in &record.checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        println!("{tag} {}: {}", c.name, c.detail);
    }
    if record.gauge_reduced {
        println!("note: constant A on a radial grid was gauge-reduced to A = 0");
    }
    println!("wrote {}", dir.display());
    if record.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECK_FAILED)
    }
}
