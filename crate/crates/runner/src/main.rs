use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pxp_runner::config::{parse_grid, parse_lengths, parse_window, Experiment, PartialConfig, Propagator, RunConfig};
use pxp_runner::RunResult;

#[derive(Parser)]
#[command(name = "pxp", version, about = "Ergotropy and entanglement experiments on the PXP chain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Scar/thermal interpolation sweep over the zero-energy shell
    Eigenstudy,
    /// Rotated-state quench trajectories and steady-state summaries
    Quench,
    /// Transfer-matrix closed forms against numerics
    Analytics,
    /// Scar separation report per length
    Separate,
    /// Refit scaling laws from existing eigenstudy tables
    Fit,
}

#[derive(Args)]
struct Flags {
    /// Chain lengths, comma separated
    #[arg(long = "L", global = true)]
    lengths: Option<String>,
    /// Thermal weights: start:stop:step or a comma list
    #[arg(long, global = true)]
    lambda_grid: Option<String>,
    /// Rotation angles: start:stop:step or a comma list; `pi/4` style entries allowed
    #[arg(long, global = true)]
    theta_grid: Option<String>,
    #[arg(long, global = true)]
    dt: Option<f64>,
    #[arg(long, global = true)]
    tmax: Option<f64>,
    /// Steady-state averaging window `t1,t2`
    #[arg(long, global = true)]
    window: Option<String>,
    #[arg(long, global = true)]
    shell_tol: Option<f64>,
    #[arg(long, global = true)]
    max_thermal: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// TOML file with any RunConfig fields; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Allow eigenstudy and separation beyond L = 16
    #[arg(long, global = true)]
    large_l: bool,
    #[arg(long, global = true, value_parser = ["auto", "eigenbasis", "krylov"])]
    propagator: Option<String>,
}

impl Flags {
    fn overrides(&self) -> RunResult<PartialConfig> {
        Ok(PartialConfig {
            experiment: None,
            lengths: self.lengths.as_deref().map(parse_lengths).transpose()?,
            lambda_grid: self.lambda_grid.as_deref().map(parse_grid).transpose()?,
            theta_grid: self.theta_grid.as_deref().map(parse_grid).transpose()?,
            dt: self.dt,
            t_max: self.tmax,
            window: self.window.as_deref().map(parse_window).transpose()?,
            shell_tol: self.shell_tol,
            max_thermal: self.max_thermal,
            seed: self.seed,
            out: self.out.clone(),
            large_l: self.large_l.then_some(true),
            propagator: self.propagator.as_deref().map(|p| match p {
                "eigenbasis" => Propagator::Eigenbasis,
                "krylov" => Propagator::Krylov,
                _ => Propagator::Auto,
            }),
        })
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let experiment = match cli.command {
        Command::Eigenstudy => Experiment::Eigenstudy,
        Command::Quench => Experiment::Quench,
        Command::Analytics => Experiment::Analytics,
        Command::Separate => Experiment::Separate,
        Command::Fit => Experiment::Fit,
    };
    let outcome = cli
        .flags
        .overrides()
        .and_then(|o| RunConfig::resolve(experiment, cli.flags.config.as_deref(), &o))
        .and_then(|cfg| {
            log::info!("running {experiment} into {}", cfg.out.display());
            pxp_runner::run(&cfg)
        });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
