use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use thermal_sampling::experiment::{run_experiment, Preset, RunConfig, THREADS_ENV};

/// Largest size run without `--full-scale`.
const DESK_MAX_SITES: usize = 14;

#[derive(Parser)]
#[command(name = "thermal-sampling", version, about = "Finite-temperature expectation values from sampled pure states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a config file or a named preset.
    Run(RunArgs),
    /// Check a config file without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the resolved configs of a preset as TOML.
    Preset { name: Preset },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<Preset>,
    /// System sizes, comma separated.
    #[arg(long = "L", value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides `output_path`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; overrides the config and the environment.
    #[arg(long, help = format!("Worker threads [overrides config and {THREADS_ENV}]"))]
    threads: Option<usize>,
    /// Allow sizes above 14 and use the large preset sizes. Runs take hours.
    #[arg(long)]
    full_scale: bool,
}

impl RunArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(l) = &self.sizes {
            cfg.l_list = l.clone();
        }
        if let Some(m) = self.samples {
            cfg.samples = m;
        }
        if let Some(s) = self.seed {
            cfg.master_seed = s;
        }
        if let Some(t) = self.threads {
            cfg.threads = Some(t);
        }
    }
}

fn check_scale(cfg: &RunConfig, full_scale: bool) -> anyhow::Result<()> {
    let max = cfg.max_sites();
    if max > DESK_MAX_SITES {
        if !full_scale {
            bail!("L = {max} exceeds {DESK_MAX_SITES}; pass --full-scale to run it");
        }
        warn!("full-scale run up to L = {max}: expect hours of runtime and 2^{max} amplitudes per worker");
    }
    Ok(())
}

fn execute(label: &str, cfg: &RunConfig, dir: &Path, full_scale: bool) -> anyhow::Result<()> {
    cfg.validate().with_context(|| format!("invalid config for {label}"))?;
    check_scale(cfg, full_scale)?;
    info!("{label}: L = {:?}, M = {}, seed {}", cfg.l_list, cfg.samples, cfg.master_seed);
    let out = run_experiment(cfg).with_context(|| format!("run {label} failed"))?;
    out.emit(dir)?;
    println!("{label}: wrote {}", dir.display());
    Ok(())
}

fn run(args: RunArgs) -> anyhow::Result<()> {
    if let Some(path) = &args.config {
        let mut cfg = RunConfig::load(path)?;
        args.apply(&mut cfg);
        if let Some(out) = &args.out {
            cfg.output_path = out.clone();
        }
        let dir = cfg.output_path.clone();
        return execute(&path.display().to_string(), &cfg, &dir, args.full_scale);
    }
    let preset = args.preset.expect("clap enforces --config or --preset");
    for (label, mut cfg) in preset.series() {
        if args.full_scale {
            cfg.l_list = preset.full_scale_sizes();
        }
        args.apply(&mut cfg);
        if let Some(out) = &args.out {
            cfg.output_path = out.join(&label);
        }
        let dir = cfg.output_path.clone();
        execute(&format!("{preset}/{label}"), &cfg, &dir, args.full_scale)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let result = match Cli::parse().command {
        Command::Run(args) => run(args),
        Command::Validate { config } => RunConfig::load(&config)
            .map(|_| println!("{}: ok", config.display()))
            .map_err(Into::into),
        Command::Preset { name } => {
            let mut stdout = std::io::stdout().lock();
            name.series().iter().try_for_each(|(label, cfg)| {
                writeln!(stdout, "# {name}/{label}\n{}", cfg.to_toml_string())
            })
            .map_err(Into::into)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
