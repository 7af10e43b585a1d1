//! `scatterbench`: build filter banks, generate signals, run the scattering
//! transform and the verification suites from the command line.

mod config;
mod output;
mod trials;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use scatterbench::framekit::{export_bank, measure_support_radius, validate_bessel, validate_parseval};
use scatterbench::scatter::{l2l2_norm, scatter, write_dump};
use scatterbench::sigkit::generate::{band_limited_noise, gabor};
use scatterbench::sigkit::io::{load_signal, read_csv, save_signal, write_csv};
use scatterbench::sigkit::{Signal, MAX_DIMS};

use config::{RunConfig, SignalKind, DEFAULTS_HELP};
use trials::Check;

#[derive(Parser)]
#[command(name = "scatterbench", version, about = "Scattering transforms with numeric stability certificates")]
#[command(after_help = DEFAULTS_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug, Default)]
struct Common {
    /// Flat JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file or directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replace existing outputs.
    #[arg(long)]
    force: bool,
    /// Overrides max_depth.
    #[arg(long)]
    depth: Option<usize>,
    /// Overrides prune_threshold.
    #[arg(long)]
    prune: Option<f64>,
    /// Overrides the trial count.
    #[arg(long)]
    trials: Option<usize>,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::load(self.config.as_deref())?;
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(d) = self.depth {
            cfg.max_depth = d;
        }
        if let Some(p) = self.prune {
            cfg.prune_threshold = Some(p);
        }
        if let Some(t) = self.trials {
            cfg.trials = Some(t);
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build a filter bank, validate it and write its manifest.
    #[command(after_help = DEFAULTS_HELP)]
    BuildBank {
        #[command(flatten)]
        common: Common,
    },
    /// Write a seeded test signal (.sctb container, or .csv for 1-d).
    #[command(after_help = DEFAULTS_HELP)]
    GenSignal {
        #[command(flatten)]
        common: Common,
    },
    /// Run the scattering transform on a signal file and dump coefficients.
    #[command(after_help = DEFAULTS_HELP)]
    Scatter {
        #[command(flatten)]
        common: Common,
        /// Input signal (.sctb or .csv).
        #[arg(long)]
        signal: PathBuf,
        /// Write the index with norms only, no coefficient payloads.
        #[arg(long)]
        norms_only: bool,
    },
    /// Run a verification suite; writes per-trial JSON, summary.csv and report.json.
    #[command(after_help = DEFAULTS_HELP)]
    Verify {
        #[arg(value_enum)]
        check: Check,
        #[command(flatten)]
        common: Common,
    },
}

/// Process outcome: `Ok(true)` pass, `Ok(false)` certification failure.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::BuildBank { common } => build_bank(&common),
        Command::GenSignal { common } => gen_signal(&common),
        Command::Scatter { common, signal, norms_only } => scatter_cmd(&common, &signal, norms_only),
        Command::Verify { check, common } => {
            let cfg = common.resolve()?;
            let out = common.out.clone().unwrap_or_else(|| PathBuf::from("scatterbench-runs").join(check.name()));
            trials::run_verify(check, cfg, &out, common.force)
        }
    }
}

fn build_bank(common: &Common) -> Result<bool> {
    let mut cfg = common.resolve()?;
    cfg.manifest = None;
    let bank = cfg.bank()?;
    let out = common.out.clone().unwrap_or_else(|| PathBuf::from("bank"));
    let manifest = export_bank(&bank, &out, common.force)?;
    let bessel = validate_bessel(&bank)?;
    let parseval = validate_parseval(&bank)?;
    let summary = serde_json::json!({
        "manifest": manifest,
        "id": bank.id(),
        "peripherals": bank.peripherals().len(),
        "bessel_max_sum": bessel.max_sum,
        "bessel_pass": bessel.pass,
        "parseval_min_sum": parseval.min_sum,
        "parseval_max_sum": parseval.max_sum,
        "parseval_pass": parseval.pass,
        "support_radius": measure_support_radius(bank.output(), 0.0),
    });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(true)
}

fn gen_signal(common: &Common) -> Result<bool> {
    let cfg = common.resolve()?;
    let grid = cfg.grid()?;
    let signal = match cfg.signal {
        SignalKind::Noise => band_limited_noise(&grid, cfg.band_fraction, cfg.seed)?,
        SignalKind::Delta => Signal::delta(grid, 1.0),
        SignalKind::Gabor => {
            let mut center = [0.0; MAX_DIMS];
            let mut freq = [0.0; MAX_DIMS];
            for a in 0..grid.dims() {
                center[a] = 0.5 * grid.sizes()[a] as f64 * grid.spacing()[a];
                freq[a] = cfg.gabor_frequency * grid.nyquist(a);
            }
            gabor(&grid, &center, cfg.gabor_width * grid.spacing()[0], &freq)?
        }
    };
    let out = common.out.clone().unwrap_or_else(|| PathBuf::from("signal.sctb"));
    if out.exists() && !common.force {
        return Err(scatterbench::Error::Refused(format!("{} exists; pass --force to overwrite", out.display())).into());
    }
    if out.extension().is_some_and(|e| e == "csv") {
        let tmp = output::partial(&out);
        write_csv(std::fs::File::create(&tmp)?, &signal)?;
        std::fs::rename(&tmp, &out)?;
    } else {
        save_signal(&out, &signal)?;
    }
    println!("{}", out.display());
    Ok(true)
}

fn read_signal(path: &Path, cfg: &RunConfig) -> Result<Signal> {
    if path.extension().is_some_and(|e| e == "csv") {
        let file = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
        Ok(read_csv(file, cfg.spacing)?)
    } else {
        Ok(load_signal(path).with_context(|| format!("reading {}", path.display()))?)
    }
}

fn scatter_cmd(common: &Common, signal: &Path, norms_only: bool) -> Result<bool> {
    let cfg = common.resolve()?;
    let f = read_signal(signal, &cfg)?;
    let bank = cfg.bank()?;
    if f.grid() != bank.grid() {
        bail!("signal grid {:?} does not match bank grid {:?}", f.grid().sizes(), bank.grid().sizes());
    }
    let mut policy = cfg.policy();
    policy.prune_threshold = cfg.prune_threshold.unwrap_or(1e-6);
    let s = scatter(&f, &bank, &policy)?;
    let out = common.out.clone().unwrap_or_else(|| PathBuf::from("coefficients"));
    write_dump(&s, &out, norms_only, common.force)?;
    let summary = serde_json::json!({
        "dump": out,
        "paths": s.len(),
        "l2l2_norm": l2l2_norm(&s),
        "residual_energy": s.residual_energy(),
        "pruned_energy": s.pruned_energy(),
    });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(true)
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("SCATTERBENCH_THREADS") {
        let n: usize = v.parse().with_context(|| format!("SCATTERBENCH_THREADS={v}"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match init_threads().and_then(|_| run(cli)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let refused = e.downcast_ref::<scatterbench::Error>().is_some_and(|e| e.is_refusal());
            if refused {
                eprintln!("{e:#}");
            } else {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(2)
        }
    }
}
