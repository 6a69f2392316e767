use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use waveguide_imaging::error::Error;
use waveguide_imaging::experiment::{
    half_error_threshold, prepare_output, run_image, run_mc_rate, run_modes, run_rank_scan, run_spectrum,
    ExperimentConfig,
};

/// Low-frequency source imaging experiments in acoustic waveguides.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Guided modes of the configured channel.
    Modes(Common),
    /// Singular values (discrete arrays) or coupling eigenvalues (dense).
    Spectrum(Common),
    /// Image and peak for one noise realization.
    Image {
        #[command(flatten)]
        common: Common,
        /// Also write a PNG heatmap.
        #[arg(long)]
        png: bool,
    },
    /// Monte Carlo localization error rate per noise level.
    McRate {
        #[command(flatten)]
        common: Common,
        /// Number of noise realizations per level.
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Effective rank of dense apertures against the asymptotic prediction.
    RankScan(Common),
}

#[derive(Args)]
struct Common {
    /// TOML experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides noise.seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides noise.sigmas with a single level.
    #[arg(long)]
    sigma: Option<f64>,
}

impl Common {
    fn load(&self, trials: Option<usize>) -> Result<ExperimentConfig, Error> {
        let mut cfg = ExperimentConfig::load(&self.config)?;
        if let Some(seed) = self.seed {
            cfg.noise.seed = seed;
        }
        if let Some(sigma) = self.sigma {
            cfg.noise.sigmas = vec![sigma];
        }
        if let Some(trials) = trials {
            cfg.noise.trials = trials;
        }
        cfg.validate()?;
        prepare_output(&self.out)?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Modes(c) => {
            let cfg = c.load(None)?;
            let ms = run_modes(&cfg, &c.out)?;
            println!("{} guided modes, wavelength {:.6}", ms.mode_count(), ms.wavelength());
        }
        Command::Spectrum(c) => {
            let cfg = c.load(None)?;
            let report = run_spectrum(&cfg, &c.out)?;
            for (i, s) in report.spectrum.iter().enumerate() {
                println!("{:>4} {s:.6e}", i + 1);
            }
            println!(
                "effective rank {} (threshold {:.3e})",
                report.effective_rank, report.threshold
            );
        }
        Command::Image { common, png } => {
            let cfg = common.load(None)?;
            let sigma = cfg.noise.sigmas[0];
            let loc = run_image(&cfg, sigma, &common.out, png)?;
            println!(
                "peak ({:.4}, {:.4}), distance {:.4}, {}",
                loc.peak.x,
                loc.peak.z,
                loc.distance,
                if loc.success { "localized" } else { "not localized" }
            );
        }
        Command::McRate { common, trials } => {
            let cfg = common.load(trials)?;
            let curve = run_mc_rate(&cfg, Some(&common.out))?;
            for p in &curve {
                println!("sigma {:.3e}  error rate {:.3}", p.sigma, p.error_rate);
            }
            if let Some(t) = half_error_threshold(&curve) {
                println!("50% error rate at sigma ~ {t:.3e}");
            }
        }
        Command::RankScan(c) => {
            let cfg = c.load(None)?;
            let (vertical, horizontal) = run_rank_scan(&cfg, &c.out)?;
            println!("a/L   vertical (pred/meas)   horizontal (pred/meas)");
            for (v, h) in vertical.iter().zip(&horizontal) {
                println!(
                    "{:.3}  {:>8.1} {:>5}   {:>8.1} {:>5}",
                    v.ratio, v.predicted, v.measured, h.predicted, h.measured
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
