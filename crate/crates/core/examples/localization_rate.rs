//! Monte Carlo localization error rate of a planar array of 20 receivers
//! and of a 50 times denser one, and the noise levels at which half of the
//! images miss the source.

use waveguide_imaging::experiment::{half_error_threshold, run_mc_rate, ExperimentConfig};

const CONFIG: &str = include_str!("../configs/planar.toml");

fn main() -> waveguide_imaging::error::Result<()> {
    let sigmas: Vec<f64> = (0..=12).map(|k| 10f64.powf(-5.0 + k as f64 / 3.0)).collect();
    let mut thresholds = Vec::new();
    for receivers in [20, 1000] {
        let mut cfg = ExperimentConfig::from_toml(CONFIG)?;
        cfg.array.receivers = receivers;
        cfg.noise.sigmas = sigmas.clone();
        let curve = run_mc_rate(&cfg, None)?;
        println!("{receivers} receivers, {} trials per level", cfg.noise.trials);
        for p in &curve {
            println!("  sigma {:.2e}  error rate {:.3}", p.sigma, p.error_rate);
        }
        thresholds.push(half_error_threshold(&curve));
    }
    if let [Some(small), Some(large)] = thresholds[..] {
        println!("50% thresholds {small:.3e} and {large:.3e}, ratio {:.2}", large / small);
    }
    Ok(())
}
