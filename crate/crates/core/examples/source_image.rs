//! Images of the source from noisy data recorded by the small vertical
//! array, written as CSV and PNG heatmaps.
//!
//! ```text
//! cargo run --example source_image -- out/images
//! ```

use std::path::PathBuf;

use waveguide_imaging::experiment::{run_image, ExperimentConfig};

const CONFIG: &str = include_str!("../configs/vertical.toml");

fn main() -> waveguide_imaging::error::Result<()> {
    let root = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out/images".into()));
    let cfg = ExperimentConfig::from_toml(CONFIG)?;
    for sigma in [0.0, 1e-8, 1e-7, 1e-6] {
        let out = root.join(format!("sigma_{sigma:.0e}"));
        std::fs::create_dir_all(&out)?;
        let loc = run_image(&cfg, sigma, &out, true)?;
        println!(
            "sigma {sigma:.0e}: peak ({:.3}, {:.3}), {:.3} from the source, eps {:.2e} -> {}",
            loc.peak.x,
            loc.peak.z,
            loc.distance,
            loc.epsilon,
            out.display()
        );
    }
    Ok(())
}
