//! Bias and variance of the Tikhonov estimator for the small vertical array
//! as the regularization parameter sweeps across the noise level.

use waveguide_imaging::estimate::{mse_decomposition, optimal_epsilon, sensing_matrix, Regularizer};
use waveguide_imaging::geometry::ArrayGeometry;
use waveguide_imaging::presets;
use waveguide_imaging::synth::{sample_field, source_amplitudes};

fn main() -> waveguide_imaging::error::Result<()> {
    let ms = presets::homogeneous_modes(1.0)?;
    let a_o = source_amplitudes(&ms, &presets::homogeneous_source());
    let points = presets::vertical_points(20, presets::HOMOGENEOUS_DEPTH);
    let sm = sensing_matrix(&ms, &points)?;
    let clean = sample_field(&ms, &a_o, &ArrayGeometry::discrete(points))?;
    let sigma_meas = 1e-7 * clean.sup_norm();

    let choice = optimal_epsilon(&sm, &a_o, sigma_meas)?;
    println!("noise level {sigma_meas:.3e}, |a_o|^2 = {:.4e}", a_o.norm_squared());
    println!(
        "heuristic eps {:.3e}, scanned eps {:.3e}",
        choice.heuristic, choice.scanned
    );
    println!("{:>10} {:>12} {:>12} {:>12}", "eps", "bias^2", "variance", "mse");
    for k in -14..=0 {
        let eps = 10f64.powi(k);
        let r = mse_decomposition(&sm, &a_o, sigma_meas, &Regularizer::Tikhonov(eps));
        println!(
            "{eps:>10.0e} {:>12.4e} {:>12.4e} {:>12.4e}",
            r.bias_sq, r.variance, r.mse
        );
    }
    Ok(())
}
