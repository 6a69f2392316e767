//! A dense vertical aperture spanning the whole depth recovers the mode
//! amplitudes exactly; shorter apertures lose the weakly coupled modes.

use waveguide_imaging::estimate::{coupling_matrix, estimate_amplitudes, project_reduced, Regularizer};
use waveguide_imaging::geometry::ArrayGeometry;
use waveguide_imaging::presets;
use waveguide_imaging::synth::{sample_field, source_amplitudes};

fn main() -> waveguide_imaging::error::Result<()> {
    let ms = presets::homogeneous_modes(1.0)?;
    let a_o = source_amplitudes(&ms, &presets::homogeneous_source());
    println!(
        "{:>10} {:>12} {:>12} {:>14}",
        "aperture", "max eig", "min eig", "rel. error"
    );
    for length in [20.0, 10.0, 5.0, 2.0, 0.5] {
        let geometry = ArrayGeometry::vertical(10.0, 0.5 * length);
        let cm = coupling_matrix(&ms, &geometry)?;
        let data = sample_field(&ms, &a_o, &geometry)?;
        let a = estimate_amplitudes(&project_reduced(&data, &cm, &ms)?, &cm, &Regularizer::MoorePenrose)?;
        let error = (a.vector() - a_o.vector()).norm() / a_o.norm();
        let d = cm.eigenvalues();
        println!(
            "{length:>10.2} {:>12.4e} {:>12.4e} {error:>14.3e}",
            d[0],
            d[d.len() - 1]
        );
    }
    Ok(())
}
