//! Guided modes of the three channel models at unit frequency: transverse
//! and axial wavenumbers, and the dispersion residual.

use waveguide_imaging::modes::{solve_modes, WaveguideSpec};

fn main() -> waveguide_imaging::error::Result<()> {
    let channels = [
        (
            "Dirichlet/Dirichlet, depth 20",
            WaveguideSpec::homogeneous_dd(20.0, 1.0)?,
        ),
        ("Neumann/Dirichlet, depth 20", WaveguideSpec::homogeneous_dn(20.0, 1.0)?),
        ("parabolic, scale 10", WaveguideSpec::parabolic(10.0, 1.0)?),
    ];
    for (name, spec) in channels {
        let ms = solve_modes(&spec, 1.0)?;
        println!(
            "{name}: {} guided modes, wavelength {:.4}",
            ms.mode_count(),
            ms.wavelength()
        );
        println!("{:>5} {:>10} {:>10} {:>12}", "index", "alpha", "beta", "profile(2)");
        for j in 0..ms.mode_count() {
            println!(
                "{:>5} {:>10.6} {:>10.6} {:>12.6}",
                j + ms.first_index(),
                ms.alpha()[j],
                ms.beta()[j],
                ms.profile(j, 2.0, 0)
            );
        }
        println!();
    }
    Ok(())
}
