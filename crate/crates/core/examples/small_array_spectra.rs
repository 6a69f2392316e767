//! Singular values of the sensing matrix for three arrays of size 0.25
//! placed at mid-depth, and the effective rank each supports.

use waveguide_imaging::estimate::sensing_matrix;
use waveguide_imaging::presets;

fn main() -> waveguide_imaging::error::Result<()> {
    let ms = presets::homogeneous_modes(1.0)?;
    println!("guided modes: {}", ms.mode_count());
    let show = |name: &str, s: &[f64]| {
        let list: Vec<String> = s.iter().map(|v| format!("{v:.4e}")).collect();
        println!("{name:>10}: {}", list.join("  "));
    };
    let z_a = presets::HOMOGENEOUS_DEPTH;
    show(
        "vertical",
        sensing_matrix(&ms, &presets::vertical_points(20, z_a))?.singular_values(),
    );
    show(
        "horizontal",
        sensing_matrix(&ms, &presets::horizontal_points(20, z_a))?.singular_values(),
    );
    for seed in 0..5 {
        let sm = sensing_matrix(&ms, &presets::planar_points(20, z_a, seed))?;
        show(&format!("planar #{seed}"), sm.singular_values());
    }
    Ok(())
}
