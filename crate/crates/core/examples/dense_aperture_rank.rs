//! Effective rank of the coupling matrix of a dense vertical or horizontal
//! aperture in a deep channel (318 guided modes), against the asymptotic
//! prediction proportional to the aperture length.

use waveguide_imaging::estimate::coupling_matrix;
use waveguide_imaging::geometry::{ArrayGeometry, Interval};
use waveguide_imaging::modes::{solve_modes, WaveguideSpec};
use waveguide_imaging::rank::{dense_rank_prediction, effective_rank, DenseKind, RankMode};

fn main() -> waveguide_imaging::error::Result<()> {
    let depth = 1000.0;
    let ms = solve_modes(&WaveguideSpec::homogeneous_dd(depth, 1.0)?, 1.0)?;
    let n = ms.mode_count();
    println!("guided modes: {n}");
    println!(
        "{:>6} {:>10} {:>10} {:>10} {:>10}",
        "a/L", "vert pred", "vert meas", "hor pred", "hor meas"
    );
    for ratio in [0.02, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5] {
        let a = ratio * depth;
        let vertical = Interval::new(a, a);
        let cm = coupling_matrix(
            &ms,
            &ArrayGeometry::DenseVertical {
                intervals: vec![vertical],
            },
        )?;
        let v_meas = effective_rank(cm.eigenvalues(), RankMode::PlateauHalf)?;
        let v_pred = dense_rank_prediction(DenseKind::Vertical, &[vertical], ms.wavelength(), n);
        let horizontal = Interval::new(0.0, a);
        let cm = coupling_matrix(&ms, &ArrayGeometry::horizontal(0.5 * depth + 0.37, a))?;
        let h_meas = effective_rank(cm.eigenvalues(), RankMode::PlateauHalf)?;
        let h_pred = dense_rank_prediction(DenseKind::Horizontal, &[horizontal], ms.wavelength(), n);
        println!("{ratio:>6.2} {v_pred:>10.1} {v_meas:>10} {h_pred:>10.1} {h_meas:>10}");
    }
    Ok(())
}
