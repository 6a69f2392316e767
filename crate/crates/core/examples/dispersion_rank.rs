//! The moment vectors of a small array collapse onto 2Q - 1 directions
//! instead of Q(Q+1)/2 because range and depth derivatives are tied by the
//! dispersion relation.

use waveguide_imaging::modes::solve_modes;
use waveguide_imaging::presets;
use waveguide_imaging::rank::{moment_family, span_rank_collapse};

fn main() -> waveguide_imaging::error::Result<()> {
    let cases = [
        (
            "homogeneous",
            solve_modes(&presets::homogeneous_waveguide(), 2.5)?,
            presets::HOMOGENEOUS_DEPTH,
        ),
        (
            "parabolic",
            solve_modes(&presets::parabolic_waveguide(), 4.0)?,
            presets::PARABOLIC_DEPTH,
        ),
    ];
    for (name, ms, z_a) in cases {
        println!("{name}: {} guided modes, array depth {z_a}", ms.mode_count());
        println!("{:>3} {:>8} {:>6} {:>6} {:>10}", "Q", "vectors", "2Q-1", "rank", "gap");
        for order in 1..=5 {
            let r = span_rank_collapse(&moment_family(&ms, z_a, &[], order)?);
            let vectors = order * (order + 1) / 2;
            println!(
                "{order:>3} {vectors:>8} {:>6} {:>6} {:>10.2e}",
                r.expected, r.rank, r.gap
            );
        }
        println!();
    }
    Ok(())
}
