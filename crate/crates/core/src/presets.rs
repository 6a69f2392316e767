//! Reference configurations: a Dirichlet channel of depth 20 and a
//! parabolic channel of scale 10, both with unit sound speed, probed at
//! unit frequency by arrays of total size 0.25 centred near mid-depth.

use crate::error::Result;
use crate::geometry::{lhs_design, ArrayGeometry, Point, PointSource};
use crate::modes::WaveguideSpec;

/// Total extent of the small reference arrays.
pub const ARRAY_SIZE: f64 = 0.25;

/// Array depth in the homogeneous channel.
pub const HOMOGENEOUS_DEPTH: f64 = 11.0;

/// Array depth in the parabolic channel.
pub const PARABOLIC_DEPTH: f64 = 2.0;

pub fn homogeneous_waveguide() -> WaveguideSpec {
    WaveguideSpec::homogeneous_dd(20.0, 1.0).expect("valid reference channel")
}

pub fn parabolic_waveguide() -> WaveguideSpec {
    WaveguideSpec::parabolic(10.0, 1.0).expect("valid reference channel")
}

pub fn homogeneous_source() -> PointSource {
    PointSource::new(100.0, 7.7)
}

pub fn parabolic_source() -> PointSource {
    PointSource::new(100.0, -3.0)
}

/// Offsets `size (k - M/2) / M` for `k = 1..=M`.
fn offsets(m: usize) -> impl Iterator<Item = f64> {
    let half = m as f64 / 2.0;
    (1..=m).map(move |k| ARRAY_SIZE * (k as f64 - half) / m as f64)
}

/// `M` receivers on the line `x = 0` at depths `z_a + offset_k`.
pub fn vertical_points(m: usize, z_a: f64) -> Vec<Point> {
    offsets(m).map(|dz| Point::new(0.0, z_a + dz)).collect()
}

/// `M` receivers on the line `z = z_a` at ranges `offset_k`.
pub fn horizontal_points(m: usize, z_a: f64) -> Vec<Point> {
    offsets(m).map(|dx| Point::new(dx, z_a)).collect()
}

/// `M` receivers in a Latin hypercube design filling the square of side
/// [`ARRAY_SIZE`] centred at `(0, z_a)`.
pub fn planar_points(m: usize, z_a: f64, seed: u64) -> Vec<Point> {
    lhs_design(m, Point::new(0.0, z_a), 0.5 * ARRAY_SIZE, seed)
}

pub fn vertical_array(m: usize) -> ArrayGeometry {
    ArrayGeometry::discrete(vertical_points(m, HOMOGENEOUS_DEPTH))
}

pub fn horizontal_array(m: usize) -> ArrayGeometry {
    ArrayGeometry::discrete(horizontal_points(m, HOMOGENEOUS_DEPTH))
}

pub fn planar_array(m: usize, seed: u64) -> ArrayGeometry {
    ArrayGeometry::discrete(planar_points(m, HOMOGENEOUS_DEPTH, seed))
}

/// Convenience: the reference homogeneous channel's mode set at `omega`.
pub fn homogeneous_modes(omega: f64) -> Result<crate::modes::ModeSet> {
    crate::modes::solve_modes(&homogeneous_waveguide(), omega)
}
