//! Sources, sensor arrays and their unit-mass measures.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modes::ModeSet;
use crate::quadrature::GaussLegendre;

/// Gauss-Legendre order used on each panel of a dense aperture.
const PANEL_ORDER: usize = 16;

/// Default dense-aperture sampling density.
pub const DEFAULT_NODES_PER_WAVELENGTH: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub z: f64,
}

impl Point {
    pub fn new(x: f64, z: f64) -> Self {
        Self { x, z }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.z - other.z)
    }
}

/// Point-like time-harmonic source at range `x` and depth `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointSource {
    pub x: f64,
    pub z: f64,
}

impl PointSource {
    pub fn new(x: f64, z: f64) -> Self {
        Self { x, z }
    }

    pub fn position(&self) -> Point {
        Point::new(self.x, self.z)
    }

    /// The source must lie beyond the array and inside the transverse domain.
    pub fn validate(&self, ms: &ModeSet, geometry: &ArrayGeometry) -> Result<()> {
        let (lo, hi) = ms.spec().transverse_domain();
        if !(self.z > lo && self.z < hi) {
            return Err(Error::InvalidParameter(format!(
                "source depth {} outside transverse domain",
                self.z
            )));
        }
        if self.x <= geometry.range_extent() {
            return Err(Error::InvalidParameter(format!(
                "source range {} must exceed array extent {}",
                self.x,
                geometry.range_extent()
            )));
        }
        Ok(())
    }
}

/// A segment `[center - half_length, center + half_length]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub center: f64,
    pub half_length: f64,
}

impl Interval {
    pub fn new(center: f64, half_length: f64) -> Self {
        Self { center, half_length }
    }

    pub fn lo(&self) -> f64 {
        self.center - self.half_length
    }

    pub fn hi(&self) -> f64 {
        self.center + self.half_length
    }
}

/// Sensor array. Each variant carries a uniform measure of unit mass:
/// the counting measure divided by `M` for discrete arrays, and normalized
/// length or area for the dense (continuum) apertures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ArrayGeometry {
    Discrete {
        points: Vec<Point>,
    },
    /// Union of depth intervals on the line `x = 0`.
    DenseVertical {
        intervals: Vec<Interval>,
    },
    /// Union of range intervals on the line `z = depth`.
    DenseHorizontal {
        depth: f64,
        intervals: Vec<Interval>,
    },
    /// Square `[-a, a] x [depth - a, depth + a]`.
    DensePlanar {
        depth: f64,
        half_width: f64,
    },
}

/// A quadrature node of an array measure; weights of a geometry sum to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplePoint {
    pub x: f64,
    pub z: f64,
    pub weight: f64,
}

impl ArrayGeometry {
    pub fn discrete(points: Vec<Point>) -> Self {
        Self::Discrete { points }
    }

    /// Dense vertical aperture centered at depth `z_a` with half-length `a`.
    pub fn vertical(z_a: f64, a: f64) -> Self {
        Self::DenseVertical {
            intervals: vec![Interval::new(z_a, a)],
        }
    }

    /// Dense horizontal aperture at depth `z_a` spanning `[-a, a]`.
    pub fn horizontal(z_a: f64, a: f64) -> Self {
        Self::DenseHorizontal {
            depth: z_a,
            intervals: vec![Interval::new(0.0, a)],
        }
    }

    pub fn planar(z_a: f64, a: f64) -> Self {
        Self::DensePlanar {
            depth: z_a,
            half_width: a,
        }
    }

    /// Largest `|x|` covered by the array.
    pub fn range_extent(&self) -> f64 {
        match self {
            Self::Discrete { points } => points.iter().map(|p| p.x.abs()).fold(0.0, f64::max),
            Self::DenseVertical { .. } => 0.0,
            Self::DenseHorizontal { intervals, .. } => intervals
                .iter()
                .map(|i| i.lo().abs().max(i.hi().abs()))
                .fold(0.0, f64::max),
            Self::DensePlanar { half_width, .. } => *half_width,
        }
    }

    /// Total length (or area for planar) of a dense aperture; `M` for discrete.
    pub fn total_size(&self) -> f64 {
        match self {
            Self::Discrete { points } => points.len() as f64,
            Self::DenseVertical { intervals } | Self::DenseHorizontal { intervals, .. } => {
                intervals.iter().map(|i| 2.0 * i.half_length).sum()
            }
            Self::DensePlanar { half_width, .. } => 4.0 * half_width * half_width,
        }
    }

    /// Checks that the array is nonempty, its intervals disjoint, and every
    /// sensor inside the transverse domain of `ms`.
    pub fn validate(&self, ms: &ModeSet) -> Result<()> {
        let (lo, hi) = ms.spec().transverse_domain();
        let inside = |z: f64| z >= lo - 1e-12 && z <= hi + 1e-12;
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match self {
            Self::Discrete { points } => {
                if points.is_empty() {
                    return bad("discrete array has no sensors".into());
                }
                if let Some(p) = points.iter().find(|p| !inside(p.z) || !p.x.is_finite()) {
                    return bad(format!("sensor ({}, {}) outside the waveguide", p.x, p.z));
                }
            }
            Self::DenseVertical { intervals } => {
                check_intervals(intervals)?;
                if intervals.iter().any(|i| !inside(i.lo()) || !inside(i.hi())) {
                    return bad("vertical aperture leaves the waveguide".into());
                }
            }
            Self::DenseHorizontal { depth, intervals } => {
                check_intervals(intervals)?;
                if !inside(*depth) {
                    return bad(format!("horizontal aperture depth {depth} outside the waveguide"));
                }
            }
            Self::DensePlanar { depth, half_width } => {
                if !(*half_width > 0.0) {
                    return bad("planar aperture needs a positive half-width".into());
                }
                if !inside(depth - half_width) || !inside(depth + half_width) {
                    return bad("planar aperture leaves the waveguide".into());
                }
            }
        }
        Ok(())
    }

    /// Quadrature representation of the array measure. Discrete arrays give
    /// their sensors with weight `1/M`; dense apertures are covered by
    /// composite Gauss-Legendre panels with about `nodes_per_wavelength`
    /// nodes per wavelength along each axis.
    pub fn sample_points(&self, wavelength: f64, nodes_per_wavelength: usize) -> Vec<SamplePoint> {
        let gl = GaussLegendre::new(PANEL_ORDER);
        let panels = |len: f64| {
            let per_wl = (nodes_per_wavelength as f64 / PANEL_ORDER as f64).max(1.0);
            ((len / wavelength) * per_wl).ceil().max(1.0) as usize
        };
        match self {
            Self::Discrete { points } => {
                let w = 1.0 / points.len() as f64;
                points
                    .iter()
                    .map(|p| SamplePoint {
                        x: p.x,
                        z: p.z,
                        weight: w,
                    })
                    .collect()
            }
            Self::DenseVertical { intervals } => {
                let total = self.total_size();
                intervals
                    .iter()
                    .flat_map(|i| gl.composite(i.lo(), i.hi(), panels(2.0 * i.half_length)))
                    .map(|(z, w)| SamplePoint {
                        x: 0.0,
                        z,
                        weight: w / total,
                    })
                    .collect()
            }
            Self::DenseHorizontal { depth, intervals } => {
                let total = self.total_size();
                intervals
                    .iter()
                    .flat_map(|i| gl.composite(i.lo(), i.hi(), panels(2.0 * i.half_length)))
                    .map(|(x, w)| SamplePoint {
                        x,
                        z: *depth,
                        weight: w / total,
                    })
                    .collect()
            }
            Self::DensePlanar { depth, half_width } => {
                let a = *half_width;
                let line = gl.composite(-a, a, panels(2.0 * a));
                let area = self.total_size();
                let mut out = Vec::with_capacity(line.len() * line.len());
                for &(x, wx) in &line {
                    for &(z, wz) in &line {
                        out.push(SamplePoint {
                            x,
                            z: depth + z,
                            weight: wx * wz / area,
                        });
                    }
                }
                out
            }
        }
    }
}

fn check_intervals(intervals: &[Interval]) -> Result<()> {
    if intervals.is_empty() {
        return Err(Error::InvalidParameter("dense aperture has no intervals".into()));
    }
    if intervals.iter().any(|i| !(i.half_length > 0.0)) {
        return Err(Error::InvalidParameter(
            "aperture intervals need positive half-lengths".into(),
        ));
    }
    let mut sorted: Vec<_> = intervals.to_vec();
    sorted.sort_by(|a, b| a.lo().total_cmp(&b.lo()));
    if sorted.windows(2).any(|w| w[0].hi() > w[1].lo()) {
        return Err(Error::InvalidParameter("aperture intervals overlap".into()));
    }
    Ok(())
}

/// Latin hypercube design of `count` points in the square
/// `[center.x - half_width, center.x + half_width] x [center.z - .., center.z + ..]`.
/// Each axis is split into `count` equal bins holding exactly one point,
/// placed uniformly at random within its bin.
pub fn lhs_design(count: usize, center: Point, half_width: f64, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bin = 2.0 * half_width / count as f64;
    let axis = |lo: f64, rng: &mut ChaCha8Rng| -> Vec<f64> {
        let mut bins: Vec<usize> = (0..count).collect();
        bins.shuffle(rng);
        bins.into_iter()
            .map(|b| lo + (b as f64 + rng.random::<f64>()) * bin)
            .collect()
    };
    let xs = axis(center.x - half_width, &mut rng);
    let zs = axis(center.z - half_width, &mut rng);
    xs.into_iter().zip(zs).map(|(x, z)| Point::new(x, z)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::{solve_modes, WaveguideSpec};
    use proptest::prelude::*;

    fn dd() -> ModeSet {
        solve_modes(&WaveguideSpec::homogeneous_dd(20.0, 1.0).unwrap(), 1.0).unwrap()
    }

    #[test]
    fn single_point_design_in_square() {
        let p = lhs_design(1, Point::new(0.0, 11.0), 0.125, 3);
        assert_eq!(p.len(), 1);
        assert!(p[0].x.abs() <= 0.125 && (p[0].z - 11.0).abs() <= 0.125);
    }

    proptest! {
        #[test]
        fn lhs_one_point_per_bin(seed in any::<u64>(), count in 1usize..60) {
            let h = 0.125;
            let pts = lhs_design(count, Point::new(0.0, 11.0), h, seed);
            prop_assert_eq!(pts.len(), count);
            let bin = 2.0 * h / count as f64;
            let mut xb = vec![0; count];
            let mut zb = vec![0; count];
            for p in &pts {
                let bx = (((p.x + h) / bin).floor() as usize).min(count - 1);
                let bz = (((p.z - 11.0 + h) / bin).floor() as usize).min(count - 1);
                xb[bx] += 1;
                zb[bz] += 1;
            }
            prop_assert!(xb.iter().all(|&c| c == 1));
            prop_assert!(zb.iter().all(|&c| c == 1));
        }
    }

    #[test]
    fn measures_have_unit_mass() {
        let geoms = [
            ArrayGeometry::discrete(vec![Point::new(0.0, 1.0), Point::new(0.1, 2.0)]),
            ArrayGeometry::vertical(10.0, 10.0),
            ArrayGeometry::DenseVertical {
                intervals: vec![Interval::new(3.0, 1.0), Interval::new(12.0, 2.5)],
            },
            ArrayGeometry::horizontal(11.0, 4.0),
            ArrayGeometry::planar(11.0, 0.5),
        ];
        for g in geoms {
            g.validate(&dd()).unwrap();
            let mass: f64 = g
                .sample_points(2.0 * std::f64::consts::PI, 64)
                .iter()
                .map(|p| p.weight)
                .sum();
            assert!((mass - 1.0).abs() < 1e-13, "{g:?}: {mass}");
        }
    }

    #[test]
    fn invalid_geometries_rejected() {
        let ms = dd();
        assert!(ArrayGeometry::vertical(19.0, 2.0).validate(&ms).is_err());
        assert!(ArrayGeometry::DenseVertical {
            intervals: vec![Interval::new(3.0, 2.0), Interval::new(4.0, 2.0)]
        }
        .validate(&ms)
        .is_err());
        assert!(ArrayGeometry::discrete(vec![]).validate(&ms).is_err());
        assert!(ArrayGeometry::discrete(vec![Point::new(0.0, 25.0)])
            .validate(&ms)
            .is_err());
        assert!(ArrayGeometry::planar(11.0, 0.0).validate(&ms).is_err());
    }

    #[test]
    fn source_must_lie_beyond_array() {
        let ms = dd();
        let g = ArrayGeometry::horizontal(11.0, 5.0);
        assert!(PointSource::new(4.0, 7.7).validate(&ms, &g).is_err());
        assert!(PointSource::new(100.0, 7.7).validate(&ms, &g).is_ok());
        assert!(PointSource::new(100.0, 20.0).validate(&ms, &g).is_err());
    }
}
