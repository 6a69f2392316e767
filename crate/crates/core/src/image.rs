//! Imaging by migration of mode amplitudes over a rectangular search
//! region, peak picking, and the half-wavelength localization test.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::estimate::{mode_projections, CouplingMatrix};
use crate::geometry::{ArrayGeometry, Point, PointSource};
use crate::linalg::C64;
use crate::modes::ModeSet;
use crate::synth::{FieldSamples, ModeAmplitudes};

/// Default grid nodes per wavelength along each axis.
pub const DEFAULT_NODES_PER_WAVELENGTH: f64 = 20.0;

/// Uniform rectangular grid `[x_min, x_max] x [z_min, z_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub z_min: f64,
    pub z_max: f64,
    pub dx: f64,
    pub dz: f64,
}

impl SearchGrid {
    pub fn new(x: (f64, f64), z: (f64, f64), dx: f64, dz: f64) -> Result<Self> {
        if !(dx > 0.0 && dz > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "grid steps must be positive, got ({dx}, {dz})"
            )));
        }
        if !(x.0 <= x.1 && z.0 <= z.1) {
            return Err(Error::InvalidParameter("grid ranges must be ordered".into()));
        }
        Ok(Self {
            x_min: x.0,
            x_max: x.1,
            z_min: z.0,
            z_max: z.1,
            dx,
            dz,
        })
    }

    /// `x` in `[50, 150]`, `z` over the whole transverse domain (`[-L, L]`
    /// for the unbounded parabolic channel), step `lambda / 20` on both axes.
    pub fn default_for(ms: &ModeSet) -> Self {
        let step = ms.wavelength() / DEFAULT_NODES_PER_WAVELENGTH;
        let l = ms.spec().length_scale;
        let (z_min, z_max) = match ms.spec().transverse_domain() {
            (lo, hi) if lo.is_finite() && hi.is_finite() => (lo, hi),
            _ => (-l, l),
        };
        Self::new((50.0, 150.0), (z_min, z_max), step, step).expect("valid default grid")
    }

    /// Rejects grids that reach back into the array aperture.
    pub fn validate(&self, geometry: &ArrayGeometry) -> Result<()> {
        let extent = geometry.range_extent();
        if self.x_min <= extent {
            return Err(Error::InvalidParameter(format!(
                "search region starts at x = {} inside the array extent {extent}",
                self.x_min
            )));
        }
        Ok(())
    }

    fn axis(lo: f64, hi: f64, step: f64) -> Vec<f64> {
        let n = ((hi - lo) / step + 1e-9).floor() as usize + 1;
        (0..n).map(|i| lo + i as f64 * step).collect()
    }

    pub fn xs(&self) -> Vec<f64> {
        Self::axis(self.x_min, self.x_max, self.dx)
    }

    pub fn zs(&self) -> Vec<f64> {
        Self::axis(self.z_min, self.z_max, self.dz)
    }
}

/// Complex image sampled on a [`SearchGrid`]; `values[(ix, iz)]`.
#[derive(Debug, Clone)]
pub struct ImageMap {
    pub grid: SearchGrid,
    pub xs: Vec<f64>,
    pub zs: Vec<f64>,
    pub values: DMatrix<C64>,
}

impl ImageMap {
    /// `|I|` divided by its maximum (all zeros for a vanishing image).
    pub fn normalized_modulus(&self) -> DMatrix<f64> {
        let modulus = self.values.map(|v| v.norm());
        let max = modulus.max();
        if max > 0.0 {
            modulus / max
        } else {
            modulus
        }
    }
}

/// Grid node of maximal modulus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub x: f64,
    pub z: f64,
    pub modulus: f64,
}

impl Peak {
    pub fn position(&self) -> Point {
        Point::new(self.x, self.z)
    }
}

/// `I[a](x, z) = 2i sum_j beta_j exp(i beta_j x) phi_j(z) conj(a_j)`.
pub fn migrate(a: &ModeAmplitudes, ms: &ModeSet, grid: &SearchGrid) -> Result<ImageMap> {
    if a.len() != ms.mode_count() {
        return Err(Error::LengthMismatch {
            expected: ms.mode_count(),
            actual: a.len(),
        });
    }
    let xs = grid.xs();
    let zs = grid.zs();
    let beta = ms.beta();
    let range = DMatrix::from_fn(xs.len(), beta.len(), |i, j| {
        C64::new(0.0, 2.0 * beta[j]) * C64::from_polar(1.0, beta[j] * xs[i]) * a.0[j].conj()
    });
    let mut depth = DMatrix::zeros(beta.len(), zs.len());
    for (k, &z) in zs.iter().enumerate() {
        for (j, phi) in ms.profiles_at(z).into_iter().enumerate() {
            depth[(j, k)] = C64::new(phi, 0.0);
        }
    }
    Ok(ImageMap {
        grid: grid.clone(),
        xs,
        zs,
        values: range * depth,
    })
}

/// Reverse-time migration of recorded data: the data are projected on the
/// mode traces, `c_j = int p phi_j exp(i beta_j x) dmu = (A a)_j`, and `c` is
/// migrated, giving `2i sum_j beta_j exp(i beta_j x) phi_j(z) conj((A a)_j)`.
pub fn reverse_time(fs: &FieldSamples, cm: &CouplingMatrix, ms: &ModeSet, grid: &SearchGrid) -> Result<ImageMap> {
    if &fs.geometry != cm.geometry() {
        return Err(Error::GeometryMismatch);
    }
    let c: DVector<C64> = mode_projections(fs, ms);
    migrate(&ModeAmplitudes(c), ms, grid)
}

/// Node of maximal modulus; ties go to the smallest `x` index, then the
/// smallest `z` index.
pub fn locate_peak(im: &ImageMap) -> Result<Peak> {
    let (nx, nz) = im.values.shape();
    if nx == 0 || nz == 0 {
        return Err(Error::InvalidParameter("empty image".into()));
    }
    let mut best = (0, 0, -1.0);
    for ix in 0..nx {
        for iz in 0..nz {
            let m = im.values[(ix, iz)].norm();
            if m > best.2 {
                best = (ix, iz, m);
            }
        }
    }
    Ok(Peak {
        x: im.xs[best.0],
        z: im.zs[best.1],
        modulus: best.2,
    })
}

/// True iff the peak lies in the closed ball of radius `lambda / 2` around
/// the source.
pub fn localization_success(peak: Point, src: &PointSource, lambda: f64) -> bool {
    peak.distance(&src.position()) <= 0.5 * lambda
}
