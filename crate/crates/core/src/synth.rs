//! Far-field guided-mode data recorded by an array, with optional noise.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, PointSource, SamplePoint, DEFAULT_NODES_PER_WAVELENGTH};
use crate::linalg::C64;
use crate::modes::ModeSet;

/// Complex guided-mode amplitudes, one per mode in dense order.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeAmplitudes(pub DVector<C64>);

impl ModeAmplitudes {
    pub fn zeros(n: usize) -> Self {
        Self(DVector::zeros(n))
    }

    pub fn from_vec(v: Vec<C64>) -> Self {
        Self(DVector::from_vec(v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn norm_squared(&self) -> f64 {
        self.0.norm_squared()
    }

    pub fn as_slice(&self) -> &[C64] {
        self.0.as_slice()
    }

    pub fn vector(&self) -> &DVector<C64> {
        &self.0
    }
}

/// Complex field at the quadrature nodes of an array geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSamples {
    pub geometry: ArrayGeometry,
    pub points: Vec<SamplePoint>,
    pub values: DVector<C64>,
}

impl FieldSamples {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `max_k |p_k|`.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Additive circular complex Gaussian noise with standard deviation
/// `sigma_rel * max|p|` per sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub sigma_rel: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn new(sigma_rel: f64, seed: u64) -> Result<Self> {
        if !(sigma_rel >= 0.0 && sigma_rel.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "noise level must be nonnegative, got {sigma_rel}"
            )));
        }
        Ok(Self { sigma_rel, seed })
    }

    /// Absolute per-sample standard deviation for the given clean field.
    pub fn sigma_meas(&self, clean: &FieldSamples) -> f64 {
        self.sigma_rel * clean.sup_norm()
    }
}

/// Amplitudes `a_j = i/(2 beta_j) phi_j(z_o) exp(i beta_j x_o)` radiated by a
/// point source toward an array near `x = 0`.
pub fn source_amplitudes(ms: &ModeSet, src: &PointSource) -> ModeAmplitudes {
    let amps = ms
        .beta()
        .iter()
        .enumerate()
        .map(|(j, &b)| C64::new(0.0, 1.0 / (2.0 * b)) * ms.profile(j, src.z, 0) * C64::from_polar(1.0, b * src.x))
        .collect();
    ModeAmplitudes::from_vec(amps)
}

/// `M x N` matrix of mode traces `phi_j(z_k) exp(-i beta_j x_k)`.
pub fn mode_traces(ms: &ModeSet, points: impl IntoIterator<Item = (f64, f64)>) -> DMatrix<C64> {
    let pts: Vec<(f64, f64)> = points.into_iter().collect();
    let n = ms.mode_count();
    DMatrix::from_fn(pts.len(), n, |k, j| {
        let (x, z) = pts[k];
        C64::from_polar(ms.profile(j, z, 0), -ms.beta()[j] * x)
    })
}

/// Mode-sum field at the default quadrature resolution of `geometry`.
pub fn sample_field(ms: &ModeSet, amps: &ModeAmplitudes, geometry: &ArrayGeometry) -> Result<FieldSamples> {
    sample_field_with(ms, amps, geometry, DEFAULT_NODES_PER_WAVELENGTH)
}

/// Mode-sum field `p(x, z) = sum_j a_j phi_j(z) exp(-i beta_j x)` at every
/// quadrature node of `geometry`.
pub fn sample_field_with(
    ms: &ModeSet,
    amps: &ModeAmplitudes,
    geometry: &ArrayGeometry,
    nodes_per_wavelength: usize,
) -> Result<FieldSamples> {
    if amps.len() != ms.mode_count() {
        return Err(Error::LengthMismatch {
            expected: ms.mode_count(),
            actual: amps.len(),
        });
    }
    geometry.validate(ms)?;
    let points = geometry.sample_points(ms.wavelength(), nodes_per_wavelength);
    let traces = mode_traces(ms, points.iter().map(|p| (p.x, p.z)));
    Ok(FieldSamples {
        geometry: geometry.clone(),
        points,
        values: traces * amps.vector(),
    })
}

/// Adds i.i.d. circular complex Gaussian noise of variance
/// `(sigma_rel * max|p|)^2` per sample. Deterministic for a fixed seed; a
/// zero level returns the input unchanged.
pub fn add_noise(fs: &FieldSamples, nm: &NoiseModel) -> FieldSamples {
    let sigma_meas = nm.sigma_meas(fs);
    let mut rng = ChaCha8Rng::seed_from_u64(nm.seed);
    add_noise_abs(fs, sigma_meas, &mut rng)
}

/// Adds circular complex Gaussian noise with absolute standard deviation
/// `sigma_meas` (so `E|w|^2 = sigma_meas^2`), drawing from `rng`.
pub fn add_noise_abs<R: Rng + ?Sized>(fs: &FieldSamples, sigma_meas: f64, rng: &mut R) -> FieldSamples {
    let mut out = fs.clone();
    if sigma_meas == 0.0 {
        return out;
    }
    let normal =
        Normal::new(0.0, sigma_meas / std::f64::consts::SQRT_2).expect("finite nonnegative standard deviation");
    for v in out.values.iter_mut() {
        *v += C64::new(normal.sample(rng), normal.sample(rng));
    }
    out
}
