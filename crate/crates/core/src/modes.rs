//! Waveguide models and their guided-mode bases.
//!
//! Only models with closed-form modes are supported: a homogeneous channel
//! of depth `L` with Dirichlet/Dirichlet or Neumann(bottom)/Dirichlet(surface)
//! walls, and the unbounded parabolic channel with
//! `1/c^2(z) = (1/c_o^2)(1 - z^2/L^2)`.
//!
//! Modes are stored as a dense 0-based list. [`ModeSet::first_index`] records
//! the conventional index of entry 0 (1 for homogeneous channels, 0 for the
//! parabolic one).

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveguideModel {
    /// Constant speed, Dirichlet at both walls.
    #[serde(rename = "homogeneous_dd")]
    HomogeneousDD,
    /// Constant speed, Neumann at the bottom `z = 0`, Dirichlet at `z = L`.
    #[serde(rename = "homogeneous_dn")]
    HomogeneousDN,
    /// Parabolic speed profile on the whole line.
    Parabolic,
}

/// Waveguide model with its length scale `L` (depth, or profile scale for
/// the parabolic model) and reference speed `c_o`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveguideSpec {
    pub model: WaveguideModel,
    pub length_scale: f64,
    pub sound_speed: f64,
}

impl WaveguideSpec {
    pub fn new(model: WaveguideModel, length_scale: f64, sound_speed: f64) -> Result<Self> {
        if !(length_scale > 0.0 && length_scale.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "waveguide length scale must be positive, got {length_scale}"
            )));
        }
        if !(sound_speed > 0.0 && sound_speed.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sound speed must be positive, got {sound_speed}"
            )));
        }
        Ok(Self {
            model,
            length_scale,
            sound_speed,
        })
    }

    pub fn homogeneous_dd(depth: f64, sound_speed: f64) -> Result<Self> {
        Self::new(WaveguideModel::HomogeneousDD, depth, sound_speed)
    }

    pub fn homogeneous_dn(depth: f64, sound_speed: f64) -> Result<Self> {
        Self::new(WaveguideModel::HomogeneousDN, depth, sound_speed)
    }

    pub fn parabolic(scale: f64, sound_speed: f64) -> Result<Self> {
        Self::new(WaveguideModel::Parabolic, scale, sound_speed)
    }

    /// `omega^2 / c^2(z)`.
    pub fn wavenumber_sq(&self, omega: f64, z: f64) -> f64 {
        let k2 = (omega / self.sound_speed).powi(2);
        match self.model {
            WaveguideModel::HomogeneousDD | WaveguideModel::HomogeneousDN => k2,
            WaveguideModel::Parabolic => k2 * (1.0 - (z / self.length_scale).powi(2)),
        }
    }

    /// Transverse domain; infinite bounds for the parabolic model.
    pub fn transverse_domain(&self) -> (f64, f64) {
        match self.model {
            WaveguideModel::HomogeneousDD | WaveguideModel::HomogeneousDN => (0.0, self.length_scale),
            WaveguideModel::Parabolic => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        !matches!(self.model, WaveguideModel::Parabolic)
    }
}

/// Guided modes of a waveguide at one frequency. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet {
    spec: WaveguideSpec,
    omega: f64,
    k_o: f64,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    first_index: usize,
}

/// Computes the guided-mode basis of `spec` at angular frequency `omega`.
pub fn solve_modes(spec: &WaveguideSpec, omega: f64) -> Result<ModeSet> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidParameter(format!("omega must be positive, got {omega}")));
    }
    let k_o = omega / spec.sound_speed;
    let l = spec.length_scale;
    let (alpha, first_index): (Vec<f64>, usize) = match spec.model {
        WaveguideModel::HomogeneousDD => ((1..).map(|j| PI * j as f64 / l).take_while(|&a| a < k_o).collect(), 1),
        WaveguideModel::HomogeneousDN => (
            (1..)
                .map(|j| PI * (j as f64 - 0.5) / l)
                .take_while(|&a| a < k_o)
                .collect(),
            1,
        ),
        WaveguideModel::Parabolic => (
            (0..)
                .map(|j| ((2 * j + 1) as f64 * k_o / l).sqrt())
                .take_while(|&a| a < k_o)
                .collect(),
            0,
        ),
    };
    if alpha.is_empty() {
        return Err(Error::NoGuidedModes { omega });
    }
    let beta = alpha.iter().map(|a| (k_o * k_o - a * a).sqrt()).collect();
    Ok(ModeSet {
        spec: *spec,
        omega,
        k_o,
        alpha,
        beta,
        first_index,
    })
}

impl ModeSet {
    pub fn spec(&self) -> &WaveguideSpec {
        &self.spec
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Homogeneous wavenumber `omega / c_o`.
    pub fn k_o(&self) -> f64 {
        self.k_o
    }

    /// Wavelength `2 pi / k_o`.
    pub fn wavelength(&self) -> f64 {
        2.0 * PI / self.k_o
    }

    pub fn mode_count(&self) -> usize {
        self.beta.len()
    }

    /// Conventional index of dense entry 0.
    pub fn first_index(&self) -> usize {
        self.first_index
    }

    /// Largest conventional mode index (the usual `N`).
    pub fn index_bound(&self) -> usize {
        self.first_index + self.mode_count() - 1
    }

    /// Transverse wavenumbers; `alpha_j^2 + beta_j^2 = k_o^2` for every model.
    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// Axial modal wavenumbers, strictly positive and decreasing.
    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    /// Eigenvalues `lambda_j = beta_j^2`.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.beta.iter().map(|b| b * b).collect()
    }

    /// Checked evaluation of the `q`-th derivative of mode `j` at depth `z`.
    pub fn eval_mode(&self, j: usize, z: f64, q: u32) -> Result<f64> {
        if j >= self.mode_count() {
            return Err(Error::ModeIndex {
                index: j,
                count: self.mode_count(),
            });
        }
        Ok(self.profile(j, z, q))
    }

    /// `q`-th derivative of mode `j` at depth `z`. Panics if `j` is out of range.
    pub fn profile(&self, j: usize, z: f64, q: u32) -> f64 {
        let alpha = self.alpha[j];
        let l = self.spec.length_scale;
        match self.spec.model {
            WaveguideModel::HomogeneousDD => {
                (2.0 / l).sqrt() * alpha.powi(q as i32) * (alpha * z + q as f64 * FRAC_PI_2).sin()
            }
            WaveguideModel::HomogeneousDN => {
                (2.0 / l).sqrt() * alpha.powi(q as i32) * (alpha * z + q as f64 * FRAC_PI_2).cos()
            }
            WaveguideModel::Parabolic => {
                let gamma = (self.k_o / l).sqrt();
                gamma.sqrt() * gamma.powi(q as i32) * hermite_function_derivative(j, q, gamma * z)
            }
        }
    }

    /// All profiles at depth `z`.
    pub fn profiles_at(&self, z: f64) -> Vec<f64> {
        (0..self.mode_count()).map(|j| self.profile(j, z, 0)).collect()
    }

    /// Finite interval carrying the modal energy, used for transverse
    /// quadrature. For the parabolic model it extends well past the
    /// turning point of the highest mode, where all profiles fall below
    /// machine precision.
    pub fn quadrature_interval(&self) -> (f64, f64) {
        match self.spec.model {
            WaveguideModel::HomogeneousDD | WaveguideModel::HomogeneousDN => (0.0, self.spec.length_scale),
            WaveguideModel::Parabolic => {
                let gamma = (self.k_o / self.spec.length_scale).sqrt();
                let turning = ((2 * self.mode_count() + 1) as f64).sqrt();
                let s_max = turning + 9.0;
                (-s_max / gamma, s_max / gamma)
            }
        }
    }

    /// Gram matrix of the profiles under composite Gauss-Legendre quadrature
    /// over [`Self::quadrature_interval`].
    pub fn gram_matrix(&self, panels: usize) -> Vec<Vec<f64>> {
        let (lo, hi) = self.quadrature_interval();
        let gl = GaussLegendre::new(16);
        let n = self.mode_count();
        let mut g = vec![vec![0.0; n]; n];
        for (z, w) in gl.composite(lo, hi, panels) {
            let p = self.profiles_at(z);
            for j in 0..n {
                for l in 0..n {
                    g[j][l] += w * p[j] * p[l];
                }
            }
        }
        g
    }
}

/// Normalized Hermite functions `f_0..=f_n` at `s` via the three-term
/// recurrence (no factorials).
fn hermite_functions(n: usize, s: f64) -> Vec<f64> {
    let mut f = Vec::with_capacity(n + 1);
    f.push(PI.powf(-0.25) * (-0.5 * s * s).exp());
    if n >= 1 {
        f.push(2f64.sqrt() * s * f[0]);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * s * f[k] - (kf / (kf + 1.0)).sqrt() * f[k - 1];
        f.push(next);
    }
    f
}

/// `q`-th derivative of `f_j` at `s`, using the ladder relation
/// `f_k' = sqrt(k/2) f_{k-1} - sqrt((k+1)/2) f_{k+1}`.
fn hermite_function_derivative(j: usize, q: u32, s: f64) -> f64 {
    let top = j + q as usize;
    let mut coeffs = vec![0.0; top + 2];
    coeffs[j] = 1.0;
    for _ in 0..q {
        let mut next = vec![0.0; top + 2];
        for (k, &c) in coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            if k > 0 {
                next[k - 1] += c * (k as f64 / 2.0).sqrt();
            }
            if k + 1 < next.len() {
                next[k + 1] -= c * ((k + 1) as f64 / 2.0).sqrt();
            }
        }
        coeffs = next;
    }
    let f = hermite_functions(top, s);
    coeffs.iter().zip(&f).map(|(c, v)| c * v).sum()
}
