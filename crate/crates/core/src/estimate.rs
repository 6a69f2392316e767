//! Coupling and sensing operators, regularized mode-amplitude estimation,
//! and the analytic bias/variance decomposition of the estimator.
//!
//! Two equivalent routes are provided. The coupling route works for any
//! array measure: build the Gram matrix `A` of the mode traces, project the
//! data onto the reduced profiles and invert the spectrum of `A`. The
//! sensing route applies only to discrete arrays and inverts the singular
//! values of the `M x N` trace matrix `B` directly, with `A = B^† B / M`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, Interval, Point, DEFAULT_NODES_PER_WAVELENGTH};
use crate::linalg::{HermitianEigen, ThinSvd, C64};
use crate::modes::{ModeSet, WaveguideModel};
use crate::synth::{mode_traces, FieldSamples, ModeAmplitudes};

/// Relative spectral floor below which an operator counts as singular.
pub const SINGULAR_CUTOFF: f64 = 1e-14;

/// Number of points of the log-spaced grid scanned by [`optimal_epsilon`].
pub const EPSILON_SCAN_POINTS: usize = 200;

/// Spectral filter `psi_eps` replacing exact inversion `1/d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regularizer {
    /// Exact inversion; refuses singular spectra.
    None,
    /// `1/d` on the nonzero part of the spectrum, `0` below
    /// [`SINGULAR_CUTOFF`] relative to the largest value.
    MoorePenrose,
    /// `d / (d^2 + eps^2)`.
    Tikhonov(f64),
    /// `1/d` for `d > eps`, `0` otherwise.
    HardThreshold(f64),
}

impl Regularizer {
    /// `psi_eps(d)`; `d_max` is the largest spectral value of the operator.
    pub fn filter(&self, d: f64, d_max: f64) -> f64 {
        match *self {
            Regularizer::None => 1.0 / d,
            Regularizer::MoorePenrose => {
                if d > SINGULAR_CUTOFF * d_max {
                    1.0 / d
                } else {
                    0.0
                }
            }
            Regularizer::Tikhonov(eps) => {
                if d == 0.0 {
                    0.0
                } else {
                    d / (d * d + eps * eps)
                }
            }
            Regularizer::HardThreshold(eps) => {
                if d > eps {
                    1.0 / d
                } else {
                    0.0
                }
            }
        }
    }

    /// Residual factor `1 - d psi_eps(d)` of the bias.
    pub fn residual(&self, d: f64, d_max: f64) -> f64 {
        1.0 - d * self.filter(d, d_max)
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Regularizer::Tikhonov(eps) | Regularizer::HardThreshold(eps) if !(eps >= 0.0 && eps.is_finite()) => Err(
                Error::InvalidParameter(format!("regularization parameter must be nonnegative, got {eps}")),
            ),
            _ => Ok(()),
        }
    }
}

/// An operator with a descending nonnegative spectrum, right vectors `V`,
/// and a known propagation of white measurement noise to the estimate.
pub trait SpectralOperator {
    /// Descending spectrum (eigenvalues of `A` or singular values of `B`).
    fn spectrum(&self) -> &[f64];

    /// Unitary `N x N` matrix whose columns pair with [`Self::spectrum`].
    fn right_vectors(&self) -> &DMatrix<C64>;

    /// Variance contributed by spectral component `d` with filter value
    /// `psi`, per unit measurement variance.
    fn noise_gain(&self, d: f64, psi: f64) -> f64;

    /// Tikhonov parameter balancing bias and noise for amplitudes `a_o` and
    /// measurement noise level `sigma`.
    fn heuristic_epsilon(&self, a_o: &ModeAmplitudes, sigma: f64) -> f64 {
        sigma * (self.spectrum().len() as f64).sqrt() / a_o.norm()
    }

    fn max_value(&self) -> f64 {
        self.spectrum().first().copied().unwrap_or(0.0)
    }

    fn check_invertible(&self, reg: &Regularizer) -> Result<()> {
        reg.validate()?;
        if *reg == Regularizer::None {
            let spec = self.spectrum();
            let max = self.max_value();
            let min = spec.last().copied().unwrap_or(0.0);
            if max <= 0.0 || min < SINGULAR_CUTOFF * max {
                return Err(Error::SingularUnregularized {
                    ratio: if max > 0.0 { min / max } else { 0.0 },
                });
            }
        }
        Ok(())
    }
}

/// Hermitian positive semi-definite Gram matrix
/// `A_jl = int phi_j phi_l exp(i (beta_j - beta_l) x) dmu` with its
/// eigendecomposition.
#[derive(Debug, Clone)]
pub struct CouplingMatrix {
    matrix: DMatrix<C64>,
    eigen: HermitianEigen,
    geometry: ArrayGeometry,
}

impl CouplingMatrix {
    fn from_matrix(matrix: DMatrix<C64>, geometry: ArrayGeometry) -> Self {
        let eigen = HermitianEigen::new(&matrix);
        Self {
            matrix,
            eigen,
            geometry,
        }
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigen.values
    }

    pub fn eigenvectors(&self) -> &DMatrix<C64> {
        &self.eigen.vectors
    }

    pub fn geometry(&self) -> &ArrayGeometry {
        &self.geometry
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

impl SpectralOperator for CouplingMatrix {
    fn spectrum(&self) -> &[f64] {
        &self.eigen.values
    }

    fn right_vectors(&self) -> &DMatrix<C64> {
        &self.eigen.vectors
    }

    fn noise_gain(&self, d: f64, psi: f64) -> f64 {
        d * psi * psi
    }

    /// The spectrum of `A` is quadratic in that of the traces, so the
    /// sensing-form parameter enters squared: `sigma^2 N / ||a_o||^2`.
    fn heuristic_epsilon(&self, a_o: &ModeAmplitudes, sigma: f64) -> f64 {
        sigma * sigma * self.spectrum().len() as f64 / a_o.norm_squared()
    }
}

/// Discrete-array trace matrix `B_kj = phi_j(z_k) exp(-i beta_j x_k)` with
/// its thin SVD.
#[derive(Debug, Clone)]
pub struct SensingMatrix {
    matrix: DMatrix<C64>,
    svd: ThinSvd,
    geometry: ArrayGeometry,
}

impl SensingMatrix {
    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.svd.singular
    }

    pub fn svd(&self) -> &ThinSvd {
        &self.svd
    }

    pub fn geometry(&self) -> &ArrayGeometry {
        &self.geometry
    }

    pub fn receivers(&self) -> usize {
        self.matrix.nrows()
    }

    /// `cond(B)`; infinite when the smallest singular value vanishes.
    pub fn condition_number(&self) -> f64 {
        let s = &self.svd.singular;
        s[0] / s[s.len() - 1]
    }

    /// `V psi(D) U^† p` for a raw data vector.
    pub fn apply_inverse(&self, p: &DVector<C64>, reg: &Regularizer) -> Result<DVector<C64>> {
        if p.len() != self.receivers() {
            return Err(Error::LengthMismatch {
                expected: self.receivers(),
                actual: p.len(),
            });
        }
        self.check_invertible(reg)?;
        let d_max = self.max_value();
        let mut coeffs = self.svd.u.adjoint() * p;
        for (c, &d) in coeffs.iter_mut().zip(&self.svd.singular) {
            *c *= reg.filter(d, d_max);
        }
        Ok(&self.svd.v * coeffs)
    }
}

impl SpectralOperator for SensingMatrix {
    fn spectrum(&self) -> &[f64] {
        &self.svd.singular
    }

    fn right_vectors(&self) -> &DMatrix<C64> {
        &self.svd.v
    }

    fn noise_gain(&self, _d: f64, psi: f64) -> f64 {
        psi * psi
    }
}

/// Builds the sensing matrix of a discrete array; needs at least as many
/// receivers as guided modes.
pub fn sensing_matrix(ms: &ModeSet, points: &[Point]) -> Result<SensingMatrix> {
    if points.len() < ms.mode_count() {
        return Err(Error::TooFewReceivers {
            receivers: points.len(),
            modes: ms.mode_count(),
        });
    }
    let geometry = ArrayGeometry::discrete(points.to_vec());
    geometry.validate(ms)?;
    let matrix = mode_traces(ms, points.iter().map(|p| (p.x, p.z)));
    let svd = ThinSvd::new(&matrix);
    Ok(SensingMatrix { matrix, svd, geometry })
}

/// Builds the coupling matrix of `geometry`: `B^† B / M` for discrete
/// arrays, closed forms for dense apertures in homogeneous channels and for
/// horizontal apertures in any channel, adaptive quadrature otherwise.
pub fn coupling_matrix(ms: &ModeSet, geometry: &ArrayGeometry) -> Result<CouplingMatrix> {
    geometry.validate(ms)?;
    let matrix = match geometry {
        ArrayGeometry::Discrete { points } => {
            let b = mode_traces(ms, points.iter().map(|p| (p.x, p.z)));
            (b.adjoint() * &b).unscale(points.len() as f64)
        }
        ArrayGeometry::DenseVertical { intervals } if ms.spec().is_homogeneous() => vertical_closed_form(ms, intervals),
        ArrayGeometry::DenseHorizontal { depth, intervals } => horizontal_closed_form(ms, *depth, intervals),
        ArrayGeometry::DensePlanar { depth, half_width } => {
            let transverse = if ms.spec().is_homogeneous() {
                vertical_closed_form(ms, &[Interval::new(*depth, *half_width)])
            } else {
                coupling_by_quadrature(ms, &ArrayGeometry::vertical(*depth, *half_width))?
            };
            let beta = ms.beta();
            DMatrix::from_fn(ms.mode_count(), ms.mode_count(), |j, l| {
                transverse[(j, l)] * sinc((beta[j] - beta[l]) * half_width)
            })
        }
        ArrayGeometry::DenseVertical { .. } => coupling_by_quadrature(ms, geometry)?,
    };
    Ok(CouplingMatrix::from_matrix(matrix, geometry.clone()))
}

/// `sin(x)/x` with the removable singularity filled.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Toeplitz-minus-Hankel (Dirichlet) or Toeplitz-plus-Hankel (Neumann
/// bottom) Gram matrix of a vertical aperture made of disjoint intervals.
fn vertical_closed_form(ms: &ModeSet, intervals: &[Interval]) -> DMatrix<C64> {
    let l = ms.spec().length_scale;
    let total: f64 = intervals.iter().map(|i| i.half_length).sum();
    let sign = match ms.spec().model {
        WaveguideModel::HomogeneousDN => 1.0,
        _ => -1.0,
    };
    let alpha = ms.alpha();
    DMatrix::from_fn(ms.mode_count(), ms.mode_count(), |j, m| {
        let d = alpha[j] - alpha[m];
        let s = alpha[j] + alpha[m];
        let v: f64 = intervals
            .iter()
            .map(|i| {
                let (b, a) = (i.center, i.half_length);
                a * ((d * b).cos() * sinc(d * a) + sign * (s * b).cos() * sinc(s * a))
            })
            .sum();
        C64::new(v / (l * total), 0.0)
    })
}

fn horizontal_closed_form(ms: &ModeSet, depth: f64, intervals: &[Interval]) -> DMatrix<C64> {
    let total: f64 = intervals.iter().map(|i| i.half_length).sum();
    let phi = ms.profiles_at(depth);
    let beta = ms.beta();
    DMatrix::from_fn(ms.mode_count(), ms.mode_count(), |j, m| {
        let d = beta[j] - beta[m];
        let kernel: C64 = intervals
            .iter()
            .map(|i| C64::from_polar(i.half_length * sinc(d * i.half_length), d * i.center))
            .sum();
        kernel * (phi[j] * phi[m] / total)
    })
}

/// Weighted Gram matrix `sum_k w_k conj(B_kj) B_kl` of sampled traces.
fn weighted_gram(ms: &ModeSet, geometry: &ArrayGeometry, nodes_per_wavelength: usize) -> DMatrix<C64> {
    let pts = geometry.sample_points(ms.wavelength(), nodes_per_wavelength);
    let mut b = mode_traces(ms, pts.iter().map(|p| (p.x, p.z)));
    for (k, p) in pts.iter().enumerate() {
        b.row_mut(k).scale_mut(p.weight.sqrt());
    }
    b.adjoint() * b
}

/// Doubles the quadrature density until successive Gram matrices agree to
/// `1e-12` relative.
fn coupling_by_quadrature(ms: &ModeSet, geometry: &ArrayGeometry) -> Result<DMatrix<C64>> {
    const TOL: f64 = 1e-12;
    const MAX_DOUBLINGS: u32 = 8;
    let mut density = DEFAULT_NODES_PER_WAVELENGTH;
    let mut prev = weighted_gram(ms, geometry, density);
    let mut change = f64::INFINITY;
    for _ in 0..MAX_DOUBLINGS {
        density *= 2;
        let next = weighted_gram(ms, geometry, density);
        change = (&next - &prev).norm() / next.norm().max(f64::MIN_POSITIVE);
        if change <= TOL {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::QuadratureNotConverged {
        change,
        panels: density,
    })
}

/// Projections `b_l = int p conj(psi_l) dmu` of the data onto the reduced
/// profiles `psi_l = sum_j (V_A)_jl phi_j(z) exp(-i beta_j x)`.
pub fn project_reduced(fs: &FieldSamples, cm: &CouplingMatrix, ms: &ModeSet) -> Result<DVector<C64>> {
    if fs.geometry != cm.geometry {
        return Err(Error::GeometryMismatch);
    }
    if cm.dim() != ms.mode_count() {
        return Err(Error::LengthMismatch {
            expected: ms.mode_count(),
            actual: cm.dim(),
        });
    }
    Ok(cm.eigenvectors().adjoint() * mode_projections(fs, ms))
}

/// Plain mode projections `c_j = int p phi_j exp(i beta_j x) dmu`, so that
/// `c = A a` for mode-sum data with amplitudes `a`.
pub fn mode_projections(fs: &FieldSamples, ms: &ModeSet) -> DVector<C64> {
    let traces = mode_traces(ms, fs.points.iter().map(|p| (p.x, p.z)));
    let weighted = DVector::from_iterator(fs.len(), fs.values.iter().zip(&fs.points).map(|(v, p)| v * p.weight));
    traces.adjoint() * weighted
}

/// `a_eps = V_A psi_eps(D_A) b`.
pub fn estimate_amplitudes(b: &DVector<C64>, cm: &CouplingMatrix, reg: &Regularizer) -> Result<ModeAmplitudes> {
    if b.len() != cm.dim() {
        return Err(Error::LengthMismatch {
            expected: cm.dim(),
            actual: b.len(),
        });
    }
    cm.check_invertible(reg)?;
    let d_max = cm.max_value();
    let filtered = DVector::from_iterator(
        b.len(),
        b.iter().zip(cm.eigenvalues()).map(|(v, &d)| v * reg.filter(d, d_max)),
    );
    Ok(ModeAmplitudes(cm.eigenvectors() * filtered))
}

/// `a_eps = V psi_eps(D) U^† p_meas` for data recorded on the sensing
/// matrix's own array.
pub fn svd_estimate(p_meas: &FieldSamples, sm: &SensingMatrix, reg: &Regularizer) -> Result<ModeAmplitudes> {
    if p_meas.geometry != sm.geometry {
        return Err(Error::GeometryMismatch);
    }
    sm.apply_inverse(&p_meas.values, reg).map(ModeAmplitudes)
}

/// Analytic error decomposition of a regularized estimator.
#[derive(Debug, Clone)]
pub struct EstimationReport {
    /// Noise-free expectation `E[a_eps] = a_o - V R V^† a_o`.
    pub a_est: ModeAmplitudes,
    pub bias_sq: f64,
    pub variance: f64,
    pub mse: f64,
    pub spectrum: Vec<f64>,
}

/// `E ||a_eps - a_o||^2 = bias^2 + variance` with
/// `bias^2 = sum_j (1 - d_j psi(d_j))^2 |(V^† a_o)_j|^2` and
/// `variance = sigma^2 sum_j gain(d_j, psi(d_j))`, where the gain is
/// `d psi^2` for a coupling matrix and `psi^2` for a sensing matrix.
pub fn mse_decomposition<O: SpectralOperator + ?Sized>(
    op: &O,
    a_o: &ModeAmplitudes,
    sigma: f64,
    reg: &Regularizer,
) -> EstimationReport {
    let v = op.right_vectors();
    let d_max = op.max_value();
    let coords = v.adjoint() * a_o.vector();
    let mut bias_sq = 0.0;
    let mut variance = 0.0;
    let mut shrunk = coords.clone();
    for (j, &d) in op.spectrum().iter().enumerate() {
        let psi = reg.filter(d, d_max);
        let r = 1.0 - d * psi;
        bias_sq += r * r * coords[j].norm_sqr();
        variance += sigma * sigma * op.noise_gain(d, psi);
        shrunk[j] *= d * psi;
    }
    EstimationReport {
        a_est: ModeAmplitudes(v * shrunk),
        bias_sq,
        variance,
        mse: bias_sq + variance,
        spectrum: op.spectrum().to_vec(),
    }
}

/// Regularization parameters for a Tikhonov estimator.
#[derive(Debug, Clone)]
pub struct EpsilonChoice {
    /// [`SpectralOperator::heuristic_epsilon`]; `sigma_meas sqrt(N) / ||a_o||`
    /// for a sensing matrix.
    pub heuristic: f64,
    /// Minimizer of the analytic MSE over the scan grid.
    pub scanned: f64,
    pub scanned_mse: f64,
    /// `(eps, mse)` over the scan grid.
    pub curve: Vec<(f64, f64)>,
}

/// Closed-form heuristic together with the minimizer of the analytic
/// Tikhonov MSE over [`EPSILON_SCAN_POINTS`] log-spaced values spanning
/// `[1e-12 d_max, 1e6 d_max]`.
pub fn optimal_epsilon<O: SpectralOperator + ?Sized>(
    op: &O,
    a_o: &ModeAmplitudes,
    sigma_meas: f64,
) -> Result<EpsilonChoice> {
    if !(sigma_meas > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "noise level must be positive, got {sigma_meas}"
        )));
    }
    let d_max = op.max_value();
    let heuristic = op.heuristic_epsilon(a_o, sigma_meas);
    let (lo, hi) = ((1e-12 * d_max).ln(), (1e6 * d_max).ln());
    let curve: Vec<(f64, f64)> = (0..EPSILON_SCAN_POINTS)
        .map(|i| {
            let eps = (lo + (hi - lo) * i as f64 / (EPSILON_SCAN_POINTS - 1) as f64).exp();
            (
                eps,
                mse_decomposition(op, a_o, sigma_meas, &Regularizer::Tikhonov(eps)).mse,
            )
        })
        .collect();
    let &(scanned, scanned_mse) = curve
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nonempty scan grid");
    Ok(EpsilonChoice {
        heuristic,
        scanned,
        scanned_mse,
        curve,
    })
}
