//! Declarative experiments: a TOML configuration describing the channel,
//! source, array, noise levels and estimator, and runners that write CSV
//! (and optionally PNG) artifacts.
//!
//! ```toml
//! [waveguide]
//! model = "homogeneous_dd"
//! length_scale = 20.0
//! omega = 1.0
//!
//! [source]
//! x = 100.0
//! z = 7.7
//!
//! [array]
//! kind = "vertical"
//! receivers = 20
//! depth = 11.0
//! size = 0.25
//!
//! [noise]
//! sigmas = [1e-8, 1e-7, 1e-6]
//! trials = 200
//! seed = 0
//! ```

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::estimate::{
    coupling_matrix, estimate_amplitudes, optimal_epsilon, project_reduced, sensing_matrix, CouplingMatrix,
    Regularizer, SensingMatrix, SpectralOperator,
};
use crate::geometry::{lhs_design, ArrayGeometry, Interval, Point, PointSource};
use crate::image::{localization_success, locate_peak, migrate, ImageMap, Peak, SearchGrid};
use crate::io::{self, Provenance};
use crate::linalg::ThinSvd;
use crate::modes::{solve_modes, ModeSet, WaveguideModel, WaveguideSpec};
use crate::rank::{dense_rank_prediction, effective_rank, DenseKind, RankMode, SpectrumReport};
use crate::synth::{add_noise_abs, mode_traces, sample_field, source_amplitudes, FieldSamples, ModeAmplitudes};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveguideSection {
    pub model: WaveguideModel,
    pub length_scale: f64,
    #[serde(default = "one")]
    pub sound_speed: f64,
    pub omega: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArrayKind {
    /// `M` receivers on a vertical segment of length `size`.
    Vertical,
    /// `M` receivers on a horizontal segment of length `size`.
    Horizontal,
    /// `M` receivers in a Latin hypercube design on a square of side `size`.
    Planar,
    /// Explicit receiver positions.
    Points,
    /// Continuous vertical aperture of length `size`, or `intervals`.
    DenseVertical,
    /// Continuous horizontal aperture of length `size`, or `intervals`.
    DenseHorizontal,
    /// Continuous square aperture of side `size`.
    DensePlanar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArraySection {
    pub kind: ArrayKind,
    #[serde(default = "default_receivers")]
    pub receivers: usize,
    /// Depth `z_a` of the array centre.
    pub depth: f64,
    /// Range of the array centre.
    #[serde(default)]
    pub center_x: f64,
    /// Total extent (segment length or square side).
    #[serde(default = "default_size")]
    pub size: f64,
    /// Seed of the Latin hypercube design.
    #[serde(default)]
    pub seed: u64,
    /// `[x, z]` pairs for `kind = "points"`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<[f64; 2]>,
    /// `[center, half_length]` pairs overriding `size` for dense apertures.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub intervals: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    /// Relative noise levels; the absolute level is `sigma * max|p|`.
    #[serde(default = "default_sigmas")]
    pub sigmas: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
}

impl Default for NoiseSection {
    fn default() -> Self {
        Self {
            sigmas: default_sigmas(),
            trials: default_trials(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegularizerKind {
    None,
    MoorePenrose,
    Tikhonov,
    HardThreshold,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsilonPolicy {
    /// Balance of noise level and amplitude norm.
    Heuristic,
    /// `estimate.epsilon` as given.
    Explicit,
    /// Minimizer of the analytic error over a log-spaced scan.
    Scan,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateSection {
    #[serde(default = "default_regularizer")]
    pub regularizer: RegularizerKind,
    #[serde(default = "default_policy")]
    pub epsilon_policy: EpsilonPolicy,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

impl Default for EstimateSection {
    fn default() -> Self {
        Self {
            regularizer: default_regularizer(),
            epsilon_policy: default_policy(),
            epsilon: None,
        }
    }
}

/// Search region; unset fields fall back to `x` in `[50, 150]`, the whole
/// transverse domain, and a step of a twentieth of a wavelength.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RankSection {
    /// Absolute spectral threshold; the half-plateau rule when unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    /// Ratios `a / L` (half-length over depth) of the rank scan.
    #[serde(default = "default_ratios")]
    pub ratios: Vec<f64>,
    /// Depth of the horizontal apertures of the scan; the array depth when
    /// unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizontal_depth: Option<f64>,
}

impl Default for RankSection {
    fn default() -> Self {
        Self {
            threshold: None,
            ratios: default_ratios(),
            horizontal_depth: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub waveguide: WaveguideSection,
    pub source: PointSource,
    pub array: ArraySection,
    #[serde(default)]
    pub noise: NoiseSection,
    #[serde(default)]
    pub estimate: EstimateSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub rank: RankSection,
}

fn one() -> f64 {
    1.0
}
fn default_receivers() -> usize {
    20
}
fn default_size() -> f64 {
    0.25
}
fn default_sigmas() -> Vec<f64> {
    vec![0.0]
}
fn default_trials() -> usize {
    200
}
fn default_regularizer() -> RegularizerKind {
    RegularizerKind::Tikhonov
}
fn default_policy() -> EpsilonPolicy {
    EpsilonPolicy::Heuristic
}
fn default_ratios() -> Vec<f64> {
    (1..=10).map(|k| 0.05 * k as f64).collect()
}

fn config_err(e: impl std::fmt::Display) -> Error {
    Error::Config(e.to_string())
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(config_err)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// SHA-256 of the canonical TOML form, in hex.
    pub fn hash(&self) -> String {
        Sha256::digest(self.to_toml().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn provenance(&self) -> Provenance {
        Provenance::new(self.hash(), self.noise.seed)
    }

    /// Checks every referenced sub-configuration; failures are
    /// [`Error::Config`].
    pub fn validate(&self) -> Result<()> {
        let ms = self.mode_set().map_err(config_err)?;
        let geometry = self.geometry().map_err(config_err)?;
        geometry.validate(&ms).map_err(config_err)?;
        self.source.validate(&ms, &geometry).map_err(config_err)?;
        if self.noise.trials == 0 {
            return Err(Error::Config("noise.trials must be at least 1".into()));
        }
        if self.noise.sigmas.is_empty() || self.noise.sigmas.iter().any(|s| !(*s >= 0.0 && s.is_finite())) {
            return Err(Error::Config(
                "noise.sigmas must be a nonempty list of nonnegative levels".into(),
            ));
        }
        if self.estimate.epsilon_policy == EpsilonPolicy::Explicit && self.estimate.epsilon.is_none() {
            return Err(Error::Config(
                "estimate.epsilon is required by the explicit policy".into(),
            ));
        }
        if let Some(eps) = self.estimate.epsilon {
            if !(eps >= 0.0) {
                return Err(Error::Config("estimate.epsilon must be nonnegative".into()));
            }
        }
        if self.rank.ratios.iter().any(|r| !(*r > 0.0 && *r <= 0.5)) {
            return Err(Error::Config("rank.ratios must lie in (0, 0.5]".into()));
        }
        self.grid(&ms)
            .map_err(config_err)?
            .validate(&geometry)
            .map_err(config_err)?;
        Ok(())
    }

    pub fn waveguide_spec(&self) -> Result<WaveguideSpec> {
        let w = &self.waveguide;
        WaveguideSpec::new(w.model, w.length_scale, w.sound_speed)
    }

    pub fn mode_set(&self) -> Result<ModeSet> {
        solve_modes(&self.waveguide_spec()?, self.waveguide.omega)
    }

    pub fn geometry(&self) -> Result<ArrayGeometry> {
        let a = &self.array;
        if !(a.size > 0.0) {
            return Err(Error::InvalidParameter("array.size must be positive".into()));
        }
        let half = 0.5 * a.size;
        let m = a.receivers;
        let needs_receivers = matches!(a.kind, ArrayKind::Vertical | ArrayKind::Horizontal | ArrayKind::Planar);
        if needs_receivers && m == 0 {
            return Err(Error::InvalidParameter("array.receivers must be positive".into()));
        }
        let offsets = || (1..=m).map(move |k| a.size * (k as f64 - m as f64 / 2.0) / m as f64);
        let intervals = |center: f64| {
            if a.intervals.is_empty() {
                vec![Interval::new(center, half)]
            } else {
                a.intervals.iter().map(|&[c, h]| Interval::new(c, h)).collect()
            }
        };
        Ok(match a.kind {
            ArrayKind::Vertical => {
                ArrayGeometry::discrete(offsets().map(|dz| Point::new(a.center_x, a.depth + dz)).collect())
            }
            ArrayKind::Horizontal => {
                ArrayGeometry::discrete(offsets().map(|dx| Point::new(a.center_x + dx, a.depth)).collect())
            }
            ArrayKind::Planar => ArrayGeometry::discrete(lhs_design(m, Point::new(a.center_x, a.depth), half, a.seed)),
            ArrayKind::Points => ArrayGeometry::discrete(a.points.iter().map(|&[x, z]| Point::new(x, z)).collect()),
            ArrayKind::DenseVertical => ArrayGeometry::DenseVertical {
                intervals: intervals(a.depth),
            },
            ArrayKind::DenseHorizontal => ArrayGeometry::DenseHorizontal {
                depth: a.depth,
                intervals: intervals(a.center_x),
            },
            ArrayKind::DensePlanar => ArrayGeometry::planar(a.depth, half),
        })
    }

    pub fn grid(&self, ms: &ModeSet) -> Result<SearchGrid> {
        let d = SearchGrid::default_for(ms);
        let g = &self.grid;
        let step = g.step.unwrap_or(d.dx);
        SearchGrid::new(
            (g.x_min.unwrap_or(d.x_min), g.x_max.unwrap_or(d.x_max)),
            (g.z_min.unwrap_or(d.z_min), g.z_max.unwrap_or(d.z_max)),
            step,
            step,
        )
    }

    fn rank_mode(&self) -> RankMode {
        self.rank
            .threshold
            .map_or(RankMode::PlateauHalf, RankMode::AbsoluteThreshold)
    }
}

/// Operator used to invert array data.
#[derive(Debug, Clone)]
pub enum Inverter {
    /// Discrete array with at least as many receivers as modes.
    Sensing(SensingMatrix),
    /// Any other array.
    Coupling(CouplingMatrix),
}

/// Outcome of one noisy localization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Localization {
    pub peak: Peak,
    pub distance: f64,
    pub success: bool,
    pub epsilon: f64,
}

/// Precomputed, noise-independent parts of an imaging experiment.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub ms: ModeSet,
    pub source: PointSource,
    pub a_o: ModeAmplitudes,
    pub geometry: ArrayGeometry,
    pub clean: FieldSamples,
    pub inverter: Inverter,
    pub grid: SearchGrid,
    pub regularizer: RegularizerKind,
    pub policy: EpsilonPolicy,
    pub explicit_epsilon: Option<f64>,
    /// Ratio of the noise level seen by the coupling route to the
    /// per-sample level, `sqrt(sum w_k^2)`.
    noise_scale: f64,
}

impl Scenario {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        let ms = cfg.mode_set()?;
        let geometry = cfg.geometry()?;
        cfg.source.validate(&ms, &geometry)?;
        let a_o = source_amplitudes(&ms, &cfg.source);
        let clean = sample_field(&ms, &a_o, &geometry)?;
        let inverter = match &geometry {
            ArrayGeometry::Discrete { points } if points.len() >= ms.mode_count() => {
                Inverter::Sensing(sensing_matrix(&ms, points)?)
            }
            _ => Inverter::Coupling(coupling_matrix(&ms, &geometry)?),
        };
        let noise_scale = clean.points.iter().map(|p| p.weight * p.weight).sum::<f64>().sqrt();
        let grid = cfg.grid(&ms)?;
        grid.validate(&geometry)?;
        Ok(Self {
            ms,
            source: cfg.source,
            a_o,
            geometry,
            clean,
            inverter,
            grid,
            regularizer: cfg.estimate.regularizer,
            policy: cfg.estimate.epsilon_policy,
            explicit_epsilon: cfg.estimate.epsilon,
            noise_scale,
        })
    }

    fn operator(&self) -> &dyn SpectralOperator {
        match &self.inverter {
            Inverter::Sensing(sm) => sm,
            Inverter::Coupling(cm) => cm,
        }
    }

    /// Absolute per-sample noise level for relative level `sigma`.
    pub fn sigma_meas(&self, sigma: f64) -> f64 {
        sigma * self.clean.sup_norm()
    }

    /// Regularization parameter for relative noise level `sigma`.
    pub fn epsilon(&self, sigma: f64) -> Result<f64> {
        let level = match self.inverter {
            Inverter::Sensing(_) => self.sigma_meas(sigma),
            Inverter::Coupling(_) => self.sigma_meas(sigma) * self.noise_scale,
        };
        Ok(match self.policy {
            EpsilonPolicy::Explicit => self.explicit_epsilon.unwrap_or(0.0),
            EpsilonPolicy::Heuristic => self.operator().heuristic_epsilon(&self.a_o, level),
            EpsilonPolicy::Scan if level > 0.0 => optimal_epsilon(self.operator(), &self.a_o, level)?.scanned,
            EpsilonPolicy::Scan => 0.0,
        })
    }

    pub fn regularizer_for(&self, eps: f64) -> Regularizer {
        match self.regularizer {
            RegularizerKind::None => Regularizer::None,
            RegularizerKind::MoorePenrose => Regularizer::MoorePenrose,
            RegularizerKind::Tikhonov => Regularizer::Tikhonov(eps),
            RegularizerKind::HardThreshold => Regularizer::HardThreshold(eps),
        }
    }

    /// Noisy data for relative level `sigma`, drawn from a generator seeded
    /// with `seed`.
    pub fn noisy_field(&self, sigma: f64, seed: u64) -> FieldSamples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        add_noise_abs(&self.clean, self.sigma_meas(sigma), &mut rng)
    }

    pub fn estimate(&self, data: &FieldSamples, reg: &Regularizer) -> Result<ModeAmplitudes> {
        match &self.inverter {
            Inverter::Sensing(sm) => sm.apply_inverse(&data.values, reg).map(ModeAmplitudes),
            Inverter::Coupling(cm) => estimate_amplitudes(&project_reduced(data, cm, &self.ms)?, cm, reg),
        }
    }

    /// Estimate, migrate and locate for one noise realization.
    pub fn localize(&self, sigma: f64, seed: u64) -> Result<(Localization, ImageMap)> {
        let eps = self.epsilon(sigma)?;
        let data = self.noisy_field(sigma, seed);
        let a = self.estimate(&data, &self.regularizer_for(eps))?;
        let image = migrate(&a, &self.ms, &self.grid)?;
        let peak = locate_peak(&image)?;
        let lambda = self.ms.wavelength();
        Ok((
            Localization {
                peak,
                distance: peak.position().distance(&self.source.position()),
                success: localization_success(peak.position(), &self.source, lambda),
                epsilon: eps,
            },
            image,
        ))
    }

    /// Fraction of `trials` noise realizations, seeded `seed ^ trial`, whose
    /// image peak misses the source by more than half a wavelength.
    pub fn error_rate(&self, sigma: f64, trials: usize, seed: u64) -> Result<f64> {
        let failures = (0..trials)
            .into_par_iter()
            .map(|t| {
                self.localize(sigma, seed ^ t as u64)
                    .map(|(l, _)| usize::from(!l.success))
            })
            .try_reduce(|| 0, |a, b| Ok(a + b))?;
        Ok(failures as f64 / trials as f64)
    }
}

/// Writes `modes.csv` (`index,alpha,beta`) and returns the mode set.
pub fn run_modes(cfg: &ExperimentConfig, out: &Path) -> Result<ModeSet> {
    let ms = cfg.mode_set()?;
    io::write_csv(
        &out.join("modes.csv"),
        &cfg.provenance(),
        &["index", "alpha", "beta"],
        (0..ms.mode_count()).map(|j| {
            vec![
                (j + ms.first_index()).to_string(),
                ms.alpha()[j].to_string(),
                ms.beta()[j].to_string(),
            ]
        }),
    )?;
    Ok(ms)
}

/// Spectrum of the array: singular values of the trace matrix for a
/// discrete array, eigenvalues of the coupling matrix otherwise. Writes
/// `spectrum.csv` and the coupling matrix to `coupling.csv`.
pub fn run_spectrum(cfg: &ExperimentConfig, out: &Path) -> Result<SpectrumReport> {
    let ms = cfg.mode_set()?;
    let geometry = cfg.geometry()?;
    let cm = coupling_matrix(&ms, &geometry)?;
    let spectrum = match &geometry {
        ArrayGeometry::Discrete { points } => {
            let b = mode_traces(&ms, points.iter().map(|p| (p.x, p.z)));
            ThinSvd::new(&b).singular
        }
        _ => cm.eigenvalues().to_vec(),
    };
    let prov = cfg.provenance();
    io::write_spectrum(&out.join("spectrum.csv"), &prov, &spectrum)?;
    io::write_matrix(&out.join("coupling.csv"), &prov, cm.matrix())?;
    SpectrumReport::new(spectrum, cfg.rank_mode())
}

/// Image for the first configured noise level (or `sigma`), written to
/// `image.csv` (and `image.png`), with the recorded data in `field.csv` and
/// the peak in `peak.csv`.
pub fn run_image(cfg: &ExperimentConfig, sigma: f64, out: &Path, png: bool) -> Result<Localization> {
    let scenario = Scenario::new(cfg)?;
    let (loc, image) = scenario.localize(sigma, cfg.noise.seed)?;
    let prov = cfg.provenance();
    io::write_image(&out.join("image.csv"), &prov, &image)?;
    io::write_field(
        &out.join("field.csv"),
        &prov,
        &scenario.noisy_field(sigma, cfg.noise.seed),
    )?;
    io::write_csv(
        &out.join("peak.csv"),
        &prov,
        &["sigma", "epsilon", "x", "z", "distance", "success"],
        [vec![
            sigma.to_string(),
            loc.epsilon.to_string(),
            loc.peak.x.to_string(),
            loc.peak.z.to_string(),
            loc.distance.to_string(),
            loc.success.to_string(),
        ]],
    )?;
    if png {
        io::write_png(&out.join("image.png"), &image)?;
    }
    Ok(loc)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub sigma: f64,
    pub error_rate: f64,
    pub trials: usize,
}

/// Localization error rate at each configured noise level, written to
/// `mc_rate.csv`.
pub fn run_mc_rate(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<Vec<RatePoint>> {
    let scenario = Scenario::new(cfg)?;
    let trials = cfg.noise.trials;
    let seed = cfg.noise.seed;
    let curve = cfg
        .noise
        .sigmas
        .iter()
        .map(|&sigma| {
            Ok(RatePoint {
                sigma,
                error_rate: scenario.error_rate(sigma, trials, seed)?,
                trials,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(out) = out {
        io::write_csv(
            &out.join("mc_rate.csv"),
            &cfg.provenance(),
            &["sigma", "error_rate", "trials", "seed"],
            curve.iter().map(|p| {
                vec![
                    p.sigma.to_string(),
                    p.error_rate.to_string(),
                    p.trials.to_string(),
                    seed.to_string(),
                ]
            }),
        )?;
    }
    Ok(curve)
}

/// Noise level at which the error rate first reaches one half, by linear
/// interpolation in `log sigma` between the bracketing levels.
pub fn half_error_threshold(curve: &[RatePoint]) -> Option<f64> {
    curve.windows(2).find_map(|w| {
        let (lo, hi) = (w[0], w[1]);
        if lo.error_rate < 0.5 && hi.error_rate >= 0.5 && lo.sigma > 0.0 {
            let t = (0.5 - lo.error_rate) / (hi.error_rate - lo.error_rate);
            Some((lo.sigma.ln() + t * (hi.sigma.ln() - lo.sigma.ln())).exp())
        } else {
            None
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankPoint {
    pub ratio: f64,
    pub predicted: f64,
    pub measured: usize,
}

/// Effective rank of dense vertical apertures `[0, 2a]` and horizontal
/// apertures `[-a, a]` for each configured `a / L`.
pub fn rank_scan(cfg: &ExperimentConfig) -> Result<(Vec<RankPoint>, Vec<RankPoint>)> {
    let ms = cfg.mode_set()?;
    let depth = cfg.waveguide.length_scale;
    let lo = match ms.spec().transverse_domain().0 {
        lo if lo.is_finite() => lo,
        _ => -depth,
    };
    let z_h = cfg.rank.horizontal_depth.unwrap_or(cfg.array.depth);
    let mode = cfg.rank_mode();
    let n = ms.mode_count();
    let lambda = ms.wavelength();
    let scan = |kind: DenseKind| {
        cfg.rank
            .ratios
            .par_iter()
            .map(|&ratio| {
                let a = ratio * depth;
                let (geometry, interval) = match kind {
                    DenseKind::Vertical => {
                        let i = Interval::new(lo + a, a);
                        (ArrayGeometry::DenseVertical { intervals: vec![i] }, i)
                    }
                    DenseKind::Horizontal => (ArrayGeometry::horizontal(z_h, a), Interval::new(0.0, a)),
                };
                let cm = coupling_matrix(&ms, &geometry)?;
                Ok(RankPoint {
                    ratio,
                    predicted: dense_rank_prediction(kind, &[interval], lambda, n),
                    measured: effective_rank(cm.eigenvalues(), mode)?,
                })
            })
            .collect::<Result<Vec<_>>>()
    };
    Ok((scan(DenseKind::Vertical)?, scan(DenseKind::Horizontal)?))
}

/// Runs [`rank_scan`] and writes `rank_vertical.csv` and
/// `rank_horizontal.csv` (`a_over_L,predicted,measured`).
pub fn run_rank_scan(cfg: &ExperimentConfig, out: &Path) -> Result<(Vec<RankPoint>, Vec<RankPoint>)> {
    let (vertical, horizontal) = rank_scan(cfg)?;
    let prov = cfg.provenance();
    for (name, points) in [("rank_vertical.csv", &vertical), ("rank_horizontal.csv", &horizontal)] {
        io::write_csv(
            &out.join(name),
            &prov,
            &["a_over_L", "predicted", "measured"],
            points
                .iter()
                .map(|p| vec![p.ratio.to_string(), p.predicted.to_string(), p.measured.to_string()]),
        )?;
    }
    Ok((vertical, horizontal))
}

/// Creates `dir` if needed.
pub fn prepare_output(dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    Ok(dir.to_path_buf())
}
