//! Information content of an array: effective ranks of measured spectra,
//! asymptotic predictions for dense apertures, Taylor-order predictions for
//! small arrays, and the rank deficit of the moment family caused by the
//! dispersion relation.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{Interval, Point};
use crate::linalg::{ThinSvd, C64};
use crate::modes::ModeSet;

/// Relative cutoff defining the numerical rank of a moment family.
pub const SPAN_RANK_CUTOFF: f64 = 1e-9;

/// How many entries of a spectrum count as exploitable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RankMode {
    /// Entries `>= eps`.
    AbsoluteThreshold(f64),
    /// Entries `>=` half the largest entry.
    PlateauHalf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub spectrum: Vec<f64>,
    pub effective_rank: usize,
    pub threshold: f64,
    /// Largest entry when the plateau rule was used.
    pub plateau: Option<f64>,
}

impl SpectrumReport {
    pub fn new(spectrum: Vec<f64>, mode: RankMode) -> Result<Self> {
        let (effective_rank, threshold) = count_above(&spectrum, mode)?;
        let plateau = match mode {
            RankMode::PlateauHalf => Some(spectrum[0]),
            RankMode::AbsoluteThreshold(_) => None,
        };
        Ok(Self {
            spectrum,
            effective_rank,
            threshold,
            plateau,
        })
    }
}

fn count_above(spectrum: &[f64], mode: RankMode) -> Result<(usize, f64)> {
    let max = spectrum.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if spectrum.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    let threshold = match mode {
        RankMode::AbsoluteThreshold(eps) => eps,
        RankMode::PlateauHalf => 0.5 * max,
    };
    Ok((spectrum.iter().filter(|&&s| s >= threshold).count(), threshold))
}

/// Number of spectrum entries retained under `mode`.
pub fn effective_rank(spectrum: &[f64], mode: RankMode) -> Result<usize> {
    count_above(spectrum, mode).map(|(n, _)| n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DenseKind {
    Vertical,
    Horizontal,
}

/// Asymptotic number of significant eigenvalues of the coupling matrix of a
/// dense aperture made of intervals with half-lengths `a_k`: `4 sum a_k /
/// lambda` for a vertical aperture and `2 sum a_k / lambda` for a horizontal
/// one, never more than the mode count.
pub fn dense_rank_prediction(kind: DenseKind, intervals: &[Interval], lambda: f64, modes: usize) -> f64 {
    let total: f64 = intervals.iter().map(|i| i.half_length).sum();
    let factor = match kind {
        DenseKind::Vertical => 4.0,
        DenseKind::Horizontal => 2.0,
    };
    (factor * total / lambda).min(modes as f64)
}

/// Taylor order `Q` of a small array and the ranks it supports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TaylorPrediction {
    pub order: usize,
    /// Linear (vertical or horizontal) arrays: `Q`, capped at `min(M, N)`.
    pub linear: usize,
    /// Planar arrays: `2Q - 1`.
    pub planar: usize,
}

/// Largest `Q >= 0` whose Taylor term `(k a)^Q / Q!` is still at least
/// `eps`; zero when even the leading term falls below `eps`.
pub fn taylor_order(k_o_a: f64, eps: f64) -> usize {
    let mut term = 1.0;
    let mut order = 0;
    if term < eps {
        return 0;
    }
    loop {
        let next = term * k_o_a / (order + 1) as f64;
        if next < eps || next >= term {
            return order;
        }
        term = next;
        order += 1;
    }
}

pub fn taylor_rank_prediction(k_o_a: f64, eps: f64, receivers: usize, modes: usize) -> TaylorPrediction {
    let order = taylor_order(k_o_a, eps);
    TaylorPrediction {
        order,
        linear: order.min(receivers.min(modes)),
        planar: (2 * order).saturating_sub(1),
    }
}

/// Terms of the expansion of the trace matrix around `(0, z_a)`:
/// `B ~ sum conj(v_{q,q'}) u_{q,q'}^T` over `q + q' <= Q - 1`, with
/// `u_{q,q'} = (beta_j^q phi_j^(q')(z_a))_j` and
/// `v_{q,q'} = (i^q / (q! q'!)) (x_k^q (z_k - z_a)^q')_k`.
#[derive(Debug, Clone)]
pub struct MomentFamily {
    pub order: usize,
    pub depth: f64,
    /// `(q, q')` for each term, by increasing `q + q'` then `q'`.
    pub pairs: Vec<(usize, usize)>,
    pub u: Vec<DVector<f64>>,
    pub v: Vec<DVector<C64>>,
}

impl MomentFamily {
    /// `sum conj(v) u^T`, the order-`Q` approximation of the trace matrix.
    pub fn truncated_traces(&self) -> DMatrix<C64> {
        let m = self.v.first().map_or(0, |v| v.len());
        let n = self.u.first().map_or(0, |u| u.len());
        let mut out = DMatrix::zeros(m, n);
        for (u, v) in self.u.iter().zip(&self.v) {
            for k in 0..m {
                let c = v[k].conj();
                for j in 0..n {
                    out[(k, j)] += c * u[j];
                }
            }
        }
        out
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

pub fn moment_family(ms: &ModeSet, z_a: f64, points: &[Point], order: usize) -> Result<MomentFamily> {
    if order == 0 {
        return Err(Error::InvalidParameter("moment order must be at least 1".into()));
    }
    let beta = ms.beta();
    let mut pairs = Vec::new();
    for total in 0..order {
        for dz in 0..=total {
            pairs.push((total - dz, dz));
        }
    }
    let u = pairs
        .iter()
        .map(|&(q, qz)| {
            DVector::from_iterator(
                ms.mode_count(),
                (0..ms.mode_count()).map(|j| beta[j].powi(q as i32) * ms.profile(j, z_a, qz as u32)),
            )
        })
        .collect();
    let v = pairs
        .iter()
        .map(|&(q, qz)| {
            let scale = C64::new(0.0, 1.0).powi(q as i32) / (factorial(q) * factorial(qz));
            DVector::from_iterator(
                points.len(),
                points
                    .iter()
                    .map(|p| scale * p.x.powi(q as i32) * (p.z - z_a).powi(qz as i32)),
            )
        })
        .collect();
    Ok(MomentFamily {
        order,
        depth: z_a,
        pairs,
        u,
        v,
    })
}

/// Numerical rank of `span{u_{q,q'}}` against the `2Q - 1` directions that
/// survive the dispersion relation.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanRank {
    pub rank: usize,
    pub expected: usize,
    /// Singular values of the stacked unit-normalized vectors.
    pub singular_values: Vec<f64>,
    /// Ratio of the smallest retained to the largest discarded singular
    /// value; infinite when nothing is discarded.
    pub gap: f64,
}

pub fn span_rank_collapse(mf: &MomentFamily) -> SpanRank {
    let n = mf.u.first().map_or(0, |u| u.len());
    let cols = mf.u.len();
    let mut stacked = DMatrix::<C64>::zeros(n, cols);
    for (c, u) in mf.u.iter().enumerate() {
        let norm = u.norm();
        for j in 0..n {
            stacked[(j, c)] = C64::new(if norm > 0.0 { u[j] / norm } else { 0.0 }, 0.0);
        }
    }
    // the singular values of a wide matrix are those of its adjoint
    let tall = if n >= cols { stacked } else { stacked.adjoint() };
    let singular = ThinSvd::new(&tall).singular;
    let max = singular.first().copied().unwrap_or(0.0);
    let rank = singular.iter().filter(|&&s| s > SPAN_RANK_CUTOFF * max).count();
    let gap = match (rank.checked_sub(1).map(|r| singular[r]), singular.get(rank)) {
        (Some(kept), Some(&dropped)) if dropped > 0.0 => kept / dropped,
        (Some(_), Some(_)) | (Some(_), None) => f64::INFINITY,
        (None, _) => 0.0,
    };
    SpanRank {
        rank,
        expected: (2 * mf.order).saturating_sub(1),
        singular_values: singular,
        gap,
    }
}
