//! Low-frequency source imaging in two-dimensional acoustic waveguides.
//!
//! A time-harmonic point source excites the guided modes of a channel; an
//! array records the field; the mode amplitudes are estimated by a
//! regularized inversion and migrated back to an image whose peak locates
//! the source. The crate also quantifies how much modal information an
//! array geometry can capture.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimate;
pub mod experiment;
pub mod geometry;
pub mod image;
pub mod io;
pub mod linalg;
pub mod modes;
pub mod presets;
pub mod quadrature;
pub mod rank;
pub mod synth;
