//! Cellular-automaton decoders for the 2D toric code.
//!
//! The crate simulates one error sector of the toric code on an `L x L`
//! torus and decodes it with a local field automaton: every cell of an
//! auxiliary 2D or 3D torus carries a real value that is repeatedly smoothed
//! and sourced by the anyons, and each anyon hops towards the neighbor with
//! the largest field value.
//!
//! Modules:
//!
//! - [`lattice`]: periodic lattice geometry and neighbor tables.
//! - [`toric`]: error configurations, syndromes, noise and logical failure.
//! - [`automaton`]: the field update, the anyon hop rule and the decode loop.
//! - [`analysis`]: spectral companion (eigenvalues, stationary fields,
//!   equilibration and self-interaction bounds).
//! - [`ideal`]: decoders driven by exact power-law potentials, including the
//!   1D repetition code.
//! - [`seed`]: deterministic seed derivation for parallel Monte Carlo.
//!
//! Field-valued code is generic over [`Real`], implemented for `f32` and
//! `f64`. The aliases at the crate root fix the scalar to `f64`, which is
//! what the benchmark harness uses.

pub mod analysis;
pub mod automaton;
pub mod error;
pub mod ideal;
pub mod lattice;
pub mod seed;
pub mod toric;

use std::fmt::{Debug, Display};

pub use error::{Error, Result};
pub use lattice::{Lattice, TorusIndex};
pub use toric::{ChargeField, Direction, ErrorConfig};

/// Floating-point scalar used for field values.
pub trait Real:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::NumAssign
    + rustfft::FftNum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossless-enough conversion from `f64` literals.
    #[inline]
    fn of(x: f64) -> Self {
        <Self as num_traits::FromPrimitive>::from_f64(x).expect("representable constant")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type ScalarField = automaton::ScalarField<f64>;
pub type ScalarField32 = automaton::ScalarField<f32>;
pub type DecoderConfig = automaton::DecoderConfig<f64>;
pub type DecoderConfig32 = automaton::DecoderConfig<f32>;
pub type SpectralModel = analysis::SpectralModel<f64>;
pub type SpectralModel32 = analysis::SpectralModel<f32>;
pub type RescaledField = analysis::RescaledField<f64>;
