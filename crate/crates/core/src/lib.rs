//! Hermite-spectral numerics for the cubic Schrödinger equation with harmonic
//! potential in two dimensions,
//!
//! `i ∂_t u + A u + σ u|u|² = 0`,  `A = −Δ + |x|²`,
//!
//! together with the diagnostics used to test its identities and estimates.

pub mod data;
pub mod dynamics;
pub mod energies;
pub mod estimates;
pub mod error;
pub mod hermite;
pub mod spectral;

pub use error::{Error, Result};
pub use hermite::{PhysicalField, SpectralField};
