//! Continuous wavelet analysis of acoustical signals with the Reimann
//! wavelet family.
//!
//! The crate covers the full analysis chain: time-domain synthesis of the
//! wavelets by oscillatory quadrature ([`synthesis`]), overlapped windowed
//! forward and inverse transforms ([`transform`]), phase-derivative
//! reassignment built on the family's structure equations ([`reassign`]),
//! connectivity-map denoising ([`denoise`]) and calibration of the wavelet
//! parameters against recorded instrument tones ([`calibrate`]).
//!
//! Start with [`params::WaveletParams`] and the runnable programs in the
//! `examples/` directory.

pub mod calibrate;
pub mod config;
pub mod denoise;
pub mod error;
pub mod export;
pub mod params;
pub mod reassign;
pub mod signal;
pub mod synthesis;
pub mod transform;
pub mod wav;

pub use error::{Error, Result};
pub use params::{PhaseVariant, TonotopicMap, WaveletKind, WaveletParams};
pub use signal::Signal;
pub use transform::{CwtEngine, WindowSettings};
