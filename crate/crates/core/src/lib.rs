//! Discrete vector OFDM (VOFDM): frame construction, discrete spectrum
//! analysis, and per-vector precoding that forces spectral nulls.
//!
//! All transforms use the unitary convention (`1/sqrt(K)` in both
//! directions) with kernel `W_K = exp(-2*pi*j/K)`.
//!
//! Layouts:
//! - [`SymbolGrid`] and [`TimeFrame`] store vectors contiguously
//!   (flat index `k*M + n`, block layout).
//! - [`SpectrumFrame`] stores the components of `y_k` at stride `N`
//!   (flat index `m*N + k`, stride layout).

pub mod dft;
pub mod error;
pub mod frame;
pub mod modulation;
pub mod precoder;
pub mod simkit;
pub mod spectrum;

pub use dft::{unitary_dft, Direction};
pub use error::{Error, Result};
pub use frame::{FrameParams, SpectrumFrame, SymbolGrid, TimeFrame};
pub use modulation::{demodulate, modulate};
pub use num_complex::Complex64;
pub use precoder::{
    build_system, precode, precode_grid, verify_nulls, DftPartition, LinearSystem, NullReport,
    NullSpec, PrecodeMode, PrecodeSolution,
};
pub use simkit::{
    averaged_magnitudes, draw_grid, papr, trial_grids, Constellation, FillPlan, MagnitudeStats,
    Papr, SymbolSource,
};
pub use spectrum::{spectrum, spectrum_map, split_spectrum};
