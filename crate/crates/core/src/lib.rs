//! Design toolkit for quasi-phase-matched spontaneous parametric
//! down-conversion in a periodically poled waveguide pumped by an unguided
//! tilted plane wave.
//!
//! The crate covers the full chain from material dispersion to spectra:
//!
//! * [`dispersion`] — data-driven Sellmeier index of the nonlinear medium;
//! * [`waveguide`] — fundamental-mode constants of a parabolic graded-index
//!   slab and its single-mode predicate;
//! * [`qpm`] — the quasi-phase-matching residual and its solvers for poling
//!   period, pump angle, and signal/idler wavelength pairs, plus sweep
//!   tables;
//! * [`spectrum`] — the sinc-bracket spectral density, bandwidth (FWHM)
//!   extraction, bandwidth-ratio sweeps, 2-D angle/wavelength maps, and the
//!   weights of the discrete frequency superposition;
//! * [`report`] — deterministic CSV rendering of every artifact.
//!
//! All numerics are generic over the scalar type via [`real::Real`]
//! (`f64` default, `f32` supported); the `*64` aliases below pin the common
//! concrete instantiations.

// negated comparisons like `!(x > 0)` are deliberate: they reject NaN where
// the positive form would let it through
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod dispersion;
pub mod error;
pub mod kv;
pub mod qpm;
pub mod real;
pub mod report;
pub mod rootfind;
pub mod spectrum;
pub mod waveguide;

pub use config::{BetaMode, ClampMode, InteractionConfig};
pub use dispersion::{builtin_ppln_e, SellmeierForm, SellmeierModel};
pub use error::{Error, Result};
pub use qpm::{
    idler_from_energy, solve_poling_period, solve_pump_angles, solve_signal_idler, tuning_sweep,
    DirectionPair, PeriodSolution, PhaseMatchSolution, PolingSpec, PumpGeometry, SweepAxis,
    SweepSolve, TuningCurve, TuningRow,
};
pub use real::Real;
pub use spectrum::{
    auto_slice, auto_window, bandwidth_ratio_sweep, spectral_map, spectrum_slice, spectrum_value,
    superposition_weights, BandwidthRatioTable, LambdaWindow, SpectralMap, SpectrumSlice,
    SuperpositionComponent, ThetaRange,
};
pub use waveguide::{GuidedMode, WaveguideSpec};

pub type SellmeierModel64 = SellmeierModel<f64>;
pub type WaveguideSpec64 = WaveguideSpec<f64>;
pub type PolingSpec64 = PolingSpec<f64>;
pub type InteractionConfig64 = InteractionConfig<f64>;
pub type PhaseMatchSolution64 = PhaseMatchSolution<f64>;
pub type SpectrumSlice64 = SpectrumSlice<f64>;
pub type SpectralMap64 = SpectralMap<f64>;
