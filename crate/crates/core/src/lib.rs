//! Exact spectra of the Lieb-Liniger Bose gas on a ring and their level
//! statistics.
//!
//! Every eigenstate is labelled by a set of distinct quantum numbers and its
//! energy follows from the real roots of the Bethe equations, so spectra are
//! built by enumerating quantum-number sets under a cutoff and solving each
//! set with Newton's method ([`bethe`], [`enumerate`], [`sector`]). The
//! [`symmetry`] module checks the momentum-shift relations between sectors and
//! [`stats`] measures spacing distributions, spacing ratios and Δ3 rigidity.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the double-precision types used by the file formats and the CLI.

pub mod bethe;
pub mod enumerate;
mod error;
pub mod io;
pub mod linalg;
pub mod quantum;
mod scalar;
pub mod sector;
pub mod stats;
pub mod symmetry;

pub use bethe::{
    bethe_jacobian, bethe_residual, conserved_charge, limit_rapidities, limit_state, solve_state, BetheState, CouplingLimit,
    GuessPolicy, SolverOptions,
};
pub use enumerate::{enumerate_quantum_sets, QuantumSetIter};
pub use error::{Error, Result};
pub use quantum::{HalfInt, ModelParams, QuantumNumbers};
pub use scalar::Real;
pub use sector::{
    build_certified_sector, build_full_spectrum, build_sector, build_sector_below, cutoff_energy_floor, deduplicate_energies,
    verify_saturation, Level, SaturationReport, SpectrumSector, DEFAULT_MATCH_TOL,
};
pub use symmetry::{
    canonical_momentum, independent_momenta, nu_shift, shift_quantum_numbers, verify_sector_equivalence, EquivalenceReport,
    ShiftMap, DEFAULT_EQUIVALENCE_TOL,
};

pub type ModelParams64 = ModelParams<f64>;
pub type SolverOptions64 = SolverOptions<f64>;
pub type BetheState64 = BetheState<f64>;
pub type Level64 = Level<f64>;
pub type SpectrumSector64 = SpectrumSector<f64>;
pub type SaturationReport64 = SaturationReport<f64>;
pub type UnfoldedSequence64 = stats::UnfoldedSequence<f64>;
pub type Delta3Curve64 = stats::Delta3Curve<f64>;
pub type RatioSeries64 = stats::RatioSeries<f64>;
pub type Histogram64 = stats::Histogram<f64>;

pub type ModelParams32 = ModelParams<f32>;
pub type BetheState32 = BetheState<f32>;
