//! Phase estimation: trisection (iterative, Fourier-free) and textbook
//! Fourier phase estimation.

pub mod chernoff;
pub mod fourier;
pub mod interval;
pub mod mirror;
pub mod ternary;

pub use chernoff::{chernoff_cases, ChernoffCase};
pub use fourier::{fourier_phase_estimate, fourier_tail_bound, FourierOutcome};
pub use interval::{Branch, PhaseInterval};
pub use mirror::{resolve_mirror_ambiguity, MirrorOutcome};
pub use ternary::{ternary_estimate, ternary_iteration, EstimateResult, IterationRecord};
