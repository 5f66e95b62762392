//! Estimating a phase anywhere in `[0, 2 pi)` with the trisection procedure,
//! which by itself only separates `phi` from `2 pi - phi` inside a known
//! width-`pi` window.
//!
//! Only the first trisection step (`t = 1`, `phi_min = 0`) is symmetric under
//! `phi -> 2 pi - phi`; later steps are not, so the side of `pi/2` is decided
//! from first-step statistics alone (the folded phase `2 asin(sqrt(p_hat))`),
//! with a margin `gamma` around `pi/2`. Inside the margin the unitary is
//! rotated by `e^{i pi/4}` and the decision repeated; if that is ambiguous too
//! the run fails explicitly.

use core::f64::consts::PI;

use super::interval::PhaseInterval;
use super::ternary::{hadamard_test_sample, phase_from_frequency, ternary_estimate, EstimateResult};
use crate::error::{Error, Result};
use crate::ff::{Angle, FastForwardableUnitary, PhaseShifted};
use crate::rng::RngStream;
use crate::state::StateVector;

/// Half-width of the undecided band around `pi/2`.
pub const FOLD_MARGIN: f64 = PI / 12.0;

#[derive(Debug, Clone)]
pub enum MirrorOutcome {
    Resolved {
        result: EstimateResult,
        /// True when the `e^{i pi/4}` rotation was needed.
        shifted: bool,
        /// Folded phases seen, in order.
        folded: alloc::vec::Vec<f64>,
    },
    /// Both folded phases fell inside the margin.
    Failed { folded: alloc::vec::Vec<f64> },
}

impl MirrorOutcome {
    pub fn estimate(&self) -> Option<f64> {
        match self {
            MirrorOutcome::Resolved { result, .. } => Some(result.estimate),
            MirrorOutcome::Failed { .. } => None,
        }
    }

    pub fn result(&self) -> Option<&EstimateResult> {
        match self {
            MirrorOutcome::Resolved { result, .. } => Some(result),
            MirrorOutcome::Failed { .. } => None,
        }
    }
}

/// `2 asin(sqrt(p_hat))` from `samples` first-step Hadamard tests; an
/// estimate of `min(phi, 2 pi - phi)`.
pub fn folded_phase<F: FastForwardableUnitary + ?Sized>(
    ffu: &F,
    register: &mut StateVector,
    samples: usize,
    rng: &mut RngStream,
) -> Result<f64> {
    if samples == 0 {
        return Err(Error::invalid("sample count must be at least 1"));
    }
    let mut ones = 0;
    for _ in 0..samples {
        if hadamard_test_sample(ffu, register, 1, Angle::zero(), rng)? {
            ones += 1;
        }
    }
    Ok(phase_from_frequency(ones as f64 / samples as f64, 1, 0.0))
}

/// Width-`pi` window holding both `phi` and its mirror, given the folded
/// phase; `None` inside the margin.
pub fn mirror_window(folded: f64) -> Option<PhaseInterval> {
    if folded < PI / 2.0 - FOLD_MARGIN {
        // [3pi/2, 5pi/2]
        Some(PhaseInterval::initial(1.5).expect("valid"))
    } else if folded > PI / 2.0 + FOLD_MARGIN {
        Some(PhaseInterval::initial(0.5).expect("valid"))
    } else {
        None
    }
}

/// Estimates the eigenphase of `register` under `U` anywhere in `[0, 2 pi)`.
/// Each folding pass uses `l m` samples; each trisection run `l` iterations
/// of `m` samples.
pub fn resolve_mirror_ambiguity<F: FastForwardableUnitary>(
    ffu: &F,
    register: &StateVector,
    ell: u32,
    m: usize,
    rng: &mut RngStream,
) -> Result<MirrorOutcome> {
    let budget = ell as usize * m;
    let mut reg = register.clone();
    let f0 = folded_phase(ffu, &mut reg, budget, rng)?;
    if let Some(window) = mirror_window(f0) {
        let result = ternary_estimate(ffu, &reg, window, ell, m, rng)?;
        return Ok(MirrorOutcome::Resolved { result, shifted: false, folded: alloc::vec![f0] });
    }
    let rotated = PhaseShifted { inner: ffu, theta: Angle::pi_times(0.25) };
    let f1 = folded_phase(&rotated, &mut reg, budget, rng)?;
    match mirror_window(f1) {
        Some(window) => {
            let result = ternary_estimate(&rotated, &reg, window, ell, m, rng)?.unshift(0.25)?;
            Ok(MirrorOutcome::Resolved { result, shifted: true, folded: alloc::vec![f0, f1] })
        }
        None => Ok(MirrorOutcome::Failed { folded: alloc::vec![f0, f1] }),
    }
}
