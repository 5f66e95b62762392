use alloc::vec::Vec;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

use super::interval::{Branch, PhaseInterval};
use crate::dd::wrap_angle;
use crate::error::{Error, Result};
use crate::ff::{controlled_power_apply, Angle, FastForwardableUnitary};
use crate::gates;
use crate::rng::RngStream;
use crate::state::StateVector;

/// What one trisection step saw.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub level: u32,
    pub power: i128,
    pub phi_min: f64,
    pub samples: usize,
    pub ones: usize,
    pub p_hat: f64,
    /// `(2/t) asin(sqrt(p_hat)) + phi_min`, with `p_hat` clamped to `[0, 1]`.
    pub phi_hat: f64,
    pub branch: Branch,
}

#[derive(Debug, Clone)]
pub struct EstimateResult {
    /// Midpoint of the final interval, in `[0, 2 pi)`.
    pub estimate: f64,
    /// `2^{-l} pi`.
    pub accuracy: f64,
    /// `max(0, 1 - l e^{-m/160})`.
    pub confidence: f64,
    pub interval: PhaseInterval,
    pub transcript: Vec<IterationRecord>,
    /// Register state after the last sample.
    pub post_state: StateVector,
}

/// Lower bound on the success probability of `l` iterations with `m`
/// samples each.
pub fn trisection_confidence(ell: u32, m: usize) -> f64 {
    (1.0 - ell as f64 * (-(m as f64) / 160.0).exp()).max(0.0)
}

fn register_width(ffu_dim: usize, register: &StateVector) -> Result<usize> {
    let w = register.num_qubits().ok_or(Error::NotQubitBasis)?;
    if register.dim() != ffu_dim {
        return Err(Error::DimensionMismatch { expected: ffu_dim, found: register.dim() });
    }
    Ok(w)
}

/// One run of the Hadamard-test circuit: control `|+>`, controlled
/// `(e^{-i extra} U)^power` on the register, Hadamard, measure the control.
/// The register is replaced by its post-measurement state.
pub fn hadamard_test_sample<F: FastForwardableUnitary + ?Sized>(
    ffu: &F,
    register: &mut StateVector,
    power: i128,
    extra: Angle,
    rng: &mut RngStream,
) -> Result<bool> {
    let w = register_width(ffu.dim(), register)?;
    let h = core::f64::consts::FRAC_1_SQRT_2;
    let plus = StateVector::from_amplitudes(1, alloc::vec![C64::new(h, 0.0), C64::new(h, 0.0)])?;
    let mut s = register.tensor(&plus)?;
    controlled_power_apply(&mut s, ffu, power, 0, 1..w + 1, extra)?;
    s.apply_unitary(&gates::hadamard(), &[0])?;
    let (bit, post) = s.measure_qubits(&[0], rng)?;
    let amps: Vec<C64> = (0..register.dim()).map(|r| post.amplitude((r << 1) | bit as usize)).collect();
    *register = StateVector::normalized(w, amps)?;
    Ok(bit == 1)
}

/// `(2/t) asin(sqrt(p)) + phi_min` with `p` clamped.
pub fn phase_from_frequency(p_hat: f64, power: i128, phi_min: f64) -> f64 {
    let p = p_hat.clamp(0.0, 1.0);
    2.0 * p.sqrt().asin() / power as f64 + phi_min
}

/// One trisection step: `m` Hadamard-test samples at power `t_j` and extra
/// phase `phi_min^j`, then the three-branch interval rule.
pub fn ternary_iteration<F: FastForwardableUnitary + ?Sized>(
    ffu: &F,
    register: &mut StateVector,
    interval: PhaseInterval,
    m: usize,
    rng: &mut RngStream,
) -> Result<(PhaseInterval, IterationRecord)> {
    if m == 0 {
        return Err(Error::invalid("sample count m must be at least 1"));
    }
    let power = interval.power();
    let extra = interval.phi_min_angle();
    let mut ones = 0;
    for _ in 0..m {
        if hadamard_test_sample(ffu, register, power, extra, rng)? {
            ones += 1;
        }
    }
    let p_hat = ones as f64 / m as f64;
    let branch = Branch::from_p_hat(p_hat);
    let record = IterationRecord {
        level: interval.level(),
        power,
        phi_min: interval.phi_min(),
        samples: m,
        ones,
        p_hat,
        phi_hat: phase_from_frequency(p_hat, power, interval.phi_min()),
        branch,
    };
    Ok((interval.next(branch)?, record))
}

/// `l` chained trisection steps from a width-`pi` window.
pub fn ternary_estimate<F: FastForwardableUnitary + ?Sized>(
    ffu: &F,
    register: &StateVector,
    start: PhaseInterval,
    ell: u32,
    m: usize,
    rng: &mut RngStream,
) -> Result<EstimateResult> {
    if start.level() != 1 {
        return Err(Error::invalid("start range must have width pi (level 1)"));
    }
    if ell == 0 || ell >= super::interval::MAX_LEVEL {
        return Err(Error::invalid("iteration count l must lie in 1..52"));
    }
    let mut reg = register.clone();
    let mut interval = start;
    let mut transcript = Vec::with_capacity(ell as usize);
    for _ in 0..ell {
        let (next, rec) = ternary_iteration(ffu, &mut reg, interval, m, rng)?;
        transcript.push(rec);
        interval = next;
    }
    Ok(EstimateResult {
        estimate: interval.midpoint(),
        accuracy: interval.width(),
        confidence: trisection_confidence(ell, m),
        interval,
        transcript,
        post_state: reg,
    })
}

impl EstimateResult {
    /// Moves the estimate by `-shift * pi`, used after estimating a
    /// phase-shifted unitary.
    pub fn unshift(mut self, shift_over_pi: f64) -> Result<Self> {
        self.interval = self.interval.shifted(-shift_over_pi)?;
        self.estimate = wrap_angle(self.estimate - shift_over_pi * core::f64::consts::PI);
        Ok(self)
    }
}
