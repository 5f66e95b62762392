//! Textbook phase estimation: `l` ancillas in `|+>`, controlled `U^{2^k}`
//! from ancilla `k`, inverse Fourier transform, measurement.
//!
//! The outcome `m` estimates `phi` as `2 pi m / 2^l`; ancilla `k` holds bit
//! `k` of `m`. Two engines are provided. The spectral engine decomposes the
//! input into eigencomponents and samples the outcome one bit at a time
//! (least significant first, each bit rotated by the ones already seen),
//! which reproduces the joint circuit statistics and post-state exactly
//! while never storing `2^l` amplitudes. The circuit engine builds the full
//! ancilla register and is used for small `l` and as a cross-check.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::dd::{cis_neg, DoubleDouble};
use crate::error::{Error, Result};
use crate::ff::{check_power, controlled_power_apply, Angle, FastForwardableUnitary};
use crate::gates;
use crate::linalg::DenseOperator;
use crate::rng::RngStream;
use crate::state::StateVector;

/// Largest ancilla count the spectral engine accepts.
pub const MAX_BITS: u32 = 62;

#[derive(Debug, Clone)]
pub struct FourierOutcome {
    pub outcome: u64,
    pub post_state: StateVector,
}

/// `Pr(|phi - 2 pi m / 2^l| > 2 pi / 2^b) <= 1 / (2 (2^{l-b} - 2))`, for
/// `b + 1 < l`.
pub fn fourier_tail_bound(ell: u32, b: u32) -> Result<f64> {
    if b + 1 >= ell {
        return Err(Error::invalid("tail bound needs b + 1 < l"));
    }
    Ok(1.0 / (2.0 * (2.0f64.powi((ell - b) as i32) - 2.0)))
}

/// `2 pi m / 2^l`.
pub fn outcome_phase(m: u64, ell: u32) -> f64 {
    2.0 * core::f64::consts::PI * m as f64 / 2.0f64.powi(ell as i32)
}

/// `2^l phi - 2 pi m`, in double-double.
fn scaled_offset(phase: DoubleDouble, ell: u32, m: u64) -> DoubleDouble {
    phase * DoubleDouble::from_i128(1i128 << ell) - DoubleDouble::TWO_PI * DoubleDouble::from_i128(m as i128)
}

/// Amplitude `2^{-l} sum_x e^{i x (phi - 2 pi m / 2^l)}` of outcome `m` on
/// an eigenvector with phase `phi`.
pub fn outcome_amplitude(phase: DoubleDouble, ell: u32, m: u64) -> C64 {
    let n = 2.0f64.powi(ell as i32);
    let big = scaled_offset(phase, ell, m);
    let delta = big / DoubleDouble::from_i128(1i128 << ell);
    let half = delta.mul_f64(0.5);
    let (hd, _) = half.rem_two_pi_symmetric();
    let s_den = hd.sin();
    if s_den.abs() < 1e-300 {
        // delta is a multiple of 2 pi: every term is 1
        return C64::new(1.0, 0.0);
    }
    let (hb, _) = big.mul_f64(0.5).rem_two_pi_symmetric();
    // e^{i (N - 1) delta / 2} sin(N delta / 2) / (N sin(delta / 2))
    let ph = cis_neg(-(big.mul_f64(0.5) - half));
    ph * (hb.sin() / (n * s_den))
}

pub fn outcome_probability(phase: DoubleDouble, ell: u32, m: u64) -> f64 {
    outcome_amplitude(phase, ell, m).norm_sqr()
}

/// Result of sampling the spectral engine on explicit components.
#[derive(Debug, Clone)]
pub struct SpectralSample {
    pub outcome: u64,
    /// Amplitude factor picked up by each component; equals
    /// [`outcome_amplitude`] at the sampled outcome.
    pub factors: Vec<C64>,
}

/// Samples an outcome for a mixture of eigencomponents with phases `phases`
/// and squared norms `weights`.
pub fn sample_outcome_spectral(
    phases: &[DoubleDouble],
    weights: &[f64],
    ell: u32,
    rng: &mut RngStream,
) -> Result<SpectralSample> {
    if ell == 0 || ell > MAX_BITS {
        return Err(Error::invalid("output bit count l must lie in 1..=62"));
    }
    if phases.len() != weights.len() || phases.is_empty() {
        return Err(Error::invalid("need one weight per eigencomponent"));
    }
    let mut factors = vec![C64::new(1.0, 0.0); phases.len()];
    let mut low: u64 = 0;
    for j in 0..ell {
        // theta = 2^{l-1-j} phi - pi low / 2^j
        let correction = DoubleDouble::PI * DoubleDouble::from_i128(low as i128) / DoubleDouble::from_i128(1i128 << j);
        let thetas: Vec<DoubleDouble> = phases
            .iter()
            .map(|p| *p * DoubleDouble::from_i128(1i128 << (ell - 1 - j)) - correction)
            .collect();
        let mut p1 = 0.0;
        let mut tot = 0.0;
        for ((th, w), f) in thetas.iter().zip(weights).zip(&factors) {
            let (t, _) = th.rem_two_pi_symmetric();
            let wf = w * f.norm_sqr();
            p1 += wf * (t / 2.0).sin().powi(2);
            tot += wf;
        }
        if tot <= 0.0 {
            return Err(Error::numerical("phase estimation branch lost all weight"));
        }
        let bit = rng.bernoulli(p1 / tot);
        for (th, f) in thetas.iter().zip(factors.iter_mut()) {
            let e = cis_neg(-*th);
            let a = if bit { (C64::new(1.0, 0.0) - e) / 2.0 } else { (C64::new(1.0, 0.0) + e) / 2.0 };
            *f *= a;
        }
        if bit {
            low |= 1 << j;
        }
    }
    Ok(SpectralSample { outcome: low, factors })
}

/// Phase estimation of `U` on `input` with `l` output bits. Powers up to
/// `2^{l-1}` must lie in the range of `ffu`.
///
/// Unitaries with a declared per-call error are run through the circuit
/// engine so that their actual `apply_power` is used; exact ones go through
/// the spectral engine.
pub fn fourier_phase_estimate<F: FastForwardableUnitary + ?Sized>(
    ffu: &F,
    ell: u32,
    input: &StateVector,
    rng: &mut RngStream,
) -> Result<FourierOutcome> {
    if ell == 0 || ell > MAX_BITS {
        return Err(Error::invalid("output bit count l must lie in 1..=62"));
    }
    check_power(1i128 << (ell - 1), ffu.range())?;
    if input.dim() != ffu.dim() {
        return Err(Error::DimensionMismatch { expected: ffu.dim(), found: input.dim() });
    }
    if ffu.alpha() > 0.0 {
        return fourier_phase_estimate_circuit(ffu, ell, input, rng);
    }
    let comps = ffu.eigen_components(input.amplitudes())?;
    let phases: Vec<DoubleDouble> = comps.iter().map(|c| c.phase).collect();
    let weights: Vec<f64> = comps.iter().map(|c| c.weight).collect();
    let s = sample_outcome_spectral(&phases, &weights, ell, rng)?;
    let mut post = vec![C64::new(0.0, 0.0); input.dim()];
    for (c, f) in comps.iter().zip(&s.factors) {
        for (p, v) in post.iter_mut().zip(&c.vector) {
            *p += f * v;
        }
    }
    let post_state = StateVector::with_basis(input.basis().clone(), normalize(post)?)?;
    Ok(FourierOutcome { outcome: s.outcome, post_state })
}

fn normalize(mut v: Vec<C64>) -> Result<Vec<C64>> {
    let n: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n == 0.0 {
        return Err(Error::numerical("post-measurement state vanished"));
    }
    for z in v.iter_mut() {
        *z /= n;
    }
    Ok(v)
}

/// Inverse quantum Fourier transform on `l` qubits:
/// `|x> -> 2^{-l/2} sum_m e^{-2 pi i x m / 2^l} |m>`.
pub fn inverse_qft(ell: u32) -> DenseOperator {
    let d = 1usize << ell;
    let s = 1.0 / (d as f64).sqrt();
    DenseOperator::from_fn(d, |m, x| {
        let k = (x * m) % d;
        let a = -2.0 * core::f64::consts::PI * k as f64 / d as f64;
        C64::new(a.cos() * s, a.sin() * s)
    })
}

/// Largest ancilla-plus-register qubit count the circuit engine builds.
pub const CIRCUIT_QUBITS: usize = 22;

/// Unmeasured circuit output: ancillas on qubits `0..l`, register above.
pub fn fourier_premeasure_circuit<F: FastForwardableUnitary + ?Sized>(
    ffu: &F,
    ell: u32,
    input: &StateVector,
) -> Result<StateVector> {
    let w = input.num_qubits().ok_or(Error::NotQubitBasis)?;
    let l = ell as usize;
    if l == 0 || l + w > CIRCUIT_QUBITS || l > 12 {
        return Err(Error::invalid("circuit engine needs 1 <= l <= 12 and l + register <= 22 qubits"));
    }
    check_power(1i128 << (l - 1), ffu.range())?;
    let mut s = input.tensor(&StateVector::zero(l))?;
    let h = gates::hadamard();
    for q in 0..l {
        s.apply_unitary(&h, &[q])?;
    }
    for q in 0..l {
        controlled_power_apply(&mut s, ffu, 1i128 << q, q, l..l + w, Angle::zero())?;
    }
    let targets: Vec<usize> = (0..l).collect();
    s.apply_unitary(&inverse_qft(ell), &targets)?;
    Ok(s)
}

/// Phase estimation by explicit statevector simulation of the circuit.
pub fn fourier_phase_estimate_circuit<F: FastForwardableUnitary + ?Sized>(
    ffu: &F,
    ell: u32,
    input: &StateVector,
    rng: &mut RngStream,
) -> Result<FourierOutcome> {
    let s = fourier_premeasure_circuit(ffu, ell, input)?;
    let l = ell as usize;
    let targets: Vec<usize> = (0..l).collect();
    let (m, post) = s.measure_qubits(&targets, rng)?;
    let w = input.num_qubits().ok_or(Error::NotQubitBasis)?;
    let amps: Vec<C64> = (0..input.dim()).map(|r| post.amplitude((r << l) | m as usize)).collect();
    Ok(FourierOutcome { outcome: m, post_state: StateVector::normalized(w, amps)? })
}
