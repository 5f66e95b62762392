//! Telling `H` from `H + eps` with a probe of total duration `dt`, and the
//! optimal two-state discrimination error that saturates
//! `P_err >= (1 - sin(eps dt / 2)) / 2`.

use alloc::vec::Vec;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::evolve::{dense_evolve, Time};
use crate::gates;
use crate::linalg::DenseOperator;
use crate::state::{inner, StateVector};

/// Minimal error for two equiprobable pure states,
/// `(1 - sqrt(1 - |<a|b>|^2)) / 2`. The square root is taken of the squared
/// norm of the part of `b` orthogonal to `a`, which stays accurate for
/// nearly parallel states.
pub fn helstrom_error(a: &StateVector, b: &StateVector) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    let ov = inner(a.amplitudes(), b.amplitudes());
    let perp: f64 = b.amplitudes().iter().zip(a.amplitudes()).map(|(y, x)| (y - ov * x).norm_sqr()).sum();
    Ok((1.0 - perp.min(1.0).sqrt()) / 2.0)
}

/// The same error from the trace norm, `(1 - ||rho_a - rho_b||_1 / 2) / 2`,
/// via an eigendecomposition.
pub fn helstrom_error_trace_norm(a: &StateVector, b: &StateVector) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    let d = a.dim();
    let diff = DenseOperator::from_fn(d, |r, c| {
        a.amplitude(r) * a.amplitude(c).conj() - b.amplitude(r) * b.amplitude(c).conj()
    });
    let tn: f64 = diff.eigh()?.values_f64().iter().map(|x| x.abs()).sum();
    Ok((1.0 - tn / 2.0) / 2.0)
}

/// `(1 - sin(eps dt / 2)) / 2`.
pub fn teup_bound(eps: f64, dt: f64) -> f64 {
    (1.0 - (eps * dt / 2.0).sin()) / 2.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscriminationExperiment {
    pub eps: f64,
    pub dt: f64,
    /// Branch states after the probe under `H` and `H + eps`.
    pub branches: [StateVector; 2],
    pub achieved: f64,
    /// Cross-check through the trace norm.
    pub achieved_trace_norm: f64,
    pub bound: f64,
    pub gap: f64,
}

/// Ramsey probe: control in `|+>`, system in an eigenstate of `H`, the
/// controlled evolution for `dt` under `H` or `H + eps`. The two branch
/// states overlap by `cos(eps dt / 2)` and their Helstrom error meets the
/// bound.
pub fn teup_equality_check(h: &DenseOperator, eigenstate: &StateVector, eps: f64, dt: f64) -> Result<DiscriminationExperiment> {
    if !(eps * dt >= 0.0 && eps * dt < core::f64::consts::PI) {
        return Err(Error::invalid("need 0 <= eps * dt < pi"));
    }
    let n = eigenstate.num_qubits().ok_or(Error::NotQubitBasis)?;
    let branch = |shift: f64| -> Result<StateVector> {
        let d = h.dim();
        let hk = h.add(&DenseOperator::identity(d).scale(C64::new(shift, 0.0)));
        let u = dense_evolve(&hk, Time::Real(dt))?;
        // control on qubit 0, system above it
        let cu = DenseOperator::from_fn(2 * d, |r, c| match (r & 1, c & 1) {
            (0, 0) if r == c => C64::new(1.0, 0.0),
            (1, 1) => u.get(r >> 1, c >> 1),
            _ => C64::new(0.0, 0.0),
        });
        let mut s = eigenstate.tensor(&StateVector::zero(1))?;
        s.apply_unitary(&gates::hadamard(), &[0])?;
        let targets: Vec<usize> = (0..=n).collect();
        s.apply_unitary(&cu, &targets)?;
        Ok(s)
    };
    let b0 = branch(0.0)?;
    let b1 = branch(eps)?;
    let achieved = helstrom_error(&b0, &b1)?;
    let achieved_trace_norm = helstrom_error_trace_norm(&b0, &b1)?;
    let bound = teup_bound(eps, dt);
    Ok(DiscriminationExperiment { eps, dt, branches: [b0, b1], achieved, achieved_trace_norm, bound, gap: (achieved - bound).abs() })
}

/// `points` equally spaced values of `eps dt` strictly inside `(0, pi)`.
pub fn sweep_points(points: usize) -> Vec<f64> {
    (1..=points).map(|k| core::f64::consts::PI * k as f64 / (points + 1) as f64).collect()
}

/// Single-qubit instance used by the sweep: `H = 0.37 sigma_z`, eigenstate
/// `|0>`, `dt = 1`.
pub fn sweep(points: usize) -> Result<Vec<DiscriminationExperiment>> {
    let h = gates::pauli_z().scale(C64::new(0.37, 0.0));
    let psi = StateVector::zero(1);
    sweep_points(points).into_iter().map(|x| teup_equality_check(&h, &psi, x, 1.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn trivial_cases() {
        let a = StateVector::zero(1);
        let b = StateVector::basis_state(1, 1).unwrap();
        assert!((helstrom_error(&a, &a).unwrap() - 0.5).abs() < 1e-15);
        assert!(helstrom_error(&a, &b).unwrap().abs() < 1e-15);
    }

    #[test]
    fn overlap_formula_matches_trace_norm() {
        for k in 0..20 {
            let th = 0.15 * k as f64;
            let a = StateVector::zero(1);
            let b = StateVector::from_amplitudes(1, vec![C64::new((th / 2.0).cos(), 0.0), C64::new(0.0, (th / 2.0).sin())]).unwrap();
            let x = helstrom_error(&a, &b).unwrap();
            let y = helstrom_error_trace_norm(&a, &b).unwrap();
            assert!((x - (1.0 - (th / 2.0).sin()) / 2.0).abs() < 1e-14);
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn saturation_and_monotonicity() {
        let runs = sweep(32).unwrap();
        let mut prev = 0.5;
        for r in &runs {
            assert!(r.gap <= 1e-12, "{}", r.gap);
            assert!((r.achieved - r.achieved_trace_norm).abs() < 1e-12);
            assert!(r.achieved < prev);
            prev = r.achieved;
        }
    }

    #[test]
    fn endpoints() {
        let h = gates::pauli_z();
        let psi = StateVector::zero(1);
        let r = teup_equality_check(&h, &psi, 0.0, 1.0).unwrap();
        assert!((r.achieved - 0.5).abs() < 1e-15 && (r.bound - 0.5).abs() < 1e-15);
        let r = teup_equality_check(&h, &psi, core::f64::consts::PI - 1e-9, 1.0).unwrap();
        assert!(r.achieved < 1e-15 && r.gap < 1e-12);
        let r = teup_equality_check(&h, &psi, 2.0 / 3.0, 1.0).unwrap();
        assert!((r.achieved - (1.0 - (1.0f64 / 3.0).sin()) / 2.0).abs() < 1e-12);
        // the contradiction threshold: 1/3 > P_err fails at equality
        assert!(r.achieved > 1.0 / 3.0);
        assert!(teup_equality_check(&h, &psi, 3.2, 1.0).is_err());
    }
}
