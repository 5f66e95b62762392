//! Brute-force time evolution through a full eigendecomposition.

use num_complex::Complex64 as C64;

use crate::dd::{cis_neg, DoubleDouble};
use crate::error::{Error, Result};
use crate::linalg::{DenseOperator, Spectrum};
use crate::tolerance::Tolerances;

/// Evolution time: an exact integer (any size up to `i128`) or a real.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Time {
    Integer(i128),
    Real(f64),
}

impl Time {
    /// `lambda * t` in double-double.
    pub fn scale(self, lambda: DoubleDouble) -> DoubleDouble {
        match self {
            Time::Integer(t) => lambda * DoubleDouble::from_i128(t),
            Time::Real(t) => lambda.mul_f64(t),
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Time::Integer(t) => t as f64,
            Time::Real(t) => t,
        }
    }
}

impl From<i128> for Time {
    fn from(t: i128) -> Self {
        Time::Integer(t)
    }
}

impl From<i64> for Time {
    fn from(t: i64) -> Self {
        Time::Integer(t as i128)
    }
}

impl From<u64> for Time {
    fn from(t: u64) -> Self {
        Time::Integer(t as i128)
    }
}

impl From<f64> for Time {
    fn from(t: f64) -> Self {
        Time::Real(t)
    }
}

/// `e^{-iHt}` with the oracle cap from [`Tolerances::DEFAULT`].
pub fn dense_evolve(h: &DenseOperator, t: impl Into<Time>) -> Result<DenseOperator> {
    dense_evolve_with(h, t.into(), &Tolerances::DEFAULT)
}

pub fn dense_evolve_with(h: &DenseOperator, t: Time, tol: &Tolerances) -> Result<DenseOperator> {
    let spec = oracle_spectrum(h, tol)?;
    Ok(evolve_spectrum(&spec, t))
}

/// Eigendecomposition guarded by the oracle cap.
pub fn oracle_spectrum(h: &DenseOperator, tol: &Tolerances) -> Result<Spectrum> {
    if h.dim() > tol.oracle_cap {
        return Err(Error::CapExceeded { dim: h.dim(), cap: tol.oracle_cap });
    }
    h.eigh()
}

/// Eigenphases are reduced modulo `2*pi` in double-double before
/// exponentiation, so huge integer times stay accurate.
pub fn evolve_spectrum(spec: &Spectrum, t: Time) -> DenseOperator {
    spec.map(|lambda| cis_neg(t.scale(lambda)))
}

pub fn evolve_vector(spec: &Spectrum, v: &[C64], t: Time) -> alloc::vec::Vec<C64> {
    spec.apply_fn(v, |lambda| cis_neg(t.scale(lambda)))
}
