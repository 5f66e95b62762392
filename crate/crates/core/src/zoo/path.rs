//! The path Hamiltonian `H = A_path / 2` on vertices `0..L`.

use alloc::vec::Vec;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::DenseOperator;

/// `E_k = cos(pi k / (L + 1))`.
pub fn path_energy(len: usize, k: usize) -> f64 {
    (core::f64::consts::PI * k as f64 / (len + 1) as f64).cos()
}

/// Normalized `psi_k(j) = sqrt(2/(L+1)) sin(pi k (j + 1) / (L + 1))`.
pub fn path_vector(len: usize, k: usize) -> Vec<f64> {
    let s = (2.0 / (len + 1) as f64).sqrt();
    (0..len).map(|j| s * (core::f64::consts::PI * (k * (j + 1)) as f64 / (len + 1) as f64).sin()).collect()
}

/// `(E_k, psi_k)` for `k = 1..=L`, energies descending.
pub fn path_spectrum(len: usize) -> Result<Vec<(f64, Vec<f64>)>> {
    if len == 0 {
        return Err(Error::invalid("path length L must be at least 1"));
    }
    Ok((1..=len).map(|k| (path_energy(len, k), path_vector(len, k))).collect())
}

/// `2 / (L + 1)^2`, a lower bound on every gap of the path spectrum.
pub fn path_gap_bound(len: usize) -> f64 {
    2.0 / ((len + 1) as f64).powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathHamiltonian {
    pub len: usize,
}

impl PathHamiltonian {
    pub fn new(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::invalid("path length L must be at least 1"));
        }
        Ok(Self { len })
    }

    pub fn dense(&self) -> DenseOperator {
        DenseOperator::from_fn(self.len, |r, c| if r.abs_diff(c) == 1 { C64::new(0.5, 0.0) } else { C64::new(0.0, 0.0) })
    }

    /// `H v` without forming the matrix.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.len)
            .map(|j| 0.5 * (if j > 0 { v[j - 1] } else { 0.0 } + if j + 1 < self.len { v[j + 1] } else { 0.0 }))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        let s = path_spectrum(1).unwrap();
        assert!(s[0].0.abs() < 1e-16 && (s[0].1[0] - 1.0).abs() < 1e-15);
        let s = path_spectrum(3).unwrap();
        let r = core::f64::consts::FRAC_1_SQRT_2;
        for (e, want) in s.iter().map(|p| p.0).zip([r, 0.0, -r]) {
            assert!((e - want).abs() < 1e-15);
        }
        for (x, want) in s[0].1.iter().zip([0.5, r, 0.5]) {
            assert!((x - want).abs() < 1e-15);
        }
    }

    #[test]
    fn eigenpairs_and_orthonormality() {
        for len in [2usize, 5, 17, 64] {
            let h = PathHamiltonian::new(len).unwrap();
            let spec = path_spectrum(len).unwrap();
            for (e, v) in &spec {
                let hv = h.apply(v);
                assert!(hv.iter().zip(v).all(|(a, b)| (a - e * b).abs() < 1e-10));
                assert!((v.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
            }
            let dense = h.dense().eigh().unwrap().values_f64();
            let mut ours: Vec<f64> = spec.iter().map(|p| p.0).collect();
            ours.reverse();
            assert!(dense.iter().zip(&ours).all(|(a, b)| (a - b).abs() < 1e-10));
        }
    }

    #[test]
    fn gap_sweep() {
        for len in 2..=10_000usize {
            let g = path_energy(len, 1) - path_energy(len, 2);
            assert!(g >= path_gap_bound(len), "L={len}");
        }
    }
}
