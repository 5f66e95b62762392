//! Grover search recast as an energy measurement of `H = 2 sigma_y / sqrt(N)`
//! on `span{|w>, |s'>}`, implemented by phase estimation of the iterate
//! `U = (1 - 2|w><w|)(2|s><s| - 1)`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::dd::DoubleDouble;
use crate::error::{Error, Result};
use crate::evolve::dense_evolve;
use crate::ff::{EigenComponent, FastForwardableUnitary};
use crate::gates;
use crate::linalg::DenseOperator;
use crate::pe::fourier::fourier_phase_estimate;
use crate::rng::RngStream;
use crate::state::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroverInstance {
    pub size: usize,
    pub marked: usize,
}

impl GroverInstance {
    pub fn new(size: usize, marked: usize) -> Result<Self> {
        if size < 4 || !size.is_power_of_two() {
            return Err(Error::invalid("search space N must be a power of two, at least 4"));
        }
        if marked >= size {
            return Err(Error::invalid("marked item must lie in 0..N"));
        }
        Ok(Self { size, marked })
    }

    pub fn qubits(&self) -> usize {
        self.size.trailing_zeros() as usize
    }
}

/// Two-level picture in the basis `(|w>, |s'>)`.
#[derive(Debug, Clone)]
pub struct GroverEffective {
    pub u: DenseOperator,
    pub h: DenseOperator,
    /// `||e^{-iH} - U||`.
    pub error: f64,
}

/// `U = [[N-2, -2 sqrt(N-1)], [2 sqrt(N-1), N-2]] / N` and `H = 2 sigma_y / sqrt(N)`.
pub fn grover_effective_hamiltonian(size: usize) -> Result<GroverEffective> {
    if size < 4 {
        return Err(Error::invalid("search space N must be at least 4"));
    }
    let n = size as f64;
    let c = (n - 2.0) / n;
    let s = 2.0 * (n - 1.0).sqrt() / n;
    let u = DenseOperator::from_real_rows(2, &[c, -s, s, c])?;
    let h = gates::pauli_y().scale(C64::new(2.0 / n.sqrt(), 0.0));
    let error = dense_evolve(&h, 1.0)?.sub(&u).operator_norm();
    Ok(GroverEffective { u, h, error })
}

/// The full `N`-dimensional iterate.
#[derive(Debug, Clone, Copy)]
pub struct GroverIterate {
    inst: GroverInstance,
}

/// Powers beyond this are refused; the iterate is applied literally.
pub const ITERATE_RANGE: u128 = 1 << 24;

impl GroverIterate {
    pub fn new(inst: GroverInstance) -> Self {
        Self { inst }
    }

    fn step(&self, amps: &mut [C64], inverse: bool) {
        let w = self.inst.marked;
        let diffuse = |a: &mut [C64]| {
            let mean: C64 = a.iter().sum::<C64>() / a.len() as f64;
            for z in a.iter_mut() {
                *z = mean * 2.0 - *z;
            }
        };
        if inverse {
            amps[w] = -amps[w];
            diffuse(amps);
        } else {
            diffuse(amps);
            amps[w] = -amps[w];
        }
    }

    /// `|s'>`: uniform over the unmarked items.
    pub fn s_prime(&self) -> Vec<C64> {
        let n = self.inst.size;
        let a = 1.0 / ((n - 1) as f64).sqrt();
        (0..n).map(|i| if i == self.inst.marked { C64::new(0.0, 0.0) } else { C64::new(a, 0.0) }).collect()
    }

    /// Matrix of the iterate restricted to `(|w>, |s'>)`.
    pub fn block(&self) -> Result<DenseOperator> {
        let n = self.inst.size;
        let mut w = vec![C64::new(0.0, 0.0); n];
        w[self.inst.marked] = C64::new(1.0, 0.0);
        let sp = self.s_prime();
        let basis = [w, sp];
        let mut entries = vec![C64::new(0.0, 0.0); 4];
        for (c, v) in basis.iter().enumerate() {
            let mut x = v.clone();
            self.apply_power(&mut x, 1)?;
            for (r, b) in basis.iter().enumerate() {
                entries[2 * r + c] = b.iter().zip(&x).map(|(p, q)| p.conj() * q).sum();
            }
        }
        DenseOperator::from_rows(2, entries)
    }
}

impl FastForwardableUnitary for GroverIterate {
    fn dim(&self) -> usize {
        self.inst.size
    }

    fn range(&self) -> u128 {
        ITERATE_RANGE
    }

    fn apply_power(&self, amps: &mut [C64], power: i128) -> Result<()> {
        if amps.len() != self.inst.size {
            return Err(Error::DimensionMismatch { expected: self.inst.size, found: amps.len() });
        }
        crate::ff::check_power(power, ITERATE_RANGE)?;
        for _ in 0..power.unsigned_abs() {
            self.step(amps, power < 0);
        }
        Ok(())
    }

    /// Eigenphases `+-phi` with `e^{i phi} = (N - 2 + 2i sqrt(N-1)) / N` on
    /// `(|w> -+ i|s'>)/sqrt 2`, and `pi` on the complement of the plane.
    fn eigen_components(&self, amps: &[C64]) -> Result<Vec<EigenComponent>> {
        let n = self.inst.size;
        if amps.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: amps.len() });
        }
        let wi = self.inst.marked;
        let sp = self.s_prime();
        let a = amps[wi];
        let b: C64 = sp.iter().zip(amps).map(|(p, q)| p.conj() * q).sum();
        let nf = n as f64;
        let phi = DoubleDouble::from_f64((2.0 * (nf - 1.0).sqrt()).atan2(nf - 2.0));
        let r = core::f64::consts::FRAC_1_SQRT_2;
        let i = C64::new(0.0, 1.0);
        let mut out = Vec::new();
        for (sign, phase) in [(-1.0, phi), (1.0, DoubleDouble::TWO_PI - phi)] {
            // v = (w + sign i s') / sqrt 2
            let coef = (a + i * b * (-sign)) * r;
            let mut vector: Vec<C64> = sp.iter().map(|x| coef * r * i * sign * x).collect();
            vector[wi] = coef * r;
            out.push(EigenComponent { phase, weight: coef.norm_sqr(), vector });
        }
        let mut rest: Vec<C64> = amps.iter().zip(&sp).map(|(x, s)| x - b * s).collect();
        rest[wi] = C64::new(0.0, 0.0);
        let weight: f64 = rest.iter().map(|z| z.norm_sqr()).sum();
        if weight > 1e-28 {
            out.push(EigenComponent { phase: DoubleDouble::PI, weight, vector: rest });
        }
        out.retain(|c| c.weight > 1e-28);
        Ok(out)
    }
}

/// `b = ceil(4 + log2(N) / 2)`.
pub fn grover_accuracy_bits(size: usize) -> u32 {
    let lg = size.trailing_zeros();
    4 + lg.div_ceil(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroverRun {
    pub found: usize,
    pub success: bool,
    pub outcome: u64,
    pub ell: u32,
    /// Controlled iterate applications, `2^l - 1`.
    pub iterate_calls: u64,
}

/// Phase estimation of `U` on `|s>` with `l = b + 10` bits, then a
/// measurement in the standard basis.
pub fn grover_via_energy_measurement(inst: GroverInstance, rng: &mut RngStream) -> Result<GroverRun> {
    let ell = grover_accuracy_bits(inst.size) + 10;
    let it = GroverIterate::new(inst);
    let n = inst.qubits();
    let amp = C64::new(1.0 / (inst.size as f64).sqrt(), 0.0);
    let s = StateVector::from_amplitudes(n, vec![amp; inst.size])?;
    let pe = fourier_phase_estimate(&it, ell, &s, rng)?;
    let found = pe.post_state.sample_label(rng) as usize;
    Ok(GroverRun {
        found,
        success: found == inst.marked,
        outcome: pe.outcome,
        ell,
        iterate_calls: (1u64 << ell) - 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::StateVector;

    #[test]
    fn four_items() {
        let g = grover_effective_hamiltonian(4).unwrap();
        let h3 = 3f64.sqrt() / 2.0;
        let want = DenseOperator::from_real_rows(2, &[0.5, -h3, h3, 0.5]).unwrap();
        assert!(g.u.sub(&want).max_abs() < 1e-15);
        let rot = dense_evolve(&g.h, 1.0).unwrap();
        let want = DenseOperator::from_real_rows(2, &[1f64.cos(), -1f64.sin(), 1f64.sin(), 1f64.cos()]).unwrap();
        assert!(rot.sub(&want).max_abs() < 1e-14);
        // rotation by 1 rad against pi/3: ||diff|| = 2 sin((pi/3 - 1)/2)
        let d = 2.0 * ((core::f64::consts::FRAC_PI_3 - 1.0) / 2.0).abs().sin();
        assert!((g.error - d).abs() < 1e-12);
    }

    #[test]
    fn eigenstates_of_h() {
        for n in [4usize, 16, 256] {
            let g = grover_effective_hamiltonian(n).unwrap();
            let e = 2.0 / (n as f64).sqrt();
            let r = core::f64::consts::FRAC_1_SQRT_2;
            for (sign, val) in [(1.0, -e), (-1.0, e)] {
                // (|s'> + sign i |w>) / sqrt 2 in the basis (|w>, |s'>)
                let v = vec![C64::new(0.0, sign * r), C64::new(r, 0.0)];
                let hv = g.h.apply(&v);
                for (x, y) in hv.iter().zip(&v) {
                    assert!((x - y * val).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn error_times_n_is_bounded() {
        let mut prods = Vec::new();
        for n in [16usize, 64, 256, 1024, 1 << 14] {
            prods.push(grover_effective_hamiltonian(n).unwrap().error * n as f64);
        }
        for p in &prods {
            assert!(*p < 2.0, "{prods:?}");
        }
    }

    #[test]
    fn block_matches_two_level_form() {
        for (n, w) in [(4usize, 3usize), (16, 5), (64, 0), (256, 200), (1024, 17)] {
            let it = GroverIterate::new(GroverInstance::new(n, w).unwrap());
            let got = it.block().unwrap();
            let want = grover_effective_hamiltonian(n).unwrap().u;
            assert!(got.sub(&want).max_abs() < 1e-12);
        }
    }

    #[test]
    fn eigen_components_reassemble() {
        let inst = GroverInstance::new(32, 9).unwrap();
        let it = GroverIterate::new(inst);
        let mut rng = RngStream::new(4, 0);
        let x: Vec<C64> = (0..32).map(|_| C64::new(rng.normal(), rng.normal())).collect();
        let comps = it.eigen_components(&x).unwrap();
        let mut sum = vec![C64::new(0.0, 0.0); 32];
        for c in &comps {
            let mut ux = c.vector.clone();
            it.apply_power(&mut ux, 1).unwrap();
            let ph = C64::from_polar(1.0, c.phase.to_f64());
            for (k, (a, b)) in ux.iter().zip(&c.vector).enumerate() {
                assert!((a - b * ph).norm() < 1e-12);
                sum[k] += b;
            }
        }
        for (a, b) in sum.iter().zip(&x) {
            assert!((a - b).norm() < 1e-12);
        }
        let sv = StateVector::normalized(5, x.clone()).unwrap();
        assert!(sv.norm_sqr() > 0.0);
    }

    #[test]
    fn accuracy_bits() {
        assert_eq!(grover_accuracy_bits(4), 5);
        assert_eq!(grover_accuracy_bits(256), 8);
        assert_eq!(grover_accuracy_bits(64), 7);
        assert_eq!(grover_accuracy_bits(1024), 9);
    }

    #[test]
    fn finds_marked_item() {
        let mut rng = RngStream::new(12, 0);
        for (n, w) in [(4usize, 2usize), (256, 77)] {
            let inst = GroverInstance::new(n, w).unwrap();
            let trials = 300;
            let hits = (0..trials).filter(|_| grover_via_energy_measurement(inst, &mut rng).unwrap().success).count();
            assert!(hits * 3 >= trials, "N={n}: {hits}");
        }
    }

    #[test]
    fn iterate_count_scales_as_sqrt_n() {
        let mut rng = RngStream::new(13, 0);
        let a = grover_via_energy_measurement(GroverInstance::new(64, 1).unwrap(), &mut rng).unwrap();
        let b = grover_via_energy_measurement(GroverInstance::new(1024, 1).unwrap(), &mut rng).unwrap();
        let ratio = b.iterate_calls as f64 / a.iterate_calls as f64;
        assert!((2.0..=8.0).contains(&ratio), "{ratio}");
        let c = grover_via_energy_measurement(GroverInstance::new(256, 1).unwrap(), &mut rng).unwrap();
        assert_eq!(c.ell, 18);
        assert!(c.iterate_calls <= (1 << 18) - 1);
    }
}
