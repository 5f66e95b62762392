//! Multiplication by `y` modulo `N` and the tight-binding Hamiltonian
//! `H = U + U^dagger` it generates.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::dd::DoubleDouble;
use crate::error::{Error, Result};
use crate::ff::{check_power, EigenComponent, FastForwardableUnitary, UNBOUNDED};
use crate::linalg::DenseOperator;
use crate::state::{norm_sqr, StateVector};
use crate::tolerance::Tolerances;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[inline]
fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

/// `y^t mod N` by square-and-multiply.
pub fn mod_exp(y: u64, t: u128, n: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::invalid("modulus N must be at least 2"));
    }
    let mut base = y % n;
    let mut acc = 1 % n;
    let mut e = t;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, n);
        }
        base = mul_mod(base, base, n);
        e >>= 1;
    }
    Ok(acc)
}

/// Inverse of `y` modulo `n` via the extended Euclidean algorithm.
pub fn mod_inverse(y: u64, n: u64) -> Result<u64> {
    let (mut r0, mut r1) = (n as i128, (y % n) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return Err(Error::NotCoprime(y, n));
    }
    Ok(s0.rem_euclid(n as i128) as u64)
}

/// Smallest `r >= 1` with `y^r = 1 (mod N)`.
pub fn multiplicative_order(y: u64, n: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::invalid("modulus N must be at least 2"));
    }
    if gcd(y, n) != 1 {
        return Err(Error::NotCoprime(y, n));
    }
    let y = y % n;
    let mut x = y;
    let mut r = 1;
    while x != 1 {
        x = mul_mod(x, y, n);
        r += 1;
    }
    Ok(r)
}

/// `(x, xy, xy^2, ...)` until the sequence returns to `x`.
pub fn orbit_of(x: u64, y: u64, n: u64) -> Result<Vec<u64>> {
    if n < 2 {
        return Err(Error::invalid("modulus N must be at least 2"));
    }
    if x >= n {
        return Err(Error::invalid("orbit start x must satisfy 0 <= x < N"));
    }
    if gcd(y, n) != 1 {
        return Err(Error::NotCoprime(y, n));
    }
    let mut orbit = vec![x];
    let mut z = mul_mod(x, y, n);
    while z != x {
        orbit.push(z);
        z = mul_mod(z, y, n);
    }
    Ok(orbit)
}

/// Partition of `{0, ..., N-1}` into orbits under multiplication by `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitDecomposition {
    pub orbits: Vec<Vec<u64>>,
}

impl OrbitDecomposition {
    pub fn new(y: u64, n: u64) -> Result<Self> {
        let mut seen = vec![false; n as usize];
        let mut orbits = Vec::new();
        for x in 0..n {
            if seen[x as usize] {
                continue;
            }
            let o = orbit_of(x, y, n)?;
            for &z in &o {
                seen[z as usize] = true;
            }
            orbits.push(o);
        }
        Ok(Self { orbits })
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.orbits.iter().map(Vec::len).collect()
    }
}

/// Sign relating the Fourier index `k` of an orbit state to its eigenphase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseConvention {
    /// `U psi_k = e^{+2 pi i k / s} psi_k`
    Direct,
    /// `U psi_k = e^{-2 pi i k / s} psi_k`
    Conjugate,
}

#[derive(Debug, Clone)]
pub struct ShorUnitary {
    modulus: u64,
    y: u64,
    y_inv: u64,
    width: usize,
    orbits: OrbitDecomposition,
    convention: PhaseConvention,
}

impl ShorUnitary {
    pub fn new(modulus: u64, y: u64) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::invalid("modulus N must be at least 2"));
        }
        if gcd(y, modulus) != 1 {
            return Err(Error::NotCoprime(y, modulus));
        }
        if modulus > 1 << 24 {
            return Err(Error::CapExceeded { dim: modulus as usize, cap: 1 << 24 });
        }
        let width = (64 - modulus.leading_zeros()) as usize;
        let mut u = Self {
            modulus,
            y: y % modulus,
            y_inv: mod_inverse(y, modulus)?,
            width,
            orbits: OrbitDecomposition::new(y, modulus)?,
            convention: PhaseConvention::Conjugate,
        };
        u.convention = u.detect_convention();
        Ok(u)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn multiplier(&self) -> u64 {
        self.y
    }

    /// Register width `n = bit-length(N)`.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn orbits(&self) -> &OrbitDecomposition {
        &self.orbits
    }

    pub fn order(&self) -> u64 {
        multiplicative_order(self.y, self.modulus).expect("coprime by construction")
    }

    /// Multiplier applied by `U^t`.
    pub fn power_multiplier(&self, t: i128) -> u64 {
        let base = if t < 0 { self.y_inv } else { self.y };
        mod_exp(base, t.unsigned_abs(), self.modulus).expect("modulus >= 2")
    }

    /// Dense `2^n`-dimensional permutation matrix.
    pub fn dense(&self) -> DenseOperator {
        let d = 1usize << self.width;
        let cols: Vec<usize> = (0..d).map(|x| self.image(x as u64, self.y) as usize).collect();
        DenseOperator::from_fn(d, |r, c| {
            if cols[c] == r { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }
        })
    }

    #[inline]
    fn image(&self, x: u64, mult: u64) -> u64 {
        if x < self.modulus {
            mul_mod(x, mult, self.modulus)
        } else {
            x
        }
    }

    /// Applies `U` once to the orbit state with `k = 1` of the orbit of 1 and
    /// reads off which sign the eigenphase carries.
    pub fn detect_convention(&self) -> PhaseConvention {
        let orbit = orbit_of(1 % self.modulus, self.y, self.modulus).expect("valid");
        if orbit.len() < 3 {
            // k/s in {0, 1/2}: both conventions agree
            return PhaseConvention::Conjugate;
        }
        let psi = shor_eigenstate(self.width, &orbit, 1).expect("k < s");
        let mut out = psi.amplitudes().to_vec();
        self.apply_power(&mut out, 1).expect("in range");
        let lam: C64 = psi.amplitudes().iter().zip(&out).map(|(a, b)| a.conj() * b).sum();
        if lam.im > 0.0 {
            PhaseConvention::Direct
        } else {
            PhaseConvention::Conjugate
        }
    }

    pub fn convention(&self) -> PhaseConvention {
        self.convention
    }

    /// Eigenphase in `[0, 2pi)` of the orbit state with index `k` on an orbit
    /// of size `s`.
    pub fn eigenphase(&self, k: u64, s: u64) -> f64 {
        let theta = DoubleDouble::TWO_PI.mul_f64(k as f64) / DoubleDouble::from_f64(s as f64);
        match self.convention {
            PhaseConvention::Direct => theta.rem_two_pi().0,
            PhaseConvention::Conjugate => (-theta).rem_two_pi().0,
        }
    }
}

impl FastForwardableUnitary for ShorUnitary {
    fn dim(&self) -> usize {
        1 << self.width
    }

    fn range(&self) -> u128 {
        UNBOUNDED
    }

    fn apply_power(&self, amps: &mut [C64], power: i128) -> Result<()> {
        check_power(power, self.range())?;
        if amps.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: amps.len() });
        }
        let c = self.power_multiplier(power);
        if c == 1 {
            return Ok(());
        }
        let n = self.modulus as usize;
        let old: Vec<C64> = amps[..n].to_vec();
        for (x, a) in old.into_iter().enumerate() {
            amps[mul_mod(x as u64, c, self.modulus) as usize] = a;
        }
        Ok(())
    }

    /// Exact orbit Fourier decomposition.
    fn eigen_components(&self, amps: &[C64]) -> Result<Vec<EigenComponent>> {
        if amps.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: amps.len() });
        }
        let conj = self.convention == PhaseConvention::Conjugate;
        let mut groups: BTreeMap<(u64, u64), Vec<C64>> = BTreeMap::new();
        let mut fixed = vec![C64::new(0.0, 0.0); self.dim()];
        for x in (self.modulus as usize)..self.dim() {
            fixed[x] = amps[x];
        }
        groups.insert((0, 1), fixed);
        for orbit in &self.orbits.orbits {
            let s = orbit.len() as u64;
            if orbit.iter().all(|&x| amps[x as usize] == C64::new(0.0, 0.0)) {
                continue;
            }
            for k in 0..s {
                let mut c = C64::new(0.0, 0.0);
                let mut basis = Vec::with_capacity(orbit.len());
                for (j, &x) in orbit.iter().enumerate() {
                    let ang = 2.0 * core::f64::consts::PI * ((j as u64 * k) % s) as f64 / s as f64;
                    let e = C64::new(ang.cos(), ang.sin()) / (s as f64).sqrt();
                    basis.push(e);
                    c += e.conj() * amps[x as usize];
                }
                if c == C64::new(0.0, 0.0) {
                    continue;
                }
                // eigenphase numerator over s, reduced
                let num = if conj { (s - k) % s } else { k };
                let g = gcd(num, s);
                let key = (num / g, s / g);
                let v = groups.entry(key).or_insert_with(|| vec![C64::new(0.0, 0.0); self.dim()]);
                for (e, &x) in basis.iter().zip(orbit) {
                    v[x as usize] += c * e;
                }
            }
        }
        let mut out = Vec::new();
        for ((num, den), vector) in groups {
            let weight = norm_sqr(&vector);
            if weight <= 1e-26 {
                continue;
            }
            let phase = DoubleDouble::TWO_PI.mul_f64(num as f64) / DoubleDouble::from_f64(den as f64);
            out.push(EigenComponent { phase, weight, vector });
        }
        Ok(out)
    }
}

/// `sum_j e^{2 pi i j k / s} |orbit_j> / sqrt(s)` on an `n`-qubit register.
pub fn shor_eigenstate(width: usize, orbit: &[u64], k: u64) -> Result<StateVector> {
    let s = orbit.len() as u64;
    if k >= s {
        return Err(Error::invalid("Fourier index k must satisfy 0 <= k < orbit size"));
    }
    let mut amps = vec![C64::new(0.0, 0.0); 1 << width];
    let norm = 1.0 / (s as f64).sqrt();
    for (j, &x) in orbit.iter().enumerate() {
        if x as usize >= amps.len() {
            return Err(Error::invalid("orbit element does not fit the register"));
        }
        let ang = 2.0 * core::f64::consts::PI * ((j as u64 * k) % s) as f64 / s as f64;
        amps[x as usize] = C64::new(ang.cos(), ang.sin()) * norm;
    }
    StateVector::from_amplitudes(width, amps)
}

/// `|x> -> |x (y^t mod N) mod N>`; never iterates `t` times.
pub fn shor_ff_apply(u: &ShorUnitary, state: &StateVector, t: i128) -> Result<StateVector> {
    let mut out = state.clone();
    if state.num_qubits() != Some(u.width()) {
        return Err(Error::DimensionMismatch { expected: u.dim(), found: state.dim() });
    }
    u.apply_power(out.amplitudes_mut(), t)?;
    Ok(out)
}

/// `H = U + U^dagger`, optionally halved so that `||H|| <= 1`.
#[derive(Debug, Clone)]
pub struct ShorHamiltonian {
    pub unitary: ShorUnitary,
    pub normalized: bool,
}

impl ShorHamiltonian {
    pub fn new(modulus: u64, y: u64, normalized: bool) -> Result<Self> {
        Ok(Self { unitary: ShorUnitary::new(modulus, y)?, normalized })
    }

    pub fn dense(&self) -> Result<DenseOperator> {
        let u = &self.unitary;
        let cap = Tolerances::DEFAULT.oracle_cap;
        if u.dim() > cap {
            return Err(Error::CapExceeded { dim: u.dim(), cap });
        }
        let s = if self.normalized { 0.5 } else { 1.0 };
        let d = u.dim();
        let mut m = vec![C64::new(0.0, 0.0); d * d];
        for x in 0..d as u64 {
            let fwd = u.image(x, u.y) as usize;
            let back = u.image(x, u.y_inv) as usize;
            // U|x> = |fwd>, U^dagger|x> = |back>
            m[fwd * d + x as usize] += C64::new(s, 0.0);
            m[back * d + x as usize] += C64::new(s, 0.0);
        }
        DenseOperator::from_rows(d, m)
    }

    /// Energy `2 cos(phi)` (or `cos(phi)` when normalized).
    pub fn energy(&self, phase: f64) -> f64 {
        let e = 2.0 * phase.cos();
        if self.normalized { e / 2.0 } else { e }
    }
}

impl ShorHamiltonian {
    /// Fast-forwarded `e^{-iH}` through the orbit eigenbasis.
    pub fn evolution(&self) -> ShorEvolution {
        ShorEvolution { hamiltonian: self.clone() }
    }
}

/// `e^{-iH}` for a Shor Hamiltonian; powers are applied in the exact orbit
/// Fourier basis, so `t` never enters as a step count.
#[derive(Debug, Clone)]
pub struct ShorEvolution {
    hamiltonian: ShorHamiltonian,
}

impl ShorEvolution {
    fn energy_dd(&self, u_phase: DoubleDouble) -> DoubleDouble {
        DoubleDouble::from_f64(self.hamiltonian.energy(u_phase.to_f64()))
    }
}

impl FastForwardableUnitary for ShorEvolution {
    fn dim(&self) -> usize {
        self.hamiltonian.unitary.dim()
    }

    fn range(&self) -> u128 {
        UNBOUNDED
    }

    fn apply_power(&self, amps: &mut [C64], power: i128) -> Result<()> {
        let comps = self.hamiltonian.unitary.eigen_components(amps)?;
        for a in amps.iter_mut() {
            *a = C64::new(0.0, 0.0);
        }
        let t = DoubleDouble::from_i128(power);
        for c in comps {
            let ph = crate::dd::cis_neg(self.energy_dd(c.phase) * t);
            for (a, v) in amps.iter_mut().zip(&c.vector) {
                *a += ph * v;
            }
        }
        Ok(())
    }

    fn eigen_components(&self, amps: &[C64]) -> Result<Vec<EigenComponent>> {
        let mut comps = self.hamiltonian.unitary.eigen_components(amps)?;
        for c in comps.iter_mut() {
            c.phase = (-self.energy_dd(c.phase)).rem_two_pi_dd();
        }
        Ok(comps)
    }
}

pub fn build_shor_hamiltonian(modulus: u64, y: u64) -> Result<DenseOperator> {
    ShorHamiltonian::new(modulus, y, false)?.dense()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolve::dense_evolve;
    use crate::rng::RngStream;
    use crate::state::state_distance;
    use core::f64::consts::PI;
    use proptest::prelude::*;

    #[test]
    fn mod_exp_examples() {
        assert_eq!(mod_exp(7, 0, 15).unwrap(), 1);
        assert_eq!(mod_exp(7, 1 << 10, 15).unwrap(), 1);
        assert_eq!(mod_exp(7, 3, 15).unwrap(), 13);
        assert!(mod_exp(3, 4, 1).is_err());
    }

    #[test]
    fn order_examples() {
        assert_eq!(multiplicative_order(1, 15).unwrap(), 1);
        assert_eq!(multiplicative_order(7, 15).unwrap(), 4);
        assert_eq!(multiplicative_order(2, 15).unwrap(), 4);
        assert_eq!(multiplicative_order(3, 15), Err(Error::NotCoprime(3, 15)));
    }

    #[test]
    fn orbit_examples() {
        assert_eq!(orbit_of(0, 7, 15).unwrap(), vec![0]);
        assert_eq!(orbit_of(1, 7, 15).unwrap(), vec![1, 7, 4, 13]);
        assert_eq!(orbit_of(3, 7, 15).unwrap(), vec![3, 6, 12, 9]);
        assert!(orbit_of(15, 7, 15).is_err());
    }

    #[test]
    fn orbits_partition_and_divide_order() {
        let d = OrbitDecomposition::new(7, 15).unwrap();
        let mut all: Vec<u64> = d.orbits.iter().flatten().copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..15).collect::<Vec<_>>());
        for s in d.sizes() {
            assert_eq!(4 % s, 0);
        }
    }

    #[test]
    fn conjugate_convention_detected() {
        let u = ShorUnitary::new(15, 7).unwrap();
        assert_eq!(u.detect_convention(), PhaseConvention::Conjugate);
        assert!((u.eigenphase(1, 4) - 1.5 * PI).abs() < 1e-15);
    }

    #[test]
    fn eigenstate_examples() {
        let h = build_shor_hamiltonian(15, 7).unwrap();
        let orbit = [1, 7, 4, 13];
        let e0 = shor_eigenstate(4, &orbit, 0).unwrap();
        let e1 = shor_eigenstate(4, &orbit, 1).unwrap();
        let e2 = shor_eigenstate(4, &orbit, 2).unwrap();
        // (1/2)(|1> + i|7> - |4> - i|13>)
        assert!((e1.amplitude(7) - C64::new(0.0, 0.5)).norm() < 1e-15);
        assert!((e1.amplitude(4) - C64::new(-0.5, 0.0)).norm() < 1e-15);
        for (psi, energy) in [(&e0, 2.0), (&e1, 0.0), (&e2, -2.0)] {
            let hpsi = h.apply(psi.amplitudes());
            for (a, b) in hpsi.iter().zip(psi.amplitudes()) {
                assert!((a - b * energy).norm() < 1e-12);
            }
        }
        assert!(shor_eigenstate(4, &orbit, 4).is_err());
    }

    #[test]
    fn hamiltonian_structure() {
        let h = build_shor_hamiltonian(15, 7).unwrap();
        assert!(h.is_hermitian(1e-15));
        assert_eq!(h.get(15, 15), C64::new(2.0, 0.0));
        let row1: Vec<usize> = (0..16).filter(|&c| h.get(1, c).norm() > 0.0).collect();
        assert_eq!(row1, vec![7, 13]);
        for r in 0..16 {
            assert!((0..16).filter(|&c| h.get(r, c).norm() > 0.0).count() <= 2);
        }
        // block on orbit [1, 7, 4, 13]
        let idx = [1usize, 7, 4, 13];
        let block = DenseOperator::from_fn(4, |r, c| h.get(idx[r], idx[c]));
        let mut v = block.eigh().unwrap().values_f64();
        v.sort_by(f64::total_cmp);
        let want = [-2.0, 0.0, 0.0, 2.0];
        for (a, b) in v.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn ff_apply_examples() {
        let u = ShorUnitary::new(15, 7).unwrap();
        let s1 = StateVector::basis_state(4, 1).unwrap();
        assert_eq!(shor_ff_apply(&u, &s1, 0).unwrap(), s1);
        assert_eq!(shor_ff_apply(&u, &s1, 3).unwrap(), StateVector::basis_state(4, 13).unwrap());

        let psi = shor_eigenstate(4, &[1, 7, 4, 13], 1).unwrap();
        let t: i128 = 1 << 40;
        let got = shor_ff_apply(&u, &psi, t).unwrap();
        // U^r = 1 checked densely, so U^t = U^{t mod r}
        let m = u.dense();
        let mut p = DenseOperator::identity(16);
        let mut r = 0i128;
        loop {
            p = p.matmul(&m);
            r += 1;
            if p.sub(&DenseOperator::identity(16)).max_abs() == 0.0 {
                break;
            }
        }
        let a = log_generator(&u, r as u64);
        assert!(dense_evolve(&a, 1i64).unwrap().sub(&m).max_abs() < 1e-12);
        for t in [t, t + 1, t + 3] {
            let got = shor_ff_apply(&u, &psi, t).unwrap();
            let want = dense_evolve(&a, t % r).unwrap().apply(psi.amplitudes());
            let want = StateVector::from_amplitudes(4, want).unwrap();
            assert!(state_distance(&got, &want).unwrap() < 1e-9);
        }
        // 2^40 is a multiple of the order 4
        assert!(state_distance(&got, &psi).unwrap() < 1e-9);
    }

    /// Hermitian `A` with `e^{-iA} = U`, assembled from orbit states whose
    /// eigenvalues are read off the dense permutation matrix and snapped to
    /// `r`-th roots of unity.
    fn log_generator(u: &ShorUnitary, r: u64) -> DenseOperator {
        let m = u.dense();
        let d = m.dim();
        let mut a = DenseOperator::zeros(d);
        let step = 2.0 * PI / r as f64;
        let mut fixed = Vec::new();
        for o in &u.orbits().orbits {
            for k in 0..o.len() as u64 {
                fixed.push(shor_eigenstate(u.width(), o, k).unwrap());
            }
        }
        for x in (u.modulus() as usize)..d {
            fixed.push(StateVector::basis_state(u.width(), x).unwrap());
        }
        for psi in fixed {
            let v = psi.amplitudes();
            let lam: C64 = v.iter().zip(m.apply(v)).map(|(x, y)| x.conj() * y).sum();
            let phi = (lam.im.atan2(lam.re) / step).round() * step;
            let proj = DenseOperator::from_fn(d, |r, c| v[r] * v[c].conj() * (-phi));
            a = a.add(&proj);
        }
        a
    }

    fn perm_power_by_squaring(perm: &[usize], mut t: u128) -> Vec<usize> {
        let n = perm.len();
        let mut acc: Vec<usize> = (0..n).collect();
        let mut base = perm.to_vec();
        while t > 0 {
            if t & 1 == 1 {
                acc = acc.iter().map(|&i| base[i]).collect();
            }
            base = base.iter().map(|&i| base[i]).collect();
            t >>= 1;
        }
        acc
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn ff_matches_permutation_oracle(n in 2u64..4096, ys in any::<u64>(), t in 0u64..(1 << 60), seed in any::<u64>()) {
            let mut y = ys % n;
            while gcd(y, n) != 1 {
                y = (y + 1) % n;
            }
            let u = ShorUnitary::new(n, y).unwrap();
            let d = u.dim();
            let perm: Vec<usize> = (0..d).map(|x| if (x as u64) < n { ((x as u128 * y as u128) % n as u128) as usize } else { x }).collect();
            let pt = perm_power_by_squaring(&perm, t as u128);
            let mut rng = RngStream::new(seed, 0);
            let amps: Vec<C64> = (0..d).map(|_| C64::new(rng.normal(), rng.normal())).collect();
            let psi = StateVector::normalized(u.width(), amps).unwrap();
            let mut want = vec![C64::new(0.0, 0.0); d];
            for x in 0..d {
                want[pt[x]] = psi.amplitude(x);
            }
            let want = StateVector::from_amplitudes(u.width(), want).unwrap();
            let got = shor_ff_apply(&u, &psi, t as i128).unwrap();
            prop_assert!(state_distance(&got, &want).unwrap() <= 1e-9);
            // inverse powers undo
            let back = shor_ff_apply(&u, &got, -(t as i128)).unwrap();
            prop_assert!(state_distance(&back, &psi).unwrap() <= 1e-12);
        }

        #[test]
        fn dense_power_oracle_small(n in 2u64..64, ys in any::<u64>(), t in 0u64..(1 << 60)) {
            let mut y = ys % n;
            while gcd(y, n) != 1 {
                y = (y + 1) % n;
            }
            let u = ShorUnitary::new(n, y).unwrap();
            let m = u.dense();
            let mut acc = DenseOperator::identity(m.dim());
            let mut base = m.clone();
            let mut e = t;
            while e > 0 {
                if e & 1 == 1 {
                    acc = acc.matmul(&base);
                }
                base = base.matmul(&base);
                e >>= 1;
            }
            let v: Vec<C64> = (0..m.dim()).map(|i| C64::new(i as f64, 1.0)).collect();
            let psi = StateVector::normalized(u.width(), v).unwrap();
            let want = StateVector::from_amplitudes(u.width(), acc.apply(psi.amplitudes())).unwrap();
            let got = shor_ff_apply(&u, &psi, t as i128).unwrap();
            prop_assert!(state_distance(&got, &want).unwrap() <= 1e-9);
        }

        #[test]
        fn eigenrelation_and_divisibility(n in 3u64..200, ys in any::<u64>(), pick in any::<u64>()) {
            let mut y = ys % n;
            while gcd(y, n) != 1 {
                y = (y + 1) % n;
            }
            let u = ShorUnitary::new(n, y).unwrap();
            let r = u.order();
            let h = ShorHamiltonian::new(n, y, false).unwrap().dense().unwrap();
            let orbits = &u.orbits().orbits;
            for o in orbits {
                prop_assert_eq!(r % o.len() as u64, 0);
            }
            let o = &orbits[(pick as usize) % orbits.len()];
            let k = pick % o.len() as u64;
            let psi = shor_eigenstate(u.width(), o, k).unwrap();
            let mut upsi = psi.amplitudes().to_vec();
            u.apply_power(&mut upsi, 1).unwrap();
            let lam: C64 = psi.amplitudes().iter().zip(&upsi).map(|(a, b)| a.conj() * b).sum();
            let e = 2.0 * lam.im.atan2(lam.re).cos();
            let hpsi = h.apply(psi.amplitudes());
            for (a, b) in hpsi.iter().zip(psi.amplitudes()) {
                prop_assert!((a - b * e).norm() < 1e-10);
            }
        }

        #[test]
        fn exact_components_sum_to_state(n in 2u64..300, ys in any::<u64>(), seed in any::<u64>()) {
            let mut y = ys % n;
            while gcd(y, n) != 1 {
                y = (y + 1) % n;
            }
            let u = ShorUnitary::new(n, y).unwrap();
            let mut rng = RngStream::new(seed, 0);
            let amps: Vec<C64> = (0..u.dim()).map(|_| C64::new(rng.normal(), rng.normal())).collect();
            let comps = u.eigen_components(&amps).unwrap();
            let mut sum = vec![C64::new(0.0, 0.0); u.dim()];
            for c in &comps {
                let mut v = c.vector.clone();
                u.apply_power(&mut v, 1).unwrap();
                let ph = C64::new(c.phase.to_f64().cos(), c.phase.to_f64().sin());
                for (a, b) in v.iter().zip(&c.vector) {
                    prop_assert!((a - b * ph).norm() < 1e-9);
                }
                for (s, x) in sum.iter_mut().zip(&c.vector) {
                    *s += x;
                }
            }
            for (a, b) in sum.iter().zip(&amps) {
                prop_assert!((a - b).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn evolution_matches_dense_oracle() {
        let h = ShorHamiltonian::new(15, 7, true).unwrap();
        let ev = h.evolution();
        let dense = h.dense().unwrap();
        let mut rng = RngStream::new(12, 0);
        let amps: Vec<C64> = (0..16).map(|_| C64::new(rng.normal(), rng.normal())).collect();
        let psi = StateVector::normalized(4, amps).unwrap();
        for t in [1i64, 7, 1_000_000] {
            let mut got = psi.amplitudes().to_vec();
            ev.apply_power(&mut got, t as i128).unwrap();
            let want = dense_evolve(&dense, t).unwrap().apply(psi.amplitudes());
            let d: f64 = got.iter().zip(&want).map(|(a, b)| (a - b).norm_sqr()).sum();
            assert!(d.sqrt() < 1e-9, "t={t}");
        }
    }
}
