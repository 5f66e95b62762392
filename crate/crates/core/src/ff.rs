//! Fast-forwardable unitaries and controlled powers.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::dd::{cis_neg, DoubleDouble};
use crate::error::{Error, Result};
use crate::evolve::Time;
use crate::linalg::{DenseOperator, Spectrum};
use crate::rng::RngStream;
use crate::state::{inner, norm_sqr, StateVector};

/// Largest range any implementation may declare.
pub const UNBOUNDED: u128 = i128::MAX as u128;

/// Projection of a vector onto one eigenspace of a unitary.
#[derive(Debug, Clone)]
pub struct EigenComponent {
    /// Eigenvalue `e^{i phase}`, phase in `[0, 2*pi)`.
    pub phase: DoubleDouble,
    /// Squared norm of `vector`.
    pub weight: f64,
    /// Unnormalized projection `c_j u_j`.
    pub vector: Vec<C64>,
}

/// A unitary `U` on a `dim`-dimensional register whose powers `U^t` cost
/// polylogarithmically in `t`.
pub trait FastForwardableUnitary: Send + Sync {
    fn dim(&self) -> usize;

    /// Largest `|t|` accepted by [`apply_power`](Self::apply_power).
    fn range(&self) -> u128;

    /// Declared error per call.
    fn alpha(&self) -> f64 {
        0.0
    }

    /// `amps <- U^power amps`; negative powers apply the inverse.
    fn apply_power(&self, amps: &mut [C64], power: i128) -> Result<()>;

    /// Eigen-decomposition of `amps` into eigenspaces of `U`. The default
    /// runs an Arnoldi iteration driven by `apply_power(1)`.
    fn eigen_components(&self, amps: &[C64]) -> Result<Vec<EigenComponent>> {
        krylov_components(self, amps)
    }
}

impl<F: FastForwardableUnitary + ?Sized> FastForwardableUnitary for &F {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn range(&self) -> u128 {
        (**self).range()
    }
    fn alpha(&self) -> f64 {
        (**self).alpha()
    }
    fn apply_power(&self, amps: &mut [C64], power: i128) -> Result<()> {
        (**self).apply_power(amps, power)
    }
    fn eigen_components(&self, amps: &[C64]) -> Result<Vec<EigenComponent>> {
        (**self).eigen_components(amps)
    }
}

impl<F: FastForwardableUnitary + ?Sized> FastForwardableUnitary for alloc::boxed::Box<F> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn range(&self) -> u128 {
        (**self).range()
    }
    fn alpha(&self) -> f64 {
        (**self).alpha()
    }
    fn apply_power(&self, amps: &mut [C64], power: i128) -> Result<()> {
        (**self).apply_power(amps, power)
    }
    fn eigen_components(&self, amps: &[C64]) -> Result<Vec<EigenComponent>> {
        (**self).eigen_components(amps)
    }
}

impl<F: FastForwardableUnitary + ?Sized> FastForwardableUnitary for alloc::sync::Arc<F> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn range(&self) -> u128 {
        (**self).range()
    }
    fn alpha(&self) -> f64 {
        (**self).alpha()
    }
    fn apply_power(&self, amps: &mut [C64], power: i128) -> Result<()> {
        (**self).apply_power(amps, power)
    }
    fn eigen_components(&self, amps: &[C64]) -> Result<Vec<EigenComponent>> {
        (**self).eigen_components(amps)
    }
}

pub fn check_power(power: i128, range: u128) -> Result<()> {
    if power.unsigned_abs() > range {
        return Err(Error::PowerOutOfRange { power, range });
    }
    Ok(())
}

fn check_dim(amps: &[C64], dim: usize) -> Result<()> {
    if amps.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: amps.len() });
    }
    Ok(())
}

/// High-precision angle in radians.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Angle(pub DoubleDouble);

impl Angle {
    pub fn zero() -> Self {
        Self(DoubleDouble::ZERO)
    }

    pub fn radians(x: f64) -> Self {
        Self(DoubleDouble::from_f64(x))
    }

    /// `x * pi`; exact for dyadic `x`.
    pub fn pi_times(x: f64) -> Self {
        Self(DoubleDouble::PI.mul_f64(x))
    }

    pub fn to_f64(self) -> f64 {
        self.0.to_f64()
    }
}

/// Applies `(e^{-i extra} U)^power` to the qubits in `register` whenever
/// `control` is 1. Cost is that of one `apply_power` per control branch.
pub fn controlled_power_apply<F: FastForwardableUnitary + ?Sized>(
    state: &mut StateVector,
    ffu: &F,
    power: i128,
    control: usize,
    register: Range<usize>,
    extra: Angle,
) -> Result<()> {
    let n = state.num_qubits().ok_or(Error::NotQubitBasis)?;
    if register.end > n {
        return Err(Error::QubitOutOfRange { index: register.end - 1, qubits: n });
    }
    if control >= n {
        return Err(Error::QubitOutOfRange { index: control, qubits: n });
    }
    if register.contains(&control) {
        return Err(Error::ControlOverlap(control));
    }
    let width = register.end - register.start;
    if ffu.dim() != 1 << width {
        return Err(Error::DimensionMismatch { expected: ffu.dim(), found: 1 << width });
    }
    check_power(power, ffu.range())?;
    if power == 0 {
        return Ok(());
    }
    let phase = cis_neg(extra.0 * DoubleDouble::from_i128(power));
    let reg_mask = ((1usize << width) - 1) << register.start;
    let cbit = 1usize << control;
    let amps = state.amplitudes_mut();
    let mut buf = vec![C64::new(0.0, 0.0); 1 << width];
    for base in 0..amps.len() {
        if base & reg_mask != 0 || base & cbit == 0 {
            continue;
        }
        for (r, b) in buf.iter_mut().enumerate() {
            *b = amps[base | (r << register.start)];
        }
        ffu.apply_power(&mut buf, power)?;
        for (r, b) in buf.iter().enumerate() {
            amps[base | (r << register.start)] = b * phase;
        }
    }
    state.renormalize();
    Ok(())
}

/// Applies `U^power` to a whole register state.
pub fn apply_power_to_state<F: FastForwardableUnitary + ?Sized>(
    state: &mut StateVector,
    ffu: &F,
    power: i128,
) -> Result<()> {
    check_dim(state.amplitudes(), ffu.dim())?;
    ffu.apply_power(state.amplitudes_mut(), power)?;
    state.renormalize();
    Ok(())
}

/// Arnoldi decomposition of `amps` into eigencomponents of `U`.
///
/// The Krylov matrix `M = Q^dagger U Q` is normal, so it is diagonalised
/// through the Hermitian pencil `X + cY` with `X, Y` its Hermitian and
/// anti-Hermitian parts; clusters of equal `X + cY` eigenvalues are split
/// again with `Y` alone.
pub fn krylov_components<F: FastForwardableUnitary + ?Sized>(
    u: &F,
    amps: &[C64],
) -> Result<Vec<EigenComponent>> {
    check_dim(amps, u.dim())?;
    let norm = norm_sqr(amps).sqrt();
    if norm == 0.0 {
        return Ok(Vec::new());
    }
    let dim = u.dim();
    let mut q: Vec<Vec<C64>> = vec![amps.iter().map(|z| z / norm).collect()];
    let mut uq: Vec<Vec<C64>> = Vec::new();
    loop {
        let mut w = q.last().expect("nonempty").clone();
        u.apply_power(&mut w, 1)?;
        uq.push(w.clone());
        for _ in 0..2 {
            for qi in &q {
                let h = inner(qi, &w);
                for (x, y) in w.iter_mut().zip(qi) {
                    *x -= h * y;
                }
            }
        }
        let h = norm_sqr(&w).sqrt();
        if h < 1e-9 || q.len() == dim {
            break;
        }
        q.push(w.iter().map(|z| z / h).collect());
    }
    let r = q.len();
    let m = DenseOperator::from_fn(r, |i, k| inner(&q[i], &uq[k]));
    let basis = normal_eigenbasis(&m)?;
    let mut out = Vec::with_capacity(r);
    for w in basis {
        let mw = m.apply(&w);
        let lam = inner(&w, &mw);
        let phase = DoubleDouble::from_f64(lam.im.atan2(lam.re)).rem_two_pi().0;
        let coeff = w[0].conj() * norm;
        let mut vector = vec![C64::new(0.0, 0.0); dim];
        for (k, qk) in q.iter().enumerate() {
            let s = w[k] * coeff;
            for (v, x) in vector.iter_mut().zip(qk) {
                *v += s * x;
            }
        }
        let weight = norm_sqr(&vector);
        if weight > 1e-26 {
            out.push(EigenComponent { phase: DoubleDouble::from_f64(phase), weight, vector });
        }
    }
    Ok(out)
}

/// Orthonormal eigenvectors of a (numerically) normal matrix.
fn normal_eigenbasis(m: &DenseOperator) -> Result<Vec<Vec<C64>>> {
    let r = m.dim();
    let md = m.adjoint();
    let x = m.add(&md).scale(C64::new(0.5, 0.0));
    let y = m.sub(&md).scale(C64::new(0.0, -0.5));
    let c = 0.618_033_988_749_894_9;
    let z = x.add(&y.scale(C64::new(c, 0.0)));
    let spec = z.eigh()?;
    let vals = spec.values_f64();
    let mut out = Vec::with_capacity(r);
    let mut start = 0;
    while start < r {
        let mut end = start + 1;
        while end < r && vals[end] - vals[end - 1] < 1e-7 {
            end += 1;
        }
        if end - start == 1 {
            out.push(spec.vector(start));
        } else {
            // split the cluster with the anti-Hermitian part
            let cols: Vec<Vec<C64>> = (start..end).map(|k| spec.vector(k)).collect();
            let sub = DenseOperator::from_fn(cols.len(), |i, j| inner(&cols[i], &y.apply(&cols[j])));
            let s2 = sub.eigh()?;
            for k in 0..cols.len() {
                let coef = s2.vector(k);
                let mut v = vec![C64::new(0.0, 0.0); r];
                for (a, col) in coef.iter().zip(&cols) {
                    for (vv, x) in v.iter_mut().zip(col) {
                        *vv += a * x;
                    }
                }
                out.push(v);
            }
        }
        start = end;
    }
    Ok(out)
}

/// Oracle-backed fast-forwarding of `U = e^{-iH}` for a dense Hermitian `H`.
#[derive(Debug, Clone)]
pub struct DenseFf {
    spectrum: Spectrum,
}

impl DenseFf {
    pub fn new(h: &DenseOperator) -> Result<Self> {
        Ok(Self { spectrum: h.eigh()? })
    }

    pub fn from_spectrum(spectrum: Spectrum) -> Self {
        Self { spectrum }
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    /// `e^{-iHt}` for real or integer `t`.
    pub fn evolve(&self, amps: &mut [C64], t: Time) -> Result<()> {
        check_dim(amps, self.dim())?;
        let out = self.spectrum.apply_fn(amps, |l| cis_neg(t.scale(l)));
        amps.copy_from_slice(&out);
        Ok(())
    }
}

impl FastForwardableUnitary for DenseFf {
    fn dim(&self) -> usize {
        self.spectrum.vectors.dim()
    }

    fn range(&self) -> u128 {
        UNBOUNDED
    }

    fn apply_power(&self, amps: &mut [C64], power: i128) -> Result<()> {
        self.evolve(amps, Time::Integer(power))
    }

    fn eigen_components(&self, amps: &[C64]) -> Result<Vec<EigenComponent>> {
        check_dim(amps, self.dim())?;
        let n = self.dim();
        let mut out: Vec<EigenComponent> = Vec::new();
        let mut k = 0;
        while k < n {
            let lam = self.spectrum.values[k];
            let mut vector = vec![C64::new(0.0, 0.0); n];
            let mut j = k;
            while j < n && (self.spectrum.values[j] - lam).to_f64() < 1e-12 {
                let col = self.spectrum.vector(j);
                let c = inner(&col, amps);
                for (v, x) in vector.iter_mut().zip(&col) {
                    *v += c * x;
                }
                j += 1;
            }
            let weight = norm_sqr(&vector);
            if weight > 1e-26 {
                let phase = (-lam).rem_two_pi_dd();
                out.push(EigenComponent { phase, weight, vector });
            }
            k = j;
        }
        Ok(out)
    }
}

/// `e^{i theta} U`.
#[derive(Debug, Clone)]
pub struct PhaseShifted<F> {
    pub inner: F,
    pub theta: Angle,
}

impl<F: FastForwardableUnitary> FastForwardableUnitary for PhaseShifted<F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn range(&self) -> u128 {
        self.inner.range()
    }
    fn alpha(&self) -> f64 {
        self.inner.alpha()
    }
    fn apply_power(&self, amps: &mut [C64], power: i128) -> Result<()> {
        self.inner.apply_power(amps, power)?;
        let ph = cis_neg(-(self.theta.0 * DoubleDouble::from_i128(power)));
        for z in amps.iter_mut() {
            *z *= ph;
        }
        Ok(())
    }
    fn eigen_components(&self, amps: &[C64]) -> Result<Vec<EigenComponent>> {
        let mut comps = self.inner.eigen_components(amps)?;
        for c in comps.iter_mut() {
            c.phase = (c.phase + self.theta.0).rem_two_pi_dd();
        }
        Ok(comps)
    }
}

/// `U^{-1}` of the wrapped unitary.
#[derive(Debug, Clone)]
pub struct Inverse<F>(pub F);

impl<F: FastForwardableUnitary> FastForwardableUnitary for Inverse<F> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn range(&self) -> u128 {
        self.0.range()
    }
    fn alpha(&self) -> f64 {
        self.0.alpha()
    }
    fn apply_power(&self, amps: &mut [C64], power: i128) -> Result<()> {
        self.0.apply_power(amps, -power)
    }
    fn eigen_components(&self, amps: &[C64]) -> Result<Vec<EigenComponent>> {
        let mut comps = self.0.eigen_components(amps)?;
        for c in comps.iter_mut() {
            c.phase = (-c.phase).rem_two_pi_dd();
        }
        Ok(comps)
    }
}

/// `kappa` concatenated copies of a `(T, alpha)` fast-forwarding: range
/// `kappa T`, error `kappa alpha`.
#[derive(Debug, Clone)]
pub struct Concatenated<F> {
    inner: F,
    kappa: u32,
}

pub fn concatenate_ff<F: FastForwardableUnitary>(inner: F, kappa: u32) -> Result<Concatenated<F>> {
    if kappa == 0 {
        return Err(Error::invalid("concatenation count kappa must be at least 1"));
    }
    Ok(Concatenated { inner, kappa })
}

impl<F> Concatenated<F> {
    pub fn inner(&self) -> &F {
        &self.inner
    }

    pub fn kappa(&self) -> u32 {
        self.kappa
    }
}

impl<F: FastForwardableUnitary> Concatenated<F> {
    /// Number of inner calls `apply_power(power)` makes.
    pub fn chunks(&self, power: i128) -> u128 {
        let t = self.inner.range().max(1);
        power.unsigned_abs().div_ceil(t)
    }
}

impl<F: FastForwardableUnitary> FastForwardableUnitary for Concatenated<F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn range(&self) -> u128 {
        self.inner.range().saturating_mul(self.kappa as u128).min(UNBOUNDED)
    }

    fn alpha(&self) -> f64 {
        self.inner.alpha() * self.kappa as f64
    }

    fn apply_power(&self, amps: &mut [C64], power: i128) -> Result<()> {
        check_power(power, self.range())?;
        let t = self.inner.range();
        let sign = power.signum();
        let mut left = power.unsigned_abs();
        while left > 0 {
            let step = left.min(t);
            self.inner.apply_power(amps, sign * step as i128)?;
            left -= step;
        }
        Ok(())
    }

    fn eigen_components(&self, amps: &[C64]) -> Result<Vec<EigenComponent>> {
        self.inner.eigen_components(amps)
    }
}

/// Exact fast-forwarding followed by a fixed unitary `W` with
/// `||W - 1|| = alpha` on every call, a synthetic `(T, alpha)` object.
#[derive(Debug, Clone)]
pub struct Noisy<F> {
    inner: F,
    range: u128,
    alpha: f64,
    kick: DenseOperator,
}

impl<F: FastForwardableUnitary> Noisy<F> {
    pub fn new(inner: F, range: u128, alpha: f64, rng: &mut RngStream) -> Result<Self> {
        if !(0.0..2.0).contains(&alpha) {
            return Err(Error::invalid("injected error alpha must lie in [0, 2)"));
        }
        let kick = perturbation(inner.dim(), alpha, rng)?;
        let range = range.min(inner.range());
        Ok(Self { inner, range, alpha, kick })
    }
}

/// Random unitary `W = e^{-i s K}` with `||K|| = 1` and `||W - 1|| = beta`.
pub fn perturbation(dim: usize, beta: f64, rng: &mut RngStream) -> Result<DenseOperator> {
    let mut k = DenseOperator::from_fn(dim, |_, _| C64::new(rng.normal(), rng.normal()));
    k = k.add(&k.adjoint());
    let spec = k.eigh()?;
    let top = spec.values.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max);
    if top == 0.0 {
        return Ok(DenseOperator::identity(dim));
    }
    // 2 sin(s/2) = beta
    let s = 2.0 * (beta / 2.0).asin();
    Ok(spec.map(|l| {
        let x = s * l.to_f64() / top;
        C64::new(x.cos(), -x.sin())
    }))
}

impl<F: FastForwardableUnitary> FastForwardableUnitary for Noisy<F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn range(&self) -> u128 {
        self.range
    }
    fn alpha(&self) -> f64 {
        self.alpha
    }
    fn apply_power(&self, amps: &mut [C64], power: i128) -> Result<()> {
        check_power(power, self.range)?;
        self.inner.apply_power(amps, power)?;
        if power != 0 {
            let out = self.kick.apply(amps);
            amps.copy_from_slice(&out);
        }
        Ok(())
    }
}

/// One-dimensional register with eigenvalue `e^{i phase}`: a planted phase.
#[derive(Debug, Clone, Copy)]
pub struct ScalarPhase(pub Angle);

impl FastForwardableUnitary for ScalarPhase {
    fn dim(&self) -> usize {
        1
    }
    fn range(&self) -> u128 {
        UNBOUNDED
    }
    fn apply_power(&self, amps: &mut [C64], power: i128) -> Result<()> {
        check_dim(amps, 1)?;
        amps[0] *= cis_neg(-(self.0 .0 * DoubleDouble::from_i128(power)));
        Ok(())
    }
    fn eigen_components(&self, amps: &[C64]) -> Result<Vec<EigenComponent>> {
        check_dim(amps, 1)?;
        let phase = self.0 .0.rem_two_pi_dd();
        Ok(vec![EigenComponent { phase, weight: amps[0].norm_sqr(), vector: amps.to_vec() }])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolve::dense_evolve;
    use crate::gates;
    use crate::state::state_distance;
    use core::f64::consts::{FRAC_1_SQRT_2, PI};

    /// One-dimensional register with eigenvalue `e^{i phi}`.
    struct PhaseGate(f64);

    impl FastForwardableUnitary for PhaseGate {
        fn dim(&self) -> usize {
            1
        }
        fn range(&self) -> u128 {
            UNBOUNDED
        }
        fn apply_power(&self, amps: &mut [C64], power: i128) -> Result<()> {
            let ph = cis_neg(-DoubleDouble::from_f64(self.0) * DoubleDouble::from_i128(power));
            amps[0] *= ph;
            Ok(())
        }
    }

    fn random_h(n: usize, seed: u64) -> DenseOperator {
        let mut rng = RngStream::new(seed, 0);
        let k = DenseOperator::from_fn(1 << n, |_, _| C64::new(rng.normal(), rng.normal()));
        let h = k.add(&k.adjoint());
        let nrm = h.operator_norm();
        h.scale(C64::new(1.0 / nrm, 0.0))
    }

    #[test]
    fn zeroth_power_is_identity() {
        let mut s = StateVector::normalized(2, vec![C64::new(1., 0.), C64::new(0., 2.), C64::new(3., 0.), C64::new(1., 1.)]).unwrap();
        let before = s.clone();
        let u = DenseFf::new(&random_h(1, 2)).unwrap();
        controlled_power_apply(&mut s, &u, 0, 0, 1..2, Angle::radians(0.3)).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn phase_kickback() {
        // register qubit count zero is not representable; use a 1-dim
        // register by giving it zero width
        let phi = 0.37;
        let mut s = StateVector::basis_state(1, 1).unwrap();
        controlled_power_apply(&mut s, &PhaseGate(phi), 5, 0, 1..1, Angle::zero()).unwrap();
        let want = C64::new((5.0 * phi).cos(), (5.0 * phi).sin());
        assert!((s.amplitude(1) - want).norm() < 1e-14);
    }

    #[test]
    fn control_overlap_and_range_errors() {
        let mut s = StateVector::zero(2);
        let u = DenseFf::new(&gates::pauli_z()).unwrap();
        assert_eq!(
            controlled_power_apply(&mut s, &u, 1, 1, 1..2, Angle::zero()),
            Err(Error::ControlOverlap(1))
        );
        let c = concatenate_ff(Noisy::new(u, 3, 0.0, &mut RngStream::new(0, 0)).unwrap(), 2).unwrap();
        assert!(matches!(
            controlled_power_apply(&mut s, &c, 7, 0, 1..2, Angle::zero()),
            Err(Error::PowerOutOfRange { power: 7, range: 6 })
        ));
    }

    #[test]
    fn extra_phase_multiplies_power() {
        let mut s = StateVector::normalized(1, vec![C64::new(FRAC_1_SQRT_2, 0.), C64::new(FRAC_1_SQRT_2, 0.)]).unwrap();
        controlled_power_apply(&mut s, &PhaseGate(0.0), 3, 0, 1..1, Angle::pi_times(0.25)).unwrap();
        let want = C64::new((-0.75 * PI).cos(), (-0.75 * PI).sin()) * FRAC_1_SQRT_2;
        assert!((s.amplitude(1) - want).norm() < 1e-15);
    }

    #[test]
    fn krylov_recovers_spectrum() {
        let h = random_h(3, 4);
        let u = DenseFf::new(&h).unwrap();
        let mut rng = RngStream::new(9, 0);
        let amps: Vec<C64> = (0..8).map(|_| C64::new(rng.normal(), rng.normal())).collect();
        let s = StateVector::normalized(3, amps).unwrap();
        let comps = krylov_components(&u, s.amplitudes()).unwrap();
        let exact = u.eigen_components(s.amplitudes()).unwrap();
        assert_eq!(comps.len(), exact.len());
        let total: f64 = comps.iter().map(|c| c.weight).sum();
        assert!((total - 1.0).abs() < 1e-10);
        for c in &comps {
            let m = exact
                .iter()
                .find(|e| crate::dd::angle_distance(e.phase.to_f64(), c.phase.to_f64()) < 1e-9)
                .expect("phase present");
            let d: f64 = c.vector.iter().zip(&m.vector).map(|(a, b)| (a - b).norm_sqr()).sum();
            assert!(d.sqrt() < 1e-8);
        }
    }

    #[test]
    fn krylov_splits_mirror_pairs() {
        // eigenphases symmetric about atan(c) share a pencil value
        let c = 0.618_033_988_749_894_9f64;
        let p0 = c.atan();
        let h = DenseOperator::diagonal(&[C64::new(-(p0 + 0.4), 0.0), C64::new(-(p0 - 0.4), 0.0)]);
        let u = DenseFf::new(&h).unwrap();
        let amps = [C64::new(FRAC_1_SQRT_2, 0.0), C64::new(FRAC_1_SQRT_2, 0.0)];
        let comps = krylov_components(&u, &amps).unwrap();
        assert_eq!(comps.len(), 2);
        for c in comps {
            assert!((c.weight - 0.5).abs() < 1e-10);
        }
    }

    #[test]
    fn concatenation_of_exact_is_exact() {
        let h = random_h(2, 5);
        let inner = Noisy::new(DenseFf::new(&h).unwrap(), 1000, 0.0, &mut RngStream::new(0, 0)).unwrap();
        let c = concatenate_ff(inner, 16).unwrap();
        assert_eq!(c.range(), 16_000);
        assert_eq!(c.alpha(), 0.0);
        let mut v = vec![C64::new(0.5, 0.0); 4];
        c.apply_power(&mut v, 15_999).unwrap();
        let oracle = dense_evolve(&h, 15_999i64).unwrap().apply(&[C64::new(0.5, 0.0); 4]);
        let d: f64 = v.iter().zip(&oracle).map(|(a, b)| (a - b).norm_sqr()).sum();
        assert!(d.sqrt() < 1e-9);
    }

    #[test]
    fn concatenation_of_one_is_unchanged() {
        let h = random_h(2, 6);
        let u = DenseFf::new(&h).unwrap();
        let c = concatenate_ff(u.clone(), 1).unwrap();
        let mut a = vec![C64::new(0.5, 0.0); 4];
        let mut b = a.clone();
        c.apply_power(&mut a, 77).unwrap();
        u.apply_power(&mut b, 77).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn noisy_concatenation_stays_within_kappa_alpha() {
        let h = random_h(4, 7);
        let mut rng = RngStream::new(8, 0);
        let noisy = Noisy::new(DenseFf::new(&h).unwrap(), 1000, 1e-4, &mut rng).unwrap();
        let c = concatenate_ff(noisy, 8).unwrap();
        let amps: Vec<C64> = (0..16).map(|_| C64::new(rng.normal(), rng.normal())).collect();
        let psi = StateVector::normalized(4, amps).unwrap();
        for t in [1i128, 999, 4321, 8000] {
            let mut got = psi.clone();
            apply_power_to_state(&mut got, &c, t).unwrap();
            let want = dense_evolve(&h, t).unwrap().apply(psi.amplitudes());
            let want = StateVector::from_amplitudes(4, want).unwrap();
            let d = state_distance(&got, &want).unwrap();
            let calls = c.chunks(t) as f64;
            assert!(d <= calls * 1e-4 + 1e-12, "t={t} d={d}");
            assert!(d <= 8e-4);
        }
    }

    #[test]
    fn power_composition() {
        let h = random_h(3, 10);
        let u = DenseFf::new(&h).unwrap();
        let v0: Vec<C64> = (0..8).map(|i| C64::new(i as f64, 1.0)).collect();
        let mut a = v0.clone();
        u.apply_power(&mut a, 1 << 40).unwrap();
        u.apply_power(&mut a, -(1 << 39)).unwrap();
        let mut b = v0;
        u.apply_power(&mut b, 1 << 39).unwrap();
        let d: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).norm_sqr()).sum();
        assert!(d.sqrt() < 1e-9);
    }
}
