//! Super-efficient energy measurement (SEEM) devices and the two
//! constructions relating them to fast-forwarding.
//!
//! A device is modelled by its action on energy eigencomponents: on an
//! eigenvector with energy `E` the premeasurement writes a readout `E'` with
//! amplitude `a(E')` into its output register and leaves the system alone.
//! [`SeemDevice::sample`] draws a readout for a superposition and returns the
//! amplitude factor every component picked up, which is all that is needed to
//! form the post-measurement state or the coherent round trip.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::dd::DoubleDouble;
use crate::error::{Error, Result};
use crate::ff::{concatenate_ff, Angle, FastForwardableUnitary, Inverse, PhaseShifted};
use crate::linalg::DenseOperator;
use crate::pe::chernoff::binomial_pmf;
use crate::pe::fourier::{outcome_probability, sample_outcome_spectral};
use crate::rng::RngStream;
use crate::state::StateVector;

/// `(eta, delta_E, beta)`: confidence, accuracy, implementation distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeemParams {
    pub eta: f64,
    pub delta_e: f64,
    pub beta: f64,
}

/// An energy level as the device sees it. `key` is a device-specific exact
/// label (for phase-estimation devices, the eigenphase of the walk unitary).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level {
    pub energy: f64,
    pub key: DoubleDouble,
}

#[derive(Debug, Clone)]
pub struct EnergyComponent {
    pub level: Level,
    pub weight: f64,
    /// Unnormalized projection of the input onto the level.
    pub vector: Vec<C64>,
}

#[derive(Debug, Clone)]
pub struct Readout {
    pub value: f64,
    /// Amplitude of this readout for each component, in input order.
    pub factors: Vec<C64>,
}

/// Readout law on one eigenvector, truncated to a window; `tail` bounds the
/// probability left out.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutDistribution {
    pub values: Vec<f64>,
    pub probs: Vec<f64>,
    pub tail: f64,
}

impl ReadoutDistribution {
    pub fn point(value: f64) -> Self {
        Self { values: vec![value], probs: vec![1.0], tail: 0.0 }
    }

    /// Probability that the readout lands within `delta` of `energy`,
    /// counting the tail as misses.
    pub fn within(&self, energy: f64, delta: f64) -> f64 {
        self.values
            .iter()
            .zip(&self.probs)
            .filter(|(v, _)| (*v - energy).abs() <= delta * (1.0 + 1e-12))
            .map(|(_, p)| p)
            .sum()
    }

    /// `E |e^{-i (E' - E) t} - 1|^2`, with the tail counted at its maximum 4.
    pub fn phase_error_moment(&self, energy: f64, t: f64) -> f64 {
        let body: f64 = self
            .values
            .iter()
            .zip(&self.probs)
            .map(|(v, p)| {
                let x = DoubleDouble::from_f64(*v - energy).mul_f64(t).mul_f64(0.5);
                let (r, _) = x.rem_two_pi_symmetric();
                4.0 * p * r.sin().powi(2)
            })
            .sum();
        body + 4.0 * self.tail
    }
}

pub trait SeemDevice: Send + Sync {
    /// System dimension.
    fn dim(&self) -> usize;

    fn params(&self) -> SeemParams;

    /// Qubits in the output register (readout plus garbage).
    fn output_width(&self) -> usize;

    fn components(&self, amps: &[C64]) -> Result<Vec<EnergyComponent>>;

    /// Draws a readout for components with the given levels and weights.
    fn sample(&self, levels: &[Level], weights: &[f64], rng: &mut RngStream) -> Result<Readout>;

    fn distribution(&self, level: &Level) -> Result<ReadoutDistribution>;

    /// System-side unitary `W` applied after the ideal premeasurement, so
    /// that the implemented device is `(W x 1) U_SEEM`.
    fn demolition(&self) -> Option<&DenseOperator> {
        None
    }
}

/// Readout and post-measurement system state.
pub fn measure_energy(
    device: &dyn SeemDevice,
    state: &StateVector,
    rng: &mut RngStream,
) -> Result<(f64, StateVector)> {
    if state.dim() != device.dim() {
        return Err(Error::DimensionMismatch { expected: device.dim(), found: state.dim() });
    }
    let comps = device.components(state.amplitudes())?;
    if comps.is_empty() {
        return Err(Error::numerical("state has no weight on any energy level"));
    }
    let levels: Vec<Level> = comps.iter().map(|c| c.level).collect();
    let weights: Vec<f64> = comps.iter().map(|c| c.weight).collect();
    let r = device.sample(&levels, &weights, rng)?;
    let mut post = vec![C64::new(0.0, 0.0); state.dim()];
    for (c, f) in comps.iter().zip(&r.factors) {
        for (p, v) in post.iter_mut().zip(&c.vector) {
            *p += f * v;
        }
    }
    if let Some(w) = device.demolition() {
        post = w.apply(&post);
    }
    let norm: f64 = post.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::numerical("post-measurement state vanished"));
    }
    for z in post.iter_mut() {
        *z /= norm;
    }
    Ok((r.value, StateVector::with_basis(state.basis().clone(), post)?))
}

/// Groups eigenpairs of a Hermitian matrix into levels.
fn levels_of(h: &DenseOperator, tol: f64) -> Result<(Vec<f64>, Vec<Vec<Vec<C64>>>)> {
    let spec = h.eigh()?;
    let vals = spec.values_f64();
    let mut energies: Vec<f64> = Vec::new();
    let mut vecs: Vec<Vec<Vec<C64>>> = Vec::new();
    for (k, &e) in vals.iter().enumerate() {
        match energies.last() {
            Some(&last) if (e - last).abs() <= tol => vecs.last_mut().expect("nonempty").push(spec.vector(k)),
            _ => {
                energies.push(e);
                vecs.push(vec![spec.vector(k)]);
            }
        }
    }
    Ok((energies, vecs))
}

/// Device with known spectrum: reads the exact level energy, except that with
/// probability `error_prob` it reads `E + error_offset` instead.
#[derive(Debug, Clone)]
pub struct SpectralDevice {
    dim: usize,
    energies: Vec<f64>,
    eigvecs: Vec<Vec<Vec<C64>>>,
    error_prob: f64,
    error_offset: f64,
    delta_e: f64,
    demolition: Option<DenseOperator>,
    beta: f64,
}

impl SpectralDevice {
    /// Ideal device: `eta = 1`, `delta_E = 0`, `beta = 0`.
    pub fn exact(h: &DenseOperator) -> Result<Self> {
        let (energies, eigvecs) = levels_of(h, 1e-9)?;
        Ok(Self {
            dim: h.dim(),
            energies,
            eigvecs,
            error_prob: 0.0,
            error_offset: 0.0,
            delta_e: 0.0,
            demolition: None,
            beta: 0.0,
        })
    }

    /// Reads `E + offset` with probability `p`; accuracy `delta_E < |offset|`.
    pub fn with_errors(mut self, p: f64, offset: f64, delta_e: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) || offset.abs() <= delta_e {
            return Err(Error::invalid("need 0 <= p <= 1 and |offset| > delta_E"));
        }
        self.error_prob = p;
        self.error_offset = offset;
        self.delta_e = delta_e;
        Ok(self)
    }

    /// Composes with a random system unitary at operator distance `beta`.
    pub fn with_demolition(mut self, beta: f64, rng: &mut RngStream) -> Result<Self> {
        self.demolition = Some(crate::ff::perturbation(self.dim, beta, rng)?);
        self.beta = beta;
        Ok(self)
    }

    fn level_index(&self, level: &Level) -> Result<usize> {
        let k = level.key.to_f64() as usize;
        if k >= self.energies.len() {
            return Err(Error::invalid("unknown level"));
        }
        Ok(k)
    }
}

impl SeemDevice for SpectralDevice {
    fn dim(&self) -> usize {
        self.dim
    }

    fn params(&self) -> SeemParams {
        SeemParams { eta: 1.0 - self.error_prob, delta_e: self.delta_e, beta: self.beta }
    }

    fn output_width(&self) -> usize {
        // level index plus one error flag
        (usize::BITS - self.energies.len().leading_zeros()) as usize + 1
    }

    fn components(&self, amps: &[C64]) -> Result<Vec<EnergyComponent>> {
        if amps.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: amps.len() });
        }
        let mut out = Vec::new();
        for (k, (e, vs)) in self.energies.iter().zip(&self.eigvecs).enumerate() {
            let mut v = vec![C64::new(0.0, 0.0); self.dim];
            for u in vs {
                let c: C64 = u.iter().zip(amps).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(u) {
                    *x += c * y;
                }
            }
            let weight: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            if weight > 1e-26 {
                out.push(EnergyComponent {
                    level: Level { energy: *e, key: DoubleDouble::from_f64(k as f64) },
                    weight,
                    vector: v,
                });
            }
        }
        Ok(out)
    }

    fn sample(&self, levels: &[Level], weights: &[f64], rng: &mut RngStream) -> Result<Readout> {
        let k = rng.weighted_index(weights);
        let idx = self.level_index(&levels[k])?;
        let wrong = rng.bernoulli(self.error_prob);
        let amp = if wrong { self.error_prob.sqrt() } else { (1.0 - self.error_prob).sqrt() };
        let mut factors = vec![C64::new(0.0, 0.0); levels.len()];
        for (j, l) in levels.iter().enumerate() {
            if self.level_index(l)? == idx {
                factors[j] = C64::new(amp, 0.0);
            }
        }
        let value = self.energies[idx] + if wrong { self.error_offset } else { 0.0 };
        Ok(Readout { value, factors })
    }

    fn distribution(&self, level: &Level) -> Result<ReadoutDistribution> {
        let e = self.energies[self.level_index(level)?];
        if self.error_prob == 0.0 {
            return Ok(ReadoutDistribution::point(e));
        }
        let mut pts = [(e, 1.0 - self.error_prob), (e + self.error_offset, self.error_prob)];
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
        Ok(ReadoutDistribution { values: pts.iter().map(|p| p.0).collect(), probs: pts.iter().map(|p| p.1).collect(), tail: 0.0 })
    }

    fn demolition(&self) -> Option<&DenseOperator> {
        self.demolition.as_ref()
    }
}

/// Widest outcome window listed by [`FourierSeem::distribution`], each side.
pub const WINDOW: u64 = 1 << 16;

/// Phase estimation of `V = e^{i(H + 1)}` with `l` bits, reading
/// `E' = 2 pi m / 2^l - 1` (taken in `[-pi, pi)`).
pub struct FourierSeem {
    v: Arc<dyn FastForwardableUnitary>,
    ell: u32,
    params: SeemParams,
}

impl FourierSeem {
    /// `ffu` implements `e^{-iH}`.
    pub fn new(ffu: Arc<dyn FastForwardableUnitary>, ell: u32, params: SeemParams) -> Result<Self> {
        let v: Arc<dyn FastForwardableUnitary> =
            Arc::new(PhaseShifted { inner: Inverse(ffu), theta: Angle::radians(1.0) });
        crate::ff::check_power(1i128 << (ell.max(1) - 1), v.range())?;
        Ok(Self { v, ell, params })
    }

    pub fn bits(&self) -> u32 {
        self.ell
    }

    /// Energy read from outcome `m`.
    pub fn energy_of(&self, m: u64) -> f64 {
        let phi = DoubleDouble::TWO_PI * DoubleDouble::from_i128(m as i128) / DoubleDouble::from_i128(1i128 << self.ell);
        phase_to_energy(phi)
    }
}

/// `phi - 1` with `phi` taken in `[1 - pi, 1 + pi)`.
fn phase_to_energy(phi: DoubleDouble) -> f64 {
    let (r, _) = (phi - DoubleDouble::ONE).rem_two_pi_symmetric();
    r
}

impl SeemDevice for FourierSeem {
    fn dim(&self) -> usize {
        self.v.dim()
    }

    fn params(&self) -> SeemParams {
        self.params
    }

    fn output_width(&self) -> usize {
        self.ell as usize
    }

    fn components(&self, amps: &[C64]) -> Result<Vec<EnergyComponent>> {
        Ok(self
            .v
            .eigen_components(amps)?
            .into_iter()
            .map(|c| EnergyComponent {
                level: Level { energy: phase_to_energy(c.phase), key: c.phase },
                weight: c.weight,
                vector: c.vector,
            })
            .collect())
    }

    fn sample(&self, levels: &[Level], weights: &[f64], rng: &mut RngStream) -> Result<Readout> {
        let phases: Vec<DoubleDouble> = levels.iter().map(|l| l.key).collect();
        let s = sample_outcome_spectral(&phases, weights, self.ell, rng)?;
        Ok(Readout { value: self.energy_of(s.outcome), factors: s.factors })
    }

    fn distribution(&self, level: &Level) -> Result<ReadoutDistribution> {
        let n = 1u64 << self.ell;
        let centre = ((level.key.to_f64() / (2.0 * core::f64::consts::PI)) * n as f64).round() as i128;
        let half = WINDOW.min(n / 2) as i128;
        let span = if (n as i128) <= 2 * half + 1 { n as i128 } else { 2 * half + 1 };
        let start = if span == n as i128 { 0 } else { centre - half };
        let mut pts: Vec<(f64, f64)> = (0..span)
            .map(|i| {
                let m = (start + i).rem_euclid(n as i128) as u64;
                (self.energy_of(m), outcome_probability(level.key, self.ell, m))
            })
            .collect();
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
        let listed: f64 = pts.iter().map(|p| p.1).sum();
        Ok(ReadoutDistribution {
            values: pts.iter().map(|p| p.0).collect(),
            probs: pts.iter().map(|p| p.1).collect(),
            tail: (1.0 - listed).max(0.0),
        })
    }
}

/// `m` independent copies of a device; the readout is their lower median.
pub struct MedianDevice {
    inner: Arc<dyn SeemDevice>,
    copies: usize,
}

/// `1 - e^{-(m/2)(1 - 1/(2 eta))^2}`.
pub fn median_confidence(eta: f64, m: usize) -> f64 {
    1.0 - (-(m as f64) / 2.0 * (1.0 - 1.0 / (2.0 * eta)).powi(2)).exp()
}

/// Median amplification: `(eta, dE, beta) -> (1 - e^{-(m/2)(1 - 1/(2 eta))^2}, dE, m beta)`.
pub fn median_amplify(inner: Arc<dyn SeemDevice>, m: usize) -> Result<MedianDevice> {
    if m == 0 {
        return Err(Error::invalid("repetition count m must be at least 1"));
    }
    if inner.params().eta <= 0.5 {
        return Err(Error::invalid("median amplification needs eta > 1/2"));
    }
    Ok(MedianDevice { inner, copies: m })
}

impl MedianDevice {
    pub fn copies(&self) -> usize {
        self.copies
    }

    pub fn inner(&self) -> &Arc<dyn SeemDevice> {
        &self.inner
    }
}

impl SeemDevice for MedianDevice {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn params(&self) -> SeemParams {
        let p = self.inner.params();
        SeemParams { eta: median_confidence(p.eta, self.copies), delta_e: p.delta_e, beta: self.copies as f64 * p.beta }
    }

    fn output_width(&self) -> usize {
        // m copy registers plus one register for the median
        (self.copies + 1) * self.inner.output_width()
    }

    fn components(&self, amps: &[C64]) -> Result<Vec<EnergyComponent>> {
        self.inner.components(amps)
    }

    fn sample(&self, levels: &[Level], weights: &[f64], rng: &mut RngStream) -> Result<Readout> {
        let mut factors = vec![C64::new(1.0, 0.0); levels.len()];
        let mut values = Vec::with_capacity(self.copies);
        let mut w = weights.to_vec();
        for _ in 0..self.copies {
            let r = self.inner.sample(levels, &w, rng)?;
            for ((f, x), (wi, w0)) in factors.iter_mut().zip(&r.factors).zip(w.iter_mut().zip(weights)) {
                *f *= x;
                *wi = w0 * f.norm_sqr();
            }
            values.push(r.value);
        }
        values.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        Ok(Readout { value: values[(self.copies - 1) / 2], factors })
    }

    /// Lower-median law from the single-copy law. Listed values assume the
    /// single-copy tail lies above the window; the returned tail adds the
    /// probability that enough copies land in the tail to move the median.
    fn distribution(&self, level: &Level) -> Result<ReadoutDistribution> {
        let d = self.inner.distribution(level)?;
        let m = self.copies;
        let k = (m - 1) / 2 + 1;
        let at_least_k = |f: f64| -> f64 { binomial_pmf(m, f.clamp(0.0, 1.0)).iter().skip(k).sum() };
        let mut cdf = 0.0;
        let mut prev = 0.0;
        let mut probs = Vec::with_capacity(d.probs.len());
        for p in &d.probs {
            cdf += p;
            let g = at_least_k(cdf);
            probs.push((g - prev).max(0.0));
            prev = g;
        }
        let listed: f64 = probs.iter().sum();
        let moved = at_least_k(d.tail).max(binomial_pmf(m, d.tail.clamp(0.0, 1.0)).iter().skip(m - k + 1).sum());
        Ok(ReadoutDistribution { values: d.values, probs, tail: (1.0 - listed).max(0.0) + moved })
    }
}

/// Parameters of the device built from a `(T, alpha)` fast-forwarding:
/// `(1 - e^{-n/18}, 1/T, 16 n alpha log2(32 T))`.
pub fn ff_to_seem_params(n: usize, t_range: u128, alpha: f64) -> SeemParams {
    let ell = output_bits(t_range);
    SeemParams {
        eta: 1.0 - (-(n as f64) / 18.0).exp(),
        delta_e: 1.0 / t_range as f64,
        beta: 16.0 * n as f64 * alpha * ell as f64,
    }
}

/// `floor(log2(32 T))`.
pub fn output_bits(t_range: u128) -> u32 {
    let x = t_range.saturating_mul(32).max(1);
    127 - x.leading_zeros()
}

/// Energy measurement from fast-forwarding of a normalized `H` on `n`
/// qubits: Fourier phase estimation of `V = e^{i(H + 1)}` with
/// `l = floor(log2(32 T))` bits, median of `n` copies. `ffu` implements
/// `e^{-iH}` for powers up to at least `T`; it is concatenated 16 times when
/// its range falls short of `2^{l-1}`.
pub fn ff_to_seem(ffu: Arc<dyn FastForwardableUnitary>, n: usize, t_range: u128) -> Result<MedianDevice> {
    if t_range == 0 {
        return Err(Error::invalid("time range T must be at least 1"));
    }
    if ffu.range() < t_range {
        return Err(Error::PowerOutOfRange { power: t_range.min(i128::MAX as u128) as i128, range: ffu.range() });
    }
    let ell = output_bits(t_range);
    if ell > crate::pe::fourier::MAX_BITS {
        return Err(Error::invalid("time range T too large for the output register"));
    }
    let alpha = ffu.alpha();
    let reach: Arc<dyn FastForwardableUnitary> =
        if ffu.range() < 1u128 << (ell - 1) { Arc::new(concatenate_ff(ffu, 16)?) } else { ffu };
    let params = ff_to_seem_params(1, t_range, alpha);
    // single copy: eta = 3/4 from the Fourier tail bound at l - b = 2
    let single = SeemParams { eta: 0.75, delta_e: params.delta_e, beta: params.beta };
    let dev = FourierSeem::new(reach, ell, single)?;
    median_amplify(Arc::new(dev), n)
}

/// Fast-forwarding assembled from an energy measurement: premeasure, apply
/// `e^{-i E' t}` to the readout, undo the premeasurement.
pub struct SeemEvolution {
    device: Arc<dyn SeemDevice>,
    t: f64,
}

/// `2 eta sin(dE t) + 2 (1 - eta + beta)`.
pub fn seem_to_ff_bound(p: SeemParams, t: f64) -> f64 {
    2.0 * p.eta * (p.delta_e * t).sin() + 2.0 * (1.0 - p.eta + p.beta)
}

pub fn seem_to_ff(device: Arc<dyn SeemDevice>, t: f64) -> Result<SeemEvolution> {
    let p = device.params();
    if p.delta_e * t.abs() >= core::f64::consts::FRAC_PI_2 {
        return Err(Error::invalid("evolution time must satisfy t dE < pi/2"));
    }
    Ok(SeemEvolution { device, t })
}

impl SeemEvolution {
    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn bound(&self) -> f64 {
        seem_to_ff_bound(self.device.params(), self.t)
    }

    /// Whether the device meets `eta > 1/2`, under which the bound is
    /// derived.
    pub fn precondition_met(&self) -> bool {
        self.device.params().eta > 0.5
    }

    /// `|| U^dagger V U |psi, 0> - e^{-iHt} |psi, 0> ||`, exactly up to the
    /// listed tail. The system-side demolition unitary commutes with `V` and
    /// cancels, so only the readout law enters.
    pub fn distance(&self, psi: &StateVector) -> Result<f64> {
        let comps = self.device.components(psi.amplitudes())?;
        let mut d2 = 0.0;
        for c in &comps {
            let dist = self.device.distribution(&c.level)?;
            d2 += c.weight * dist.phase_error_moment(c.level.energy, self.t);
        }
        Ok(d2.sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolve::dense_evolve;
    use crate::ff::DenseFf;
    use crate::pe::fourier::{fourier_premeasure_circuit, inverse_qft};

    fn diag(v: &[f64]) -> DenseOperator {
        DenseOperator::diagonal(&v.iter().map(|x| C64::new(*x, 0.0)).collect::<Vec<_>>())
    }

    #[test]
    fn median_formula_values() {
        assert!((median_confidence(2.0 / 3.0, 200) - (1.0 - (-6.25f64).exp())).abs() < 1e-15);
        assert!((median_confidence(2.0 / 3.0, 200) - 0.99807).abs() < 1e-5);
        let p = ff_to_seem_params(4, 1 << 20, 0.0);
        assert!((p.eta - (1.0 - (-4.0f64 / 18.0).exp())).abs() < 1e-15);
        assert_eq!(output_bits(1 << 20), 25);
        assert_eq!(output_bits(1_000_000), 24);
        // 3/4 single-copy confidence amplifies to exactly 1 - e^{-n/18}
        assert!((median_confidence(0.75, 7) - (1.0 - (-7.0f64 / 18.0).exp())).abs() < 1e-15);
    }

    #[test]
    fn single_copy_median_is_identity() {
        let h = diag(&[0.5, -0.25]);
        let inner: Arc<dyn SeemDevice> = Arc::new(SpectralDevice::exact(&h).unwrap().with_errors(0.2, 0.5, 0.1).unwrap());
        let med = median_amplify(inner.clone(), 1).unwrap();
        assert!((med.params().eta - median_confidence(0.8, 1)).abs() < 1e-15);
        let psi = StateVector::basis_state(1, 0).unwrap();
        let c = inner.components(psi.amplitudes()).unwrap();
        let (a, b) = (med.distribution(&c[0].level).unwrap(), inner.distribution(&c[0].level).unwrap());
        assert_eq!(a.values, b.values);
        assert!(a.probs.iter().zip(&b.probs).all(|(x, y)| (x - y).abs() < 1e-12));
        for seed in 0..20 {
            let a = measure_energy(&med, &psi, &mut RngStream::new(seed, 0)).unwrap();
            let b = measure_energy(inner.as_ref(), &psi, &mut RngStream::new(seed, 0)).unwrap();
            assert_eq!(a.0, b.0);
        }
    }

    #[test]
    fn median_rejects_weak_devices() {
        let h = diag(&[0.5]);
        let weak: Arc<dyn SeemDevice> = Arc::new(SpectralDevice::exact(&h).unwrap().with_errors(0.5, 1.0, 0.1).unwrap());
        assert!(median_amplify(weak, 3).is_err());
    }

    #[test]
    fn median_of_201_with_one_third_errors() {
        let h = diag(&[0.0]);
        let inner: Arc<dyn SeemDevice> =
            Arc::new(SpectralDevice::exact(&h).unwrap().with_errors(1.0 / 3.0, 0.5, 0.1).unwrap());
        let med = median_amplify(inner, 201).unwrap();
        let psi = StateVector::zero(0);
        let mut rng = RngStream::new(7, 0);
        let trials = 10_000;
        let mut bad = 0;
        for _ in 0..trials {
            if measure_energy(&med, &psi, &mut rng).unwrap().0.abs() > 0.1 {
                bad += 1;
            }
        }
        let bound = (-(201.0f64) / 2.0 * 0.25f64.powi(2)).exp();
        let exact: f64 = binomial_pmf(201, 1.0 / 3.0).iter().skip(101).sum();
        assert!(exact <= bound);
        let f = bad as f64 / trials as f64;
        assert!(f <= bound + 3.0 * (bound / trials as f64).sqrt(), "f={f} bound={bound}");
        // closed-form median law agrees with the binomial tail
        let c = med.components(psi.amplitudes()).unwrap();
        let d = med.distribution(&c[0].level).unwrap();
        assert!((1.0 - d.within(0.0, 0.1) - exact).abs() < 1e-12);
    }

    #[test]
    fn exact_device_is_non_demolition_and_exact() {
        let h = diag(&[0.3, -0.7, 0.3, 0.1]);
        let dev: Arc<dyn SeemDevice> = Arc::new(SpectralDevice::exact(&h).unwrap());
        let psi = StateVector::normalized(2, vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, 0.0)]).unwrap();
        let (e, post) = measure_energy(dev.as_ref(), &psi, &mut RngStream::new(0, 0)).unwrap();
        assert!((e - 0.3).abs() < 1e-12);
        assert!(crate::state::state_distance(&post, &psi).unwrap() < 1e-12);
        let ev = seem_to_ff(dev, 123.0).unwrap();
        assert_eq!(ev.distance(&psi).unwrap(), 0.0);
        assert_eq!(ev.bound(), 0.0);
    }

    #[test]
    fn demolition_distance_is_beta() {
        let h = diag(&[0.3, -0.7, 0.2, 0.1]);
        let mut rng = RngStream::new(3, 0);
        let dev = SpectralDevice::exact(&h).unwrap().with_demolition(0.05, &mut rng).unwrap();
        let w = dev.demolition().unwrap();
        let d = w.sub(&DenseOperator::identity(4)).operator_norm();
        assert!((d - 0.05).abs() < 1e-10);
        assert!(w.is_unitary(1e-12));
        let ev = seem_to_ff(Arc::new(dev), 0.0).unwrap();
        assert!(ev.distance(&StateVector::basis_state(2, 1).unwrap()).unwrap() <= 2.0 * 0.05);
    }

    #[test]
    fn time_limit_enforced() {
        let h = diag(&[0.0]);
        let dev: Arc<dyn SeemDevice> = Arc::new(SpectralDevice::exact(&h).unwrap().with_errors(0.1, 1.0, 0.5).unwrap());
        assert!(seem_to_ff(dev.clone(), 3.0).is_ok());
        assert!(seem_to_ff(dev, 3.2).is_err());
    }

    #[test]
    fn fourier_device_reads_diagonal_energies() {
        // energies on the 2^-l grid shifted by -1 are read exactly
        let ell = output_bits(64);
        let grid = |k: i64| 2.0 * core::f64::consts::PI * k as f64 / (1u64 << ell) as f64 - 1.0;
        let h = diag(&[grid(100), grid(600), grid(250), grid(326)]);
        let ffu: Arc<dyn FastForwardableUnitary> = Arc::new(DenseFf::new(&h).unwrap());
        let dev = ff_to_seem(ffu, 3, 64).unwrap();
        let mut rng = RngStream::new(1, 0);
        for i in 0..4 {
            let psi = StateVector::basis_state(2, i).unwrap();
            for _ in 0..10 {
                let (e, post) = measure_energy(&dev, &psi, &mut rng).unwrap();
                assert!((e - h.get(i, i).re).abs() < 1.0 / 64.0);
                assert!(crate::state::phase_aligned_distance(&post, &psi).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn premeasurement_leaves_eigenstates_alone() {
        let mut rng = RngStream::new(5, 0);
        let k = DenseOperator::from_fn(4, |_, _| C64::new(rng.normal(), rng.normal()));
        let h = k.add(&k.adjoint());
        let u = DenseFf::new(&h).unwrap();
        let spec = h.eigh().unwrap();
        for j in 0..4 {
            let psi = StateVector::from_amplitudes(2, spec.vector(j)).unwrap();
            let joint = fourier_premeasure_circuit(&u, 5, &psi).unwrap();
            let rho = joint.reduced_density(&[5, 6]).unwrap();
            let want = DenseOperator::from_fn(4, |r, c| psi.amplitude(r) * psi.amplitude(c).conj());
            assert!(rho.sub(&want).max_abs() < 1e-10);
        }
    }

    /// Full coherent round trip on a small register: premeasure, phase the
    /// readout, undo. The distance must match the closed form.
    #[test]
    fn coherent_round_trip_matches_closed_form() {
        let mut rng = RngStream::new(6, 0);
        let k = DenseOperator::from_fn(4, |_, _| C64::new(rng.normal(), rng.normal()));
        let mut h = k.add(&k.adjoint());
        h = h.scale(C64::new(1.0 / h.operator_norm(), 0.0));
        let ffu: Arc<dyn FastForwardableUnitary> = Arc::new(DenseFf::new(&h).unwrap());
        let ell = 6;
        let dev = FourierSeem::new(ffu, ell, SeemParams { eta: 0.75, delta_e: 1.0 / 2.0, beta: 0.0 }).unwrap();
        let v = PhaseShifted { inner: Inverse(DenseFf::new(&h).unwrap()), theta: Angle::radians(1.0) };
        let psi = StateVector::normalized(2, vec![C64::new(0.6, 0.1), C64::new(0.2, 0.0), C64::new(0.0, -0.5), C64::new(0.3, 0.3)]).unwrap();
        let t = 2.5;
        let mut joint = fourier_premeasure_circuit(&v, ell, &psi).unwrap();
        let l = ell as usize;
        for (i, z) in joint.amplitudes_mut().iter_mut().enumerate() {
            let m = (i & ((1 << l) - 1)) as u64;
            let e = dev.energy_of(m);
            *z *= C64::new((e * t).cos(), -(e * t).sin());
        }
        // undo: QFT, inverse controlled powers, Hadamards
        let targets: Vec<usize> = (0..l).collect();
        joint.apply_unitary(&inverse_qft(ell).adjoint(), &targets).unwrap();
        for q in 0..l {
            crate::ff::controlled_power_apply(&mut joint, &v, -(1i128 << q), q, l..l + 2, Angle::zero()).unwrap();
        }
        for q in 0..l {
            joint.apply_unitary(&crate::gates::hadamard(), &[q]).unwrap();
        }
        let evolved = dense_evolve(&h, t).unwrap().apply(psi.amplitudes());
        let ideal = StateVector::from_amplitudes(2, evolved).unwrap().tensor(&StateVector::zero(l)).unwrap();
        let d = crate::state::state_distance(&joint, &ideal).unwrap();
        let ev = seem_to_ff(Arc::new(dev), t).unwrap();
        assert!((d - ev.distance(&psi).unwrap()).abs() < 1e-10, "{d}");
    }
}
