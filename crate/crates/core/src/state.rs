//! Normalized statevectors.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{check_targets, DenseOperator};
use crate::rng::RngStream;

const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum Basis {
    /// `2^n` computational states; qubit `q` is bit `q` of the index.
    Qubits(usize),
    /// Explicit integer labels, e.g. an orbit subspace.
    Labels(Vec<u128>),
}

impl Basis {
    pub fn dim(&self) -> usize {
        match self {
            Basis::Qubits(n) => 1 << n,
            Basis::Labels(l) => l.len(),
        }
    }

    pub fn label(&self, i: usize) -> u128 {
        match self {
            Basis::Qubits(_) => i as u128,
            Basis::Labels(l) => l[i],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    basis: Basis,
    amps: Vec<C64>,
}

pub fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn normalize_in_place(v: &mut [C64]) -> f64 {
    let n2 = norm_sqr(v);
    if n2 > 0.0 {
        let s = 1.0 / n2.sqrt();
        for z in v.iter_mut() {
            *z *= s;
        }
    }
    n2
}

impl StateVector {
    pub fn basis_state(n_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::DimensionMismatch { expected: dim, found: index });
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { basis: Basis::Qubits(n_qubits), amps })
    }

    pub fn zero(n_qubits: usize) -> Self {
        Self::basis_state(n_qubits, 0).expect("index 0 always fits")
    }

    /// Amplitudes must already have unit norm (within 1e-10); they are
    /// renormalized exactly.
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<C64>) -> Result<Self> {
        Self::with_basis(Basis::Qubits(n_qubits), amps)
    }

    /// Rescales any nonzero vector to unit norm.
    pub fn normalized(n_qubits: usize, mut amps: Vec<C64>) -> Result<Self> {
        let expected = 1usize << n_qubits;
        if amps.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: amps.len() });
        }
        let n2 = normalize_in_place(&mut amps);
        if n2 == 0.0 || !n2.is_finite() {
            return Err(Error::NotNormalized(n2));
        }
        Ok(Self { basis: Basis::Qubits(n_qubits), amps })
    }

    pub fn over_labels(labels: Vec<u128>, amps: Vec<C64>) -> Result<Self> {
        let mut sorted = labels.clone();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateLabel(w[0]));
            }
        }
        Self::with_basis(Basis::Labels(labels), amps)
    }

    pub fn with_basis(basis: Basis, mut amps: Vec<C64>) -> Result<Self> {
        if amps.len() != basis.dim() {
            return Err(Error::DimensionMismatch { expected: basis.dim(), found: amps.len() });
        }
        let n2 = norm_sqr(&amps);
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n2));
        }
        normalize_in_place(&mut amps);
        Ok(Self { basis, amps })
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn num_qubits(&self) -> Option<usize> {
        match self.basis {
            Basis::Qubits(n) => Some(n),
            Basis::Labels(_) => None,
        }
    }

    fn qubits(&self) -> Result<usize> {
        self.num_qubits().ok_or(Error::NotQubitBasis)
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitude(&self, i: usize) -> C64 {
        self.amps[i]
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    /// Raw mutable access for unitary kernels. Callers must preserve the norm;
    /// [`StateVector::renormalize`] repairs floating drift afterwards.
    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn renormalize(&mut self) {
        normalize_in_place(&mut self.amps);
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.basis != other.basis {
            return Err(Error::BasisMismatch);
        }
        Ok(inner(&self.amps, &other.amps))
    }

    /// `|self>|low>` with `low` on the low-order qubits.
    pub fn tensor(&self, low: &Self) -> Result<Self> {
        let (nh, nl) = (self.qubits()?, low.qubits()?);
        let mut amps = Vec::with_capacity(self.dim() * low.dim());
        for a in &self.amps {
            for b in &low.amps {
                amps.push(a * b);
            }
        }
        Ok(Self { basis: Basis::Qubits(nh + nl), amps })
    }

    /// Applies a unitary on `targets`; `targets[k]` is bit `k` of the
    /// operator's index.
    pub fn apply_unitary(&mut self, op: &DenseOperator, targets: &[usize]) -> Result<()> {
        let n = self.qubits()?;
        check_targets(targets, n)?;
        let k = targets.len();
        if op.dim() != 1 << k {
            return Err(Error::DimensionMismatch { expected: 1 << k, found: op.dim() });
        }
        let dev = op.unitarity_deviation();
        if dev > 1e-10 {
            return Err(Error::NotUnitary(dev));
        }
        let mask: usize = targets.iter().map(|&q| 1 << q).sum();
        let offsets: Vec<usize> = (0..op.dim())
            .map(|l| targets.iter().enumerate().map(|(b, &q)| ((l >> b) & 1) << q).sum())
            .collect();
        let mut buf = vec![C64::new(0.0, 0.0); op.dim()];
        for base in 0..self.amps.len() {
            if base & mask != 0 {
                continue;
            }
            for (l, &o) in offsets.iter().enumerate() {
                buf[l] = self.amps[base | o];
            }
            let out = op.apply(&buf);
            for (l, &o) in offsets.iter().enumerate() {
                self.amps[base | o] = out[l];
            }
        }
        self.renormalize();
        Ok(())
    }

    /// Probability of each outcome pattern on `targets` (bit `k` of the
    /// pattern is `targets[k]`).
    pub fn outcome_probabilities(&self, targets: &[usize]) -> Result<Vec<f64>> {
        let n = self.qubits()?;
        check_targets(targets, n)?;
        let mut probs = vec![0.0; 1 << targets.len()];
        for (i, z) in self.amps.iter().enumerate() {
            probs[gather(i, targets)] += z.norm_sqr();
        }
        Ok(probs)
    }

    /// Projective measurement of `targets`, returning the outcome pattern and
    /// the renormalized post-measurement state.
    pub fn measure_qubits(&self, targets: &[usize], rng: &mut RngStream) -> Result<(u64, Self)> {
        let probs = self.outcome_probabilities(targets)?;
        let outcome = rng.weighted_index(&probs);
        let mut post = self.clone();
        for (i, z) in post.amps.iter_mut().enumerate() {
            if gather(i, targets) != outcome {
                *z = C64::new(0.0, 0.0);
            }
        }
        post.renormalize();
        Ok((outcome as u64, post))
    }

    /// Full measurement in the stored basis; returns the basis label.
    pub fn sample_label(&self, rng: &mut RngStream) -> u128 {
        let w: Vec<f64> = self.amps.iter().map(|z| z.norm_sqr()).collect();
        self.basis.label(rng.weighted_index(&w))
    }

    /// Reduced density matrix on `keep`, tracing out every other qubit.
    pub fn reduced_density(&self, keep: &[usize]) -> Result<DenseOperator> {
        let n = self.qubits()?;
        check_targets(keep, n)?;
        let mask: usize = keep.iter().map(|&q| 1 << q).sum();
        let d = 1 << keep.len();
        let mut rho = vec![C64::new(0.0, 0.0); d * d];
        let others: Vec<usize> = (0..n).filter(|q| mask & (1 << q) == 0).collect();
        for env in 0..(1usize << others.len()) {
            let base: usize = others.iter().enumerate().map(|(b, &q)| ((env >> b) & 1) << q).sum();
            let idx: Vec<usize> = (0..d)
                .map(|l| base | keep.iter().enumerate().map(|(b, &q)| ((l >> b) & 1) << q).sum::<usize>())
                .collect();
            for r in 0..d {
                let ar = self.amps[idx[r]];
                if ar == C64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..d {
                    rho[r * d + c] += ar * self.amps[idx[c]].conj();
                }
            }
        }
        DenseOperator::from_rows(d, rho)
    }
}

fn gather(i: usize, targets: &[usize]) -> usize {
    targets.iter().enumerate().map(|(b, &q)| ((i >> q) & 1) << b).sum()
}

/// `min_theta ||a - e^{i theta} b||_2`: distance up to a global phase.
pub fn phase_aligned_distance(a: &StateVector, b: &StateVector) -> Result<f64> {
    if a.basis != b.basis {
        return Err(Error::BasisMismatch);
    }
    let ov = inner(&b.amps, &a.amps);
    let ph = if ov.norm() > 0.0 { ov / ov.norm() } else { C64::new(1.0, 0.0) };
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| (x - ph * y).norm_sqr()).sum::<f64>().sqrt())
}

/// Euclidean distance `||a - b||_2` between states on the same basis.
pub fn state_distance(a: &StateVector, b: &StateVector) -> Result<f64> {
    if a.basis != b.basis {
        return Err(Error::BasisMismatch);
    }
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates;
    use core::f64::consts::FRAC_1_SQRT_2;
    use proptest::prelude::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn identity_leaves_state() {
        let mut s = StateVector::normalized(2, vec![c(1.), c(2.), c(0.), c(-1.)]).unwrap();
        let before = s.clone();
        s.apply_unitary(&DenseOperator::identity(4), &[0, 1]).unwrap();
        assert!(state_distance(&s, &before).unwrap() < 1e-15);
    }

    #[test]
    fn hadamard_on_zero() {
        let mut s = StateVector::zero(1);
        s.apply_unitary(&gates::hadamard(), &[0]).unwrap();
        assert!((s.amplitude(0).re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s.amplitude(1).re - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn double_x_is_identity() {
        let mut s = StateVector::zero(1);
        s.apply_unitary(&gates::pauli_x(), &[0]).unwrap();
        s.apply_unitary(&gates::pauli_x(), &[0]).unwrap();
        assert_eq!(s, StateVector::zero(1));
    }

    #[test]
    fn apply_rejects_bad_ops() {
        let mut s = StateVector::zero(2);
        assert!(matches!(
            s.apply_unitary(&gates::hadamard(), &[0, 1]),
            Err(Error::DimensionMismatch { .. })
        ));
        let bad = DenseOperator::from_real_rows(2, &[1., 1., 0., 1.]).unwrap();
        assert!(matches!(s.apply_unitary(&bad, &[0]), Err(Error::NotUnitary(_))));
        assert!(matches!(s.apply_unitary(&gates::hadamard(), &[2]), Err(Error::QubitOutOfRange { .. })));
        let cx = DenseOperator::identity(4);
        assert!(matches!(s.apply_unitary(&cx, &[1, 1]), Err(Error::DuplicateQubit(1))));
    }

    #[test]
    fn measure_zero() {
        let mut rng = RngStream::new(0, 0);
        let (o, post) = StateVector::zero(1).measure_qubits(&[0], &mut rng).unwrap();
        assert_eq!(o, 0);
        assert_eq!(post, StateVector::zero(1));
    }

    #[test]
    fn plus_state_frequency() {
        let mut rng = RngStream::new(3, 0);
        let s = StateVector::normalized(1, vec![c(1.), c(1.)]).unwrap();
        let ones = (0..10_000).filter(|_| s.measure_qubits(&[0], &mut rng).unwrap().0 == 1).count();
        assert!((ones as f64 / 1e4 - 0.5).abs() < 0.02);
    }

    #[test]
    fn bell_collapse() {
        let bell = StateVector::normalized(2, vec![c(1.), c(0.), c(0.), c(1.)]).unwrap();
        let mut rng = RngStream::new(11, 0);
        loop {
            let (o, post) = bell.measure_qubits(&[0], &mut rng).unwrap();
            if o == 1 {
                assert_eq!(post, StateVector::basis_state(2, 3).unwrap());
                break;
            }
        }
    }

    #[test]
    fn distances() {
        let z = StateVector::zero(1);
        let o = StateVector::basis_state(1, 1).unwrap();
        let p = StateVector::normalized(1, vec![c(1.), c(1.)]).unwrap();
        assert_eq!(state_distance(&z, &z).unwrap(), 0.0);
        assert!((state_distance(&z, &o).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        // sqrt((1 - 1/sqrt2)^2 + 1/2) = sqrt(2 - sqrt2)
        assert!((state_distance(&z, &p).unwrap() - (2.0 - 2f64.sqrt()).sqrt()).abs() < 1e-15);
        let l = StateVector::over_labels(vec![0, 1], vec![c(1.), c(0.)]).unwrap();
        assert_eq!(state_distance(&z, &l), Err(Error::BasisMismatch));
    }

    #[test]
    fn duplicate_labels_rejected() {
        assert_eq!(
            StateVector::over_labels(vec![3, 3], vec![c(1.), c(0.)]),
            Err(Error::DuplicateLabel(3))
        );
    }

    #[test]
    fn born_statistics_within_three_sigma() {
        let amps = vec![c(0.1), c(0.3), c(0.5), c(0.8)];
        let s = StateVector::normalized(2, amps).unwrap();
        let p: Vec<f64> = s.amplitudes().iter().map(|z| z.norm_sqr()).collect();
        let mut rng = RngStream::new(5, 9);
        let n = 100_000;
        let mut counts = [0usize; 4];
        for _ in 0..n {
            counts[s.sample_label(&mut rng) as usize] += 1;
        }
        for k in 0..4 {
            let sigma = (p[k] * (1.0 - p[k]) / n as f64).sqrt();
            assert!((counts[k] as f64 / n as f64 - p[k]).abs() <= 3.0 * sigma + 1e-12);
        }
    }

    #[test]
    fn reduced_density_of_product_state() {
        let a = StateVector::normalized(1, vec![c(1.), c(2.)]).unwrap();
        let b = StateVector::normalized(1, vec![c(3.), C64::new(0., 1.)]).unwrap();
        let ab = a.tensor(&b).unwrap();
        let rho = ab.reduced_density(&[0]).unwrap();
        for r in 0..2 {
            for cc in 0..2 {
                let want = b.amplitude(r) * b.amplitude(cc).conj();
                assert!((rho.get(r, cc) - want).norm() < 1e-15);
            }
        }
    }

    proptest! {
        #[test]
        fn unitaries_preserve_norm(seed in any::<u64>(), q in 0usize..3) {
            let mut rng = RngStream::new(seed, 0);
            let amps: Vec<C64> = (0..8).map(|_| C64::new(rng.normal(), rng.normal())).collect();
            let mut s = StateVector::normalized(3, amps).unwrap();
            s.apply_unitary(&gates::hadamard(), &[q]).unwrap();
            s.apply_unitary(&gates::phase(rng.uniform() * 6.0), &[(q + 1) % 3]).unwrap();
            prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }
}
