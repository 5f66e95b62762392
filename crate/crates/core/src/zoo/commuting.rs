//! Commuting local Hamiltonians `H = sum_j H_j`, fast-forwarded term by term.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::dd::{cis_neg, DoubleDouble};
use crate::error::{Error, Result};
use crate::evolve::Time;
use crate::ff::{EigenComponent, FastForwardableUnitary, UNBOUNDED};
use crate::gates;
use crate::linalg::{apply_local, DenseOperator, OperatorAccumulator};
use crate::rng::RngStream;
use crate::state::norm_sqr;
use crate::tolerance::Tolerances;

/// One term: a Hermitian block acting on `qubits` (`qubits[k]` is bit `k`
/// of the block index).
#[derive(Debug, Clone, PartialEq)]
pub struct LocalTerm {
    pub qubits: Vec<usize>,
    pub block: DenseOperator,
}

impl LocalTerm {
    pub fn new(qubits: Vec<usize>, block: DenseOperator) -> Result<Self> {
        if block.dim() != 1 << qubits.len() {
            return Err(Error::DimensionMismatch { expected: 1 << qubits.len(), found: block.dim() });
        }
        let dev = block.hermitian_deviation();
        if dev > 1e-12 * block.max_abs().max(1.0) {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self { qubits, block })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommutingLocalHamiltonian {
    n: usize,
    terms: Vec<LocalTerm>,
}

impl CommutingLocalHamiltonian {
    /// Terms are validated individually; commutation is checked separately
    /// by [`verify_commuting`].
    pub fn new(n: usize, terms: Vec<LocalTerm>) -> Result<Self> {
        for t in &terms {
            crate::linalg::check_targets(&t.qubits, n)?;
        }
        Ok(Self { n, terms })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    /// Largest term support.
    pub fn locality(&self) -> usize {
        self.terms.iter().map(|t| t.qubits.len()).max().unwrap_or(0)
    }

    pub fn terms(&self) -> &[LocalTerm] {
        &self.terms
    }

    /// `sum_j ||H_j||`, an upper bound on `||H||`.
    pub fn norm_bound(&self) -> f64 {
        self.terms.iter().map(|t| t.block.operator_norm()).sum()
    }

    /// Same terms scaled by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| LocalTerm { qubits: t.qubits.clone(), block: t.block.scale(C64::new(s, 0.0)) })
            .collect();
        Self { n: self.n, terms }
    }

    /// Full matrix, entries summed in double-double.
    pub fn dense(&self) -> Result<DenseOperator> {
        let dim = 1usize << self.n;
        let cap = Tolerances::DEFAULT.oracle_cap;
        if dim > cap {
            return Err(Error::CapExceeded { dim, cap });
        }
        let mut acc = OperatorAccumulator::new(dim);
        for t in &self.terms {
            acc.add_operator(&t.block.embed(&t.qubits, self.n)?);
        }
        Ok(acc.finish())
    }
}

/// Largest commutator norm accepted as commuting.
pub const COMMUTATOR_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutationReport {
    pub commuting: bool,
    /// Largest `||[H_i, H_j]||` over pairs.
    pub max_norm: f64,
    pub worst_pair: Option<(usize, usize)>,
}

/// Pairwise commutators, each embedded on the union of the two supports
/// (which leaves the operator norm unchanged).
pub fn verify_commuting(h: &CommutingLocalHamiltonian, tol: f64) -> Result<CommutationReport> {
    let mut max_norm = 0.0;
    let mut worst_pair = None;
    let terms = &h.terms;
    for i in 0..terms.len() {
        for j in (i + 1)..terms.len() {
            let (a, b) = (&terms[i], &terms[j]);
            if !a.qubits.iter().any(|q| b.qubits.contains(q)) {
                continue;
            }
            let mut union = a.qubits.clone();
            for q in &b.qubits {
                if !union.contains(q) {
                    union.push(*q);
                }
            }
            let local = |t: &LocalTerm| -> Result<DenseOperator> {
                let pos: Vec<usize> =
                    t.qubits.iter().map(|q| union.iter().position(|u| u == q).expect("in union")).collect();
                t.block.embed(&pos, union.len())
            };
            let c = local(a)?.commutator(&local(b)?).operator_norm();
            if c > max_norm {
                max_norm = c;
                worst_pair = Some((i, j));
            }
        }
    }
    Ok(CommutationReport { commuting: max_norm <= tol, max_norm, worst_pair })
}

/// Eigenvalues of one block, grouped, with double-double values and
/// spectral projectors.
#[derive(Debug, Clone)]
struct BlockSpectrum {
    qubits: Vec<usize>,
    values: Vec<DoubleDouble>,
    projectors: Vec<DenseOperator>,
    vectors: DenseOperator,
    all_values: Vec<DoubleDouble>,
}

impl BlockSpectrum {
    fn new(term: &LocalTerm) -> Result<Self> {
        let spec = term.block.eigh()?;
        let d = term.block.dim();
        let mut values: Vec<DoubleDouble> = Vec::new();
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for (k, v) in spec.values.iter().enumerate() {
            match values.last() {
                Some(last) if (*v - *last).to_f64().abs() <= 1e-9 => groups.last_mut().expect("nonempty").push(k),
                _ => {
                    values.push(*v);
                    groups.push(vec![k]);
                }
            }
        }
        let projectors = groups
            .iter()
            .map(|g| {
                DenseOperator::from_fn(d, |r, c| g.iter().map(|&k| spec.vectors.get(r, k) * spec.vectors.get(c, k).conj()).sum())
            })
            .collect();
        Ok(Self { qubits: term.qubits.clone(), values, projectors, vectors: spec.vectors, all_values: spec.values })
    }

    /// `W diag(e^{-i lambda t}) W^dagger`, phases reduced in double-double.
    fn evolution(&self, t: Time) -> DenseOperator {
        let d = self.vectors.dim();
        let ph: Vec<C64> = self.all_values.iter().map(|&l| cis_neg(t.scale(l))).collect();
        DenseOperator::from_fn(d, |r, c| (0..d).map(|k| self.vectors.get(r, k) * ph[k] * self.vectors.get(c, k).conj()).sum())
    }
}

/// `e^{-iH}` for a commuting local Hamiltonian. Each power diagonalizes every
/// term in its own eigenbasis and applies `e^{-i lambda_m t}` with the phase
/// reduced modulo `2 pi` first, so the cost does not depend on `t`.
#[derive(Debug, Clone)]
pub struct CommutingEvolution {
    n: usize,
    blocks: Vec<BlockSpectrum>,
}

pub fn commuting_ff(h: &CommutingLocalHamiltonian) -> Result<CommutingEvolution> {
    let report = verify_commuting(h, COMMUTATOR_TOL)?;
    if !report.commuting {
        let (i, j) = report.worst_pair.expect("non-commuting pair");
        return Err(Error::NonCommuting(i, j, report.max_norm));
    }
    let blocks = h.terms.iter().map(BlockSpectrum::new).collect::<Result<Vec<_>>>()?;
    Ok(CommutingEvolution { n: h.n, blocks })
}

impl CommutingEvolution {
    pub fn qubits(&self) -> usize {
        self.n
    }

    /// `amps <- e^{-iHt} amps` for integer or real `t`.
    pub fn evolve(&self, amps: &mut [C64], t: impl Into<Time>) -> Result<()> {
        let t = t.into();
        for b in &self.blocks {
            apply_local(amps, self.n, &b.evolution(t), &b.qubits)?;
        }
        Ok(())
    }

    /// Joint eigenspaces, found by projecting term by term; energies are sums
    /// of block eigenvalues in double-double.
    pub fn energy_components(&self, amps: &[C64]) -> Result<Vec<(DoubleDouble, Vec<C64>)>> {
        let mut leaves: Vec<(DoubleDouble, Vec<C64>)> = vec![(DoubleDouble::ZERO, amps.to_vec())];
        let floor = 1e-26 * norm_sqr(amps).max(1e-300);
        for b in &self.blocks {
            let mut next = Vec::new();
            for (e, v) in &leaves {
                for (lam, p) in b.values.iter().zip(&b.projectors) {
                    let mut w = v.clone();
                    apply_local(&mut w, self.n, p, &b.qubits)?;
                    if norm_sqr(&w) > floor {
                        next.push((*e + *lam, w));
                    }
                }
            }
            leaves = next;
        }
        // merge equal energies
        leaves.sort_by(|a, b| a.0.to_f64().total_cmp(&b.0.to_f64()));
        let mut out: Vec<(DoubleDouble, Vec<C64>)> = Vec::new();
        for (e, v) in leaves {
            match out.last_mut() {
                Some((e0, v0)) if (e - *e0).to_f64().abs() <= 1e-12 => {
                    for (x, y) in v0.iter_mut().zip(&v) {
                        *x += y;
                    }
                }
                _ => out.push((e, v)),
            }
        }
        Ok(out)
    }
}

impl FastForwardableUnitary for CommutingEvolution {
    fn dim(&self) -> usize {
        1 << self.n
    }

    fn range(&self) -> u128 {
        UNBOUNDED
    }

    fn apply_power(&self, amps: &mut [C64], power: i128) -> Result<()> {
        self.evolve(amps, Time::Integer(power))
    }

    fn eigen_components(&self, amps: &[C64]) -> Result<Vec<EigenComponent>> {
        Ok(self
            .energy_components(amps)?
            .into_iter()
            .map(|(e, v)| EigenComponent { phase: (-e).rem_two_pi_dd(), weight: norm_sqr(&v), vector: v })
            .collect())
    }
}

/// `sum_i sigma_z^{(i)}`.
pub fn sum_sigma_z(n: usize) -> CommutingLocalHamiltonian {
    let terms = (0..n).map(|q| LocalTerm { qubits: vec![q], block: gates::pauli_z() }).collect();
    CommutingLocalHamiltonian { n, terms }
}

/// Random Haar-like single-qubit unitary.
fn random_qubit_unitary(rng: &mut RngStream) -> DenseOperator {
    let m = DenseOperator::from_fn(2, |_, _| C64::new(rng.normal(), rng.normal()));
    let h = m.add(&m.adjoint());
    let spec = h.eigh().expect("Hermitian");
    spec.vectors
}

/// Random commuting `k`-local Hamiltonian on `n` qubits with `count` terms
/// on random supports. All terms are diagonal in one random product basis
/// but each is handed over as a dense block in the computational basis.
/// Scaled so that `sum_j ||H_j|| = 1`.
pub fn random_commuting(n: usize, k: usize, count: usize, rng: &mut RngStream) -> Result<CommutingLocalHamiltonian> {
    if k == 0 || k > n {
        return Err(Error::invalid("locality k must satisfy 1 <= k <= n"));
    }
    let frames: Vec<DenseOperator> = (0..n).map(|_| random_qubit_unitary(rng)).collect();
    let mut terms = Vec::with_capacity(count);
    for _ in 0..count {
        let mut qubits: Vec<usize> = (0..n).collect();
        rng.shuffle(&mut qubits);
        qubits.truncate(k);
        // kron puts its left factor on the high bits; qubits[0] is bit 0
        let mut w = DenseOperator::identity(1);
        for &q in qubits.iter().rev() {
            w = w.kron(&frames[q]);
        }
        let diag: Vec<C64> = (0..1 << k).map(|_| C64::new(rng.normal(), 0.0)).collect();
        let block = w.matmul(&DenseOperator::diagonal(&diag)).matmul(&w.adjoint());
        terms.push(LocalTerm::new(qubits, hermitian_part(&block))?);
    }
    let h = CommutingLocalHamiltonian::new(n, terms)?;
    let s = h.norm_bound();
    Ok(if s > 0.0 { h.scaled(1.0 / s) } else { h })
}

fn hermitian_part(m: &DenseOperator) -> DenseOperator {
    m.add(&m.adjoint()).scale(C64::new(0.5, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolve::dense_evolve;
    use crate::state::StateVector;

    #[test]
    fn pauli_pairs() {
        let x1 = LocalTerm::new(vec![0], gates::pauli_x()).unwrap();
        let z2 = LocalTerm::new(vec![1], gates::pauli_z()).unwrap();
        let h = CommutingLocalHamiltonian::new(2, vec![x1.clone(), z2]).unwrap();
        let r = verify_commuting(&h, 1e-10).unwrap();
        assert!(r.commuting && r.max_norm == 0.0);
        let z1 = LocalTerm::new(vec![0], gates::pauli_z()).unwrap();
        let bad = CommutingLocalHamiltonian::new(2, vec![x1, z1]).unwrap();
        let r = verify_commuting(&bad, 1e-10).unwrap();
        assert!(!r.commuting);
        // [X, Z] = -2iY has norm 2
        assert!((r.max_norm - 2.0).abs() < 1e-12);
        assert!(matches!(commuting_ff(&bad), Err(Error::NonCommuting(0, 1, _))));
    }

    #[test]
    fn zero_hamiltonian_is_identity() {
        let h = CommutingLocalHamiltonian::new(3, vec![]).unwrap();
        let ff = commuting_ff(&h).unwrap();
        let psi = StateVector::normalized(3, (0..8).map(|i| C64::new(i as f64, 1.0)).collect()).unwrap();
        let mut v = psi.amplitudes().to_vec();
        ff.apply_power(&mut v, 1 << 60).unwrap();
        assert_eq!(v, psi.amplitudes());
    }

    #[test]
    fn sigma_z_phases() {
        let n = 4;
        let ff = commuting_ff(&sum_sigma_z(n)).unwrap();
        let t: i128 = (1 << 60) + 12345;
        for x in 0..16usize {
            let mut v = StateVector::basis_state(n, x).unwrap().into_amplitudes();
            ff.apply_power(&mut v, t).unwrap();
            let w = x.count_ones() as i128;
            let e = DoubleDouble::from_i128((n as i128 - 2 * w) * t);
            let want = cis_neg(e);
            assert!((v[x] - want).norm() < 1e-12);
        }
    }

    #[test]
    fn random_eight_qubits_large_time() {
        let mut rng = RngStream::new(8, 0);
        let h = random_commuting(8, 2, 10, &mut rng).unwrap();
        assert!(verify_commuting(&h, 1e-10).unwrap().commuting);
        let ff = commuting_ff(&h).unwrap();
        let dense = h.dense().unwrap();
        let psi = StateVector::normalized(8, (0..256).map(|_| C64::new(rng.normal(), rng.normal())).collect()).unwrap();
        let t = 1_000_000_000i128;
        let mut got = psi.amplitudes().to_vec();
        ff.apply_power(&mut got, t).unwrap();
        let want = dense_evolve(&dense, t).unwrap().apply(psi.amplitudes());
        let d: f64 = got.iter().zip(&want).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        assert!(d < 1e-6, "{d}");
    }

    #[test]
    fn joint_components_reassemble() {
        let mut rng = RngStream::new(9, 0);
        let h = random_commuting(4, 2, 5, &mut rng).unwrap();
        let ff = commuting_ff(&h).unwrap();
        let dense = h.dense().unwrap();
        let psi: Vec<C64> = (0..16).map(|_| C64::new(rng.normal(), rng.normal())).collect();
        let comps = ff.energy_components(&psi).unwrap();
        let mut sum = vec![C64::new(0.0, 0.0); 16];
        for (e, v) in &comps {
            let hv = dense.apply(v);
            for (a, b) in hv.iter().zip(v) {
                assert!((a - b * e.to_f64()).norm() < 1e-10);
            }
            for (s, x) in sum.iter_mut().zip(v) {
                *s += x;
            }
        }
        for (a, b) in sum.iter().zip(&psi) {
            assert!((a - b).norm() < 1e-10);
        }
    }
}
