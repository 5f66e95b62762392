//! Dense complex matrices and Hermitian eigendecomposition.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::dd::{ComplexDd, DoubleDouble};
use crate::error::{Error, Result};

/// Square complex matrix, row-major.
///
/// `low` optionally carries the low-order half of double-double entries for
/// operators assembled from sums whose rounding would otherwise show up in
/// eigenphases at very large times.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    dim: usize,
    entries: Vec<C64>,
    low: Option<Vec<C64>>,
}

impl DenseOperator {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, entries: vec![C64::new(0.0, 0.0); dim * dim], low: None }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: entries.len() });
        }
        Ok(Self { dim, entries, low: None })
    }

    pub fn from_real_rows(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::from_rows(dim, entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                entries.push(f(r, c));
            }
        }
        Self { dim, entries, low: None }
    }

    pub fn diagonal(diag: &[C64]) -> Self {
        let dim = diag.len();
        let mut m = Self::zeros(dim);
        for (i, &d) in diag.iter().enumerate() {
            m.entries[i * dim + i] = d;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.entries[r * self.dim + c]
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn low(&self) -> Option<&[C64]> {
        self.low.as_deref()
    }

    /// Entry `(r, c)` including its low-order half.
    pub fn get_dd(&self, r: usize, c: usize) -> ComplexDd {
        let i = r * self.dim + c;
        match &self.low {
            Some(lo) => ComplexDd::from_parts(self.entries[i], lo[i]),
            None => ComplexDd::from_c64(self.entries[i]),
        }
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.dim).map(|r| self.get(r, c)).collect()
    }

    pub fn adjoint(&self) -> Self {
        let low = self
            .low
            .as_ref()
            .map(|lo| transpose_conj(self.dim, lo));
        Self { dim: self.dim, entries: transpose_conj(self.dim, &self.entries), low }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self.get(c, r))
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self.get(r, c).conj())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = vec![C64::new(0.0, 0.0); n * n];
        for r in 0..n {
            let row = &self.entries[r * n..(r + 1) * n];
            let dst = &mut out[r * n..(r + 1) * n];
            for (k, &a) in row.iter().enumerate() {
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let orow = &other.entries[k * n..(k + 1) * n];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        Self { dim: n, entries: out, low: None }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Self { dim: self.dim, entries, low: None }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        Self { dim: self.dim, entries, low: None }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { dim: self.dim, entries: self.entries.iter().map(|a| a * s).collect(), low: None }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        self.matmul(other).add(&other.matmul(self))
    }

    /// `self ⊗ other`, with `other` on the low-order index bits.
    pub fn kron(&self, other: &Self) -> Self {
        let (a, b) = (self.dim, other.dim);
        Self::from_fn(a * b, |r, c| self.get(r / b, c / b) * other.get(r % b, c % b))
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim);
        let n = self.dim;
        (0..n)
            .map(|r| {
                self.entries[r * n..(r + 1) * n]
                    .iter()
                    .zip(v)
                    .map(|(a, x)| a * x)
                    .sum()
            })
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    /// `max |(M^dagger M - 1)_{ij}|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let p = self.adjoint().matmul(self);
        p.sub(&Self::identity(self.dim)).max_abs()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() <= tol
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        if self.dim == 0 {
            return 0.0;
        }
        let g = self.adjoint().matmul(self);
        let m = to_nalgebra(&hermitize(&g));
        let vals = m.symmetric_eigenvalues();
        vals.iter().fold(0.0f64, |a, &b| a.max(b)).max(0.0).sqrt()
    }

    /// Lifts an operator on `targets` to the full `n`-qubit space. Target
    /// `targets[k]` corresponds to bit `k` of the operator's own index.
    pub fn embed(&self, targets: &[usize], n: usize) -> Result<Self> {
        check_targets(targets, n)?;
        if self.dim != 1 << targets.len() {
            return Err(Error::DimensionMismatch { expected: 1 << targets.len(), found: self.dim });
        }
        let full = 1usize << n;
        let mask: usize = targets.iter().map(|&q| 1 << q).sum();
        let local = |x: usize| -> usize {
            targets.iter().enumerate().map(|(k, &q)| ((x >> q) & 1) << k).sum()
        };
        let mut out = Self::zeros(full);
        for r in 0..full {
            let rl = local(r);
            let rest = r & !mask;
            for cl in 0..self.dim {
                let v = self.get(rl, cl);
                if v == C64::new(0.0, 0.0) {
                    continue;
                }
                let c = rest | scatter(cl, targets);
                out.entries[r * full + c] = v;
            }
        }
        Ok(out)
    }

    /// Eigendecomposition of a Hermitian operator, eigenvalues ascending and
    /// refined in double-double against the (possibly double-double) entries.
    pub fn eigh(&self) -> Result<Spectrum> {
        let dev = self.hermitian_deviation();
        let scale = self.max_abs().max(1.0);
        if dev > 1e-12 * scale {
            return Err(Error::NotHermitian(dev));
        }
        let n = self.dim;
        if n == 0 {
            return Ok(Spectrum { values: Vec::new(), vectors: Self::zeros(0) });
        }
        let eig = to_nalgebra(&hermitize(self)).symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let mut vectors = Self::zeros(n);
        let mut values = Vec::with_capacity(n);
        for (k, &i) in order.iter().enumerate() {
            let v: Vec<C64> = (0..n).map(|r| eig.eigenvectors[(r, i)]).collect();
            values.push(self.rayleigh_quotient(&v));
            for (r, z) in v.into_iter().enumerate() {
                vectors.entries[r * n + k] = z;
            }
        }
        Ok(Spectrum { values, vectors })
    }

    /// `v^dagger M v / v^dagger v` in double-double, for Hermitian `M`.
    pub fn rayleigh_quotient(&self, v: &[C64]) -> DoubleDouble {
        let n = self.dim;
        let mut num = DoubleDouble::ZERO;
        let mut den = DoubleDouble::ZERO;
        for i in 0..n {
            let vi = v[i];
            if vi == C64::new(0.0, 0.0) {
                continue;
            }
            den += DoubleDouble::from_f64(vi.re) * DoubleDouble::from_f64(vi.re)
                + DoubleDouble::from_f64(vi.im) * DoubleDouble::from_f64(vi.im);
            let hii = self.get_dd(i, i).re;
            num += hii * (DoubleDouble::from_f64(vi.re) * DoubleDouble::from_f64(vi.re)
                + DoubleDouble::from_f64(vi.im) * DoubleDouble::from_f64(vi.im));
            let mut off = ComplexDd::default();
            for j in (i + 1)..n {
                if v[j] == C64::new(0.0, 0.0) {
                    continue;
                }
                let h = self.get_dd(i, j);
                if h.re.hi == 0.0 && h.im.hi == 0.0 {
                    continue;
                }
                off += h.mul_c64(v[j]);
            }
            let t = off.mul_c64(vi.conj());
            num += t.re.mul_f64(2.0);
        }
        num / den
    }
}

/// `amps <- (op on targets) amps` on an `n`-qubit vector; `targets[k]` is
/// bit `k` of the operator's index. No normalization or unitarity check.
pub fn apply_local(amps: &mut [C64], n: usize, op: &DenseOperator, targets: &[usize]) -> Result<()> {
    if amps.len() != 1 << n {
        return Err(Error::DimensionMismatch { expected: 1 << n, found: amps.len() });
    }
    check_targets(targets, n)?;
    if op.dim != 1 << targets.len() {
        return Err(Error::DimensionMismatch { expected: 1 << targets.len(), found: op.dim });
    }
    let mask: usize = targets.iter().map(|&q| 1 << q).sum();
    let offsets: Vec<usize> = (0..op.dim).map(|l| scatter(l, targets)).collect();
    let mut buf = vec![C64::new(0.0, 0.0); op.dim];
    for base in 0..amps.len() {
        if base & mask != 0 {
            continue;
        }
        for (l, &o) in offsets.iter().enumerate() {
            buf[l] = amps[base | o];
        }
        let out = op.apply(&buf);
        for (l, &o) in offsets.iter().enumerate() {
            amps[base | o] = out[l];
        }
    }
    Ok(())
}

fn transpose_conj(n: usize, e: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); n * n];
    for r in 0..n {
        for c in 0..n {
            out[c * n + r] = e[r * n + c].conj();
        }
    }
    out
}

fn hermitize(m: &DenseOperator) -> DenseOperator {
    DenseOperator::from_fn(m.dim, |r, c| (m.get(r, c) + m.get(c, r).conj()) * 0.5)
}

fn to_nalgebra(m: &DenseOperator) -> DMatrix<C64> {
    DMatrix::from_row_slice(m.dim, m.dim, &m.entries)
}

fn scatter(local: usize, targets: &[usize]) -> usize {
    targets.iter().enumerate().map(|(k, &q)| ((local >> k) & 1) << q).sum()
}

pub(crate) fn check_targets(targets: &[usize], n: usize) -> Result<()> {
    for (i, &q) in targets.iter().enumerate() {
        if q >= n {
            return Err(Error::QubitOutOfRange { index: q, qubits: n });
        }
        if targets[..i].contains(&q) {
            return Err(Error::DuplicateQubit(q));
        }
    }
    Ok(())
}

/// Sums matrix entries in double-double so that operators built from many
/// terms keep their exact values.
#[derive(Debug, Clone)]
pub struct OperatorAccumulator {
    dim: usize,
    acc: Vec<ComplexDd>,
}

impl OperatorAccumulator {
    pub fn new(dim: usize) -> Self {
        Self { dim, acc: vec![ComplexDd::default(); dim * dim] }
    }

    pub fn add(&mut self, r: usize, c: usize, z: C64) {
        self.acc[r * self.dim + c] += ComplexDd::from_c64(z);
    }

    pub fn add_dd(&mut self, r: usize, c: usize, z: ComplexDd) {
        self.acc[r * self.dim + c] += z;
    }

    pub fn add_operator(&mut self, m: &DenseOperator) {
        assert_eq!(m.dim, self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                let z = m.get_dd(r, c);
                if z.re.hi != 0.0 || z.im.hi != 0.0 {
                    self.acc[r * self.dim + c] += z;
                }
            }
        }
    }

    pub fn finish(self) -> DenseOperator {
        let mut entries = Vec::with_capacity(self.acc.len());
        let mut low = Vec::with_capacity(self.acc.len());
        for z in self.acc {
            let (h, l) = z.split();
            entries.push(h);
            low.push(l);
        }
        let any_low = low.iter().any(|z| *z != C64::new(0.0, 0.0));
        DenseOperator { dim: self.dim, entries, low: any_low.then_some(low) }
    }
}

/// Eigenvalues (ascending) and matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<DoubleDouble>,
    pub vectors: DenseOperator,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values_f64(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.to_f64()).collect()
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// `V diag(f(lambda_k)) V^dagger`.
    pub fn map(&self, f: impl Fn(DoubleDouble) -> C64) -> DenseOperator {
        let n = self.vectors.dim();
        let d: Vec<C64> = self.values.iter().map(|&v| f(v)).collect();
        let mut out = DenseOperator::zeros(n);
        for r in 0..n {
            for c in 0..n {
                let mut s = C64::new(0.0, 0.0);
                for k in 0..n {
                    s += self.vectors.get(r, k) * d[k] * self.vectors.get(c, k).conj();
                }
                out.entries[r * n + c] = s;
            }
        }
        out
    }

    /// Applies `V diag(f(lambda_k)) V^dagger` to a vector without forming the
    /// matrix.
    pub fn apply_fn(&self, v: &[C64], f: impl Fn(DoubleDouble) -> C64) -> Vec<C64> {
        let n = self.vectors.dim();
        let mut out = vec![C64::new(0.0, 0.0); n];
        for k in 0..n {
            let mut c = C64::new(0.0, 0.0);
            for r in 0..n {
                c += self.vectors.get(r, k).conj() * v[r];
            }
            if c == C64::new(0.0, 0.0) {
                continue;
            }
            let c = c * f(self.values[k]);
            for r in 0..n {
                out[r] += self.vectors.get(r, k) * c;
            }
        }
        out
    }
}
