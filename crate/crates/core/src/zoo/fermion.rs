//! Quadratic fermionic Hamiltonians
//! `H = sum A_ij a_i^dag a_j + 1/2 sum B_ij a_i a_j + 1/2 sum B*_ji a_i^dag a_j^dag`
//! and their fast-forwarding through a Bogoliubov transformation.
//!
//! Only the antisymmetric part `B_eff = (B - B^T)/2` of the pairing matrix
//! survives the anticommutation relations. With `alpha = (a, a^dag)` the
//! Hamiltonian is `1/2 alpha^dag K alpha + tr(A)/2` for the Nambu matrix
//! `K = [[A, B_eff^dag], [B_eff, -A*]]`, and after `K = U D U^dag`
//!
//! `H = sum_i D_ii b_i^dag b_i + (tr A - sum_i D_ii) / 2`.
//!
//! Fock states are bit strings with bit `j` the occupation of mode `j`;
//! `a_j` carries the Jordan-Wigner sign of the modes below `j`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::dd::DoubleDouble;
use crate::error::{Error, Result};
use crate::evolve::{dense_evolve, Time};
use crate::ff::{FastForwardableUnitary, UNBOUNDED};
use crate::linalg::{DenseOperator, OperatorAccumulator};
use crate::rng::RngStream;
use crate::state::inner;
use crate::tolerance::Tolerances;

/// Largest mode count with an explicit Fock-space matrix.
pub const FOCK_MODE_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticHamiltonian {
    a: DenseOperator,
    b: DenseOperator,
}

impl QuadraticHamiltonian {
    pub fn new(a: DenseOperator, b: DenseOperator) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
        }
        let dev = a.hermitian_deviation();
        if dev > 1e-12 * a.max_abs().max(1.0) {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self { a, b })
    }

    pub fn modes(&self) -> usize {
        self.a.dim()
    }

    pub fn hopping(&self) -> &DenseOperator {
        &self.a
    }

    pub fn pairing(&self) -> &DenseOperator {
        &self.b
    }

    /// `(B - B^T) / 2`.
    pub fn pairing_eff(&self) -> DenseOperator {
        self.b.sub(&self.b.transpose()).scale(C64::new(0.5, 0.0))
    }

    /// `tr(A)`, summed in double-double.
    pub fn trace_a(&self) -> DoubleDouble {
        (0..self.modes()).fold(DoubleDouble::ZERO, |s, i| s + DoubleDouble::from_f64(self.a.get(i, i).re))
    }

    /// Nambu matrix `[[A, B_eff^dag], [B_eff, -A*]]` with entries kept exact
    /// in double-double.
    pub fn nambu(&self) -> DenseOperator {
        let m = self.modes();
        let mut acc = OperatorAccumulator::new(2 * m);
        for i in 0..m {
            for j in 0..m {
                let a = self.a.get(i, j);
                acc.add(i, j, a);
                acc.add(i + m, j + m, -a.conj());
                // B_eff[i][j] = (B_ij - B_ji) / 2
                acc.add(i + m, j, self.b.get(i, j) * 0.5);
                acc.add(i + m, j, -self.b.get(j, i) * 0.5);
                // B_eff^dag[i][j] = conj(B_eff[j][i]) = (conj B_ji - conj B_ij) / 2
                acc.add(i, j + m, self.b.get(j, i).conj() * 0.5);
                acc.add(i, j + m, -self.b.get(i, j).conj() * 0.5);
            }
        }
        acc.finish()
    }

    /// Independent Gaussian entries: `A` Hermitian, `B` a general complex
    /// matrix (its symmetric part drops out).
    pub fn random(m: usize, rng: &mut RngStream) -> Result<Self> {
        let k = DenseOperator::from_fn(m, |_, _| C64::new(rng.normal(), rng.normal()));
        let a = k.add(&k.adjoint()).scale(C64::new(0.25, 0.0));
        let b = DenseOperator::from_fn(m, |_, _| C64::new(rng.normal(), rng.normal()) * 0.5);
        Self::new(a, b)
    }
}

/// `a_j |s>` as `(sign, s')`.
fn annihilate(s: usize, j: usize) -> Option<(f64, usize)> {
    if s >> j & 1 == 0 {
        return None;
    }
    Some((jw_sign(s, j), s & !(1 << j)))
}

fn create(s: usize, j: usize) -> Option<(f64, usize)> {
    if s >> j & 1 == 1 {
        return None;
    }
    Some((jw_sign(s, j), s | 1 << j))
}

fn jw_sign(s: usize, j: usize) -> f64 {
    if (s & ((1 << j) - 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn check_fock(m: usize) -> Result<()> {
    if m > FOCK_MODE_CAP {
        return Err(Error::CapExceeded { dim: 1 << m.min(63), cap: 1 << FOCK_MODE_CAP });
    }
    Ok(())
}

/// Annihilation operators `a_0, ..., a_{m-1}` on the `2^m`-dim Fock space.
pub fn fock_annihilators(m: usize) -> Result<Vec<DenseOperator>> {
    check_fock(m)?;
    let d = 1usize << m;
    Ok((0..m)
        .map(|j| {
            let mut e = vec![C64::new(0.0, 0.0); d * d];
            for s in 0..d {
                if let Some((sg, t)) = annihilate(s, j) {
                    e[t * d + s] = C64::new(sg, 0.0);
                }
            }
            DenseOperator::from_rows(d, e).expect("square")
        })
        .collect())
}

/// The Hamiltonian on Fock space, assembled term by term from the literal
/// sum with entries accumulated in double-double.
pub fn fock_matrix(q: &QuadraticHamiltonian) -> Result<DenseOperator> {
    let m = q.modes();
    check_fock(m)?;
    let d = 1usize << m;
    let mut acc = OperatorAccumulator::new(d);
    for s in 0..d {
        for i in 0..m {
            for j in 0..m {
                // A_ij a_i^dag a_j
                let a = q.a.get(i, j);
                if a != C64::new(0.0, 0.0) {
                    if let Some((s1, t1)) = annihilate(s, j) {
                        if let Some((s2, t2)) = create(t1, i) {
                            acc.add(t2, s, a * (s1 * s2));
                        }
                    }
                }
                // 1/2 B_ij a_i a_j
                let b = q.b.get(i, j) * 0.5;
                if b != C64::new(0.0, 0.0) {
                    if let Some((s1, t1)) = annihilate(s, j) {
                        if let Some((s2, t2)) = annihilate(t1, i) {
                            acc.add(t2, s, b * (s1 * s2));
                        }
                    }
                }
                // 1/2 B*_ji a_i^dag a_j^dag
                let bc = q.b.get(j, i).conj() * 0.5;
                if bc != C64::new(0.0, 0.0) {
                    if let Some((s1, t1)) = create(s, j) {
                        if let Some((s2, t2)) = create(t1, i) {
                            acc.add(t2, s, bc * (s1 * s2));
                        }
                    }
                }
            }
        }
    }
    Ok(acc.finish())
}

/// `K = U D U^dag` with `U = [[V1, V2*], [V2, V1*]]` and
/// `D = diag(d, -d)`.
#[derive(Debug, Clone)]
pub struct BogoliubovFactorization {
    pub u: DenseOperator,
    /// `D_ii` for `i < m`, non-negative, descending.
    pub d: Vec<DoubleDouble>,
    pub trace_a: DoubleDouble,
    /// Number of zero modes that had to be re-paired.
    pub zero_modes: usize,
    nambu: DenseOperator,
}

/// `tau conj(v)` for `v = (v1, v2)`: `(conj v2, conj v1)`.
fn partner(v: &[C64]) -> Vec<C64> {
    let m = v.len() / 2;
    v[m..].iter().chain(&v[..m]).map(|z| z.conj()).collect()
}

fn axpy(y: &mut [C64], a: C64, x: &[C64]) {
    for (p, q) in y.iter_mut().zip(x) {
        *p += a * q;
    }
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Orthonormal basis of the span of `cands`, each vector fixed by
/// `v -> tau conj(v)` when the candidates are.
fn gram_schmidt(cands: Vec<Vec<C64>>, keep: usize) -> Vec<Vec<C64>> {
    let mut out: Vec<Vec<C64>> = Vec::new();
    for mut c in cands {
        for _ in 0..2 {
            for o in &out {
                let h = inner(o, &c);
                axpy(&mut c, -h, o);
            }
        }
        let n = norm(&c);
        if n > 1e-6 {
            out.push(c.iter().map(|z| z / n).collect());
            if out.len() == keep {
                break;
            }
        }
    }
    out
}

pub fn bogoliubov_diagonalize(q: &QuadraticHamiltonian) -> Result<BogoliubovFactorization> {
    let m = q.modes();
    let cap = Tolerances::DEFAULT.mode_cap;
    if m > cap {
        return Err(Error::CapExceeded { dim: m, cap });
    }
    let tol = Tolerances::DEFAULT.zero_mode;
    let k = q.nambu();
    let spec = k.eigh()?;
    let n = 2 * m;
    let pos: Vec<usize> = (0..n).filter(|&i| spec.values[i].to_f64() > tol).collect();
    let neg = (0..n).filter(|&i| spec.values[i].to_f64() < -tol).count();
    if pos.len() != neg {
        return Err(Error::numerical("unpaired nonzero quasiparticle energies"));
    }
    let zeros: Vec<usize> = (0..n).filter(|&i| spec.values[i].to_f64().abs() <= tol).collect();
    let z = zeros.len() / 2;
    // re-pair the zero-energy subspace: real basis w with tau w* = w, then
    // (w1 + i w2)/sqrt2 and (w1 - i w2)/sqrt2 are partners
    let mut cands = Vec::with_capacity(2 * zeros.len());
    for &i in &zeros {
        let u = spec.vector(i);
        let cu = partner(&u);
        cands.push(u.iter().zip(&cu).map(|(a, b)| a + b).collect::<Vec<C64>>());
        cands.push(u.iter().zip(&cu).map(|(a, b)| (a - b) * C64::new(0.0, 1.0)).collect::<Vec<C64>>());
    }
    let real = gram_schmidt(cands, zeros.len());
    if real.len() != zeros.len() || zeros.len() % 2 != 0 {
        return Err(Error::numerical("zero-mode subspace could not be re-paired"));
    }
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let mut cols: Vec<(DoubleDouble, Vec<C64>)> = Vec::with_capacity(m);
    // descending energies
    for &i in pos.iter().rev() {
        cols.push((spec.values[i], spec.vector(i)));
    }
    for p in 0..z {
        let (w1, w2) = (&real[2 * p], &real[2 * p + 1]);
        let v: Vec<C64> = w1.iter().zip(w2).map(|(a, b)| (a + b * C64::new(0.0, 1.0)) * s).collect();
        cols.push((DoubleDouble::ZERO, v));
    }
    let mut u = DenseOperator::zeros(n);
    let mut entries = u.entries().to_vec();
    for (c, (_, v)) in cols.iter().enumerate() {
        let w = partner(v);
        for r in 0..n {
            entries[r * n + c] = v[r];
            entries[r * n + c + m] = w[r];
        }
    }
    u = DenseOperator::from_rows(n, entries)?;
    Ok(BogoliubovFactorization { u, d: cols.into_iter().map(|c| c.0).collect(), trace_a: q.trace_a(), zero_modes: z, nambu: k })
}

impl BogoliubovFactorization {
    pub fn modes(&self) -> usize {
        self.d.len()
    }

    /// `diag(d, -d)` as floats.
    pub fn diagonal(&self) -> Vec<f64> {
        let d: Vec<f64> = self.d.iter().map(|x| x.to_f64()).collect();
        d.iter().copied().chain(d.iter().map(|x| -x)).collect()
    }

    pub fn v1(&self) -> DenseOperator {
        let m = self.modes();
        DenseOperator::from_fn(m, |r, c| self.u.get(r, c))
    }

    pub fn v2(&self) -> DenseOperator {
        let m = self.modes();
        DenseOperator::from_fn(m, |r, c| self.u.get(r + m, c))
    }

    /// `max |U^dag K U - D|`.
    pub fn residual(&self) -> f64 {
        let d = self.diagonal();
        let r = self.u.adjoint().matmul(&self.nambu).matmul(&self.u);
        let n = d.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { d[i] } else { 0.0 };
                worst = worst.max((r.get(i, j) - want).norm());
            }
        }
        worst
    }

    /// `max |U[:, m + i] - tau conj(U[:, i])|`.
    pub fn pairing_deviation(&self) -> f64 {
        let m = self.modes();
        let mut worst: f64 = 0.0;
        for i in 0..m {
            let p = partner(&self.u.column(i));
            let c = self.u.column(i + m);
            for (a, b) in p.iter().zip(&c) {
                worst = worst.max((a - b).norm());
            }
        }
        worst
    }

    /// `(tr A - sum_i D_ii) / 2`.
    pub fn constant(&self) -> DoubleDouble {
        let s = self.d.iter().fold(DoubleDouble::ZERO, |s, x| s + *x);
        (self.trace_a - s).mul_f64(0.5)
    }

    /// `b_i = sum_j conj(U_ji) a_j + conj(U_{j+m,i}) a_j^dag` on Fock space.
    pub fn quasiparticle_annihilators(&self) -> Result<Vec<DenseOperator>> {
        let m = self.modes();
        let a = fock_annihilators(m)?;
        let ad: Vec<DenseOperator> = a.iter().map(DenseOperator::adjoint).collect();
        Ok((0..m)
            .map(|i| {
                let mut acc = OperatorAccumulator::new(1 << m);
                for j in 0..m {
                    acc.add_operator(&a[j].scale(self.u.get(j, i).conj()));
                    acc.add_operator(&ad[j].scale(self.u.get(j + m, i).conj()));
                }
                acc.finish()
            })
            .collect())
    }
}

/// Largest deviations of the quasiparticle operators from the canonical
/// anticommutation relations, and of the spectra of `b_i^dag b_i` from
/// `{0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalReport {
    pub anticommutator_bb: f64,
    pub anticommutator_bbdag: f64,
    pub occupation_spectrum: f64,
}

pub fn canonical_report(f: &BogoliubovFactorization) -> Result<CanonicalReport> {
    let b = f.quasiparticle_annihilators()?;
    let bd: Vec<DenseOperator> = b.iter().map(DenseOperator::adjoint).collect();
    let d = 1usize << f.modes();
    let id = DenseOperator::identity(d);
    let (mut x, mut y, mut z): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for i in 0..b.len() {
        for j in 0..b.len() {
            x = x.max(b[i].anticommutator(&b[j]).max_abs());
            let mut c = b[i].anticommutator(&bd[j]);
            if i == j {
                c = c.sub(&id);
            }
            y = y.max(c.max_abs());
        }
        let occ = bd[i].matmul(&b[i]).eigh()?.values_f64();
        for v in occ {
            z = z.max(v.abs().min((v - 1.0).abs()));
        }
    }
    Ok(CanonicalReport { anticommutator_bb: x, anticommutator_bbdag: y, occupation_spectrum: z })
}

/// Max-entry residuals of two diagonal forms against the Fock matrix:
/// `derived` for `sum D_ii b^dag b + (tr A - sum D_ii)/2`, `printed` for
/// `2 sum D_ii b^dag b + tr(A)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalFormResiduals {
    pub derived: f64,
    pub printed: f64,
    /// Same comparison on sorted spectra.
    pub derived_spectrum: f64,
    pub printed_spectrum: f64,
}

pub fn diagonal_form_residuals(q: &QuadraticHamiltonian) -> Result<DiagonalFormResiduals> {
    let f = bogoliubov_diagonalize(q)?;
    let fock = fock_matrix(q)?;
    let b = f.quasiparticle_annihilators()?;
    let m = q.modes();
    let dim = 1usize << m;
    let id = DenseOperator::identity(dim);
    let mut derived = id.scale(C64::new(f.constant().to_f64(), 0.0));
    let mut printed = id.scale(C64::new(f.trace_a.to_f64() / 2.0, 0.0));
    for (i, bi) in b.iter().enumerate() {
        let n = bi.adjoint().matmul(bi);
        let di = f.d[i].to_f64();
        derived = derived.add(&n.scale(C64::new(di, 0.0)));
        printed = printed.add(&n.scale(C64::new(2.0 * di, 0.0)));
    }
    let spec = fock.eigh()?.values_f64();
    let levels = |scale: f64, c: f64| -> Vec<f64> {
        let mut v: Vec<f64> = (0..dim)
            .map(|s| c + scale * (0..m).filter(|i| s >> i & 1 == 1).map(|i| f.d[i].to_f64()).sum::<f64>())
            .collect();
        v.sort_by(f64::total_cmp);
        v
    };
    let gap = |v: Vec<f64>| spec.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(DiagonalFormResiduals {
        derived: fock.sub(&derived).max_abs(),
        printed: fock.sub(&printed).max_abs(),
        derived_spectrum: gap(levels(1.0, f.constant().to_f64())),
        printed_spectrum: gap(levels(2.0, f.trace_a.to_f64() / 2.0)),
    })
}

/// `(H', theta)` with `e^{-iH'} e^{-i theta} = e^{-iHt}`.
#[derive(Debug, Clone)]
pub struct QuadraticEvolution {
    pub hamiltonian: QuadraticHamiltonian,
    /// Global phase in `[0, 2 pi)`.
    pub phase: f64,
    /// `D_ii t mod 2 pi`.
    pub reduced: Vec<f64>,
}

impl QuadraticEvolution {
    /// `e^{-iH'} e^{-i theta}` on Fock space.
    pub fn unitary(&self) -> Result<DenseOperator> {
        let u = dense_evolve(&fock_matrix(&self.hamiltonian)?, Time::Integer(1))?;
        Ok(u.scale(C64::new(self.phase.cos(), -self.phase.sin())))
    }
}

/// Replaces each quasiparticle energy by `D_ii t mod 2 pi` and rebuilds the
/// coefficients from `U D' U^dag`. The global phase collects
/// `t (tr A - sum D_ii)/2` from the constant term, `sum D'_ii / 2` from
/// normal ordering of `H'`, and `-tr(A')/2` because `H'` is handed back as a
/// quadratic Hamiltonian whose own constant term is `tr(A')/2`.
pub fn quadratic_ff(q: &QuadraticHamiltonian, t: impl Into<Time>) -> Result<QuadraticEvolution> {
    let t = t.into();
    let f = bogoliubov_diagonalize(q)?;
    let m = q.modes();
    let reduced: Vec<f64> = f.d.iter().map(|d| t.scale(*d).rem_two_pi_dd().to_f64()).collect();
    let dp: Vec<f64> = reduced.iter().copied().chain(reduced.iter().map(|x| -x)).collect();
    let n = 2 * m;
    let k = DenseOperator::from_fn(n, |r, c| (0..n).map(|j| f.u.get(r, j) * dp[j] * f.u.get(c, j).conj()).sum());
    let a = DenseOperator::from_fn(m, |r, c| (k.get(r, c) + k.get(c, r).conj()) * 0.5);
    let b = DenseOperator::from_fn(m, |r, c| (k.get(r + m, c) - k.get(c + m, r)) * 0.5);
    let hp = QuadraticHamiltonian::new(a, b)?;
    let tr_ap = hp.trace_a();
    let sum_dp = reduced.iter().fold(DoubleDouble::ZERO, |s, x| s + DoubleDouble::from_f64(*x));
    let theta = t.scale(f.constant()) + sum_dp.mul_f64(0.5) - tr_ap.mul_f64(0.5);
    Ok(QuadraticEvolution { hamiltonian: hp, phase: theta.rem_two_pi_dd().to_f64(), reduced })
}

/// `e^{-iH}` on Fock space for a quadratic Hamiltonian; every power is one
/// unit-time evolution under the reduced Hamiltonian.
#[derive(Debug, Clone)]
pub struct QuadraticFf {
    q: QuadraticHamiltonian,
}

impl QuadraticFf {
    pub fn new(q: QuadraticHamiltonian) -> Result<Self> {
        check_fock(q.modes())?;
        Ok(Self { q })
    }
}

impl FastForwardableUnitary for QuadraticFf {
    fn dim(&self) -> usize {
        1 << self.q.modes()
    }

    fn range(&self) -> u128 {
        UNBOUNDED
    }

    fn apply_power(&self, amps: &mut [C64], power: i128) -> Result<()> {
        let u = quadratic_ff(&self.q, Time::Integer(power))?.unitary()?;
        let out = u.apply(amps);
        amps.copy_from_slice(&out);
        Ok(())
    }
}
