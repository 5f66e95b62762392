//! Finding the other end of a line by repeated energy measurement on the path
//! Hamiltonian `H = A_G / 2`.
//!
//! The solver only talks to the instance through `S` and `P`. The energy
//! measurement is simulated on the path component holding the walker, which
//! needs the hidden vertex order; that order is exposed as oracle-side
//! methods ([`OeotlInstance::position`], [`OeotlInstance::label`]) and is
//! used nowhere else.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;
use rand::RngCore;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::ff::DenseFf;
use crate::rng::RngStream;
use crate::seem::{ff_to_seem, measure_energy};
use crate::state::{Basis, StateVector};
use crate::zoo::path::{path_energy, path_gap_bound, path_vector, PathHamiltonian};

/// Steps walked by the lookahead and by the final walk.
pub const LOOKAHEAD: usize = 10;

const ROUNDS: usize = 4;

/// Keyed bijection of `n`-bit strings fixing zero. Rounds of odd
/// multiplication, xorshift and addition, all invertible mod `2^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct KeyedPermutation {
    bits: u32,
    mult: [u64; ROUNDS],
    add: [u64; ROUNDS],
    shift: u32,
    offset: u64,
}

fn inverse_odd(a: u64) -> u64 {
    // Newton iteration doubles the correct low bits each step
    let mut x = a;
    for _ in 0..6 {
        x = x.wrapping_mul(2u64.wrapping_sub(a.wrapping_mul(x)));
    }
    x
}

impl KeyedPermutation {
    fn new(bits: u32, rng: &mut RngStream) -> Self {
        let mut mult = [0; ROUNDS];
        let mut add = [0; ROUNDS];
        for r in 0..ROUNDS {
            mult[r] = rng.next_u64() | 1;
            add[r] = rng.next_u64();
        }
        let mut p = Self { bits, mult, add, shift: bits.div_ceil(2).max(1), offset: 0 };
        p.offset = p.raw(0);
        p
    }

    fn mask(&self) -> u64 {
        if self.bits == 64 {
            u64::MAX
        } else {
            (1u64 << self.bits) - 1
        }
    }

    fn raw(&self, mut x: u64) -> u64 {
        let m = self.mask();
        for r in 0..ROUNDS {
            x = x.wrapping_mul(self.mult[r]) & m;
            x ^= x >> self.shift;
            x = x.wrapping_add(self.add[r]) & m;
        }
        x
    }

    fn raw_inverse(&self, mut y: u64) -> u64 {
        let m = self.mask();
        for r in (0..ROUNDS).rev() {
            y = y.wrapping_sub(self.add[r]) & m;
            let mut x = y;
            for _ in 0..self.bits.div_ceil(self.shift) {
                x = y ^ (x >> self.shift);
            }
            y = x.wrapping_mul(inverse_odd(self.mult[r])) & m;
        }
        y
    }

    fn forward(&self, x: u64) -> u64 {
        self.raw(x) ^ self.offset
    }

    fn backward(&self, y: u64) -> u64 {
        self.raw_inverse(y ^ self.offset)
    }
}

/// A line of `len` vertices starting at `0^n`, hidden behind a keyed
/// permutation of the `n`-bit strings. Vertices off the line are isolated:
/// `S(v) = P(v) = v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OeotlInstance {
    bits: u32,
    len: u64,
    perm: KeyedPermutation,
}

impl OeotlInstance {
    pub fn new(seed: u64, bits: u32, len: u64) -> Result<Self> {
        if bits == 0 || bits > 63 {
            return Err(Error::invalid("bit width n must lie in 1..=63"));
        }
        if len < 2 || len > 1u64 << bits {
            return Err(Error::invalid("line length L must lie in 2..=2^n"));
        }
        let mut rng = RngStream::new(seed, 0x0e07_1e00);
        Ok(Self { bits, len, perm: KeyedPermutation::new(bits, &mut rng) })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Successor circuit `S`.
    pub fn successor(&self, v: u64) -> u64 {
        match self.position(v) {
            Some(j) if j + 1 < self.len => self.perm.forward(j + 1),
            _ => v,
        }
    }

    /// Predecessor circuit `P`.
    pub fn predecessor(&self, v: u64) -> u64 {
        match self.position(v) {
            Some(j) if j > 0 => self.perm.forward(j - 1),
            _ => v,
        }
    }

    /// Edge `u -> v` iff `S(u) = v`, `P(v) = u` and `u != v`.
    pub fn has_edge(&self, u: u64, v: u64) -> bool {
        u != v && self.successor(u) == v && self.predecessor(v) == u
    }

    /// Oracle side: number of vertices on the line.
    pub fn len(&self) -> u64 {
        self.len
    }

    /// Oracle side: the vertex at position `j`.
    pub fn label(&self, j: u64) -> u64 {
        self.perm.forward(j)
    }

    /// Oracle side: position of `v` on the line.
    pub fn position(&self, v: u64) -> Option<u64> {
        if v > self.perm.mask() {
            return None;
        }
        let j = self.perm.backward(v);
        (j < self.len).then_some(j)
    }

    /// The answer, for checking.
    pub fn end(&self) -> u64 {
        self.label(self.len - 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleMode {
    /// Projection onto the closed-form path eigenbasis.
    Exact,
    /// Fourier phase estimation on the dense path, median of `copies`, with
    /// readout grid `1/T`. Components up to [`PE_MAX_LEN`] vertices.
    PhaseEstimation { copies: usize, t_range: u128 },
}

pub const PE_MAX_LEN: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeemOracleConfig {
    pub delta_e: f64,
    pub eta: f64,
    pub beta: f64,
    pub mode: OracleMode,
}

impl SeemOracleConfig {
    /// `eta = 1`, `delta_E = 5^{-n}`, `beta = 0`.
    pub fn ideal(bits: u32) -> Self {
        Self { delta_e: 5f64.powi(-(bits as i32)), eta: 1.0, beta: 0.0, mode: OracleMode::Exact }
    }

    /// `(1 - e^{-n/18}, 5^{-n}, 40 n^{-2})`.
    pub fn asymptotic(bits: u32) -> Self {
        let n = bits as f64;
        Self { delta_e: 5f64.powi(-(bits as i32)), eta: 1.0 - (-n / 18.0).exp(), beta: 40.0 / (n * n), mode: OracleMode::Exact }
    }

    pub fn with_beta(self, beta: f64) -> Self {
        Self { beta, ..self }
    }

    pub fn with_eta(self, eta: f64) -> Self {
        Self { eta, ..self }
    }

    fn validate(&self, len: usize) -> Result<()> {
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::invalid("confidence eta must lie in (0, 1]"));
        }
        if !(0.0..2.0).contains(&self.beta) {
            return Err(Error::invalid("demolition beta must lie in [0, 2)"));
        }
        if !(self.delta_e >= 0.0) {
            return Err(Error::invalid("accuracy delta_E must be non-negative"));
        }
        match self.mode {
            OracleMode::Exact => {
                // readout windows of neighbouring levels must not overlap
                if 2.0 * self.delta_e >= path_gap_bound(len) {
                    return Err(Error::invalid("delta_E too large: 2 delta_E must stay below 2/(L+1)^2"));
                }
            }
            OracleMode::PhaseEstimation { copies, t_range } => {
                if len > PE_MAX_LEN {
                    return Err(Error::invalid("phase-estimation oracle limited to 32 vertices"));
                }
                if copies == 0 || t_range == 0 {
                    return Err(Error::invalid("phase-estimation oracle needs copies >= 1 and T >= 1"));
                }
            }
        }
        Ok(())
    }
}

/// One energy measurement on a path component.
#[derive(Debug, Clone)]
pub struct PathMeasurement {
    pub energy: f64,
    /// Level index `k` in `1..=L` the readout is attributed to.
    pub level: usize,
    /// Amplitude of `psi_level` in the post-state before any demolition.
    pub dominant: f64,
    pub post: StateVector,
}

/// Rank-one phase kick `1 + (e^{-is} - 1)|u><u|` along a random direction,
/// with `2 sin(s/2) = beta`.
fn kick(amps: &mut [C64], beta: f64, rng: &mut RngStream) {
    if beta == 0.0 {
        return;
    }
    let mut u: Vec<C64> = (0..amps.len()).map(|_| C64::new(rng.normal(), rng.normal())).collect();
    let nu: f64 = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in u.iter_mut() {
        *z /= nu;
    }
    let s = 2.0 * (beta / 2.0).asin();
    let f = C64::new(s.cos() - 1.0, -s.sin());
    let ov: C64 = u.iter().zip(amps.iter()).map(|(a, b)| a.conj() * b).sum();
    for (a, x) in amps.iter_mut().zip(&u) {
        *a += f * ov * x;
    }
}

/// Energy measurement of a state on the path `h` (vertices in path order).
///
/// Exact mode: the readout names level `j` with probability `eta` when the
/// system is in `psi_j` and each other level with probability
/// `(1 - eta)/(L - 1)`, reported as `E_j` plus a garbage offset uniform in
/// `[-delta_E, delta_E]`. The post-state is
/// `sum_k c_k sqrt(Pr(j | k)) psi_k`, so `E|a_j|^2 = eta` on any input. A
/// phase kick of size `beta` follows.
pub fn path_seem_oracle(
    state: &StateVector,
    h: &PathHamiltonian,
    cfg: &SeemOracleConfig,
    rng: &mut RngStream,
) -> Result<PathMeasurement> {
    let len = h.len;
    if state.dim() != len {
        return Err(Error::DimensionMismatch { expected: len, found: state.dim() });
    }
    cfg.validate(len)?;
    let (energy, level, dominant, mut post) = match cfg.mode {
        OracleMode::Exact => exact_measurement(state.amplitudes(), len, cfg, rng),
        OracleMode::PhaseEstimation { copies, t_range } => pe_measurement(state, h, copies, t_range, rng)?,
    };
    kick(&mut post, cfg.beta, rng);
    let n: f64 = post.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in post.iter_mut() {
        *z /= n;
    }
    Ok(PathMeasurement { energy, level, dominant, post: StateVector::with_basis(state.basis().clone(), post)? })
}

fn exact_measurement(amps: &[C64], len: usize, cfg: &SeemOracleConfig, rng: &mut RngStream) -> (f64, usize, f64, Vec<C64>) {
    let vecs: Vec<Vec<f64>> = (1..=len).map(|k| path_vector(len, k)).collect();
    let coef: Vec<C64> = vecs.iter().map(|v| v.iter().zip(amps).map(|(a, b)| b * *a).sum()).collect();
    let w: Vec<f64> = coef.iter().map(|c| c.norm_sqr()).collect();
    let other = if len > 1 { (1.0 - cfg.eta) / (len - 1) as f64 } else { 0.0 };
    let hit = if len > 1 { cfg.eta } else { 1.0 };
    let total: f64 = w.iter().sum();
    let probs: Vec<f64> = w.iter().map(|wj| hit * wj + other * (total - wj)).collect();
    let j = rng.weighted_index(&probs);
    let g = cfg.delta_e * (2.0 * rng.uniform() - 1.0);
    let mut post = vec![C64::new(0.0, 0.0); len];
    for (k, (c, v)) in coef.iter().zip(&vecs).enumerate() {
        let f = if k == j { hit.sqrt() } else { other.sqrt() };
        for (p, x) in post.iter_mut().zip(v) {
            *p += c * (f * x);
        }
    }
    let n2: f64 = post.iter().map(|z| z.norm_sqr()).sum();
    let dominant = (coef[j] * hit.sqrt()).norm() / n2.sqrt();
    (path_energy(len, j + 1) + g, j + 1, dominant, post)
}

fn pe_measurement(
    state: &StateVector,
    h: &PathHamiltonian,
    copies: usize,
    t_range: u128,
    rng: &mut RngStream,
) -> Result<(f64, usize, f64, Vec<C64>)> {
    let len = h.len;
    let dev = ff_to_seem(Arc::new(DenseFf::new(&h.dense())?), copies, t_range)?;
    let (energy, post) = measure_energy(&dev, state, rng)?;
    // f(j): nearest level, the lower one on a tie
    let mut level = 1;
    let mut best = f64::INFINITY;
    for k in (1..=len).rev() {
        let d = (path_energy(len, k) - energy).abs();
        if d < best {
            best = d;
            level = k;
        }
    }
    let v = path_vector(len, level);
    let a: C64 = v.iter().zip(post.amplitudes()).map(|(x, y)| y * *x).sum();
    Ok((energy, level, a.norm(), post.into_amplitudes()))
}

/// One non-idle iteration of the loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IterationRecord {
    /// Position before the iteration.
    pub from: u64,
    pub to: u64,
    /// `L_i`: vertices from the walker to the end, inclusive.
    pub remaining: u64,
    /// `to >= from + ceil(L_i / 2)`.
    pub halved: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OeotlOutcome {
    pub found: Option<u64>,
    pub iterations: Vec<IterationRecord>,
    /// Loop iterations allowed, `100 n`. Those past `iterations.len()` were
    /// idle.
    pub budget: usize,
}

impl OeotlOutcome {
    /// Halving frequency over non-idle iterations with `L_i > 10`.
    pub fn halving_counts(&self) -> (usize, usize) {
        let eligible = self.iterations.iter().filter(|r| r.remaining > LOOKAHEAD as u64);
        let (mut hit, mut all) = (0, 0);
        for r in eligible {
            all += 1;
            hit += r.halved as usize;
        }
        (hit, all)
    }
}

/// Walks up to `LOOKAHEAD` edges forward; returns the end if it is met.
fn walk(inst: &OeotlInstance, mut v: u64) -> (u64, Option<u64>) {
    for _ in 0..LOOKAHEAD {
        let s = inst.successor(v);
        if !inst.has_edge(v, s) {
            return (v, Some(v));
        }
        v = s;
    }
    let s = inst.successor(v);
    (v, (!inst.has_edge(v, s)).then_some(v))
}

/// Runs the loop: lookahead, energy measurement of `|v>` under `H` with the
/// edge into `v` removed, vertex measurement; `100 n` times, then a final
/// walk.
pub fn oeotl_solve(inst: &OeotlInstance, cfg: &SeemOracleConfig, rng: &mut RngStream) -> Result<OeotlOutcome> {
    let budget = 100 * inst.bits() as usize;
    let mut v = 0u64;
    let mut iterations = Vec::new();
    for _ in 0..budget {
        if let (_, Some(end)) = walk(inst, v) {
            return Ok(OeotlOutcome { found: Some(end), iterations, budget });
        }
        let from = inst.position(v).ok_or_else(|| Error::numerical("walker left the line"))?;
        let remaining = inst.len() - from;
        let h = PathHamiltonian::new(remaining as usize)?;
        let labels: Vec<u128> = (from..inst.len()).map(|j| inst.label(j) as u128).collect();
        let mut amps = vec![C64::new(0.0, 0.0); remaining as usize];
        amps[0] = C64::new(1.0, 0.0);
        let psi = StateVector::with_basis(Basis::Labels(labels), amps)?;
        let m = path_seem_oracle(&psi, &h, cfg, rng)?;
        let picked = m.post.sample_label(rng) as u64;
        let to = inst.position(picked).ok_or_else(|| Error::numerical("measured vertex off the line"))?;
        if to < from {
            return Err(Error::numerical("walker moved backwards"));
        }
        iterations.push(IterationRecord { from, to, remaining, halved: to >= from + remaining.div_ceil(2) });
        v = picked;
    }
    let (_, end) = walk(inst, v);
    Ok(OeotlOutcome { found: end, iterations, budget })
}

/// `1 - e^{-81 n / 20}`.
pub fn ideal_success_bound(bits: u32) -> f64 {
    1.0 - (-81.0 * bits as f64 / 20.0).exp()
}

/// Success loss allowed for demolition `beta`: `200 beta n`.
pub fn demolition_loss_bound(bits: u32, beta: f64) -> f64 {
    200.0 * beta * bits as f64
}
