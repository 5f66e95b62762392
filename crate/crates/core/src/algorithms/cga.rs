//! Cyclic graph automorphism: does some power of `sigma` fix the graph under
//! conjugation? Answered by order finding on the orbit of the graph.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::dd::DoubleDouble;
use crate::error::{Error, Result};
use crate::ff::{EigenComponent, FastForwardableUnitary, UNBOUNDED};
use crate::pe::fourier::fourier_phase_estimate;
use crate::rng::RngStream;
use crate::shor::gcd;
use crate::state::{Basis, StateVector};

/// Largest orbit simulated.
pub const ORBIT_CAP: usize = 4096;
/// Vertex limit of [`Graph`].
pub const MAX_VERTICES: usize = 64;

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self { images: (0..n).collect() }
    }

    pub fn new(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &x in &images {
            if x >= images.len() || seen[x] {
                return Err(Error::invalid("permutation images must be a bijection of 0..n"));
            }
            seen[x] = true;
        }
        Ok(Self { images })
    }

    /// Cycles given as lists `(a b c)` meaning `a -> b -> c -> a`; points not
    /// listed are fixed.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut used = vec![false; n];
        for c in cycles {
            for (i, &x) in c.iter().enumerate() {
                if x >= n || used[x] {
                    return Err(Error::invalid("cycles must be disjoint and within 0..n"));
                }
                used[x] = true;
                images[x] = c[(i + 1) % c.len()];
            }
        }
        Ok(Self { images })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// Disjoint cycles, fixed points included, each starting at its least
    /// element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for s in 0..self.len() {
            if seen[s] {
                continue;
            }
            let mut c = vec![s];
            seen[s] = true;
            let mut x = self.images[s];
            while x != s {
                seen[x] = true;
                c.push(x);
                x = self.images[x];
            }
            out.push(c);
        }
        out
    }

    /// `sigma^k` by rotating each cycle `k mod r_i` places.
    pub fn pow(&self, k: i128) -> Self {
        let mut images = vec![0; self.len()];
        for c in self.cycles() {
            let l = c.len() as i128;
            let shift = k.rem_euclid(l) as usize;
            for (i, &x) in c.iter().enumerate() {
                images[x] = c[(i + shift) % c.len()];
            }
        }
        Self { images }
    }

    pub fn compose(&self, other: &Self) -> Self {
        // (self . other)(i) = self(other(i))
        Self { images: other.images.iter().map(|&i| self.images[i]).collect() }
    }
}

/// `lcm` of the cycle lengths.
pub fn permutation_order(sigma: &Permutation) -> u64 {
    sigma.cycles().iter().fold(1, |acc, c| lcm(acc, c.len() as u64))
}

fn inverse_mod(a: i128, m: i128) -> Option<i128> {
    let (mut r0, mut r1) = (a.rem_euclid(m), m);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    (r0 == 1).then(|| s0.rem_euclid(m))
}

/// Least `k >= 0` with `k = a_j mod r_j` for every pair `(a_j, r_j)`, or
/// `None` when the system is inconsistent.
pub fn congruence_solve(pairs: &[(u64, u64)]) -> Option<u64> {
    let mut x: i128 = 0;
    let mut m: i128 = 1;
    for &(a, r) in pairs {
        if r == 0 {
            return None;
        }
        let (a, r) = ((a % r) as i128, r as i128);
        let g = gcd(m as u64, r as u64) as i128;
        let diff = a - x;
        if diff.rem_euclid(g) != 0 {
            return None;
        }
        let rg = r / g;
        let t = if rg == 1 { 0 } else { (diff / g).rem_euclid(rg) * inverse_mod(m / g, rg)? % rg };
        x += m * t;
        m *= rg;
        x = x.rem_euclid(m);
    }
    Some(x as u64)
}

/// Simple undirected graph on at most 64 vertices, rows as bitsets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Graph {
    rows: Vec<u64>,
}

impl Graph {
    pub fn empty(n: usize) -> Result<Self> {
        if n > MAX_VERTICES {
            return Err(Error::invalid("graphs are limited to 64 vertices"));
        }
        Ok(Self { rows: vec![0; n] })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for &(u, v) in edges {
            if u >= n || v >= n || u == v {
                return Err(Error::invalid("edges must join two distinct vertices in 0..n"));
            }
            g.rows[u] |= 1 << v;
            g.rows[v] |= 1 << u;
        }
        Ok(g)
    }

    /// Symmetric 0/1 matrix with zero diagonal.
    pub fn from_adjacency(adj: &[Vec<u8>]) -> Result<Self> {
        let n = adj.len();
        let mut edges = Vec::new();
        for (u, row) in adj.iter().enumerate() {
            if row.len() != n {
                return Err(Error::invalid("adjacency matrix must be square"));
            }
            for (v, &x) in row.iter().enumerate() {
                match x {
                    0 => {}
                    1 if u != v && adj[v][u] == 1 => {
                        if u < v {
                            edges.push((u, v));
                        }
                    }
                    _ => return Err(Error::invalid("adjacency must be symmetric 0/1 with zero diagonal")),
                }
            }
        }
        Self::from_edges(n, &edges)
    }

    pub fn vertices(&self) -> usize {
        self.rows.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u] >> v & 1 == 1
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.vertices();
        let mut out = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if self.has_edge(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Neighbour lists.
    pub fn adjacency_lists(&self) -> Vec<Vec<usize>> {
        (0..self.vertices()).map(|u| (0..self.vertices()).filter(|&v| self.has_edge(u, v)).collect()).collect()
    }

    /// `sigma Gamma sigma^{-1}`: edge `(u, v)` becomes `(sigma u, sigma v)`.
    pub fn conjugate(&self, sigma: &Permutation) -> Result<Self> {
        if sigma.len() != self.vertices() {
            return Err(Error::DimensionMismatch { expected: self.vertices(), found: sigma.len() });
        }
        let mut rows = vec![0u64; self.vertices()];
        for (u, v) in self.edges() {
            let (a, b) = (sigma.apply(u), sigma.apply(v));
            rows[a] |= 1 << b;
            rows[b] |= 1 << a;
        }
        Ok(Self { rows })
    }

    pub fn is_automorphism(&self, sigma: &Permutation) -> Result<bool> {
        Ok(self.conjugate(sigma)? == *self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CgaInstance {
    pub graph: Graph,
    pub sigma: Permutation,
}

impl CgaInstance {
    pub fn new(graph: Graph, sigma: Permutation) -> Result<Self> {
        if graph.vertices() != sigma.len() {
            return Err(Error::DimensionMismatch { expected: graph.vertices(), found: sigma.len() });
        }
        Ok(Self { graph, sigma })
    }
}

/// The orbit `Gamma_j = sigma^j Gamma sigma^{-j}`, `j = 0..m`.
pub fn graph_orbit(inst: &CgaInstance, cap: usize) -> Result<Vec<Graph>> {
    let mut orbit = vec![inst.graph.clone()];
    loop {
        let next = orbit.last().expect("nonempty").conjugate(&inst.sigma)?;
        if next == inst.graph {
            return Ok(orbit);
        }
        if orbit.len() == cap {
            return Err(Error::CapExceeded { dim: orbit.len() + 1, cap });
        }
        orbit.push(next);
    }
}

/// `U_sigma` on the span of the orbit. Powers use per-cycle exponentiation of
/// `sigma` and a lookup of every conjugated basis graph.
pub struct OrbitAction {
    sigma: Permutation,
    order: u64,
    orbit: Vec<Graph>,
    index: BTreeMap<Graph, usize>,
}

impl OrbitAction {
    pub fn new(inst: &CgaInstance, cap: usize) -> Result<Self> {
        let orbit = graph_orbit(inst, cap)?;
        let index = orbit.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect();
        Ok(Self { sigma: inst.sigma.clone(), order: permutation_order(&inst.sigma), orbit, index })
    }

    pub fn orbit(&self) -> &[Graph] {
        &self.orbit
    }
}

impl FastForwardableUnitary for OrbitAction {
    fn dim(&self) -> usize {
        self.orbit.len()
    }

    fn range(&self) -> u128 {
        UNBOUNDED
    }

    fn apply_power(&self, amps: &mut [C64], power: i128) -> Result<()> {
        if amps.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: amps.len() });
        }
        let tau = self.sigma.pow(power.rem_euclid(self.order as i128));
        let mut out = vec![C64::new(0.0, 0.0); amps.len()];
        for (j, g) in self.orbit.iter().enumerate() {
            let img = g.conjugate(&tau)?;
            let k = *self.index.get(&img).ok_or_else(|| Error::numerical("orbit not closed under sigma"))?;
            out[k] = amps[j];
        }
        amps.copy_from_slice(&out);
        Ok(())
    }

    /// `U` shifts the orbit cyclically; its eigenvectors are the discrete
    /// Fourier modes with phases `2 pi k / m`.
    fn eigen_components(&self, amps: &[C64]) -> Result<Vec<EigenComponent>> {
        let m = self.dim();
        if amps.len() != m {
            return Err(Error::DimensionMismatch { expected: m, found: amps.len() });
        }
        let mut out = Vec::new();
        for k in 0..m {
            let phase = DoubleDouble::TWO_PI * DoubleDouble::from_i128(k as i128) / DoubleDouble::from_i128(m as i128);
            // u_k(j) = e^{-2 pi i j k / m} / sqrt(m)
            let mode: Vec<C64> = (0..m)
                .map(|j| {
                    let a = -2.0 * core::f64::consts::PI * ((j * k) % m) as f64 / m as f64;
                    C64::from_polar(1.0 / (m as f64).sqrt(), a)
                })
                .collect();
            let c: C64 = mode.iter().zip(amps).map(|(u, x)| u.conj() * x).sum();
            if c.norm_sqr() > 1e-28 {
                out.push(EigenComponent { phase, weight: c.norm_sqr(), vector: mode.iter().map(|u| u * c).collect() });
            }
        }
        Ok(out)
    }
}

/// Largest denominator `q <= max_q` among the continued-fraction convergents
/// of `num / 2^bits`.
pub fn convergent_denominator(num: u64, bits: u32, max_q: u64) -> u64 {
    let (mut a, mut b) = (num as u128, 1u128 << bits);
    let (mut q_prev, mut q) = (1u128, 0u128);
    let mut best = 1u64;
    while b != 0 {
        let t = a / b;
        (a, b) = (b, a - t * b);
        let q_next = t * q + q_prev;
        if q_next > max_q as u128 {
            break;
        }
        // the first term is the integer part, whose denominator is 1
        if q_next > 0 {
            best = q_next as u64;
        }
        (q_prev, q) = (q, q_next);
    }
    best
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CgaAnswer {
    pub automorphism: bool,
    /// `k` with `sigma^k` an automorphism, when the answer is yes.
    pub witness: Option<u64>,
    pub order: u64,
    pub orbit_len: u64,
    /// Phase estimation outcomes used.
    pub samples: Vec<u64>,
    pub ell: u32,
}

/// Attempts at order finding before giving up.
pub const MAX_SAMPLES: usize = 64;

/// Order finding of `U_sigma` on `|Gamma>` with `2 ceil(log2(r + 1)) + 1`
/// bits. Denominators of the continued fractions are combined by lcm until
/// `sigma^m` fixes `Gamma`. The answer is yes iff `m < r`, or `sigma` is the
/// identity (then `k = 1`).
pub fn cga_solve(inst: &CgaInstance, rng: &mut RngStream) -> Result<CgaAnswer> {
    let r = permutation_order(&inst.sigma);
    let action = OrbitAction::new(inst, ORBIT_CAP)?;
    let width = 64 - r.leading_zeros();
    let ell = 2 * width + 1;
    if ell > crate::pe::fourier::MAX_BITS {
        return Err(Error::invalid("order of sigma too large for the output register"));
    }
    let mut amps = vec![C64::new(0.0, 0.0); action.dim()];
    amps[0] = C64::new(1.0, 0.0);
    let labels = (0..action.dim() as u128).collect();
    let start = StateVector::with_basis(Basis::Labels(labels), amps)?;
    let mut m = 1u64;
    let mut samples = Vec::new();
    let fixes = |k: u64| inst.graph.is_automorphism(&inst.sigma.pow(k as i128));
    while !fixes(m)? {
        if samples.len() == MAX_SAMPLES {
            return Err(Error::numerical("order finding did not converge"));
        }
        let pe = fourier_phase_estimate(&action, ell, &start, rng)?;
        samples.push(pe.outcome);
        m = lcm(m, convergent_denominator(pe.outcome, ell, r));
    }
    let automorphism = m < r || r == 1;
    Ok(CgaAnswer { automorphism, witness: automorphism.then_some(m), order: r, orbit_len: m, samples, ell })
}

/// Least `k` in `1..r` with `sigma^k Gamma sigma^{-k} = Gamma`, by trying
/// each power; `Some(1)` for the identity.
pub fn exhaustive_witness(inst: &CgaInstance) -> Result<Option<u64>> {
    let r = permutation_order(&inst.sigma);
    if r == 1 {
        return Ok(Some(1));
    }
    for k in 1..r {
        if inst.graph.is_automorphism(&inst.sigma.pow(k as i128))? {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

fn random_permutation(n: usize, rng: &mut RngStream) -> Permutation {
    let mut images: Vec<usize> = (0..n).collect();
    rng.shuffle(&mut images);
    Permutation { images }
}

/// Graph closed under `tau`: random edges together with all their images.
fn invariant_graph(n: usize, tau: &Permutation, rng: &mut RngStream) -> Graph {
    let mut rows = vec![0u64; n];
    for _ in 0..n {
        let (mut u, mut v) = (rng.below(n), rng.below(n));
        if u == v {
            continue;
        }
        for _ in 0..permutation_order(tau) {
            rows[u] |= 1 << v;
            rows[v] |= 1 << u;
            (u, v) = (tau.apply(u), tau.apply(v));
        }
    }
    Graph { rows }
}

/// `yes` planted and `no` random instances on 6 to 10 vertices, each
/// classified by [`exhaustive_witness`]. Yes instances fix a nontrivial
/// proper power of `sigma`; no instances have `r > 1`.
pub fn generate_instances(yes: usize, no: usize, rng: &mut RngStream) -> Result<Vec<(CgaInstance, bool)>> {
    let mut out = Vec::new();
    let (mut got_yes, mut got_no) = (0, 0);
    while got_yes < yes || got_no < no {
        let n = 6 + rng.below(5);
        let sigma = random_permutation(n, rng);
        let r = permutation_order(&sigma);
        if r < 2 {
            continue;
        }
        let want_yes = got_yes < yes;
        let graph = if want_yes {
            let divisors: Vec<u64> = (1..r).filter(|d| r % d == 0).collect();
            let k = divisors[rng.below(divisors.len())];
            invariant_graph(n, &sigma.pow(k as i128), rng)
        } else {
            let mut g = Graph::empty(n)?;
            for u in 0..n {
                for v in u + 1..n {
                    if rng.bernoulli(0.5) {
                        g.rows[u] |= 1 << v;
                        g.rows[v] |= 1 << u;
                    }
                }
            }
            g
        };
        let inst = CgaInstance::new(graph, sigma)?;
        let is_yes = exhaustive_witness(&inst)?.is_some();
        if is_yes == want_yes {
            if is_yes {
                got_yes += 1;
            } else {
                got_no += 1;
            }
            out.push((inst, is_yes));
        }
    }
    Ok(out)
}
