//! The four ways a trisection step can pick a wrong interval, with the
//! Chernoff bounds on each and exact binomial tails for comparison.

#[allow(unused_imports)]
use num_traits::Float;

use super::interval::Branch;
use crate::error::{Error, Result};

/// `Pr(p_hat >= gamma) <= exp(-(m p / 3)(gamma/p - 1)^2)` for `gamma > p`.
pub fn chernoff_upper(p: f64, gamma: f64, m: usize) -> f64 {
    (-(m as f64) * p / 3.0 * (gamma / p - 1.0).powi(2)).exp()
}

/// `Pr(p_hat <= gamma) <= exp(-(m p / 2)(gamma/p - 1)^2)` for `gamma < p`.
pub fn chernoff_lower(p: f64, gamma: f64, m: usize) -> f64 {
    (-(m as f64) * p / 2.0 * (gamma / p - 1.0).powi(2)).exp()
}

/// Binomial pmf of `Bin(m, p)` at every `k`, by the ratio recurrence in log
/// space.
pub fn binomial_pmf(m: usize, p: f64) -> alloc::vec::Vec<f64> {
    let mut out = alloc::vec![0.0; m + 1];
    if p <= 0.0 {
        out[0] = 1.0;
        return out;
    }
    if p >= 1.0 {
        out[m] = 1.0;
        return out;
    }
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    let mut logc = 0.0f64;
    for (k, o) in out.iter_mut().enumerate() {
        if k > 0 {
            logc += ((m - k + 1) as f64).ln() - (k as f64).ln();
        }
        *o = (logc + k as f64 * lp + (m - k) as f64 * lq).exp();
    }
    out
}

/// `Pr(X > k)` for `X ~ Bin(m, p)`.
pub fn binomial_tail_above(m: usize, p: f64, k: usize) -> f64 {
    binomial_pmf(m, p).iter().skip(k + 1).sum()
}

/// `Pr(X <= k)`.
pub fn binomial_tail_at_most(m: usize, p: f64, k: usize) -> f64 {
    binomial_pmf(m, p).iter().take(k + 1).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChernoffCase {
    /// 1 to 4.
    pub case: u8,
    pub description: &'static str,
    /// Worst-case success probability `p_j` at the boundary of the case.
    pub planted_p: f64,
    /// Phase giving `planted_p` at `t = 1`, `phi_min = 0`.
    pub planted_phase: f64,
    /// Chernoff bound evaluated at `planted_p`.
    pub bound: f64,
    /// The closed form quoted for the bound, evaluated.
    pub closed_form: f64,
    /// Exact probability of the misclassification under the branch rule.
    pub exact: f64,
}

impl ChernoffCase {
    /// Whether picking `branch` counts as this case's misclassification.
    pub fn misclassified(&self, branch: Branch) -> bool {
        match self.case {
            1 => branch != Branch::I,
            2 => branch != Branch::III,
            3 => branch == Branch::III,
            _ => branch == Branch::I,
        }
    }
}

/// The four cases at sample count `m`.
pub fn chernoff_cases(m: usize) -> Result<[ChernoffCase; 4]> {
    if m == 0 {
        return Err(Error::invalid("sample count m must be at least 1"));
    }
    use core::f64::consts::PI;
    let mf = m as f64;
    let s1 = (PI / 8.0).sin().powi(2);
    let s3 = (3.0 * PI / 8.0).sin().powi(2);
    let r2 = 2.0f64.sqrt();
    // k with k/m <= 1/4 and k/m <= 3/4
    let q1 = m / 4;
    let q3 = (3 * m) / 4;
    Ok([
        ChernoffCase {
            case: 1,
            description: "phase in I minus II, picked II or III",
            planted_p: s1,
            planted_phase: PI / 4.0,
            bound: chernoff_upper(s1, 0.25, m),
            closed_form: (-mf * (r2 - 1.0) / (12.0 * r2)).exp(),
            exact: binomial_tail_above(m, s1, q1),
        },
        ChernoffCase {
            case: 2,
            description: "phase in III minus II, picked I or II",
            planted_p: s3,
            planted_phase: 3.0 * PI / 4.0,
            bound: chernoff_lower(s3, 0.75, m),
            closed_form: (-mf * (1.0 + r2).powi(3) / (8.0 * r2)).exp(),
            exact: binomial_tail_at_most(m, s3, q3),
        },
        ChernoffCase {
            case: 3,
            description: "phase in (I and II) minus III, picked III",
            planted_p: 0.5,
            planted_phase: PI / 2.0,
            bound: chernoff_upper(0.5, 0.75, m),
            closed_form: (-mf / 24.0).exp(),
            exact: binomial_tail_above(m, 0.5, q3),
        },
        ChernoffCase {
            case: 4,
            description: "phase in (III and II) minus I, picked I",
            planted_p: 0.5,
            planted_phase: PI / 2.0,
            bound: chernoff_lower(0.5, 0.25, m),
            closed_form: (-mf / 16.0).exp(),
            exact: binomial_tail_at_most(m, 0.5, q1),
        },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pmf_sums_to_one() {
        for (m, p) in [(1, 0.3), (160, 0.146), (1000, 0.5), (7, 0.0), (7, 1.0)] {
            let s: f64 = binomial_pmf(m, p).iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pmf_against_direct_products() {
        // m = 5, p = 0.3 by direct binomial coefficients
        let pmf = binomial_pmf(5, 0.3);
        let c = [1.0, 5.0, 10.0, 10.0, 5.0, 1.0];
        for k in 0..=5 {
            let want = c[k] * 0.3f64.powi(k as i32) * 0.7f64.powi(5 - k as i32);
            assert!((pmf[k] - want).abs() < 1e-15);
        }
    }

    #[test]
    fn case_formulas_at_160() {
        let cases = chernoff_cases(160).unwrap();
        // cases 1, 3, 4 print the same number the generic formula gives
        for i in [0, 2, 3] {
            let c = &cases[i];
            assert!((c.bound - c.closed_form).abs() < 1e-12 * c.bound.max(1e-300), "case {}", c.case);
        }
        assert!((cases[2].bound - (-160.0f64 / 24.0).exp()).abs() < 1e-15);
        assert!((cases[3].bound - (-10.0f64).exp()).abs() < 1e-15);
        // case 2: the quoted closed form is far smaller than the formula
        assert!(cases[1].closed_form < 1e-80);
        assert!((cases[1].bound - 0.366).abs() < 1e-3);
        for c in &cases {
            assert!(c.exact <= c.bound, "case {} exact {} bound {}", c.case, c.exact, c.bound);
            assert!(c.bound <= (-160.0f64 / 160.0).exp() + 1e-12);
        }
    }

    #[test]
    fn misclassification_rules() {
        let c = chernoff_cases(10).unwrap();
        assert!(c[0].misclassified(Branch::II) && !c[0].misclassified(Branch::I));
        assert!(c[1].misclassified(Branch::II) && !c[1].misclassified(Branch::III));
        assert!(c[2].misclassified(Branch::III) && !c[2].misclassified(Branch::II));
        assert!(c[3].misclassified(Branch::I) && !c[3].misclassified(Branch::II));
    }
}
