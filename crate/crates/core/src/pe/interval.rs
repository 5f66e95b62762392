use core::f64::consts::PI;

use crate::dd::{angle_distance, wrap_angle};
use crate::error::{Error, Result};
use crate::ff::Angle;

/// Deepest level whose left end stays exactly representable.
pub const MAX_LEVEL: u32 = 52;

/// Which half-width sub-interval the trisection rule picked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// `[phi_min, phi_min + Delta/2]`
    I,
    /// `[phi_min + Delta/4, phi_min + 3 Delta/4]`
    II,
    /// `[phi_min + Delta/2, phi_min + Delta]`
    III,
}

impl Branch {
    /// Thresholds `p <= 1/4`, `p <= 3/4`, else.
    pub fn from_p_hat(p: f64) -> Self {
        if p <= 0.25 {
            Branch::I
        } else if p <= 0.75 {
            Branch::II
        } else {
            Branch::III
        }
    }

    fn offset_quarters(self) -> f64 {
        match self {
            Branch::I => 0.0,
            Branch::II => 1.0,
            Branch::III => 2.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Branch::I => "I",
            Branch::II => "II",
            Branch::III => "III",
        }
    }
}

/// Interval `[phi_min, phi_min + Delta_j]` with `Delta_j = 2^{1-j} pi`,
/// taken modulo `2 pi`.
///
/// The left end is stored in units of `pi`, so every left end the trisection
/// rule produces is an exact dyadic rational.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseInterval {
    start: f64,
    level: u32,
}

impl PhaseInterval {
    /// `phi_min = start * pi`.
    pub fn new(start_over_pi: f64, level: u32) -> Result<Self> {
        if !start_over_pi.is_finite() {
            return Err(Error::invalid("interval start must be finite"));
        }
        if level == 0 || level > MAX_LEVEL {
            return Err(Error::invalid("interval level j must lie in 1..=52"));
        }
        let mut s = start_over_pi % 2.0;
        if s < 0.0 {
            s += 2.0;
        }
        Ok(Self { start: s, level })
    }

    /// Width-`pi` starting window.
    pub fn initial(start_over_pi: f64) -> Result<Self> {
        Self::new(start_over_pi, 1)
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn start_over_pi(&self) -> f64 {
        self.start
    }

    pub fn phi_min(&self) -> f64 {
        self.start * PI
    }

    pub fn phi_min_angle(&self) -> Angle {
        Angle::pi_times(self.start)
    }

    pub fn width_over_pi(&self) -> f64 {
        libm::scalbn(1.0, 1 - self.level as i32)
    }

    pub fn width(&self) -> f64 {
        self.width_over_pi() * PI
    }

    /// `phi_max`, possibly past `2 pi` for wrapped intervals.
    pub fn phi_max(&self) -> f64 {
        (self.start + self.width_over_pi()) * PI
    }

    /// `t_j = pi / Delta_j`.
    pub fn power(&self) -> i128 {
        1i128 << (self.level - 1)
    }

    /// True when the interval crosses `2 pi`.
    pub fn is_wrapped(&self) -> bool {
        self.start + self.width_over_pi() > 2.0
    }

    pub fn contains(&self, phi: f64) -> bool {
        wrap_angle(phi - self.phi_min()) <= self.width() * (1.0 + 1e-12)
            || angle_distance(phi, self.phi_min()) < 1e-12
    }

    /// Midpoint, in `[0, 2 pi)`.
    pub fn midpoint(&self) -> f64 {
        wrap_angle((self.start + self.width_over_pi() / 2.0) * PI)
    }

    /// Next-level interval for `branch`.
    pub fn next(&self, branch: Branch) -> Result<Self> {
        let quarter = self.width_over_pi() / 4.0;
        Self::new(self.start + branch.offset_quarters() * quarter, self.level + 1)
    }

    /// Same interval moved by `shift * pi`.
    pub fn shifted(&self, shift_over_pi: f64) -> Result<Self> {
        Self::new(self.start + shift_over_pi, self.level)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn widths_and_powers() {
        let a = PhaseInterval::initial(0.0).unwrap();
        assert_eq!(a.width(), PI);
        assert_eq!(a.power(), 1);
        let b = a.next(Branch::II).unwrap();
        assert_eq!(b.level(), 2);
        assert_eq!(b.start_over_pi(), 0.25);
        assert_eq!(b.width(), PI / 2.0);
        assert_eq!(b.power(), 2);
        let c = b.next(Branch::III).unwrap();
        assert_eq!(c.start_over_pi(), 0.5);
        assert_eq!(c.power(), 4);
    }

    #[test]
    fn wrapped_interval() {
        let w = PhaseInterval::initial(1.5).unwrap();
        assert!(w.is_wrapped());
        assert!(w.contains(0.1));
        assert!(w.contains(5.0 * PI / 3.0));
        assert!(!w.contains(PI));
        assert!((w.midpoint() - 0.0).abs() < 1e-15);
        assert!(!PhaseInterval::initial(0.5).unwrap().is_wrapped());
    }

    #[test]
    fn branch_thresholds() {
        assert_eq!(Branch::from_p_hat(0.0), Branch::I);
        assert_eq!(Branch::from_p_hat(0.25), Branch::I);
        assert_eq!(Branch::from_p_hat(0.2500001), Branch::II);
        assert_eq!(Branch::from_p_hat(0.75), Branch::II);
        assert_eq!(Branch::from_p_hat(0.76), Branch::III);
    }

    #[test]
    fn level_bounds() {
        assert!(PhaseInterval::new(0.0, 0).is_err());
        assert!(PhaseInterval::new(0.0, MAX_LEVEL + 1).is_err());
        assert!(PhaseInterval::new(f64::NAN, 1).is_err());
    }
}
