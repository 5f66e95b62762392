//! Double-double arithmetic.
//!
//! Eigenphases of large powers (`lambda * t` with `t` near `2^60`) lose every
//! significant digit in plain `f64`. A pair `hi + lo` carries about 106 bits,
//! which is enough to reduce such products modulo `2*pi` to ~1e-14.

use core::cmp::Ordering;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, libm::fma(a, b, -p))
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };
    pub const PI: Self = Self {
        hi: 3.141_592_653_589_793,
        lo: 1.224_646_799_147_353_2e-16,
    };
    pub const TWO_PI: Self = Self {
        hi: 6.283_185_307_179_586,
        lo: 2.449_293_598_294_706_4e-16,
    };

    pub const fn new(hi: f64, lo: f64) -> Self {
        Self { hi, lo }
    }

    pub fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    /// Exact for every `|i| < 2^106`.
    pub fn from_i128(i: i128) -> Self {
        let hi = i as f64;
        // the remainder after one rounding can still exceed 53 bits
        let rest = i.wrapping_sub(hi as i128);
        let mid = rest as f64;
        let tail = rest.wrapping_sub(mid as i128) as f64;
        let (s, e) = quick_two_sum(hi, mid);
        Self::renorm(s, e + tail)
    }

    fn renorm(hi: f64, lo: f64) -> Self {
        let (s, e) = quick_two_sum(hi, lo);
        Self { hi: s, lo: e }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let e = e + self.lo * b;
        Self::renorm(p, e)
    }

    pub fn floor(self) -> Self {
        let fh = self.hi.floor();
        if fh == self.hi {
            let fl = self.lo.floor();
            Self::renorm(fh, fl)
        } else {
            Self { hi: fh, lo: 0.0 }
        }
    }

    pub fn round(self) -> Self {
        (self + Self::from_f64(0.5)).floor()
    }

    /// Integer value of an already integral double-double.
    pub fn to_i128(self) -> i128 {
        (self.hi as i128) + (self.lo as i128)
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Self::ZERO;
        }
        let x = self.hi.sqrt();
        // one Newton step in double-double
        let (p, e) = two_prod(x, x);
        let r = (self - Self::renorm(p, e)).to_f64();
        Self::renorm(x, r / (2.0 * x))
    }

    /// Reduces into `[0, 2*pi)`, also returning the number of whole turns
    /// removed (`self = result + 2*pi*turns`).
    pub fn rem_two_pi(self) -> (f64, i128) {
        let k = (self / Self::TWO_PI).floor();
        let mut r = (self - Self::TWO_PI * k).to_f64();
        let mut turns = k.to_i128();
        let tp = Self::TWO_PI.hi;
        if r < 0.0 {
            r += tp;
            turns -= 1;
        }
        if r >= tp {
            r -= tp;
            turns += 1;
        }
        if r < 0.0 || r >= tp {
            r = 0.0;
        }
        (r, turns)
    }

    /// Like [`rem_two_pi`](Self::rem_two_pi) but keeps the low word.
    pub fn rem_two_pi_dd(self) -> Self {
        let (_, turns) = self.rem_two_pi();
        let r = self - Self::TWO_PI * Self::from_i128(turns);
        if r.hi < 0.0 {
            Self::ZERO
        } else {
            r
        }
    }

    /// Reduces into `(-pi, pi]` with the matching turn count.
    pub fn rem_two_pi_symmetric(self) -> (f64, i128) {
        let (mut r, mut turns) = self.rem_two_pi();
        if r > core::f64::consts::PI {
            r -= Self::TWO_PI.hi;
            turns += 1;
        }
        (r, turns)
    }
}

/// `e^{-i x}` for a double-double angle.
pub fn cis_neg(x: DoubleDouble) -> Complex64 {
    let (r, _) = x.rem_two_pi();
    Complex64::new(r.cos(), -r.sin())
}

/// Wraps an `f64` angle into `[0, 2*pi)`.
pub fn wrap_angle(x: f64) -> f64 {
    DoubleDouble::from_f64(x).rem_two_pi().0
}

/// Shortest signed distance between two angles, in `[0, pi]`.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    let d = wrap_angle(a - b);
    if d > core::f64::consts::PI {
        DoubleDouble::TWO_PI.hi - d
    } else {
        d
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        Self::renorm(s, e + f)
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        Self::renorm(p, e)
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Self::renorm(s, e + q3)
    }
}

impl AddAssign for DoubleDouble {
    fn add_assign(&mut self, b: Self) {
        *self = *self + b;
    }
}

impl SubAssign for DoubleDouble {
    fn sub_assign(&mut self, b: Self) {
        *self = *self - b;
    }
}

impl MulAssign for DoubleDouble {
    fn mul_assign(&mut self, b: Self) {
        *self = *self * b;
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

/// Complex number with double-double parts.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ComplexDd {
    pub re: DoubleDouble,
    pub im: DoubleDouble,
}

impl ComplexDd {
    pub fn from_c64(z: Complex64) -> Self {
        Self { re: z.re.into(), im: z.im.into() }
    }

    pub fn from_parts(hi: Complex64, lo: Complex64) -> Self {
        Self {
            re: DoubleDouble::renorm(hi.re, lo.re),
            im: DoubleDouble::renorm(hi.im, lo.im),
        }
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    /// `hi + lo` split of each component.
    pub fn split(self) -> (Complex64, Complex64) {
        (
            Complex64::new(self.re.hi, self.im.hi),
            Complex64::new(self.re.lo, self.im.lo),
        )
    }

    pub fn conj(self) -> Self {
        Self { re: self.re, im: -self.im }
    }

    pub fn mul_c64(self, z: Complex64) -> Self {
        Self {
            re: self.re.mul_f64(z.re) - self.im.mul_f64(z.im),
            im: self.re.mul_f64(z.im) + self.im.mul_f64(z.re),
        }
    }
}

impl Add for ComplexDd {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        Self { re: self.re + b.re, im: self.im + b.im }
    }
}

impl AddAssign for ComplexDd {
    fn add_assign(&mut self, b: Self) {
        *self = *self + b;
    }
}

impl Sub for ComplexDd {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        Self { re: self.re - b.re, im: self.im - b.im }
    }
}

impl Mul for ComplexDd {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        Self {
            re: self.re * b.re - self.im * b.im,
            im: self.re * b.im + self.im * b.re,
        }
    }
}
