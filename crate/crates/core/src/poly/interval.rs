//! Closed intervals of doubles with outward rounding.
//!
//! Every operation rounds the lower end down and the upper end up by at
//! least one ulp, so the true real result is always enclosed.

use core::f64::consts::{FRAC_PI_2, PI, TAU};
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use super::{from_f64, to_f64, Rational};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

#[inline]
fn outward(lo: f64, hi: f64) -> Interval {
    Interval {
        lo: lo.next_down(),
        hi: hi.next_up(),
    }
}

impl Interval {
    /// Panics unless `lo <= hi` (which also rejects NaN).
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "interval bounds out of order: [{}, {}]", lo, hi);
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval::new(x, x)
    }

    /// Tightest double enclosure of an exact rational.
    pub fn from_rational(r: &Rational) -> Self {
        if r.is_zero() {
            return Interval::point(0.0);
        }
        let v = to_f64(r);
        match from_f64(v) {
            Some(exact) if &exact == r => Interval::point(v),
            _ => outward(v, v),
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn mid(&self) -> f64 {
        0.5 * self.lo + 0.5 * self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    /// Every point of the interval is strictly positive.
    pub fn is_positive(&self) -> bool {
        self.lo > 0.0
    }

    /// Every point of the interval is strictly negative.
    pub fn is_negative(&self) -> bool {
        self.hi < 0.0
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    /// Halves at the midpoint.
    pub fn bisect(&self) -> (Interval, Interval) {
        let m = self.mid();
        (
            Interval { lo: self.lo, hi: m },
            Interval { lo: m, hi: self.hi },
        )
    }

    pub fn sqr(self) -> Interval {
        self.powi(2)
    }

    pub fn powi(self, n: u32) -> Interval {
        if n == 0 {
            return Interval::point(1.0);
        }
        if n.is_multiple_of(2) {
            let a = self.lo.abs();
            let b = self.hi.abs();
            let (small, big) = if self.contains_zero() {
                (0.0, a.max(b))
            } else {
                (a.min(b), a.max(b))
            };
            return nonneg_pow(small, big, n);
        }
        if self.lo >= 0.0 {
            nonneg_pow(self.lo, self.hi, n)
        } else if self.hi <= 0.0 {
            -nonneg_pow(-self.hi, -self.lo, n)
        } else {
            // Odd power is monotone.
            let lo = -nonneg_pow(-self.lo, -self.lo, n).hi;
            let hi = nonneg_pow(self.hi, self.hi, n).hi;
            Interval { lo, hi }
        }
    }

    pub fn cos(self) -> Interval {
        if !(self.width() < TAU) {
            return Interval::new(-1.0, 1.0);
        }
        let a = libm::cos(self.lo);
        let b = libm::cos(self.hi);
        let mut lo = a.min(b).next_down().next_down();
        let mut hi = a.max(b).next_up().next_up();
        if self.hits(0.0) {
            hi = 1.0;
        }
        if self.hits(PI) {
            lo = -1.0;
        }
        Interval {
            lo: lo.max(-1.0),
            hi: hi.min(1.0),
        }
    }

    pub fn sin(self) -> Interval {
        if !(self.width() < TAU) {
            return Interval::new(-1.0, 1.0);
        }
        let a = libm::sin(self.lo);
        let b = libm::sin(self.hi);
        let mut lo = a.min(b).next_down().next_down();
        let mut hi = a.max(b).next_up().next_up();
        if self.hits(FRAC_PI_2) {
            hi = 1.0;
        }
        if self.hits(-FRAC_PI_2) {
            lo = -1.0;
        }
        Interval {
            lo: lo.max(-1.0),
            hi: hi.min(1.0),
        }
    }

    /// `1 - cos(x)`, evaluated as `2 sin^2(x/2)` for accuracy near zero.
    pub fn versin(self) -> Interval {
        let half = Interval {
            lo: self.lo * 0.5,
            hi: self.hi * 0.5,
        };
        let s = half.sin().sqr();
        Interval {
            lo: (2.0 * s.lo).max(0.0),
            hi: (2.0 * s.hi).next_up().min(2.0),
        }
    }

    /// Whether the interval (slightly enlarged) contains `phase + 2 k pi` for some integer k.
    fn hits(&self, phase: f64) -> bool {
        let slack = 1e-12 * (1.0 + self.lo.abs().max(self.hi.abs()));
        let k = libm::ceil((self.lo - slack - phase) / TAU);
        let x = phase + k * TAU;
        x <= self.hi + slack
    }

    pub fn scale(self, c: f64) -> Interval {
        self * Interval::point(c)
    }
}

fn nonneg_pow(lo: f64, hi: f64, n: u32) -> Interval {
    let mut rlo = 1.0f64;
    let mut rhi = 1.0f64;
    for _ in 0..n {
        rlo = (rlo * lo).next_down().max(0.0);
        rhi = (rhi * hi).next_up();
    }
    Interval { lo: rlo, hi: rhi }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, o: Interval) -> Interval {
        outward(self.lo + o.lo, self.hi + o.hi)
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, o: Interval) -> Interval {
        outward(self.lo - o.hi, self.hi - o.lo)
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, o: Interval) -> Interval {
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let mut lo = c[0];
        let mut hi = c[0];
        for &v in &c[1..] {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if lo == 0.0 && hi == 0.0 {
            return Interval::point(0.0);
        }
        outward(lo, hi)
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::ratio;

    #[test]
    fn square_of_straddling_interval() {
        let x = Interval::new(-1.0, 2.0).sqr();
        assert!(x.lo() <= 0.0 && x.hi() >= 4.0);
        assert!(x.lo() >= 0.0);
    }

    #[test]
    fn rational_enclosure() {
        let third = Interval::from_rational(&ratio(1, 3));
        assert!(third.lo() < 1.0 / 3.0 + 1e-17 && third.hi() > 1.0 / 3.0 - 1e-17);
        assert_eq!(Interval::from_rational(&ratio(1, 2)), Interval::point(0.5));
    }

    #[test]
    fn trig_extremes_are_included() {
        let c = Interval::new(-0.1, 0.1).cos();
        assert_eq!(c.hi(), 1.0);
        let c = Interval::new(3.0, 3.3).cos();
        assert_eq!(c.lo(), -1.0);
        let s = Interval::new(1.5, 1.6).sin();
        assert_eq!(s.hi(), 1.0);
        let v = Interval::new(-0.01, 0.02).versin();
        assert_eq!(v.lo(), 0.0);
        assert!(v.hi() >= 2.0 * libm::sin(0.01) * libm::sin(0.01));
    }

    #[test]
    fn odd_power_across_zero() {
        let c = Interval::new(-2.0, 1.0).powi(3);
        assert!(c.lo() <= -8.0 && c.hi() >= 1.0);
    }
}
