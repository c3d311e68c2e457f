//! Double-double arithmetic (an unevaluated sum `hi + lo` of two `f64`).
//!
//! Roughly 106 bits of significand. Used where a representation is evaluated
//! through heavily cancelling alternating sums whose result must still be
//! accurate to a handful of digits below `f64` rounding, such as the
//! double-sum form of the SPL Green's function.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

const LN2: Dd = Dd {
    hi: std::f64::consts::LN_2,
    lo: 2.319_046_813_846_299_6e-17,
};

const TWO_PI: Dd = Dd {
    hi: std::f64::consts::TAU,
    lo: 2.449_293_598_294_706_4e-16,
};

// B_{2k} as exact (numerator, denominator) pairs, k = 1..15.
const BERNOULLI: [(f64, f64); 15] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
    (854513.0, 138.0),
    (-236364091.0, 2730.0),
    (8553103.0, 6.0),
    (-23749461029.0, 870.0),
    (8615841276005.0, 14322.0),
];

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub const fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    fn from_parts(hi: f64, lo: f64) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        Dd { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    fn ldexp(self, k: i32) -> Self {
        let s = 2f64.powi(k);
        Dd {
            hi: self.hi * s,
            lo: self.lo * s,
        }
    }

    pub fn powi(self, mut n: u32) -> Self {
        let mut base = self;
        let mut acc = Dd::ONE;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            n >>= 1;
        }
        acc
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.0 {
            return Dd::new(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        let k = (self.hi / LN2.hi).round();
        let r = (self - LN2 * k).ldexp(-10);
        // e^r - 1 by Taylor, |r| < 4e-4
        let mut term = r;
        let mut sum = r;
        for i in 2..=14 {
            term = term * r / i as f64;
            sum = sum + term;
            if term.hi.abs() < 1e-36 {
                break;
            }
        }
        // (1 + s)^2 - 1 = s (s + 2), ten times
        for _ in 0..10 {
            sum = sum * (sum + 2.0);
        }
        (sum + 1.0).ldexp(k as i32)
    }

    /// Natural log of a positive value.
    pub fn ln(self) -> Self {
        debug_assert!(self.hi > 0.0);
        let mut x = Dd::new(self.hi.ln());
        for _ in 0..2 {
            x = x + self * (-x).exp() - 1.0;
        }
        x
    }

    /// `self^e` for a positive base.
    pub fn powd(self, e: Dd) -> Self {
        if self.hi == 0.0 {
            return if e.hi > 0.0 { Dd::ZERO } else { Dd::new(f64::INFINITY) };
        }
        (e * self.ln()).exp()
    }

    /// `ln Γ(x)` for `x > 0`: Stirling series at `x + shift ≥ 30`, then downward recurrence.
    pub fn ln_gamma(self) -> Self {
        debug_assert!(self.hi > 0.0);
        let mut y = self;
        let mut prod = Dd::ONE;
        while y.hi < 30.0 {
            prod = prod * y;
            y = y + 1.0;
        }
        let half_ln_2pi = TWO_PI.ln() * 0.5;
        let mut s = (y - 0.5) * y.ln() - y + half_ln_2pi;
        let y2 = y * y;
        let mut ypow = y;
        for (k, &(num, den)) in BERNOULLI.iter().enumerate() {
            let n = 2.0 * (k + 1) as f64;
            s = s + Dd::new(num) / (ypow * (den * n * (n - 1.0)));
            ypow = ypow * y2;
        }
        if prod == Dd::ONE {
            s
        } else {
            s - prod.ln()
        }
    }

    /// `1/Γ(x)` for `x > 0`.
    pub fn recip_gamma(self) -> Self {
        (-self.ln_gamma()).exp()
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd::new(x)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        Dd::from_parts(s, e + f)
    }
}

impl Add<f64> for Dd {
    type Output = Dd;
    fn add(self, b: f64) -> Dd {
        let (s, e) = two_sum(self.hi, b);
        Dd::from_parts(s, e + self.lo)
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Sub<f64> for Dd {
    type Output = Dd;
    fn sub(self, b: f64) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        Dd::from_parts(p, e + (self.hi * b.lo + self.lo * b.hi))
    }
}

impl Mul<f64> for Dd {
    type Output = Dd;
    fn mul(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        Dd::from_parts(p, e + self.lo * b)
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b * q1;
        let q2 = r.hi / b.hi;
        let r = r - b * q2;
        let q3 = r.hi / b.hi;
        Dd::from_parts(q1, q2) + q3
    }
}

impl Div<f64> for Dd {
    type Output = Dd;
    fn div(self, b: f64) -> Dd {
        self / Dd::new(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: Dd, b: Dd) -> f64 {
        ((a - b).to_f64() / b.to_f64()).abs()
    }

    #[test]
    fn exp_of_one_is_e_to_double_double_precision() {
        let e = Dd {
            hi: std::f64::consts::E,
            lo: 1.445_646_891_729_250_2e-16,
        };
        assert!(rel(Dd::ONE.exp(), e) < 1e-30);
    }

    #[test]
    fn ln_inverts_exp() {
        for x in [1e-10, 0.3, 1.0, 2.5, 77.0, 1e12] {
            let d = Dd::new(x);
            assert!(rel(d.ln().exp(), d) < 1e-30, "x = {x}");
        }
    }

    #[test]
    fn gamma_of_one_half_squared_is_pi() {
        let pi = TWO_PI * 0.5;
        let g = (-Dd::new(0.5).recip_gamma().ln()).exp();
        assert!(rel(g * g, pi) < 1e-29);
    }

    #[test]
    fn ln_gamma_recurrence_and_factorials() {
        // 25! < 2^106 is exact in double-double
        let fact25 = (2..=25).fold(Dd::ONE, |acc, k| acc * k as f64);
        let g = Dd::new(26.0).ln_gamma().exp();
        assert!(rel(g, fact25) < 1e-28);
        for x in [0.1, 0.75, 3.3, 17.5] {
            let d = Dd::new(x);
            let lhs = (d + 1.0).ln_gamma();
            let rhs = d.ln_gamma() + d.ln();
            assert!((lhs - rhs).abs().to_f64() < 1e-29 * rhs.abs().to_f64().max(1.0));
        }
    }

    #[test]
    fn agrees_with_f64_ln_gamma() {
        for x in [0.2, 1.5, 9.0, 49.9] {
            let a = Dd::new(x).ln_gamma().to_f64();
            let b = crate::gamma::ln_gamma(x).0;
            assert!((a - b).abs() <= 1e-14 * b.abs().max(1.0), "x = {x}");
        }
    }
}
