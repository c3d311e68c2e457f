//! Gamma function helpers on top of `libm`.
//!
//! Every series in this crate assembles its terms in log space, so the
//! workhorse is [`ln_gamma`], which also reports the sign of `Γ(x)`.

/// `ln|Γ(x)|` together with the sign of `Γ(x)`.
///
/// At the poles (`x ∈ {0, -1, -2, ...}`) the magnitude is `+∞`.
pub fn ln_gamma(x: f64) -> (f64, i32) {
    libm::lgamma_r(x)
}

/// `Γ(x)`.
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// True when `x` is a pole of `Γ`.
pub fn is_gamma_pole(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// `1/Γ(x)`, entire; zero at the poles of `Γ`.
pub fn recip_gamma(x: f64) -> f64 {
    if is_gamma_pole(x) {
        return 0.0;
    }
    if x > 0.0 && x < 170.0 {
        return 1.0 / gamma(x);
    }
    let (lg, sign) = ln_gamma(x);
    sign as f64 * (-lg).exp()
}

/// `ln|1/Γ(x)|` and sign; `(−∞, 0)` at the poles.
pub fn ln_recip_gamma(x: f64) -> (f64, i32) {
    if is_gamma_pole(x) {
        return (f64::NEG_INFINITY, 0);
    }
    let (lg, sign) = ln_gamma(x);
    (-lg, sign)
}

/// `ln(n!)`, exact table for small `n`.
pub fn ln_factorial(n: usize) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if n <= 20 {
        let mut f = 1u64;
        for i in 2..=n as u64 {
            f *= i;
        }
        return (f as f64).ln();
    }
    ln_gamma(n as f64 + 1.0).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn half_integer_and_integer_values() {
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-15);
        let mut fact = 1.0;
        for n in 1..20 {
            assert!((gamma(n as f64) - fact).abs() <= 1e-15 * fact, "n = {n}");
            fact *= n as f64;
        }
    }

    #[test]
    fn ln_gamma_relative_accuracy_on_0_50() {
        // recurrence oracle: ln Γ(x+1) = ln Γ(x) + ln x, summed from a known value
        // ln Γ(1/2) = ln √π; ln Γ(49.5) = ln Γ(1/2) + Σ ln(k + 1/2)
        let mut acc = 0.5 * PI.ln();
        let mut x = 0.5f64;
        while x < 49.5 {
            acc += x.ln();
            x += 1.0;
        }
        let (lg, sign) = ln_gamma(49.5);
        assert_eq!(sign, 1);
        assert!(((lg - acc) / acc).abs() < 1e-13, "{lg} vs {acc}");
        // ln(49!) from exact integer logs
        let lf: f64 = (2..50).map(|k| (k as f64).ln()).sum();
        assert!(((ln_gamma(50.0).0 - lf) / lf).abs() < 1e-13);
    }

    #[test]
    fn recip_gamma_at_poles_and_negative_arguments() {
        assert_eq!(recip_gamma(0.0), 0.0);
        assert_eq!(recip_gamma(-3.0), 0.0);
        // Γ(-1/2) = -2√π
        assert!((recip_gamma(-0.5) + 1.0 / (2.0 * PI.sqrt())).abs() < 1e-15);
        // beyond the direct range: 1/Γ(172) is tiny but nonzero
        let r = recip_gamma(172.0);
        assert!(r > 0.0 && r < 1e-300);
        assert!((r.ln() + ln_gamma(172.0).0).abs() < 1e-9);
    }

    #[test]
    fn ln_factorial_matches_ln_gamma() {
        for n in [0usize, 1, 5, 20, 21, 100] {
            let a = ln_factorial(n);
            let b = ln_gamma(n as f64 + 1.0).0;
            assert!((a - b).abs() <= 1e-13 * b.abs().max(1.0), "n = {n}");
        }
    }
}
