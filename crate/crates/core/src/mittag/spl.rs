//! The SPL Green's function `G(t)` of a single mode, in its multinomial
//! Mittag-Leffler form and as the original double sum (used as an oracle).

use serde::{Deserialize, Serialize};

use super::series::LnFactDd;
use super::{mml, MlEvaluation, MlMethod, MlQuery, SeriesControl};
use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Default cap on the outer index of [`g_double_sum`].
pub const DEFAULT_DOUBLE_SUM_MAX: usize = 400;

/// Mode data entering `G(t)`: the model constants and the eigenvalue `σ_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplCoefficients {
    pub model: ModelParams,
    pub sigma: f64,
}

impl SplCoefficients {
    /// `σ = 0` is accepted (degenerate limit checks); modes always have `σ > 0`.
    pub fn new(model: ModelParams, sigma: f64) -> Result<Self> {
        model.validate()?;
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::domain(format!("sigma must be finite and >= 0, got {sigma}")));
        }
        Ok(SplCoefficients { model, sigma })
    }

    /// `(α+1, 1, α)`.
    pub fn alphas(&self) -> [f64; 3] {
        let a = self.model.alpha;
        [a + 1.0, 1.0, a]
    }

    /// `(−σ/(ρcτ_q^α)·t^{α+1}, −a/(ρc)·t, −t^α/τ_q^α)`, all `≤ 0`.
    pub fn arguments(&self, t: f64) -> [f64; 3] {
        let p = &self.model;
        let ta = t.powf(p.alpha);
        [
            -self.sigma / (p.rho_c() * p.tau_q_alpha) * ta * t,
            -p.a / p.rho_c() * t,
            -ta / p.tau_q_alpha,
        ]
    }

    pub fn query(&self, t: f64, beta: f64) -> MlQuery {
        MlQuery {
            alphas: self.alphas().to_vec(),
            beta,
            zs: self.arguments(t).to_vec(),
        }
    }
}

/// `G(t) = t^α/(ρcτ_q^α) · E_{(α+1,1,α),α+1}(..)`, with `G(0) = 0`.
pub fn g_mml(t: f64, coeff: &SplCoefficients, control: SeriesControl) -> Result<MlEvaluation> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("t must be >= 0, got {t}")));
    }
    let p = &coeff.model;
    if t == 0.0 {
        return Ok(MlEvaluation {
            value: 0.0,
            terms_used: 0,
            tail_estimate: 0.0,
            method: MlMethod::Series,
            error_estimate: 0.0,
        });
    }
    let pre = t.powf(p.alpha) / (p.rho_c() * p.tau_q_alpha);
    let e = mml(&coeff.query(t, p.alpha + 1.0), control)?;
    Ok(MlEvaluation {
        value: pre * e.value,
        error_estimate: pre * e.error_estimate,
        tail_estimate: pre * e.tail_estimate,
        ..e
    })
}

/// `n · ln x` in double-double, `None` for a vanishing power.
fn ln_pow(ln_x: Option<Dd>, n: usize) -> Option<Dd> {
    match (n, ln_x) {
        (0, _) => Some(Dd::ZERO),
        (_, None) => None,
        (_, Some(l)) => Some(l * n as f64),
    }
}

/// The double-sum representation
///
/// ```text
/// G(t) = 1/(ρcτ_q^α) Σ_m (1/m!)(−σ/(ρcτ_q^α))^m Σ_{k≤m} C(m,k)(aτ_q^α/σ)^k
///        · t^{(α+1)(m+1)−αk−1} E^{(m)}_{α,α+1+m−αk}(−t^α/τ_q^α)
/// ```
///
/// summed in double-double arithmetic (the terms cancel by many orders of
/// magnitude). Each term is assembled in log space from
/// `(σ/ρcτ_q^α)^{m−k}(a/ρc)^k`, which also covers `σ = 0` and `a = 0`.
/// The outer sum stops once three consecutive `m`-blocks are negligible;
/// `terms_used` is the number of blocks and `tail_estimate` the last one.
pub fn g_double_sum(t: f64, coeff: &SplCoefficients, m_max: usize) -> Result<MlEvaluation> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("t must be >= 0, got {t}")));
    }
    let p = &coeff.model;
    if t == 0.0 {
        return Ok(MlEvaluation {
            value: 0.0,
            terms_used: 0,
            tail_estimate: 0.0,
            method: MlMethod::DoubleSum,
            error_estimate: 0.0,
        });
    }
    let alpha = Dd::new(p.alpha);
    let rc = Dd::new(p.rho) * p.c;
    let rct = rc * p.tau_q_alpha;
    let ln_sig = (coeff.sigma > 0.0).then(|| (Dd::new(coeff.sigma) / rct).ln());
    let ln_a = (p.a > 0.0).then(|| (Dd::new(p.a) / rc).ln());
    let ln_t = Dd::new(t).ln();
    let ln_absz = alpha * ln_t - Dd::new(p.tau_q_alpha).ln();
    let mut lnfact = LnFactDd::new();

    let mut sum = Dd::ZERO;
    let mut abs_sum = 0.0;
    let mut max_abs = 0.0f64;
    let mut quiet = 0;
    let mut last = f64::INFINITY;
    for m in 0..=m_max {
        let mut block = Dd::ZERO;
        for kp in 0..=m {
            let (Some(l_sig), Some(l_a)) = (ln_pow(ln_sig, m - kp), ln_pow(ln_a, kp)) else {
                continue;
            };
            let binom = lnfact.get(m) - lnfact.get(kp) - lnfact.get(m - kp);
            let t_exp = alpha * (m + 1 - kp) as f64 + m as f64;
            let outer = l_sig + l_a + binom + t_exp * ln_t;
            let mut prev = f64::INFINITY;
            let mut k = 0usize;
            loop {
                let inner_binom = lnfact.get(k + m) - lnfact.get(k) - lnfact.get(m);
                let g_arg = alpha * (k + m + 1 - kp) as f64 + (1 + m) as f64;
                let l = outer + inner_binom + ln_absz * k as f64 - g_arg.ln_gamma();
                if l.hi > 709.0 {
                    return Err(Error::Overflow(format!("double-sum term (m={m}, k={k}) overflows")));
                }
                let mut term = l.exp();
                let mag = term.hi;
                if (m + k) % 2 == 1 {
                    term = -term;
                }
                block = block + term;
                abs_sum += mag;
                max_abs = max_abs.max(mag);
                if k > 0 && mag < prev && mag <= 1e-34 * max_abs {
                    break;
                }
                prev = mag;
                k += 1;
                if k > 20_000 {
                    return Err(Error::Convergence {
                        what: format!("inner Mittag-Leffler derivative series at m = {m}"),
                        terms: k,
                        tail: mag,
                    });
                }
            }
        }
        sum = sum + block;
        last = block.hi.abs();
        let floor = (1e-30 * sum.hi.abs()).max(1e-33 * max_abs);
        if last <= floor {
            quiet += 1;
        } else {
            quiet = 0;
        }
        if quiet >= 3 {
            let pre = 1.0 / rct.to_f64();
            let value = (sum / rct).to_f64();
            let error_estimate = (abs_sum * 1e-31 + last) * pre;
            // an oracle that has lost its digits to cancellation must say so
            if !(error_estimate <= 1e-10 * value.abs()) {
                return Err(Error::Convergence {
                    what: format!(
                        "double-sum representation of G (cancellation: error estimate {error_estimate:e} for value {value:e})"
                    ),
                    terms: m + 1,
                    tail: last * pre,
                });
            }
            return Ok(MlEvaluation {
                value,
                terms_used: m + 1,
                tail_estimate: last * pre,
                method: MlMethod::DoubleSum,
                error_estimate,
            });
        }
    }
    Err(Error::Convergence {
        what: "double-sum representation of G".into(),
        terms: m_max + 1,
        tail: last / rct.to_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mittag::ml2;
    use std::f64::consts::PI;

    fn coeff(a: f64, sigma: f64) -> SplCoefficients {
        SplCoefficients::new(ModelParams::new(0.5, 1.0, 1.0, 1.0, a).unwrap(), sigma).unwrap()
    }

    #[test]
    fn vanishes_at_zero() {
        let c = coeff(1.0, PI * PI + 1.0);
        assert_eq!(g_mml(0.0, &c, SeriesControl::default()).unwrap().value, 0.0);
        assert_eq!(g_double_sum(0.0, &c, 10).unwrap().value, 0.0);
        assert!(g_mml(-1.0, &c, SeriesControl::default()).is_err());
    }

    #[test]
    fn collapses_to_two_parameter_function() {
        let c = coeff(0.0, 0.0);
        for t in [0.1, 0.5, 1.0, 3.0] {
            let g = g_mml(t, &c, SeriesControl::default()).unwrap().value;
            let want = t.powf(0.5) * ml2(0.5, 1.5, -t.powf(0.5)).unwrap();
            assert!((g - want).abs() < 1e-14 * want.abs(), "t = {t}");
            let d = g_double_sum(t, &c, DEFAULT_DOUBLE_SUM_MAX).unwrap().value;
            assert!((d - want).abs() < 1e-14 * want.abs(), "t = {t}");
        }
    }

    #[test]
    fn no_damping_keeps_only_leading_inner_terms() {
        // a = 0: only k = 0 survives in the inner binomial sum
        let c = coeff(0.0, 2.0);
        let t = 0.7;
        let d = g_double_sum(t, &c, DEFAULT_DOUBLE_SUM_MAX).unwrap().value;
        let g = g_mml(t, &c, SeriesControl::default()).unwrap().value;
        assert!(((d - g) / g).abs() < 1e-12);
    }

    #[test]
    fn matches_high_precision_reference() {
        // independent 50-digit evaluation of the double sum
        let cases = [
            (PI * PI + 1.0, 0.1, 0.226_896_408_643_378),
            (PI * PI + 1.0, 0.5, 0.076_170_777_399_855_5),
            (PI * PI + 1.0, 1.0, -0.008_229_654_086_359_89),
            (4.0 * PI * PI + 1.0, 0.1, 0.151_454_883_047_59),
            (4.0 * PI * PI + 1.0, 0.5, -0.010_650_841_765_933_2),
            (4.0 * PI * PI + 1.0, 1.0, 4.787_523_237_555_19e-5),
        ];
        for (sigma, t, want) in cases {
            let c = coeff(1.0, sigma);
            let d = g_double_sum(t, &c, DEFAULT_DOUBLE_SUM_MAX).unwrap();
            assert!(((d.value - want) / want).abs() < 1e-12, "sigma={sigma}, t={t}: {}", d.value);
            let g = g_mml(t, &c, SeriesControl::default()).unwrap();
            assert!(((g.value - want) / want).abs() < 1e-10, "sigma={sigma}, t={t}: {}", g.value);
        }
    }

    #[test]
    fn truncation_cap_is_reported() {
        let c = coeff(1.0, 4.0 * PI * PI + 1.0);
        assert!(g_double_sum(1.0, &c, 3).unwrap_err().is_convergence());
    }
}
