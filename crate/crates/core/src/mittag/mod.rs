//! Two-parameter and multinomial Mittag-Leffler functions.
//!
//! ```text
//! E_{α,β}(z)            = Σ_k z^k / Γ(β + αk)
//! E_{(α_1..α_m),β}(z..) = Σ_k Σ_{k_1+..+k_m=k} (k; k_1..k_m) Π z_j^{k_j} / Γ(β + Σ α_j k_j)
//! ```
//!
//! Evaluation starts with the power series (terms assembled in log space,
//! compensated summation). On the negative real axis the series cancels
//! catastrophically once `|z|` grows, so when its own error estimate is not
//! good enough and every argument is `≤ 0` with `β > 0`, the value is also
//! computed by numerical Laplace inversion ([`inversion`]) and the result with
//! the smaller error estimate wins. [`MlEvaluation::method`] records which.

mod inversion;
mod series;
mod spl;

pub use inversion::InversionEvaluator;
pub use spl::{g_double_sum, g_mml, SplCoefficients, DEFAULT_DOUBLE_SUM_MAX};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamma;

/// Arguments of a (multinomial) Mittag-Leffler evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlQuery {
    pub alphas: Vec<f64>,
    pub beta: f64,
    pub zs: Vec<f64>,
}

impl MlQuery {
    pub fn new(alphas: Vec<f64>, beta: f64, zs: Vec<f64>) -> Result<Self> {
        let q = MlQuery { alphas, beta, zs };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if self.alphas.is_empty() {
            return Err(Error::domain("at least one (alpha, z) pair is required"));
        }
        if self.alphas.len() != self.zs.len() {
            return Err(Error::domain(format!(
                "{} exponents but {} arguments",
                self.alphas.len(),
                self.zs.len()
            )));
        }
        if let Some(a) = self.alphas.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
            return Err(Error::domain(format!("exponents must be finite and > 0, got {a}")));
        }
        if !self.beta.is_finite() || self.zs.iter().any(|z| !z.is_finite()) {
            return Err(Error::domain("beta and arguments must be finite"));
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.alphas.len()
    }

    pub fn with_beta(&self, beta: f64) -> Self {
        MlQuery {
            beta,
            ..self.clone()
        }
    }

    /// The query with the `(α_j, z_j)` pairs permuted by `perm`.
    /// Pairs `(α_j, z_j)` in a fixed order (decreasing `α`, then `z`). The
    /// function is symmetric in the pairs; evaluating in canonical order makes
    /// the rounding symmetric too.
    pub fn canonical(&self) -> Self {
        let mut pairs: Vec<(f64, f64)> = self.alphas.iter().copied().zip(self.zs.iter().copied()).collect();
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.total_cmp(&b.1)));
        let (alphas, zs) = pairs.into_iter().unzip();
        MlQuery {
            alphas,
            beta: self.beta,
            zs,
        }
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        MlQuery {
            alphas: perm.iter().map(|&i| self.alphas[i]).collect(),
            beta: self.beta,
            zs: perm.iter().map(|&i| self.zs[i]).collect(),
        }
    }

    /// True when Laplace inversion applies: all arguments `≤ 0` and `β > 0`.
    pub fn inversion_admissible(&self) -> bool {
        self.beta > 0.0 && self.zs.iter().all(|&z| z <= 0.0)
    }
}

/// Truncation control for the power series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesControl {
    pub rel_tol: f64,
    pub max_total_degree: usize,
    pub underflow_guard: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl {
            rel_tol: 1e-14,
            max_total_degree: 400,
            underflow_guard: 3,
        }
    }
}

impl SeriesControl {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(Error::domain("rel_tol must be > 0"));
        }
        if self.max_total_degree == 0 {
            return Err(Error::domain("max_total_degree must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MlMethod {
    /// Power series in `f64`.
    Series,
    /// Power series in double-double arithmetic.
    SeriesDd,
    /// Laplace inversion on a parabolic contour.
    Inversion,
    /// Double-sum representation of the SPL Green's function.
    DoubleSum,
}

impl MlMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            MlMethod::Series => "series",
            MlMethod::SeriesDd => "series-dd",
            MlMethod::Inversion => "inversion",
            MlMethod::DoubleSum => "double-sum",
        }
    }
}

/// Value plus truncation diagnostics.
///
/// For series methods `terms_used` is the number of degree blocks summed and
/// `tail_estimate` the magnitude of the last block; for inversion they are the
/// number of quadrature nodes and the truncated contour mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MlEvaluation {
    pub value: f64,
    pub terms_used: usize,
    pub tail_estimate: f64,
    pub method: MlMethod,
    /// Absolute error estimate (rounding plus truncation).
    pub error_estimate: f64,
}

impl MlEvaluation {
    fn exact(value: f64) -> Self {
        MlEvaluation {
            value,
            terms_used: 1,
            tail_estimate: 0.0,
            method: MlMethod::Series,
            error_estimate: 0.0,
        }
    }

    fn good_enough(&self, rel_tol: f64) -> bool {
        self.error_estimate <= rel_tol * self.value.abs()
    }
}

/// Results whose estimated error exceeds this fraction of `max(|value|, 1)`
/// are reported as convergence failures instead of returned.
const LOSS_LIMIT: f64 = 1e-6;

fn reject_lost(r: Result<MlEvaluation>) -> Result<MlEvaluation> {
    match r {
        Ok(e) if !(e.error_estimate <= LOSS_LIMIT * e.value.abs().max(1.0)) => Err(Error::Convergence {
            what: format!(
                "Mittag-Leffler {} (cancellation: error estimate {:e} for value {:e})",
                e.method.as_str(),
                e.error_estimate,
                e.value
            ),
            terms: e.terms_used,
            tail: e.tail_estimate,
        }),
        other => other,
    }
}

fn pick_better(a: Result<MlEvaluation>, b: Result<MlEvaluation>) -> Result<MlEvaluation> {
    match (a, b) {
        (Ok(x), Ok(y)) => Ok(if y.error_estimate < x.error_estimate { y } else { x }),
        (Ok(x), Err(_)) => Ok(x),
        (Err(_), Ok(y)) => Ok(y),
        (Err(e), Err(_)) => Err(e),
    }
}

/// `E_{α,β}(z)` with default truncation control.
pub fn ml2(alpha: f64, beta: f64, z: f64) -> Result<f64> {
    ml2_eval(alpha, beta, z, SeriesControl::default()).map(|e| e.value)
}

/// `E_{α,β}(z)` with diagnostics.
///
/// Uses its own one-dimensional series (independent of [`mml`]), refined in
/// double-double arithmetic when cancellation eats into the `f64` result.
pub fn ml2_eval(alpha: f64, beta: f64, z: f64, control: SeriesControl) -> Result<MlEvaluation> {
    control.validate()?;
    if !(alpha > 0.0 && alpha.is_finite()) || !beta.is_finite() || !z.is_finite() {
        return Err(Error::domain(format!(
            "invalid Mittag-Leffler arguments alpha={alpha}, beta={beta}, z={z}"
        )));
    }
    if z == 0.0 {
        return Ok(MlEvaluation::exact(gamma::recip_gamma(beta)));
    }
    let first = series::ml2_f64(alpha, beta, z, &control);
    if z > 0.0 || matches!(&first, Ok(e) if e.good_enough(control.rel_tol)) {
        return first;
    }
    let mut best = first;
    if beta > 0.0 {
        best = pick_better(best, series::ml2_dd(alpha, beta, z, &control));
        if matches!(&best, Ok(e) if e.good_enough(control.rel_tol)) {
            return best;
        }
        let inv = InversionEvaluator::new(&[alpha], &[z]).and_then(|ev| ev.eval(beta));
        best = pick_better(best, inv);
    }
    reject_lost(best)
}

/// `m`-th derivative `E^{(m)}_{α,β}(z) = Σ_k ((k+m)!/k!) z^k / Γ(α(k+m)+β)`.
///
/// Summed in double-double arithmetic.
pub fn ml2_deriv(alpha: f64, beta: f64, z: f64, m: usize) -> Result<f64> {
    ml2_deriv_eval(alpha, beta, z, m, SeriesControl::default()).map(|e| e.value)
}

pub fn ml2_deriv_eval(
    alpha: f64,
    beta: f64,
    z: f64,
    m: usize,
    control: SeriesControl,
) -> Result<MlEvaluation> {
    control.validate()?;
    if !(alpha > 0.0 && alpha.is_finite()) || !beta.is_finite() || !z.is_finite() {
        return Err(Error::domain(format!(
            "invalid Mittag-Leffler arguments alpha={alpha}, beta={beta}, z={z}"
        )));
    }
    series::ml2_deriv_dd(alpha, beta, z, m, &control)
}

/// Multinomial Mittag-Leffler function.
pub fn mml(query: &MlQuery, control: SeriesControl) -> Result<MlEvaluation> {
    query.validate()?;
    control.validate()?;
    let query = &query.canonical();
    if query.zs.iter().all(|&z| z == 0.0) {
        return Ok(MlEvaluation::exact(gamma::recip_gamma(query.beta)));
    }
    let admissible = query.inversion_admissible();
    let first = series::mml_f64(query, &control, admissible);
    if !admissible || matches!(&first, Ok(e) if e.good_enough(control.rel_tol)) {
        return reject_lost(first);
    }
    let inv = InversionEvaluator::new(&query.alphas, &query.zs).and_then(|ev| ev.eval(query.beta));
    reject_lost(pick_better(first, inv))
}

/// [`mml`] for several `β` sharing the same `(α_j, z_j)`; the inversion
/// contour and its poles are set up once.
pub fn mml_betas(
    alphas: &[f64],
    zs: &[f64],
    betas: &[f64],
    control: SeriesControl,
) -> Result<Vec<MlEvaluation>> {
    let canon = MlQuery::new(alphas.to_vec(), 1.0, zs.to_vec())?.canonical();
    let (alphas, zs) = (&canon.alphas[..], &canon.zs[..]);
    let mut inv: Option<Result<InversionEvaluator>> = None;
    betas
        .iter()
        .map(|&beta| {
            let query = MlQuery::new(alphas.to_vec(), beta, zs.to_vec())?;
            control.validate()?;
            if zs.iter().all(|&z| z == 0.0) {
                return Ok(MlEvaluation::exact(gamma::recip_gamma(beta)));
            }
            let admissible = query.inversion_admissible();
            let first = series::mml_f64(&query, &control, admissible);
            if !admissible || matches!(&first, Ok(e) if e.good_enough(control.rel_tol)) {
                return reject_lost(first);
            }
            let ev = inv.get_or_insert_with(|| InversionEvaluator::new(alphas, zs));
            let second = match ev {
                Ok(ev) => ev.eval(beta),
                Err(e) => Err(e.clone()),
            };
            reject_lost(pick_better(first, second))
        })
        .collect()
}

/// `d/dt [t^γ E_{(α),β+1}(q_1 t^{α_1}, ..)] = t^{γ−1} [E_{(α),β}(..) + (γ−β) E_{(α),β+1}(..)]`.
pub fn mml_t_derivative(
    gamma_exp: f64,
    alphas: &[f64],
    qs: &[f64],
    beta: f64,
    t: f64,
    control: SeriesControl,
) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::domain(format!("t must be > 0, got {t}")));
    }
    let zs: Vec<f64> = alphas
        .iter()
        .zip(qs)
        .map(|(a, q)| q * t.powf(*a))
        .collect();
    let pre = t.powf(gamma_exp - 1.0);
    if gamma_exp == beta {
        let e = mml(&MlQuery::new(alphas.to_vec(), beta, zs)?, control)?;
        return Ok(pre * e.value);
    }
    let e = mml_betas(alphas, &zs, &[beta, beta + 1.0], control)?;
    Ok(pre * (e[0].value + (gamma_exp - beta) * e[1].value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, PI};

    fn ctl() -> SeriesControl {
        SeriesControl::default()
    }

    #[test]
    fn ml2_elementary_cases() {
        assert!((ml2(1.0, 1.0, 1.0).unwrap() - E).abs() < 1e-15);
        assert_eq!(ml2(0.5, 1.0, 0.0).unwrap(), 1.0);
        assert!((ml2(0.7, 2.5, 0.0).unwrap() - 1.0 / gamma::gamma(2.5)).abs() < 1e-16);
        assert!(ml2(2.0, 1.0, -(PI / 2.0).powi(2)).unwrap().abs() < 1e-12);
    }

    #[test]
    fn ml2_exp_to_tight_relative_tolerance() {
        for i in 0..50 {
            let x = -5.0 + 10.0 * i as f64 / 49.0;
            let v = ml2(1.0, 1.0, x).unwrap();
            assert!(((v - x.exp()) / x.exp()).abs() < 1e-12, "x = {x}: {v}");
        }
    }

    #[test]
    fn ml2_known_closed_forms() {
        // E_{2,2}(-x^2) = sin(x)/x, E_{1,2}(z) = (e^z - 1)/z
        for x in [0.3f64, 1.0, 2.5, 4.0] {
            assert!((ml2(2.0, 2.0, -x * x).unwrap() - x.sin() / x).abs() < 1e-12);
        }
        for z in [-3.0f64, -0.2, 0.7, 2.0] {
            assert!((ml2(1.0, 2.0, z).unwrap() - z.exp_m1() / z).abs() < 1e-13);
        }
        // E_{1/2,1}(-x) = e^{x^2} erfc(x); erfc(1) e = 0.4275835761558070
        assert!((ml2(0.5, 1.0, -1.0).unwrap() - 0.427_583_576_155_807).abs() < 1e-13);
    }

    #[test]
    fn ml2_large_negative_argument_uses_inversion() {
        let e = ml2_eval(1.0, 1.0, -40.0, ctl()).unwrap();
        assert_eq!(e.method, MlMethod::Inversion);
        assert!((e.value - (-40f64).exp()).abs() < 1e-15);
        // E_{2,1}(-x^2) = cos x far beyond where the series cancels
        let x = 30.0f64;
        assert!((ml2(2.0, 1.0, -x * x).unwrap() - x.cos()).abs() < 1e-10);
    }

    #[test]
    fn ml2_beta_zero_convention() {
        // 1/Γ(0) = 0, so E_{1,0}(z) = z e^z
        assert_eq!(ml2(1.0, 0.0, 0.0).unwrap(), 0.0);
        let z = 0.5f64;
        assert!((ml2(1.0, 0.0, z).unwrap() - z * z.exp()).abs() < 1e-14);
    }

    #[test]
    fn ml2_positive_for_nonnegative_argument() {
        // E_{0.3,β}(10) ~ exp(10^{1/0.3}) is not representable
        for (a, b, zmax) in [(0.3, 0.5, 3.0), (1.0, 1.0, 10.0), (1.7, 2.2, 10.0)] {
            for z in [0.0, 0.1, 1.0, zmax] {
                assert!(ml2(a, b, z).unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn ml2_deriv_cases() {
        assert!((ml2_deriv(0.6, 1.3, -0.8, 0).unwrap() - ml2(0.6, 1.3, -0.8).unwrap()).abs() < 1e-15);
        for m in 0..5 {
            let z = -0.7f64;
            assert!((ml2_deriv(1.0, 1.0, z, m).unwrap() - z.exp()).abs() < 1e-15);
        }
        let h = 1e-6;
        let fd = (ml2(0.5, 1.0, -0.3 + h).unwrap() - ml2(0.5, 1.0, -0.3 - h).unwrap()) / (2.0 * h);
        let d = ml2_deriv(0.5, 1.0, -0.3, 1).unwrap();
        assert!(((d - fd) / d).abs() < 1e-6);
    }

    #[test]
    fn mml_reduces_to_ml2() {
        for (a, b, z) in [(0.7, 1.2, -2.0), (1.5, 0.8, -3.0), (0.4, 2.0, 1.5), (1.0, 1.0, -4.0)] {
            let q = MlQuery::new(vec![a], b, vec![z]).unwrap();
            let v = mml(&q, ctl()).unwrap().value;
            let w = ml2(a, b, z).unwrap();
            assert!(((v - w) / w).abs() < 1e-13, "({a},{b},{z}): {v} vs {w}");
        }
    }

    #[test]
    fn mml_zero_arguments() {
        let q = MlQuery::new(vec![1.5, 1.0, 0.5], 1.7, vec![0.0; 3]).unwrap();
        assert_eq!(mml(&q, ctl()).unwrap().value, 1.0 / gamma::gamma(1.7));
    }

    #[test]
    fn mml_zero_pairs_drop_out() {
        let q = MlQuery::new(vec![1.5, 1.0, 0.5], 1.5, vec![0.0, 0.0, -0.8]).unwrap();
        let v = mml(&q, ctl()).unwrap().value;
        assert!((v - ml2(0.5, 1.5, -0.8).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn mml_permutation_invariance() {
        let q = MlQuery::new(vec![1.5, 1.0, 0.5], 1.5, vec![-2.0, -1.0, -0.5]).unwrap();
        let v = mml(&q, ctl()).unwrap().value;
        for perm in [[0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            let w = mml(&q.permuted(&perm), ctl()).unwrap().value;
            assert!(((v - w) / v).abs() < 1e-13, "{perm:?}");
        }
    }

    #[test]
    fn mml_two_exponentials() {
        // E_{(1,1),1}(x, y) = e^{x+y}
        for (x, y) in [(-1.0f64, -2.0f64), (0.5, -0.25), (-6.0, -5.0)] {
            let q = MlQuery::new(vec![1.0, 1.0], 1.0, vec![x, y]).unwrap();
            let v = mml(&q, ctl()).unwrap().value;
            assert!(((v - (x + y).exp()) / (x + y).exp()).abs() < 1e-12, "({x},{y}): {v}");
        }
    }

    #[test]
    fn mml_t_derivative_cases() {
        let d = mml_t_derivative(1.0, &[1.5, 1.0], &[0.0, 0.0], 1.0, 0.7, ctl()).unwrap();
        assert!((d - 1.0).abs() < 1e-15);
        let alphas = [1.3, 0.6];
        let qs = [-1.2, -0.4];
        let (g, beta, t) = (0.8, 1.4, 0.9);
        let f = |t: f64| {
            let zs: Vec<f64> = alphas.iter().zip(&qs).map(|(a, q)| q * t.powf(*a)).collect();
            t.powf(g) * mml(&MlQuery::new(alphas.to_vec(), beta + 1.0, zs).unwrap(), ctl()).unwrap().value
        };
        let h = 1e-5;
        let fd = (f(t + h) - f(t - h)) / (2.0 * h);
        let d = mml_t_derivative(g, &alphas, &qs, beta, t, ctl()).unwrap();
        assert!(((d - fd) / d).abs() < 1e-6, "{d} vs {fd}");
        assert!(mml_t_derivative(g, &alphas, &qs, beta, 0.0, ctl()).is_err());
    }

    #[test]
    fn query_validation() {
        assert!(MlQuery::new(vec![1.0], 1.0, vec![]).is_err());
        assert!(MlQuery::new(vec![], 1.0, vec![]).is_err());
        assert!(MlQuery::new(vec![0.0], 1.0, vec![1.0]).is_err());
        assert!(MlQuery::new(vec![1.0], f64::NAN, vec![1.0]).is_err());
    }

    #[test]
    fn degree_cap_is_reported() {
        let c = SeriesControl {
            max_total_degree: 5,
            ..SeriesControl::default()
        };
        let err = ml2_eval(1.0, 1.0, 3.0, c).unwrap_err();
        assert!(err.is_convergence());
    }
}
