//! Power-series evaluators. Terms are built as `sign · exp(log-magnitude)`.

use super::{MlEvaluation, MlMethod, MlQuery, SeriesControl};
use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::gamma;

const EPS: f64 = f64::EPSILON;
const EPS_DD: f64 = 1e-31;
const MAX_LN: f64 = 709.0;
/// Once a cancelling series has produced a term this large it has lost at
/// least eight digits; the caller has a better method available.
const ABANDON_TERM: f64 = 1e8;

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub(super) struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub(super) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(super) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `ln(n!)` in double-double, grown on demand.
#[derive(Debug, Clone)]
pub(super) struct LnFactDd(Vec<Dd>);

impl LnFactDd {
    pub(super) fn new() -> Self {
        LnFactDd(vec![Dd::ZERO, Dd::ZERO])
    }

    pub(super) fn get(&mut self, n: usize) -> Dd {
        while self.0.len() <= n {
            let j = self.0.len();
            let next = self.0[j - 1] + Dd::new(j as f64).ln();
            self.0.push(next);
        }
        self.0[n]
    }
}

/// Smallest degree from which every Gamma argument `β + α_min·k` is positive;
/// before that, zero terms at Gamma poles must not count as convergence.
fn first_regular_degree(beta: f64, alpha_min: f64) -> usize {
    if beta > 0.0 {
        0
    } else {
        (-beta / alpha_min).floor() as usize + 1
    }
}

struct Stopper {
    rel_tol: f64,
    guard: usize,
    from: usize,
    quiet: usize,
    max_term: f64,
}

impl Stopper {
    fn new(control: &SeriesControl, from: usize) -> Self {
        Stopper {
            rel_tol: control.rel_tol,
            guard: control.underflow_guard.max(1),
            from,
            quiet: 0,
            max_term: 0.0,
        }
    }

    /// Feed one degree block; true once `guard` consecutive blocks were negligible.
    fn done(&mut self, k: usize, block: f64, partial: f64, noise: f64) -> bool {
        let b = block.abs();
        let negligible = b <= self.rel_tol * partial.abs() || b <= 1e-3 * noise * self.max_term;
        if k >= self.from && negligible {
            self.quiet += 1;
        } else {
            self.quiet = 0;
        }
        self.quiet >= self.guard
    }
}

fn convergence(what: &str, terms: usize, tail: f64) -> Error {
    Error::Convergence {
        what: what.to_string(),
        terms,
        tail,
    }
}

pub(super) fn ml2_f64(alpha: f64, beta: f64, z: f64, control: &SeriesControl) -> Result<MlEvaluation> {
    let ln_z = z.abs().ln();
    let neg = z < 0.0;
    let mut sum = Neumaier::default();
    let mut err = 0.0;
    let mut stop = Stopper::new(control, first_regular_degree(beta, alpha));
    let mut last = 0.0;
    for k in 0..=control.max_total_degree {
        let (lr, sg) = gamma::ln_recip_gamma(beta + alpha * k as f64);
        let term = if sg == 0 {
            0.0
        } else {
            let l = k as f64 * ln_z + lr;
            if l > MAX_LN {
                return Err(Error::Overflow(format!("E_{{{alpha},{beta}}}({z}): term {k} overflows")));
            }
            let s = if neg && k % 2 == 1 { -sg } else { sg };
            err += l.exp() * (2.0 + l.abs()) * EPS;
            s as f64 * l.exp()
        };
        sum.add(term);
        stop.max_term = stop.max_term.max(term.abs());
        last = term.abs();
        if stop.done(k, term, sum.value(), EPS) {
            return Ok(MlEvaluation {
                value: sum.value(),
                terms_used: k + 1,
                tail_estimate: last,
                method: MlMethod::Series,
                error_estimate: err + last,
            });
        }
    }
    Err(convergence(
        &format!("E_{{{alpha},{beta}}}({z}) series"),
        control.max_total_degree + 1,
        last,
    ))
}

/// Double-double variant of [`ml2_f64`]; requires `β > 0`.
pub(super) fn ml2_dd(alpha: f64, beta: f64, z: f64, control: &SeriesControl) -> Result<MlEvaluation> {
    debug_assert!(beta > 0.0);
    let ln_z = Dd::new(z.abs()).ln();
    let (a, b) = (Dd::new(alpha), Dd::new(beta));
    let neg = z < 0.0;
    let mut sum = Dd::ZERO;
    let mut abs_sum = 0.0;
    let mut stop = Stopper::new(control, 0);
    let mut last = 0.0;
    for k in 0..=control.max_total_degree {
        let l = ln_z * k as f64 - (b + a * k as f64).ln_gamma();
        if l.hi > MAX_LN {
            return Err(Error::Overflow(format!("E_{{{alpha},{beta}}}({z}): term {k} overflows")));
        }
        let mut term = l.exp();
        if neg && k % 2 == 1 {
            term = -term;
        }
        sum = sum + term;
        abs_sum += term.hi.abs();
        stop.max_term = stop.max_term.max(term.hi.abs());
        last = term.hi.abs();
        if stop.done(k, term.hi, sum.hi, EPS_DD) {
            return Ok(MlEvaluation {
                value: sum.to_f64(),
                terms_used: k + 1,
                tail_estimate: last,
                method: MlMethod::SeriesDd,
                error_estimate: abs_sum * EPS_DD + last + sum.to_f64().abs() * EPS * 0.5,
            });
        }
    }
    Err(convergence(
        &format!("E_{{{alpha},{beta}}}({z}) double-double series"),
        control.max_total_degree + 1,
        last,
    ))
}

/// `Σ_k ((k+m)!/k!) z^k / Γ(α(k+m)+β)`, returned as a double-double sum with
/// its term-magnitude scale (for absolute error bookkeeping).
pub(super) fn ml2_deriv_sum(
    alpha: f64,
    beta: f64,
    z: f64,
    m: usize,
    control: &SeriesControl,
    lnfact: &mut LnFactDd,
) -> Result<(Dd, f64, usize, f64)> {
    let ln_z = if z == 0.0 { Dd::ZERO } else { Dd::new(z.abs()).ln() };
    let (a, b) = (Dd::new(alpha), Dd::new(beta));
    let neg = z < 0.0;
    let mut sum = Dd::ZERO;
    let mut abs_sum = 0.0;
    let mut stop = Stopper::new(control, first_regular_degree(beta + alpha * m as f64, alpha));
    let mut last = 0.0;
    for k in 0..=control.max_total_degree {
        if z == 0.0 && k > 0 {
            return Ok((sum, abs_sum, k, 0.0));
        }
        let arg = b + a * (k + m) as f64;
        let falling = lnfact.get(k + m) - lnfact.get(k);
        let (lr, sg) = if arg.hi > 0.0 {
            (-arg.ln_gamma(), 1)
        } else {
            let (lr, sg) = gamma::ln_recip_gamma(arg.to_f64());
            (Dd::new(lr), sg)
        };
        let term = if sg == 0 || lr.hi == f64::NEG_INFINITY {
            Dd::ZERO
        } else {
            let l = falling + ln_z * k as f64 + lr;
            if l.hi > MAX_LN {
                return Err(Error::Overflow(format!(
                    "E^({m})_{{{alpha},{beta}}}({z}): term {k} overflows"
                )));
            }
            let s = if neg && k % 2 == 1 { -sg } else { sg };
            l.exp() * s as f64
        };
        sum = sum + term;
        abs_sum += term.hi.abs();
        stop.max_term = stop.max_term.max(term.hi.abs());
        last = term.hi.abs();
        if stop.done(k, term.hi, sum.hi, EPS_DD) {
            return Ok((sum, abs_sum, k + 1, last));
        }
    }
    Err(convergence(
        &format!("E^({m})_{{{alpha},{beta}}}({z}) series"),
        control.max_total_degree + 1,
        last,
    ))
}

pub(super) fn ml2_deriv_dd(
    alpha: f64,
    beta: f64,
    z: f64,
    m: usize,
    control: &SeriesControl,
) -> Result<MlEvaluation> {
    let mut lnfact = LnFactDd::new();
    let (sum, abs_sum, terms, tail) = ml2_deriv_sum(alpha, beta, z, m, control, &mut lnfact)?;
    Ok(MlEvaluation {
        value: sum.to_f64(),
        terms_used: terms,
        tail_estimate: tail,
        method: MlMethod::SeriesDd,
        error_estimate: abs_sum * EPS_DD + tail + sum.to_f64().abs() * EPS * 0.5,
    })
}

/// Advance `ks` to the next composition of `Σ ks` into `ks.len()` parts,
/// starting from `[k, 0, .., 0]`. Returns false after the last one.
fn next_composition(ks: &mut [usize]) -> bool {
    let m = ks.len();
    if m < 2 {
        return false;
    }
    let last = ks[m - 1];
    ks[m - 1] = 0;
    match (0..m - 1).rev().find(|&j| ks[j] > 0) {
        Some(j) => {
            ks[j] -= 1;
            ks[j + 1] = last + 1;
            true
        }
        None => false,
    }
}

/// Multinomial series in `f64`. With `abandonable`, a cancelling series whose
/// terms exceed [`ABANDON_TERM`] is given up early (the caller falls back to
/// inversion).
pub(super) fn mml_f64(query: &MlQuery, control: &SeriesControl, abandonable: bool) -> Result<MlEvaluation> {
    // pairs with z_j = 0 only contribute through k_j = 0
    let (alphas, zs): (Vec<f64>, Vec<f64>) = query
        .alphas
        .iter()
        .zip(&query.zs)
        .filter(|(_, z)| **z != 0.0)
        .map(|(a, z)| (*a, *z))
        .unzip();
    let beta = query.beta;
    let m = alphas.len();
    let ln_z: Vec<f64> = zs.iter().map(|z| z.abs().ln()).collect();
    let alpha_min = alphas.iter().cloned().fold(f64::INFINITY, f64::min);
    let cancelling = zs.iter().any(|&z| z < 0.0);
    let lnfact: Vec<f64> = (0..=control.max_total_degree).map(gamma::ln_factorial).collect();

    let mut sum = Neumaier::default();
    let mut err = 0.0;
    let mut stop = Stopper::new(control, first_regular_degree(beta, alpha_min));
    let mut last = 0.0;
    let mut ks = vec![0usize; m];
    for k in 0..=control.max_total_degree {
        ks.iter_mut().for_each(|x| *x = 0);
        ks[0] = k;
        let mut block = Neumaier::default();
        loop {
            let arg = beta + alphas.iter().zip(&ks).map(|(a, &kj)| a * kj as f64).sum::<f64>();
            let (lr, sg) = gamma::ln_recip_gamma(arg);
            if sg != 0 {
                let mut l = lnfact[k] + lr;
                let mut s = sg;
                for j in 0..m {
                    l += ks[j] as f64 * ln_z[j] - lnfact[ks[j]];
                    if zs[j] < 0.0 && ks[j] % 2 == 1 {
                        s = -s;
                    }
                }
                if l > MAX_LN {
                    return Err(Error::Overflow(format!("multinomial term of degree {k} overflows")));
                }
                let mag = l.exp();
                block.add(s as f64 * mag);
                err += mag * (2.0 + l.abs() + m as f64) * EPS;
                stop.max_term = stop.max_term.max(mag);
            }
            if !next_composition(&mut ks) {
                break;
            }
        }
        let b = block.value();
        sum.add(b);
        last = b.abs();
        if abandonable && cancelling && stop.max_term > ABANDON_TERM {
            return Err(Error::Overflow(format!(
                "series abandoned at degree {k}: terms reach {:e}",
                stop.max_term
            )));
        }
        if stop.done(k, b, sum.value(), EPS) {
            return Ok(MlEvaluation {
                value: sum.value(),
                terms_used: k + 1,
                tail_estimate: last,
                method: MlMethod::Series,
                error_estimate: err + last,
            });
        }
    }
    Err(convergence(
        "multinomial Mittag-Leffler series",
        control.max_total_degree + 1,
        last,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compositions_are_enumerated_once() {
        for m in 1..=4 {
            for k in 0..8 {
                let mut ks = vec![0; m];
                ks[0] = k;
                let mut seen = std::collections::HashSet::new();
                loop {
                    assert_eq!(ks.iter().sum::<usize>(), k);
                    assert!(seen.insert(ks.clone()));
                    if !next_composition(&mut ks) {
                        break;
                    }
                }
                // C(k + m - 1, m - 1)
                let want = (1..m).fold(1usize, |acc, j| acc * (k + j) / j);
                assert_eq!(seen.len(), want, "m = {m}, k = {k}");
            }
        }
    }

    #[test]
    fn neumaier_recovers_small_addends() {
        let mut s = Neumaier::default();
        s.add(1.0);
        s.add(1e-17);
        s.add(-1.0);
        assert!((s.value() - 1e-17).abs() < 1e-30);
    }

    #[test]
    fn double_double_series_beats_cancellation() {
        let c = SeriesControl::default();
        let v = ml2_dd(1.0, 1.0, -20.0, &c).unwrap();
        assert!(((v.value - (-20f64).exp()) / (-20f64).exp()).abs() < 1e-13);
        let f = ml2_f64(1.0, 1.0, -20.0, &c).unwrap();
        assert!(f.error_estimate > v.error_estimate);
    }

    #[test]
    fn abandoned_series_reports_overflow_class() {
        let q = MlQuery::new(vec![1.5, 1.0, 0.5], 1.0, vec![-1e4, -1.0, -0.5]).unwrap();
        let e = mml_f64(&q, &SeriesControl::default(), true).unwrap_err();
        assert!(e.is_convergence());
    }
}
