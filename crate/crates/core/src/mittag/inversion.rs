//! Laplace inversion for Mittag-Leffler functions with non-positive arguments.
//!
//! For `z_j ≤ 0` and `β > 0`,
//!
//! ```text
//! E_{(α),β}(z_1..z_m) = L^{-1}[ s^{-β} / (1 + Σ |z_j| s^{-α_j}) ](t = 1)
//! ```
//!
//! The Bromwich integral is deformed onto the parabola `s(u) = μ(1 + iu)²`
//! and discretised with the trapezoid rule, which converges geometrically.
//! The denominator `h(s)` has zeros off the branch cut only when some
//! `α_j > 1`; those lying between the Bromwich line and the parabola add
//! their residues. `μ` is chosen so that no zero sits close to the contour.

use num_complex::Complex64 as C64;
use std::f64::consts::PI;

use super::{MlEvaluation, MlMethod};
use crate::error::{Error, Result};
use crate::gamma;

const STEP: f64 = 0.08;
/// Contour truncated where `Re s = μ(1 − u²) < −DECAY`.
const DECAY: f64 = 40.0;
/// Required distance of every pole from the contour in the `√(s/μ)` plane.
const POLE_CLEARANCE: f64 = 0.5;

/// Contour and pole set for fixed `(α_j, z_j)`, reusable across `β`.
#[derive(Debug, Clone)]
pub struct InversionEvaluator {
    alphas: Vec<f64>,
    weights: Vec<f64>,
    poles: Vec<C64>,
    mu: f64,
}

impl InversionEvaluator {
    pub fn new(alphas: &[f64], zs: &[f64]) -> Result<Self> {
        if alphas.len() != zs.len() {
            return Err(Error::domain("exponent/argument length mismatch"));
        }
        if zs.iter().any(|&z| !(z <= 0.0)) {
            return Err(Error::domain("Laplace inversion needs every argument <= 0"));
        }
        let (alphas, weights): (Vec<f64>, Vec<f64>) = alphas
            .iter()
            .zip(zs)
            .filter(|(_, z)| **z != 0.0)
            .map(|(a, z)| (*a, -z))
            .unzip();
        let mut ev = InversionEvaluator {
            alphas,
            weights,
            poles: Vec::new(),
            mu: 1.0,
        };
        ev.poles = ev.find_poles();
        ev.mu = pick_mu(&ev.poles);
        Ok(ev)
    }

    /// Zeros of the denominator in the upper half plane.
    pub fn poles(&self) -> &[C64] {
        &self.poles
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    fn denom(&self, s: C64) -> C64 {
        self.alphas
            .iter()
            .zip(&self.weights)
            .fold(C64::new(1.0, 0.0), |acc, (a, w)| acc + *w * s.powf(-a))
    }

    fn denom_deriv(&self, s: C64) -> C64 {
        self.alphas
            .iter()
            .zip(&self.weights)
            .fold(C64::new(0.0, 0.0), |acc, (a, w)| acc - *w * *a * s.powf(-a - 1.0))
    }

    fn find_poles(&self) -> Vec<C64> {
        let alpha_max = self.alphas.iter().cloned().fold(0.0, f64::max);
        if alpha_max <= 1.0 {
            return Vec::new();
        }
        let mut seeds: Vec<C64> = self
            .alphas
            .iter()
            .zip(&self.weights)
            .filter(|(a, _)| **a > 1.0)
            .map(|(a, w)| C64::from_polar(w.powf(1.0 / a), PI / a))
            .collect();
        let radius: f64 = self
            .alphas
            .iter()
            .zip(&self.weights)
            .map(|(a, w)| w.powf(1.0 / a))
            .sum();
        let (r_lo, r_hi) = (1e-2 * radius.max(1e-3), 10.0 * radius.max(1.0));
        for i in 0..16 {
            let r = r_lo * (r_hi / r_lo).powf(i as f64 / 15.0);
            for j in 0..8 {
                let th = PI / alpha_max + (0.999 * PI - PI / alpha_max) * j as f64 / 7.0;
                seeds.push(C64::from_polar(r, th));
            }
        }
        let mut found: Vec<C64> = Vec::new();
        for seed in seeds {
            if let Some(p) = self.newton(seed) {
                if p.im > 0.0 && found.iter().all(|q| (p - q).norm() > 1e-8 * p.norm()) {
                    found.push(p);
                }
            }
        }
        found
    }

    fn newton(&self, mut s: C64) -> Option<C64> {
        for _ in 0..100 {
            let d = self.denom_deriv(s);
            if d.norm() == 0.0 || !d.is_finite() {
                return None;
            }
            let step = self.denom(s) / d;
            s -= step;
            if s.norm() == 0.0 || s.arg().abs() >= PI || !s.is_finite() {
                return None;
            }
            if step.norm() < 1e-15 * s.norm() {
                let scale = 1.0
                    + self
                        .alphas
                        .iter()
                        .zip(&self.weights)
                        .map(|(a, w)| w * s.norm().powf(-a))
                        .sum::<f64>();
                return (self.denom(s).norm() < 1e-10 * scale).then_some(s);
            }
        }
        None
    }

    /// `E_{(α),β}(z..)` for `β > 0`.
    pub fn eval(&self, beta: f64) -> Result<MlEvaluation> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::domain(format!("Laplace inversion needs beta > 0, got {beta}")));
        }
        if self.weights.is_empty() {
            return Ok(MlEvaluation {
                value: gamma::recip_gamma(beta),
                terms_used: 1,
                tail_estimate: 0.0,
                method: MlMethod::Inversion,
                error_estimate: 0.0,
            });
        }
        let mu = self.mu;
        let u_max = (1.0 + DECAY / mu).sqrt();
        let n = (u_max / STEP).ceil() as i64;
        let mut total = C64::new(0.0, 0.0);
        let mut scale = 0.0;
        let mut edge = 0.0;
        for k in -n..=n {
            let w = C64::new(1.0, k as f64 * STEP);
            let s = mu * w * w;
            let ds = C64::new(0.0, 2.0 * mu) * w;
            let f = s.exp() * s.powf(-beta) / self.denom(s) * ds;
            if !f.is_finite() {
                return Err(Error::Overflow("non-finite contour integrand".into()));
            }
            total += f;
            scale += f.norm();
            if k.abs() == n {
                edge += f.norm();
            }
        }
        let factor = STEP / (2.0 * PI);
        let mut value = (total * factor / C64::new(0.0, 1.0)).re;
        scale *= factor;
        for p in &self.poles {
            let u = p.im / (2.0 * mu);
            if p.re > mu * (1.0 - u * u) {
                let r = p.exp() * p.powf(-beta) / self.denom_deriv(*p);
                value += 2.0 * r.re;
                scale += 2.0 * r.norm();
            }
        }
        let tail = edge * factor;
        Ok(MlEvaluation {
            value,
            terms_used: (2 * n + 1) as usize,
            tail_estimate: tail,
            method: MlMethod::Inversion,
            error_estimate: 4.0 * f64::EPSILON * scale + tail,
        })
    }
}

/// Contour parameter from the grid `2^{k/2}`, `|k| ≤ 12`: the feasible value
/// closest to 1, or the one with the most clearance if none is feasible.
fn pick_mu(poles: &[C64]) -> f64 {
    let clearance = |mu: f64| {
        poles
            .iter()
            .map(|p| (1.0 - (p / mu).sqrt().re).abs())
            .fold(f64::INFINITY, f64::min)
    };
    let grid: Vec<f64> = (-12..=12).map(|k| 2f64.powf(k as f64 / 2.0)).collect();
    grid.iter()
        .cloned()
        .filter(|&mu| clearance(mu) >= POLE_CLEARANCE)
        .min_by(|a, b| a.ln().abs().total_cmp(&b.ln().abs()))
        .unwrap_or_else(|| {
            grid.iter()
                .cloned()
                .max_by(|a, b| clearance(*a).total_cmp(&clearance(*b)))
                .expect("non-empty grid")
        })
}
