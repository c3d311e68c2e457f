//! Explicit 1D solution on `(0, L)` with constant conductivity `k̄`:
//!
//! ```text
//! u(x,t) = Σ_n X_n(x) [ c_n T_n¹(t) + d_n T_n²(t) ],   X_n = √(2/L) sin(nπx/L)
//! σ_n = a + k̄ (nπ/L)²,   c_n = (U0, X_n),   d_n = (V0, X_n)
//! ```
//!
//! with time factors built from `E_(α+1,1,α),β` at the argument triple of
//! [`SplCoefficients`]:
//!
//! ```text
//! T¹  = 1 − s t^{α+1} E_{α+2}      (T¹)' = −s t^α E_{α+1}      s = σ/(ρcτ_q^α)
//! T²  = t E_2                      (T²)' = E_1
//! ```

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fracops::{self, SampledPath, TimeGrid};
use crate::mittag::{mml, mml_betas, SeriesControl, SplCoefficients};
use crate::params::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralConfig {
    pub length: f64,
    pub k_bar: f64,
    pub params: ModelParams,
    pub n_modes: usize,
    pub quad_points: usize,
}

impl SpectralConfig {
    /// Uses the default quadrature resolution `max(1024, 20 N)`.
    pub fn new(length: f64, k_bar: f64, params: ModelParams, n_modes: usize) -> Result<Self> {
        let cfg = SpectralConfig {
            length,
            k_bar,
            params,
            n_modes,
            quad_points: Self::default_quad_points(n_modes),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn default_quad_points(n_modes: usize) -> usize {
        1024.max(20 * n_modes)
    }

    pub fn with_quad_points(mut self, quad_points: usize) -> Self {
        self.quad_points = quad_points;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(Error::domain(format!("domain length must be > 0, got {}", self.length)));
        }
        if !(self.k_bar > 0.0 && self.k_bar.is_finite()) {
            return Err(Error::domain(format!("conductivity must be > 0, got {}", self.k_bar)));
        }
        if self.n_modes == 0 {
            return Err(Error::domain("at least one mode is required"));
        }
        if self.quad_points < 3 {
            return Err(Error::domain("at least 3 quadrature points are required"));
        }
        Ok(())
    }

    /// `σ_n = a + k̄ (nπ/L)²`.
    pub fn sigma(&self, n: usize) -> f64 {
        let w = n as f64 * PI / self.length;
        self.params.a + self.k_bar * w * w
    }

    /// Quadrature nodes `x_j = j L/(Q−1)`, endpoints included.
    pub fn quad_grid(&self) -> Vec<f64> {
        let q = self.quad_points;
        (0..q)
            .map(|j| {
                if j + 1 == q {
                    self.length
                } else {
                    j as f64 * self.length / (q - 1) as f64
                }
            })
            .collect()
    }

    fn check_resolution(&self) -> Result<()> {
        let required = 10 * self.n_modes;
        if self.quad_points < required {
            Err(Error::Resolution {
                points: self.quad_points,
                modes: self.n_modes,
                required,
            })
        } else {
            Ok(())
        }
    }
}

/// `X_n(x) = √(2/L) sin(nπx/L)`.
pub fn eigenfunction(n: usize, length: f64, x: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("modes are numbered from 1"));
    }
    if !(length > 0.0) {
        return Err(Error::domain(format!("domain length must be > 0, got {length}")));
    }
    if !(0.0..=length).contains(&x) {
        return Err(Error::domain(format!("x = {x} outside [0, {length}]")));
    }
    Ok((2.0 / length).sqrt() * (n as f64 * PI * x / length).sin())
}

/// Composite trapezoid approximation of `∫_0^L f X_n dx` from samples on
/// [`SpectralConfig::quad_grid`].
pub fn fourier_coefficient(f: &[f64], n: usize, config: &SpectralConfig) -> Result<f64> {
    config.check_resolution()?;
    if f.len() != config.quad_points {
        return Err(Error::domain(format!(
            "{} samples for {} quadrature points",
            f.len(),
            config.quad_points
        )));
    }
    let xs = config.quad_grid();
    let h = config.length / (config.quad_points - 1) as f64;
    let mut acc = 0.0;
    for (j, (fx, x)) in f.iter().zip(&xs).enumerate() {
        let w = if j == 0 || j + 1 == xs.len() { 0.5 } else { 1.0 };
        acc += w * fx * eigenfunction(n, config.length, *x)?;
    }
    Ok(acc * h)
}

fn coeff(sigma: f64, params: &ModelParams) -> Result<SplCoefficients> {
    SplCoefficients::new(*params, sigma)
}

fn check_t(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("t must be >= 0, got {t}")))
    }
}

fn e_at(c: &SplCoefficients, t: f64, beta: f64) -> Result<f64> {
    Ok(mml(&c.query(t, beta), SeriesControl::default())?.value)
}

/// `T_n¹(t) = 1 − s t^{α+1} E_{(α+1,1,α),α+2}(..)`.
pub fn t_factor_1(t: f64, sigma: f64, params: &ModelParams) -> Result<f64> {
    check_t(t)?;
    if t == 0.0 {
        return Ok(1.0);
    }
    let c = coeff(sigma, params)?;
    let s = sigma / (params.rho_c() * params.tau_q_alpha);
    Ok(1.0 - s * t.powf(params.alpha + 1.0) * e_at(&c, t, params.alpha + 2.0)?)
}

/// `T_n¹` in its unreduced form `E_1 + (a/ρc) t E_2 + (t^α/τ_q^α) E_{α+1}`.
pub fn t_factor_1_three_term(t: f64, sigma: f64, params: &ModelParams) -> Result<f64> {
    check_t(t)?;
    let c = coeff(sigma, params)?;
    let e = mml_betas(
        &c.alphas(),
        &c.arguments(t),
        &[1.0, 2.0, params.alpha + 1.0],
        SeriesControl::default(),
    )?;
    Ok(e[0].value
        + params.a / params.rho_c() * t * e[1].value
        + t.powf(params.alpha) / params.tau_q_alpha * e[2].value)
}

/// `T_n²(t) = t E_{(α+1,1,α),2}(..)`.
pub fn t_factor_2(t: f64, sigma: f64, params: &ModelParams) -> Result<f64> {
    check_t(t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let c = coeff(sigma, params)?;
    Ok(t * e_at(&c, t, 2.0)?)
}

/// `(T_n¹)'(t) = −s t^α E_{(α+1,1,α),α+1}(..)`.
pub fn dt_factor_1(t: f64, sigma: f64, params: &ModelParams) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("t must be > 0, got {t}")));
    }
    let c = coeff(sigma, params)?;
    let s = sigma / (params.rho_c() * params.tau_q_alpha);
    Ok(-s * t.powf(params.alpha) * e_at(&c, t, params.alpha + 1.0)?)
}

/// `(T_n²)'(t) = E_{(α+1,1,α),1}(..)`.
pub fn dt_factor_2(t: f64, sigma: f64, params: &ModelParams) -> Result<f64> {
    check_t(t)?;
    if t == 0.0 {
        return Ok(1.0);
    }
    let c = coeff(sigma, params)?;
    e_at(&c, t, 1.0)
}

/// All four time factors of one mode at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeFactors {
    pub t1: f64,
    pub t2: f64,
    pub dt1: f64,
    pub dt2: f64,
}

/// `T¹, T², (T¹)', (T²)'` sharing one Mittag-Leffler setup.
pub fn mode_factors(t: f64, sigma: f64, params: &ModelParams) -> Result<ModeFactors> {
    check_t(t)?;
    if t == 0.0 {
        return Ok(ModeFactors {
            t1: 1.0,
            t2: 0.0,
            dt1: 0.0,
            dt2: 1.0,
        });
    }
    let c = coeff(sigma, params)?;
    let a = params.alpha;
    let e = mml_betas(
        &c.alphas(),
        &c.arguments(t),
        &[a + 2.0, 2.0, a + 1.0, 1.0],
        SeriesControl::default(),
    )?;
    let s = sigma / (params.rho_c() * params.tau_q_alpha);
    let ta = t.powf(a);
    Ok(ModeFactors {
        t1: 1.0 - s * ta * t * e[0].value,
        t2: t * e[1].value,
        dt1: -s * ta * e[2].value,
        dt2: e[3].value,
    })
}

/// Supremum of `r^{1/2} t^α / (1 + r t^{α+1})` over `r ≥ 0`, `t ∈ [t_min, T]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MTilde {
    pub value: f64,
    /// Where on the `t`-grid the supremum is attained.
    pub t_at: f64,
    /// The inner maximum `t^{(α−1)/2}/2` grows without bound as `t → 0`, so
    /// the value over the closed region `[0, T]` is infinite; this flag marks
    /// that the reported number depends on `t_min`.
    pub attained_at_lower_cutoff: bool,
}

/// `r^{1/2} t^α / (1 + r t^{α+1})`.
pub fn m_tilde_objective(alpha: f64, r: f64, t: f64) -> f64 {
    r.sqrt() * t.powf(alpha) / (1.0 + r * t.powf(alpha + 1.0))
}

/// Inner maximum over `r` at fixed `t > 0`: attained at `r* = t^{−(α+1)}`, value `t^{(α−1)/2}/2`.
pub fn m_tilde_inner(alpha: f64, t: f64) -> f64 {
    0.5 * t.powf(0.5 * (alpha - 1.0))
}

/// `M̃` over `t ∈ [t_min, T]` on a 512-point log grid.
pub fn m_tilde(alpha: f64, final_time: f64, t_min: f64) -> Result<MTilde> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha must lie in (0,1), got {alpha}")));
    }
    if !(final_time > 0.0 && t_min > 0.0 && t_min <= final_time) {
        return Err(Error::domain(format!(
            "need 0 < t_min <= T, got t_min = {t_min}, T = {final_time}"
        )));
    }
    let n = 512;
    let mut best = (f64::NEG_INFINITY, t_min);
    for i in 0..n {
        let t = t_min * (final_time / t_min).powf(i as f64 / (n - 1) as f64);
        let v = m_tilde_inner(alpha, t);
        if v > best.0 {
            best = (v, t);
        }
    }
    Ok(MTilde {
        value: best.0,
        t_at: best.1,
        attained_at_lower_cutoff: best.1 == t_min,
    })
}

/// Mode data `σ_n, c_n, d_n` for `n = 1..N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralModel {
    pub config: SpectralConfig,
    pub sigma: Vec<f64>,
    pub c: Vec<f64>,
    pub d: Vec<f64>,
    pub warnings: Vec<String>,
}

impl SpectralModel {
    /// From `U0`, `V0` sampled on [`SpectralConfig::quad_grid`].
    pub fn new(config: SpectralConfig, u0: &[f64], v0: &[f64]) -> Result<Self> {
        config.validate()?;
        let mut warnings = Vec::new();
        let recommended = SpectralConfig::default_quad_points(config.n_modes);
        if config.quad_points < recommended {
            warnings.push(format!(
                "{} quadrature points is below the recommended {recommended}",
                config.quad_points
            ));
        }
        let edge = u0.first().map_or(0.0, |v| v.abs()) + u0.last().map_or(0.0, |v| v.abs());
        if edge > 1e-12 * (1.0 + u0.iter().fold(0.0f64, |m, v| m.max(v.abs()))) {
            warnings.push("U0 does not vanish at the boundary".into());
        }
        let n = config.n_modes;
        let sigma = (1..=n).map(|k| config.sigma(k)).collect();
        let c = (1..=n)
            .map(|k| fourier_coefficient(u0, k, &config))
            .collect::<Result<Vec<_>>>()?;
        let d = (1..=n)
            .map(|k| fourier_coefficient(v0, k, &config))
            .collect::<Result<Vec<_>>>()?;
        Ok(SpectralModel {
            config,
            sigma,
            c,
            d,
            warnings,
        })
    }

    /// Samples `U0`, `V0` on the quadrature grid.
    pub fn from_fns(
        config: SpectralConfig,
        u0: impl Fn(f64) -> f64,
        v0: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let xs = config.quad_grid();
        let us: Vec<f64> = xs.iter().map(|&x| u0(x)).collect();
        let vs: Vec<f64> = xs.iter().map(|&x| v0(x)).collect();
        SpectralModel::new(config, &us, &vs)
    }

    pub fn n_modes(&self) -> usize {
        self.sigma.len()
    }

    /// `T_n(t) = c_n T_n¹ + d_n T_n²` and its derivative, `n` 1-based.
    pub fn mode_time_function(&self, n: usize, t: f64) -> Result<(f64, f64)> {
        let f = mode_factors(t, self.sigma[n - 1], &self.config.params)?;
        let (c, d) = (self.c[n - 1], self.d[n - 1]);
        Ok((c * f.t1 + d * f.t2, c * f.dt1 + d * f.dt2))
    }

    /// `T_n(t_i)`, `T_n'(t_i)` for every mode and time, modes in parallel.
    pub fn time_functions(&self, ts: &[f64]) -> Result<Vec<Vec<(f64, f64)>>> {
        for &t in ts {
            check_t(t)?;
        }
        (1..=self.n_modes())
            .into_par_iter()
            .map(|n| {
                if self.c[n - 1] == 0.0 && self.d[n - 1] == 0.0 {
                    return Ok(vec![(0.0, 0.0); ts.len()]);
                }
                ts.iter().map(|&t| self.mode_time_function(n, t)).collect()
            })
            .collect()
    }

    /// Evaluate on `xs × ts`.
    pub fn solve(&self, xs: &[f64], ts: &[f64]) -> Result<SpectralSolution> {
        let len = self.config.length;
        let basis: Vec<Vec<f64>> = (1..=self.n_modes())
            .map(|n| xs.iter().map(|&x| eigenfunction(n, len, x)).collect())
            .collect::<Result<_>>()?;
        let tf = self.time_functions(ts)?;
        let mut u = vec![vec![0.0; xs.len()]; ts.len()];
        let mut dtu = vec![vec![0.0; xs.len()]; ts.len()];
        let mut u_norm = vec![0.0; ts.len()];
        let mut dtu_norm = vec![0.0; ts.len()];
        // fixed mode order keeps the reduction deterministic
        for (n, modes) in tf.iter().enumerate() {
            for (it, &(tn, dtn)) in modes.iter().enumerate() {
                u_norm[it] += tn * tn;
                dtu_norm[it] += dtn * dtn;
                for (ix, x) in basis[n].iter().enumerate() {
                    u[it][ix] += x * tn;
                    dtu[it][ix] += x * dtn;
                }
            }
        }
        u_norm.iter_mut().for_each(|v| *v = v.sqrt());
        dtu_norm.iter_mut().for_each(|v| *v = v.sqrt());
        Ok(SpectralSolution {
            xs: xs.to_vec(),
            ts: ts.to_vec(),
            u,
            dtu,
            u_norm,
            dtu_norm,
            warnings: self.warnings.clone(),
        })
    }

    /// `‖U0‖²` and `‖V0‖²` restricted to the retained modes.
    pub fn data_norms_sq(&self) -> (f64, f64) {
        (
            self.c.iter().map(|v| v * v).sum(),
            self.d.iter().map(|v| v * v).sum(),
        )
    }

    /// `Σ σ_n c_n²`, the energy norm of `U0` on the retained modes.
    pub fn u0_energy_sq(&self) -> f64 {
        self.sigma.iter().zip(&self.c).map(|(s, c)| s * c * c).sum()
    }
}

/// `u`, `∂_t u` on a grid (`[t][x]`), with Parseval norms per time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSolution {
    pub xs: Vec<f64>,
    pub ts: Vec<f64>,
    pub u: Vec<Vec<f64>>,
    pub dtu: Vec<Vec<f64>>,
    pub u_norm: Vec<f64>,
    pub dtu_norm: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Build the model from quadrature samples and evaluate it on `xs × ts`.
pub fn spectral_solve(
    config: SpectralConfig,
    u0: &[f64],
    v0: &[f64],
    xs: &[f64],
    ts: &[f64],
) -> Result<SpectralSolution> {
    SpectralModel::new(config, u0, v0)?.solve(xs, ts)
}

/// Residual of the mode equation
/// `ρcτ_q^α D^α T' + ρc T' + aτ_q^α D^α T + σ T` with `T = c T¹ + d T²`
/// sampled exactly and differentiated with the discrete operators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeResidual {
    pub steps: usize,
    /// Max over nodes `i ≥ 1`.
    pub max_abs: f64,
    /// Node at which the maximum occurs.
    pub argmax: usize,
    /// Discrete `L²(0,T)` norm `(Σ r_i² τ)^{1/2}`.
    pub l2: f64,
}

pub fn mode_ode_residual(
    params: &ModelParams,
    sigma: f64,
    c: f64,
    d: f64,
    grid: TimeGrid,
) -> Result<ModeResidual> {
    let values = grid
        .nodes()
        .iter()
        .map(|&t| mode_factors(t, sigma, params).map(|f| c * f.t1 + d * f.t2))
        .collect::<Result<Vec<_>>>()?;
    let path = SampledPath::new(grid, values)?;
    // T'(0) = c (T¹)'(0) + d (T²)'(0) = d
    let velocity = fracops::delta_path(&path, d);
    let frac_vel = fracops::caputo_discrete(params.alpha, &velocity)?;
    let frac_pos = fracops::caputo_discrete(params.alpha, &path)?;
    let (rc, tq, a) = (params.rho_c(), params.tau_q_alpha, params.a);
    let mut max_abs = 0.0;
    let mut argmax = 1;
    let mut l2 = 0.0;
    for i in 1..=grid.steps() {
        let r = rc * tq * frac_vel.values()[i]
            + rc * velocity.values()[i]
            + a * tq * frac_pos.values()[i]
            + sigma * path.values()[i];
        if r.abs() > max_abs {
            max_abs = r.abs();
            argmax = i;
        }
        l2 += r * r * grid.tau();
    }
    Ok(ModeResidual {
        steps: grid.steps(),
        max_abs,
        argmax,
        l2: l2.sqrt(),
    })
}
