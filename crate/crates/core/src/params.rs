use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical and fractional constants of the SPL model.
///
/// `tau_q_alpha` stores `τ_q^α` directly, since only that power enters the
/// equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub alpha: f64,
    pub tau_q_alpha: f64,
    pub rho: f64,
    pub c: f64,
    pub a: f64,
}

impl ModelParams {
    pub fn new(alpha: f64, tau_q_alpha: f64, rho: f64, c: f64, a: f64) -> Result<Self> {
        let p = ModelParams {
            alpha,
            tau_q_alpha,
            rho,
            c,
            a,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.alpha, self.tau_q_alpha, self.rho, self.c, self.a]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::domain("model parameters must be finite"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::domain(format!("alpha must lie in (0,1), got {}", self.alpha)));
        }
        if self.tau_q_alpha <= 0.0 {
            return Err(Error::domain("tau_q^alpha must be > 0"));
        }
        if self.rho <= 0.0 || self.c <= 0.0 {
            return Err(Error::domain("rho and c must be > 0"));
        }
        if self.a < 0.0 {
            return Err(Error::domain("a must be >= 0"));
        }
        Ok(())
    }

    /// `ρc`.
    pub fn rho_c(&self) -> f64 {
        self.rho * self.c
    }
}
