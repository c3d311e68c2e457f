//! P1 finite elements on a uniform mesh: symmetric tridiagonal matrices.

use serde::{Deserialize, Serialize};

use super::mesh::Mesh1D;
use crate::error::{Error, Result};
use crate::fracops::rl_kernel;
use crate::params::ModelParams;

/// Symmetric tridiagonal matrix: `diag[i]`, and `off[i]` coupling `i` and `i+1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl Tridiag {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut v = self.diag[i] * x[i];
            if i > 0 {
                v += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                v += self.off[i] * x[i + 1];
            }
            y[i] = v;
        }
        y
    }

    /// `xᵀ A y`.
    pub fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        dot(x, &self.matvec(y))
    }

    /// `xᵀ A x`.
    pub fn norm_sq(&self, x: &[f64]) -> f64 {
        self.inner(x, x)
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &Tridiag, b: f64) -> Tridiag {
        Tridiag {
            diag: self.diag.iter().zip(&other.diag).map(|(x, y)| a * x + b * y).collect(),
            off: self.off.iter().zip(&other.off).map(|(x, y)| a * x + b * y).collect(),
        }
    }

    /// `LDLᵀ` factorization; fails on a non-positive pivot.
    pub fn factor(&self) -> std::result::Result<LdlFactor, String> {
        let n = self.dim();
        let mut d = vec![0.0; n];
        let mut l = vec![0.0; n.saturating_sub(1)];
        for i in 0..n {
            d[i] = self.diag[i] - if i > 0 { l[i - 1] * self.off[i - 1] } else { 0.0 };
            if !(d[i] > 0.0) || !d[i].is_finite() {
                return Err(format!("non-positive pivot {} at row {i}", d[i]));
            }
            if i + 1 < n {
                l[i] = self.off[i] / d[i];
            }
        }
        Ok(LdlFactor { d, l })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LdlFactor {
    d: Vec<f64>,
    l: Vec<f64>,
}

impl LdlFactor {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.d.len();
        let mut x = b.to_vec();
        for i in 1..n {
            x[i] -= self.l[i - 1] * x[i - 1];
        }
        for i in 0..n {
            x[i] /= self.d[i];
        }
        for i in (0..n.saturating_sub(1)).rev() {
            x[i] -= self.l[i] * x[i + 1];
        }
        x
    }
}

pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Mass, stiffness and unit-conductivity Laplacian on the interior nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FemSystem {
    pub mass: Tridiag,
    /// From `⟨k∇u, ∇φ⟩`.
    pub stiffness: Tridiag,
    /// From `⟨∇u, ∇φ⟩`, for `H¹` norms.
    pub laplacian: Tridiag,
    pub a: f64,
}

impl FemSystem {
    pub fn dim(&self) -> usize {
        self.mass.dim()
    }

    /// `K + a·M`, the elliptic form `𝓛`.
    pub fn elliptic(&self) -> Tridiag {
        self.stiffness.combine(1.0, &self.mass, self.a)
    }

    /// `Laplacian + Mass`, the `H¹` inner product.
    pub fn h1(&self) -> Tridiag {
        self.laplacian.combine(1.0, &self.mass, 1.0)
    }

    /// `Stiffness + Mass`, whose inverse defines the discrete dual norm.
    pub fn dual(&self) -> Tridiag {
        self.stiffness.combine(1.0, &self.mass, 1.0)
    }
}

fn element_matrices(mesh: &Mesh1D, k: impl Fn(usize) -> f64) -> (Tridiag, Tridiag) {
    let n = mesh.interior();
    let h = mesh.h();
    let mut mass = Tridiag {
        diag: vec![0.0; n],
        off: vec![0.0; n.saturating_sub(1)],
    };
    let mut stiff = mass.clone();
    // element e joins nodes e and e+1; interior node j sits at index j-1
    for e in 0..mesh.elements() {
        let ke = k(e) / h;
        for node in [e, e + 1] {
            if node >= 1 && node <= n {
                mass.diag[node - 1] += 2.0 * h / 6.0;
                stiff.diag[node - 1] += ke;
            }
        }
        if e >= 1 && e + 1 <= n {
            mass.off[e - 1] += h / 6.0;
            stiff.off[e - 1] -= ke;
        }
    }
    (mass, stiff)
}

pub fn assemble(mesh: &Mesh1D, a: f64) -> Result<FemSystem> {
    if !(a >= 0.0 && a.is_finite()) {
        return Err(Error::domain(format!("a must be >= 0, got {a}")));
    }
    let (mass, stiffness) = element_matrices(mesh, |e| mesh.conductivity()[e]);
    let (_, laplacian) = element_matrices(mesh, |_| 1.0);
    Ok(FemSystem {
        mass,
        stiffness,
        laplacian,
        a,
    })
}

/// Mass coefficient of the step matrix:
/// `ρcτ_q^α g_α(τ)/τ + aτ_q^α g_α(τ) + ρc/τ`.
pub fn step_mass_coefficient(params: &ModelParams, tau: f64) -> Result<f64> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::domain(format!("time step must be > 0, got {tau}")));
    }
    let g = rl_kernel(params.alpha, tau)?;
    let rc = params.rho_c();
    Ok(rc * params.tau_q_alpha * g / tau + params.a * params.tau_q_alpha * g + rc / tau)
}

/// `(ρcτ_q^α g_α(τ)/τ + aτ_q^α g_α(τ) + ρc/τ)·M + K + a·M`.
pub fn step_matrix(system: &FemSystem, params: &ModelParams, tau: f64) -> Result<Tridiag> {
    let s = step_mass_coefficient(params, tau)?;
    Ok(system.elliptic().combine(1.0, &system.mass, s))
}
