//! Backward-Euler (Rothe) stepping of the discrete weak form
//!
//! ```text
//! ρcτ_q^α ⟨δ(g_α*(δu−V0))_i, φ⟩ + aτ_q^α ⟨δ(g_α*(u−U0))_i, φ⟩ + ρc⟨δu_i, φ⟩ + 𝓛(u_i, φ) = ⟨F_i, φ⟩
//! ```
//!
//! using `δ(g*(δu−V0))_i = (g*δ²u)_i` and `δ(g*(u−U0))_i = (g*δu)_i`. Each step
//! is one SPD tridiagonal solve with a constant matrix (factored once); the
//! history sums make the whole run `O(n² M)`.

use serde::{Deserialize, Serialize};

use super::fem::{assemble, dot, step_matrix, FemSystem, LdlFactor, Tridiag};
use super::ledger::{EstimateLedger, LedgerRow, StepMonitor};
use super::mesh::Mesh1D;
use crate::error::{Error, Result};
use crate::fracops::{KernelSamples, TimeGrid};
use crate::params::ModelParams;

/// A Rothe run: data, matrices, full history and estimate ledger.
#[derive(Debug, Clone)]
pub struct RotheRun {
    params: ModelParams,
    mesh: Mesh1D,
    grid: TimeGrid,
    system: FemSystem,
    step: Tridiag,
    factor: LdlFactor,
    dual_factor: LdlFactor,
    kernel: Vec<f64>,
    /// Interior nodal vectors `u_0..u_i`.
    u: Vec<Vec<f64>>,
    /// `δu_0 = V0, δu_1, ..`.
    du: Vec<Vec<f64>>,
    /// `F_i` at interior nodes, `i = 0..n`.
    source: Vec<Vec<f64>>,
    ledger: EstimateLedger,
    conv_energy_terms: Vec<f64>,
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

impl RotheRun {
    /// Set up a run with `u_0 = U0`, `δu_0 = V0` (full nodal vectors, `M + 1`
    /// entries) and a source `F(x, t)` sampled at the mesh nodes.
    pub fn new(
        params: ModelParams,
        mesh: Mesh1D,
        grid: TimeGrid,
        u0: &[f64],
        v0: &[f64],
        source: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        params.validate()?;
        let scale = u0.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        if let (Some(a), Some(b)) = (u0.first(), u0.last()) {
            if a.abs() > 1e-12 * scale || b.abs() > 1e-12 * scale {
                return Err(Error::domain("U0 must vanish at the boundary"));
            }
        }
        let u_0 = mesh.restrict(u0)?;
        let v_0 = mesh.restrict(v0)?;
        if u_0.iter().chain(&v_0).any(|v| !v.is_finite()) {
            return Err(Error::domain("initial data must be finite"));
        }
        let system = assemble(&mesh, params.a)?;
        let tau = grid.tau();
        let step = step_matrix(&system, &params, tau)?;
        let factor = step
            .factor()
            .map_err(|reason| Error::Solver { step: 0, reason })?;
        let dual_factor = system
            .dual()
            .factor()
            .map_err(|reason| Error::Solver { step: 0, reason })?;
        let kernel = KernelSamples::riemann_liouville(params.alpha, grid)?
            .values()
            .to_vec();
        let xs = mesh.nodes();
        let interior = &xs[1..xs.len() - 1];
        let source: Vec<Vec<f64>> = grid
            .nodes()
            .iter()
            .map(|&t| interior.iter().map(|&x| source(x, t)).collect())
            .collect();
        if source.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::domain("source must be finite"));
        }
        let h1_0 = system.h1().norm_sq(&u_0);
        let ledger = EstimateLedger::new(LedgerRow {
            j: 0,
            conv_energy: 0.0,
            kinetic: 0.0,
            h1_norm: h1_0,
            increment: 0.0,
            dy_sum: 0.0,
            dual_sum: 0.0,
        });
        Ok(RotheRun {
            params,
            mesh,
            grid,
            system,
            step,
            factor,
            dual_factor,
            kernel,
            u: vec![u_0],
            du: vec![v_0],
            source,
            ledger,
            conv_energy_terms: Vec::new(),
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn mesh(&self) -> &Mesh1D {
        &self.mesh
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn system(&self) -> &FemSystem {
        &self.system
    }

    pub fn step_matrix(&self) -> &Tridiag {
        &self.step
    }

    pub fn ledger(&self) -> &EstimateLedger {
        &self.ledger
    }

    /// Index of the last completed step.
    pub fn completed(&self) -> usize {
        self.u.len() - 1
    }

    pub fn is_complete(&self) -> bool {
        self.completed() == self.grid.steps()
    }

    /// Interior nodal vector `u_i`.
    pub fn u(&self, i: usize) -> &[f64] {
        &self.u[i]
    }

    /// Interior nodal vector `δu_i` (`δu_0 = V0`).
    pub fn du(&self, i: usize) -> &[f64] {
        &self.du[i]
    }

    /// `u_i` with the boundary zeros.
    pub fn u_full(&self, i: usize) -> Vec<f64> {
        self.mesh.extend(&self.u[i])
    }

    pub fn du_full(&self, i: usize) -> Vec<f64> {
        self.mesh.extend(&self.du[i])
    }

    fn d2u(&self, k: usize) -> Vec<f64> {
        let tau = self.grid.tau();
        self.du[k]
            .iter()
            .zip(&self.du[k - 1])
            .map(|(a, b)| (a - b) / tau)
            .collect()
    }

    /// `Σ_{k<i} g(t_{i+1−k}) z_k τ` for `z = δ²u` and `z = δu` (nodal).
    fn history_sums(&self, i: usize) -> (Vec<f64>, Vec<f64>) {
        let n = self.system.dim();
        let tau = self.grid.tau();
        let mut h2 = vec![0.0; n];
        let mut h1 = vec![0.0; n];
        for k in 1..i {
            let g = self.kernel[i - k] * tau;
            axpy(&mut h2, g, &self.d2u(k));
            axpy(&mut h1, g, &self.du[k]);
        }
        (h2, h1)
    }

    /// Load vector `𝓕_i` (interior) for step `i`, given the history through `i − 1`.
    pub fn step_rhs(&self, i: usize) -> Result<Vec<f64>> {
        let n = self.grid.steps();
        if i == 0 || i > n {
            return Err(Error::Index { index: i, lo: 1, hi: n });
        }
        if self.u.len() < i {
            return Err(Error::HistoryIncomplete {
                requested: i,
                needed: i - 1,
                available: self.completed(),
            });
        }
        let p = &self.params;
        let tau = self.grid.tau();
        let (rc, tq, a) = (p.rho_c(), p.tau_q_alpha, p.a);
        let g1 = self.kernel[0];
        let (h2, h1) = self.history_sums(i);
        let prev = &self.u[i - 1];
        let prev_d = &self.du[i - 1];
        let mut f = self.source[i].clone();
        for j in 0..f.len() {
            f[j] += rc * tq * g1 * (prev[j] / tau + prev_d[j]) + rc / tau * prev[j]
                - rc * tq * h2[j]
                + a * tq * g1 * prev[j]
                - a * tq * h1[j];
        }
        Ok(self.system.mass.matvec(&f))
    }

    /// Solve the next step and update the ledger.
    pub fn advance(&mut self) -> Result<()> {
        let i = self.completed() + 1;
        let rhs = self.step_rhs(i)?;
        let ui = self.factor.solve(&rhs);
        if ui.iter().any(|v| !v.is_finite()) {
            return Err(Error::Solver {
                step: i,
                reason: "non-finite solution".into(),
            });
        }
        let tau = self.grid.tau();
        let dui: Vec<f64> = ui.iter().zip(&self.u[i - 1]).map(|(a, b)| (a - b) / tau).collect();
        self.u.push(ui);
        self.du.push(dui);
        self.record(i);
        Ok(())
    }

    pub fn run(&mut self) -> Result<()> {
        while !self.is_complete() {
            self.advance()?;
        }
        Ok(())
    }

    /// Full convolutions `(g*δ²u)_i`, `(g*δu)_i` from the stored history.
    fn convolutions(&self, i: usize) -> (Vec<f64>, Vec<f64>) {
        let n = self.system.dim();
        let tau = self.grid.tau();
        let mut c2 = vec![0.0; n];
        let mut c1 = vec![0.0; n];
        for k in 1..=i {
            let g = self.kernel[i - k] * tau;
            axpy(&mut c2, g, &self.d2u(k));
            axpy(&mut c1, g, &self.du[k]);
        }
        (c2, c1)
    }

    fn record(&mut self, i: usize) {
        let p = self.params;
        let tau = self.grid.tau();
        let sys = &self.system;
        let h1 = sys.h1();
        let (c2, c1) = self.convolutions(i);
        let ui = &self.u[i];
        let dui = &self.du[i];

        // residual of the discrete weak form, assembled from fresh convolutions
        let (rc, tq, a) = (p.rho_c(), p.tau_q_alpha, p.a);
        let mut lhs_terms = [vec![], vec![], vec![], vec![], vec![]];
        lhs_terms[0] = sys.mass.matvec(&c2.iter().map(|v| rc * tq * v).collect::<Vec<_>>());
        lhs_terms[1] = sys.mass.matvec(&c1.iter().map(|v| a * tq * v).collect::<Vec<_>>());
        lhs_terms[2] = sys.mass.matvec(&dui.iter().map(|v| rc * v).collect::<Vec<_>>());
        lhs_terms[3] = sys.elliptic().matvec(ui);
        lhs_terms[4] = sys.mass.matvec(&self.source[i].iter().map(|v| -v).collect::<Vec<_>>());
        let mut resid = 0.0f64;
        let mut scale = 0.0f64;
        for j in 0..ui.len() {
            let r: f64 = lhs_terms.iter().map(|t| t[j]).sum();
            let s: f64 = lhs_terms.iter().map(|t| t[j].abs()).sum();
            resid = resid.max(r.abs());
            scale = scale.max(s);
        }
        let vfi_residual = if scale > 0.0 { resid / scale } else { resid };

        let prev = *self.ledger.rows().last().expect("ledger starts with row 0");
        let v0 = &self.du[0];
        let dv: Vec<f64> = dui.iter().zip(v0).map(|(a, b)| a - b).collect();
        self.conv_energy_terms.push(sys.mass.norm_sq(&dv));
        let conv_energy: f64 = (1..=i)
            .map(|l| self.kernel[i - l] * self.conv_energy_terms[l - 1] * tau)
            .sum();
        let diff: Vec<f64> = ui.iter().zip(&self.u[i - 1]).map(|(a, b)| a - b).collect();
        let load = sys.mass.matvec(&c2);
        let w = self.dual_factor.solve(&load);
        let row = LedgerRow {
            j: i,
            conv_energy,
            kinetic: prev.kinetic + sys.mass.norm_sq(dui) * tau,
            h1_norm: h1.norm_sq(ui),
            increment: prev.increment + h1.norm_sq(&diff),
            dy_sum: prev.dy_sum + sys.mass.norm_sq(&c1) * tau,
            dual_sum: prev.dual_sum + dot(&load, &w) * tau,
        };

        // discrete Young inequality: Σ‖(g*δu)_j‖²τ ≤ (Σ_ℓ g_ℓ τ)² Σ‖δu_j‖²τ
        let g_l1: f64 = self.kernel[..i].iter().sum::<f64>() * tau;
        let young_bound = g_l1 * g_l1 * row.kinetic;

        // Σ 𝓛(u_j, δu_j)τ ≥ (k̃/2)‖∇u_i‖² − ½𝓛(U0,U0) + (k̃/2)Σ‖∇(u_j − u_{j−1})‖²
        let ell = sys.elliptic();
        let energy_increment = ell.inner(ui, &diff);
        let prev_energy = self.ledger.monitors().last().map_or(0.0, |m| m.energy_sum);
        let energy_sum = prev_energy + energy_increment;
        let prev_grad = self.ledger.monitors().last().map_or(0.0, |m| m.grad_increment);
        let grad_increment = prev_grad + sys.laplacian.norm_sq(&diff);
        let k_min = self.mesh.k_min();
        let u0 = &self.u[0];
        let c_const = 0.5 * (self.mesh.k_max() * sys.laplacian.norm_sq(u0) + a * sys.mass.norm_sq(u0));
        let energy_lower = 0.5 * k_min * sys.laplacian.norm_sq(ui) - c_const + 0.5 * k_min * grad_increment;

        let monitor = StepMonitor {
            j: i,
            vfi_residual,
            young_lhs: row.dy_sum,
            young_rhs: young_bound,
            energy_sum,
            energy_lower,
            grad_increment,
        };
        self.ledger.push(row, monitor);
    }

    /// Rothe functions at time `t`: piecewise-linear `v_n`, piecewise-constant
    /// `v̄_n = u_i` and `w̄_n = δu_i` on `(t_{i−1}, t_i]` (interior nodal vectors).
    pub fn interpolants(&self, t: f64) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
        let big_t = self.grid.final_time();
        if !(0.0..=big_t).contains(&t) {
            return Err(Error::domain(format!("t = {t} outside [0, {big_t}]")));
        }
        if !self.is_complete() {
            return Err(Error::HistoryIncomplete {
                requested: self.grid.steps(),
                needed: self.grid.steps(),
                available: self.completed(),
            });
        }
        if t == 0.0 {
            return Ok((self.u[0].clone(), self.u[0].clone(), self.du[0].clone()));
        }
        let tau = self.grid.tau();
        let i = ((t / tau) * (1.0 - 1e-14)).ceil().clamp(1.0, self.grid.steps() as f64) as usize;
        let s = t - self.grid.node(i - 1);
        let v: Vec<f64> = self.u[i - 1]
            .iter()
            .zip(&self.du[i])
            .map(|(a, d)| a + s * d)
            .collect();
        Ok((v, self.u[i].clone(), self.du[i].clone()))
    }
}

/// Build and run to the final time.
pub fn run_solver(
    params: ModelParams,
    mesh: Mesh1D,
    grid: TimeGrid,
    u0: &[f64],
    v0: &[f64],
    source: impl Fn(f64, f64) -> f64,
) -> Result<RotheRun> {
    let mut run = RotheRun::new(params, mesh, grid, u0, v0, source)?;
    run.run()?;
    Ok(run)
}

/// Free-function form of [`RotheRun::interpolants`].
pub fn rothe_interpolants(run: &RotheRun, t: f64) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    run.interpolants(t)
}

/// Serializable snapshot of a trajectory (full nodal vectors).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub ts: Vec<f64>,
    pub xs: Vec<f64>,
    pub u: Vec<Vec<f64>>,
    pub du: Vec<Vec<f64>>,
}

impl RotheRun {
    pub fn trajectory(&self) -> Trajectory {
        let k = self.completed();
        Trajectory {
            ts: (0..=k).map(|i| self.grid.node(i)).collect(),
            xs: self.mesh.nodes(),
            u: (0..=k).map(|i| self.u_full(i)).collect(),
            du: (0..=k).map(|i| self.du_full(i)).collect(),
        }
    }
}
