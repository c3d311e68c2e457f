//! Rothe solutions measured against the spectral solution.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rothe::run_solver;
use crate::scenario::ScenarioConfig;
use crate::spectral::SpectralModel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub steps: usize,
    pub elements: usize,
    /// `max_i ‖u_i − u(t_i)‖` in the FEM mass norm.
    pub max_l2_error: f64,
    /// Step index attaining the maximum.
    pub worst_step: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossValReport {
    pub rows: Vec<ErrorRow>,
    /// `‖U0‖_{L²}` (trapezoid on the spectral quadrature grid).
    pub u0_norm: f64,
}

impl CrossValReport {
    /// Errors strictly decrease along the refinement list (all-zero errors
    /// count as converged).
    pub fn is_monotone(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].max_l2_error < w[0].max_l2_error || (w[0].max_l2_error == 0.0 && w[1].max_l2_error == 0.0))
    }

    pub fn finest_relative_error(&self) -> Option<f64> {
        let last = self.rows.last()?;
        Some(if self.u0_norm > 0.0 {
            last.max_l2_error / self.u0_norm
        } else {
            last.max_l2_error
        })
    }
}

/// Run every `(n, M)` pair of the scenario and compare against the spectral
/// solution at the mesh nodes and time steps.
pub fn cross_validate(scenario: &ScenarioConfig) -> Result<CrossValReport> {
    scenario.validate()?;
    let spec_cfg = scenario.spectral_config()?;
    let prob = &scenario.problem;
    if !prob.source.is_zero() {
        return Err(Error::config("spectral ground truth requires a zero source"));
    }
    let len = prob.length;
    let model = SpectralModel::from_fns(spec_cfg, |x| prob.u0.eval(x, len), |x| prob.v0.eval(x, len))?;
    let qx = spec_cfg.quad_grid();
    let u0q = prob.u0.sample(&qx, len);
    let u0_norm = qx
        .windows(2)
        .zip(u0q.windows(2))
        .map(|(x, u)| 0.5 * (x[1] - x[0]) * (u[0] * u[0] + u[1] * u[1]))
        .sum::<f64>()
        .sqrt();

    let params = scenario.model_params()?;
    let mut rows = Vec::new();
    for (steps, elements) in scenario.refinements() {
        let mesh = scenario.mesh(elements)?;
        let grid = scenario.grid(steps)?;
        let xs = mesh.nodes();
        let mut u0 = prob.u0.sample(&xs, len);
        let v0 = prob.v0.sample(&xs, len);
        // the boundary nodes carry the Dirichlet condition, not the profile
        u0[0] = 0.0;
        u0[elements] = 0.0;
        let run = run_solver(params, mesh.clone(), grid, &u0, &v0, |_, _| 0.0)?;
        let truth = model.solve(&xs, &grid.nodes())?;
        let mass = &run.system().mass;
        let mut worst = (0.0f64, 0usize);
        for i in 0..=steps {
            let exact = mesh.restrict(&truth.u[i])?;
            let diff: Vec<f64> = run.u(i).iter().zip(&exact).map(|(a, b)| a - b).collect();
            let e = mass.norm_sq(&diff).max(0.0).sqrt();
            if e > worst.0 {
                worst = (e, i);
            }
        }
        rows.push(ErrorRow {
            steps,
            elements,
            max_l2_error: worst.0,
            worst_step: worst.1,
        });
    }
    Ok(CrossValReport { rows, u0_norm })
}
