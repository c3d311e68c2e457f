use serde::{Deserialize, Serialize};

/// Per-step a-priori quantities (all squared norms).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LedgerRow {
    pub j: usize,
    /// `(g_α * ‖δu − V0‖²)_j` (mass norm).
    pub conv_energy: f64,
    /// `Σ_{i≤j} ‖δu_i‖² τ`.
    pub kinetic: f64,
    /// `‖u_j‖²_{H¹}`.
    pub h1_norm: f64,
    /// `Σ_{i≤j} ‖u_i − u_{i−1}‖²_{H¹}`.
    pub increment: f64,
    /// `Σ_{i≤j} ‖(g_α * δu)_i‖² τ`.
    pub dy_sum: f64,
    /// `Σ_{i≤j} ‖δ(g_α * (δu − V0))_i‖²_{dual} τ`, dual norm via `(K + M)⁻¹`.
    pub dual_sum: f64,
}

impl LedgerRow {
    pub const HEADER: [&'static str; 7] = [
        "j",
        "conv_energy",
        "kinetic",
        "h1_norm",
        "increment",
        "dy_sum",
        "dual_sum",
    ];

    pub fn values(&self) -> [f64; 6] {
        [
            self.conv_energy,
            self.kinetic,
            self.h1_norm,
            self.increment,
            self.dy_sum,
            self.dual_sum,
        ]
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values().iter().all(|v| *v >= 0.0)
    }
}

/// Runtime checks recorded after each step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepMonitor {
    pub j: usize,
    /// Max-component residual of the discrete weak form, relative to the
    /// largest term.
    pub vfi_residual: f64,
    /// `dy_sum` and its discrete Young bound `(Σ g_ℓ τ)² · kinetic`.
    pub young_lhs: f64,
    pub young_rhs: f64,
    /// `Σ 𝓛(u_i, u_i − u_{i−1})` and its lower bound
    /// `(k̃/2)‖∇u_j‖² − ½𝓛(U0,U0) + (k̃/2)Σ‖∇(u_i − u_{i−1})‖²`.
    pub energy_sum: f64,
    pub energy_lower: f64,
    pub grad_increment: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EstimateLedger {
    rows: Vec<LedgerRow>,
    monitors: Vec<StepMonitor>,
}

impl EstimateLedger {
    pub(crate) fn new(first: LedgerRow) -> Self {
        EstimateLedger {
            rows: vec![first],
            monitors: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, row: LedgerRow, monitor: StepMonitor) {
        self.rows.push(row);
        self.monitors.push(monitor);
    }

    /// Rows `j = 0..`; row 0 holds the initial state.
    pub fn rows(&self) -> &[LedgerRow] {
        &self.rows
    }

    pub fn monitors(&self) -> &[StepMonitor] {
        &self.monitors
    }

    pub fn terminal(&self) -> &LedgerRow {
        self.rows.last().expect("ledger is never empty")
    }

    pub fn max_vfi_residual(&self) -> f64 {
        self.monitors.iter().fold(0.0, |m, s| m.max(s.vfi_residual))
    }

    pub fn young_holds(&self, rel_tol: f64) -> bool {
        self.monitors
            .iter()
            .all(|m| m.young_lhs <= m.young_rhs * (1.0 + rel_tol) + f64::MIN_POSITIVE)
    }

    pub fn energy_bound_holds(&self, rel_tol: f64) -> bool {
        self.monitors
            .iter()
            .all(|m| m.energy_sum >= m.energy_lower - rel_tol * m.energy_sum.abs().max(m.energy_lower.abs()).max(1.0))
    }
}
