//! Rothe time discretisation with P1 finite elements on `(0, L)`.

mod fem;
mod ledger;
mod mesh;
mod solver;

pub use fem::{assemble, step_mass_coefficient, step_matrix, FemSystem, LdlFactor, Tridiag};
pub use ledger::{EstimateLedger, LedgerRow, StepMonitor};
pub use mesh::Mesh1D;
pub use solver::{rothe_interpolants, run_solver, RotheRun, Trajectory};
