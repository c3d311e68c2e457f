//! Python bindings: Mittag-Leffler evaluation, the spectral solution, Rothe
//! runs, cross-validation and the property suites.

use pyo3::exceptions::{PyArithmeticError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use fracspl_core::mittag::{self, MlQuery, SeriesControl};
use fracspl_core::rothe::{self as core_rothe, Mesh1D};
use fracspl_core::scenario::ScenarioConfig;
use fracspl_core::spectral::{SpectralConfig, SpectralModel as CoreSpectral};
use fracspl_core::verify::{self, Fault, Suite};
use fracspl_core::{crossval, Error, TimeGrid};

fn to_py(e: Error) -> PyErr {
    if e.is_convergence() {
        PyArithmeticError::new_err(e.to_string())
    } else if matches!(e, Error::Solver { .. } | Error::HistoryIncomplete { .. }) {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

#[pyclass(module = "fracspl", frozen)]
#[derive(Clone, Copy)]
struct ModelParams {
    inner: fracspl_core::ModelParams,
}

#[pymethods]
impl ModelParams {
    #[new]
    #[pyo3(signature = (alpha, tau_q_alpha, rho, c, a))]
    fn new(alpha: f64, tau_q_alpha: f64, rho: f64, c: f64, a: f64) -> PyResult<Self> {
        fracspl_core::ModelParams::new(alpha, tau_q_alpha, rho, c, a)
            .map(|inner| ModelParams { inner })
            .map_err(to_py)
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }

    #[getter]
    fn tau_q_alpha(&self) -> f64 {
        self.inner.tau_q_alpha
    }

    #[getter]
    fn rho(&self) -> f64 {
        self.inner.rho
    }

    #[getter]
    fn c(&self) -> f64 {
        self.inner.c
    }

    #[getter]
    fn a(&self) -> f64 {
        self.inner.a
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!(
            "ModelParams(alpha={}, tau_q_alpha={}, rho={}, c={}, a={})",
            p.alpha, p.tau_q_alpha, p.rho, p.c, p.a
        )
    }
}

#[pyclass(module = "fracspl", frozen, get_all)]
struct MlEvaluation {
    value: f64,
    terms_used: usize,
    tail_estimate: f64,
    error_estimate: f64,
    method: String,
}

impl From<mittag::MlEvaluation> for MlEvaluation {
    fn from(e: mittag::MlEvaluation) -> Self {
        MlEvaluation {
            value: e.value,
            terms_used: e.terms_used,
            tail_estimate: e.tail_estimate,
            error_estimate: e.error_estimate,
            method: e.method.as_str().to_string(),
        }
    }
}

#[pymethods]
impl MlEvaluation {
    fn __float__(&self) -> f64 {
        self.value
    }

    fn __repr__(&self) -> String {
        format!(
            "MlEvaluation(value={:?}, terms_used={}, method='{}')",
            self.value, self.terms_used, self.method
        )
    }
}

/// `E_{α,β}(z)`.
#[pyfunction]
fn ml2(alpha: f64, beta: f64, z: f64) -> PyResult<f64> {
    mittag::ml2(alpha, beta, z).map_err(to_py)
}

/// `E^{(m)}_{α,β}(z)`.
#[pyfunction]
#[pyo3(signature = (alpha, beta, z, m))]
fn ml2_deriv(alpha: f64, beta: f64, z: f64, m: usize) -> PyResult<f64> {
    mittag::ml2_deriv(alpha, beta, z, m).map_err(to_py)
}

/// Multinomial Mittag-Leffler function with truncation diagnostics.
#[pyfunction]
fn mml(alphas: Vec<f64>, beta: f64, zs: Vec<f64>) -> PyResult<MlEvaluation> {
    let q = MlQuery::new(alphas, beta, zs).map_err(to_py)?;
    mittag::mml(&q, SeriesControl::default()).map(Into::into).map_err(to_py)
}

/// `G(t)` of a mode with eigenvalue `sigma`, multinomial form.
#[pyfunction]
fn g_mml(t: f64, params: &ModelParams, sigma: f64) -> PyResult<f64> {
    let coeff = mittag::SplCoefficients::new(params.inner, sigma).map_err(to_py)?;
    mittag::g_mml(t, &coeff, SeriesControl::default())
        .map(|e| e.value)
        .map_err(to_py)
}

/// `G(t)` from the double-sum representation.
#[pyfunction]
#[pyo3(signature = (t, params, sigma, m_max = mittag::DEFAULT_DOUBLE_SUM_MAX))]
fn g_double_sum(t: f64, params: &ModelParams, sigma: f64, m_max: usize) -> PyResult<f64> {
    let coeff = mittag::SplCoefficients::new(params.inner, sigma).map_err(to_py)?;
    mittag::g_double_sum(t, &coeff, m_max).map(|e| e.value).map_err(to_py)
}

fn sample(py: Python<'_>, f: &PyObject, xs: &[f64]) -> PyResult<Vec<f64>> {
    xs.iter().map(|&x| f.call1(py, (x,))?.extract::<f64>(py)).collect()
}

#[pyclass(module = "fracspl", frozen)]
struct SpectralModel {
    inner: CoreSpectral,
}

#[pymethods]
impl SpectralModel {
    /// `u0`, `v0` are callables of `x` on `[0, length]`.
    #[new]
    #[pyo3(signature = (params, length, k_bar, n_modes, u0, v0, quad_points = None))]
    fn new(
        py: Python<'_>,
        params: &ModelParams,
        length: f64,
        k_bar: f64,
        n_modes: usize,
        u0: PyObject,
        v0: PyObject,
        quad_points: Option<usize>,
    ) -> PyResult<Self> {
        let mut cfg = SpectralConfig::new(length, k_bar, params.inner, n_modes).map_err(to_py)?;
        if let Some(q) = quad_points {
            cfg = cfg.with_quad_points(q);
        }
        let xs = cfg.quad_grid();
        let us = sample(py, &u0, &xs)?;
        let vs = sample(py, &v0, &xs)?;
        let inner = py.allow_threads(|| CoreSpectral::new(cfg, &us, &vs)).map_err(to_py)?;
        Ok(SpectralModel { inner })
    }

    #[getter]
    fn sigma(&self) -> Vec<f64> {
        self.inner.sigma.clone()
    }

    #[getter]
    fn c(&self) -> Vec<f64> {
        self.inner.c.clone()
    }

    #[getter]
    fn d(&self) -> Vec<f64> {
        self.inner.d.clone()
    }

    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.inner.warnings.clone()
    }

    /// `(u, dtu)` as nested lists indexed `[t][x]`.
    fn solve(&self, py: Python<'_>, xs: Vec<f64>, ts: Vec<f64>) -> PyResult<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
        let sol = py.allow_threads(|| self.inner.solve(&xs, &ts)).map_err(to_py)?;
        Ok((sol.u, sol.dtu))
    }
}

#[pyclass(module = "fracspl", frozen)]
struct RotheRun {
    inner: core_rothe::RotheRun,
}

#[pymethods]
impl RotheRun {
    /// Run to the final time. `u0`, `v0` are nodal values (`elements + 1`
    /// entries); `source` is an optional callable `F(x, t)`.
    #[new]
    #[pyo3(signature = (params, length, elements, final_time, steps, u0, v0, conductivity = 1.0, source = None))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        py: Python<'_>,
        params: &ModelParams,
        length: f64,
        elements: usize,
        final_time: f64,
        steps: usize,
        u0: Vec<f64>,
        v0: Vec<f64>,
        conductivity: f64,
        source: Option<PyObject>,
    ) -> PyResult<Self> {
        let mesh = Mesh1D::uniform(length, elements, conductivity).map_err(to_py)?;
        let grid = TimeGrid::new(final_time, steps).map_err(to_py)?;
        let inner = match source {
            None => py
                .allow_threads(|| core_rothe::run_solver(params.inner, mesh, grid, &u0, &v0, |_, _| 0.0))
                .map_err(to_py)?,
            Some(f) => {
                // sample eagerly so the solver never calls back into Python
                let xs = mesh.nodes();
                let mut table = Vec::with_capacity(steps + 1);
                for t in grid.nodes() {
                    let row: PyResult<Vec<f64>> =
                        xs.iter().map(|&x| f.call1(py, (x, t))?.extract::<f64>(py)).collect();
                    table.push(row?);
                }
                let h = mesh.h();
                let tau = grid.tau();
                core_rothe::run_solver(params.inner, mesh, grid, &u0, &v0, move |x, t| {
                    table[(t / tau).round() as usize][(x / h).round() as usize]
                })
                .map_err(to_py)?
            }
        };
        Ok(RotheRun { inner })
    }

    #[getter]
    fn nodes(&self) -> Vec<f64> {
        self.inner.mesh().nodes()
    }

    #[getter]
    fn times(&self) -> Vec<f64> {
        self.inner.grid().nodes()
    }

    /// Nodal `u_i` including the boundary zeros.
    fn u(&self, i: usize) -> PyResult<Vec<f64>> {
        self.check(i)?;
        Ok(self.inner.u_full(i))
    }

    /// Nodal `δu_i` (`δu_0 = V0`) including the boundary zeros.
    fn du(&self, i: usize) -> PyResult<Vec<f64>> {
        self.check(i)?;
        Ok(self.inner.du_full(i))
    }

    /// Rothe functions `(v_n, v̄_n, w̄_n)` at time `t`, interior nodes.
    fn interpolants(&self, t: f64) -> PyResult<(Vec<f64>, Vec<f64>, Vec<f64>)> {
        self.inner.interpolants(t).map_err(to_py)
    }

    /// Estimate ledger as a list of dicts, one per step.
    fn ledger<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        self.inner
            .ledger()
            .rows()
            .iter()
            .map(|r| {
                let d = PyDict::new_bound(py);
                d.set_item("j", r.j)?;
                for (name, v) in core_rothe::LedgerRow::HEADER[1..].iter().zip(r.values()) {
                    d.set_item(*name, v)?;
                }
                Ok(d)
            })
            .collect()
    }

    #[getter]
    fn max_weak_form_residual(&self) -> f64 {
        self.inner.ledger().max_vfi_residual()
    }
}

impl RotheRun {
    fn check(&self, i: usize) -> PyResult<()> {
        let n = self.inner.completed();
        if i > n {
            Err(to_py(Error::Index { index: i, lo: 0, hi: n }))
        } else {
            Ok(())
        }
    }
}

/// Cross-validate a scenario given as JSON text; returns `(n, M, max_l2_error)` rows.
#[pyfunction]
fn cross_validate(py: Python<'_>, scenario_json: &str) -> PyResult<Vec<(usize, usize, f64)>> {
    let cfg = ScenarioConfig::from_json(scenario_json).map_err(to_py)?;
    let report = py.allow_threads(|| crossval::cross_validate(&cfg)).map_err(to_py)?;
    Ok(report
        .rows
        .iter()
        .map(|r| (r.steps, r.elements, r.max_l2_error))
        .collect())
}

/// Run a property suite; returns `(all_passed, tap_report)`.
#[pyfunction]
#[pyo3(signature = (suite = "all", seed = 0, fault = "none"))]
fn run_verify(py: Python<'_>, suite: &str, seed: u64, fault: &str) -> PyResult<(bool, String)> {
    let suite: Suite = suite.parse().map_err(to_py)?;
    let fault: Fault = fault.parse().map_err(to_py)?;
    let report = py.allow_threads(|| verify::run(suite, seed, fault));
    Ok((report.all_passed(), report.to_string()))
}

#[pymodule]
fn fracspl(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<ModelParams>()?;
    m.add_class::<MlEvaluation>()?;
    m.add_class::<SpectralModel>()?;
    m.add_class::<RotheRun>()?;
    m.add_function(wrap_pyfunction!(ml2, m)?)?;
    m.add_function(wrap_pyfunction!(ml2_deriv, m)?)?;
    m.add_function(wrap_pyfunction!(mml, m)?)?;
    m.add_function(wrap_pyfunction!(g_mml, m)?)?;
    m.add_function(wrap_pyfunction!(g_double_sum, m)?)?;
    m.add_function(wrap_pyfunction!(cross_validate, m)?)?;
    m.add_function(wrap_pyfunction!(run_verify, m)?)?;
    Ok(())
}
