//! Python bindings.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use ::wigwork as core;
use core::cli::{oracle_report, ScenarioFile};
use core::oracle::quadrature::wigner_quadrature_default;
use core::qcore::ComplexMatrix;
use core::wigner::GridSpec;
use core::workstats::{delta_e, mean_work_tpm, tpm_distribution, MERGE_TOL};

/// `(w_axis, tau_axis, values)`.
type GridArrays = (Vec<f64>, Vec<f64>, Vec<Vec<f64>>);

fn err(e: core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rows(m: &ComplexMatrix) -> Vec<Vec<Complex64>> {
    (0..m.dim()).map(|i| m.row(i).to_vec()).collect()
}

/// A driven two-measurement scenario: Hamiltonians, driving, initial state
/// and ancilla width.
#[pyclass(name = "Scenario", module = "wigwork", skip_from_py_object)]
#[derive(Clone)]
struct PyScenario {
    inner: core::scenarios::Scenario,
}

#[pymethods]
impl PyScenario {
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        core::scenarios::builtin(name).map(|inner| Self { inner }).map_err(err)
    }

    /// Parses a scenario document in the same JSON format the CLI reads.
    #[staticmethod]
    #[pyo3(signature = (text, name = "file"))]
    fn from_json(text: &str, name: &str) -> PyResult<Self> {
        ScenarioFile::parse(text)
            .and_then(|f| f.into_scenario(name))
            .map(|inner| Self { inner })
            .map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json_string(&ScenarioFile::from_scenario(&self.inner))
    }

    fn with_sigma(&self, sigma: f64) -> PyResult<Self> {
        self.inner.with_sigma(sigma).map(|inner| Self { inner }).map_err(err)
    }

    #[getter]
    fn name(&self) -> &str {
        &self.inner.name
    }

    #[getter]
    fn sigma(&self) -> f64 {
        self.inner.sigma
    }

    #[getter]
    fn hbar(&self) -> f64 {
        self.inner.hbar
    }

    #[getter]
    fn beta(&self) -> Option<f64> {
        self.inner.beta
    }

    #[getter]
    fn initial_state(&self) -> Vec<Vec<Complex64>> {
        rows(&self.inner.initial_state)
    }

    #[getter]
    fn unitary(&self) -> Vec<Vec<Complex64>> {
        rows(&self.inner.unitary)
    }

    /// `(w_min, w_max, n_w, tau_min, tau_max, n_tau)` of the default grid.
    #[getter]
    fn grid(&self) -> (f64, f64, usize, f64, f64, usize) {
        let g = self.inner.grid;
        (g.w_min, g.w_max, g.n_w, g.tau_min, g.tau_max, g.n_tau)
    }

    /// Two-point-measurement atoms as `[(w, p), ...]`, sorted by `w`.
    fn tpm(&self) -> PyResult<Vec<(f64, f64)>> {
        let table = self.inner.table().map_err(err)?;
        Ok(tpm_distribution(&table, MERGE_TOL).atoms().iter().map(|a| (a.w, a.p)).collect())
    }

    fn mean_work_tpm(&self) -> PyResult<f64> {
        let table = self.inner.table().map_err(err)?;
        Ok(mean_work_tpm(&tpm_distribution(&table, MERGE_TOL)))
    }

    fn delta_e(&self) -> PyResult<f64> {
        delta_e(&self.inner.process().map_err(err)?, &self.inner.initial_state).map_err(err)
    }

    fn wigner(&self) -> PyResult<PyWignerWork> {
        Ok(PyWignerWork { inner: self.inner.wigner().map_err(err)?, scenario: self.inner.clone() })
    }

    fn __repr__(&self) -> String {
        format!("Scenario({:?}, sigma={})", self.inner.name, self.inner.sigma)
    }
}

fn serde_json_string(f: &ScenarioFile) -> PyResult<String> {
    serde_json::to_string_pretty(f).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Closed-form Wigner quasidistribution of work.
#[pyclass(name = "WignerWork", module = "wigwork")]
struct PyWignerWork {
    inner: core::wigner::WignerWork,
    scenario: core::scenarios::Scenario,
}

#[pymethods]
impl PyWignerWork {
    fn evaluate(&self, w: f64, tau: f64) -> f64 {
        self.inner.evaluate(w, tau)
    }

    fn coherent_part(&self, w: f64, tau: f64) -> f64 {
        self.inner.coherent_part(w, tau)
    }

    fn diagonal_part(&self, w: f64, tau: f64) -> f64 {
        self.inner.diagonal_part(w, tau)
    }

    #[getter]
    fn tau_spread(&self) -> f64 {
        self.inner.ancilla().tau_spread()
    }

    /// Returns `(w_axis, tau_axis, values)` with one row of `values` per tau.
    #[allow(clippy::too_many_arguments)]
    #[pyo3(signature = (w_min, w_max, n_w, tau_min, tau_max, n_tau))]
    fn grid(
        &self,
        py: Python<'_>,
        w_min: f64,
        w_max: f64,
        n_w: usize,
        tau_min: f64,
        tau_max: f64,
        n_tau: usize,
    ) -> PyResult<GridArrays> {
        let spec = GridSpec { w_min, w_max, n_w, tau_min, tau_max, n_tau };
        let g = py.detach(|| self.inner.grid(&spec)).map_err(err)?;
        Ok((g.w_axis, g.tau_axis, g.values))
    }

    fn marginal_w_closed(&self, w: f64) -> f64 {
        self.inner.marginal_w_closed(w)
    }

    #[pyo3(signature = (w, tau_halfwidth_spreads = 8.0, n_quad = 512))]
    fn marginal_w_numeric(&self, w: f64, tau_halfwidth_spreads: f64, n_quad: usize) -> PyResult<f64> {
        self.inner.marginal_w_numeric(w, tau_halfwidth_spreads, n_quad).map_err(err)
    }

    fn mean_work(&self) -> f64 {
        self.inner.mean_work()
    }

    fn mean_tau(&self) -> f64 {
        self.inner.mean_tau()
    }

    fn exp_beta_work(&self, beta: f64) -> f64 {
        self.inner.exp_beta_work(beta)
    }

    /// Phase-space integral of the distribution over the default box.
    fn normalization(&self, py: Python<'_>) -> PyResult<f64> {
        py.detach(|| self.inner.expectation_default(|_, _| 1.0)).map_err(err)
    }

    /// `(slice, direct)` energy-change estimates at `tau0`.
    fn delta_e_at(&self, tau0: f64) -> PyResult<(f64, f64)> {
        let proc = self.scenario.process().map_err(err)?;
        let pair = self.inner.delta_e_at(&proc, &self.scenario.initial_state, tau0).map_err(err)?;
        Ok((pair.slice_value, pair.direct_value))
    }

    /// Independent quadrature of the Wigner transform at one point.
    fn quadrature(&self, w: f64, tau: f64) -> PyResult<f64> {
        let a = self.inner.ancilla();
        wigner_quadrature_default(self.inner.table(), a.sigma(), a.hbar(), w, tau).map_err(err)
    }
}

#[pyfunction]
fn builtin_names() -> Vec<&'static str> {
    core::scenarios::BUILTIN_NAMES.to_vec()
}

/// Largest deviations of the closed form from the quadrature and circuit
/// oracles over seeded probe points.
#[pyfunction]
#[pyo3(signature = (scenario, probes = 100, seed = 0))]
fn oracle_check(py: Python<'_>, scenario: &PyScenario, probes: usize, seed: u64) -> PyResult<(f64, f64)> {
    let report = py
        .detach(|| oracle_report(&scenario.inner, probes, seed))
        .map_err(|e| PyValueError::new_err(e.message))?;
    Ok((report.quadrature_gap, report.circuit_gap))
}

#[pymodule]
fn wigwork(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScenario>()?;
    m.add_class::<PyWignerWork>()?;
    m.add_function(wrap_pyfunction!(builtin_names, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_check, m)?)?;
    Ok(())
}
