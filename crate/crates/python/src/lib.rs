//! Python bindings for `sigcount`.

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

use ::sigcount as core;
use core::{Beta, EstimatorConfig, Method};

fn to_py(err: core::Error) -> PyErr {
    match err {
        core::Error::Numerical { .. } | core::Error::NotConverged { .. } | core::Error::Domain(_) => {
            PyArithmeticError::new_err(err.to_string())
        }
        _ => PyValueError::new_err(err.to_string()),
    }
}

fn beta(b: u32) -> PyResult<Beta> {
    Beta::from_index(b).map_err(to_py)
}

/// Sorted sample eigenvalues together with the sample count `n`.
#[pyclass(name = "Spectrum", module = "sigcount", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySpectrum {
    inner: core::Spectrum,
}

#[pymethods]
impl PySpectrum {
    #[new]
    fn new(eigenvalues: Vec<f64>, n: usize) -> PyResult<Self> {
        Ok(Self { inner: core::Spectrum::new(eigenvalues, n).map_err(to_py)? })
    }

    /// Spectrum of the sample covariance of a `p x n` snapshot matrix given as rows.
    #[staticmethod]
    fn from_snapshots(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        let x = core::SnapshotMatrix::from_rows(&rows).map_err(to_py)?;
        Ok(Self { inner: core::Spectrum::from_snapshots(&x).map_err(to_py)? })
    }

    #[getter]
    fn eigenvalues(&self) -> Vec<f64> {
        self.inner.eigenvalues().to_vec()
    }

    #[getter]
    fn p(&self) -> usize {
        self.inner.p()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma()
    }

    fn __len__(&self) -> usize {
        self.inner.p()
    }

    fn __repr__(&self) -> String {
        format!("Spectrum(p={}, n={}, l1={})", self.inner.p(), self.inner.n(), self.inner.l(1))
    }
}

/// Noise level and spike estimates under `k` hypothesised signals.
#[pyclass(name = "NoiseFit", module = "sigcount", frozen, get_all)]
struct PyNoiseFit {
    k: usize,
    sigma2_hat: f64,
    rho_hat: Vec<f64>,
    lambda_hat: Vec<f64>,
    converged: bool,
    iterations: usize,
}

#[pymethods]
impl PyNoiseFit {
    fn __repr__(&self) -> String {
        format!("NoiseFit(k={}, sigma2_hat={}, converged={})", self.k, self.sigma2_hat, self.converged)
    }
}

/// Result of one estimator run.
#[pyclass(name = "Estimate", module = "sigcount", frozen)]
struct PyEstimate {
    inner: core::ModelOrderEstimate,
}

#[pymethods]
impl PyEstimate {
    #[getter]
    fn q_hat(&self) -> usize {
        self.inner.q_hat
    }

    #[getter]
    fn method(&self) -> &'static str {
        self.inner.method.name()
    }

    #[getter]
    fn degenerate(&self) -> bool {
        self.inner.degenerate
    }

    #[getter]
    fn criterion_values(&self) -> Vec<f64> {
        self.inner.criterion_values.clone()
    }

    /// Decision trace as CSV text (header only for the information criteria).
    fn trace_csv(&self) -> String {
        self.inner.trace.to_csv()
    }

    fn __repr__(&self) -> String {
        format!("Estimate(method='{}', q_hat={})", self.inner.method, self.inner.q_hat)
    }
}

/// Runs one estimator (`aic`, `mdl`, `maic`, `rmt`, `srmt`, `sns`).
#[pyfunction]
#[pyo3(signature = (spectrum, method = "sns", alpha = 0.005, alpha0 = 0.995, beta = 1))]
fn estimate(spectrum: &PySpectrum, method: &str, alpha: f64, alpha0: f64, beta: u32) -> PyResult<PyEstimate> {
    let method: Method = method.parse().map_err(to_py)?;
    let config = EstimatorConfig { alpha, alpha0, beta: self::beta(beta)?, ..EstimatorConfig::default() };
    let inner = core::estimate(method, &spectrum.inner, &config).map_err(to_py)?;
    Ok(PyEstimate { inner })
}

#[pyfunction]
#[pyo3(signature = (spectrum, k, tol = 1e-8, max_iter = 200))]
fn estimate_noise(spectrum: &PySpectrum, k: usize, tol: f64, max_iter: usize) -> PyResult<PyNoiseFit> {
    let fit = core::estimate_noise_and_spikes(&spectrum.inner, k, core::SolverOptions { tol, max_iter })
        .map_err(to_py)?;
    Ok(PyNoiseFit {
        k: fit.k,
        sigma2_hat: fit.sigma2_hat,
        rho_hat: fit.rho_hat,
        lambda_hat: fit.lambda_hat,
        converged: fit.converged,
        iterations: fit.iterations,
    })
}

/// Tracy-Widom CDF.
#[pyfunction]
#[pyo3(signature = (x, beta = 1))]
fn tw_cdf(x: f64, beta: u32) -> PyResult<f64> {
    Ok(core::tw_cdf(x, self::beta(beta)?))
}

/// Upper Tracy-Widom quantile: `s` with `1 - F(s) = alpha`.
#[pyfunction]
#[pyo3(signature = (alpha, beta = 1))]
fn tw_quantile(alpha: f64, beta: u32) -> PyResult<f64> {
    core::tw_quantile(alpha, self::beta(beta)?).map_err(to_py)
}

#[pyfunction]
fn spike_limit(lam: f64, sigma2: f64, gamma: f64) -> f64 {
    core::spike_limit(lam, sigma2, gamma)
}

#[pyfunction]
fn detection_limit(sigma2: f64, gamma: f64) -> f64 {
    core::detection_limit(sigma2, gamma)
}

/// Runs a Monte Carlo sweep from scenario-file text and returns the CSV.
#[pyfunction]
fn run_scenario(py: Python<'_>, text: &str) -> PyResult<String> {
    let spec = core::ScenarioSpec::parse(text).map_err(to_py)?;
    let result = py.detach(|| core::run_sweep(&spec)).map_err(to_py)?;
    Ok(result.to_csv())
}

#[pymodule]
#[pyo3(name = "sigcount")]
fn sigcount_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpectrum>()?;
    m.add_class::<PyNoiseFit>()?;
    m.add_class::<PyEstimate>()?;
    m.add_function(wrap_pyfunction!(estimate, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_noise, m)?)?;
    m.add_function(wrap_pyfunction!(tw_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(tw_quantile, m)?)?;
    m.add_function(wrap_pyfunction!(spike_limit, m)?)?;
    m.add_function(wrap_pyfunction!(detection_limit, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add("METHODS", Method::ALL.iter().map(|m| m.name()).collect::<Vec<_>>())?;
    Ok(())
}
