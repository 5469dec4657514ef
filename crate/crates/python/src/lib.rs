//! Python bindings for `critval`.
//!
//! Reports come back as plain dicts shaped like the CLI's JSON output.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyModule;
use serde::Serialize;

use critval::acceptance;
use critval::contour::{self, ContourConfig};
use critval::expr::{self, parse_expr};
use critval::kernel::{self, ExactComplex, Poly};
use critval::monodromy;
use critval::typicality::{self, TypicalityConfig};

fn input_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn numerical_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn to_py<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(numerical_err)?;
    let json = PyModule::import(py, "json")?;
    Ok(json.call_method1("loads", (text,))?.unbind())
}

/// Accepts `str`, `int` or `fractions.Fraction` entries.
fn exact_list(items: &[Bound<'_, PyAny>]) -> PyResult<Vec<ExactComplex>> {
    items
        .iter()
        .enumerate()
        .map(|(i, item)| {
            let text = item.str()?.to_string();
            text.trim()
                .parse::<ExactComplex>()
                .map_err(|e| PyValueError::new_err(format!("coefficient {i}: {e}")))
        })
        .collect()
}

fn contour_config(radius: f64, quad_nodes: usize, tol: f64) -> PyResult<ContourConfig> {
    let cfg = ContourConfig {
        radius,
        nodes: quad_nodes,
        match_tol: tol,
        ..ContourConfig::default()
    };
    cfg.validate().map_err(input_err)?;
    Ok(cfg)
}

/// An entire function built from terms `c·z^k·exp(Q(z))`.
#[pyclass(name = "EntireExpr", module = "critval", frozen)]
#[derive(Clone)]
struct PyEntireExpr {
    inner: expr::EntireExpr,
}

#[pymethods]
impl PyEntireExpr {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: parse_expr(text).map_err(input_err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: expr::EntireExpr::from_json(text).map_err(input_err)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn derivative(&self) -> Self {
        Self {
            inner: self.inner.differentiate(),
        }
    }

    fn evaluate(&self, z: Complex64) -> PyResult<Complex64> {
        self.inner.evaluate(z).map_err(numerical_err)
    }

    fn __call__(&self, z: Complex64) -> PyResult<Complex64> {
        self.evaluate(z)
    }

    fn is_polynomial(&self) -> bool {
        self.inner.is_polynomial()
    }

    /// `(rho, p)`: the order and type of the function.
    fn order_and_type(&self) -> (usize, f64) {
        let ot = self.inner.order_and_type();
        (ot.rho, ot.p)
    }

    fn __add__(&self, other: &Self) -> Self {
        Self {
            inner: self.inner.add(&other.inner),
        }
    }

    fn __sub__(&self, other: &Self) -> Self {
        Self {
            inner: self.inner.sub(&other.inner),
        }
    }

    fn __mul__(&self, other: &Self) -> Self {
        Self {
            inner: self.inner.mul(&other.inner),
        }
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("EntireExpr('{}')", self.inner)
    }
}

fn expr_arg(e: &Bound<'_, PyAny>) -> PyResult<expr::EntireExpr> {
    if let Ok(x) = e.cast::<PyEntireExpr>() {
        return Ok(x.get().inner.clone());
    }
    parse_expr(&e.extract::<String>()?).map_err(input_err)
}

/// Exact CVD pipeline of `y^m + a_{m-1} y^{m-1} + ... + a_0`, given `[a_0, ..., a_{m-1}]`.
#[pyfunction]
fn cvd(py: Python<'_>, coeffs: Vec<Bound<'_, PyAny>>) -> PyResult<Py<PyAny>> {
    let lower = exact_list(&coeffs)?;
    let pipe = kernel::cvd_pipeline(&lower).map_err(input_err)?;
    let strings = |p: &Poly<ExactComplex>| {
        p.coeffs()
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
    };
    let report = serde_json::json!({
        "m": lower.len(),
        "poly": strings(&pipe.poly),
        "critical_poly": strings(&pipe.critical_poly),
        "value_poly": strings(&pipe.value_poly),
        "cvd": pipe.cvd.to_string(),
        "cvd_exact": pipe.cvd,
        "is_zero": kernel::Field::is_zero(&pipe.cvd),
    });
    to_py(py, &report)
}

#[pyfunction]
fn variety_member(coeffs: Vec<Bound<'_, PyAny>>) -> PyResult<bool> {
    kernel::disc_variety_member(&exact_list(&coeffs)?).map_err(input_err)
}

/// All roots of `coeffs[0] + coeffs[1] z + ...`, sorted lexicographically.
#[pyfunction]
fn roots(coeffs: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
    let mut rs = kernel::roots(&Poly::new(coeffs)).map_err(input_err)?;
    kernel::sort_lex(&mut rs);
    Ok(rs)
}

#[pyfunction]
#[pyo3(signature = (coeffs, order_cap = monodromy::DEFAULT_ORDER_CAP))]
fn monodromy_group(
    py: Python<'_>,
    coeffs: Vec<Complex64>,
    order_cap: usize,
) -> PyResult<Py<PyAny>> {
    let p = Poly::monic_from_lower(&coeffs);
    let report = monodromy::monodromy_group(&p, order_cap).map_err(numerical_err)?;
    to_py(py, &report)
}

#[pyfunction]
#[pyo3(signature = (coeffs, cross_check = false, order_cap = monodromy::DEFAULT_ORDER_CAP))]
fn radicals(
    py: Python<'_>,
    coeffs: Vec<Bound<'_, PyAny>>,
    cross_check: bool,
    order_cap: usize,
) -> PyResult<Py<PyAny>> {
    let lower = exact_list(&coeffs)?;
    let report = monodromy::radicals_verdict(&lower, cross_check.then_some(order_cap))
        .map_err(numerical_err)?;
    to_py(py, &report)
}

#[pyfunction]
#[pyo3(signature = (f, radius = 5.0, quad_nodes = 64, tol = 1e-10))]
fn count_zeros(f: &Bound<'_, PyAny>, radius: f64, quad_nodes: usize, tol: f64) -> PyResult<usize> {
    let cfg = contour_config(radius, quad_nodes, tol)?;
    contour::count_zeros(&expr_arg(f)?, &cfg)
        .map(|c| c.count)
        .map_err(numerical_err)
}

#[pyfunction]
#[pyo3(signature = (w, radius = 5.0, quad_nodes = 64, tol = 1e-10, strict_radius = false))]
fn truncated_cvd(
    py: Python<'_>,
    w: &Bound<'_, PyAny>,
    radius: f64,
    quad_nodes: usize,
    tol: f64,
    strict_radius: bool,
) -> PyResult<Py<PyAny>> {
    let cfg = contour_config(radius, quad_nodes, tol)?;
    let report =
        contour::truncated_cvd_nudged(&expr_arg(w)?, &cfg, strict_radius).map_err(numerical_err)?;
    to_py(py, &report)
}

#[pyfunction]
#[pyo3(signature = (f, radius = 5.0, quad_nodes = 64, tol = 1e-10, strict_radius = false))]
fn typicality_probe(
    py: Python<'_>,
    f: &Bound<'_, PyAny>,
    radius: f64,
    quad_nodes: usize,
    tol: f64,
    strict_radius: bool,
) -> PyResult<Py<PyAny>> {
    let cfg = TypicalityConfig {
        strict_radius,
        contour: contour_config(radius, quad_nodes, tol)?,
        ..TypicalityConfig::default()
    };
    let report = typicality::typicality_probe(&expr_arg(f)?, &cfg).map_err(numerical_err)?;
    to_py(py, &report)
}

#[pyfunction]
#[pyo3(signature = (epsilon = 1.0, m = 1, samples = 4000))]
fn theta_bound(py: Python<'_>, epsilon: f64, m: u32, samples: usize) -> PyResult<Py<PyAny>> {
    let report = typicality::theta_bound(epsilon, m, samples).map_err(input_err)?;
    to_py(py, &report)
}

/// Ascending coefficients of the interpolant with `P(z_j) = y_j`, `P'(z_j) = 0`.
#[pyfunction]
fn hermite_interpolant(points: Vec<Complex64>, values: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
    let p = typicality::hermite_interpolant(&points, &values).map_err(input_err)?;
    Ok(p.into_coeffs())
}

#[pyfunction]
fn split_zeros(py: Python<'_>, coeffs: Vec<Complex64>, delta: f64) -> PyResult<Py<PyAny>> {
    let out = typicality::split_zeros(&Poly::new(coeffs), delta).map_err(input_err)?;
    to_py(py, &out)
}

/// Runs one acceptance criterion, or all of them, and returns the result records.
#[pyfunction]
#[pyo3(signature = (criterion = None, seed = acceptance::DEFAULT_SEED))]
fn selftest(py: Python<'_>, criterion: Option<u32>, seed: u64) -> PyResult<Py<PyAny>> {
    let results = match criterion {
        Some(id) => vec![acceptance::run_criterion(id, seed)
            .ok_or_else(|| PyValueError::new_err(format!("no criterion {id}")))?],
        None => py.detach(|| acceptance::run_all(seed)),
    };
    to_py(py, &results)
}

#[pymodule]
#[pyo3(name = "critval")]
pub fn critval_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyEntireExpr>()?;
    m.add_function(wrap_pyfunction!(cvd, m)?)?;
    m.add_function(wrap_pyfunction!(variety_member, m)?)?;
    m.add_function(wrap_pyfunction!(roots, m)?)?;
    m.add_function(wrap_pyfunction!(monodromy_group, m)?)?;
    m.add_function(wrap_pyfunction!(radicals, m)?)?;
    m.add_function(wrap_pyfunction!(count_zeros, m)?)?;
    m.add_function(wrap_pyfunction!(truncated_cvd, m)?)?;
    m.add_function(wrap_pyfunction!(typicality_probe, m)?)?;
    m.add_function(wrap_pyfunction!(theta_bound, m)?)?;
    m.add_function(wrap_pyfunction!(hermite_interpolant, m)?)?;
    m.add_function(wrap_pyfunction!(split_zeros, m)?)?;
    m.add_function(wrap_pyfunction!(selftest, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
