//! Python bindings for `wpcurv-core`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use wpcurv_core::beltrami::center_bound_chain;
use wpcurv_core::resolvent::DEFAULT_SOLVER_TOLERANCE;
use wpcurv_core::{self as core, Backend, DiskPoint, Error};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Domain(_) | Error::Config(_) => PyValueError::new_err(e.to_string()),
        Error::Accuracy(_) | Error::Numerical { .. } => PyArithmeticError::new_err(e.to_string()),
    }
}

fn point(z: Complex64) -> PyResult<DiskPoint> {
    DiskPoint::from_complex(z).map_err(to_py)
}

fn backend(name: &str) -> PyResult<Backend> {
    name.parse().map_err(to_py)
}

/// Hyperbolic density `4 / (1 - |z|²)²`.
#[pyfunction]
fn rho(z: Complex64) -> PyResult<f64> {
    Ok(core::rho(point(z)?))
}

#[pyfunction]
fn hyperbolic_disk_radius(r: f64) -> PyResult<f64> {
    core::hyperbolic_disk_radius(r).map_err(to_py)
}

#[pyfunction]
fn sup_norm_exact(n: usize) -> PyResult<f64> {
    core::sup_norm_exact(n).map_err(to_py)
}

#[pyfunction]
fn thick_part_constant(r: f64) -> PyResult<f64> {
    core::thick_part_constant(r).map(|c| c.value).map_err(to_py)
}

/// Curvature bounds on the thick part as a dict of named values.
#[pyfunction]
fn thick_part_bounds(py: Python<'_>, genus: u32, r: f64) -> PyResult<Bound<'_, PyDict>> {
    let b = core::thick_part_bounds(genus, r).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("genus", b.genus)?;
    d.set_item("inj_radius", b.inj_radius)?;
    d.set_item("dim", b.dim)?;
    for (name, v) in b.named_values() {
        d.set_item(name, v)?;
    }
    Ok(d)
}

/// Runs the resolvent self-test; returns `(name, error, tolerance, passed)` rows.
#[pyfunction]
#[pyo3(signature = (radial_count = 128, angular_order = 64, backend = "mode_bvp"))]
fn resolvent_selftest(
    radial_count: usize,
    angular_order: usize,
    backend: &str,
) -> PyResult<Vec<(String, f64, f64, bool)>> {
    let grid = core::build_grid(radial_count, angular_order).map_err(to_py)?;
    let op = core::ResolventOperator::new(grid, self::backend(backend)?).map_err(to_py)?;
    let report = core::resolvent::resolvent_selftest(&op).map_err(to_py)?;
    Ok(report
        .checks
        .into_iter()
        .map(|c| (c.name, c.error, c.tolerance, c.passed))
        .collect())
}

/// Runs the command-line interface with `args` and returns its exit code.
#[pyfunction]
fn cli(args: Vec<String>) -> i32 {
    core::cli::run(std::iter::once("wpcurv".to_string()).chain(args))
}

/// `ν = ρ⁻¹ Σ a_n c_n z̄^{n-2}` from a dict `{n: a_n}`.
#[pyclass(name = "HarmonicBeltrami", module = "wpcurv", frozen)]
struct PyHarmonicBeltrami(core::HarmonicBeltrami);

#[pymethods]
impl PyHarmonicBeltrami {
    #[new]
    fn new(coefficients: BTreeMap<usize, Complex64>) -> PyResult<Self> {
        core::HarmonicBeltrami::new(coefficients)
            .map(Self)
            .map_err(to_py)
    }

    /// The orthonormal basis element `ν_n`.
    #[staticmethod]
    fn basis(n: usize) -> PyResult<Self> {
        core::basis_element(n).map(Self).map_err(to_py)
    }

    fn coefficients(&self) -> BTreeMap<usize, Complex64> {
        self.0.coefficients().clone()
    }

    fn __call__(&self, z: Complex64) -> PyResult<Complex64> {
        Ok(self.0.eval(point(z)?))
    }

    fn wp_inner(&self, other: &Self) -> Complex64 {
        self.0.wp_inner_closed_form(&other.0)
    }

    fn wp_norm(&self) -> f64 {
        self.0.wp_norm()
    }

    /// `(sup |ν|, radius, angle)` of the maximizer.
    fn sup_norm(&self) -> (f64, f64, f64) {
        let s = core::sup_norm_numeric(&self.0);
        (s.value, s.radius, s.angle)
    }

    fn center_bound_chain<'py>(&self, py: Python<'py>, r: f64) -> PyResult<Bound<'py, PyDict>> {
        let c = center_bound_chain(&self.0, r).map_err(to_py)?;
        let d = PyDict::new(py);
        d.set_item("r", c.r)?;
        d.set_item("euclidean_radius", c.euclidean_radius)?;
        d.set_item("wp_norm_sqr", c.wp_norm_sqr)?;
        d.set_item("wp_sq_lower", c.wp_sq_lower)?;
        d.set_item("center_bound", c.center_bound)?;
        d.set_item("center_value", c.center_value)?;
        d.set_item("constant", c.constant)?;
        d.set_item("holds", c.holds(1e-12))?;
        Ok(d)
    }

    fn __add__(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    fn __mul__(&self, c: Complex64) -> Self {
        Self(self.0.scaled(c))
    }

    fn __rmul__(&self, c: Complex64) -> Self {
        Self(self.0.scaled(c))
    }

    fn __repr__(&self) -> String {
        let terms: Vec<String> = self
            .0
            .coefficients()
            .iter()
            .map(|(n, a)| format!("{n}: {a}"))
            .collect();
        format!("HarmonicBeltrami({{{}}})", terms.join(", "))
    }
}

/// Truncated projection kernel onto `span{ν_2, …, ν_N}`.
#[pyclass(name = "ProjectionKernel", module = "wpcurv", frozen)]
struct PyProjectionKernel(core::ProjectionKernel);

#[pymethods]
impl PyProjectionKernel {
    #[new]
    fn new(truncation: usize) -> PyResult<Self> {
        core::ProjectionKernel::new(truncation)
            .map(Self)
            .map_err(to_py)
    }

    #[getter]
    fn truncation(&self) -> usize {
        self.0.truncation()
    }

    fn __call__(&self, z: Complex64, w: Complex64) -> PyResult<Complex64> {
        Ok(self.0.eval(point(z)?, point(w)?))
    }

    fn lambda_sup(&self) -> f64 {
        self.0.lambda_sup().value
    }
}

/// Curvature evaluator; each method returns `(value, est_error)`.
#[pyclass(name = "CurvatureContext", module = "wpcurv", frozen)]
struct PyCurvatureContext(core::CurvatureContext);

#[pymethods]
impl PyCurvatureContext {
    #[new]
    #[pyo3(signature = (radial_count = 128, angular_order = 64, backend = "mode_bvp", solver_tol = DEFAULT_SOLVER_TOLERANCE))]
    fn new(
        radial_count: usize,
        angular_order: usize,
        backend: &str,
        solver_tol: f64,
    ) -> PyResult<Self> {
        let grid = core::build_grid(radial_count, angular_order).map_err(to_py)?;
        core::CurvatureContext::new(grid, self::backend(backend)?, solver_tol)
            .map(Self)
            .map_err(to_py)
    }

    #[getter]
    fn capacity(&self) -> usize {
        self.0.capacity()
    }

    fn riemann_entry(
        &self,
        py: Python<'_>,
        alpha: usize,
        beta: usize,
        lam: usize,
        delta: usize,
    ) -> PyResult<(Complex64, f64)> {
        let r = py
            .detach(|| self.0.riemann_entry(alpha, beta, lam, delta))
            .map_err(to_py)?;
        Ok((r.value, r.est_error))
    }

    fn holo_sectional(&self, py: Python<'_>, n: usize) -> PyResult<(f64, f64)> {
        let r = py.detach(|| self.0.holo_sectional(n)).map_err(to_py)?;
        Ok((r.real(), r.est_error))
    }

    fn sectional(&self, py: Python<'_>, m: usize, n: usize) -> PyResult<(f64, f64)> {
        let r = py.detach(|| self.0.sectional(m, n)).map_err(to_py)?;
        Ok((r.real(), r.est_error))
    }

    /// Partial sums for cutoffs `2 … cutoff` with raw and Aitken limits.
    fn ricci_partial<'py>(
        &self,
        py: Python<'py>,
        alpha: usize,
        cutoff: usize,
    ) -> PyResult<Bound<'py, PyDict>> {
        let s = py
            .detach(|| self.0.ricci_partial(alpha, cutoff))
            .map_err(to_py)?;
        let d = PyDict::new(py);
        d.set_item("cutoffs", &s.cutoffs)?;
        d.set_item("partial_sums", &s.partial_sums)?;
        d.set_item("est_errors", &s.est_errors)?;
        d.set_item("raw", s.raw())?;
        d.set_item("aitken", s.aitken())?;
        Ok(d)
    }
}

#[pymodule]
fn wpcurv(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(rho, m)?)?;
    m.add_function(wrap_pyfunction!(hyperbolic_disk_radius, m)?)?;
    m.add_function(wrap_pyfunction!(sup_norm_exact, m)?)?;
    m.add_function(wrap_pyfunction!(thick_part_constant, m)?)?;
    m.add_function(wrap_pyfunction!(thick_part_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(resolvent_selftest, m)?)?;
    m.add_function(wrap_pyfunction!(cli, m)?)?;
    m.add_class::<PyHarmonicBeltrami>()?;
    m.add_class::<PyProjectionKernel>()?;
    m.add_class::<PyCurvatureContext>()?;
    Ok(())
}
