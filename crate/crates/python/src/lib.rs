//! Python bindings: polynomials, matrix families, spectral summaries and the
//! CLI pipeline.

use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyAny;
use serde_json::Value;

use eigenbouquet::algebra::{self, Field, VarUniverse};
use eigenbouquet::bouquet::wedge_quadratics;
use eigenbouquet::cli::{self, Command, JobConfig};
use eigenbouquet::family::{self, canonical_set, MatrixFamily, Structure};
use eigenbouquet::oracle::{cluster_and_multiplicities, eigh_jacobi};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_python(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    let json = py.import("json")?;
    Ok(json.call_method1("loads", (v.to_string(),))?.unbind())
}

fn field_of(name: &str) -> PyResult<Field> {
    match name {
        "rational" => Ok(Field::Rational),
        "gaussian" => Ok(Field::Gaussian),
        _ => Err(PyValueError::new_err(format!("unknown field {name:?}; expected rational or gaussian"))),
    }
}

fn structure_of(name: &str) -> PyResult<Structure> {
    serde_json::from_value(Value::String(name.to_string())).map_err(|_| {
        PyValueError::new_err(format!("unknown structure {name:?}; expected symmetric, hermitian, skew or normal"))
    })
}

/// Exact polynomial over the rationals or Gaussian rationals.
#[pyclass(frozen, name = "Polynomial")]
struct PyPolynomial {
    inner: algebra::Polynomial,
}

#[pymethods]
impl PyPolynomial {
    #[new]
    #[pyo3(signature = (text, params, field = "gaussian"))]
    fn new(text: &str, params: Vec<String>, field: &str) -> PyResult<Self> {
        let u = VarUniverse::new(params, Vec::<String>::new()).map_err(value_error)?;
        let inner = algebra::parse_polynomial(text, &u, field_of(field)?).map_err(value_error)?;
        Ok(PyPolynomial { inner })
    }

    fn params(&self) -> Vec<String> {
        self.inner.universe().params().to_vec()
    }

    fn total_degree(&self) -> u32 {
        self.inner.total_degree()
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    /// Complex value at a real point.
    fn eval(&self, point: Vec<f64>) -> PyResult<(f64, f64)> {
        if point.len() != self.inner.universe().len() {
            return Err(PyValueError::new_err("point has the wrong dimension"));
        }
        let z = self.inner.eval_c64(&point);
        Ok((z.re, z.im))
    }

    fn derivative(&self, var: &str) -> PyResult<Self> {
        let idx = self.inner.universe().index_of(var).ok_or_else(|| PyKeyError::new_err(var.to_string()))?;
        Ok(PyPolynomial { inner: self.inner.derivative(idx) })
    }

    fn __add__(&self, other: &Self) -> PyResult<Self> {
        self.inner.try_add(&other.inner).map(|inner| PyPolynomial { inner }).map_err(value_error)
    }

    fn __sub__(&self, other: &Self) -> PyResult<Self> {
        self.inner.try_sub(&other.inner).map(|inner| PyPolynomial { inner }).map_err(value_error)
    }

    fn __mul__(&self, other: &Self) -> PyResult<Self> {
        self.inner.try_mul(&other.inner).map(|inner| PyPolynomial { inner }).map_err(value_error)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Polynomial({:?})", self.inner.to_string())
    }
}

/// Polynomial matrix family with a declared structure.
#[pyclass(frozen, name = "Family")]
struct PyFamily {
    inner: MatrixFamily,
}

#[pymethods]
impl PyFamily {
    #[new]
    #[pyo3(signature = (params, matrix, structure = "symmetric", field = "rational"))]
    fn new(params: Vec<String>, matrix: Vec<Vec<String>>, structure: &str, field: &str) -> PyResult<Self> {
        let inner = MatrixFamily::parse(&params, &matrix, structure_of(structure)?, field_of(field)?).map_err(value_error)?;
        Ok(PyFamily { inner })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn entry(&self, i: usize, j: usize) -> PyResult<PyPolynomial> {
        if i >= self.inner.n() || j >= self.inner.n() {
            return Err(PyValueError::new_err("index out of range"));
        }
        Ok(PyPolynomial { inner: self.inner.entry(i, j).clone() })
    }

    /// Spectral summary: distinct-eigenvalue count, multiplicities,
    /// characteristic polynomials, discriminant and bouquet rank.
    fn analyze(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let s = family::analyze(&self.inner);
        let quads = wedge_quadratics(&self.inner, None).map_err(value_error)?;
        let v = serde_json::json!({
            "n": self.inner.n(),
            "s_l": s.s_l,
            "d_l": quads.d_l,
            "multiplicities": s.multiplicities,
            "char_poly": s.char_poly.to_string(),
            "reduced_char_poly": s.reduced_char_poly.to_string(),
            "discriminant": canonical_set(&s.disc_gens).keys().cloned().collect::<Vec<_>>(),
            "quadratics": (0..quads.quads.len()).map(|k| quads.quad_poly(k).to_string()).collect::<Vec<_>>(),
        });
        to_python(py, &v)
    }

    /// Distinct numerical eigenvalues at a real point, clustered with
    /// tolerance `tau`, and their multiplicities.
    #[pyo3(signature = (point, tau = 1e-6))]
    fn eigenvalues(&self, point: Vec<f64>, tau: f64) -> PyResult<(Vec<f64>, Vec<usize>)> {
        if point.len() != self.inner.universe().len() {
            return Err(PyValueError::new_err("point has the wrong dimension"));
        }
        let m = self.inner.eval_f64(&point);
        let mut sample = eigh_jacobi(&m, &point).map_err(value_error)?;
        cluster_and_multiplicities(&mut sample, tau);
        Ok(sample.clusters.iter().map(|c| (c.value, c.multiplicity)).unzip())
    }

    /// Numerical matrix value at a real point.
    fn evaluate(&self, point: Vec<f64>) -> PyResult<Vec<Vec<f64>>> {
        if point.len() != self.inner.universe().len() {
            return Err(PyValueError::new_err("point has the wrong dimension"));
        }
        Ok(self.inner.eval_f64(&point))
    }
}

/// Job configuration JSON for a built-in fixture.
#[pyfunction]
fn demo_config(name: &str) -> PyResult<String> {
    let cfg = cli::demo_config(name).ok_or_else(|| {
        PyKeyError::new_err(format!("unknown demo {name:?}; expected one of {}", cli::DEMO_NAMES.join(", ")))
    })?;
    serde_json::to_string(&cfg).map_err(value_error)
}

/// Runs a pipeline command on a JSON job configuration and returns
/// `(exit_code, verdict, report)` with the report as canonical JSON text.
#[pyfunction]
fn run(py: Python<'_>, command: &str, config: &str) -> PyResult<(i32, String, String)> {
    let cmd = match command {
        "analyze" => Command::Analyze,
        "resolve" => Command::Resolve,
        "frames" => Command::Frames,
        "check" => Command::Check,
        _ => return Err(PyValueError::new_err(format!("unknown command {command:?}"))),
    };
    let cfg = JobConfig::from_json(config).map_err(value_error)?;
    let outcome = py.detach(|| cli::run(cmd, &cfg));
    Ok((outcome.exit_code, outcome.verdict.clone(), outcome.canonical()))
}

#[pymodule]
fn eigenbouquet_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPolynomial>()?;
    m.add_class::<PyFamily>()?;
    m.add_function(wrap_pyfunction!(demo_config, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add("DEMO_NAMES", cli::DEMO_NAMES.to_vec())?;
    Ok(())
}
