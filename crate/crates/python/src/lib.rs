//! Python bindings: geometry checks, the model nonlinearity, runs and slice
//! diagnostics. Reports come back as plain dicts and lists.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

use tgwave::diagnostics::{self, BootstrapParams};
use tgwave::foliation::{self, SliceField, SobolevKind};
use tgwave::geometry;
use tgwave::pde::{self, Case, CouplingCoefficients, PointState};
use tgwave::solver::RunConfig;

fn err(e: tgwave::Error) -> PyErr {
    match e {
        tgwave::Error::BlowUp { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    Ok(match v {
        Value::Null => py.None(),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any().unbind(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any().unbind(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any().unbind(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any().unbind(),
        Value::Array(a) => {
            let l = PyList::empty(py);
            for x in a {
                l.append(to_py(py, x)?)?;
            }
            l.into_any().unbind()
        }
        Value::Object(m) => {
            let d = PyDict::new(py);
            for (k, x) in m {
                d.set_item(k, to_py(py, x)?)?;
            }
            d.into_any().unbind()
        }
    })
}

fn serialize<T: serde::Serialize>(py: Python<'_>, x: &T) -> PyResult<Py<PyAny>> {
    let v = serde_json::to_value(x).map_err(|e| PyValueError::new_err(e.to_string()))?;
    to_py(py, &v)
}

fn from_py(obj: &Bound<'_, PyAny>) -> PyResult<Value> {
    let json = obj.py().import("json")?;
    let text: String = json.call_method1("dumps", (obj,))?.extract()?;
    serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn case_of(name: &str) -> PyResult<Case> {
    Case::parse(name).map_err(err)
}

/// Fermi chart of a spaceform.
#[pyclass(module = "tgwave_py", name = "SpaceformChart", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyChart {
    inner: geometry::SpaceformChart,
}

#[pymethods]
impl PyChart {
    #[new]
    #[pyo3(signature = (curvature_sign, target_dim, validity_radius = 1.0))]
    fn new(curvature_sign: i32, target_dim: usize, validity_radius: f64) -> PyResult<Self> {
        Ok(Self { inner: geometry::SpaceformChart::new(curvature_sign, target_dim, validity_radius).map_err(err)? })
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label()
    }

    #[getter]
    fn target_dim(&self) -> usize {
        self.inner.target_dim
    }

    /// Metric matrix at `point` as a list of rows.
    fn metric_at(&self, point: Vec<f64>) -> PyResult<Vec<Vec<f64>>> {
        let g = geometry::metric_at(&self.inner, &point).map_err(err)?;
        Ok((0..g.dim).map(|i| (0..g.dim).map(|j| g.get(i, j)).collect()).collect())
    }

    /// Residual report of the curvature identities along the geodesic.
    #[pyo3(signature = (step = 1e-3, tol = 1e-4))]
    fn verify(&self, py: Python<'_>, step: f64, tol: f64) -> PyResult<Py<PyAny>> {
        let jet = geometry::christoffel_jet(&self.inner, step).map_err(err)?;
        serialize(py, &geometry::verify_null_structure(&jet, tol))
    }

    /// Coupling coefficients of the nonlinear system for `case`.
    #[pyo3(signature = (case, step = 1e-3))]
    fn coupling(&self, py: Python<'_>, case: &str, step: f64) -> PyResult<Py<PyAny>> {
        let jet = geometry::christoffel_jet(&self.inner, step).map_err(err)?;
        let c = geometry::coupling_from_geometry(&jet, case_of(case)?).map_err(err)?;
        to_py(py, &c.to_json())
    }

    fn __repr__(&self) -> String {
        format!("SpaceformChart({})", self.inner.label())
    }
}

/// Coefficients of the model system.
#[pyclass(module = "tgwave_py", name = "Coefficients", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyCoefficients {
    inner: CouplingCoefficients,
}

#[pymethods]
impl PyCoefficients {
    /// Unit-coefficient model for `case` ("timelike" or "spacelike").
    #[staticmethod]
    fn model(case: &str, n: usize) -> PyResult<Self> {
        Ok(Self { inner: CouplingCoefficients::model(case_of(case)?, n).map_err(err)? })
    }

    #[staticmethod]
    fn from_dict(d: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(Self { inner: CouplingCoefficients::from_json(&from_py(d)?).map_err(err)? })
    }

    fn to_dict(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.inner.to_json())
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn kg_mass(&self) -> f64 {
        self.inner.kg_mass
    }

    /// Nonlinearity `(F^1, [F^i])` at one point. Derivatives are `[d_t, d_1, d_2, d_3]`.
    fn rhs(&self, u1: f64, vec_u: Vec<f64>, du1: [f64; 4], dvec_u: Vec<[f64; 4]>) -> PyResult<(f64, Vec<f64>)> {
        let k = self.inner.n - 1;
        if vec_u.len() != k || dvec_u.len() != k {
            return Err(PyValueError::new_err(format!("expected {k} Klein-Gordon components")));
        }
        Ok(pde::rhs(&PointState { u1, vec_u, du1, dvec_u }, &self.inner))
    }
}

#[pyfunction]
fn null_form(du: Vec<f64>, dv: Vec<f64>) -> PyResult<f64> {
    if du.len() != 4 || dv.len() != 4 {
        return Err(PyValueError::new_err("gradients need 4 entries (t, x1, x2, x3)"));
    }
    Ok(pde::null_form(&du, &dv))
}

#[pyfunction]
fn quadratic_cancellation_residual(ubar: Vec<f64>, dt_ubar: Vec<f64>, dt_u1: f64) -> f64 {
    pde::quadratic_cancellation_residual(&ubar, &dt_ubar, dt_u1)
}

#[pyfunction]
fn w_tau(tau: f64, r: f64) -> PyResult<f64> {
    foliation::w_tau(tau, r).map_err(err)
}

fn slice(tau: f64, dr: f64, u: Vec<Vec<f64>>, ut: Option<Vec<Vec<f64>>>) -> PyResult<SliceField> {
    let len = u.first().map_or(0, Vec::len);
    if u.is_empty() || u.iter().any(|c| c.len() != len) {
        return Err(PyValueError::new_err("u must be a non-empty list of equal-length components"));
    }
    let ut = ut.unwrap_or_else(|| vec![vec![0.0; len]; u.len()]);
    if ut.len() != u.len() || ut.iter().any(|c| c.len() != len) {
        return Err(PyValueError::new_err("ut must match the shape of u"));
    }
    if !(tau > 0.0 && dr > 0.0) {
        return Err(PyValueError::new_err("tau and dr must be positive"));
    }
    Ok(SliceField { tau, dr, u, ut })
}

/// Energies of a slice sampled on `r_j = j dr`; `u[e]` and `ut[e]` per component.
#[pyfunction]
#[pyo3(signature = (tau, dr, u, ut = None))]
fn energies(py: Python<'_>, tau: f64, dr: f64, u: Vec<Vec<f64>>, ut: Option<Vec<Vec<f64>>>) -> PyResult<Py<PyAny>> {
    serialize(py, &diagnostics::energies(&slice(tau, dr, u, ut)?))
}

/// `kind` is "hardy", "morrey" (with `l`), "gns_wave" or "gns_kg" (with `k`).
#[pyfunction]
#[pyo3(signature = (kind, tau, dr, u, r_exp = 2.0, l = -1.0, k = 0))]
#[allow(clippy::too_many_arguments)]
fn sobolev_ratio(kind: &str, tau: f64, dr: f64, u: Vec<f64>, r_exp: f64, l: f64, k: usize) -> PyResult<f64> {
    let kind = match kind {
        "hardy" => SobolevKind::Hardy,
        "morrey" => SobolevKind::Morrey { l },
        "gns_wave" => SobolevKind::GnsWave { k },
        "gns_kg" => SobolevKind::GnsKg { k },
        _ => return Err(PyValueError::new_err(format!("unknown inequality {kind}"))),
    };
    foliation::sobolev_ratio(&slice(tau, dr, vec![u], None)?, kind, r_exp).map_err(err)
}

#[pyfunction]
fn decay_fit(py: Python<'_>, points: Vec<(f64, f64)>) -> PyResult<Py<PyAny>> {
    serialize(py, &diagnostics::decay_fit(&points).map_err(err)?)
}

#[pyfunction]
fn bootstrap_check(py: Python<'_>, taus: Vec<f64>, frak: Vec<[f64; 3]>, gamma: f64, delta: f64, epsilon: f64) -> PyResult<Py<PyAny>> {
    if taus.len() != frak.len() {
        return Err(PyValueError::new_err("taus and energies differ in length"));
    }
    serialize(py, &diagnostics::bootstrap_check(&taus, &frak, BootstrapParams { gamma, delta, epsilon }))
}

fn config_from(overrides: Option<&Bound<'_, PyAny>>) -> PyResult<RunConfig> {
    let mut v = serde_json::to_value(RunConfig::default()).map_err(|e| PyValueError::new_err(e.to_string()))?;
    if let Some(o) = overrides {
        let Value::Object(m) = from_py(o)? else {
            return Err(PyValueError::new_err("config must be a dict"));
        };
        for (k, x) in m {
            v[k] = x;
        }
    }
    let c = RunConfig::from_value(v).map_err(err)?;
    c.validate().map_err(err)?;
    Ok(c)
}

#[pyfunction]
fn default_config(py: Python<'_>) -> PyResult<Py<PyAny>> {
    serialize(py, &RunConfig::default())
}

/// Evolves the configuration (defaults overridden by `config`) and returns the run report.
#[pyfunction]
#[pyo3(signature = (config = None))]
fn run(py: Python<'_>, config: Option<&Bound<'_, PyAny>>) -> PyResult<Py<PyAny>> {
    let c = config_from(config)?;
    let (_, rep) = py.detach(|| diagnostics::evolve(&c)).map_err(err)?;
    serialize(py, &rep)
}

#[pymodule]
fn tgwave_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyChart>()?;
    m.add_class::<PyCoefficients>()?;
    m.add_function(wrap_pyfunction!(null_form, m)?)?;
    m.add_function(wrap_pyfunction!(quadratic_cancellation_residual, m)?)?;
    m.add_function(wrap_pyfunction!(w_tau, m)?)?;
    m.add_function(wrap_pyfunction!(energies, m)?)?;
    m.add_function(wrap_pyfunction!(sobolev_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(decay_fit, m)?)?;
    m.add_function(wrap_pyfunction!(bootstrap_check, m)?)?;
    m.add_function(wrap_pyfunction!(default_config, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
