//! Python bindings: ideals, the quick single-shot computations, the bundled
//! corpus and the problem-file pipeline. Structured results come back as
//! plain dicts and lists.

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList, PyString};
use serde::Serialize;
use serde_json::Value;

use vancycles::algebra::{parse_poly, Ideal, MonomialOrder, Polynomial, Ring};
use vancycles::pipeline::problem::{parse_field, parse_point, Coord};
use vancycles::pipeline::{quick, Problem, RunOptions};
use vancycles::vanishing::{betti_transfer, vanishing_index_check};
use vancycles::{corpus, Error};

create_exception!(vancycles, GenericityError, PyRuntimeError);

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Genericity { .. } | Error::UnluckyPrime(_) => {
            GenericityError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => i.into_pyobject(py)?.into_any(),
            (None, Some(u)) => u.into_pyobject(py)?.into_any(),
            _ => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => PyString::new(py, s).into_any(),
        Value::Array(a) => {
            let items = a
                .iter()
                .map(|x| to_py(py, x))
                .collect::<PyResult<Vec<_>>>()?;
            PyList::new(py, items)?.into_any()
        }
        Value::Object(m) => {
            let d = PyDict::new(py);
            for (k, x) in m {
                d.set_item(k, to_py(py, x)?)?;
            }
            d.into_any()
        }
    })
}

fn ser<'py, T: Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let value = serde_json::to_value(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    to_py(py, &value)
}

fn coords(point: Vec<Bound<'_, PyAny>>) -> PyResult<Vec<Coord>> {
    point
        .into_iter()
        .map(|c| match c.extract::<i64>() {
            Ok(n) => Ok(Coord::Int(n)),
            Err(_) => Ok(Coord::Text(c.str()?.to_string())),
        })
        .collect()
}

/// An ideal of a polynomial ring with named variables, over the rationals or
/// a prime field (`"modular:p"`).
#[pyclass(name = "Ideal", module = "vancycles", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyIdeal {
    inner: Ideal,
}

impl PyIdeal {
    fn poly(&self, f: &str) -> PyResult<Polynomial> {
        parse_poly(self.inner.ring(), f).map_err(py_err)
    }

    fn same_ring(&self, other: &PyIdeal) -> PyResult<()> {
        if self.inner.ring().same_space(other.inner.ring()) {
            Ok(())
        } else {
            Err(PyValueError::new_err("ideals live in different rings"))
        }
    }
}

#[pymethods]
impl PyIdeal {
    #[new]
    #[pyo3(signature = (vars, generators, field = "rationals"))]
    fn new(vars: Vec<String>, generators: Vec<String>, field: &str) -> PyResult<Self> {
        let field = parse_field(field).map_err(py_err)?;
        let ring = Ring::new(&vars, field, MonomialOrder::GrevLex).map_err(py_err)?;
        let inner = Ideal::parse(&ring, &generators).map_err(py_err)?;
        Ok(PyIdeal { inner })
    }

    #[getter]
    fn vars(&self) -> Vec<String> {
        self.inner.ring().vars().to_vec()
    }

    /// Reduced grevlex Gröbner basis.
    fn groebner_basis(&self) -> Vec<String> {
        self.inner.gb().printed()
    }

    fn contains(&self, f: &str) -> PyResult<bool> {
        Ok(self.inner.contains(&self.poly(f)?))
    }

    fn radical_contains(&self, f: &str) -> PyResult<bool> {
        Ok(self.inner.radical_contains(&self.poly(f)?))
    }

    fn normal_form(&self, f: &str) -> PyResult<String> {
        Ok(self.inner.normal_form(&self.poly(f)?).to_string())
    }

    fn krull_dim(&self) -> i64 {
        self.inner.krull_dim()
    }

    /// Dimension of the quotient ring, or `None` when it is infinite.
    fn vs_dim(&self) -> Option<u64> {
        self.inner.vs_dim()
    }

    fn local_multiplicity(&self, point: Vec<Bound<'_, PyAny>>) -> PyResult<u64> {
        let x = parse_point(self.inner.ring(), &coords(point)?).map_err(py_err)?;
        self.inner.local_multiplicity(&x).map_err(py_err)
    }

    fn saturate(&self, other: &PyIdeal) -> PyResult<PyIdeal> {
        self.same_ring(other)?;
        Ok(PyIdeal {
            inner: self.inner.saturate(&other.inner),
        })
    }

    fn quotient(&self, other: &PyIdeal) -> PyResult<PyIdeal> {
        self.same_ring(other)?;
        Ok(PyIdeal {
            inner: self.inner.quotient(&other.inner),
        })
    }

    fn intersect(&self, other: &PyIdeal) -> PyResult<PyIdeal> {
        self.same_ring(other)?;
        Ok(PyIdeal {
            inner: self.inner.intersect(&other.inner),
        })
    }

    fn __add__(&self, other: &PyIdeal) -> PyResult<PyIdeal> {
        self.same_ring(other)?;
        Ok(PyIdeal {
            inner: self.inner.sum(&other.inner),
        })
    }

    fn __mul__(&self, other: &PyIdeal) -> PyResult<PyIdeal> {
        self.same_ring(other)?;
        Ok(PyIdeal {
            inner: self.inner.product(&other.inner),
        })
    }

    /// Elimination ideal; the result keeps the full ring.
    fn eliminate(&self, names: Vec<String>) -> PyResult<PyIdeal> {
        let names: Vec<&str> = names.iter().map(String::as_str).collect();
        Ok(PyIdeal {
            inner: self.inner.eliminate_named(&names).map_err(py_err)?,
        })
    }

    fn __eq__(&self, other: &PyIdeal) -> bool {
        self.inner.ring().same_space(other.inner.ring()) && self.inner.same_ideal(&other.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "Ideal({:?}, {:?})",
            self.inner.ring().vars(),
            self.inner.gb().printed()
        )
    }
}

/// Exceptional coefficient of `f` at a point (the origin by default).
#[pyfunction]
#[pyo3(signature = (f, vars = None, point = None, seed = 1, retries = 8))]
fn milnor_number(
    f: &str,
    vars: Option<Vec<String>>,
    point: Option<String>,
    seed: u64,
    retries: u32,
) -> PyResult<i64> {
    quick::mu(f, vars.as_deref(), point.as_deref(), seed, retries)
        .map(|c| c.value)
        .map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (f, l, stratum = "", vars = None))]
fn polar_curve<'py>(
    py: Python<'py>,
    f: &str,
    l: &str,
    stratum: &str,
    vars: Option<Vec<String>>,
) -> PyResult<Bound<'py, PyAny>> {
    ser(
        py,
        &quick::polar(f, l, stratum, vars.as_deref()).map_err(py_err)?,
    )
}

#[pyfunction]
#[pyo3(signature = (generators, vars = None))]
fn conormal<'py>(
    py: Python<'py>,
    generators: &str,
    vars: Option<Vec<String>>,
) -> PyResult<Bound<'py, PyAny>> {
    ser(
        py,
        &quick::conormal(generators, vars.as_deref()).map_err(py_err)?,
    )
}

/// Thom's a_f condition for `(V(m), V(n))` at `point` (comma-separated).
#[pyfunction]
#[pyo3(signature = (m, f, n, point, vars = None))]
fn af_pair<'py>(
    py: Python<'py>,
    m: &str,
    f: &str,
    n: &str,
    point: &str,
    vars: Option<Vec<String>>,
) -> PyResult<Bound<'py, PyAny>> {
    ser(
        py,
        &quick::afpair(m, f, n, point, vars.as_deref()).map_err(py_err)?,
    )
}

#[pyfunction]
fn corpus_names() -> Vec<&'static str> {
    corpus::NAMES.to_vec()
}

fn scenario(name: &str) -> PyResult<corpus::Scenario> {
    corpus::by_name(name)
        .ok_or_else(|| PyValueError::new_err(format!("unknown corpus instance {name:?}")))?
        .map_err(py_err)
}

/// Transferred normal data of a bundled scenario.
#[pyfunction]
#[pyo3(signature = (name, seed = 1, retries = 8))]
fn corpus_transfer<'py>(
    py: Python<'py>,
    name: &str,
    seed: u64,
    retries: u32,
) -> PyResult<Bound<'py, PyAny>> {
    let s = scenario(name)?;
    let t = betti_transfer(&s.f, &s.data, &s.vf, seed, retries).map_err(py_err)?;
    ser(py, &t.tables)
}

#[pyfunction]
#[pyo3(signature = (name, seed = 1, retries = 8))]
fn corpus_index_check<'py>(
    py: Python<'py>,
    name: &str,
    seed: u64,
    retries: u32,
) -> PyResult<Bound<'py, PyAny>> {
    let s = scenario(name)?;
    let c = vanishing_index_check(&s.f, &s.data, &s.vf, seed, retries).map_err(py_err)?;
    ser(py, &c)
}

/// Runs a problem given as JSON text and returns the report.
#[pyfunction]
#[pyo3(signature = (problem, seed = None, retries = None, field = None, cache_dir = None))]
fn run_problem<'py>(
    py: Python<'py>,
    problem: &str,
    seed: Option<u64>,
    retries: Option<u32>,
    field: Option<&str>,
    cache_dir: Option<std::path::PathBuf>,
) -> PyResult<Bound<'py, PyAny>> {
    let p = Problem::from_json(problem).map_err(py_err)?;
    let opts = RunOptions {
        seed,
        retries,
        field: field.map(parse_field).transpose().map_err(py_err)?,
        cache_dir,
        ..RunOptions::default()
    };
    let report = vancycles::pipeline::run(&p, &opts).map_err(py_err)?;
    ser(py, &report)
}

#[pymodule]
fn vancycles_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyIdeal>()?;
    m.add("GenericityError", m.py().get_type::<GenericityError>())?;
    m.add_function(wrap_pyfunction!(milnor_number, m)?)?;
    m.add_function(wrap_pyfunction!(polar_curve, m)?)?;
    m.add_function(wrap_pyfunction!(conormal, m)?)?;
    m.add_function(wrap_pyfunction!(af_pair, m)?)?;
    m.add_function(wrap_pyfunction!(corpus_names, m)?)?;
    m.add_function(wrap_pyfunction!(corpus_transfer, m)?)?;
    m.add_function(wrap_pyfunction!(corpus_index_check, m)?)?;
    m.add_function(wrap_pyfunction!(run_problem, m)?)?;
    m.add("__version__", vancycles::pipeline::VERSION)?;
    Ok(())
}
