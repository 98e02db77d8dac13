//! Python bindings: fans, toric varieties, reports and the catalog.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde::Serialize;
use serde_json::Value;

use superpot::catalog;
use superpot::{cy4, mori, superpot as sp, DivisorClass, Error, Fan, ToricVariety};

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Consistency(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn value_to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.to_string().into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(a) => {
            let items = a.iter().map(|x| value_to_py(py, x)).collect::<PyResult<Vec<_>>>()?;
            PyList::new(py, items)?.into_any()
        }
        Value::Object(o) => {
            let d = PyDict::new(py);
            for (k, x) in o {
                d.set_item(k, value_to_py(py, x)?)?;
            }
            d.into_any()
        }
    })
}

fn to_py<'py, T: Serialize>(py: Python<'py>, x: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(x).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    value_to_py(py, &v)
}

/// Combinatorial fan: rays and maximal cones.
#[pyclass(name = "Fan", from_py_object)]
#[derive(Clone)]
struct PyFan {
    inner: Fan,
}

#[pymethods]
impl PyFan {
    #[new]
    fn new(name: String, rays: Vec<Vec<i64>>, max_cones: Vec<Vec<usize>>) -> Self {
        Self {
            inner: Fan::new(name, rays, max_cones),
        }
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: Fan::from_json(text).map_err(to_py_err)?,
        })
    }

    /// Built-in toric Fano threefold by symbol, e.g. `"F_6"`.
    #[staticmethod]
    fn builtin(symbol: &str) -> PyResult<Self> {
        Ok(Self {
            inner: catalog::builtin_toric_fano(symbol).map_err(to_py_err)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn rays(&self) -> Vec<Vec<i64>> {
        self.inner.rays.iter().map(|r| r.0.clone()).collect()
    }

    #[getter]
    fn max_cones(&self) -> Vec<Vec<usize>> {
        self.inner.max_cones.clone()
    }

    fn star_subdivide(&self, cone: Vec<usize>) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.star_subdivide(&cone).map_err(to_py_err)?,
        })
    }

    fn is_isomorphic(&self, other: &PyFan) -> bool {
        self.inner.is_isomorphic(&other.inner)
    }

    fn validate<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &superpot::toric::validate_fan(&self.inner).map_err(to_py_err)?)
    }

    fn __repr__(&self) -> String {
        format!("Fan({:?}, {} rays, {} cones)", self.inner.name, self.inner.rays.len(), self.inner.max_cones.len())
    }
}

/// Smooth complete toric variety of dimension 2 or 3.
#[pyclass(name = "ToricVariety")]
struct PyToricVariety {
    inner: ToricVariety,
}

impl PyToricVariety {
    fn divisor(&self, coeffs: Vec<i64>) -> PyResult<DivisorClass> {
        if coeffs.len() != self.inner.ray_count() {
            return Err(PyValueError::new_err(format!(
                "divisor has {} coefficients but the fan has {} rays",
                coeffs.len(),
                self.inner.ray_count()
            )));
        }
        Ok(DivisorClass::new(coeffs))
    }
}

#[pymethods]
impl PyToricVariety {
    #[new]
    fn new(fan: PyFan) -> PyResult<Self> {
        Ok(Self {
            inner: ToricVariety::new(fan.inner).map_err(to_py_err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn ray_count(&self) -> usize {
        self.inner.ray_count()
    }

    #[getter]
    fn picard_rank(&self) -> usize {
        self.inner.picard_rank()
    }

    fn canonical_class(&self) -> Vec<i64> {
        self.inner.canonical_class().coeffs
    }

    fn anticanonical_degree(&self) -> i64 {
        self.inner.anticanonical_degree()
    }

    fn c1c2(&self) -> i64 {
        self.inner.c1c2()
    }

    fn triple_intersection(&self, a: Vec<i64>, b: Vec<i64>, c: Vec<i64>) -> PyResult<i64> {
        let (a, b, c) = (self.divisor(a)?, self.divisor(b)?, self.divisor(c)?);
        self.inner.triple_intersection(&a, &b, &c).map_err(to_py_err)
    }

    fn c2_pairing(&self, l: Vec<i64>) -> PyResult<i64> {
        let l = self.divisor(l)?;
        self.inner.c2_pairing(&l).map_err(to_py_err)
    }

    fn line_bundle_cohomology(&self, l: Vec<i64>) -> PyResult<Vec<i64>> {
        let l = self.divisor(l)?;
        self.inner.line_bundle_cohomology(&l).map_err(to_py_err)
    }

    /// Riemann–Roch Euler characteristic as an exact fraction string.
    fn riemann_roch(&self, l: Vec<i64>) -> PyResult<String> {
        let l = self.divisor(l)?;
        Ok(self.inner.riemann_roch(&l).map_err(to_py_err)?.to_string())
    }

    fn star_surface<'py>(&self, py: Python<'py>, ray: usize) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.star_surface(ray).map_err(to_py_err)?)
    }

    fn mori_cone_rays(&self) -> PyResult<Vec<Vec<i64>>> {
        Ok(mori::mori_cone_rays(&self.inner)
            .map_err(to_py_err)?
            .into_iter()
            .map(|r| r.class.pairing)
            .collect())
    }

    fn is_nef(&self, l: Vec<i64>) -> PyResult<bool> {
        let l = self.divisor(l)?;
        mori::is_nef(&self.inner, &l).map_err(to_py_err)
    }

    fn is_ample(&self, l: Vec<i64>) -> PyResult<bool> {
        let l = self.divisor(l)?;
        mori::is_ample(&self.inner, &l).map_err(to_py_err)
    }

    fn classify_contractions<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &mori::classify_all(&self.inner).map_err(to_py_err)?)
    }

    fn chi_of_pullback(&self, ray: usize) -> PyResult<i64> {
        sp::chi_of_pullback(&self.inner, ray).map_err(to_py_err)
    }

    fn h_vector_of_pullback(&self, ray: usize) -> PyResult<Vec<i64>> {
        Ok(sp::h_vector_of_pullback(&self.inner, ray).map_err(to_py_err)?.to_vec())
    }

    /// Full base report as nested dicts.
    fn analyze<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &catalog::analyze_with_targets(&self.inner).map_err(to_py_err)?)
    }

    fn chi_x(&self) -> PyResult<i64> {
        cy4::chi_x(&self.inner).map_err(to_py_err)
    }
}

#[pyfunction]
fn ell_index(chi: i64) -> Option<i64> {
    cy4::ell_index(chi)
}

#[pyfunction]
fn chi_x_from_degree(minus_k_cubed: i64) -> i64 {
    cy4::chi_x_from_degree(minus_k_cubed)
}

type ClassList = Vec<(i64, Vec<i64>)>;

/// `(d, [a_1..a_r])` pairs, or `None` when there are infinitely many.
#[pyfunction]
fn minus_one_curves(points: usize) -> PyResult<Option<ClassList>> {
    Ok(match catalog::minus_one_curves(points).map_err(to_py_err)? {
        catalog::MinusOneCurves::Finite(v) => Some(v.into_iter().map(|c| (c.d, c.a)).collect()),
        catalog::MinusOneCurves::Infinite => None,
    })
}

#[pyfunction]
fn p1_times_delpezzo_report<'py>(py: Python<'py>, k: u32) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &catalog::p1_times_delpezzo_report(k).map_err(to_py_err)?)
}

#[pyfunction]
#[pyo3(signature = (text=None))]
fn load_records<'py>(py: Python<'py>, text: Option<&str>) -> PyResult<Bound<'py, PyAny>> {
    let records = catalog::parse_records(text.unwrap_or(catalog::SHIPPED_CATALOG)).map_err(to_py_err)?;
    catalog::validate_records(&records).map_err(to_py_err)?;
    to_py(py, &records)
}

/// Table check against the shipped catalog or a given JSON text.
#[pyfunction]
#[pyo3(signature = (text=None))]
fn check_tables<'py>(py: Python<'py>, text: Option<&str>) -> PyResult<Bound<'py, PyAny>> {
    let records = catalog::parse_records(text.unwrap_or(catalog::SHIPPED_CATALOG)).map_err(to_py_err)?;
    let report = py.detach(|| catalog::check_tables(&records)).map_err(to_py_err)?;
    to_py(py, &report)
}

#[pyfunction]
fn transition_graph_dot() -> PyResult<String> {
    let records = catalog::shipped_records();
    Ok(catalog::transition_graph(&records).map_err(to_py_err)?.to_dot())
}

#[pymodule]
fn pysuperpot(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFan>()?;
    m.add_class::<PyToricVariety>()?;
    m.add_function(wrap_pyfunction!(ell_index, m)?)?;
    m.add_function(wrap_pyfunction!(chi_x_from_degree, m)?)?;
    m.add_function(wrap_pyfunction!(minus_one_curves, m)?)?;
    m.add_function(wrap_pyfunction!(p1_times_delpezzo_report, m)?)?;
    m.add_function(wrap_pyfunction!(load_records, m)?)?;
    m.add_function(wrap_pyfunction!(check_tables, m)?)?;
    m.add_function(wrap_pyfunction!(transition_graph_dot, m)?)?;
    Ok(())
}
