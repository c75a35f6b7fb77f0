//! Python bindings for the `eulerchar` crate.

use std::collections::BTreeMap;
use std::sync::Arc;

use eulerchar::cardinality::FormalCardinality;
use eulerchar::cohom::{self, oracle, CohomologyReport};
use eulerchar::error::Error;
use eulerchar::fingroup::{parse_permutation, FiniteGroup};
use eulerchar::formulas;
use eulerchar::galmod::{FiniteAbelianPGroup, GaloisModule};
use eulerchar::numfield::{self, NumberField};
use eulerchar::report;
use eulerchar::scenario;
use eulerchar::selftest;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: Error) -> PyErr {
    if e.is_schema() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn exponents(c: &FormalCardinality) -> BTreeMap<u64, i64> {
    c.exponents().clone()
}

/// Reports for every scenario in a scenario-file JSON string, as a JSON array.
pub fn run_scenarios_json(text: &str) -> Result<String, Error> {
    let file = scenario::parse_file(text)?;
    let outcomes = report::run_batch(&file.scenarios);
    let v: Vec<serde_json::Value> = outcomes.iter().map(report::Outcome::to_json).collect();
    Ok(serde_json::to_string(&v).expect("serializable"))
}

#[pyclass(name = "NumberField", module = "eulerchar", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyNumberField {
    inner: NumberField,
}

#[pymethods]
impl PyNumberField {
    /// Field defined by a monic irreducible polynomial, constant term first.
    #[new]
    fn new(poly: Vec<i128>) -> PyResult<Self> {
        Ok(Self { inner: NumberField::new(poly).map_err(py_err)? })
    }

    #[staticmethod]
    fn quadratic(d: i64) -> PyResult<Self> {
        Ok(Self { inner: NumberField::quadratic(d).map_err(py_err)? })
    }

    #[staticmethod]
    fn rationals() -> Self {
        Self { inner: NumberField::rationals() }
    }

    #[getter]
    fn min_poly(&self) -> Vec<i128> {
        self.inner.min_poly().to_vec()
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    fn signature(&self) -> (usize, usize) {
        self.inner.signature()
    }

    fn discriminant(&self) -> String {
        self.inner.discriminant().to_string()
    }

    /// (list of (e, f), index_warning)
    fn split_prime(&self, p: u64) -> PyResult<(Vec<(u32, u32)>, bool)> {
        let sp = numfield::split_prime(&self.inner, p).map_err(py_err)?;
        Ok((sp.factors.iter().map(|lf| (lf.e, lf.f)).collect(), sp.index_warning))
    }

    fn product_formula_check(&self, num: i64, den: u64) -> PyResult<bool> {
        numfield::product_formula_check(&self.inner, num, den).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("NumberField({:?})", self.inner.min_poly())
    }
}

#[pyclass(name = "FiniteGroup", module = "eulerchar", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyFiniteGroup {
    inner: Arc<FiniteGroup>,
}

#[pymethods]
impl PyFiniteGroup {
    /// One of trivial, C_n, Q8, Klein4, S3.
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        Ok(Self { inner: Arc::new(FiniteGroup::builtin(name).map_err(py_err)?) })
    }

    /// Closure of permutations given in cycle notation, e.g. "(1 2 3)".
    #[staticmethod]
    fn from_permutations(generators: Vec<String>) -> PyResult<Self> {
        let gens = generators.iter().map(|s| parse_permutation(s)).collect::<Result<Vec<_>, _>>().map_err(py_err)?;
        Ok(Self { inner: Arc::new(FiniteGroup::from_permutations(&gens).map_err(py_err)?) })
    }

    #[staticmethod]
    #[pyo3(signature = (table, labels=None))]
    fn from_table(table: Vec<Vec<usize>>, labels: Option<Vec<String>>) -> PyResult<Self> {
        Ok(Self { inner: Arc::new(FiniteGroup::from_table(table, labels).map_err(py_err)?) })
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.labels().to_vec()
    }

    fn is_abelian(&self) -> bool {
        self.inner.is_abelian()
    }

    fn is_cyclic(&self) -> bool {
        self.inner.is_cyclic()
    }

    fn involutions(&self) -> Vec<String> {
        self.inner.involutions().into_iter().map(|g| self.inner.label(g).to_string()).collect()
    }

    fn abelianization(&self) -> Vec<u64> {
        self.inner.abelianization()
    }

    fn minimal_generators(&self) -> PyResult<usize> {
        self.inner.minimal_generators().map_err(py_err)
    }

    fn __len__(&self) -> usize {
        self.inner.order()
    }

    fn __repr__(&self) -> String {
        format!("FiniteGroup(order={})", self.inner.order())
    }
}

fn cohomology_dict(r: &CohomologyReport) -> BTreeMap<String, Py<PyAny>> {
    Python::attach(|py| {
        let mut out = BTreeMap::new();
        let orders: Vec<BTreeMap<u64, i64>> = r.orders.iter().map(exponents).collect();
        out.insert("orders".into(), orders.into_pyobject(py).expect("convertible").into_any().unbind());
        out.insert("dims".into(), r.dims.map(|d| d.to_vec()).into_pyobject(py).expect("convertible").into_any().unbind());
        out.insert("tate_h0".into(), exponents(&r.tate_h0).into_pyobject(py).expect("convertible").into_any().unbind());
        let engine = serde_json::to_value(r.engine).expect("serializable");
        out.insert("engine".into(), engine.as_str().unwrap_or_default().into_pyobject(py).expect("convertible").into_any().unbind());
        out
    })
}

#[pyclass(name = "GaloisModule", module = "eulerchar", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyGaloisModule {
    inner: GaloisModule,
}

#[pymethods]
impl PyGaloisModule {
    /// Finite abelian p-group with the given exponents, acted on through
    /// images of generating elements (labels to integer matrices).
    #[new]
    #[pyo3(signature = (group, p, exponents, action=None, cyclo_char=None))]
    fn new(
        group: &PyFiniteGroup,
        p: u64,
        exponents: Vec<u32>,
        action: Option<BTreeMap<String, Vec<Vec<i64>>>>,
        cyclo_char: Option<BTreeMap<String, i64>>,
    ) -> PyResult<Self> {
        let spec = scenario::ModuleSpec {
            p,
            exponents,
            action: action.unwrap_or_default(),
            cyclo_char: cyclo_char.map(scenario::CycloSpec::Images),
        };
        Ok(Self { inner: scenario::build_module(&group.inner, &spec, vec![]).map_err(py_err)? })
    }

    #[staticmethod]
    fn trivial(group: &PyFiniteGroup, p: u64, exponents: Vec<u32>) -> PyResult<Self> {
        let m = FiniteAbelianPGroup::new(p, exponents).map_err(py_err)?;
        Ok(Self { inner: GaloisModule::trivial(group.inner.clone(), m, vec![]).map_err(py_err)? })
    }

    #[getter]
    fn p(&self) -> u64 {
        self.inner.p()
    }

    fn order(&self) -> BTreeMap<u64, i64> {
        exponents(&self.inner.order())
    }

    fn invariants(&self) -> PyResult<BTreeMap<u64, i64>> {
        Ok(exponents(&self.inner.invariants().map_err(py_err)?))
    }

    /// H^0, H^1, H^2 by the normal-form engine, or by the prime-field oracle
    /// with engine="fp-linear".
    #[pyo3(signature = (engine="snf"))]
    fn cohomology(&self, engine: &str) -> PyResult<BTreeMap<String, Py<PyAny>>> {
        let r = match engine {
            "snf" => cohom::cohomology(&self.inner),
            "fp-linear" => oracle::cocycle_oracle(&self.inner),
            other => return Err(PyValueError::new_err(format!("unknown engine {other:?}"))),
        };
        Ok(cohomology_dict(&r.map_err(py_err)?))
    }

    fn chi2(&self) -> PyResult<BTreeMap<u64, i64>> {
        Ok(exponents(&cohom::chi2_finite(&self.inner).map_err(py_err)?))
    }

    fn herbrand_quotient(&self) -> PyResult<BTreeMap<u64, i64>> {
        Ok(exponents(&cohom::herbrand_quotient(&self.inner).map_err(py_err)?))
    }
}

#[pyfunction]
fn lubotzky_r(d: u64, h1: u64, h2: u64, dim_m: u64, trivial: bool) -> PyResult<i64> {
    if dim_m == 0 {
        return Err(PyValueError::new_err("dim_m must be positive"));
    }
    Ok(formulas::lubotzky_r(d, h1, h2, dim_m, trivial))
}

/// Evaluates a scenario file given as a JSON string; returns the reports as JSON.
#[pyfunction]
fn run_scenarios(text: &str) -> PyResult<String> {
    run_scenarios_json(text).map_err(py_err)
}

/// The bundled example scenario files, as (name, JSON text) pairs.
#[pyfunction]
fn bundled_scenarios() -> Vec<(String, String)> {
    selftest::BUNDLED.iter().map(|(n, t)| (n.to_string(), t.to_string())).collect()
}

/// Runs the invariant suites; returns {suite: number of failures}.
#[pyfunction]
#[pyo3(signature = (filter=None, seed=0))]
fn run_selftest(filter: Option<String>, seed: u64) -> PyResult<BTreeMap<String, usize>> {
    let results = selftest::run(&selftest::Options { seed, filter, table: None }).map_err(py_err)?;
    Ok(results.into_iter().map(|r| (r.name, r.failures.len())).collect())
}

#[pymodule]
#[pyo3(name = "eulerchar")]
fn eulerchar_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyNumberField>()?;
    m.add_class::<PyFiniteGroup>()?;
    m.add_class::<PyGaloisModule>()?;
    m.add_function(wrap_pyfunction!(lubotzky_r, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenarios, m)?)?;
    m.add_function(wrap_pyfunction!(bundled_scenarios, m)?)?;
    m.add_function(wrap_pyfunction!(run_selftest, m)?)?;
    Ok(())
}
