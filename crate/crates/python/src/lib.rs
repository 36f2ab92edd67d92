//! Python bindings: fields, templates, the character table, tensor and
//! discrete-series decompositions, counting and verification.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use engine::characters::{build_table, char_value_closed};
use engine::clusters::{bell_poly_all, classify_adjoint, classify_coadjoint, cluster_size, enumerate_templates, invariants_of, Template};
use engine::config::Caps;
use engine::discrete::delta_decompose;
use engine::matrix::{Functional, NilMatrix};
use engine::tensor::{Factor, TensorEngine};
use engine::verify::{verify as run_verify, VerifyOptions};
use engine::{Error, FieldElement};

create_exception!(supercluster, SuperclusterError, PyException);
create_exception!(supercluster, ResourceLimitError, SuperclusterError);
create_exception!(supercluster, InvariantViolation, SuperclusterError);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Argument(_) | Error::Parse(_) | Error::Domain(_) => PyValueError::new_err(e.to_string()),
        Error::ResourceLimit { .. } => ResourceLimitError::new_err(e.to_string()),
        Error::InvariantViolation(_) => InvariantViolation::new_err(e.to_string()),
        Error::Internal(_) => SuperclusterError::new_err(e.to_string()),
    }
}

fn caps() -> PyResult<Caps> {
    Caps::from_env().map_err(to_py)
}

/// A field element given as an integer (reduced into the prime field) or
/// in text form.
#[derive(FromPyObject)]
enum Elem {
    Int(i64),
    Text(String),
}

/// The finite field GF(p^k).
#[pyclass(name = "Field", frozen, eq, hash, skip_from_py_object)]
#[derive(Clone)]
struct PyField(engine::Field);

impl PartialEq for PyField {
    fn eq(&self, other: &Self) -> bool {
        self.0.p() == other.0.p() && self.0.modulus() == other.0.modulus()
    }
}

impl std::hash::Hash for PyField {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        (self.0.p(), self.0.modulus()).hash(state);
    }
}

impl PyField {
    fn element(&self, e: Elem) -> PyResult<FieldElement> {
        match e {
            Elem::Int(v) => Ok(self.0.from_int(v)),
            Elem::Text(s) => self.0.parse(&s).map_err(to_py),
        }
    }

    fn cells(&self, n: usize, cells: Vec<(usize, usize, Elem)>) -> PyResult<Vec<(usize, usize, FieldElement)>> {
        cells
            .into_iter()
            .map(|(i, j, a)| {
                if !(1 <= i && i < j && j <= n) {
                    return Err(PyValueError::new_err(format!("({i},{j}) is not above the diagonal for n = {n}")));
                }
                Ok((i, j, self.element(a)?))
            })
            .collect()
    }
}

#[pymethods]
impl PyField {
    #[new]
    #[pyo3(signature = (p, k = 1))]
    fn new(p: u32, k: u32) -> PyResult<Self> {
        engine::Field::new(p, k).map(PyField).map_err(to_py)
    }

    #[getter]
    fn p(&self) -> u32 {
        self.0.p()
    }

    #[getter]
    fn k(&self) -> u32 {
        self.0.k()
    }

    #[getter]
    fn q(&self) -> u32 {
        self.0.q()
    }

    /// Coefficients of the defining polynomial, constant term first.
    #[getter]
    fn modulus(&self) -> Vec<u32> {
        self.0.modulus().to_vec()
    }

    fn elements(&self) -> Vec<String> {
        self.0.elements().map(|a| self.0.format(a)).collect()
    }

    fn __repr__(&self) -> String {
        format!("Field({}, {})", self.0.p(), self.0.k())
    }
}

/// A rook placement naming an adjoint or coadjoint cluster.
#[pyclass(name = "Template", frozen, eq, hash, skip_from_py_object)]
#[derive(Clone)]
struct PyTemplate {
    field: engine::Field,
    inner: Template,
}

impl PartialEq for PyTemplate {
    fn eq(&self, other: &Self) -> bool {
        self.inner == other.inner && self.field.modulus() == other.field.modulus() && self.field.p() == other.field.p()
    }
}

impl std::hash::Hash for PyTemplate {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.inner.hash(state);
    }
}

impl PyTemplate {
    fn wrap(field: &engine::Field, inner: Template) -> Self {
        PyTemplate { field: field.clone(), inner }
    }
}

#[pymethods]
impl PyTemplate {
    /// Parses the text form, e.g. `"(1,3)=1;(2,4)=2"`, or `"0"` for the
    /// empty template.
    #[new]
    fn new(field: &PyField, n: usize, text: &str) -> PyResult<Self> {
        Template::parse(&field.0, n, text).map(|t| PyTemplate::wrap(&field.0, t)).map_err(to_py)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn cells(&self) -> Vec<(usize, usize, String)> {
        self.inner.cells().iter().map(|&(i, j, a)| (i, j, self.field.format(a))).collect()
    }

    /// Dimension index: the degree of the cluster character is q^d.
    #[getter]
    fn d(&self) -> u32 {
        invariants_of(&self.inner).d
    }

    /// Intertwining index: the self-intertwining number is q^i.
    #[getter]
    fn i(&self) -> u32 {
        invariants_of(&self.inner).i
    }

    fn cluster_size(&self) -> BigUint {
        cluster_size(&self.field, &self.inner)
    }

    fn __str__(&self) -> String {
        self.inner.text(&self.field)
    }

    fn __repr__(&self) -> String {
        format!("Template({:?})", self.inner.text(&self.field))
    }
}

/// All templates of size `n`, in table order.
#[pyfunction]
fn templates(field: &PyField, n: usize) -> Vec<PyTemplate> {
    enumerate_templates(&field.0, n).into_iter().map(|t| PyTemplate::wrap(&field.0, t)).collect()
}

/// The template of the cluster containing the given point.
#[pyfunction]
#[pyo3(signature = (field, n, entries, side = "coadjoint"))]
fn classify(field: &PyField, n: usize, entries: Vec<(usize, usize, Elem)>, side: &str) -> PyResult<PyTemplate> {
    let cells = field.cells(n, entries)?;
    let t = match side {
        "coadjoint" => classify_coadjoint(&field.0, &Functional::from_entries(n, cells).map_err(to_py)?),
        "adjoint" => classify_adjoint(&field.0, &NilMatrix::from_entries(n, cells).map_err(to_py)?),
        other => return Err(PyValueError::new_err(format!("side must be 'adjoint' or 'coadjoint', not {other:?}"))),
    };
    Ok(PyTemplate::wrap(&field.0, t))
}

/// `B(m, q)` for `m = 0..n`.
#[pyfunction]
fn count(n: usize, q: u32) -> Vec<BigUint> {
    bell_poly_all(n, q)
}

/// Value of the character of `tau` at `I + x`, as a polynomial in z = exp(2πi/p).
#[pyfunction]
fn char_value(tau: &PyTemplate, x: &PyTemplate) -> PyResult<String> {
    char_value_closed(&tau.field, &tau.inner, &x.inner).map(|v| v.to_poly_string()).map_err(to_py)
}

/// The character table as a dict with `rows`, `cols` and `values`
/// (polynomials in z = exp(2πi/p)).
#[pyfunction]
fn table(py: Python<'_>, field: &PyField, n: usize) -> PyResult<Py<PyAny>> {
    let t = build_table(&field.0, n, &caps()?).map_err(to_py)?;
    let f = &field.0;
    let out = pyo3::types::PyDict::new(py);
    out.set_item("rows", t.rows.iter().map(|r| r.text(f)).collect::<Vec<_>>())?;
    out.set_item("cols", t.cols.iter().map(|c| c.text(f)).collect::<Vec<_>>())?;
    out.set_item(
        "values",
        t.values.iter().map(|r| r.iter().map(|v| v.to_poly_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
    )?;
    out.set_item("degrees", t.row_degrees)?;
    out.set_item("col_sizes", t.col_sizes)?;
    Ok(out.into_any().unbind())
}

/// Decomposes a product of primary characters `(i, j, a)` into
/// `{template text: multiplicity}`.
#[pyfunction]
fn tensor(field: &PyField, n: usize, factors: Vec<(usize, usize, Elem)>) -> PyResult<BTreeMap<String, BigUint>> {
    let factors: Vec<Factor> = field.cells(n, factors)?;
    let sum = TensorEngine::new(&field.0, n).product(&factors).map_err(to_py)?;
    Ok(sum.terms().iter().map(|(t, m)| (t.text(&field.0), m.clone())).collect())
}

/// The discrete-series character: `(identity value, {template text: multiplicity})`.
#[pyfunction]
fn discrete(field: &PyField, n: usize) -> PyResult<(BigUint, BTreeMap<String, BigUint>)> {
    let d = delta_decompose(&field.0, n, &caps()?).map_err(to_py)?;
    let terms = d.terms.iter().map(|(t, m)| (t.text(&field.0), m.clone())).collect();
    Ok((d.identity_value, terms))
}

/// Runs the certification suite; returns `(all passed, [(key, passed, detail)])`.
#[pyfunction]
#[pyo3(signature = (field, n, seed = 0))]
fn verify(field: &PyField, n: usize, seed: u64) -> PyResult<(bool, Vec<(String, bool, String)>)> {
    let opts = VerifyOptions { caps: caps()?, seed, ..VerifyOptions::default() };
    let report = run_verify(&field.0, n, &opts).map_err(to_py)?;
    let entries = report.entries.iter().map(|e| (e.key.to_string(), e.passed, e.detail.clone())).collect();
    Ok((report.all_passed(), entries))
}

#[pymodule]
fn supercluster(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("SuperclusterError", py.get_type::<SuperclusterError>())?;
    m.add("ResourceLimitError", py.get_type::<ResourceLimitError>())?;
    m.add("InvariantViolation", py.get_type::<InvariantViolation>())?;
    m.add_class::<PyField>()?;
    m.add_class::<PyTemplate>()?;
    m.add_function(wrap_pyfunction!(templates, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(count, m)?)?;
    m.add_function(wrap_pyfunction!(char_value, m)?)?;
    m.add_function(wrap_pyfunction!(table, m)?)?;
    m.add_function(wrap_pyfunction!(tensor, m)?)?;
    m.add_function(wrap_pyfunction!(discrete, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
