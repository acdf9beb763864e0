//! Python bindings. Partitions and side maps travel as the CLI strings
//! ("llrlr", "1,3|2,4,5"); rationals as `fractions.Fraction`; matrices as
//! lists of rows.

use bifree::base_algebra::{AOperator, Bimodule as CoreBimodule, OperatorSpace, QMatrix};
use bifree::bnc_core::{self, BncPartition, SetPartition, ShadingMap, SideMap};
use bifree::moment_cumulant::{self, OperatorTuple};
use bifree::operator_model::{FpOp, FreeProduct as CoreFreeProduct};
use bifree::scalar::{fmt_q, parse_q};
use bifree::suites;
use bifree::Q;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn val<T>(r: bifree::Result<T>) -> PyResult<T> {
    r.map_err(|e| PyValueError::new_err(e.to_string()))
}

fn side_map(s: &str) -> PyResult<SideMap> {
    val(SideMap::parse(s))
}

fn bnc(chi: &str, pi: &str) -> PyResult<BncPartition> {
    val(BncPartition::parse(pi, &side_map(chi)?))
}

fn fraction<'py>(py: Python<'py>, x: &Q) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((fmt_q(x),))
}

fn to_rows<'py>(py: Python<'py>, m: &QMatrix) -> PyResult<Vec<Vec<Bound<'py, PyAny>>>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(|x| fraction(py, x)).collect()).collect()
}

fn from_rows(rows: Vec<Vec<Bound<'_, PyAny>>>) -> PyResult<QMatrix> {
    let q = rows
        .iter()
        .map(|r| r.iter().map(|x| val(parse_q(x.str()?.to_str()?))).collect::<PyResult<Vec<Q>>>())
        .collect::<PyResult<Vec<_>>>()?;
    val(QMatrix::from_rows(q))
}

/// An operator on a single bimodule.
#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone)]
struct Operator {
    inner: AOperator,
}

#[pymethods]
impl Operator {
    fn matrix<'py>(&self, py: Python<'py>) -> PyResult<Vec<Vec<Bound<'py, PyAny>>>> {
        to_rows(py, self.inner.matrix())
    }

    fn __matmul__(&self, other: &Operator) -> Operator {
        Operator { inner: self.inner.compose(&other.inner) }
    }

    fn __add__(&self, other: &Operator) -> Operator {
        Operator { inner: self.inner.add(&other.inner) }
    }
}

/// B ⊕ X̊ over B = M_d(Q) with m copies of B in X̊.
#[pyclass(frozen)]
struct Bimodule {
    inner: Arc<CoreBimodule>,
}

impl Bimodule {
    fn tuple(&self, chi: &str, ops: Vec<PyRef<'_, Operator>>) -> PyResult<OperatorTuple<CoreBimodule>> {
        let ops = ops.iter().map(|o| o.inner.clone()).collect();
        val(OperatorTuple::new(self.inner.clone(), side_map(chi)?, ops))
    }
}

#[pymethods]
impl Bimodule {
    #[staticmethod]
    fn central(d: usize, m: usize) -> Self {
        Bimodule { inner: Arc::new(CoreBimodule::central(d, m)) }
    }

    #[staticmethod]
    fn random(d: usize, m: usize, seed: u64) -> Self {
        Bimodule { inner: Arc::new(CoreBimodule::random(d, m, &mut ChaCha8Rng::seed_from_u64(seed))) }
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.d()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// X ↦ AX for a (1+m)d-square A.
    fn left_operator(&self, a: Vec<Vec<Bound<'_, PyAny>>>) -> PyResult<Operator> {
        Ok(Operator { inner: val(self.inner.left_operator_from(&from_rows(a)?))? })
    }

    fn right_operator(&self, c: Vec<Vec<Bound<'_, PyAny>>>) -> PyResult<Operator> {
        Ok(Operator { inner: val(self.inner.right_operator_from(&from_rows(c)?))? })
    }

    #[pyo3(signature = (seed, range=2))]
    fn random_left_operator(&self, seed: u64, range: i64) -> Operator {
        Operator { inner: self.inner.random_left_operator(range, &mut ChaCha8Rng::seed_from_u64(seed)) }
    }

    #[pyo3(signature = (seed, range=2))]
    fn random_right_operator(&self, seed: u64, range: i64) -> Operator {
        Operator { inner: self.inner.random_right_operator(range, &mut ChaCha8Rng::seed_from_u64(seed)) }
    }

    fn lb(&self, b: Vec<Vec<Bound<'_, PyAny>>>) -> PyResult<Operator> {
        Ok(Operator { inner: val(self.inner.make_lb(&from_rows(b)?))? })
    }

    fn rb(&self, b: Vec<Vec<Bound<'_, PyAny>>>) -> PyResult<Operator> {
        Ok(Operator { inner: val(self.inner.make_rb(&from_rows(b)?))? })
    }

    fn is_left_operator(&self, t: &Operator) -> bool {
        self.inner.is_left_operator(&t.inner)
    }

    fn is_right_operator(&self, t: &Operator) -> bool {
        self.inner.is_right_operator(&t.inner)
    }

    fn expectation<'py>(&self, py: Python<'py>, t: &Operator) -> PyResult<Vec<Vec<Bound<'py, PyAny>>>> {
        to_rows(py, &val(self.inner.expectation(&t.inner))?)
    }

    /// E(T₁⋯T_n).
    fn expect_word<'py>(&self, py: Python<'py>, ops: Vec<PyRef<'_, Operator>>) -> PyResult<Vec<Vec<Bound<'py, PyAny>>>> {
        let refs: Vec<&AOperator> = ops.iter().map(|o| &o.inner).collect();
        to_rows(py, &val(self.inner.expect_word(&refs))?)
    }

    fn e_pi<'py>(
        &self,
        py: Python<'py>,
        chi: &str,
        pi: &str,
        ops: Vec<PyRef<'_, Operator>>,
    ) -> PyResult<Vec<Vec<Bound<'py, PyAny>>>> {
        let t = self.tuple(chi, ops)?;
        to_rows(py, &val(moment_cumulant::e_pi(&bnc(chi, pi)?, &t))?)
    }

    fn kappa_pi<'py>(
        &self,
        py: Python<'py>,
        chi: &str,
        pi: &str,
        ops: Vec<PyRef<'_, Operator>>,
    ) -> PyResult<Vec<Vec<Bound<'py, PyAny>>>> {
        let t = self.tuple(chi, ops)?;
        to_rows(py, &val(moment_cumulant::kappa_pi(&bnc(chi, pi)?, &t))?)
    }
}

/// An operator on a free product.
#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone)]
struct FpOperator {
    inner: FpOp,
}

/// The reduced free product of bimodules, truncated at a word depth.
#[pyclass(frozen)]
struct FreeProduct {
    inner: Arc<CoreFreeProduct>,
}

impl FreeProduct {
    fn tuple(&self, chi: &str, ops: Vec<PyRef<'_, FpOperator>>) -> PyResult<OperatorTuple<CoreFreeProduct>> {
        let ops = ops.iter().map(|o| o.inner.clone()).collect();
        val(OperatorTuple::new_unchecked(self.inner.clone(), side_map(chi)?, ops))
    }
}

#[pymethods]
impl FreeProduct {
    #[new]
    fn new(components: Vec<PyRef<'_, Bimodule>>, depth: usize) -> PyResult<Self> {
        let comps = components.iter().map(|b| b.inner.clone()).collect();
        Ok(FreeProduct { inner: Arc::new(val(CoreFreeProduct::new(comps, depth))?) })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn depth(&self) -> usize {
        self.inner.depth()
    }

    /// λ_k(T) for a left operator T on component k.
    fn lam(&self, k: usize, t: &Operator) -> PyResult<FpOperator> {
        Ok(FpOperator { inner: val(self.inner.lambda(k, &t.inner))? })
    }

    /// ρ_k(T) for a right operator T on component k.
    fn rho(&self, k: usize, t: &Operator) -> PyResult<FpOperator> {
        Ok(FpOperator { inner: val(self.inner.rho(k, &t.inner))? })
    }

    fn product(&self, ops: Vec<PyRef<'_, FpOperator>>) -> FpOperator {
        let ops: Vec<FpOp> = ops.iter().map(|o| o.inner.clone()).collect();
        FpOperator { inner: self.inner.product(&ops) }
    }

    fn expect_word<'py>(&self, py: Python<'py>, ops: Vec<PyRef<'_, FpOperator>>) -> PyResult<Vec<Vec<Bound<'py, PyAny>>>> {
        let refs: Vec<&FpOp> = ops.iter().map(|o| &o.inner).collect();
        to_rows(py, &val(self.inner.expect_word(&refs))?)
    }

    fn e_pi<'py>(
        &self,
        py: Python<'py>,
        chi: &str,
        pi: &str,
        ops: Vec<PyRef<'_, FpOperator>>,
    ) -> PyResult<Vec<Vec<Bound<'py, PyAny>>>> {
        let t = self.tuple(chi, ops)?;
        to_rows(py, &val(moment_cumulant::e_pi(&bnc(chi, pi)?, &t))?)
    }

    fn kappa_pi<'py>(
        &self,
        py: Python<'py>,
        chi: &str,
        pi: &str,
        ops: Vec<PyRef<'_, FpOperator>>,
    ) -> PyResult<Vec<Vec<Bound<'py, PyAny>>>> {
        let t = self.tuple(chi, ops)?;
        to_rows(py, &val(moment_cumulant::kappa_pi(&bnc(chi, pi)?, &t))?)
    }
}

/// Every π ∈ BNC(χ) in canonical order.
#[pyfunction]
fn enumerate_bnc(chi: &str) -> PyResult<Vec<String>> {
    Ok(val(bnc_core::enumerate_bnc(&side_map(chi)?))?.iter().map(|p| p.to_string()).collect())
}

#[pyfunction]
fn is_bi_noncrossing(chi: &str, pi: &str) -> PyResult<bool> {
    val(bnc_core::is_bi_noncrossing(&val(SetPartition::parse(pi))?, &side_map(chi)?))
}

#[pyfunction]
fn kreweras(chi: &str, pi: &str) -> PyResult<String> {
    Ok(bnc_core::kreweras(&bnc(chi, pi)?).to_string())
}

#[pyfunction]
fn refines(chi: &str, pi: &str, sigma: &str) -> PyResult<bool> {
    val(bnc_core::refines(&bnc(chi, pi)?, &bnc(chi, sigma)?))
}

/// μ_BNC(π, σ).
#[pyfunction]
fn mobius<'py>(py: Python<'py>, chi: &str, pi: &str, sigma: &str) -> PyResult<Bound<'py, PyAny>> {
    fraction(py, &val(bifree::incidence::mobius_bnc(&bnc(chi, pi)?, &bnc(chi, sigma)?))?)
}

/// The nested expression of E_π.
#[pyfunction]
fn trace(chi: &str, pi: &str) -> PyResult<String> {
    Ok(moment_cumulant::trace(&bnc(chi, pi)?, false))
}

#[pyfunction]
fn lr_diagrams(chi: &str, eps: &str) -> PyResult<Vec<String>> {
    let eps = val(ShadingMap::parse(eps))?;
    Ok(val(bifree::lr_diagrams::enumerate_lr(&side_map(chi)?, &eps))?.iter().map(|d| d.to_string()).collect())
}

/// Runs a verification suite; returns (passed, report text).
#[pyfunction]
#[pyo3(signature = (suite, seed=0, max_n=None, depth=None, window=None, budget=None))]
fn verify(
    suite: &str,
    seed: u64,
    max_n: Option<usize>,
    depth: Option<usize>,
    window: Option<usize>,
    budget: Option<usize>,
) -> PyResult<(bool, String)> {
    let k = val(suites::suite_number(suite))?;
    let r = val(suites::run_suite(k, &suites::SuiteParams { seed, max_n, depth, window, budget }))?;
    Ok((r.passed(), suites::render_report(&r)))
}

#[pymodule]
pub fn pybifree(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Operator>()?;
    m.add_class::<Bimodule>()?;
    m.add_class::<FpOperator>()?;
    m.add_class::<FreeProduct>()?;
    m.add_function(wrap_pyfunction!(enumerate_bnc, m)?)?;
    m.add_function(wrap_pyfunction!(is_bi_noncrossing, m)?)?;
    m.add_function(wrap_pyfunction!(kreweras, m)?)?;
    m.add_function(wrap_pyfunction!(refines, m)?)?;
    m.add_function(wrap_pyfunction!(mobius, m)?)?;
    m.add_function(wrap_pyfunction!(trace, m)?)?;
    m.add_function(wrap_pyfunction!(lr_diagrams, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
