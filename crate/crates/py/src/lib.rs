//! Python bindings: free groups, amalgams, finite quotients and the oracle.

use ordsep_core::amalgam::{amalgam_eq, conjugate_in_amalgam, reduce_amalgam};
use ordsep_core::amalgam_graph::{separate_theorem1, SeparateConfig};
use ordsep_core::oracle::{oracle_separate_amalgam, oracle_separate_free, DEFAULT_CAP};
use ordsep_core::surgery::{equalize_with, exact_order_quotient, find_simple_quotient_default};
use ordsep_core::words::{commensurable, conjugate_in_free, primitive_root};
use ordsep_core::{
    ActionGraph, AmalgamActionGraph, AmalgamPresentation, Basis, Budget, Conjugacy, Error, FiniteQuotient, Source,
};
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

create_exception!(ordsep, OrdsepError, PyException);
create_exception!(ordsep, BudgetExceeded, OrdsepError);

fn err(e: Error) -> PyErr {
    match e {
        Error::BudgetExceeded(_) => BudgetExceeded::new_err(e.to_string()),
        _ => OrdsepError::new_err(e.to_string()),
    }
}

fn budget(cap: Option<u64>) -> Budget {
    cap.map(Budget::new).unwrap_or_default()
}

/// A permutation action of a free group, one permutation per generator.
#[pyclass(name = "ActionGraph", module = "ordsep", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyActionGraph {
    inner: ActionGraph,
}

#[pymethods]
impl PyActionGraph {
    #[new]
    fn new(generators: Vec<String>, perms: Vec<Vec<u32>>) -> PyResult<Self> {
        let basis = Basis::new(&generators).map_err(err)?;
        let perms = perms.into_iter().map(ordsep_core::Perm::from_images).collect();
        Ok(PyActionGraph { inner: ActionGraph::new(basis, perms).map_err(err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyActionGraph { inner: ActionGraph::from_json(text).map_err(err)? })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    #[getter]
    fn generators(&self) -> Vec<String> {
        self.inner.basis().names().to_vec()
    }

    fn order(&self, word: &str) -> PyResult<u64> {
        let w = self.inner.basis().parse(word).map_err(err)?;
        Ok(self.inner.element_order(&w))
    }

    /// Lengths of the cycles of `word` on the vertices.
    fn cycle_lengths(&self, word: &str) -> PyResult<Vec<usize>> {
        let w = self.inner.basis().parse(word).map_err(err)?;
        Ok(self.inner.u_cycles(&w).map_err(err)?.iter().map(|c| c.length).collect())
    }

    fn to_dot(&self) -> String {
        self.inner.to_dot(None)
    }

    fn __repr__(&self) -> String {
        format!("ActionGraph(degree={}, generators={:?})", self.inner.degree(), self.inner.basis().names())
    }
}

/// A finite permutation quotient together with the orders it witnesses.
#[pyclass(name = "Quotient", module = "ordsep", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyQuotient {
    inner: FiniteQuotient,
}

#[pymethods]
impl PyQuotient {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyQuotient { inner: FiniteQuotient::from_json(text).map_err(err)? })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn graph(&self) -> PyActionGraph {
        PyActionGraph { inner: self.inner.graph.clone() }
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.graph.degree()
    }

    #[getter]
    fn orders(&self) -> Vec<(String, u64)> {
        self.inner.witness_orders.iter().map(|(k, v)| (k.clone(), *v)).collect()
    }

    #[getter]
    fn log(&self) -> Vec<String> {
        self.inner.log.clone()
    }

    fn order(&self, word: &str) -> PyResult<u64> {
        self.inner.order_of(word).map_err(err)
    }

    /// Recomputes every recorded order from the permutations.
    fn verify(&self) -> PyResult<bool> {
        self.inner.verify().map_err(err)
    }

    fn to_dot(&self) -> PyResult<String> {
        Ok(match self.inner.source {
            Source::Amalgam { .. } => AmalgamActionGraph::from_quotient(&self.inner).map_err(err)?.to_dot(),
            Source::Free { .. } => self.inner.graph.to_dot(None),
        })
    }

    fn __repr__(&self) -> String {
        format!("Quotient(degree={}, orders={:?})", self.inner.graph.degree(), self.inner.witness_orders)
    }
}

/// Free group on named generators.
#[pyclass(name = "FreeGroup", module = "ordsep", frozen)]
struct PyFreeGroup {
    basis: Basis,
}

#[pymethods]
impl PyFreeGroup {
    #[new]
    #[pyo3(signature = (generators = vec!["x".to_string(), "y".to_string()]))]
    fn new(generators: Vec<String>) -> PyResult<Self> {
        Ok(PyFreeGroup { basis: Basis::new(&generators).map_err(err)? })
    }

    #[getter]
    fn generators(&self) -> Vec<String> {
        self.basis.names().to_vec()
    }

    fn reduce(&self, word: &str) -> PyResult<String> {
        Ok(self.basis.format(&self.basis.parse(word).map_err(err)?.reduce()))
    }

    /// `g` with `g^-1 u g = v`, or None.
    fn conjugator(&self, u: &str, v: &str) -> PyResult<Option<String>> {
        let (u, v) = (self.basis.parse(u).map_err(err)?, self.basis.parse(v).map_err(err)?);
        Ok(conjugate_in_free(&u, &v).map(|g| self.basis.format(&g)))
    }

    /// `(root, e)` with `root^e = word` and `root` not a proper power.
    fn root(&self, word: &str) -> PyResult<(String, u64)> {
        let (r, e) = primitive_root(&self.basis.parse(word).map_err(err)?).map_err(err)?;
        Ok((self.basis.format(&r), e))
    }

    fn commensurable(&self, u: &str, v: &str) -> PyResult<bool> {
        let (u, v) = (self.basis.parse(u).map_err(err)?, self.basis.parse(v).map_err(err)?);
        commensurable(&u, &v).map_err(err)
    }

    #[pyo3(signature = (words, l, p = 3, budget = None))]
    fn simple_quotient(&self, words: Vec<String>, l: usize, p: u64, budget: Option<u64>) -> PyResult<PyQuotient> {
        let ws = words.iter().map(|w| self.basis.parse(w)).collect::<Result<Vec<_>, _>>().map_err(err)?;
        let q = find_simple_quotient_default(&self.basis, &ws, p, l, &mut self::budget(budget)).map_err(err)?;
        Ok(PyQuotient { inner: q })
    }

    #[pyo3(signature = (us, v = None, p = 3, min_order = 1, budget = None))]
    fn equalize(
        &self,
        us: Vec<String>,
        v: Option<&str>,
        p: u64,
        min_order: u64,
        budget: Option<u64>,
    ) -> PyResult<PyQuotient> {
        let us = us.iter().map(|w| self.basis.parse(w)).collect::<Result<Vec<_>, _>>().map_err(err)?;
        let v = v.map(|v| self.basis.parse(v)).transpose().map_err(err)?;
        let report = equalize_with(&self.basis, &us, v.as_ref(), p, min_order, &mut self::budget(budget)).map_err(err)?;
        Ok(PyQuotient { inner: report.quotient })
    }

    #[pyo3(signature = (word, n, budget = None))]
    fn exact_order(&self, word: &str, n: u64, budget: Option<u64>) -> PyResult<PyQuotient> {
        let w = self.basis.parse(word).map_err(err)?;
        let q = exact_order_quotient(&self.basis, &w, n, &mut self::budget(budget)).map_err(err)?;
        Ok(PyQuotient { inner: q })
    }

    /// First permutation action on at most `nmax` points telling `u` and `v` apart by order.
    #[pyo3(signature = (u, v, nmax = 4))]
    fn oracle(&self, u: &str, v: &str, nmax: usize) -> PyResult<Option<(usize, u64, PyActionGraph)>> {
        let (u, v) = (self.basis.parse(u).map_err(err)?, self.basis.parse(v).map_err(err)?);
        let hit = oracle_separate_free(&self.basis, &u, &v, nmax, DEFAULT_CAP).map_err(err)?;
        Ok(hit.map(|h| (h.n, h.index, PyActionGraph { inner: h.graph })))
    }
}

/// Amalgamated free product of two free groups over a cyclic subgroup `<a> = <b>`.
#[pyclass(name = "Amalgam", module = "ordsep", frozen)]
struct PyAmalgam {
    pres: AmalgamPresentation,
}

#[pymethods]
impl PyAmalgam {
    #[new]
    #[pyo3(signature = (
        basis_a = vec!["x".to_string(), "y".to_string()],
        basis_b = vec!["s".to_string(), "t".to_string()],
        a = "x",
        b = "s",
    ))]
    fn new(basis_a: Vec<String>, basis_b: Vec<String>, a: &str, b: &str) -> PyResult<Self> {
        let ba: Vec<&str> = basis_a.iter().map(String::as_str).collect();
        let bb: Vec<&str> = basis_b.iter().map(String::as_str).collect();
        Ok(PyAmalgam { pres: AmalgamPresentation::from_names(&ba, &bb, a, b).map_err(err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyAmalgam { pres: AmalgamPresentation::from_json(text).map_err(err)? })
    }

    fn reduce(&self, word: &str) -> PyResult<String> {
        let w = self.pres.parse(word).map_err(err)?;
        Ok(self.pres.format(&reduce_amalgam(&w, &self.pres)))
    }

    fn equal(&self, u: &str, v: &str) -> PyResult<bool> {
        let (u, v) = (self.pres.parse(u).map_err(err)?, self.pres.parse(v).map_err(err)?);
        Ok(amalgam_eq(&u, &v, &self.pres))
    }

    /// `g` with `g^-1 u g = v`, None if not conjugate; raises if undecided within the budget.
    #[pyo3(signature = (u, v, budget = None))]
    fn conjugator(&self, u: &str, v: &str, budget: Option<u64>) -> PyResult<Option<String>> {
        let (u, v) = (self.pres.parse(u).map_err(err)?, self.pres.parse(v).map_err(err)?);
        match conjugate_in_amalgam(&u, &v, &self.pres, &mut self::budget(budget)).map_err(err)? {
            Conjugacy::Yes(g) => Ok(Some(self.pres.format(&g))),
            Conjugacy::No => Ok(None),
            Conjugacy::Unknown => Err(err(Error::UndecidedConjugacy)),
        }
    }

    /// A finite quotient in which `u` and `v` have different orders.
    #[pyo3(signature = (u, v, p = 3, budget = None))]
    fn separate(&self, u: &str, v: &str, p: u64, budget: Option<u64>) -> PyResult<PyQuotient> {
        let (u, v) = (self.pres.parse(u).map_err(err)?, self.pres.parse(v).map_err(err)?);
        let config = SeparateConfig { prime: p, ..SeparateConfig::default() };
        let s = separate_theorem1(&u, &v, &self.pres, &mut self::budget(budget), &config).map_err(err)?;
        Ok(PyQuotient { inner: s.quotient })
    }

    #[pyo3(signature = (u, v, nmax = 4))]
    fn oracle(&self, u: &str, v: &str, nmax: usize) -> PyResult<Option<(usize, u64, PyActionGraph)>> {
        let (u, v) = (self.pres.parse(u).map_err(err)?, self.pres.parse(v).map_err(err)?);
        let hit = oracle_separate_amalgam(&self.pres, &u, &v, nmax, DEFAULT_CAP).map_err(err)?;
        Ok(hit.map(|h| (h.n, h.index, PyActionGraph { inner: h.graph })))
    }
}

#[pymodule]
fn ordsep(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyActionGraph>()?;
    m.add_class::<PyQuotient>()?;
    m.add_class::<PyFreeGroup>()?;
    m.add_class::<PyAmalgam>()?;
    m.add("OrdsepError", m.py().get_type::<OrdsepError>())?;
    m.add("BudgetExceeded", m.py().get_type::<BudgetExceeded>())?;
    Ok(())
}
