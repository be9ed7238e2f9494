//! Python bindings: `import pyrotbound`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use rotbound::appendix::{check_lemma as check, Lemma};
use rotbound::matrix_lab::{run_trial as trial, Layout};
use rotbound::{BoundKind, Branch, PaperConstants, ParamSeq};

fn err(e: rotbound::Error) -> PyErr {
    if e.is_input_error() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn seq(params: Vec<f64>) -> PyResult<ParamSeq> {
    ParamSeq::new(params).map_err(err)
}

fn solved() -> PaperConstants {
    PaperConstants::solved()
}

/// Maximiser of `W` at a rotation budget.
#[pyclass(frozen, get_all, name = "OptResult")]
struct PyOptResult {
    theta: f64,
    value: f64,
    argmax: Vec<f64>,
    branch: String,
}

#[pymethods]
impl PyOptResult {
    fn __repr__(&self) -> String {
        format!(
            "OptResult(theta={}, value={}, argmax={:?}, branch='{}')",
            self.theta, self.value, self.argmax, self.branch
        )
    }
}

/// The solved constants as a dict.
#[pyfunction]
fn constants(py: Python<'_>) -> PyResult<Bound<'_, PyDict>> {
    let c = solved();
    let d = PyDict::new(py);
    d.set_item("kappa", c.kappa)?;
    d.set_item("vartheta", c.vartheta)?;
    d.set_item("c_crit", c.c_crit)?;
    d.set_item("c_star", c.c_star)?;
    d.set_item("c_kmm", c.c_kmm)?;
    d.set_item("c_ms", c.c_ms)?;
    d.set_item("m", c.m)?;
    Ok(d)
}

/// Evaluates one bound (`"kmm"`, `"ms"`, `"am"` or `"new"`) at ratio `x`.
#[pyfunction]
fn eval_bound(kind: &str, x: f64) -> PyResult<f64> {
    let kind = match kind.to_ascii_lowercase().as_str() {
        "kmm" => BoundKind::Kmm,
        "ms" => BoundKind::Ms,
        "am" => BoundKind::Am,
        "new" => BoundKind::New,
        other => return Err(PyValueError::new_err(format!("unknown bound '{other}'"))),
    };
    kind.eval(x, solved().kappa).map_err(err)
}

/// All bounds at `x`, with `None` outside each domain.
#[pyfunction]
fn compare_bounds(py: Python<'_>, x: f64) -> PyResult<Bound<'_, PyDict>> {
    let s = rotbound::compare_bounds(x, solved().kappa).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("x", s.x)?;
    d.set_item("kmm", s.kmm)?;
    d.set_item("ms", s.ms)?;
    d.set_item("am", s.am)?;
    d.set_item("new", s.new)?;
    d.set_item("minimum", s.minimum.map(|k| k.name()))?;
    Ok(d)
}

#[pyfunction]
fn t_closed(theta: f64) -> PyResult<PyOptResult> {
    let r = rotbound::t_closed(theta, solved().vartheta).map_err(err)?;
    Ok(PyOptResult {
        theta: r.theta.radians(),
        value: r.value,
        argmax: r.argmax.params().to_vec(),
        branch: match r.branch {
            Branch::Single => "SINGLE",
            Branch::TwoBlock => "TWO_BLOCK",
            Branch::TwoEqual => "TWO_EQUAL",
            Branch::ThreeEqual => "THREE_EQUAL",
        }
        .to_string(),
    })
}

/// `½(1 − Π(1 − 2λ_j))`
#[pyfunction]
fn max_w(params: Vec<f64>) -> PyResult<f64> {
    Ok(rotbound::max_w(&seq(params)?))
}

/// The partition `t_0 = 0, …, t_{n+1}` generated by the parameters.
#[pyfunction]
fn apply_w(params: Vec<f64>) -> PyResult<Vec<f64>> {
    Ok(rotbound::apply_w(&seq(params)?).points().to_vec())
}

#[pyfunction]
#[pyo3(signature = (theta, n, steps = 1500))]
fn brute_force_tn(py: Python<'_>, theta: f64, n: usize, steps: usize) -> PyResult<f64> {
    py.detach(|| rotbound::optimizer::brute_force_tn(theta, n, steps)).map_err(err)
}

/// Grid check of one auxiliary inequality (`"a1a"` … `"a4"`).
#[pyfunction]
#[pyo3(signature = (lemma, grid = 10_000))]
fn check_lemma<'py>(py: Python<'py>, lemma: &str, grid: usize) -> PyResult<Bound<'py, PyDict>> {
    let lemma: Lemma = lemma.parse().map_err(|e| PyValueError::new_err(format!("{e}")))?;
    let vartheta = solved().vartheta;
    let r = py.detach(|| check(lemma, grid, vartheta)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("lemma", r.lemma.name())?;
    d.set_item("grid_size", r.grid_size)?;
    d.set_item("min_margin", r.min_margin)?;
    d.set_item("worst_point", r.worst_point)?;
    d.set_item("passed", r.passed)?;
    Ok(d)
}

/// One random trial of the angle bound.
#[pyfunction]
#[pyo3(signature = (seed, dim, ratio, gap = 1.0, split = false))]
fn run_trial(py: Python<'_>, seed: u64, dim: usize, ratio: f64, gap: f64, split: bool) -> PyResult<Bound<'_, PyDict>> {
    let layout = if split { Layout::Split } else { Layout::Subordinated };
    let r = py.detach(|| trial(seed, dim, gap, ratio, layout)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("seed", r.seed)?;
    d.set_item("dim", r.dim)?;
    d.set_item("ratio", r.ratio)?;
    d.set_item("measured", r.measured.radians())?;
    d.set_item("bound", r.bound.radians())?;
    d.set_item("slack", r.slack)?;
    Ok(d)
}

#[pymodule]
fn pyrotbound(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyOptResult>()?;
    m.add_function(wrap_pyfunction!(constants, m)?)?;
    m.add_function(wrap_pyfunction!(eval_bound, m)?)?;
    m.add_function(wrap_pyfunction!(compare_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(t_closed, m)?)?;
    m.add_function(wrap_pyfunction!(max_w, m)?)?;
    m.add_function(wrap_pyfunction!(apply_w, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_tn, m)?)?;
    m.add_function(wrap_pyfunction!(check_lemma, m)?)?;
    m.add_function(wrap_pyfunction!(run_trial, m)?)?;
    Ok(())
}
