//! Python bindings for the redcount toolkit.
//!
//! The module mirrors the CLI surface: sample instances (uniform factored,
//! random graphs and formulas, or the parameterized hard distributions),
//! apply named reduction steps or whole plans, count or take parities with
//! the reference solvers, and stress-test steps against brute force. All
//! instances cross the boundary as a single `Instance` class backed by the
//! same canonical JSON used on disk.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use num_bigint::BigUint;
use redcount_core::factored::{sample_uniform_factored, Predicate};
use redcount_core::instances::count_cliques;
use redcount_core::pipeline::{
    self, parse_plan, sample_distribution as sample_distribution_impl, DistributionName,
    SizeBounds, StepParams,
};
use redcount_core::sat::sample_uniform_cnf;
use redcount_core::serial::{instance_digest, parse_json_line, to_json_line};
use redcount_core::{rng, serial};

fn convert(e: redcount_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_predicate(tag: &str) -> PyResult<Predicate> {
    match tag.to_ascii_lowercase().as_str() {
        "ov" => Ok(Predicate::Ov),
        "xor" => Ok(Predicate::Xor),
        "sum" => Ok(Predicate::Sum),
        other => Err(PyValueError::new_err(format!(
            "predicate must be ov, xor, or sum, got {other:?}"
        ))),
    }
}

/// A problem instance: factored, OV, XOR, SUM, graph, or CNF.
#[pyclass(frozen, name = "Instance", module = "redcount")]
struct PyInstance {
    inner: serial::Instance,
}

impl PyInstance {
    fn wrap(inner: serial::Instance) -> Self {
        PyInstance { inner }
    }
}

#[pymethods]
impl PyInstance {
    /// Parse the canonical single-line JSON form.
    #[staticmethod]
    fn from_json(line: &str) -> PyResult<Self> {
        Ok(PyInstance::wrap(parse_json_line(line).map_err(convert)?))
    }

    /// The instance kind tag: factored, ov, xor, sum, graph, or cnf.
    fn kind(&self) -> String {
        self.inner.kind().to_string()
    }

    /// Canonical single-line JSON.
    fn to_json(&self) -> String {
        to_json_line(&self.inner)
    }

    /// SHA-256 digest of the canonical JSON line.
    fn digest(&self) -> String {
        instance_digest(&self.inner)
    }

    /// Exact solution count (models, zero-XOR tuples, ...) as an int.
    ///
    /// Graphs need an explicit clique size; use `clique_count` instead.
    fn count(&self) -> PyResult<BigUint> {
        Ok(pipeline::solve_count(&self.inner).map_err(convert)?.0)
    }

    /// Parity of `count()`.
    fn parity(&self) -> PyResult<u8> {
        Ok(pipeline::solve_count(&self.inner).map_err(convert)?.parity())
    }

    /// Exact number of k-cliques (graph instances only).
    fn clique_count(&self, k: usize) -> PyResult<BigUint> {
        match &self.inner {
            serial::Instance::Graph(g) => Ok(count_cliques(g, k).map_err(convert)?.0),
            other => Err(PyValueError::new_err(format!(
                "clique_count needs a graph instance, got {}",
                other.kind()
            ))),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "Instance(kind={}, digest={})",
            self.inner.kind(),
            &instance_digest(&self.inner)[..12]
        )
    }
}

/// Sample a uniform factored instance with the given predicate.
#[pyfunction]
#[pyo3(signature = (k, n, g, b, predicate="xor", seed=0))]
fn sample_factored(
    k: usize,
    n: usize,
    g: usize,
    b: usize,
    predicate: &str,
    seed: u64,
) -> PyResult<PyInstance> {
    let mut rng = rng::from_seed(seed);
    let inst = sample_uniform_factored(k, n, g, b, parse_predicate(predicate)?, &mut rng)
        .map_err(convert)?;
    Ok(PyInstance::wrap(serial::Instance::Factored(inst)))
}

/// Sample a G(n, p) random graph.
#[pyfunction]
#[pyo3(signature = (n, p, seed=0))]
fn sample_gnp(n: usize, p: f64, seed: u64) -> PyResult<PyInstance> {
    let mut rng = rng::from_seed(seed);
    let g = redcount_core::clique::sample_gnp(n, p, &mut rng).map_err(convert)?;
    Ok(PyInstance::wrap(serial::Instance::Graph(g)))
}

/// Sample a uniform CNF formula with `n` variables and `m` clauses.
#[pyfunction]
#[pyo3(signature = (n, m, seed=0))]
fn sample_cnf(n: usize, m: usize, seed: u64) -> PyResult<PyInstance> {
    let mut rng = rng::from_seed(seed);
    let f = sample_uniform_cnf(n, m, &mut rng).map_err(convert)?;
    Ok(PyInstance::wrap(serial::Instance::Cnf(f)))
}

/// Sample one of the parameterized hard distributions (d-ov, d-xor, d-sum).
///
/// Returns the ground instance together with its factored preimage.
#[pyfunction]
#[pyo3(signature = (name, size_n, size_k, b, g, seed=0))]
fn sample_distribution(
    name: &str,
    size_n: u64,
    size_k: usize,
    b: usize,
    g: usize,
    seed: u64,
) -> PyResult<(PyInstance, PyInstance)> {
    let dist = DistributionName::parse(name).map_err(convert)?;
    let mut rng = rng::from_seed(seed);
    let sample = sample_distribution_impl(dist, size_n, size_k, b, g, &mut rng).map_err(convert)?;
    Ok((
        PyInstance::wrap(sample.instance),
        PyInstance::wrap(serial::Instance::Factored(sample.preimage)),
    ))
}

/// Sample one of the named presets; see `preset_names()`.
#[pyfunction]
#[pyo3(signature = (name, seed=0))]
fn sample_preset(name: &str, seed: u64) -> PyResult<(PyInstance, PyInstance)> {
    let p = pipeline::find_preset(name).map_err(convert)?;
    let dist = p.distribution;
    let mut rng = rng::from_seed(seed);
    let sample =
        sample_distribution_impl(dist, p.size_n, p.size_k, p.b, p.g, &mut rng).map_err(convert)?;
    Ok((
        PyInstance::wrap(sample.instance),
        PyInstance::wrap(serial::Instance::Factored(sample.preimage)),
    ))
}

/// Apply one named reduction step to an instance.
#[pyfunction]
#[pyo3(signature = (instance, step, b=None, g=None, k=None, groups=None, seed=0))]
fn apply_step(
    instance: &PyInstance,
    step: &str,
    b: Option<usize>,
    g: Option<usize>,
    k: Option<usize>,
    groups: Option<usize>,
    seed: u64,
) -> PyResult<PyInstance> {
    let params = StepParams { b, g, k, groups };
    let parsed = pipeline::parse_step(step, &params).map_err(convert)?;
    let mut stream = rng::from_seed(seed);
    let out = parsed.apply(&instance.inner, &mut stream).map_err(convert)?;
    Ok(PyInstance::wrap(out))
}

/// Run a whole plan (JSON lines, one step per line) over an instance.
///
/// Returns the final instance and the provenance log as a JSON string.
#[pyfunction]
#[pyo3(signature = (instance, plan, seed=0))]
fn run_chain(instance: &PyInstance, plan: &str, seed: u64) -> PyResult<(PyInstance, String)> {
    let steps = parse_plan(plan).map_err(convert)?;
    let (out, provenance) =
        pipeline::run_chain(&steps, &instance.inner, seed).map_err(convert)?;
    Ok((PyInstance::wrap(out), provenance.to_json().to_string()))
}

/// Stress-test a plan against brute force on random instances.
///
/// Returns `(passed, report_json)`.
#[pyfunction]
#[pyo3(signature = (plan, trials=100, max_n=4, max_k=3, seed=0))]
fn verify(
    plan: &str,
    trials: usize,
    max_n: usize,
    max_k: usize,
    seed: u64,
) -> PyResult<(bool, String)> {
    let steps = parse_plan(plan).map_err(convert)?;
    let bounds = SizeBounds { max_n, max_k };
    let report = pipeline::verify_chain(&steps, trials, &bounds, seed).map_err(convert)?;
    Ok((report.passed(), report.to_json().to_string()))
}

/// Names of all reduction steps usable in plans and `apply_step`.
#[pyfunction]
fn step_names() -> Vec<String> {
    pipeline::step_names().iter().map(|s| s.to_string()).collect()
}

/// Names of the built-in hard-distribution presets.
#[pyfunction]
fn preset_names() -> Vec<String> {
    pipeline::presets().iter().map(|p| p.name.to_string()).collect()
}

#[pymodule]
fn redcount(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_function(wrap_pyfunction!(sample_factored, m)?)?;
    m.add_function(wrap_pyfunction!(sample_gnp, m)?)?;
    m.add_function(wrap_pyfunction!(sample_cnf, m)?)?;
    m.add_function(wrap_pyfunction!(sample_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(sample_preset, m)?)?;
    m.add_function(wrap_pyfunction!(apply_step, m)?)?;
    m.add_function(wrap_pyfunction!(run_chain, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(step_names, m)?)?;
    m.add_function(wrap_pyfunction!(preset_names, m)?)?;
    Ok(())
}
