//! Python bindings. Instances are passed as instance-file text; results come
//! back as the same dictionaries the command line prints as JSON.

use ccl_core::analyzer;
use ccl_core::cli::{self, Algorithm, CliError, InstanceArgs, Kind, Model, ModelArgs, EXIT_ALGORITHMIC};
use ccl_core::graph::parse_instance;
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

create_exception!(ccl, AlgorithmFailure, PyRuntimeError);

fn to_py(e: CliError) -> PyErr {
    if e.code == EXIT_ALGORITHMIC {
        AlgorithmFailure::new_err(e.message)
    } else {
        PyValueError::new_err(e.message)
    }
}

fn algorithm(name: &str) -> PyResult<Algorithm> {
    match name {
        "apsp" => Ok(Algorithm::Apsp),
        "steiner" => Ok(Algorithm::Steiner),
        "dmst" => Ok(Algorithm::Dmst),
        _ => Err(PyValueError::new_err(format!("unknown algorithm `{name}`"))),
    }
}

fn model_args(model: &str, seed: u64, bandwidth: u32, retries: u32, failure_rate: f64) -> PyResult<ModelArgs> {
    let model = match model {
        "paper" => Model::Paper,
        "measured" => Model::Measured,
        _ => return Err(PyValueError::new_err(format!("unknown model `{model}`"))),
    };
    Ok(ModelArgs {
        model,
        bandwidth,
        seed,
        retries,
        failure_rate,
    })
}

fn json_to_py(py: Python<'_>, v: &serde_json::Value) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(v).expect("values serialise");
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

/// Runs `algorithm` ("apsp", "steiner" or "dmst") on instance-file text.
#[pyfunction]
#[pyo3(signature = (algorithm_name, instance, seed, model = "paper", bandwidth = 2, retries = 3, failure_rate = 0.0))]
fn run(
    py: Python<'_>,
    algorithm_name: &str,
    instance: &str,
    seed: u64,
    model: &str,
    bandwidth: u32,
    retries: u32,
    failure_rate: f64,
) -> PyResult<Py<PyAny>> {
    let alg = algorithm(algorithm_name)?;
    let cfg = model_args(model, seed, bandwidth, retries, failure_rate)?.config();
    let parsed = parse_instance(instance).map_err(|e| to_py(e.into()))?;
    let out = py.detach(|| cli::run_algorithm(alg, &parsed, &cfg)).map_err(to_py)?;
    json_to_py(py, &out)
}

/// Runs `algorithm` and checks it against its exact oracle.
#[pyfunction]
#[pyo3(signature = (algorithm_name, instance, seed, model = "paper", bandwidth = 2, retries = 3, failure_rate = 0.0))]
fn compare(
    py: Python<'_>,
    algorithm_name: &str,
    instance: &str,
    seed: u64,
    model: &str,
    bandwidth: u32,
    retries: u32,
    failure_rate: f64,
) -> PyResult<Py<PyAny>> {
    let alg = algorithm(algorithm_name)?;
    let cfg = model_args(model, seed, bandwidth, retries, failure_rate)?.config();
    let parsed = parse_instance(instance).map_err(|e| to_py(e.into()))?;
    let c = py.detach(|| cli::compare(alg, &parsed, &cfg)).map_err(to_py)?;
    let v = serde_json::json!({ "ok": c.ok, "verdict": c.verdict, "rounds": c.rounds, "detail": c.detail });
    json_to_py(py, &v)
}

/// Instance-file text for a seeded random instance.
#[pyfunction]
#[pyo3(signature = (kind, n, seed, density = 0.3, wmax = 10, terminals = 3, root = 1, directed = false))]
#[allow(clippy::too_many_arguments)]
fn generate(
    kind: &str,
    n: usize,
    seed: u64,
    density: f64,
    wmax: i64,
    terminals: usize,
    root: usize,
    directed: bool,
) -> PyResult<String> {
    let kind = match kind {
        "graph" => Kind::Graph,
        "steiner" => Kind::Steiner,
        "dmst" => Kind::Dmst,
        _ => return Err(PyValueError::new_err(format!("unknown kind `{kind}`"))),
    };
    let a = InstanceArgs {
        n,
        density,
        wmax,
        terminals,
        root,
        directed,
    };
    cli::instance_text(kind, &a, seed).map(|(t, _)| t).map_err(to_py)
}

/// Value of a named cost formula ("f", "h", "g", ...) at `n`.
#[pyfunction]
fn formula(name: &str, n: f64) -> PyResult<f64> {
    let f = analyzer::formula_by_name(name).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(f.eval(n))
}

/// The standard crossover table as a list of dictionaries.
#[pyfunction]
#[pyo3(signature = (granularity = analyzer::DEFAULT_GRANULARITY))]
fn crossovers(py: Python<'_>, granularity: f64) -> PyResult<Py<PyAny>> {
    let rows = analyzer::standard_crossovers(granularity).map_err(|e| to_py(e.into()))?;
    json_to_py(py, &serde_json::to_value(rows).expect("serialisable"))
}

#[pymodule]
fn ccl(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("AlgorithmFailure", m.py().get_type::<AlgorithmFailure>())?;
    m.add("SCHEMA_VERSION", cli::SCHEMA_VERSION)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(formula, m)?)?;
    m.add_function(wrap_pyfunction!(crossovers, m)?)?;
    Ok(())
}
