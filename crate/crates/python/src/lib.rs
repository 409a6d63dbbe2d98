//! Python bindings: constants, the ξ field and single inequality checks.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use trace_conjunction_core::fields::{make_field, FieldSpec};
use trace_conjunction_core::quad::QuadSpec;
use trace_conjunction_core::specfun;
use trace_conjunction_core::theorems::{self, FieldBundle, TheoremId};
use trace_conjunction_core::{ConstantKind, Params};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn params(n: usize, s: f64, p: f64) -> PyResult<Params> {
    Params::new(n, s, p).map_err(value_err)
}

#[pyfunction]
fn log_gamma(x: f64) -> PyResult<f64> {
    specfun::log_gamma(x).map_err(value_err)
}

/// Closed-form constant `kind` (e.g. `"POTENTIAL"`) at `(N, s, p)`.
#[pyfunction]
fn paper_constant(kind: &str, n: usize, s: f64, p: f64) -> PyResult<f64> {
    let kind: ConstantKind = kind.parse().map_err(value_err)?;
    specfun::paper_constant(kind, &params(n, s, p)?).map_err(value_err)
}

/// `(lambda, constant, lambda_max)`; requires `sp > 1`.
#[pyfunction]
fn optimal_lambda(n: usize, s: f64, p: f64) -> PyResult<(f64, f64, f64)> {
    let opt = specfun::optimal_lambda(&params(n, s, p)?).map_err(value_err)?;
    Ok((opt.lambda, opt.constant, opt.lambda_max))
}

#[pyfunction]
fn xi_field(n: usize, s: f64, p: f64, x: Vec<f64>) -> PyResult<Vec<f64>> {
    let params = params(n, s, p)?;
    if x.len() != n {
        return Err(PyValueError::new_err(format!(
            "x must have {n} coordinates"
        )));
    }
    let mut out = vec![0.0; n];
    theorems::xi_field(&params, &x, &mut out);
    Ok(out)
}

#[pyfunction]
fn theorem_ids() -> Vec<&'static str> {
    TheoremId::ALL.iter().map(|id| id.name()).collect()
}

#[pyfunction]
fn constant_kinds() -> Vec<&'static str> {
    ConstantKind::ALL.iter().map(|k| k.name()).collect()
}

/// Runs one inequality check and returns its report as a JSON string.
///
/// `field` is a JSON field spec such as `{"kind": "BUMP", "center": [0.5]}`.
#[pyfunction]
#[pyo3(signature = (id, field, n, s, p, samples = 100_000, seed = 0x5EED))]
#[allow(clippy::too_many_arguments)]
fn check_inequality(
    py: Python<'_>,
    id: &str,
    field: &str,
    n: usize,
    s: f64,
    p: f64,
    samples: usize,
    seed: u64,
) -> PyResult<String> {
    let id: TheoremId = id.parse().map_err(value_err)?;
    let spec: FieldSpec = serde_json::from_str(field).map_err(value_err)?;
    let params = params(n, s, p)?;
    let quad = QuadSpec::with_total_samples(samples, 16, seed);
    quad.validate().map_err(value_err)?;
    let bundle =
        FieldBundle::from_interior(make_field(&spec, n).map_err(value_err)?).map_err(value_err)?;
    let report = py
        .detach(|| theorems::check_inequality(id, &bundle, &params, &quad))
        .map_err(value_err)?;
    serde_json::to_string(&report).map_err(value_err)
}

#[pymodule]
fn trace_conjunction(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(log_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(paper_constant, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_lambda, m)?)?;
    m.add_function(wrap_pyfunction!(xi_field, m)?)?;
    m.add_function(wrap_pyfunction!(theorem_ids, m)?)?;
    m.add_function(wrap_pyfunction!(constant_kinds, m)?)?;
    m.add_function(wrap_pyfunction!(check_inequality, m)?)?;
    Ok(())
}
