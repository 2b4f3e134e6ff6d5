//! Python bindings. Metrics and frames cross the boundary as the same JSON
//! text the command-line tool reads and writes; results come back as dicts
//! of exact expression strings.

use std::collections::BTreeMap;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use vsi_core::catalog::builtin as catalog_builtin;
use vsi_core::curvature::{build_stack, christoffel, CurvatureError, CurvatureStack, DEFAULT_COMPONENT_CAP};
use vsi_core::degeneracy::{vsi_verdict_for_stack, DegeneracyError, VerdictOptions};
use vsi_core::expr::{display, parse_expression, VariableContext};
use vsi_core::frame::{classify_geometry, NullFrame};
use vsi_core::io::{ExpectedFile, FrameFile, MetricFile};
use vsi_core::oracle::{cross_check_metric, SamplePlan};
use vsi_core::tensor::Metric;

fn invalid(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn curvature_err(e: CurvatureError) -> PyErr {
    match e {
        CurvatureError::ResourceLimit { .. } | CurvatureError::InvariantViolation(_) => {
            PyRuntimeError::new_err(e.to_string())
        }
        other => invalid(other),
    }
}

fn load_metric(text: &str) -> PyResult<Metric> {
    MetricFile::from_json(text).and_then(|f| f.to_metric()).map_err(invalid)
}

fn load_frame(text: &str, metric: &Metric) -> PyResult<NullFrame> {
    FrameFile::from_json(text).and_then(|f| f.to_frame(metric)).map_err(invalid)
}

fn stack(metric: &Metric, order: usize, cap: Option<usize>) -> PyResult<CurvatureStack> {
    build_stack(metric, order, cap.unwrap_or(DEFAULT_COMPONENT_CAP)).map_err(curvature_err)
}

/// Canonical form of an expression over the given coordinates and parameters.
#[pyfunction]
#[pyo3(signature = (text, coordinates, parameters = Vec::new()))]
fn normalize(text: &str, coordinates: Vec<String>, parameters: Vec<String>) -> PyResult<String> {
    // (0, n) accepts any number of coordinates; the signature plays no role here.
    let ctx = VariableContext::new(&coordinates, &parameters, (0, coordinates.len())).map_err(invalid)?;
    let f = parse_expression(text, &ctx).map_err(invalid)?;
    Ok(display(&f, &ctx))
}

/// Metric, frame and expectation JSON for a catalog family.
#[pyfunction]
#[pyo3(signature = (name, sets = BTreeMap::new()))]
fn builtin(name: &str, sets: BTreeMap<String, String>) -> PyResult<BTreeMap<&'static str, String>> {
    let pairs: Vec<(String, String)> = sets.into_iter().collect();
    let inst = catalog_builtin(name, &pairs).map_err(invalid)?;
    Ok(BTreeMap::from([
        ("metric", MetricFile::from_metric(&inst.metric).to_json()),
        ("frame", FrameFile::from_frame(&inst.frame).to_json()),
        ("expected", ExpectedFile::from_instance(&inst).to_json()),
    ]))
}

/// Self-norms of `∇^j Riem` for `j ≤ order` and the operator traces.
#[pyfunction]
#[pyo3(signature = (metric, order = 4, cap = None))]
fn invariants(metric: &str, order: usize, cap: Option<usize>) -> PyResult<BTreeMap<String, String>> {
    let m = load_metric(metric)?;
    let s = stack(&m, order, cap)?;
    let ws = s.witnesses(order).map_err(curvature_err)?;
    Ok(ws
        .into_iter()
        .map(|w| (w.kind.to_string(), display(&w.value, m.ctx())))
        .collect())
}

/// Geometry flags and the twelve spin-coefficient quantities (4D neutral).
#[pyfunction]
fn classify<'py>(py: Python<'py>, metric: &str, frame: &str) -> PyResult<Bound<'py, PyDict>> {
    let m = load_metric(metric)?;
    let f = load_frame(frame, &m)?;
    let (flags, spin) = classify_geometry(&f, &christoffel(&m)).map_err(invalid)?;
    let out = PyDict::new(py);
    out.set_item("walker", flags.walker_plane)?;
    out.set_item("kundt", flags.kundt)?;
    out.set_item("recurrent", flags.recurrent)?;
    out.set_item("covariantly_constant", flags.covariantly_constant)?;
    let coeffs: BTreeMap<&str, String> = spin.named().into_iter().map(|(n, v)| (n, display(v, m.ctx()))).collect();
    out.set_item("spin_coefficients", coeffs)?;
    Ok(out)
}

/// VSI verdict through `order` with its certificate.
#[pyfunction]
#[pyo3(signature = (metric, frame, order = 4, cap = None))]
fn verdict<'py>(
    py: Python<'py>,
    metric: &str,
    frame: &str,
    order: usize,
    cap: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let m = load_metric(metric)?;
    let f = load_frame(frame, &m)?;
    let s = stack(&m, order, cap)?;
    let v = vsi_verdict_for_stack(&s, &f, VerdictOptions::default()).map_err(|e| match e {
        DegeneracyError::Curvature(c) => curvature_err(c),
        DegeneracyError::InvariantViolation(_) => PyRuntimeError::new_err(e.to_string()),
        other => invalid(other),
    })?;
    let out = PyDict::new(py);
    out.set_item("summary", v.summary())?;
    out.set_item("certified_through", v.highest_certified())?;
    out.set_item("refuted_at", v.first_refuted().map(|o| o.order))?;
    out.set_item("lambda", v.direction.as_ref().map(|d| d.lambda.clone()))?;
    let supports: Vec<Vec<Vec<i32>>> =
        v.orders.iter().map(|o| o.support.iter().map(|b| b.0.clone()).collect()).collect();
    out.set_item("supports", supports)?;
    Ok(out)
}

/// Pointwise cross-check of the symbolic invariants.
#[pyfunction]
#[pyo3(signature = (metric, order = 4, seed = 0, points = 20))]
fn oracle<'py>(py: Python<'py>, metric: &str, order: usize, seed: u64, points: usize) -> PyResult<Bound<'py, PyDict>> {
    let m = load_metric(metric)?;
    let s = stack(&m, order, None)?;
    let r = cross_check_metric("python", &m, &s, &SamplePlan::with_seed(seed, points), &[]).map_err(invalid)?;
    let out = PyDict::new(py);
    out.set_item("points", r.points.len())?;
    out.set_item("comparisons", r.comparisons)?;
    let mismatches: Vec<BTreeMap<&str, String>> = r
        .mismatches
        .into_iter()
        .map(|x| {
            BTreeMap::from([
                ("point", x.point.to_string()),
                ("quantity", x.quantity),
                ("symbolic", x.symbolic),
                ("pointwise", x.pointwise),
            ])
        })
        .collect();
    out.set_item("mismatches", mismatches)?;
    out.set_item("exhausted", r.exhausted)?;
    Ok(out)
}

/// Adds every binding to `m`; also used to test without a built extension.
pub fn register(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(normalize, m)?)?;
    m.add_function(wrap_pyfunction!(builtin, m)?)?;
    m.add_function(wrap_pyfunction!(invariants, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(verdict, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    Ok(())
}

#[pymodule]
fn vsi_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    register(m)
}
