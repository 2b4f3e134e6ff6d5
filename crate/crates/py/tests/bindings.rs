use pyo3::prelude::*;
use pyo3::types::{IntoPyDict, PyDict, PyModule};

fn module(py: Python<'_>) -> Bound<'_, PyModule> {
    let m = PyModule::new(py, "vsi_py").unwrap();
    vsi_py::register(&m).unwrap();
    m
}

fn call<'py>(m: &Bound<'py, PyModule>, name: &str, args: impl pyo3::call::PyCallArgs<'py>) -> PyResult<Bound<'py, PyAny>> {
    m.getattr(name)?.call1(args)
}

#[test]
fn example_round_trip_through_python_types() {
    Python::initialize();
    Python::attach(|py| {
        let m = module(py);
        let sets = PyDict::new(py);
        sets.set_item("a", "2").unwrap();
        let files = m.getattr("builtin").unwrap().call(("vsi3",), Some(&[("sets", sets)].into_py_dict(py).unwrap())).unwrap();
        let metric: String = files.get_item("metric").unwrap().extract().unwrap();
        let frame: String = files.get_item("frame").unwrap().extract().unwrap();

        let inv = call(&m, "invariants", (metric.as_str(),)).unwrap();
        let norm: String = inv.get_item("self_norm(4)").unwrap().extract().unwrap();
        assert_eq!(norm, "1327104");

        let v = call(&m, "verdict", (metric.as_str(), frame.as_str())).unwrap();
        let summary: String = v.get_item("summary").unwrap().extract().unwrap();
        assert_eq!(summary, "CertifiedVSI_3, RefutedAtOrder_4");
        let refuted: Option<usize> = v.get_item("refuted_at").unwrap().extract().unwrap();
        assert_eq!(refuted, Some(4));

        let c = call(&m, "classify", (metric.as_str(), frame.as_str())).unwrap();
        assert!(c.get_item("walker").unwrap().extract::<bool>().unwrap());

        let o = call(&m, "oracle", (metric.as_str(), 2, 5, 3)).unwrap();
        assert_eq!(o.get_item("points").unwrap().extract::<usize>().unwrap(), 3);
        assert_eq!(o.get_item("mismatches").unwrap().len().unwrap(), 0);
    });
}

#[test]
fn errors_become_python_exceptions() {
    Python::initialize();
    Python::attach(|py| {
        let m = module(py);
        let e = call(&m, "invariants", ("{ not json",)).unwrap_err();
        assert!(e.is_instance_of::<pyo3::exceptions::PyValueError>(py));
        let e = call(&m, "builtin", ("nope",)).unwrap_err();
        assert!(e.is_instance_of::<pyo3::exceptions::PyValueError>(py));
        let s: String = call(&m, "normalize", ("x*(x+1) - x^2", vec!["x"])).unwrap().extract().unwrap();
        assert_eq!(s, "x");
    });
}
