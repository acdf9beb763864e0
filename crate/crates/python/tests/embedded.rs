use pybifree::pybifree;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn with_module<F: FnOnce(Python<'_>, &Bound<'_, PyDict>)>(f: F) {
    static INIT: std::sync::Once = std::sync::Once::new();
    INIT.call_once(|| pyo3::append_to_inittab!(pybifree));
    Python::attach(|py| {
        let g = PyDict::new(py);
        g.set_item("bf", py.import("pybifree").unwrap()).unwrap();
        f(py, &g);
    });
}

fn eval<'py>(py: Python<'py>, g: &Bound<'py, PyDict>, code: &str) -> Bound<'py, PyAny> {
    let c = std::ffi::CString::new(code).unwrap();
    py.eval(&c, Some(g), None).unwrap_or_else(|e| panic!("{code}: {e}"))
}

#[test]
fn module_round_trip() {
    with_module(|py, g| {
        assert_eq!(eval(py, g, "len(bf.enumerate_bnc('llrlr'))").extract::<usize>().unwrap(), 42);
        assert_eq!(eval(py, g, "str(bf.mobius('lrl', '1|2|3', '1,2,3'))").extract::<String>().unwrap(), "2");
        assert!(eval(py, g, "bf.verify('two-sums', max_n=3)[0]").extract::<bool>().unwrap());
        let moment = "(lambda x: (lambda s, t: x.e_pi('lr', '1,2', [s, t]) == x.expect_word([s, t]))\
                      (x.random_left_operator(1), x.random_right_operator(2)))(bf.Bimodule.random(2, 1, 5))";
        assert!(eval(py, g, moment).extract::<bool>().unwrap());
        let err = py.eval(c"bf.enumerate_bnc('lxr')", Some(g), None).unwrap_err();
        assert!(err.is_instance_of::<pyo3::exceptions::PyValueError>(py));
    });
}
