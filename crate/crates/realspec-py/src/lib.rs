//! Python bindings: the exact count distributions, expectations, weights,
//! kernels, and the Monte Carlo sampler behind a small module.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use realspec::kernels;
use realspec::moments::Mode;
use realspec::montecarlo::{estimate_distribution, McConfig};
use realspec::probabilities;
use realspec::special::QuadratureSpec;
use realspec::weights::ProductSpec;

fn to_py_err(e: realspec::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn build_spec(n: u32, m: u32, nu: Option<Vec<u32>>) -> PyResult<ProductSpec> {
    match nu {
        None => Ok(ProductSpec::square(n, m)),
        Some(v) => ProductSpec::rectangular(n, m, &v).map_err(to_py_err),
    }
}

fn parse_mode(mode: &str) -> PyResult<Mode> {
    match mode {
        "exact" => Ok(Mode::Exact),
        "numeric" => Ok(Mode::Numeric),
        other => Err(PyValueError::new_err(format!("unknown mode {other:?}"))),
    }
}

/// An element of the exact ring Q[sqrt2, sqrtpi].
#[pyclass(name = "ExactValue")]
#[derive(Clone)]
struct PyExactValue {
    inner: realspec::ExactValue,
}

#[pymethods]
impl PyExactValue {
    /// Parse the canonical serialization.
    #[staticmethod]
    fn parse(s: &str) -> PyResult<Self> {
        Ok(PyExactValue { inner: realspec::ExactValue::parse(s).map_err(to_py_err)? })
    }

    fn canonical(&self) -> String {
        self.inner.canonical_string()
    }

    fn pretty(&self) -> String {
        self.inner.pretty()
    }

    fn __float__(&self) -> f64 {
        self.inner.to_f64()
    }

    fn __repr__(&self) -> String {
        format!("ExactValue({})", self.inner.pretty())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

/// Distribution of the number of real eigenvalues; returns
/// {k: (exact_string_or_None, float)}.
#[pyfunction]
#[pyo3(signature = (n, m, nu=None, mode="exact"))]
fn real_count_distribution<'py>(
    py: Python<'py>,
    n: u32,
    m: u32,
    nu: Option<Vec<u32>>,
    mode: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let spec = build_spec(n, m, nu)?;
    let dist =
        probabilities::real_count_distribution(&spec, parse_mode(mode)?).map_err(to_py_err)?;
    let out = PyDict::new(py);
    for e in &dist.entries {
        out.set_item(e.k, (e.exact.as_ref().map(|v| v.canonical_string()), e.value))?;
    }
    Ok(out)
}

/// Probability of an all-real spectrum (dual-route checked).
#[pyfunction]
#[pyo3(signature = (n, m, nu=None, mode="exact"))]
fn prob_all_real(n: u32, m: u32, nu: Option<Vec<u32>>, mode: &str) -> PyResult<(Option<String>, f64)> {
    let spec = build_spec(n, m, nu)?;
    let p = probabilities::prob_all_real(&spec, parse_mode(mode)?).map_err(to_py_err)?;
    Ok((p.exact.map(|v| v.canonical_string()), p.value))
}

/// Expected number of real eigenvalues (dual-route checked).
#[pyfunction]
#[pyo3(signature = (n, m, nu=None, mode="exact"))]
fn expected_reals(n: u32, m: u32, nu: Option<Vec<u32>>, mode: &str) -> PyResult<(Option<String>, f64)> {
    let spec = build_spec(n, m, nu)?;
    let (e, v) = probabilities::expected_reals(&spec, parse_mode(mode)?).map_err(to_py_err)?;
    Ok((e.map(|x| x.canonical_string()), v))
}

/// One-point weight w_r(lambda).
#[pyfunction]
#[pyo3(signature = (m, lam, nu=None))]
fn weight_wr(m: u32, lam: f64, nu: Option<Vec<u32>>) -> PyResult<f64> {
    let q = QuadratureSpec::default();
    realspec::special::weight_wr_numeric(m, &nu.unwrap_or_default(), lam, &q).map_err(to_py_err)
}

/// Two-point (complex-pair) weight w_c(x, y) for one or two factors.
#[pyfunction]
fn weight_wc(m: u32, x: f64, y: f64) -> PyResult<f64> {
    let q = QuadratureSpec::default();
    realspec::weights::weight_wc(m, x, y, &q).map_err(to_py_err)
}

/// Real spectral density at the given abscissae.
#[pyfunction]
#[pyo3(signature = (n, m, xs, nu=None))]
fn density_real(n: u32, m: u32, xs: Vec<f64>, nu: Option<Vec<u32>>) -> PyResult<Vec<f64>> {
    let spec = build_spec(n, m, nu)?;
    let q = QuadratureSpec::default();
    Ok(kernels::density_real(&spec, &xs, &q).map_err(to_py_err)?.values)
}

/// Kernel entries (S, D, I-tilde) at a real point pair.
#[pyfunction]
fn kernel_entries(n: u32, m: u32, x: f64, y: f64) -> PyResult<(f64, f64, f64)> {
    let spec = ProductSpec::square(n, m);
    let q = QuadratureSpec::default();
    let k = kernels::kernel_entries_real(&spec, x, y, &q).map_err(to_py_err)?;
    Ok((k.s, k.d, k.i_tilde))
}

/// Large-N local real density at the origin scale.
#[pyfunction]
#[pyo3(signature = (m, x, nu=None))]
fn local_density(m: u32, x: f64, nu: Option<Vec<u32>>) -> PyResult<f64> {
    let q = QuadratureSpec::default();
    kernels::local_density_origin_real(m, &nu.unwrap_or_default(), x, &q).map_err(to_py_err)
}

/// Global scaled density (kind = "real" or "complex").
#[pyfunction]
#[pyo3(signature = (m, x, kind="real"))]
fn global_density(m: u32, x: f64, kind: &str) -> PyResult<f64> {
    match kind {
        "real" => Ok(kernels::global_density_real(m, x)),
        "complex" => Ok(kernels::global_density_complex(m, x)),
        other => Err(PyValueError::new_err(format!("unknown kind {other:?}"))),
    }
}

/// Monte Carlo estimate: {k: count} over `samples` draws with the given seed.
#[pyfunction]
#[pyo3(signature = (n, m, samples, seed, nu=None, workers=None))]
fn simulate<'py>(
    py: Python<'py>,
    n: u32,
    m: u32,
    samples: u64,
    seed: u64,
    nu: Option<Vec<u32>>,
    workers: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let spec = build_spec(n, m, nu)?;
    let mut cfg = McConfig::new(spec, samples, seed);
    if let Some(w) = workers {
        cfg.workers = w.max(1);
    }
    let est = py.detach(|| estimate_distribution(&cfg)).map_err(to_py_err)?;
    let out = PyDict::new(py);
    for (&k, &c) in &est.counts {
        out.set_item(k, c)?;
    }
    Ok(out)
}

#[pymodule]
fn realspec_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyExactValue>()?;
    m.add_function(wrap_pyfunction!(real_count_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(prob_all_real, m)?)?;
    m.add_function(wrap_pyfunction!(expected_reals, m)?)?;
    m.add_function(wrap_pyfunction!(weight_wr, m)?)?;
    m.add_function(wrap_pyfunction!(weight_wc, m)?)?;
    m.add_function(wrap_pyfunction!(density_real, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_entries, m)?)?;
    m.add_function(wrap_pyfunction!(local_density, m)?)?;
    m.add_function(wrap_pyfunction!(global_density, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    Ok(())
}
