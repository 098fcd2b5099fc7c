use std::collections::BTreeMap;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use specref::assembler::assemble;
use specref::marginals::{Mode, ProblemFile};
use specref::permrep::Partition;
use specref::refuter::{Certificate, RefuteOptions, SolverChoice, VerifyOptions};

fn err(e: specref::Error) -> PyErr {
    match e {
        specref::Error::Solver(_) | specref::Error::Io(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn partition(parts: Vec<usize>) -> PyResult<Partition> {
    Partition::new(parts).map_err(err)
}

/// Prescribed spectra on subsystems of an `n`-site system. Keys are site
/// lists such as "1,2".
#[pyclass(name = "SpectrumSet", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySpectrumSet {
    inner: specref::marginals::SpectrumSet,
}

#[pymethods]
impl PySpectrumSet {
    #[new]
    fn new(n: usize, spectra: BTreeMap<String, Vec<f64>>) -> PyResult<Self> {
        let file = ProblemFile {
            version: specref::marginals::PROBLEM_VERSION,
            n,
            d: None,
            k: None,
            mode: None,
            subsystems: spectra
                .keys()
                .map(|k| k.parse::<specref::marginals::Subsystem>().map(|s| s.sites().to_vec()))
                .collect::<Result<_, _>>()
                .map_err(err)?,
            spectra,
        };
        Ok(PySpectrumSet { inner: file.spectrum_set().map_err(err)? })
    }

    /// Rank-2 three-qubit marginals with smaller eigenvalues on AB, AC, BC.
    #[staticmethod]
    fn rank2_triple(l_ab: f64, l_ac: f64, l_bc: f64) -> PyResult<Self> {
        Ok(PySpectrumSet { inner: specref::experiments::rank2_triple(l_ab, l_ac, l_bc).map_err(err)? })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn subsystems(&self) -> Vec<String> {
        self.inner.subsystems().iter().map(|s| s.key()).collect()
    }

    fn spectrum(&self, key: &str) -> PyResult<Option<Vec<f64>>> {
        let a = key.parse().map_err(err)?;
        Ok(self.inner.spectrum(&a).map(|s| s.to_vec()))
    }

    fn __repr__(&self) -> String {
        let parts: Vec<String> =
            self.inner.entries().iter().map(|(a, mu)| format!("'{}': {mu:?}", a.key())).collect();
        format!("SpectrumSet(n={}, {{{}}})", self.inner.n(), parts.join(", "))
    }
}

/// Outcome of one level of the hierarchy.
#[pyclass(name = "Verdict", frozen)]
struct PyVerdict {
    inner: specref::refuter::Verdict,
}

#[pymethods]
impl PyVerdict {
    /// "REFUTED", "NOT_REFUTED" or "SOLVER_INCONCLUSIVE".
    #[getter]
    fn label(&self) -> &'static str {
        self.inner.label()
    }

    #[getter]
    fn is_refuted(&self) -> bool {
        self.inner.is_refuted()
    }

    /// Trace-normalized optimum; negative means refuted.
    #[getter]
    fn value(&self) -> f64 {
        self.inner.diagnostics().value
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.inner.diagnostics().iterations
    }

    /// Certificate as JSON, when refuted.
    fn certificate_json(&self) -> PyResult<Option<String>> {
        self.inner.certificate().map(|c| c.to_json().map_err(err)).transpose()
    }

    /// Certificate coefficients keyed by generator label, when refuted.
    fn coefficients(&self) -> Option<Vec<(String, f64)>> {
        self.inner
            .certificate()
            .map(|c| c.generators.iter().zip(&c.y).map(|(g, y)| (g.to_string(), *y)).collect())
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        format!("Verdict({}, value={:.6e})", self.inner.label(), self.inner.diagnostics().value)
    }
}

/// Variable counts `(n_naive, n_sym, blocks, max_block)`.
#[pyfunction]
fn size_report(n: usize, d: usize, k: usize) -> PyResult<(f64, u64, usize, usize)> {
    let r = specref::assembler::size_report(n, d, k).map_err(err)?;
    Ok((r.n_naive, r.n_sym, r.block_count, r.max_block))
}

#[pyfunction]
fn hook_dimension(shape: Vec<usize>) -> PyResult<usize> {
    Ok(partition(shape)?.hook_dimension())
}

/// Character of the irrep `shape` on the class `cycle_type`.
#[pyfunction]
fn character(shape: Vec<usize>, cycle_type: Vec<usize>) -> PyResult<i64> {
    let ct = Partition::from_unsorted(cycle_type).map_err(err)?;
    specref::permrep::character_mn(&partition(shape)?, &ct).map_err(err)
}

#[pyfunction]
fn power_sum(mu: Vec<f64>, ell: usize) -> PyResult<f64> {
    specref::marginals::power_sum(&mu, ell).map_err(err)
}

/// Runs level `k` of the hierarchy; `d` defaults to `k`.
#[pyfunction]
#[pyo3(signature = (spectra, k, d=None, mode="factorizing", tol=1e-7, solver="embedded"))]
fn refute(
    py: Python<'_>,
    spectra: &PySpectrumSet,
    k: usize,
    d: Option<usize>,
    mode: &str,
    tol: f64,
    solver: &str,
) -> PyResult<PyVerdict> {
    let mode: Mode = mode.parse().map_err(err)?;
    let solver: SolverChoice = solver.parse().map_err(err)?;
    let opts = RefuteOptions { tol, solver, ..RefuteOptions::default() };
    let spectra = spectra.inner.clone();
    let inner = py
        .detach(move || {
            let sdp = assemble(&spectra, d.unwrap_or(k), k, mode)?;
            specref::refuter::refute(&sdp, &opts)
        })
        .map_err(err)?;
    Ok(PyVerdict { inner })
}

/// Re-checks a certificate from scratch. Returns `(passed, report)`.
#[pyfunction]
#[pyo3(signature = (certificate_json, spectra=None, samples=1000))]
fn verify_certificate(
    py: Python<'_>,
    certificate_json: &str,
    spectra: Option<&PySpectrumSet>,
    samples: usize,
) -> PyResult<(bool, String)> {
    let cert = Certificate::from_json(certificate_json).map_err(err)?;
    let spectra = spectra.map_or_else(|| cert.spectra.clone(), |s| s.inner.clone());
    let opts = VerifyOptions { sweep_samples: samples, ..VerifyOptions::default() };
    let report = py
        .detach(move || specref::refuter::verify_certificate_with(&cert, &spectra, &opts))
        .map_err(err)?;
    Ok((report.passed(), report.to_string()))
}

#[pymodule]
#[pyo3(name = "specref")]
fn specref_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpectrumSet>()?;
    m.add_class::<PyVerdict>()?;
    m.add_function(wrap_pyfunction!(size_report, m)?)?;
    m.add_function(wrap_pyfunction!(hook_dimension, m)?)?;
    m.add_function(wrap_pyfunction!(character, m)?)?;
    m.add_function(wrap_pyfunction!(power_sum, m)?)?;
    m.add_function(wrap_pyfunction!(refute, m)?)?;
    m.add_function(wrap_pyfunction!(verify_certificate, m)?)?;
    Ok(())
}
