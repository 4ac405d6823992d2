//! Python bindings: Pauli algebra, model builders, decomposition, synthesis
//! and QASM emission.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde_json::json;

use redcard::algebra::{frustration_components, generate_dla as core_generate_dla, DEFAULT_MAX_DIM};
use redcard::cartan::{CartanStructure, DecomposeOptions};
use redcard::circuits::{build_compressed_tfxy_circuit, build_evolution_circuit, export_qasm};
use redcard::models::{Family, ModelSpec};
use redcard::optimize::{
    run_redcard_with, run_standard_with, AnsatzKind, Backend, SynthesisConfig, SynthesisResult,
};
use redcard::oracle::{circuit_unitary, expm_i, to_dense, unitary_distance};
use redcard::qsim::{state_prep_circuit, AncillaMode, ShotConfig};

fn py_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn json_to_py<'py>(py: Python<'py>, value: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (value.to_string(),))
}

#[pyclass(name = "PauliString", module = "redcard_py", skip_from_py_object)]
#[derive(Clone)]
struct PyPauliString {
    inner: redcard::PauliString,
}

#[pymethods]
impl PyPauliString {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(Self { inner: text.parse().map_err(py_err)? })
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.inner.n_qubits()
    }

    #[getter]
    fn weight(&self) -> usize {
        self.inner.weight()
    }

    /// Power of i carried in front of the letters.
    #[getter]
    fn phase(&self) -> u8 {
        self.inner.phase()
    }

    fn support(&self) -> Vec<usize> {
        self.inner.support()
    }

    fn is_identity(&self) -> bool {
        self.inner.is_identity()
    }

    fn commutes(&self, other: &Self) -> PyResult<bool> {
        self.inner.commutes(&other.inner).map_err(py_err)
    }

    fn __mul__(&self, other: &Self) -> PyResult<Self> {
        Ok(Self { inner: self.inner.multiply(&other.inner).map_err(py_err)? })
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __hash__(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.inner.hash(&mut h);
        h.finish()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("PauliString('{}')", self.inner)
    }
}

#[pyclass(name = "PauliSum", module = "redcard_py", skip_from_py_object)]
#[derive(Clone)]
struct PyPauliSum {
    inner: redcard::PauliSum,
}

#[pymethods]
impl PyPauliSum {
    /// `terms` maps dense strings such as "XXI" to real coefficients.
    #[new]
    fn new(terms: &Bound<'_, PyDict>) -> PyResult<Self> {
        let mut pairs = Vec::new();
        for (k, v) in terms.iter() {
            pairs.push((k.extract::<String>()?, v.extract::<f64>()?));
        }
        let n = pairs.first().map(|(s, _)| s.len()).ok_or_else(|| py_err("empty Hamiltonian"))?;
        let mut sum = redcard::PauliSum::zero(n).map_err(py_err)?;
        for (s, c) in pairs {
            sum.add_term(s.parse().map_err(py_err)?, c).map_err(py_err)?;
        }
        Ok(Self { inner: sum })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self { inner: redcard::PauliSum::from_json(text).map_err(py_err)? })
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(py_err)
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.inner.n_qubits()
    }

    fn norm(&self) -> f64 {
        self.inner.norm()
    }

    fn terms<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        for (p, c) in self.inner.iter() {
            d.set_item(p.to_string(), c)?;
        }
        Ok(d)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("PauliSum({} terms on {} qubits)", self.inner.len(), self.inner.n_qubits())
    }
}

#[pyclass(name = "SynthesisResult", module = "redcard_py")]
struct PySynthesisResult {
    inner: SynthesisResult,
}

impl PySynthesisResult {
    fn structure(&self) -> PyResult<CartanStructure> {
        let r = &self.inner;
        let dla = core_generate_dla(&r.hamiltonian, r.config.max_dim).map_err(py_err)?;
        CartanStructure::build(&dla, &r.hamiltonian, &r.config.decompose_options()).map_err(py_err)
    }

    fn circuit(&self, t: f64, force: bool) -> PyResult<redcard::Circuit> {
        let s = self.structure()?;
        match self.inner.ansatz {
            AnsatzKind::Compressed => build_compressed_tfxy_circuit(&self.inner, &s, t, force),
            AnsatzKind::Product => build_evolution_circuit(&self.inner, &s, t, force),
        }
        .map_err(py_err)
    }
}

#[pymethods]
impl PySynthesisResult {
    #[getter]
    fn residual(&self) -> f64 {
        self.inner.residual
    }

    #[getter]
    fn converged(&self) -> bool {
        self.inner.converged
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.inner.iterations
    }

    #[getter]
    fn cost_calls(&self) -> u64 {
        self.inner.cost_calls
    }

    #[getter]
    fn residual_trace(&self) -> Vec<f64> {
        self.inner.residual_trace.clone()
    }

    /// Per fragment, the list of (string, angle) factors.
    fn factors(&self) -> Vec<Vec<(String, f64)>> {
        self.inner.fragments.iter().map(|f| f.factors.iter().map(|(p, a)| (p.to_string(), *a)).collect()).collect()
    }

    fn h_coefficients(&self) -> Vec<(String, f64)> {
        self.inner.h_basis.iter().zip(self.inner.h_coefficients()).map(|(p, c)| (p.to_string(), c)).collect()
    }

    #[pyo3(signature = (t, force = false))]
    fn emit_qasm(&self, t: f64, force: bool) -> PyResult<String> {
        Ok(export_qasm(&self.circuit(t, force)?))
    }

    /// Phase-invariant Frobenius distance between the circuit and `e^{-itH}`.
    #[pyo3(signature = (t, force = false))]
    fn oracle_distance(&self, t: f64, force: bool) -> PyResult<f64> {
        let u = circuit_unitary(&self.circuit(t, force)?).map_err(py_err)?;
        let want = expm_i(&to_dense(&self.inner.hamiltonian).map_err(py_err)?, t).map_err(py_err)?;
        unitary_distance(&u, &want).map_err(py_err)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(py_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self { inner: serde_json::from_str(text).map_err(py_err)? })
    }

    fn __repr__(&self) -> String {
        format!(
            "SynthesisResult(residual={:.3e}, iterations={}, cost_calls={}, converged={})",
            self.inner.residual,
            self.inner.iterations,
            self.inner.cost_calls,
            if self.inner.converged { "True" } else { "False" }
        )
    }
}

/// Builds one of the spin-chain Hamiltonians. `j` sets every coupling not
/// given explicitly.
#[pyfunction]
#[pyo3(signature = (family, sites, j = 1.0, jx = None, jy = None, jz = None, g = 0.5, periodic = false))]
#[allow(clippy::too_many_arguments)]
fn build_model(
    family: &str,
    sites: usize,
    j: f64,
    jx: Option<f64>,
    jy: Option<f64>,
    jz: Option<f64>,
    g: f64,
    periodic: bool,
) -> PyResult<PyPauliSum> {
    let (jx, jy, jz) = (jx.unwrap_or(j), jy.unwrap_or(j), jz.unwrap_or(j));
    let mut spec = match family.parse::<Family>().map_err(py_err)? {
        Family::Tfim => ModelSpec::tfim(sites, jx, g),
        Family::Tfxy => ModelSpec::tfxy(sites, jx, jy, g),
        Family::Xy => ModelSpec::xy(sites, jx, jy),
        Family::Heisenberg => ModelSpec::heisenberg(sites, jx, jy, jz),
    };
    if periodic {
        spec = spec.periodic();
    }
    Ok(PyPauliSum { inner: redcard::build(&spec).map_err(py_err)? })
}

#[pyfunction]
#[pyo3(signature = (h, max_dim = DEFAULT_MAX_DIM))]
fn generate_dla<'py>(py: Python<'py>, h: &PyPauliSum, max_dim: usize) -> PyResult<Bound<'py, PyAny>> {
    let dla = core_generate_dla(&h.inner, max_dim).map_err(py_err)?;
    let graph = frustration_components(&dla);
    let components: Vec<Vec<String>> =
        graph.components().into_iter().map(|c| c.into_iter().map(|v| dla.basis()[v].to_string()).collect()).collect();
    json_to_py(
        py,
        &json!({
            "dim": dla.dim(),
            "basis": dla.basis().iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "components": components,
            "generator_indices": dla.generator_indices(),
        }),
    )
}

#[pyfunction]
#[pyo3(signature = (h, seed_string = None, order = None, max_dim = DEFAULT_MAX_DIM))]
fn decompose<'py>(
    py: Python<'py>,
    h: &PyPauliSum,
    seed_string: Option<&str>,
    order: Option<Vec<usize>>,
    max_dim: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let dla = core_generate_dla(&h.inner, max_dim).map_err(py_err)?;
    let graph = frustration_components(&dla);
    let seed = seed_string.map(str::parse).transpose().map_err(py_err)?;
    let s = CartanStructure::build(&dla, &h.inner, &DecomposeOptions { seed, b_order: order }).map_err(py_err)?;
    let report = s.check_ordering(&dla, &graph).map_err(py_err)?;
    let names = |v: &[redcard::PauliString]| v.iter().map(|p| p.to_string()).collect::<Vec<_>>();
    json_to_py(
        py,
        &json!({
            "k_dim": s.k_basis.len(),
            "m_dim": s.m_basis.len(),
            "h": names(&s.h_basis),
            "b": names(&s.b_basis),
            "fragments": s.fragments.iter().map(|f| names(f)).collect::<Vec<_>>(),
            "fragment_sizes": s.fragment_sizes(),
            "ordering_report": report,
        }),
    )
}

/// Optimizes `K` for `h`. `method` is "redcard" or "standard"; `backend` is
/// "exact" or "shots".
#[pyfunction]
#[pyo3(signature = (
    h, method = "redcard", backend = "exact", shots = 800, depol = 0.0, seed = 0,
    compressed = false, max_iters = 100_000, target_residual = None
))]
#[allow(clippy::too_many_arguments)]
fn synthesize(
    py: Python<'_>,
    h: &PyPauliSum,
    method: &str,
    backend: &str,
    shots: u64,
    depol: f64,
    seed: u64,
    compressed: bool,
    max_iters: usize,
    target_residual: Option<f64>,
) -> PyResult<PySynthesisResult> {
    let backend = match backend {
        "exact" => Backend::Exact,
        "shots" => {
            let cfg = ShotConfig { depol, ..ShotConfig::new(shots, seed) };
            cfg.validate().map_err(py_err)?;
            Backend::Shots(cfg)
        }
        other => return Err(py_err(format!("unknown backend {other:?}"))),
    };
    let mut config = SynthesisConfig {
        backend,
        ansatz: if compressed { AnsatzKind::Compressed } else { AnsatzKind::Product },
        max_iters,
        ..Default::default()
    }
    .with_seed(seed);
    config.stop.target_residual = target_residual;
    let hamiltonian = h.inner.clone();
    let standard = match method {
        "redcard" => false,
        "standard" => true,
        other => return Err(py_err(format!("unknown method {other:?}"))),
    };
    let result = py
        .detach(move || {
            let dla = core_generate_dla(&hamiltonian, config.max_dim)?;
            let s = CartanStructure::build(&dla, &hamiltonian, &config.decompose_options())?;
            if standard {
                run_standard_with(&hamiltonian, &s, &config)
            } else {
                run_redcard_with(&hamiltonian, &s, &config)
            }
        })
        .map_err(py_err)?;
    Ok(PySynthesisResult { inner: result })
}

/// QASM for the circuit preparing `(I + σ)/2ⁿ`.
#[pyfunction]
#[pyo3(signature = (sigma, per_qubit_ancillas = false))]
fn state_prep_qasm(sigma: &str, per_qubit_ancillas: bool) -> PyResult<String> {
    let p: redcard::PauliString = sigma.parse().map_err(py_err)?;
    let mode = if per_qubit_ancillas { AncillaMode::PerQubit } else { AncillaMode::Single };
    Ok(export_qasm(&state_prep_circuit(&p, mode).map_err(py_err)?))
}

#[pymodule]
fn redcard_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPauliString>()?;
    m.add_class::<PyPauliSum>()?;
    m.add_class::<PySynthesisResult>()?;
    m.add_function(wrap_pyfunction!(build_model, m)?)?;
    m.add_function(wrap_pyfunction!(generate_dla, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize, m)?)?;
    m.add_function(wrap_pyfunction!(state_prep_qasm, m)?)?;
    Ok(())
}
