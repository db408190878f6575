//! Python bindings for the circadia core. Structured results come back as
//! plain dicts and lists; errors map onto three exception classes.

use circadia::dynamics::{self, IntegrateOptions, State};
use circadia::foster::{self, AdmittanceSample};
use circadia::params::{CircuitDescriptor, ReducedCircuit};
use circadia::potentials::PotentialModel;
use circadia::reduction::{self, Basis, Window};
use circadia::spectra::{self, bo, compact, Convention, HamiltonianSpec};
use circadia::{Error, ErrorClass};
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

create_exception!(circadia_py, InputError, PyValueError);
create_exception!(circadia_py, RegimeError, PyValueError);
create_exception!(circadia_py, NumericalError, PyRuntimeError);

fn err(e: Error) -> PyErr {
    let msg = e.to_string();
    match e.class() {
        ErrorClass::Input => InputError::new_err(msg),
        ErrorClass::Regime => RegimeError::new_err(msg),
        ErrorClass::Numerical => NumericalError::new_err(msg),
    }
}

fn to_py<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<PyObject> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(py.import_bound("json")?.call_method1("loads", (text,))?.unbind())
}

fn from_json<T: serde::de::DeserializeOwned>(text: &str) -> PyResult<T> {
    serde_json::from_str(text).map_err(|e| InputError::new_err(e.to_string()))
}

/// Adimensional circuit parameters (κ, ξ, λ_J, n_g) with β = λ_J/ξ².
#[pyclass(name = "Circuit", frozen)]
#[derive(Clone)]
struct PyCircuit(ReducedCircuit);

#[pymethods]
impl PyCircuit {
    #[new]
    #[pyo3(signature = (kappa, xi, lambda_j, ng = 0.0))]
    fn new(kappa: f64, xi: f64, lambda_j: f64, ng: f64) -> PyResult<Self> {
        ReducedCircuit::from_ratios(kappa, xi, lambda_j, ng).map(Self).map_err(err)
    }

    /// Reads a circuit descriptor JSON and returns (circuit, potential, scales).
    #[staticmethod]
    fn from_file(py: Python<'_>, path: std::path::PathBuf) -> PyResult<(Self, PyPotential, PyObject)> {
        let d = CircuitDescriptor::from_file(&path).map_err(err)?;
        let k = circadia::constants::Constants::load().map_err(err)?;
        let si = d.to_si(&k).map_err(err)?;
        let (rc, scales) = circadia::params::reduce_with(&si, &k).map_err(err)?;
        let p = d.potential_model(path.parent()).map_err(err)?;
        Ok((Self(rc), PyPotential(p), to_py(py, &scales)?))
    }

    fn with_kappa(&self, kappa: f64) -> PyResult<Self> {
        self.0.with_kappa(kappa).map(Self).map_err(err)
    }

    #[getter]
    fn kappa(&self) -> f64 {
        self.0.kappa
    }
    #[getter]
    fn xi(&self) -> f64 {
        self.0.xi
    }
    #[getter]
    fn lambda_j(&self) -> f64 {
        self.0.lambda_j
    }
    #[getter]
    fn beta(&self) -> f64 {
        self.0.beta
    }
    #[getter]
    fn ng(&self) -> f64 {
        self.0.ng
    }

    fn __repr__(&self) -> String {
        let c = &self.0;
        format!(
            "Circuit(kappa={}, xi={}, lambda_j={}, ng={}, beta={})",
            c.kappa, c.xi, c.lambda_j, c.ng, c.beta
        )
    }
}

/// Dimensionless junction potential u(φ).
#[pyclass(name = "Potential", frozen)]
#[derive(Clone)]
struct PyPotential(PotentialModel);

#[pymethods]
impl PyPotential {
    /// u = −cos φ.
    #[staticmethod]
    fn cosine() -> Self {
        Self(PotentialModel::cosine())
    }

    #[staticmethod]
    fn biased_cosine(phi_ext: f64) -> PyResult<Self> {
        PotentialModel::biased_cosine(phi_ext).map(Self).map_err(err)
    }

    /// u = Σ_k a_k φ^(2k).
    #[staticmethod]
    fn polynomial_even(coeffs: Vec<f64>) -> PyResult<Self> {
        PotentialModel::polynomial_even(coeffs).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        // Rebuild through the checked constructors.
        let p: PotentialModel = from_json(text)?;
        PotentialModel::new(p.kind().clone())
            .and_then(|m| m.with_tag(p.class_tag()))
            .map(Self)
            .map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn u(&self, phi: f64) -> PyResult<f64> {
        self.0.u(phi).map_err(err)
    }
    fn du(&self, phi: f64) -> PyResult<f64> {
        self.0.du(phi).map_err(err)
    }
    fn d2u(&self, phi: f64) -> PyResult<f64> {
        self.0.d2u(phi).map_err(err)
    }

    fn is_periodic(&self) -> bool {
        self.0.is_periodic()
    }

    /// β_crit = 1 / max(−u″).
    fn invertibility_threshold(&self) -> f64 {
        reduction::invertibility_threshold(&self.0)
    }
}

/// All roots φ_c of φ_c + β u′(φ_c) = φ in the default window.
#[pyfunction]
fn solve_consistency(py: Python<'_>, potential: &PyPotential, beta: f64, phi: f64) -> PyResult<PyObject> {
    let p = &potential.0;
    let window: Window = reduction::default_window(p, beta, phi).map_err(err)?;
    let sol = reduction::solve_consistency(p, beta, phi, window).map_err(err)?;
    to_py(py, &sol)
}

/// V, V′, V″ in E_C units on `coordinates`; basis is "compact_phi" or "extended_x".
#[pyfunction]
#[pyo3(signature = (potential, circuit, coordinates, basis = "compact_phi"))]
fn effective_potential(
    py: Python<'_>,
    potential: &PyPotential,
    circuit: &PyCircuit,
    coordinates: Vec<f64>,
    basis: &str,
) -> PyResult<PyObject> {
    let basis: Basis = from_json(&format!("\"{basis}\""))?;
    let v = reduction::effective_potential(&potential.0, &circuit.0, basis, &coordinates).map_err(err)?;
    to_py(py, &v)
}

/// Lowest `k` eigenvalues of an operator given as its JSON description.
#[pyfunction]
fn lowest_eigenvalues(py: Python<'_>, spec_json: &str, k: usize) -> PyResult<PyObject> {
    let spec: HamiltonianSpec = from_json(spec_json)?;
    let r = spectra::lowest_eigenvalues(&spec, k).map_err(err)?;
    to_py(py, &r)
}

/// Lowest `k` levels of c(n − n_g)² − λ_J cos φ in the charge basis.
#[pyfunction]
#[pyo3(signature = (lambda_j, k, ng = 0.0, kinetic = 1.0))]
fn compact_levels(lambda_j: f64, k: usize, ng: f64, kinetic: f64) -> PyResult<Vec<f64>> {
    let spec = HamiltonianSpec::compact_1d(kinetic, lambda_j, ng);
    Ok(spectra::lowest_eigenvalues(&spec, k).map_err(err)?.eigenvalues)
}

/// Born–Oppenheimer slow potential along a strictly decreasing κ ladder.
#[pyfunction]
fn bo_sweep(
    py: Python<'_>,
    kappas: Vec<f64>,
    xs: Vec<f64>,
    xi: f64,
    lambda_j: f64,
    potential: &PyPotential,
) -> PyResult<PyObject> {
    let s = py
        .allow_threads(|| bo::bo_effective_potential(&kappas, &xs, xi, lambda_j, &potential.0))
        .map_err(err)?;
    to_py(py, &s)
}

/// Flat fast-phase ladder of the compact circuit.
#[pyfunction]
#[pyo3(signature = (kappa, xi, k, ng = 0.0, charge_half_factor = false))]
fn naive_adiabatic(
    py: Python<'_>,
    kappa: f64,
    xi: f64,
    k: usize,
    ng: f64,
    charge_half_factor: bool,
) -> PyResult<PyObject> {
    let n = compact::naive_compact_adiabatic(kappa, xi, ng, k, Convention { charge_half_factor })
        .map_err(err)?;
    to_py(py, &n)
}

/// Velocity-Verlet trajectory from (x, p_x, y, p_y).
#[pyfunction]
#[pyo3(signature = (circuit, potential, initial, t_end, dt = dynamics::DEFAULT_DT,
                    drift_tolerance = dynamics::DEFAULT_DRIFT_TOLERANCE, record_every = 100))]
fn integrate(
    py: Python<'_>,
    circuit: &PyCircuit,
    potential: &PyPotential,
    initial: (f64, f64, f64, f64),
    t_end: f64,
    dt: f64,
    drift_tolerance: f64,
    record_every: usize,
) -> PyResult<PyObject> {
    let (x, px, y, py_) = initial;
    let opts = IntegrateOptions {
        dt,
        record_every,
        drift_tolerance,
    };
    let rec = py
        .allow_threads(|| {
            dynamics::integrate(&circuit.0, &potential.0, State { x, px, y, py: py_ }, t_end, opts)
        })
        .map_err(err)?;
    to_py(py, &rec)
}

/// Period of small slow oscillations in slow time s = κ²t.
#[pyfunction]
fn slow_period(circuit: &PyCircuit, potential: &PyPotential) -> PyResult<f64> {
    dynamics::slow_period(&circuit.0, &potential.0).map_err(err)
}

/// Least-squares Foster fit of lossless samples Im Y(ω).
#[pyfunction]
fn fit_foster(py: Python<'_>, omegas: Vec<f64>, im_y: Vec<f64>, resonances: usize) -> PyResult<PyObject> {
    if omegas.len() != im_y.len() {
        return Err(InputError::new_err("omegas and im_y differ in length"));
    }
    let samples: Vec<AdmittanceSample> =
        omegas.iter().zip(&im_y).map(|(w, y)| AdmittanceSample::lossless(*w, *y)).collect();
    let fit = foster::fit_foster(&samples, resonances).map_err(err)?;
    to_py(py, &fit)
}

#[pymodule]
fn circadia_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<PyCircuit>()?;
    m.add_class::<PyPotential>()?;
    m.add("InputError", py.get_type_bound::<InputError>())?;
    m.add("RegimeError", py.get_type_bound::<RegimeError>())?;
    m.add("NumericalError", py.get_type_bound::<NumericalError>())?;
    m.add_function(wrap_pyfunction!(solve_consistency, m)?)?;
    m.add_function(wrap_pyfunction!(effective_potential, m)?)?;
    m.add_function(wrap_pyfunction!(lowest_eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(compact_levels, m)?)?;
    m.add_function(wrap_pyfunction!(bo_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(naive_adiabatic, m)?)?;
    m.add_function(wrap_pyfunction!(integrate, m)?)?;
    m.add_function(wrap_pyfunction!(slow_period, m)?)?;
    m.add_function(wrap_pyfunction!(fit_foster, m)?)?;
    Ok(())
}
