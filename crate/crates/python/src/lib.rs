//! Python bindings for the `fermion_split` crate.

use std::collections::BTreeMap;

use fermion_split::concurrence as conc;
use fermion_split::detector;
use fermion_split::entanglement;
use fermion_split::pipeline;
use fermion_split::scenario::{self, PGrid, Scenario, ScenarioConfig};
use fermion_split::transforms;
use fermion_split::{FockVector, OccupationState, OrbitalBasis, SingleParticleUnitary};
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: fermion_split::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

trait OrPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for fermion_split::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(err)
    }
}

#[pyclass(
    name = "Basis",
    module = "fermion_split_py",
    frozen,
    skip_from_py_object
)]
#[derive(Clone)]
struct PyBasis(OrbitalBasis);

#[pymethods]
impl PyBasis {
    #[new]
    fn new(modes: Vec<String>, internal_dim: usize) -> PyResult<Self> {
        OrbitalBasis::new(modes, internal_dim).py().map(Self)
    }

    #[staticmethod]
    fn double_well(internal_dim: usize) -> PyResult<Self> {
        OrbitalBasis::double_well(internal_dim).py().map(Self)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn internal_dim(&self) -> usize {
        self.0.internal_dim()
    }

    #[getter]
    fn modes(&self) -> Vec<String> {
        self.0.spatial_modes().to_vec()
    }

    fn orbital(&self, mode: usize, level: usize) -> PyResult<usize> {
        self.0.orbital(mode, level).py()
    }

    /// Occupied-orbital lists of every N-particle ket, in canonical order.
    fn sector(&self, n: usize) -> Vec<Vec<usize>> {
        self.0.sector(n).iter().map(|k| k.to_vec()).collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "Basis(modes={:?}, internal_dim={})",
            self.0.spatial_modes(),
            self.0.internal_dim()
        )
    }
}

#[pyclass(
    name = "State",
    module = "fermion_split_py",
    frozen,
    skip_from_py_object
)]
#[derive(Clone)]
struct PyState(FockVector);

#[pymethods]
impl PyState {
    #[staticmethod]
    fn slater(basis: &PyBasis, orbitals: Vec<usize>) -> PyResult<Self> {
        FockVector::slater(&basis.0, &orbitals).py().map(Self)
    }

    /// Builds a state from `(occupied orbitals, amplitude)` pairs; each list
    /// labels the canonical ascending-order ket.
    #[staticmethod]
    fn from_amplitudes(
        basis: &PyBasis,
        n_particles: usize,
        entries: Vec<(Vec<usize>, Complex64)>,
    ) -> PyResult<Self> {
        let entries = entries
            .into_iter()
            .map(|(o, a)| OccupationState::from_orbitals(&o).map(|k| (k, a)))
            .collect::<fermion_split::Result<Vec<_>>>()
            .py()?;
        FockVector::from_amplitudes(&basis.0, n_particles, entries)
            .py()
            .map(Self)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        FockVector::from_json(text).py().map(Self)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[getter]
    fn n_particles(&self) -> usize {
        self.0.n_particles()
    }

    #[getter]
    fn basis(&self) -> PyBasis {
        PyBasis(self.0.basis().clone())
    }

    fn norm(&self) -> f64 {
        self.0.norm()
    }

    fn normalized(&self) -> Self {
        Self(self.0.normalized())
    }

    fn amplitude(&self, orbitals: Vec<usize>) -> PyResult<Complex64> {
        let k = OccupationState::from_orbitals(&orbitals).py()?;
        Ok(self.0.amplitude(k))
    }

    fn amplitudes(&self) -> BTreeMap<Vec<usize>, Complex64> {
        self.0.iter().map(|(k, a)| (k.to_vec(), a)).collect()
    }

    fn create(&self, orbital: usize) -> PyResult<Self> {
        self.0.apply_creation(orbital).py().map(Self)
    }

    fn annihilate(&self, orbital: usize) -> PyResult<Self> {
        self.0.apply_annihilation(orbital).py().map(Self)
    }

    fn inner_product(&self, other: &PyState) -> PyResult<Complex64> {
        self.0.inner_product(&other.0).py()
    }

    fn fidelity(&self, other: &PyState) -> PyResult<f64> {
        self.0.fidelity(&other.0).py()
    }

    fn __repr__(&self) -> String {
        format!(
            "State(n_particles={}, support={})",
            self.0.n_particles(),
            self.0.support_len()
        )
    }
}

#[pyclass(
    name = "Unitary",
    module = "fermion_split_py",
    frozen,
    skip_from_py_object
)]
#[derive(Clone)]
struct PyUnitary(SingleParticleUnitary);

#[pymethods]
impl PyUnitary {
    #[staticmethod]
    #[pyo3(signature = (basis, p, forward = true))]
    fn split(basis: &PyBasis, p: f64, forward: bool) -> PyResult<Self> {
        transforms::make_split(&basis.0, p, forward).py().map(Self)
    }

    fn matrix(&self) -> Vec<Vec<Complex64>> {
        let m = self.0.matrix();
        (0..m.nrows())
            .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
            .collect()
    }

    fn inverse(&self) -> Self {
        Self(self.0.inverse())
    }

    /// `self` after `first`.
    fn compose(&self, first: &PyUnitary) -> PyResult<Self> {
        self.0.compose(&first.0).py().map(Self)
    }

    fn apply(&self, state: &PyState) -> PyResult<PyState> {
        transforms::lift_unitary(&self.0, &state.0)
            .py()
            .map(PyState)
    }
}

#[pyfunction]
fn final_state(basis: &PyBasis, n_particles: usize, p: f64) -> PyResult<PyState> {
    pipeline::final_state(&basis.0, n_particles, p)
        .py()
        .map(PyState)
}

#[pyfunction]
fn projected_state(
    basis: &PyBasis,
    n_particles: usize,
    m: usize,
    p: f64,
) -> PyResult<(PyState, f64)> {
    let (v, prob) = pipeline::projected_state(&basis.0, n_particles, m, p).py()?;
    Ok((PyState(v), prob))
}

#[pyfunction]
fn project_mode_count(state: &PyState, mode: &str, count: usize) -> PyResult<(PyState, f64)> {
    let (v, prob) = transforms::project_mode_count(&state.0, mode, count).py()?;
    Ok((PyState(v), prob))
}

#[pyfunction]
fn counting_statistics(state: &PyState) -> PyResult<BTreeMap<(usize, usize), f64>> {
    Ok(transforms::counting_statistics(&state.0)
        .py()?
        .iter()
        .collect())
}

#[pyfunction]
fn schmidt_spectrum(state: &PyState, m: usize) -> PyResult<Vec<f64>> {
    entanglement::schmidt_spectrum(&state.0, m).py()
}

#[pyfunction]
fn purity(state: &PyState, m: usize) -> PyResult<f64> {
    entanglement::purity(&state.0, m).py()
}

#[pyfunction]
#[pyo3(signature = (state, m = 1, tol = 1e-10))]
fn is_slater(state: &PyState, m: usize, tol: f64) -> PyResult<bool> {
    entanglement::is_slater(&state.0, m, tol).py()
}

#[pyfunction]
fn linear_entropy(state: &PyState) -> PyResult<f64> {
    entanglement::linear_entropy_single(&state.0).py()
}

/// Alice x Bob coefficient matrix of a one-per-well two-fermion state.
#[pyfunction]
fn effective_state(state: &PyState) -> PyResult<Vec<Vec<Complex64>>> {
    let c = entanglement::effective_state(&state.0).py()?.coefficients;
    Ok((0..c.nrows())
        .map(|r| (0..c.ncols()).map(|k| c[(r, k)]).collect())
        .collect())
}

#[pyfunction]
fn concurrence(state: &PyState) -> PyResult<f64> {
    conc::concurrence_pure(&state.0).py()
}

/// Couples `state` to a `levels`-level which-well detector, then returns the
/// concurrence of the fermions with the detector discarded and, per readout
/// level, the conditional state and its probability.
#[pyfunction]
#[pyo3(signature = (state, levels = 3, tau = 1.0))]
fn detect(state: &PyState, levels: usize, tau: f64) -> PyResult<(f64, Vec<(PyState, f64)>)> {
    let coupling = detector::build_coupling(levels, tau).py()?;
    let joint = detector::interact(&state.0, &coupling, 0).py()?;
    let rho = detector::trace_out_detector(&joint);
    let c = if state.0.n_particles() == 2 && state.0.basis().dim() == 4 {
        conc::concurrence_mixed(&rho).py()?
    } else {
        f64::NAN
    };
    let outcomes = (0..levels)
        .map(|l| detector::readout(&joint, l).map(|(v, p)| (PyState(v), p)))
        .collect::<fermion_split::Result<Vec<_>>>()
        .py()?;
    Ok((c, outcomes))
}

/// Runs a named scenario (`two-electron`, `certify`, `n-fermion`, `detector`)
/// and returns its record as JSON.
#[pyfunction]
#[pyo3(signature = (name, p = None, p_grid = None, n = None, m = None, internal_dim = None, detector_levels = 3, tol = None))]
#[allow(clippy::too_many_arguments)]
fn run_scenario(
    name: &str,
    p: Option<f64>,
    p_grid: Option<&str>,
    n: Option<usize>,
    m: Option<usize>,
    internal_dim: Option<usize>,
    detector_levels: usize,
    tol: Option<f64>,
) -> PyResult<String> {
    let scenario = match name {
        "two-electron" => Scenario::TwoElectron,
        "certify" => Scenario::Certify,
        "n-fermion" => Scenario::NFermion,
        "detector" => Scenario::Detector,
        other => return Err(PyValueError::new_err(format!("unknown scenario `{other}`"))),
    };
    let mut cfg = ScenarioConfig::new(scenario);
    if let Some(p) = p {
        cfg.p_grid = PGrid::single(p);
    }
    if let Some(g) = p_grid {
        cfg.p_grid = g.parse().py()?;
    }
    if let Some(n) = n {
        cfg.n = n;
        cfg.internal_dim = cfg.internal_dim.max(n);
    }
    if let Some(m) = m {
        cfg.m = m;
    }
    if let Some(d) = internal_dim {
        cfg.internal_dim = d;
    }
    cfg.detector_levels = detector_levels;
    cfg.tol = tol;
    let record = scenario::run(&cfg).py()?;
    Ok(record.to_json())
}

#[pymodule]
fn fermion_split_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBasis>()?;
    m.add_class::<PyState>()?;
    m.add_class::<PyUnitary>()?;
    m.add_function(wrap_pyfunction!(final_state, m)?)?;
    m.add_function(wrap_pyfunction!(projected_state, m)?)?;
    m.add_function(wrap_pyfunction!(project_mode_count, m)?)?;
    m.add_function(wrap_pyfunction!(counting_statistics, m)?)?;
    m.add_function(wrap_pyfunction!(schmidt_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(purity, m)?)?;
    m.add_function(wrap_pyfunction!(is_slater, m)?)?;
    m.add_function(wrap_pyfunction!(linear_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(effective_state, m)?)?;
    m.add_function(wrap_pyfunction!(concurrence, m)?)?;
    m.add_function(wrap_pyfunction!(detect, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add("__version__", scenario::VERSION)?;
    Ok(())
}
