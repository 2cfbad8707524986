use gaussep::model;
use gaussep::noise::{self, GaussianFraction, PhaseNoiseStrength};
use gaussep::spectrum;
use gaussep::tomography;
use gaussep::{reference, CovarianceMatrix, LossVector, SingleModeSpec};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: gaussep::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Covariance matrix of an N-mode Gaussian state, `(x1, p1, x2, p2, ...)`
/// ordering, vacuum variance 1.
#[pyclass(name = "CovarianceMatrix", module = "pygaussep", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyCovarianceMatrix {
    inner: CovarianceMatrix,
}

impl From<CovarianceMatrix> for PyCovarianceMatrix {
    fn from(inner: CovarianceMatrix) -> Self {
        Self { inner }
    }
}

#[pymethods]
impl PyCovarianceMatrix {
    #[new]
    fn new(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        CovarianceMatrix::from_rows(&rows).map(Self::from).map_err(err)
    }

    #[staticmethod]
    fn vacuum(n_modes: usize) -> Self {
        CovarianceMatrix::vacuum(n_modes).into()
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        CovarianceMatrix::from_json_str(text).map(Self::from).map_err(err)
    }

    fn to_json(&self) -> String {
        self.inner.to_json_string()
    }

    #[getter]
    fn n_modes(&self) -> usize {
        self.inner.n_modes()
    }

    fn to_list(&self) -> Vec<Vec<f64>> {
        self.inner.to_rows()
    }

    fn __getitem__(&self, idx: (usize, usize)) -> PyResult<f64> {
        let d = self.inner.dim();
        if idx.0 >= d || idx.1 >= d {
            return Err(pyo3::exceptions::PyIndexError::new_err("index out of range"));
        }
        Ok(self.inner.get(idx.0, idx.1))
    }

    fn symplectic_eigenvalues(&self) -> PyResult<Vec<f64>> {
        spectrum::symplectic_eigenvalues(&self.inner).map_err(err)
    }

    fn partial_transpose(&self, mode: usize) -> PyResult<Self> {
        spectrum::partial_transpose(&self.inner, mode).map(Self::from).map_err(err)
    }

    fn ppt_value(&self, mode: usize) -> PyResult<f64> {
        spectrum::ppt_value(&self.inner, mode).map_err(err)
    }

    fn ppt_values(&self) -> PyResult<Vec<f64>> {
        spectrum::ppt_values(&self.inner).map_err(err)
    }

    fn is_physical(&self) -> PyResult<bool> {
        spectrum::is_physical(&self.inner).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("CovarianceMatrix(n_modes={})", self.inner.n_modes())
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }
}

fn spec(kind: &str, x_db: f64, p_db: f64) -> PyResult<SingleModeSpec> {
    let s = match kind {
        "vacuum" => SingleModeSpec::vacuum(),
        "squeezed" => SingleModeSpec::squeezed_db(x_db, p_db),
        "thermal" => SingleModeSpec::thermal_db(x_db),
        "hot_squeezed" => SingleModeSpec::hot_squeezed_db(x_db, p_db),
        other => return Err(PyValueError::new_err(format!("unknown state kind {other:?}"))),
    };
    s.validate().map_err(err)?;
    Ok(s)
}

/// Three-mode state from a squeezed input `(x_db, p_db)`, a vacuum and a
/// noise input of the given kind.
#[pyfunction]
#[pyo3(signature = (squeezed_db, noise_db, noise_kind = "hot_squeezed", preparation_loss = 0.0))]
fn prepare_three_mode(
    squeezed_db: (f64, f64),
    noise_db: (f64, f64),
    noise_kind: &str,
    preparation_loss: f64,
) -> PyResult<PyCovarianceMatrix> {
    let sq = gaussep::make_state(&spec("squeezed", squeezed_db.0, squeezed_db.1)?).map_err(err)?;
    let sq = gaussep::apply_preparation_loss(&sq, preparation_loss).map_err(err)?;
    let noise = gaussep::make_state(&spec(noise_kind, noise_db.0, noise_db.1)?).map_err(err)?;
    gaussep::mix_three_mode(&sq, &CovarianceMatrix::vacuum(1), &noise)
        .map(Into::into)
        .map_err(err)
}

#[pyfunction]
fn measured() -> PyCovarianceMatrix {
    reference::measured().into()
}

#[pyfunction]
fn loss_compensated() -> PyCovarianceMatrix {
    reference::loss_compensated().into()
}

#[pyfunction]
fn apply_loss(gamma: &PyCovarianceMatrix, eta: Vec<f64>) -> PyResult<PyCovarianceMatrix> {
    let eta = LossVector::new(eta).map_err(err)?;
    gaussep::apply_loss(&gamma.inner, &eta).map(Into::into).map_err(err)
}

#[pyfunction]
fn invert_loss(gamma: &PyCovarianceMatrix, eta: Vec<f64>) -> PyResult<PyCovarianceMatrix> {
    let eta = LossVector::new(eta).map_err(err)?;
    gaussep::invert_loss(&gamma.inner, &eta).map(Into::into).map_err(err)
}

/// Phase noise of strength `sigma` (radians) on every mode.
#[pyfunction]
fn apply_phase_noise(gamma: &PyCovarianceMatrix, sigma: f64) -> PyResult<PyCovarianceMatrix> {
    let s = PhaseNoiseStrength::new(sigma).map_err(err)?;
    Ok(gaussep::apply_phase_noise(&gamma.inner, s).into())
}

#[pyfunction]
fn invert_phase_noise(gamma: &PyCovarianceMatrix, sigma: f64) -> PyResult<PyCovarianceMatrix> {
    let s = PhaseNoiseStrength::new(sigma).map_err(err)?;
    Ok(gaussep::invert_phase_noise(&gamma.inner, s).into())
}

#[pyfunction]
fn degauss_hot_squeezing(gamma: &PyCovarianceMatrix, p_g: f64) -> PyResult<PyCovarianceMatrix> {
    let p = GaussianFraction::new(p_g).map_err(err)?;
    gaussep::degauss_hot_squeezing(&gamma.inner, p).map(Into::into).map_err(err)
}

#[pyfunction]
fn distribute(gamma: &PyCovarianceMatrix, phi: f64) -> PyResult<PyCovarianceMatrix> {
    gaussep::distribute(&gamma.inner, phi).map(Into::into).map_err(err)
}

#[pyfunction]
fn duan_value(gamma: &PyCovarianceMatrix) -> PyResult<f64> {
    gaussep::duan_value(&gamma.inner).map_err(err)
}

/// Returns `(phi, duan)` at the optimal distribution phase.
#[pyfunction]
fn optimize_distribution_phase(gamma: &PyCovarianceMatrix) -> PyResult<(f64, f64)> {
    let o = gaussep::optimize_distribution_phase(&gamma.inner).map_err(err)?;
    Ok((o.phi, o.duan))
}

/// Rows `(loss, muA, muB, muC, physical)`.
#[pyfunction]
fn loss_sweep(gamma: &PyCovarianceMatrix, losses: Vec<f64>) -> PyResult<Vec<(f64, f64, f64, f64, bool)>> {
    let rows = gaussep::loss_sweep(&gamma.inner, &losses).map_err(err)?;
    Ok(rows.iter().map(|r| (r.loss, r.mu[0], r.mu[1], r.mu[2], r.physical)).collect())
}

/// Rows `(sigma, mu0, muA, min_muB_muC)` and the threshold, both in radians.
#[pyfunction]
#[pyo3(signature = (gamma_l, sigmas, p_g = 1.0))]
fn phase_noise_sweep(
    gamma_l: &PyCovarianceMatrix,
    sigmas: Vec<f64>,
    p_g: f64,
) -> PyResult<(Vec<(f64, f64, f64, f64)>, f64)> {
    let p = GaussianFraction::new(p_g).map_err(err)?;
    let s = noise::degauss_phase_noise_sweep(&gamma_l.inner, &sigmas, p).map_err(err)?;
    let rows = s.rows.iter().map(|r| (r.sigma, r.mu0, r.mu_a, r.min_mu_bc)).collect();
    Ok((rows, s.threshold))
}

/// Rows `(thermal_db, ppt_a, ppt_b, ppt_c)` for the ideal preparation model.
#[pyfunction]
fn thermal_sweep(squeezing_db: f64, loss: f64, thermal_db: Vec<f64>) -> PyResult<Vec<(f64, f64, f64, f64)>> {
    let pts = model::thermal_sweep(squeezing_db, loss, &thermal_db).map_err(err)?;
    Ok(pts.iter().map(|p| (p.thermal_db, p.ppt_a, p.ppt_b, p.ppt_c)).collect())
}

/// Thermal noise (dB) at which the C splitting becomes separable, or None.
#[pyfunction]
fn separability_onset(squeezing_db: f64, loss: f64, thermal_db: Vec<f64>) -> PyResult<Option<f64>> {
    let pts = model::thermal_sweep(squeezing_db, loss, &thermal_db).map_err(err)?;
    model::separability_onset(squeezing_db, loss, &pts).map_err(err)
}

/// Simulated six-setting tomography; returns `(gamma_hat, std_errors)`.
#[pyfunction]
fn simulate_tomography(
    gamma: &PyCovarianceMatrix,
    n_samples: usize,
    seed: u64,
) -> PyResult<(PyCovarianceMatrix, Vec<Vec<f64>>)> {
    let blocks = tomography::sample_all_settings(&gamma.inner, n_samples, seed).map_err(err)?;
    let r = tomography::reconstruct(&blocks).map_err(err)?;
    let se = r.std_errors.row_iter().map(|row| row.iter().copied().collect()).collect();
    Ok((r.gamma_hat.into(), se))
}

/// Ensemble means and standard deviations of the PPT values over simulated
/// tomography runs.
#[pyfunction]
fn monte_carlo_ppt<'py>(
    py: Python<'py>,
    gamma: &PyCovarianceMatrix,
    n_samples: usize,
    n_runs: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let inner = gamma.inner.clone();
    let s = py
        .detach(move || gaussep::monte_carlo_ppt(&inner, n_samples, n_runs, seed))
        .map_err(err)?;
    let d = PyDict::new(py);
    for (k, v) in [("muA", s.mu_a), ("muB", s.mu_b), ("muC", s.mu_c)] {
        d.set_item(k, (v.mean, v.std))?;
    }
    d.set_item("n_samples", s.n_samples)?;
    d.set_item("n_runs", s.n_runs)?;
    d.set_item("seed", s.seed)?;
    Ok(d)
}

#[pymodule]
fn pygaussep(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCovarianceMatrix>()?;
    m.add_function(wrap_pyfunction!(prepare_three_mode, m)?)?;
    m.add_function(wrap_pyfunction!(measured, m)?)?;
    m.add_function(wrap_pyfunction!(loss_compensated, m)?)?;
    m.add_function(wrap_pyfunction!(apply_loss, m)?)?;
    m.add_function(wrap_pyfunction!(invert_loss, m)?)?;
    m.add_function(wrap_pyfunction!(apply_phase_noise, m)?)?;
    m.add_function(wrap_pyfunction!(invert_phase_noise, m)?)?;
    m.add_function(wrap_pyfunction!(degauss_hot_squeezing, m)?)?;
    m.add_function(wrap_pyfunction!(distribute, m)?)?;
    m.add_function(wrap_pyfunction!(duan_value, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_distribution_phase, m)?)?;
    m.add_function(wrap_pyfunction!(loss_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(phase_noise_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(thermal_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(separability_onset, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_tomography, m)?)?;
    m.add_function(wrap_pyfunction!(monte_carlo_ppt, m)?)?;
    m.add("DETECTION_EFFICIENCIES", reference::DETECTION_EFFICIENCIES.to_vec())?;
    Ok(())
}
