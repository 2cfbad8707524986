//! Linear optical networks acting on covariance matrices, and the three-mode
//! preparation and distribution circuits built from them.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;

use crate::covariance::{CovarianceMatrix, SymplecticForm};
use crate::error::{Error, Result};
use crate::states::{make_state, SingleModeSpec};

/// Mode labels of the three-mode state. Every three-mode matrix in this crate
/// is ordered `(X_A, P_A, X_B, P_B, X_C, P_C)`.
pub mod modes {
    pub const A: usize = 0;
    pub const B: usize = 1;
    pub const C: usize = 2;
}

/// Tolerance on `S J S^T = J`.
pub const SYMPLECTIC_TOLERANCE: f64 = 1e-9;

/// Number of points in the coarse scan of the distribution phase.
pub const PHASE_SCAN_POINTS: usize = 360;

/// Stopping width of the golden-section refinement, in radians.
pub const PHASE_TOLERANCE: f64 = 1e-6;

/// A linear canonical transformation `gamma -> S gamma S^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMap {
    data: DMatrix<f64>,
}

impl SymplecticMap {
    pub fn identity(n_modes: usize) -> Self {
        Self {
            data: DMatrix::identity(2 * n_modes, 2 * n_modes),
        }
    }

    /// Wraps an arbitrary matrix, rejecting it unless it is symplectic.
    pub fn new(data: DMatrix<f64>) -> Result<Self> {
        if !data.is_square() || data.nrows() % 2 != 0 || data.nrows() == 0 {
            return Err(Error::MalformedMatrix(format!(
                "{}x{} cannot be a symplectic map",
                data.nrows(),
                data.ncols()
            )));
        }
        let map = Self { data };
        let err = map.symplecticity_error();
        if err > SYMPLECTIC_TOLERANCE {
            return Err(Error::MalformedMatrix(format!(
                "not symplectic (|SJS^T - J| = {err:.3e})"
            )));
        }
        Ok(map)
    }

    pub fn n_modes(&self) -> usize {
        self.data.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    /// Largest entry of `|S J S^T - J|`.
    pub fn symplecticity_error(&self) -> f64 {
        let j = SymplecticForm::new(self.n_modes()).matrix();
        (&self.data * &j * self.data.transpose() - j).amax()
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &SymplecticMap) -> SymplecticMap {
        assert_eq!(self.n_modes(), next.n_modes(), "mode count mismatch");
        SymplecticMap {
            data: &next.data * &self.data,
        }
    }

    pub fn apply(&self, gamma: &CovarianceMatrix) -> Result<CovarianceMatrix> {
        gamma.require_modes(self.n_modes())?;
        Ok(CovarianceMatrix::from_computed(
            &self.data * gamma.matrix() * self.data.transpose(),
        ))
    }
}

fn check_index(mode: usize, n_modes: usize) -> Result<()> {
    if mode >= n_modes {
        return Err(Error::IndexOutOfRange {
            index: mode,
            n_modes,
        });
    }
    Ok(())
}

/// Phase rotation `X' = X cos(phi) + P sin(phi)`, `P' = P cos(phi) - X sin(phi)`
/// on one mode.
pub fn phase_shift(phi: f64, mode: usize, n_modes: usize) -> Result<SymplecticMap> {
    check_index(mode, n_modes)?;
    let mut s = SymplecticMap::identity(n_modes);
    let (sin, cos) = phi.sin_cos();
    let b = 2 * mode;
    s.data[(b, b)] = cos;
    s.data[(b, b + 1)] = sin;
    s.data[(b + 1, b)] = -sin;
    s.data[(b + 1, b + 1)] = cos;
    Ok(s)
}

/// Beam splitter with power transmittance `t` between modes `i` and `j`:
///
/// ```text
/// out_i =  sqrt(t) in_i + sqrt(1-t) in_j
/// out_j = -sqrt(1-t) in_i + sqrt(t) in_j
/// ```
///
/// applied identically to the X and P quadratures. `t = 1` is the identity.
pub fn beamsplitter(t: f64, i: usize, j: usize, n_modes: usize) -> Result<SymplecticMap> {
    check_index(i, n_modes)?;
    check_index(j, n_modes)?;
    if i == j {
        return Err(Error::IndexOutOfRange { index: j, n_modes });
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::TransmittanceOutOfRange(t));
    }
    let (tr, rf) = (t.sqrt(), (1.0 - t).sqrt());
    let mut s = SymplecticMap::identity(n_modes);
    for q in 0..2 {
        let (a, b) = (2 * i + q, 2 * j + q);
        s.data[(a, a)] = tr;
        s.data[(a, b)] = rf;
        s.data[(b, a)] = -rf;
        s.data[(b, b)] = tr;
    }
    Ok(s)
}

/// Single-mode squeezer `diag(e^{-r}, e^{r})` on one mode.
pub fn squeezer(r: f64, mode: usize, n_modes: usize) -> Result<SymplecticMap> {
    check_index(mode, n_modes)?;
    let mut s = SymplecticMap::identity(n_modes);
    s.data[(2 * mode, 2 * mode)] = (-r).exp();
    s.data[(2 * mode + 1, 2 * mode + 1)] = r.exp();
    Ok(s)
}

/// Block-diagonal composition `g1 (+) g2`.
pub fn tensor(g1: &CovarianceMatrix, g2: &CovarianceMatrix) -> CovarianceMatrix {
    let (d1, d2) = (g1.dim(), g2.dim());
    let mut out = DMatrix::zeros(d1 + d2, d1 + d2);
    out.view_mut((0, 0), (d1, d1)).copy_from(g1.matrix());
    out.view_mut((d1, d1), (d2, d2)).copy_from(g2.matrix());
    CovarianceMatrix::from_computed(out)
}

/// Marginal covariance after discarding `mode`.
pub fn trace_out(gamma: &CovarianceMatrix, mode: usize) -> Result<CovarianceMatrix> {
    gamma.check_mode(mode)?;
    if gamma.n_modes() < 2 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: gamma.dim(),
        });
    }
    let out = gamma.matrix().clone().remove_rows(2 * mode, 2).remove_columns(2 * mode, 2);
    Ok(CovarianceMatrix::from_computed(out))
}

/// Three-mode preparation circuit.
///
/// The squeezed input is split with the vacuum on a balanced beam splitter; the
/// first output is A. The second output is mixed with the thermal input on a
/// second balanced beam splitter whose outputs are B (first port) and C
/// (second port).
pub fn prepare_three_mode(
    sq: &SingleModeSpec,
    vac: &SingleModeSpec,
    th: &SingleModeSpec,
) -> Result<CovarianceMatrix> {
    mix_three_mode(&make_state(sq)?, &make_state(vac)?, &make_state(th)?)
}

/// [`prepare_three_mode`] for arbitrary single-mode input covariances.
pub fn mix_three_mode(
    sq: &CovarianceMatrix,
    vac: &CovarianceMatrix,
    th: &CovarianceMatrix,
) -> Result<CovarianceMatrix> {
    for g in [sq, vac, th] {
        g.require_modes(1)?;
    }
    let input = tensor(&tensor(sq, vac), th);
    let circuit = beamsplitter(0.5, 0, 1, 3)?.then(&beamsplitter(0.5, 1, 2, 3)?);
    circuit.apply(&input)
}

/// Distribution step: rotate C by `phi`, mix B and C on a balanced beam
/// splitter, keep the first output port as B'. Returns the (A, B') state.
pub fn distribute(gamma_abc: &CovarianceMatrix, phi: f64) -> Result<CovarianceMatrix> {
    gamma_abc.require_modes(3)?;
    let circuit = phase_shift(phi, modes::C, 3)?.then(&beamsplitter(0.5, modes::B, modes::C, 3)?);
    trace_out(&circuit.apply(gamma_abc)?, modes::C)
}

/// `Var(X_A - X_B') + Var(P_A + P_B')`. Values below 4 witness entanglement.
pub fn duan_value(gamma_ab: &CovarianceMatrix) -> Result<f64> {
    gamma_ab.require_modes(2)?;
    let g = |i, j| gamma_ab.get(i, j);
    let var_x_minus = g(0, 0) + g(2, 2) - 2.0 * g(0, 2);
    let var_p_plus = g(1, 1) + g(3, 3) + 2.0 * g(1, 3);
    Ok(var_x_minus + var_p_plus)
}

/// Duan value of the distributed state at a given phase.
pub fn duan_after_distribution(gamma_abc: &CovarianceMatrix, phi: f64) -> Result<f64> {
    duan_value(&distribute(gamma_abc, phi)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseOptimum {
    /// Optimal phase in `[0, 2 pi)`.
    pub phi: f64,
    pub duan: f64,
}

/// Minimizes the Duan value of the distributed state over the phase of C.
///
/// A 360-point scan over `[0, 2 pi)` picks the best grid angle (ties go to the
/// smaller angle); golden-section search then refines within one grid step on
/// either side. A refined point is accepted only if it strictly improves.
pub fn optimize_distribution_phase(gamma_abc: &CovarianceMatrix) -> Result<PhaseOptimum> {
    gamma_abc.require_modes(3)?;
    let f = |phi: f64| duan_after_distribution(gamma_abc, phi);
    let step = TAU / PHASE_SCAN_POINTS as f64;

    let mut best = PhaseOptimum {
        phi: 0.0,
        duan: f(0.0)?,
    };
    for k in 1..PHASE_SCAN_POINTS {
        let phi = k as f64 * step;
        let duan = f(phi)?;
        if duan < best.duan - 1e-12 {
            best = PhaseOptimum { phi, duan };
        }
    }

    let (phi, duan) = golden_section(&f, best.phi - step, best.phi + step, PHASE_TOLERANCE)?;
    if duan < best.duan - 1e-12 {
        best = PhaseOptimum {
            phi: phi.rem_euclid(TAU),
            duan,
        };
    }
    Ok(best)
}

fn golden_section<F>(f: &F, mut lo: f64, mut hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2)?;
        }
    }
    let x = 0.5 * (lo + hi);
    Ok((x, f(x)?))
}

/// Angle difference folded into `[-pi/2, pi/2)`, for comparing phases mod pi.
pub fn angle_diff_mod_pi(a: f64, b: f64) -> f64 {
    (a - b + PI / 2.0).rem_euclid(PI) - PI / 2.0
}
