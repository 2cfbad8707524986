//! Imperfection channels and their inversions: inefficient homodyne
//! detection, Gaussian phase jitter, and the non-Gaussian part of hot-squeezing
//! modulation.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;

use crate::covariance::{CovarianceMatrix, SymplecticForm};
use crate::error::{Error, Result};
use crate::network::modes;
use crate::spectrum::{is_physical, min_symplectic_eigenvalue, ppt_value, UNITY_TOLERANCE};

/// Minimum gap between the two noisiest eigenvalues and the rest.
pub const DEGENERACY_TOLERANCE: f64 = 1e-6;

/// Bisection stops once the bracket is narrower than this (radians).
pub const THRESHOLD_TOLERANCE: f64 = 1e-4;

/// Per-mode detection efficiencies, each in `(0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LossVector(Vec<f64>);

impl LossVector {
    pub fn new(eta: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = eta.iter().find(|&&e| !(e > 0.0 && e <= 1.0)) {
            return Err(Error::ZeroEfficiency(bad));
        }
        Ok(Self(eta))
    }

    /// Same efficiency `1 - loss` on every mode.
    pub fn uniform_loss(loss: f64, n_modes: usize) -> Result<Self> {
        if !(0.0..1.0).contains(&loss) {
            return Err(Error::LossOutOfRange(loss));
        }
        Self::new(vec![1.0 - loss; n_modes])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    fn scaling(&self, gamma: &CovarianceMatrix) -> Result<DVector<f64>> {
        if self.0.len() != gamma.n_modes() {
            return Err(Error::DimensionMismatch {
                expected: 2 * self.0.len(),
                found: gamma.dim(),
            });
        }
        Ok(DVector::from_iterator(
            gamma.dim(),
            self.0.iter().flat_map(|e| [e.sqrt(), e.sqrt()]),
        ))
    }
}

/// Lossy channel in front of ideal detectors: `S gamma S^T + (I - S S^T)` with
/// `S = diag(sqrt(eta_j))` on both quadratures of mode `j`.
pub fn apply_loss(gamma: &CovarianceMatrix, eta: &LossVector) -> Result<CovarianceMatrix> {
    let s = eta.scaling(gamma)?;
    let g = gamma.matrix();
    let out = DMatrix::from_fn(g.nrows(), g.ncols(), |i, j| {
        let noise = if i == j { 1.0 - s[i] * s[i] } else { 0.0 };
        s[i] * g[(i, j)] * s[j] + noise
    });
    Ok(CovarianceMatrix::from_computed(out))
}

/// Exact inverse of [`apply_loss`]. The result can be unphysical.
pub fn invert_loss(gamma_m: &CovarianceMatrix, eta: &LossVector) -> Result<CovarianceMatrix> {
    let s = eta.scaling(gamma_m)?;
    let g = gamma_m.matrix();
    let out = DMatrix::from_fn(g.nrows(), g.ncols(), |i, j| {
        let noise = if i == j { 1.0 - s[i] * s[i] } else { 0.0 };
        (g[(i, j)] - noise) / (s[i] * s[j])
    });
    Ok(CovarianceMatrix::from_computed(out))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossSweepRow {
    pub loss: f64,
    /// PPT values for the A, B and C splittings.
    pub mu: [f64; 3],
    pub physical: bool,
}

/// Subtracts a uniform detection loss from every mode and reports the PPT
/// values of the compensated matrix at each grid point. Unphysical results
/// are flagged, not rejected.
pub fn loss_sweep(gamma_m: &CovarianceMatrix, loss_grid: &[f64]) -> Result<Vec<LossSweepRow>> {
    gamma_m.require_modes(3)?;
    check_grid(loss_grid)?;
    loss_grid
        .par_iter()
        .map(|&loss| {
            let eta = LossVector::uniform_loss(loss, 3)?;
            let gamma_l = invert_loss(gamma_m, &eta)?;
            let mut mu = [f64::NAN; 3];
            for (k, m) in mu.iter_mut().enumerate() {
                *m = ppt_value(&gamma_l, k).unwrap_or(f64::NAN);
            }
            let physical = is_physical(&gamma_l).unwrap_or(false);
            Ok(LossSweepRow { loss, mu, physical })
        })
        .collect()
}

pub const LOSS_SWEEP_HEADER: &str = "loss,muA,muB,muC,physical";

pub fn loss_sweep_csv(rows: &[LossSweepRow]) -> String {
    let mut out = format!("{LOSS_SWEEP_HEADER}\n");
    for r in rows {
        writeln!(
            out,
            "{:.6},{:.9},{:.9},{:.9},{}",
            r.loss, r.mu[0], r.mu[1], r.mu[2], r.physical
        )
        .unwrap();
    }
    out
}

/// Standard deviation of independent zero-mean Gaussian phase jitter on each
/// mode, in radians.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PhaseNoiseStrength(f64);

impl PhaseNoiseStrength {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::NegativeSigma(sigma));
        }
        Ok(Self(sigma))
    }

    pub fn from_degrees(deg: f64) -> Result<Self> {
        Self::new(deg.to_radians())
    }

    pub fn radians(self) -> f64 {
        self.0
    }
}

fn j_d_jt(d: &CovarianceMatrix) -> DMatrix<f64> {
    let j = SymplecticForm::new(d.n_modes()).matrix();
    &j * d.matrix() * j.transpose()
}

/// Average of `S(phi) gamma S(phi)^T` over independent Gaussian phases:
///
/// ```text
/// e^{-s^2} g + (1 - e^{-s^2})^2 / 2 * D(g) + (1 - e^{-2 s^2}) / 2 * J D(g) J^T
/// ```
///
/// where `D` keeps only the intramodal 2x2 blocks.
pub fn apply_phase_noise(gamma_k: &CovarianceMatrix, sigma: PhaseNoiseStrength) -> CovarianceMatrix {
    let e = (-sigma.0 * sigma.0).exp();
    let d = gamma_k.local_part();
    let out = gamma_k.matrix() * e
        + d.matrix() * ((1.0 - e).powi(2) / 2.0)
        + j_d_jt(&d) * ((1.0 - e * e) / 2.0);
    CovarianceMatrix::from_computed(out)
}

/// Exact inverse of [`apply_phase_noise`]. Large `sigma` can give an
/// unphysical result.
pub fn invert_phase_noise(gamma_l: &CovarianceMatrix, sigma: PhaseNoiseStrength) -> CovarianceMatrix {
    let e = (sigma.0 * sigma.0).exp();
    let d = gamma_l.local_part();
    let out = gamma_l.matrix() * e
        + d.matrix() * ((e - 1.0).powi(2) / 2.0)
        + j_d_jt(&d) * ((1.0 - e * e) / 2.0);
    CovarianceMatrix::from_computed(out)
}

/// Fraction of the hot-squeezing modulation noise that is Gaussian.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct GaussianFraction(f64);

impl GaussianFraction {
    pub const GAUSSIAN: Self = Self(1.0);

    pub fn new(p_g: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_g) {
            return Err(Error::FractionOutOfRange(p_g));
        }
        Ok(Self(p_g))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Rescales the two largest eigenvalues of `gamma_k` (the hot-squeezed input
/// variances) by `p_g`, keeping the eigenbasis.
pub fn degauss_hot_squeezing(
    gamma_k: &CovarianceMatrix,
    p_g: GaussianFraction,
) -> Result<CovarianceMatrix> {
    if p_g.0 == 1.0 {
        return Ok(gamma_k.clone());
    }
    let dim = gamma_k.dim();
    let eig = SymmetricEigen::new(gamma_k.matrix().clone());
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    if dim > 2 {
        let gap = eig.eigenvalues[order[dim - 2]] - eig.eigenvalues[order[dim - 3]];
        if gap < DEGENERACY_TOLERANCE {
            return Err(Error::DegenerateSpectrum(gap));
        }
    }
    let mut values = eig.eigenvalues.clone();
    for &k in &order[dim.saturating_sub(2)..] {
        values[k] *= p_g.0;
    }
    let v = &eig.eigenvectors;
    let out = v * DMatrix::from_diagonal(&values) * v.transpose();
    Ok(CovarianceMatrix::from_computed(out))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSweepRow {
    /// Phase-noise strength in radians.
    pub sigma: f64,
    /// Minimum symplectic eigenvalue of the compensated matrix.
    pub mu0: f64,
    pub mu_a: f64,
    pub min_mu_bc: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSweep {
    pub rows: Vec<PhaseSweepRow>,
    /// Phase-noise strength (radians) at which `min(muB, muC)` drops below one.
    pub threshold: f64,
}

/// Undoes phase noise of strength `sigma` (then, for `p_g < 1`, removes the
/// non-Gaussian modulation share) and evaluates the separability figures.
pub fn phase_noise_point(
    gamma_l: &CovarianceMatrix,
    sigma: f64,
    p_g: GaussianFraction,
) -> Result<PhaseSweepRow> {
    gamma_l.require_modes(3)?;
    let gamma_k = invert_phase_noise(gamma_l, PhaseNoiseStrength::new(sigma)?);
    let g = degauss_hot_squeezing(&gamma_k, p_g)?;
    Ok(PhaseSweepRow {
        sigma,
        mu0: min_symplectic_eigenvalue(&g)?,
        mu_a: ppt_value(&g, modes::A)?,
        min_mu_bc: ppt_value(&g, modes::B)?.min(ppt_value(&g, modes::C)?),
    })
}

pub fn phase_noise_table(
    gamma_l: &CovarianceMatrix,
    sigma_grid: &[f64],
    p_g: GaussianFraction,
) -> Result<Vec<PhaseSweepRow>> {
    check_grid(sigma_grid)?;
    sigma_grid
        .par_iter()
        .map(|&s| phase_noise_point(gamma_l, s, p_g))
        .collect()
}

/// Locates where `min(muB, muC)` first drops below one: the first grid
/// interval that brackets the crossing is bisected down to
/// [`THRESHOLD_TOLERANCE`].
pub fn phase_noise_threshold(
    gamma_l: &CovarianceMatrix,
    rows: &[PhaseSweepRow],
    p_g: GaussianFraction,
) -> Result<f64> {
    let separable = |v: f64| v >= 1.0 - UNITY_TOLERANCE;
    let (mut lo, mut hi) = rows
        .windows(2)
        .find(|w| separable(w[0].min_mu_bc) && !separable(w[1].min_mu_bc))
        .map(|w| (w[0].sigma, w[1].sigma))
        .ok_or(Error::NoCrossing)?;
    while hi - lo > THRESHOLD_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if separable(phase_noise_point(gamma_l, mid, p_g)?.min_mu_bc) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Phase-noise sweep over `sigma_grid` (radians) with threshold search.
pub fn phase_noise_sweep(gamma_l: &CovarianceMatrix, sigma_grid: &[f64]) -> Result<PhaseSweep> {
    degauss_phase_noise_sweep(gamma_l, sigma_grid, GaussianFraction::GAUSSIAN)
}

/// [`phase_noise_sweep`] on the de-Gaussified matrices.
pub fn degauss_phase_noise_sweep(
    gamma_l: &CovarianceMatrix,
    sigma_grid: &[f64],
    p_g: GaussianFraction,
) -> Result<PhaseSweep> {
    let rows = phase_noise_table(gamma_l, sigma_grid, p_g)?;
    let threshold = phase_noise_threshold(gamma_l, &rows, p_g)?;
    Ok(PhaseSweep { rows, threshold })
}

pub const PHASE_SWEEP_HEADER: &str = "sigma_deg,mu0,muA,min_muB_muC";

pub fn phase_sweep_csv(rows: &[PhaseSweepRow]) -> String {
    let mut out = format!("{PHASE_SWEEP_HEADER}\n");
    for r in rows {
        writeln!(
            out,
            "{:.6},{:.9},{:.9},{:.9}",
            r.sigma.to_degrees(),
            r.mu0,
            r.mu_a,
            r.min_mu_bc
        )
        .unwrap();
    }
    out
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if grid.iter().any(|v| !v.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Format("grid must be finite and strictly increasing".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sample_gamma() -> CovarianceMatrix {
        CovarianceMatrix::from_rows(&[
            vec![2.0, 0.3, 0.4, -0.2, 0.1, 0.0],
            vec![0.3, 1.5, 0.1, 0.6, -0.3, 0.2],
            vec![0.4, 0.1, 3.0, 0.2, -1.1, 0.4],
            vec![-0.2, 0.6, 0.2, 2.5, 0.3, -0.9],
            vec![0.1, -0.3, -1.1, 0.3, 4.0, 0.5],
            vec![0.0, 0.2, 0.4, -0.9, 0.5, 3.5],
        ])
        .unwrap()
    }

    #[test]
    fn loss_vector_validation() {
        assert!(LossVector::new(vec![0.5, 1.0]).is_ok());
        assert_eq!(LossVector::new(vec![0.5, 0.0]), Err(Error::ZeroEfficiency(0.0)));
        assert!(LossVector::new(vec![1.1]).is_err());
        assert!(LossVector::uniform_loss(1.0, 3).is_err());
        let g = sample_gamma();
        assert!(matches!(
            apply_loss(&g, &LossVector::new(vec![0.9, 0.9]).unwrap()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn unit_efficiency_is_identity() {
        let g = sample_gamma();
        let eta = LossVector::new(vec![1.0; 3]).unwrap();
        assert_eq!(apply_loss(&g, &eta).unwrap(), g);
        assert_eq!(invert_loss(&g, &eta).unwrap(), g);
    }

    #[test]
    fn tiny_efficiency_approaches_vacuum() {
        let g = sample_gamma();
        let eta = LossVector::new(vec![1e-12; 3]).unwrap();
        assert!(apply_loss(&g, &eta).unwrap().max_abs_diff(&CovarianceMatrix::vacuum(3)) < 1e-10);
    }

    #[test]
    fn loss_roundtrip() {
        let g = sample_gamma();
        let eta = LossVector::new(vec![0.839, 0.78, 0.784]).unwrap();
        let back = invert_loss(&apply_loss(&g, &eta).unwrap(), &eta).unwrap();
        assert!(back.max_abs_diff(&g) < 1e-12);
    }

    #[test]
    fn phase_noise_zero_sigma_is_identity() {
        let g = sample_gamma();
        let zero = PhaseNoiseStrength::new(0.0).unwrap();
        assert!(apply_phase_noise(&g, zero).max_abs_diff(&g) < 1e-15);
        assert!(invert_phase_noise(&g, zero).max_abs_diff(&g) < 1e-15);
        assert!(PhaseNoiseStrength::new(-0.1).is_err());
    }

    #[test]
    fn complete_dephasing_limit() {
        let g = CovarianceMatrix::from_diagonal(&[0.5, 4.0]).unwrap();
        let out = apply_phase_noise(&g, PhaseNoiseStrength::new(50.0).unwrap());
        assert_relative_eq!(out.get(0, 0), 2.25, epsilon = 1e-12);
        assert_relative_eq!(out.get(1, 1), 2.25, epsilon = 1e-12);
        assert_relative_eq!(out.get(0, 1), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn phase_noise_roundtrip() {
        let g = sample_gamma();
        for s in [0.01, 0.1, 0.5] {
            let s = PhaseNoiseStrength::new(s).unwrap();
            let back = invert_phase_noise(&apply_phase_noise(&g, s), s);
            assert!(back.max_abs_diff(&g) < 1e-12);
        }
    }

    #[test]
    fn degauss_scales_two_largest() {
        let g = sample_gamma();
        assert_eq!(degauss_hot_squeezing(&g, GaussianFraction::GAUSSIAN).unwrap(), g);

        let p = GaussianFraction::new(0.75).unwrap();
        let out = degauss_hot_squeezing(&g, p).unwrap();
        let mut before: Vec<f64> = SymmetricEigen::new(g.matrix().clone()).eigenvalues.iter().copied().collect();
        let mut after: Vec<f64> = SymmetricEigen::new(out.matrix().clone()).eigenvalues.iter().copied().collect();
        before.sort_by(f64::total_cmp);
        after.sort_by(f64::total_cmp);
        before[4] *= 0.75;
        before[5] *= 0.75;
        before.sort_by(f64::total_cmp);
        for (a, b) in before.iter().zip(&after) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
        assert!(GaussianFraction::new(1.5).is_err());
    }

    #[test]
    fn degauss_rejects_degenerate_top() {
        let g = CovarianceMatrix::from_diagonal(&[1.0, 2.0, 3.0, 5.0, 5.0, 5.0]).unwrap();
        let err = degauss_hot_squeezing(&g, GaussianFraction::new(0.5).unwrap()).unwrap_err();
        assert!(matches!(err, Error::DegenerateSpectrum(_)));
    }

    #[test]
    fn grids_are_validated() {
        assert_eq!(check_grid(&[]), Err(Error::EmptyGrid));
        assert!(check_grid(&[0.1, 0.1]).is_err());
        assert!(check_grid(&[0.0, 0.1, 0.3]).is_ok());
    }

    #[test]
    fn csv_headers() {
        assert!(loss_sweep_csv(&[]).starts_with("loss,muA,muB,muC,physical\n"));
        assert!(phase_sweep_csv(&[]).starts_with("sigma_deg,mu0,muA,min_muB_muC\n"));
    }
}
