//! Homodyne tomography of three-mode states: sampling under the six detector
//! settings, covariance reconstruction, and Monte Carlo error estimation.
//!
//! Each detector records `X cos(theta) + P sin(theta)`. The six canonical
//! settings are
//!
//! | # | A        | B        | C        |
//! |---|----------|----------|----------|
//! | 1 | X        | X        | X        |
//! | 2 | P        | P        | P        |
//! | 3 | P        | X        | X        |
//! | 4 | X        | P        | X        |
//! | 5 | X        | X        | P        |
//! | 6 | (X+P)/√2 | (X+P)/√2 | (X+P)/√2 |
//!
//! and together determine all 21 independent covariance entries.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt::Write as _;

use nalgebra::{DMatrix, Matrix3, SMatrix, SymmetricEigen, Vector3};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covariance::CovarianceMatrix;
use crate::error::{Error, Result};
use crate::spectrum::{is_physical, ppt_value};

/// Reconstruction refuses blocks with fewer samples than this.
pub const MIN_SAMPLES: usize = 100;

/// Projected covariances with eigenvalues above `-CLIP_TOLERANCE` are treated
/// as positive semidefinite.
pub const CLIP_TOLERANCE: f64 = 1e-10;

/// Per-mode homodyne angles `(theta_A, theta_B, theta_C)` in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSetting {
    pub angles: [f64; 3],
}

impl MeasurementSetting {
    pub fn new(angles: [f64; 3]) -> Self {
        Self { angles }
    }

    /// The six settings of the reconstruction table, in order.
    pub fn canonical() -> [MeasurementSetting; 6] {
        const X: f64 = 0.0;
        const P: f64 = FRAC_PI_2;
        const D: f64 = FRAC_PI_4;
        [
            Self::new([X, X, X]),
            Self::new([P, P, P]),
            Self::new([P, X, X]),
            Self::new([X, P, X]),
            Self::new([X, X, P]),
            Self::new([D, D, D]),
        ]
    }

    /// Zero-based position in [`MeasurementSetting::canonical`], if any.
    pub fn canonical_index(&self) -> Option<usize> {
        Self::canonical().iter().position(|c| {
            c.angles
                .iter()
                .zip(&self.angles)
                .all(|(a, b)| (a - b).abs() < 1e-12)
        })
    }

    /// Rows map the six quadratures onto the three measured ones.
    pub fn projection(&self) -> SMatrix<f64, 3, 6> {
        let mut m = SMatrix::<f64, 3, 6>::zeros();
        for (j, theta) in self.angles.iter().enumerate() {
            let (s, c) = theta.sin_cos();
            m[(j, 2 * j)] = c;
            m[(j, 2 * j + 1)] = s;
        }
        m
    }

    /// Covariance of the three recorded quadratures.
    pub fn projected_covariance(&self, gamma: &CovarianceMatrix) -> Result<Matrix3<f64>> {
        gamma.require_modes(3)?;
        let m = self.projection();
        let g = SMatrix::<f64, 6, 6>::from_fn(|i, j| gamma.get(i, j));
        Ok(m * g * m.transpose())
    }
}

/// Draws zero-mean Gaussian triples with a given covariance, using its
/// symmetric square root.
#[derive(Debug, Clone)]
struct QuadratureSampler {
    factor: Matrix3<f64>,
}

impl QuadratureSampler {
    fn new(cov: &Matrix3<f64>) -> Result<Self> {
        let eig = SymmetricEigen::new(*cov);
        let min = eig.eigenvalues.min();
        if min < -CLIP_TOLERANCE {
            return Err(Error::NotPositiveDefinite { min_eigenvalue: min });
        }
        let root = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
        let factor = eig.eigenvectors * Matrix3::from_diagonal(&root) * eig.eigenvectors.transpose();
        Ok(Self { factor })
    }

    #[inline]
    fn draw<R: Rng>(&self, rng: &mut R) -> [f64; 3] {
        let z = Vector3::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        );
        let x = self.factor * z;
        [x[0], x[1], x[2]]
    }
}

/// Running second moments of zero-mean triples.
#[derive(Debug, Clone, Default)]
struct MomentAccumulator {
    sums: [[f64; 3]; 3],
    n: usize,
}

impl MomentAccumulator {
    #[inline]
    fn push(&mut self, x: [f64; 3]) {
        for i in 0..3 {
            for j in i..3 {
                self.sums[i][j] += x[i] * x[j];
            }
        }
        self.n += 1;
    }

    fn finish(&self, setting: MeasurementSetting) -> SettingMoments {
        let n = self.n as f64;
        let cov = Matrix3::from_fn(|i, j| {
            let (a, b) = if i <= j { (i, j) } else { (j, i) };
            self.sums[a][b] / n
        });
        SettingMoments {
            setting,
            covariance: cov,
            n: Some(self.n),
        }
    }
}

/// Quadrature records of one detector setting, shot-noise units.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSampleBlock {
    pub setting: MeasurementSetting,
    pub samples: Vec<[f64; 3]>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockSidecar {
    /// One-based setting number, when the angles are canonical.
    pub setting: Option<usize>,
    pub angles: [f64; 3],
    pub seed: Option<u64>,
    pub n: usize,
}

impl QuadratureSampleBlock {
    pub fn new(setting: MeasurementSetting, samples: Vec<[f64; 3]>, seed: Option<u64>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InsufficientSamples {
                found: samples.len(),
                required: 2,
            });
        }
        Ok(Self {
            setting,
            samples,
            seed,
        })
    }

    pub fn n(&self) -> usize {
        self.samples.len()
    }

    /// Sample covariance with denominator `n` (the means are known to vanish).
    pub fn moments(&self) -> SettingMoments {
        let mut acc = MomentAccumulator::default();
        self.samples.iter().for_each(|&x| acc.push(x));
        acc.finish(self.setting)
    }

    pub fn means(&self) -> [f64; 3] {
        let n = self.n() as f64;
        let mut m = [0.0; 3];
        for x in &self.samples {
            for k in 0..3 {
                m[k] += x[k];
            }
        }
        m.map(|v| v / n)
    }

    /// Whether every channel mean is within five standard errors of zero.
    pub fn is_zero_mean(&self) -> bool {
        let cov = self.moments().covariance;
        let n = self.n() as f64;
        self.means()
            .iter()
            .enumerate()
            .all(|(k, m)| m.abs() <= 5.0 * (cov[(k, k)] / n).sqrt())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("xA,xB,xC\n");
        for x in &self.samples {
            writeln!(out, "{},{},{}", x[0], x[1], x[2]).unwrap();
        }
        out
    }

    pub fn sidecar(&self) -> BlockSidecar {
        BlockSidecar {
            setting: self.setting.canonical_index().map(|i| i + 1),
            angles: self.setting.angles,
            seed: self.seed,
            n: self.n(),
        }
    }

    pub fn from_csv(csv: &str, sidecar: &BlockSidecar) -> Result<Self> {
        let mut lines = csv.lines();
        match lines.next().map(str::trim) {
            Some("xA,xB,xC") => {}
            other => return Err(Error::Format(format!("unexpected header {other:?}"))),
        }
        let samples = lines
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                let v: Vec<f64> = l
                    .split(',')
                    .map(|t| t.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| Error::Format(format!("{e} in {l:?}")))?;
                <[f64; 3]>::try_from(v).map_err(|_| Error::Format(format!("expected 3 columns in {l:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if samples.len() != sidecar.n {
            return Err(Error::Format(format!(
                "sidecar declares {} rows, file has {}",
                sidecar.n,
                samples.len()
            )));
        }
        Self::new(MeasurementSetting::new(sidecar.angles), samples, sidecar.seed)
    }
}

/// Second moments of one setting. `n == None` marks exact population moments.
#[derive(Debug, Clone, PartialEq)]
pub struct SettingMoments {
    pub setting: MeasurementSetting,
    pub covariance: Matrix3<f64>,
    pub n: Option<usize>,
}

impl SettingMoments {
    pub fn exact(gamma: &CovarianceMatrix, setting: MeasurementSetting) -> Result<Self> {
        Ok(Self {
            setting,
            covariance: setting.projected_covariance(gamma)?,
            n: None,
        })
    }

    /// Variance of the estimator of `covariance[(i, j)]` for Gaussian data.
    fn estimator_variance(&self, i: usize, j: usize) -> f64 {
        match self.n {
            None => 0.0,
            Some(n) => {
                let c = &self.covariance;
                (c[(i, i)] * c[(j, j)] + c[(i, j)] * c[(i, j)]) / n as f64
            }
        }
    }
}

/// Draws `n` samples of the three quadratures selected by `setting`.
/// Deterministic for a given seed.
pub fn sample_block(
    gamma: &CovarianceMatrix,
    setting: MeasurementSetting,
    n: usize,
    seed: u64,
) -> Result<QuadratureSampleBlock> {
    let sampler = QuadratureSampler::new(&setting.projected_covariance(gamma)?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = (0..n).map(|_| sampler.draw(&mut rng)).collect();
    QuadratureSampleBlock::new(setting, samples, Some(seed))
}

/// Samples all six canonical blocks from consecutive seeds `seed..seed+6`.
pub fn sample_all_settings(
    gamma: &CovarianceMatrix,
    n: usize,
    seed: u64,
) -> Result<Vec<QuadratureSampleBlock>> {
    MeasurementSetting::canonical()
        .iter()
        .enumerate()
        .map(|(k, &s)| sample_block(gamma, s, n, seed.wrapping_add(k as u64)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionResult {
    pub gamma_hat: CovarianceMatrix,
    /// Standard error of every entry of `gamma_hat`.
    pub std_errors: DMatrix<f64>,
}

impl ReconstructionResult {
    /// Reconstruction does not enforce physicality; this only reports it.
    pub fn is_physical(&self) -> bool {
        is_physical(&self.gamma_hat).unwrap_or(false)
    }
}

/// Reconstructs the covariance matrix from the six canonical sample blocks.
pub fn reconstruct(blocks: &[QuadratureSampleBlock]) -> Result<ReconstructionResult> {
    if let Some(b) = blocks.iter().find(|b| b.n() < MIN_SAMPLES) {
        return Err(Error::InsufficientSamples {
            found: b.n(),
            required: MIN_SAMPLES,
        });
    }
    let moments: Vec<SettingMoments> = blocks.iter().map(QuadratureSampleBlock::moments).collect();
    reconstruct_from_moments(&moments)
}

/// Unfolds per-setting second moments into the full covariance matrix.
pub fn reconstruct_from_moments(moments: &[SettingMoments]) -> Result<ReconstructionResult> {
    let mut by_setting: [Option<&SettingMoments>; 6] = [None; 6];
    for m in moments {
        if let Some(k) = m.setting.canonical_index() {
            by_setting[k].get_or_insert(m);
        }
    }
    let get = |k: usize| by_setting[k].ok_or(Error::MissingSetting(k + 1));
    let (xs, ps) = (get(0)?, get(1)?);
    let diag = get(5)?;

    let mut g = DMatrix::<f64>::zeros(6, 6);
    let mut var = DMatrix::<f64>::zeros(6, 6);
    let mut set = |r: usize, c: usize, value: f64, v: f64| {
        g[(r, c)] = value;
        g[(c, r)] = value;
        var[(r, c)] = v;
        var[(c, r)] = v;
    };
    let (x, p) = (|j: usize| 2 * j, |j: usize| 2 * j + 1);

    for i in 0..3 {
        for j in i..3 {
            set(x(i), x(j), xs.covariance[(i, j)], xs.estimator_variance(i, j));
            set(p(i), p(j), ps.covariance[(i, j)], ps.estimator_variance(i, j));
        }
    }
    // settings 3..5 put P on one detector and X on the other two
    for k in 0..3 {
        let m = get(2 + k)?;
        for j in (0..3).filter(|&j| j != k) {
            set(p(k), x(j), m.covariance[(k, j)], m.estimator_variance(k, j));
        }
    }
    // Var((X + P)/sqrt 2) = (VarX + VarP)/2 + Cov(X, P)
    for j in 0..3 {
        let value = diag.covariance[(j, j)] - 0.5 * (xs.covariance[(j, j)] + ps.covariance[(j, j)]);
        let v = diag.estimator_variance(j, j)
            + 0.25 * (xs.estimator_variance(j, j) + ps.estimator_variance(j, j));
        set(x(j), p(j), value, v);
    }

    Ok(ReconstructionResult {
        gamma_hat: CovarianceMatrix::new(g)?,
        std_errors: var.map(f64::sqrt),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStat {
    pub mean: f64,
    pub std: f64,
}

impl EnsembleStat {
    /// Mean and sample standard deviation with compensated summation.
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = neumaier_sum(values.iter().copied()) / n;
        let ss = neumaier_sum(values.iter().map(|v| (v - mean) * (v - mean)));
        let std = if values.len() > 1 { (ss / (n - 1.0)).sqrt() } else { 0.0 };
        Self { mean, std }
    }
}

fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Ensemble statistics of the PPT values over simulated tomography runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSummary {
    #[serde(rename = "muA")]
    pub mu_a: EnsembleStat,
    #[serde(rename = "muB")]
    pub mu_b: EnsembleStat,
    #[serde(rename = "muC")]
    pub mu_c: EnsembleStat,
    pub n_samples: usize,
    pub n_runs: usize,
    pub seed: u64,
}

/// The RNG of Monte Carlo run `run`: stream `run` of the ChaCha generator
/// keyed by `seed`, so results do not depend on scheduling.
pub fn run_rng(seed: u64, run: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run);
    rng
}

/// One simulated experiment: six settings with `n_samples` each, then
/// reconstruction and the three PPT values.
fn simulate_ppt_run(
    samplers: &[(MeasurementSetting, QuadratureSampler)],
    n_samples: usize,
    rng: &mut ChaCha8Rng,
) -> Result<[f64; 3]> {
    let moments: Vec<SettingMoments> = samplers
        .iter()
        .map(|(setting, sampler)| {
            let mut acc = MomentAccumulator::default();
            for _ in 0..n_samples {
                acc.push(sampler.draw(rng));
            }
            acc.finish(*setting)
        })
        .collect();
    let g = reconstruct_from_moments(&moments)?.gamma_hat;
    Ok([ppt_value(&g, 0)?, ppt_value(&g, 1)?, ppt_value(&g, 2)?])
}

fn canonical_samplers(gamma: &CovarianceMatrix) -> Result<Vec<(MeasurementSetting, QuadratureSampler)>> {
    MeasurementSetting::canonical()
        .iter()
        .map(|&s| {
            let sampler = QuadratureSampler::new(&s.projected_covariance(gamma)?)?;
            Ok((s, sampler))
        })
        .collect()
}

/// Monte Carlo estimate of the statistical spread of the PPT values.
pub fn monte_carlo_ppt(
    gamma_true: &CovarianceMatrix,
    n_samples: usize,
    n_runs: usize,
    seed: u64,
) -> Result<MonteCarloSummary> {
    if n_samples < MIN_SAMPLES {
        return Err(Error::InsufficientSamples {
            found: n_samples,
            required: MIN_SAMPLES,
        });
    }
    if n_runs == 0 {
        return Err(Error::InsufficientSamples {
            found: 0,
            required: 1,
        });
    }
    let samplers = canonical_samplers(gamma_true)?;
    let runs: Vec<[f64; 3]> = (0..n_runs as u64)
        .into_par_iter()
        .map(|run| simulate_ppt_run(&samplers, n_samples, &mut run_rng(seed, run)))
        .collect::<Result<_>>()?;
    let stat = |k: usize| EnsembleStat::from_values(&runs.iter().map(|r| r[k]).collect::<Vec<_>>());
    Ok(MonteCarloSummary {
        mu_a: stat(0),
        mu_b: stat(1),
        mu_c: stat(2),
        n_samples,
        n_runs,
        seed,
    })
}
