//! Independent reference implementations and random generators shared by the
//! integration tests.
#![allow(dead_code)]

use gaussep::{
    beamsplitter, phase_shift, squeezer, tensor, CovarianceMatrix, SymplecticForm, SymplecticMap,
};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn sym_sqrt(m: &DMatrix<f64>) -> DMatrix<f64> {
    let e = SymmetricEigen::new(m.clone());
    let d = DMatrix::from_diagonal(&e.eigenvalues.map(f64::sqrt));
    &e.eigenvectors * d * e.eigenvectors.transpose()
}

/// Symplectic eigenvalues from the symmetric eigenproblem of `-(R J R)^2`,
/// `R = gamma^{1/2}`. Each value appears twice; every other one is kept.
pub fn oracle_symplectic_eigenvalues(gamma: &DMatrix<f64>) -> Vec<f64> {
    let n = gamma.nrows() / 2;
    let r = sym_sqrt(gamma);
    let j = SymplecticForm::new(n).matrix();
    let m = &r * j * &r;
    let mut ev: Vec<f64> = SymmetricEigen::new(m.transpose() * &m)
        .eigenvalues
        .iter()
        .map(|v| v.max(0.0).sqrt())
        .collect();
    ev.sort_by(f64::total_cmp);
    ev.into_iter().step_by(2).collect()
}

/// Partial transpose by explicit conjugation with `diag(1,1,..,1,-1,..)`.
pub fn oracle_partial_transpose(gamma: &DMatrix<f64>, mode: usize) -> DMatrix<f64> {
    let mut t = DMatrix::identity(gamma.nrows(), gamma.nrows());
    t[(2 * mode + 1, 2 * mode + 1)] = -1.0;
    &t * gamma * &t
}

pub fn oracle_ppt(gamma: &DMatrix<f64>, mode: usize) -> f64 {
    oracle_symplectic_eigenvalues(&oracle_partial_transpose(gamma, mode))[0]
}

/// Smallest PPT value of a two-mode state from the invariant formula
/// `2 nu^2 = Delta - sqrt(Delta^2 - 4 det)`, `Delta = det A + det B - 2 det C`.
pub fn oracle_two_mode_ppt(g: &DMatrix<f64>) -> f64 {
    let a = g.view((0, 0), (2, 2)).determinant();
    let b = g.view((2, 2), (2, 2)).determinant();
    let c = g.view((0, 2), (2, 2)).determinant();
    let delta = a + b - 2.0 * c;
    let det = g.determinant();
    ((delta - (delta * delta - 4.0 * det).sqrt()) / 2.0).sqrt()
}

/// Phase noise by brute force: average of `R(phi) gamma R(phi)^T` over
/// independent normal phases on every mode.
pub fn oracle_phase_noise_mc(
    gamma: &DMatrix<f64>,
    sigma: f64,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = gamma.nrows() / 2;
    let normal = Normal::new(0.0, sigma).unwrap();
    let dim = gamma.nrows();
    let mut sum = DMatrix::zeros(dim, dim);
    let mut sum_sq = DMatrix::zeros(dim, dim);
    let mut r = DMatrix::zeros(dim, dim);
    for _ in 0..samples {
        for k in 0..n {
            let (s, c) = normal.sample(rng).sin_cos();
            r[(2 * k, 2 * k)] = c;
            r[(2 * k, 2 * k + 1)] = s;
            r[(2 * k + 1, 2 * k)] = -s;
            r[(2 * k + 1, 2 * k + 1)] = c;
        }
        let x = &r * gamma * r.transpose();
        sum_sq += x.component_mul(&x);
        sum += x;
    }
    let m = samples as f64;
    let mean = &sum / m;
    let var = (sum_sq / m - mean.component_mul(&mean)) * (m / (m - 1.0));
    let se = var.map(|v| (v.max(0.0) / m).sqrt());
    (mean, se)
}

/// Random symplectic map built from phase shifts, squeezers and beam
/// splitters.
pub fn random_symplectic(n_modes: usize, rng: &mut ChaCha8Rng) -> SymplecticMap {
    let mut s = SymplecticMap::identity(n_modes);
    for _ in 0..3 * n_modes {
        let k = rng.random_range(0..n_modes);
        s = s.then(&phase_shift(rng.random_range(0.0..std::f64::consts::TAU), k, n_modes).unwrap());
        s = s.then(&squeezer(rng.random_range(-0.8..0.8), k, n_modes).unwrap());
        if n_modes > 1 {
            let j = (k + rng.random_range(1..n_modes)) % n_modes;
            s = s.then(&beamsplitter(rng.random_range(0.0..=1.0), k, j, n_modes).unwrap());
        }
    }
    s
}

pub fn random_local_map(n_modes: usize, rng: &mut ChaCha8Rng) -> SymplecticMap {
    let mut s = SymplecticMap::identity(n_modes);
    for k in 0..n_modes {
        s = s
            .then(&phase_shift(rng.random_range(0.0..6.3), k, n_modes).unwrap())
            .then(&squeezer(rng.random_range(-0.7..0.7), k, n_modes).unwrap())
            .then(&phase_shift(rng.random_range(0.0..6.3), k, n_modes).unwrap());
    }
    s
}

/// Random physical state `S diag(nu) S^T` with symplectic spectrum `nu >= 1`.
pub fn random_state(n_modes: usize, rng: &mut ChaCha8Rng) -> (CovarianceMatrix, Vec<f64>) {
    let mut nu: Vec<f64> = (0..n_modes).map(|_| 1.0 + rng.random_range(0.0..3.0)).collect();
    let diag: Vec<f64> = nu.iter().flat_map(|&v| [v, v]).collect();
    let thermal = CovarianceMatrix::from_diagonal(&diag).unwrap();
    let g = random_symplectic(n_modes, rng).apply(&thermal).unwrap();
    nu.sort_by(f64::total_cmp);
    (g, nu)
}

/// Random separable state: a product of random single-mode states plus
/// classically correlated Gaussian noise.
pub fn random_separable(n_modes: usize, rng: &mut ChaCha8Rng) -> CovarianceMatrix {
    let mut g = random_state(1, rng).0;
    for _ in 1..n_modes {
        g = tensor(&g, &random_state(1, rng).0);
    }
    let dim = 2 * n_modes;
    let a = DMatrix::from_fn(dim, dim, |_, _| rng.random_range(-0.5..0.5));
    CovarianceMatrix::new(g.matrix() + &a * a.transpose()).unwrap()
}

/// Two-mode squeezed vacuum with squeezing parameter `r`.
pub fn tmsv(r: f64) -> CovarianceMatrix {
    let (c, s) = ((2.0 * r).cosh(), (2.0 * r).sinh());
    CovarianceMatrix::from_rows(&[
        vec![c, 0.0, s, 0.0],
        vec![0.0, c, 0.0, -s],
        vec![s, 0.0, c, 0.0],
        vec![0.0, -s, 0.0, c],
    ])
    .unwrap()
}
