//! Symplectic spectra, partial transposition and PPT values.

use nalgebra::{Complex, SymmetricEigen};

use crate::covariance::{CovarianceMatrix, PartialTransposeMask, SymplecticForm};
use crate::error::{Error, Result};

/// Relative tolerance when matching eigenvalues of `J * gamma` into `+/- i mu` pairs.
pub const PAIRING_TOLERANCE: f64 = 1e-7;

/// Slack on the uncertainty bound `mu >= 1`, for both physicality and the
/// separability verdict.
pub const UNITY_TOLERANCE: f64 = 1e-9;

/// Symplectic eigenvalues of `gamma`, ascending, one per mode.
///
/// These are the moduli of the eigenvalues of `J * gamma`, which come in
/// `+/- i mu` pairs for a positive definite `gamma`.
pub fn symplectic_eigenvalues(gamma: &CovarianceMatrix) -> Result<Vec<f64>> {
    let min_eig = SymmetricEigen::new(gamma.matrix().clone())
        .eigenvalues
        .min();
    if min_eig <= 0.0 {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: min_eig,
        });
    }

    let j = SymplecticForm::new(gamma.n_modes()).matrix();
    let eigs = (j * gamma.matrix()).complex_eigenvalues();
    pair_imaginary_spectrum(eigs.as_slice(), gamma.n_modes())
}

fn pair_imaginary_spectrum(eigs: &[Complex<f64>], n_modes: usize) -> Result<Vec<f64>> {
    let scale = eigs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut upper = Vec::with_capacity(n_modes);
    let mut lower = Vec::with_capacity(n_modes);
    for z in eigs {
        if z.re.abs() > PAIRING_TOLERANCE * scale.max(1.0) {
            return Err(Error::PairingFailure);
        }
        if z.im > 0.0 {
            upper.push(z.im);
        } else {
            lower.push(-z.im);
        }
    }
    if upper.len() != n_modes || lower.len() != n_modes {
        return Err(Error::PairingFailure);
    }
    upper.sort_by(f64::total_cmp);
    lower.sort_by(f64::total_cmp);

    upper
        .iter()
        .zip(&lower)
        .map(|(&a, &b)| {
            if (a - b).abs() <= PAIRING_TOLERANCE * a.max(b) {
                Ok(0.5 * (a + b))
            } else {
                Err(Error::PairingFailure)
            }
        })
        .collect()
}

/// `T_k gamma T_k^T`: flips the sign of every covariance with exactly one
/// `P_k` factor.
pub fn partial_transpose(gamma: &CovarianceMatrix, mode: usize) -> Result<CovarianceMatrix> {
    gamma.check_mode(mode)?;
    let mask = PartialTransposeMask::new(mode);
    let g = gamma.matrix();
    let out = nalgebra::DMatrix::from_fn(g.nrows(), g.ncols(), |i, j| {
        mask.sign(i) * mask.sign(j) * g[(i, j)]
    });
    Ok(CovarianceMatrix::from_computed(out))
}

/// Minimum symplectic eigenvalue of the state partially transposed in `mode`.
/// Below one means entangled across the `mode | rest` splitting.
pub fn ppt_value(gamma: &CovarianceMatrix, mode: usize) -> Result<f64> {
    let spec = symplectic_eigenvalues(&partial_transpose(gamma, mode)?)?;
    Ok(spec[0])
}

/// PPT values for every single-mode splitting, in mode order.
pub fn ppt_values(gamma: &CovarianceMatrix) -> Result<Vec<f64>> {
    (0..gamma.n_modes()).map(|k| ppt_value(gamma, k)).collect()
}

/// Minimum symplectic eigenvalue.
pub fn min_symplectic_eigenvalue(gamma: &CovarianceMatrix) -> Result<f64> {
    Ok(symplectic_eigenvalues(gamma)?[0])
}

/// Whether `gamma` satisfies the uncertainty relation `gamma + iJ >= 0`.
pub fn is_physical(gamma: &CovarianceMatrix) -> Result<bool> {
    Ok(min_symplectic_eigenvalue(gamma)? >= 1.0 - UNITY_TOLERANCE)
}

/// Separability verdict for a PPT value.
pub fn is_separable_value(ppt: f64) -> bool {
    ppt >= 1.0 - UNITY_TOLERANCE
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn vacuum_spectrum() {
        let mu = symplectic_eigenvalues(&CovarianceMatrix::vacuum(3)).unwrap();
        assert_eq!(mu.len(), 3);
        for m in mu {
            assert_relative_eq!(m, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn pure_squeezed_mode() {
        let g = CovarianceMatrix::from_diagonal(&[0.5, 2.0]).unwrap();
        assert_relative_eq!(symplectic_eigenvalues(&g).unwrap()[0], 1.0, epsilon = 1e-12);
        assert!(is_physical(&g).unwrap());
    }

    #[test]
    fn sub_vacuum_mode_is_unphysical() {
        let g = CovarianceMatrix::from_diagonal(&[0.5, 0.5]).unwrap();
        assert!(!is_physical(&g).unwrap());
        assert!(is_physical(&CovarianceMatrix::vacuum(2)).unwrap());
    }

    #[test]
    fn indefinite_matrix_is_rejected() {
        let g = CovarianceMatrix::from_diagonal(&[-1.0, 2.0]).unwrap();
        assert!(matches!(
            symplectic_eigenvalues(&g),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn unpaired_spectrum_is_rejected() {
        let eigs = [
            Complex::new(0.0, 1.0),
            Complex::new(0.0, -1.2),
        ];
        assert_eq!(pair_imaginary_spectrum(&eigs, 1), Err(Error::PairingFailure));
        let eigs = [Complex::new(0.5, 1.0), Complex::new(0.5, -1.0)];
        assert_eq!(pair_imaginary_spectrum(&eigs, 1), Err(Error::PairingFailure));
    }

    #[test]
    fn transpose_of_diagonal_is_noop() {
        let g = CovarianceMatrix::from_diagonal(&[0.3, 4.0, 1.0, 2.0, 5.0, 0.7]).unwrap();
        for k in 0..3 {
            assert_eq!(partial_transpose(&g, k).unwrap(), g);
        }
    }

    #[test]
    fn transpose_flips_only_single_pk_terms() {
        let g = CovarianceMatrix::from_rows(&[
            vec![1.0, 0.1, 0.2, 0.3],
            vec![0.1, 1.0, 0.4, 0.5],
            vec![0.2, 0.4, 1.0, 0.6],
            vec![0.3, 0.5, 0.6, 1.0],
        ])
        .unwrap();
        let t = partial_transpose(&g, 1).unwrap();
        let mask = PartialTransposeMask::new(1).matrix(2);
        let expected = &mask * g.matrix() * mask.transpose();
        assert_eq!(t.matrix(), &expected);
        assert_eq!(t.get(0, 3), -0.3);
        assert_eq!(t.get(2, 3), -0.6);
        assert_eq!(t.get(0, 2), 0.2);
        assert_eq!(t.get(3, 3), 1.0);
        assert_eq!(partial_transpose(&t, 1).unwrap(), g);
    }

    #[test]
    fn transpose_mode_out_of_range() {
        let err = partial_transpose(&CovarianceMatrix::vacuum(2), 2).unwrap_err();
        assert_eq!(err, Error::IndexOutOfRange { index: 2, n_modes: 2 });
    }

    #[test]
    fn product_of_vacua_is_separable() {
        let g = CovarianceMatrix::vacuum(2);
        for k in 0..2 {
            let v = ppt_value(&g, k).unwrap();
            assert_relative_eq!(v, 1.0, epsilon = 1e-12);
            assert!(is_separable_value(v));
        }
    }
}
