//! Measured three-mode data used as regression fixtures and CLI defaults.
//!
//! All matrices are in `(X_A, P_A, X_B, P_B, X_C, P_C)` order, rounded to two
//! decimals as recorded.

use crate::covariance::CovarianceMatrix;
use crate::noise::LossVector;
use crate::states::SingleModeSpec;

/// Covariance matrix reconstructed from homodyne data, before loss correction.
pub const MEASURED: [[f64; 6]; 6] = [
    [0.76, 0.04, 0.12, -0.03, 0.19, -0.07],
    [0.04, 2.20, 0.05, -0.78, -0.10, -0.74],
    [0.12, 0.05, 5.70, -0.29, -3.92, 1.14],
    [-0.03, -0.78, -0.29, 6.84, -0.96, -3.94],
    [0.19, -0.10, -3.92, -0.96, 4.73, 0.09],
    [-0.07, -0.74, 1.14, -3.94, 0.09, 5.92],
];

/// [`MEASURED`] with the [`DETECTION_EFFICIENCIES`] losses removed.
pub const LOSS_COMPENSATED: [[f64; 6]; 6] = [
    [0.71, 0.05, 0.15, -0.04, 0.23, -0.09],
    [0.05, 2.43, 0.06, -0.96, -0.12, -0.91],
    [0.15, 0.06, 7.03, -0.37, -5.01, 1.46],
    [-0.04, -0.96, -0.37, 8.49, -1.23, -5.04],
    [0.23, -0.12, -5.01, -1.23, 5.76, 0.11],
    [-0.09, -0.91, 1.46, -5.04, 0.11, 7.28],
];

/// Conservative lower bounds on the homodyne efficiencies of A, B and C.
pub const DETECTION_EFFICIENCIES: [f64; 3] = [0.839, 0.780, 0.784];

/// Duan value observed after distribution.
pub const MEASURED_DUAN: f64 = 3.4;

/// Estimated range of the real detection loss.
pub const DETECTION_LOSS_BAND: (f64, f64) = (0.07, 0.22);

/// Non-Gaussian modulation share assumed in the conservative hot-squeezing
/// analysis, as a Gaussian fraction.
pub const CONSERVATIVE_GAUSSIAN_FRACTION: f64 = 0.75;

fn to_matrix(rows: &[[f64; 6]; 6]) -> CovarianceMatrix {
    let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
    CovarianceMatrix::from_rows(&rows).expect("reference matrix is symmetric")
}

pub fn measured() -> CovarianceMatrix {
    to_matrix(&MEASURED)
}

pub fn loss_compensated() -> CovarianceMatrix {
    to_matrix(&LOSS_COMPENSATED)
}

pub fn detection_efficiencies() -> LossVector {
    LossVector::new(DETECTION_EFFICIENCIES.to_vec()).expect("efficiencies in (0, 1]")
}

/// Squeezed input: -1.8 dB in X, +5.1 dB in P.
pub fn squeezed_input() -> SingleModeSpec {
    SingleModeSpec::squeezed_db(-1.8, 5.1)
}

/// Hot-squeezed noise input: 9.6 dB in X, 10.2 dB in P.
pub fn hot_squeezed_input() -> SingleModeSpec {
    SingleModeSpec::hot_squeezed_db(9.6, 10.2)
}
