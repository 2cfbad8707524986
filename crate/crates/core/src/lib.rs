//! Gaussian covariance-matrix toolkit for analysing entanglement distribution
//! with separable carriers.
//!
//! A three-mode state (A, B, C) is prepared from a squeezed, a vacuum and a
//! noisy input on two balanced beam splitters. Its PPT values decide
//! separability across each single-mode splitting; mixing B and C on a third
//! beam splitter then entangles A with B' even though C was separable from
//! both.

pub mod covariance;
pub mod error;
pub mod model;
pub mod network;
pub mod noise;
pub mod reference;
pub mod spectrum;
pub mod states;
pub mod tomography;

pub use covariance::{CovarianceMatrix, PartialTransposeMask, SymplecticForm};
pub use error::{Error, Result};
pub use network::{
    beamsplitter, distribute, duan_value, mix_three_mode, optimize_distribution_phase,
    phase_shift, prepare_three_mode, squeezer, tensor, trace_out, PhaseOptimum, SymplecticMap,
};
pub use noise::{
    apply_loss, apply_phase_noise, degauss_hot_squeezing, invert_loss, invert_phase_noise,
    loss_sweep, phase_noise_sweep, GaussianFraction, LossVector, PhaseNoiseStrength,
};
pub use spectrum::{is_physical, partial_transpose, ppt_value, symplectic_eigenvalues};
pub use states::{
    apply_preparation_loss, db_to_variance, make_state, variance_to_db, HotSqueezingSpec,
    ModeKind, SingleModeSpec,
};
pub use tomography::{
    monte_carlo_ppt, reconstruct, sample_block, MeasurementSetting, MonteCarloSummary,
    QuadratureSampleBlock, ReconstructionResult,
};
