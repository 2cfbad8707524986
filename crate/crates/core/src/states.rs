//! Single-mode input states and dB conversions.
//!
//! Decibels are power ratios relative to shot noise: `variance = 10^(dB/10)`.
//! Negative values are noise reduction below the vacuum level.

use serde::{Deserialize, Serialize};

use crate::covariance::CovarianceMatrix;
use crate::error::{Error, Result};

const SPEC_TOLERANCE: f64 = 1e-9;

pub fn db_to_variance(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn variance_to_db(variance: f64) -> f64 {
    10.0 * variance.log10()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeKind {
    Vacuum,
    Squeezed,
    Thermal,
    HotSqueezed,
}

/// Declarative single-mode input: quadrature variances in shot-noise units.
///
/// Serialized as `{"kind": "squeezed", "var_x_db": -1.8, "var_p_db": 5.1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecDocument", into = "SpecDocument")]
pub struct SingleModeSpec {
    pub kind: ModeKind,
    pub var_x: f64,
    pub var_p: f64,
}

impl SingleModeSpec {
    pub fn vacuum() -> Self {
        Self {
            kind: ModeKind::Vacuum,
            var_x: 1.0,
            var_p: 1.0,
        }
    }

    pub fn squeezed_db(x_db: f64, p_db: f64) -> Self {
        Self {
            kind: ModeKind::Squeezed,
            var_x: db_to_variance(x_db),
            var_p: db_to_variance(p_db),
        }
    }

    /// Pure squeezed vacuum with `db` of squeezing in X and as much
    /// antisqueezing in P.
    pub fn pure_squeezed_db(db: f64) -> Self {
        Self::squeezed_db(-db.abs(), db.abs())
    }

    /// Symmetric thermal state with the given noise power.
    pub fn thermal_db(db: f64) -> Self {
        let v = db_to_variance(db);
        Self {
            kind: ModeKind::Thermal,
            var_x: v,
            var_p: v,
        }
    }

    pub fn hot_squeezed_db(x_db: f64, p_db: f64) -> Self {
        Self {
            kind: ModeKind::HotSqueezed,
            var_x: db_to_variance(x_db),
            var_p: db_to_variance(p_db),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let Self { kind, var_x, var_p } = *self;
        if !(var_x > 0.0 && var_p > 0.0 && var_x.is_finite() && var_p.is_finite()) {
            return Err(Error::UnphysicalSpec(format!(
                "variances must be positive and finite, got ({var_x}, {var_p})"
            )));
        }
        if var_x * var_p < 1.0 - SPEC_TOLERANCE {
            return Err(Error::UnphysicalSpec(format!(
                "var_x * var_p = {} violates the uncertainty bound",
                var_x * var_p
            )));
        }
        let ok = match kind {
            ModeKind::Vacuum => {
                (var_x - 1.0).abs() <= SPEC_TOLERANCE && (var_p - 1.0).abs() <= SPEC_TOLERANCE
            }
            ModeKind::Thermal => {
                (var_x - var_p).abs() <= SPEC_TOLERANCE * var_x.max(1.0)
                    && var_x >= 1.0 - SPEC_TOLERANCE
            }
            ModeKind::Squeezed => true,
            ModeKind::HotSqueezed => {
                var_x >= 1.0 - SPEC_TOLERANCE && var_p >= 1.0 - SPEC_TOLERANCE
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::UnphysicalSpec(format!(
                "({var_x}, {var_p}) is not a valid {kind:?} state"
            )))
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecDocument {
    kind: ModeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    var_x_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    var_p_db: Option<f64>,
}

impl TryFrom<SpecDocument> for SingleModeSpec {
    type Error = Error;

    fn try_from(doc: SpecDocument) -> Result<Self> {
        let (x_db, p_db) = match (doc.kind, doc.var_x_db, doc.var_p_db) {
            (ModeKind::Vacuum, x, p) => (x.unwrap_or(0.0), p.unwrap_or(0.0)),
            // a thermal state may be given by a single noise power
            (ModeKind::Thermal, Some(x), None) | (ModeKind::Thermal, None, Some(x)) => (x, x),
            (_, Some(x), Some(p)) => (x, p),
            (kind, _, _) => {
                return Err(Error::UnphysicalSpec(format!(
                    "{kind:?} spec needs both var_x_db and var_p_db"
                )))
            }
        };
        let spec = Self {
            kind: doc.kind,
            var_x: db_to_variance(x_db),
            var_p: db_to_variance(p_db),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl From<SingleModeSpec> for SpecDocument {
    fn from(s: SingleModeSpec) -> Self {
        Self {
            kind: s.kind,
            var_x_db: Some(variance_to_db(s.var_x)),
            var_p_db: Some(variance_to_db(s.var_p)),
        }
    }
}

/// A squeezed state whose amplitude quadrature is randomly displaced.
///
/// The displacement `x_N` has variance `sigma_n_sq`; a fraction `p_g` of it is
/// Gaussian, the rest has an arbitrary distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HotSqueezingSpec {
    pub base: SingleModeSpec,
    pub sigma_n_sq: f64,
    pub p_g: f64,
}

impl HotSqueezingSpec {
    pub fn new(base: SingleModeSpec, sigma_n_sq: f64, p_g: f64) -> Result<Self> {
        base.validate()?;
        if !(sigma_n_sq >= 0.0) {
            return Err(Error::UnphysicalSpec(format!(
                "displacement variance {sigma_n_sq} is negative"
            )));
        }
        if !(0.0..=1.0).contains(&p_g) {
            return Err(Error::FractionOutOfRange(p_g));
        }
        Ok(Self {
            base,
            sigma_n_sq,
            p_g,
        })
    }

    /// Covariance-level description including all of the added noise.
    pub fn effective_spec(&self) -> SingleModeSpec {
        self.with_added_noise(self.sigma_n_sq)
    }

    /// The state obtained by keeping only the Gaussian part of the noise.
    pub fn gaussian_part(&self) -> SingleModeSpec {
        self.with_added_noise(self.p_g * self.sigma_n_sq)
    }

    fn with_added_noise(&self, added: f64) -> SingleModeSpec {
        let var_x = self.base.var_x + added;
        let kind = if var_x >= 1.0 && self.base.var_p >= 1.0 {
            ModeKind::HotSqueezed
        } else {
            self.base.kind
        };
        SingleModeSpec {
            kind,
            var_x,
            var_p: self.base.var_p,
        }
    }
}

/// `diag(var_x, var_p)`.
pub fn make_state(spec: &SingleModeSpec) -> Result<CovarianceMatrix> {
    spec.validate()?;
    CovarianceMatrix::from_diagonal(&[spec.var_x, spec.var_p])
}

/// Mixes the state with vacuum: `(1 - loss) * gamma + loss * I`.
pub fn apply_preparation_loss(gamma: &CovarianceMatrix, loss: f64) -> Result<CovarianceMatrix> {
    if !(0.0..=1.0).contains(&loss) {
        return Err(Error::LossOutOfRange(loss));
    }
    let id = nalgebra::DMatrix::<f64>::identity(gamma.dim(), gamma.dim());
    Ok(CovarianceMatrix::from_computed(
        gamma.matrix() * (1.0 - loss) + id * loss,
    ))
}
