//! Experiment configuration. Every field is optional; missing fields take the
//! values of the reference experiment.

use std::path::{Path, PathBuf};

use gaussep::model::linspace;
use gaussep::{reference, SingleModeSpec};
use serde::{Deserialize, Serialize};

use crate::error::{io_err, CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Inputs {
    pub squeezed: SingleModeSpec,
    pub vacuum: SingleModeSpec,
    pub noise: SingleModeSpec,
}

impl Default for Inputs {
    fn default() -> Self {
        Self {
            squeezed: reference::squeezed_input(),
            vacuum: SingleModeSpec::vacuum(),
            noise: reference::hot_squeezed_input(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThermalStudy {
    pub squeezing_db: Vec<f64>,
    pub losses: Vec<f64>,
    pub thermal_db: Vec<f64>,
}

impl Default for ThermalStudy {
    fn default() -> Self {
        Self {
            squeezing_db: vec![6.0, 10.0],
            losses: vec![0.0, 0.2, 0.3, 0.4, 0.5, 1.0],
            thermal_db: linspace(0.0, 60.0, 200),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MonteCarlo {
    pub n_samples: usize,
    pub n_runs: usize,
    pub seed: u64,
}

impl Default for MonteCarlo {
    fn default() -> Self {
        Self {
            n_samples: 100_000,
            n_runs: 100,
            seed: 20_240_601,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub inputs: Inputs,
    pub preparation_loss: f64,
    pub detection_efficiencies: Vec<f64>,
    pub thermal: ThermalStudy,
    pub loss_grid: Vec<f64>,
    pub sigma_grid_deg: Vec<f64>,
    pub p_g: f64,
    pub monte_carlo: MonteCarlo,
    /// Matrix file used instead of the built-in measured matrix.
    pub gamma: Option<PathBuf>,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            inputs: Inputs::default(),
            preparation_loss: 0.0,
            detection_efficiencies: reference::DETECTION_EFFICIENCIES.to_vec(),
            thermal: ThermalStudy::default(),
            loss_grid: (0..=60).map(|k| k as f64 * 0.005).collect(),
            sigma_grid_deg: (0..=48).map(|k| k as f64 * 0.25).collect(),
            p_g: reference::CONSERVATIVE_GAUSSIAN_FRACTION,
            monte_carlo: MonteCarlo::default(),
            gamma: None,
            out: PathBuf::from("results"),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |msg: String| Err(CliError::Config(msg));
        for (name, grid) in [
            ("thermal.squeezing_db", &self.thermal.squeezing_db),
            ("thermal.losses", &self.thermal.losses),
            ("thermal.thermal_db", &self.thermal.thermal_db),
            ("loss_grid", &self.loss_grid),
            ("sigma_grid_deg", &self.sigma_grid_deg),
        ] {
            if grid.is_empty() {
                return bad(format!("{name} is empty"));
            }
            if grid.iter().any(|v| !v.is_finite()) {
                return bad(format!("{name} has a non-finite value"));
            }
        }
        for (name, grid) in [
            ("thermal.thermal_db", &self.thermal.thermal_db),
            ("loss_grid", &self.loss_grid),
            ("sigma_grid_deg", &self.sigma_grid_deg),
        ] {
            if grid.windows(2).any(|w| w[1] <= w[0]) {
                return bad(format!("{name} must be strictly increasing"));
            }
        }
        if !(0.0..=1.0).contains(&self.preparation_loss) {
            return bad(format!("preparation_loss {} outside [0, 1]", self.preparation_loss));
        }
        if let Some(l) = self.thermal.losses.iter().find(|l| !(0.0..=1.0).contains(*l)) {
            return bad(format!("thermal loss {l} outside [0, 1]"));
        }
        if let Some(l) = self.loss_grid.iter().find(|l| !(0.0..1.0).contains(*l)) {
            return bad(format!("loss_grid value {l} outside [0, 1)"));
        }
        if self.sigma_grid_deg.iter().any(|s| *s < 0.0) {
            return bad("sigma_grid_deg has a negative value".into());
        }
        if self.detection_efficiencies.len() != 3
            || self.detection_efficiencies.iter().any(|e| !(*e > 0.0 && *e <= 1.0))
        {
            return bad("detection_efficiencies needs three values in (0, 1]".into());
        }
        if !(0.0..=1.0).contains(&self.p_g) {
            return bad(format!("p_g {} outside [0, 1]", self.p_g));
        }
        if self.monte_carlo.n_samples < gaussep::tomography::MIN_SAMPLES || self.monte_carlo.n_runs == 0 {
            return bad(format!(
                "monte_carlo needs n_samples >= {} and n_runs >= 1",
                gaussep::tomography::MIN_SAMPLES
            ));
        }
        Ok(())
    }
}
