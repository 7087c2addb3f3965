use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jammer::JammingStrategy;
use crate::training::{EstimatorMode, PilotDesign, TrainingConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepAxis {
    PilotLength,
    BsAntennas,
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::PilotLength => "pilot-length",
            Self::BsAntennas => "bs-antennas",
        })
    }
}

/// One curve of a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub pilot: PilotDesign,
    pub jamming: JammingStrategy,
    #[serde(default)]
    pub estimator: EstimatorMode,
}

impl Scenario {
    pub fn new(pilot: PilotDesign, jamming: JammingStrategy) -> Self {
        Self {
            pilot,
            jamming,
            estimator: EstimatorMode::JammerAware,
        }
    }
}

/// A full sweep: a base scenario, the axis to vary, and the curves to
/// evaluate at each axis value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub sweep_axis: SweepAxis,
    pub axis_values: Vec<usize>,
    /// 0 evaluates the closed form only.
    #[serde(default)]
    pub monte_carlo_trials: usize,
    pub seed: u64,
    pub base: TrainingConfig,
    pub scenarios: Vec<Scenario>,
}

impl ExperimentSpec {
    /// `base` with the sweep axis set to `value`.
    pub fn config_at(&self, value: usize) -> TrainingConfig {
        let mut cfg = self.base.clone();
        match self.sweep_axis {
            SweepAxis::PilotLength => cfg.pilot_length = value,
            SweepAxis::BsAntennas => cfg.num_bs_antennas = value,
        }
        cfg
    }

    /// Checks every axis value against every scenario before any work runs.
    pub fn validate(&self) -> Result<()> {
        if self.axis_values.is_empty() {
            return Err(Error::Config("axis_values is empty".into()));
        }
        if self.axis_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(
                "axis_values must be strictly increasing".into(),
            ));
        }
        if self.scenarios.is_empty() {
            return Err(Error::Config("no scenarios given".into()));
        }
        if self.seed > i64::MAX as u64 {
            return Err(Error::Config(format!(
                "seed {} exceeds 2^63 - 1",
                self.seed
            )));
        }
        for &v in &self.axis_values {
            let cfg = self.config_at(v);
            cfg.validate()
                .map_err(|e| Error::Config(format!("at {} = {v}: {e}", self.sweep_axis)))?;
            let jammed = self
                .scenarios
                .iter()
                .any(|s| s.jamming != JammingStrategy::Silent);
            if jammed && cfg.pilot_length > cfg.num_jammer_antennas {
                return Err(Error::Config(format!(
                    "at {} = {v}: L={} exceeds jammer antennas N={}",
                    self.sweep_axis, cfg.pilot_length, cfg.num_jammer_antennas
                )));
            }
        }
        Ok(())
    }
}

/// Input of the `verify-lemma` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LemmaConfig {
    #[serde(default = "default_pilot")]
    pub pilot: PilotDesign,
    pub num_random: usize,
    pub seed: u64,
    pub base: TrainingConfig,
}

fn default_pilot() -> PilotDesign {
    PilotDesign::Optimal
}

impl LemmaConfig {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.base.pilot_length > self.base.num_jammer_antennas {
            return Err(Error::Config(format!(
                "L={} exceeds jammer antennas N={}",
                self.base.pilot_length, self.base.num_jammer_antennas
            )));
        }
        Ok(())
    }
}
