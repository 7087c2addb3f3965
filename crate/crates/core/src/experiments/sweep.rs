use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use crate::channel::{exponential_covariance, ChannelCovariance, CorrelationSpec};
use crate::error::Result;
use crate::jammer::JammingStrategy;
use crate::seed::derive_seed;
use crate::training::{
    design_pilots, empirical_mse, map_trials, scenario_mse, EstimatorMode, PilotDesign,
};

use super::spec::ExperimentSpec;

/// One point of one curve.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub axis_value: usize,
    pub pilot_design: PilotDesign,
    pub jamming_strategy: JammingStrategy,
    pub estimator_mode: EstimatorMode,
    pub closed_form_mse: f64,
    pub empirical_mse: Option<f64>,
    pub empirical_std_err: Option<f64>,
}

const PILOT_STREAM: u64 = 1;
const JAMMER_STREAM: u64 = 2;
const TRIAL_STREAM: u64 = 3;

/// Evaluates every scenario at every axis value. Rows come out ordered by
/// axis value, then scenario index, and depend only on the spec.
pub fn run_sweep(spec: &ExperimentSpec) -> Result<Vec<ResultRow>> {
    spec.validate()?;

    let mut bs_covariances: BTreeMap<usize, ChannelCovariance> = BTreeMap::new();
    for &v in &spec.axis_values {
        let cfg = spec.config_at(v);
        if let Entry::Vacant(slot) = bs_covariances.entry(cfg.num_bs_antennas) {
            slot.insert(exponential_covariance(CorrelationSpec::new(
                cfg.num_bs_antennas,
                cfg.r_h,
            )?)?);
        }
    }
    let r_g = exponential_covariance(CorrelationSpec::new(
        spec.base.num_jammer_antennas,
        spec.base.jammer_correlation(),
    )?)?;

    let per_axis = spec.scenarios.len();
    let total = spec.axis_values.len() * per_axis;
    let rows: Vec<Result<ResultRow>> = map_trials(total, |k| {
        let axis_value = spec.axis_values[k / per_axis];
        let scenario_index = k % per_axis;
        let scenario = spec.scenarios[scenario_index];
        let cfg = spec.config_at(axis_value);
        let r_h = &bs_covariances[&cfg.num_bs_antennas];
        let point = [axis_value as u64, scenario_index as u64];
        let stream = |s: u64| derive_seed(spec.seed, &[point[0], point[1], s]);

        let pilots = design_pilots(scenario.pilot, r_h, cfg.pilot_length, stream(PILOT_STREAM))?;
        let jamming = scenario
            .jamming
            .realize(&r_g, cfg.pilot_length, stream(JAMMER_STREAM))?;
        let closed_form_mse = scenario_mse(
            &pilots,
            jamming.as_ref(),
            r_h,
            &r_g,
            &cfg,
            scenario.estimator,
        )?;

        let (empirical_mse, empirical_std_err) = if spec.monte_carlo_trials > 0 {
            let est = empirical_mse(
                &cfg,
                &pilots,
                jamming.as_ref(),
                r_h,
                &r_g,
                scenario.estimator,
                spec.monte_carlo_trials,
                stream(TRIAL_STREAM),
            )?;
            (Some(est.mean), Some(est.std_err))
        } else {
            (None, None)
        };

        Ok(ResultRow {
            axis_value,
            pilot_design: scenario.pilot,
            jamming_strategy: scenario.jamming,
            estimator_mode: scenario.estimator,
            closed_form_mse,
            empirical_mse,
            empirical_std_err,
        })
    });
    rows.into_iter().collect()
}
