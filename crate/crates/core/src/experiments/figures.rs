use crate::error::{Error, Result};
use crate::jammer::JammingStrategy;
use crate::training::{PilotDesign, TrainingConfig};

use super::spec::{ExperimentSpec, Scenario, SweepAxis};

/// BS and jammer training power used by all built-in figures.
pub const FIGURE_POWER_DB: f64 = 5.0;

fn five_scenarios() -> Vec<Scenario> {
    use JammingStrategy::*;
    use PilotDesign::*;
    vec![
        Scenario::new(Optimal, Silent),
        Scenario::new(Optimal, SingleShot),
        Scenario::new(Optimal, EigenOptimal),
        Scenario::new(WorstCase, Silent),
        Scenario::new(WorstCase, EigenOptimal),
    ]
}

/// Built-in sweeps:
///
/// * 1 and 2: MSE versus `L ∈ {5, 10, …, 100}` at `M = N = 100`, with
///   `r = 0.4` and `r = 0.7` respectively.
/// * 3: MSE versus `M ∈ {25, 30, …, 200}` at `L = 20`, `N = 25`, `r = 0.7`.
///
/// Returns the spec and notes for the metadata sidecar.
pub fn figure_spec(figure: u8) -> Result<(ExperimentSpec, Vec<String>)> {
    let p = FIGURE_POWER_DB;
    let (spec, notes) = match figure {
        1 | 2 => {
            let r = if figure == 1 { 0.4 } else { 0.7 };
            (
                ExperimentSpec {
                    sweep_axis: SweepAxis::PilotLength,
                    axis_values: (1..=20).map(|k| 5 * k).collect(),
                    monte_carlo_trials: 0,
                    seed: 2018,
                    base: TrainingConfig::new(100, 100, 5, p, p, r),
                    scenarios: five_scenarios(),
                },
                vec![
                    "L grid {5,10,...,100} chosen by this tool".to_string(),
                    "jammer antennas N = 100 (= max L) so eigen-optimal jamming is feasible on the whole grid".to_string(),
                ],
            )
        }
        3 => (
            ExperimentSpec {
                sweep_axis: SweepAxis::BsAntennas,
                axis_values: (5..=40).map(|k| 5 * k).collect(),
                monte_carlo_trials: 0,
                seed: 2018,
                base: TrainingConfig::new(25, 25, 20, p, p, 0.7),
                scenarios: five_scenarios(),
            },
            vec![
                "M grid {25,30,...,200} chosen by this tool".to_string(),
                "training powers P_b = P_j = 5 dB, as for the L sweeps".to_string(),
            ],
        ),
        other => {
            return Err(Error::Config(format!(
                "unknown figure {other}; expected 1, 2 or 3"
            )))
        }
    };
    Ok((spec, notes))
}
