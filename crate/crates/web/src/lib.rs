//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Each exported function returns a JSON document the page plots directly.
//! The computations live in plain Rust functions so they can be tested
//! natively.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use fddjam::channel::{exponential_covariance, ChannelCovariance, CorrelationSpec};
use fddjam::jammer::{jamming_objective, random_unitary_jamming, verify_lemma, JammingStrategy};
use fddjam::seed::rng_for;
use fddjam::training::{design_pilots, scenario_mse, EstimatorMode, PilotDesign, TrainingConfig};

#[derive(Debug, Serialize)]
pub struct Curve {
    pub label: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct Sweep {
    pub axis_label: &'static str,
    pub axis: Vec<usize>,
    pub curves: Vec<Curve>,
}

const SCENARIOS: [(PilotDesign, JammingStrategy); 5] = [
    (PilotDesign::Optimal, JammingStrategy::Silent),
    (PilotDesign::Optimal, JammingStrategy::SingleShot),
    (PilotDesign::Optimal, JammingStrategy::EigenOptimal),
    (PilotDesign::WorstCase, JammingStrategy::Silent),
    (PilotDesign::WorstCase, JammingStrategy::EigenOptimal),
];

/// Upper bound on matrix sizes accepted from the page.
pub const MAX_ANTENNAS: usize = 256;

fn covariance(size: usize, r: f64) -> fddjam::Result<ChannelCovariance> {
    exponential_covariance(CorrelationSpec::new(size, r)?)
}

fn check_size(name: &str, v: usize) -> fddjam::Result<()> {
    if v == 0 || v > MAX_ANTENNAS {
        return Err(fddjam::Error::Config(format!(
            "{name} must be between 1 and {MAX_ANTENNAS}, got {v}"
        )));
    }
    Ok(())
}

fn evaluate(
    cfg: &TrainingConfig,
    r_h: &ChannelCovariance,
    r_g: &ChannelCovariance,
    pilot: PilotDesign,
    jamming: JammingStrategy,
) -> fddjam::Result<f64> {
    let l = cfg.pilot_length;
    let pilots = design_pilots(pilot, r_h, l, 0)?;
    let z = jamming.realize(r_g, l, 0)?;
    scenario_mse(
        &pilots,
        z.as_ref(),
        r_h,
        r_g,
        cfg,
        EstimatorMode::JammerAware,
    )
}

/// Closed-form MSE for `L = 1..=min(M, N)` across the five standard curves.
pub fn pilot_length_sweep(
    m: usize,
    n: usize,
    r_h: f64,
    r_g: f64,
    pb_db: f64,
    pj_db: f64,
) -> fddjam::Result<Sweep> {
    check_size("M", m)?;
    check_size("N", n)?;
    let cov_h = covariance(m, r_h)?;
    let cov_g = covariance(n, r_g)?;
    let axis: Vec<usize> = (1..=m.min(n)).collect();
    let mut curves = Vec::new();
    for (pilot, jamming) in SCENARIOS {
        let mut values = Vec::with_capacity(axis.len());
        for &l in &axis {
            let mut cfg = TrainingConfig::new(m, n, l, pb_db, pj_db, r_h);
            cfg.r_g = Some(r_g);
            cfg.validate()?;
            values.push(evaluate(&cfg, &cov_h, &cov_g, pilot, jamming)?);
        }
        curves.push(Curve {
            label: format!("{pilot} pilots / {jamming} jammer"),
            values,
        });
    }
    Ok(Sweep {
        axis_label: "pilot length L",
        axis,
        curves,
    })
}

/// Closed-form MSE for `M = L..=m_max` in steps of `step`.
#[allow(clippy::too_many_arguments)]
pub fn antenna_sweep(
    l: usize,
    n: usize,
    r_h: f64,
    r_g: f64,
    pb_db: f64,
    pj_db: f64,
    m_max: usize,
    step: usize,
) -> fddjam::Result<Sweep> {
    check_size("M max", m_max)?;
    check_size("N", n)?;
    if l == 0 || l > n || l > m_max {
        return Err(fddjam::Error::Config(format!(
            "need 1 <= L <= N and L <= M max (L={l}, N={n}, M max={m_max})"
        )));
    }
    let cov_g = covariance(n, r_g)?;
    let axis: Vec<usize> = (l..=m_max).step_by(step.max(1)).collect();
    let mut values = vec![Vec::with_capacity(axis.len()); SCENARIOS.len()];
    for &m in &axis {
        let cov_h = covariance(m, r_h)?;
        let mut cfg = TrainingConfig::new(m, n, l, pb_db, pj_db, r_h);
        cfg.r_g = Some(r_g);
        for (k, &(pilot, jamming)) in SCENARIOS.iter().enumerate() {
            values[k].push(evaluate(&cfg, &cov_h, &cov_g, pilot, jamming)?);
        }
    }
    let curves = SCENARIOS
        .iter()
        .zip(values)
        .map(|((pilot, jamming), values)| Curve {
            label: format!("{pilot} pilots / {jamming} jammer"),
            values,
        })
        .collect();
    Ok(Sweep {
        axis_label: "BS antennas M",
        axis,
        curves,
    })
}

#[derive(Debug, Serialize)]
pub struct LemmaScatter {
    /// `(tr(ZᴴR_gZ), MSE)` for each random unitary jammer.
    pub random: Vec<(f64, f64)>,
    pub optimal: (f64, f64),
    pub top_eigenvalue_sum: f64,
    pub mse_counterexample_found: bool,
}

/// Random unitary jammers against the eigen-optimal one, on both the
/// jamming-energy objective and the resulting MSE.
#[allow(clippy::too_many_arguments)]
pub fn lemma_scatter(
    m: usize,
    n: usize,
    l: usize,
    r_h: f64,
    r_g: f64,
    pb_db: f64,
    pj_db: f64,
    pilot: PilotDesign,
    samples: usize,
    seed: u64,
) -> fddjam::Result<LemmaScatter> {
    check_size("M", m)?;
    check_size("N", n)?;
    let mut cfg = TrainingConfig::new(m, n, l, pb_db, pj_db, r_h);
    cfg.r_g = Some(r_g);
    cfg.validate()?;
    let cov_h = covariance(m, r_h)?;
    let cov_g = covariance(n, r_g)?;
    let pilots = design_pilots(pilot, &cov_h, l, seed)?;
    let verdict = verify_lemma(&cov_h, &cov_g, &pilots, &cfg, 0, seed)?;

    let mut random = Vec::with_capacity(samples);
    for k in 0..samples {
        let mut rng = rng_for(seed, &[k as u64]);
        let z = random_unitary_jamming(n, l, &mut rng)?;
        let objective = jamming_objective(&z, &cov_g)?;
        let mse = scenario_mse(
            &pilots,
            Some(&z),
            &cov_h,
            &cov_g,
            &cfg,
            EstimatorMode::JammerAware,
        )?;
        random.push((objective, mse));
    }
    let mse_counterexample_found = random
        .iter()
        .any(|&(_, mse)| mse > verdict.optimal_mse + fddjam::tolerances::LEMMA_MSE_GAP);
    Ok(LemmaScatter {
        random,
        optimal: (verdict.optimal_objective, verdict.optimal_mse),
        top_eigenvalue_sum: verdict.top_eigenvalue_sum,
        mse_counterexample_found,
    })
}

fn to_js<T: Serialize>(result: fddjam::Result<T>) -> Result<String, JsError> {
    let value = result.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&value).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = pilotLengthSweep)]
pub fn pilot_length_sweep_js(
    m: usize,
    n: usize,
    r_h: f64,
    r_g: f64,
    pb_db: f64,
    pj_db: f64,
) -> Result<String, JsError> {
    to_js(pilot_length_sweep(m, n, r_h, r_g, pb_db, pj_db))
}

#[wasm_bindgen(js_name = antennaSweep)]
#[allow(clippy::too_many_arguments)]
pub fn antenna_sweep_js(
    l: usize,
    n: usize,
    r_h: f64,
    r_g: f64,
    pb_db: f64,
    pj_db: f64,
    m_max: usize,
    step: usize,
) -> Result<String, JsError> {
    to_js(antenna_sweep(l, n, r_h, r_g, pb_db, pj_db, m_max, step))
}

#[wasm_bindgen(js_name = lemmaScatter)]
#[allow(clippy::too_many_arguments)]
pub fn lemma_scatter_js(
    m: usize,
    n: usize,
    l: usize,
    r_h: f64,
    r_g: f64,
    pb_db: f64,
    pj_db: f64,
    random_pilots: bool,
    samples: usize,
    seed: u32,
) -> Result<String, JsError> {
    let pilot = if random_pilots {
        PilotDesign::RandomUnitary
    } else {
        PilotDesign::Optimal
    };
    to_js(lemma_scatter(
        m,
        n,
        l,
        r_h,
        r_g,
        pb_db,
        pj_db,
        pilot,
        samples,
        seed as u64,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pilot_sweep_shapes() {
        let s = pilot_length_sweep(32, 32, 0.7, 0.7, 5.0, 5.0).unwrap();
        assert_eq!(s.axis.len(), 32);
        assert_eq!(s.curves.len(), 5);
        let silent = &s.curves[0].values;
        assert!(silent.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        // jamming never lowers the MSE
        for (a, b) in s.curves[2].values.iter().zip(silent) {
            assert!(a >= &(b - 1e-12));
        }
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains("\"axis_label\":\"pilot length L\""));
    }

    #[test]
    fn antenna_sweep_has_interior_minimum() {
        let s = antenna_sweep(20, 25, 0.7, 0.7, 5.0, 5.0, 200, 5).unwrap();
        let attacked = &s.curves[2].values;
        let min = attacked.iter().copied().fold(f64::INFINITY, f64::min);
        assert!(min < attacked[0] && min < *attacked.last().unwrap());
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(pilot_length_sweep(0, 4, 0.5, 0.5, 5.0, 5.0).is_err());
        assert!(pilot_length_sweep(300, 4, 0.5, 0.5, 5.0, 5.0).is_err());
        assert!(antenna_sweep(30, 25, 0.5, 0.5, 5.0, 5.0, 100, 5).is_err());
        assert!(lemma_scatter(8, 4, 6, 0.5, 0.5, 5.0, 5.0, PilotDesign::Optimal, 10, 1).is_err());
    }

    #[test]
    fn scatter_respects_ky_fan() {
        let s = lemma_scatter(8, 4, 2, 0.7, 0.7, 5.0, 5.0, PilotDesign::Optimal, 300, 3).unwrap();
        assert_eq!(s.random.len(), 300);
        assert!(s.random.iter().all(|&(obj, _)| obj <= s.optimal.0 + 1e-9));
        assert!((s.optimal.0 - s.top_eigenvalue_sum).abs() < 1e-9);
        assert!(!s.mse_counterexample_found);
    }
}
