//! Jamming strategies for the training phase.
//!
//! The jammer only knows its own channel statistics `R_g` and the pilot
//! length `L`; no strategy here reads `R_h` or the pilots. The eigen-optimal
//! strategy transmits along the top-`L` eigenvectors of `R_g`, which
//! maximizes the received jamming energy `tr(ZᴴR_gZ)` over unitary blocks.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelCovariance;
use crate::error::{Error, Result};
use crate::linalg::{self, random_orthonormal_frame, ComplexMatrix, C64};
use crate::seed::rng_for;
use crate::tolerances;
use crate::training::{map_trials, scenario_mse, EstimatorMode, PilotMatrix, TrainingConfig};

/// How the jammer fills its `N × L` block, or whether it transmits at all.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JammingStrategy {
    Silent,
    SingleShot,
    EigenOptimal,
    RandomUnitary,
}

impl JammingStrategy {
    pub const ALL: [JammingStrategy; 4] = [
        Self::Silent,
        Self::SingleShot,
        Self::EigenOptimal,
        Self::RandomUnitary,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Self::Silent => "silent",
            Self::SingleShot => "single-shot",
            Self::EigenOptimal => "eigen-optimal",
            Self::RandomUnitary => "random-unitary",
        }
    }

    /// Builds the jamming block for `L` symbols, `None` for a silent jammer.
    /// `seed` is only read by the random strategy.
    pub fn realize(
        self,
        r_g: &ChannelCovariance,
        l: usize,
        seed: u64,
    ) -> Result<Option<JammingMatrix>> {
        match self {
            Self::Silent => Ok(None),
            Self::SingleShot => single_shot_jamming(r_g.dim(), l).map(Some),
            Self::EigenOptimal => optimal_jamming(r_g, l).map(Some),
            Self::RandomUnitary => {
                random_unitary_jamming(r_g.dim(), l, &mut rng_for(seed, &[0x1a_aa])).map(Some)
            }
        }
    }
}

impl fmt::Display for JammingStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for JammingStrategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|d| d.label() == s)
            .ok_or_else(|| Error::Config(format!("unknown jamming strategy '{s}'")))
    }
}

/// `N × L` jamming block with `ZᴴZ = I_L`.
#[derive(Clone, Debug)]
pub struct JammingMatrix {
    matrix: ComplexMatrix,
    strategy: JammingStrategy,
}

impl JammingMatrix {
    pub fn new(matrix: ComplexMatrix, strategy: JammingStrategy) -> Result<Self> {
        if strategy == JammingStrategy::Silent {
            return Err(Error::Domain(
                "a silent jammer has no jamming matrix".into(),
            ));
        }
        if matrix.ncols() == 0 || matrix.ncols() > matrix.nrows() {
            return Err(Error::Dimension(format!(
                "jamming matrix must be N x L with 1 <= L <= N, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let err = linalg::orthonormality_error(&matrix);
        if err > tolerances::ORTHONORMAL {
            return Err(Error::Domain(format!(
                "jamming columns not orthonormal (error {err:.3e})"
            )));
        }
        Ok(Self { matrix, strategy })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn strategy(&self) -> JammingStrategy {
        self.strategy
    }

    pub fn num_antennas(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn len(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.ncols() == 0
    }
}

fn check_length(n: usize, l: usize) -> Result<()> {
    if l == 0 || l > n {
        return Err(Error::Dimension(format!(
            "jammer with N={n} antennas cannot cover L={l} symbols (needs 1 <= L <= N)"
        )));
    }
    Ok(())
}

/// `Z_opt = U_g(1:L)`.
pub fn optimal_jamming(r_g: &ChannelCovariance, l: usize) -> Result<JammingMatrix> {
    check_length(r_g.dim(), l)?;
    JammingMatrix::new(r_g.evd().leading(l), JammingStrategy::EigenOptimal)
}

/// One antenna per symbol: the first `L` columns of `I_N`.
pub fn single_shot_jamming(n: usize, l: usize) -> Result<JammingMatrix> {
    check_length(n, l)?;
    let z = ComplexMatrix::from_fn(n, l, |i, j| {
        if i == j {
            C64::from(1.0)
        } else {
            C64::from(0.0)
        }
    });
    JammingMatrix::new(z, JammingStrategy::SingleShot)
}

pub fn random_unitary_jamming<R: Rng + ?Sized>(
    n: usize,
    l: usize,
    rng: &mut R,
) -> Result<JammingMatrix> {
    check_length(n, l)?;
    JammingMatrix::new(
        random_orthonormal_frame(n, l, rng)?,
        JammingStrategy::RandomUnitary,
    )
}

/// `tr(ZᴴR_gZ)`, the jamming energy the jammer's design maximizes.
pub fn jamming_objective(z: &JammingMatrix, r_g: &ChannelCovariance) -> Result<f64> {
    if z.num_antennas() != r_g.dim() {
        return Err(Error::Dimension(format!(
            "Z has N={} rows, R_g is {1}x{1}",
            z.num_antennas(),
            r_g.dim()
        )));
    }
    let zm = z.matrix();
    Ok(linalg::trace_re(&zm.ad_mul(&(r_g.matrix() * zm))))
}

/// Sum of the `L` largest eigenvalues of `R_g`, the Ky Fan upper bound on
/// `tr(ZᴴR_gZ)`.
pub fn top_eigenvalue_sum(r_g: &ChannelCovariance, l: usize) -> f64 {
    r_g.eigenvalues().iter().take(l).sum()
}

/// Outcome of testing the eigen-optimal jammer against random unitary
/// jammers, both on the trace objective and on the true closed-form MSE.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaVerdict {
    pub optimal_objective: f64,
    pub top_eigenvalue_sum: f64,
    pub optimal_mse: f64,
    pub best_random_objective: Option<f64>,
    pub best_random_mse: Option<f64>,
    pub num_samples: usize,
    /// Some random jammer beat the eigen-optimal MSE by more than the gap
    /// tolerance.
    pub mse_counterexample_found: bool,
    /// Largest `mse(random) − mse(optimal)`, negative when the eigen-optimal
    /// jammer wins every comparison.
    pub max_mse_gap: Option<f64>,
}

impl LemmaVerdict {
    /// No sampled jammer exceeded the top-L eigenvalue sum.
    pub fn ky_fan_holds(&self) -> bool {
        self.best_random_objective
            .is_none_or(|b| b <= self.optimal_objective + tolerances::KY_FAN)
            && (self.optimal_objective - self.top_eigenvalue_sum).abs() <= tolerances::KY_FAN
    }
}

/// Samples `num_random` unitary jammers and compares each with `Z_opt` on
/// `tr(ZᴴR_gZ)` and on the closed-form MSE. Sample `k` draws from a stream
/// derived from `(seed, k)`.
pub fn verify_lemma(
    r_h: &ChannelCovariance,
    r_g: &ChannelCovariance,
    pilots: &PilotMatrix,
    cfg: &TrainingConfig,
    num_random: usize,
    seed: u64,
) -> Result<LemmaVerdict> {
    let l = pilots.len();
    let n = r_g.dim();
    let z_opt = optimal_jamming(r_g, l)?;
    let optimal_objective = jamming_objective(&z_opt, r_g)?;
    let mode = EstimatorMode::JammerAware;
    let optimal_mse = scenario_mse(pilots, Some(&z_opt), r_h, r_g, cfg, mode)?;

    let samples: Vec<Result<(f64, f64)>> = map_trials(num_random, |k| {
        let mut rng = rng_for(seed, &[k as u64]);
        let z = random_unitary_jamming(n, l, &mut rng)?;
        let objective = jamming_objective(&z, r_g)?;
        let mse = scenario_mse(pilots, Some(&z), r_h, r_g, cfg, mode)?;
        Ok((objective, mse))
    });
    let samples = samples.into_iter().collect::<Result<Vec<_>>>()?;

    let best_random_objective = samples.iter().map(|s| s.0).reduce(f64::max);
    let best_random_mse = samples.iter().map(|s| s.1).reduce(f64::max);
    let max_mse_gap = best_random_mse.map(|b| b - optimal_mse);
    Ok(LemmaVerdict {
        optimal_objective,
        top_eigenvalue_sum: top_eigenvalue_sum(r_g, l),
        optimal_mse,
        best_random_objective,
        best_random_mse,
        num_samples: num_random,
        mse_counterexample_found: max_mse_gap.is_some_and(|g| g > tolerances::LEMMA_MSE_GAP),
        max_mse_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{exponential_covariance, CorrelationSpec};
    use crate::training::optimal_pilots;

    fn cov(m: usize, r: f64) -> ChannelCovariance {
        exponential_covariance(CorrelationSpec::new(m, r).unwrap()).unwrap()
    }

    #[test]
    fn optimal_on_identity_is_standard_basis() {
        let z = optimal_jamming(&cov(4, 0.0), 2).unwrap();
        assert_eq!(
            z.matrix(),
            &single_shot_jamming(4, 2).unwrap().matrix().clone()
        );
    }

    #[test]
    fn optimal_objective_on_diagonal_spectrum() {
        let d = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::from(1.0),
            C64::from(3.0),
            C64::from(2.0),
        ]));
        let r_g = ChannelCovariance::from_matrix(d).unwrap();
        let z = optimal_jamming(&r_g, 2).unwrap();
        assert!((jamming_objective(&z, &r_g).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn optimal_diagonalizes() {
        let r_g = cov(8, 0.7);
        let z = optimal_jamming(&r_g, 3).unwrap();
        let a = z.matrix().ad_mul(&(r_g.matrix() * z.matrix()));
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { r_g.eigenvalues()[i] } else { 0.0 };
                assert!((a[(i, j)] - C64::from(expected)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn single_shot_construction() {
        let z = single_shot_jamming(3, 2).unwrap();
        let expected =
            ComplexMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0].map(C64::from));
        assert_eq!(z.matrix(), &expected);
        for n in 1..=64 {
            for l in 1..=n {
                let z = single_shot_jamming(n, l).unwrap();
                assert_eq!(z.matrix().ad_mul(z.matrix()), ComplexMatrix::identity(l, l));
            }
        }
        assert!(matches!(
            single_shot_jamming(2, 3),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn strategies_tie_on_uncorrelated_channel() {
        let r_g = cov(6, 0.0);
        let a = jamming_objective(&single_shot_jamming(6, 4).unwrap(), &r_g).unwrap();
        let b = jamming_objective(&optimal_jamming(&r_g, 4).unwrap(), &r_g).unwrap();
        assert_eq!(a, 4.0);
        assert_eq!(b, 4.0);
    }

    #[test]
    fn single_shot_objective_is_l() {
        let r_g = cov(7, 0.8);
        let obj = jamming_objective(&single_shot_jamming(7, 3).unwrap(), &r_g).unwrap();
        assert!((obj - 3.0).abs() < 1e-15);
        let opt = jamming_objective(&optimal_jamming(&r_g, 3).unwrap(), &r_g).unwrap();
        assert!((opt - top_eigenvalue_sum(&r_g, 3)).abs() < 1e-9);
    }

    #[test]
    fn random_jammers_never_beat_ky_fan() {
        let r_g = cov(6, 0.8);
        let bound = jamming_objective(&optimal_jamming(&r_g, 3).unwrap(), &r_g).unwrap();
        let mut rng = rng_for(12, &[]);
        for _ in 0..500 {
            let z = random_unitary_jamming(6, 3, &mut rng).unwrap();
            assert!(jamming_objective(&z, &r_g).unwrap() <= bound + 1e-9);
        }
    }

    #[test]
    fn jammer_rejects_too_few_antennas() {
        assert!(matches!(
            optimal_jamming(&cov(3, 0.5), 4),
            Err(Error::Dimension(_))
        ));
        let z = single_shot_jamming(3, 2).unwrap();
        assert!(jamming_objective(&z, &cov(4, 0.5)).is_err());
        assert!(
            JammingMatrix::new(ComplexMatrix::identity(2, 2), JammingStrategy::Silent).is_err()
        );
    }

    #[test]
    fn lemma_on_uncorrelated_jammer_channel_ties() {
        let r_h = cov(8, 0.7);
        let r_g = cov(4, 0.0);
        let mut cfg = TrainingConfig::new(8, 4, 2, 5.0, 5.0, 0.7);
        cfg.r_g = Some(0.0);
        let p = optimal_pilots(&r_h, 2).unwrap();
        let v = verify_lemma(&r_h, &r_g, &p, &cfg, 50, 1).unwrap();
        assert!((v.best_random_objective.unwrap() - v.optimal_objective).abs() < 1e-9);
        assert!(v.max_mse_gap.unwrap().abs() < 1e-9);
        assert!(!v.mse_counterexample_found);
    }

    #[test]
    fn lemma_with_no_samples() {
        let r_h = cov(8, 0.7);
        let r_g = cov(4, 0.7);
        let cfg = TrainingConfig::new(8, 4, 2, 5.0, 5.0, 0.7);
        let p = optimal_pilots(&r_h, 2).unwrap();
        let v = verify_lemma(&r_h, &r_g, &p, &cfg, 0, 1).unwrap();
        assert_eq!(v.num_samples, 0);
        assert!(v.best_random_objective.is_none());
        assert!(v.best_random_mse.is_none());
        assert!(!v.mse_counterexample_found);
        assert!(v.ky_fan_holds());
    }

    #[test]
    fn lemma_holds_at_figure_scale() {
        let r_h = cov(8, 0.7);
        let r_g = cov(4, 0.7);
        let cfg = TrainingConfig::new(8, 4, 2, 5.0, 5.0, 0.7);
        let p = optimal_pilots(&r_h, 2).unwrap();
        let v = verify_lemma(&r_h, &r_g, &p, &cfg, 2000, 42).unwrap();
        assert!(v.ky_fan_holds(), "{v:?}");
        assert_eq!(v.num_samples, 2000);
    }
}
