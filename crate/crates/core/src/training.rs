//! Downlink training: pilot design, the received signal at the UE, the MMSE
//! channel estimate and its error, in closed form and by Monte Carlo.
//!
//! The received training block is
//!
//! ```text
//! y = √(L·P_b)·Φᴴh + √(L·P_j)·Zᴴg + w,    w ~ CN(0, σ²I_L)
//! ```
//!
//! and the UE forms `ĥ = C_hy C_yy⁻¹ y`. The estimate is CN(0, ψ) with
//! `ψ = C_hy C_yy⁻¹ C_hyᴴ`, so the per-antenna MSE is `tr(R_h − ψ)/M`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelCovariance;
use crate::error::{Error, Result};
use crate::jammer::JammingMatrix;
use crate::linalg::{
    self, hermitian_evd, hermitian_part, random_orthonormal_frame, solve_hpd,
    standard_complex_normal, ComplexMatrix, ComplexVector, C64,
};
use crate::seed::rng_for;
use crate::tolerances;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PilotDesign {
    Optimal,
    WorstCase,
    RandomUnitary,
}

impl PilotDesign {
    pub const ALL: [PilotDesign; 3] = [Self::Optimal, Self::WorstCase, Self::RandomUnitary];

    pub fn label(self) -> &'static str {
        match self {
            Self::Optimal => "optimal",
            Self::WorstCase => "worst-case",
            Self::RandomUnitary => "random-unitary",
        }
    }
}

impl fmt::Display for PilotDesign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for PilotDesign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|d| d.label() == s)
            .ok_or_else(|| Error::Config(format!("unknown pilot design '{s}'")))
    }
}

/// Whether the UE's `C_yy` includes the jamming term.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorMode {
    #[default]
    JammerAware,
    JammerUnaware,
}

impl EstimatorMode {
    pub const ALL: [EstimatorMode; 2] = [Self::JammerAware, Self::JammerUnaware];

    pub fn label(self) -> &'static str {
        match self {
            Self::JammerAware => "jammer-aware",
            Self::JammerUnaware => "jammer-unaware",
        }
    }
}

impl fmt::Display for EstimatorMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for EstimatorMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|d| d.label() == s)
            .ok_or_else(|| Error::Config(format!("unknown estimator mode '{s}'")))
    }
}

/// `M × L` training matrix with `ΦᴴΦ = I_L`.
#[derive(Clone, Debug)]
pub struct PilotMatrix {
    matrix: ComplexMatrix,
    design: PilotDesign,
}

impl PilotMatrix {
    pub fn new(matrix: ComplexMatrix, design: PilotDesign) -> Result<Self> {
        if matrix.ncols() == 0 || matrix.ncols() > matrix.nrows() {
            return Err(Error::Dimension(format!(
                "pilot matrix must be M x L with 1 <= L <= M, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let err = linalg::orthonormality_error(&matrix);
        if err > tolerances::ORTHONORMAL {
            return Err(Error::Domain(format!(
                "pilot columns not orthonormal (error {err:.3e})"
            )));
        }
        Ok(Self { matrix, design })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn design(&self) -> PilotDesign {
        self.design
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

/// Scalar parameters of one training scenario.
///
/// Powers are in dB relative to unit noise power: `P = 10^(dB/10)`, so with
/// the default `σ² = 1` they are SNRs. `-inf` dB switches a source off.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainingConfig {
    pub num_bs_antennas: usize,
    pub num_jammer_antennas: usize,
    pub pilot_length: usize,
    pub bs_power_db: f64,
    pub jammer_power_db: f64,
    #[serde(default = "default_noise_variance")]
    pub noise_variance: f64,
    pub r_h: f64,
    /// Defaults to `r_h`.
    #[serde(default)]
    pub r_g: Option<f64>,
}

fn default_noise_variance() -> f64 {
    1.0
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

impl TrainingConfig {
    pub fn new(
        m: usize,
        n: usize,
        l: usize,
        bs_power_db: f64,
        jammer_power_db: f64,
        r: f64,
    ) -> Self {
        Self {
            num_bs_antennas: m,
            num_jammer_antennas: n,
            pilot_length: l,
            bs_power_db,
            jammer_power_db,
            noise_variance: 1.0,
            r_h: r,
            r_g: None,
        }
    }

    pub fn bs_power(&self) -> f64 {
        db_to_linear(self.bs_power_db)
    }

    pub fn jammer_power(&self) -> f64 {
        db_to_linear(self.jammer_power_db)
    }

    pub fn jammer_correlation(&self) -> f64 {
        self.r_g.unwrap_or(self.r_h)
    }

    pub fn validate(&self) -> Result<()> {
        let (m, n, l) = (
            self.num_bs_antennas,
            self.num_jammer_antennas,
            self.pilot_length,
        );
        if m == 0 || n == 0 || l == 0 {
            return Err(Error::Config(format!(
                "M, N and L must be positive (M={m}, N={n}, L={l})"
            )));
        }
        if l > m {
            return Err(Error::Config(format!("pilot length L={l} exceeds M={m}")));
        }
        for (name, db) in [
            ("bs_power_db", self.bs_power_db),
            ("jammer_power_db", self.jammer_power_db),
        ] {
            if db.is_nan() || db == f64::INFINITY {
                return Err(Error::Config(format!(
                    "{name} must be finite or -inf, got {db}"
                )));
            }
        }
        if !(self.noise_variance.is_finite() && self.noise_variance >= 0.0) {
            return Err(Error::Config(format!(
                "noise variance must be finite and >= 0, got {}",
                self.noise_variance
            )));
        }
        for (name, r) in [("r_h", self.r_h), ("r_g", self.jammer_correlation())] {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::Config(format!("{name}={r} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

/// Estimate, error and squared error of one training realization.
#[derive(Clone, Debug)]
pub struct EstimationOutcome {
    pub estimate: ComplexVector,
    pub error: ComplexVector,
    pub squared_error: f64,
}

impl EstimationOutcome {
    pub fn new(channel: &ComplexVector, estimate: ComplexVector) -> Self {
        let error = channel - &estimate;
        let squared_error = error.norm_squared();
        Self {
            estimate,
            error,
            squared_error,
        }
    }
}

/// Sample mean of `‖ε‖²/M` with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    /// Zero when only one trial was run.
    pub std_err: f64,
    pub trials: usize,
}

fn select_pilots(r_h: &ChannelCovariance, l: usize, design: PilotDesign) -> Result<PilotMatrix> {
    let m = r_h.dim();
    if l == 0 || l > m {
        return Err(Error::Dimension(format!(
            "pilot length L={l} must satisfy 1 <= L <= M={m}"
        )));
    }
    let evd = r_h.evd();
    let cols = match design {
        PilotDesign::WorstCase => evd.trailing(l),
        _ => evd.leading(l),
    };
    PilotMatrix::new(cols, design)
}

/// `Φ_opt = U_h(1:L)`: eigenvectors of the `L` largest eigenvalues of `R_h`.
pub fn optimal_pilots(r_h: &ChannelCovariance, l: usize) -> Result<PilotMatrix> {
    select_pilots(r_h, l, PilotDesign::Optimal)
}

/// `Φ_c = U_h(M−L+1:M)`: eigenvectors of the `L` smallest eigenvalues.
pub fn worst_case_pilots(r_h: &ChannelCovariance, l: usize) -> Result<PilotMatrix> {
    select_pilots(r_h, l, PilotDesign::WorstCase)
}

/// Haar-distributed pilots over `{Φ : ΦᴴΦ = I_L}`.
pub fn random_unitary_pilots<R: Rng + ?Sized>(
    m: usize,
    l: usize,
    rng: &mut R,
) -> Result<PilotMatrix> {
    let frame = random_orthonormal_frame(m, l, rng)?;
    PilotMatrix::new(frame, PilotDesign::RandomUnitary)
}

/// Builds the pilot matrix for `design`. `seed` is only read for random
/// pilots.
pub fn design_pilots(
    design: PilotDesign,
    r_h: &ChannelCovariance,
    l: usize,
    seed: u64,
) -> Result<PilotMatrix> {
    match design {
        PilotDesign::RandomUnitary => {
            random_unitary_pilots(r_h.dim(), l, &mut rng_for(seed, &[0x70_11_07]))
        }
        _ => select_pilots(r_h, l, design),
    }
}

fn check_dims(
    pilots: &PilotMatrix,
    jamming: Option<&JammingMatrix>,
    r_h: &ChannelCovariance,
    r_g: &ChannelCovariance,
) -> Result<()> {
    let (m, l) = (pilots.num_antennas(), pilots.len());
    if r_h.dim() != m {
        return Err(Error::Dimension(format!(
            "R_h is {0}x{0} but pilots have M={m}",
            r_h.dim()
        )));
    }
    if let Some(z) = jamming {
        if z.len() != l {
            return Err(Error::Dimension(format!(
                "jamming block has {} symbols, pilots have L={l}",
                z.len()
            )));
        }
        if r_g.dim() != z.num_antennas() {
            return Err(Error::Dimension(format!(
                "R_g is {0}x{0} but the jammer has N={1}",
                r_g.dim(),
                z.num_antennas()
            )));
        }
    }
    Ok(())
}

/// `y = √(L·P_b)·Φᴴh + √(L·P_j)·Zᴴg + w` with `w ~ CN(0, σ²I_L)`. The
/// jammer term is dropped when `jamming` is `None`; `g` is then ignored.
pub fn received_signal<R: Rng + ?Sized>(
    pilots: &PilotMatrix,
    jamming: Option<&JammingMatrix>,
    h: &ComplexVector,
    g: &ComplexVector,
    cfg: &TrainingConfig,
    rng: &mut R,
) -> Result<ComplexVector> {
    let l = pilots.len();
    if h.len() != pilots.num_antennas() {
        return Err(Error::Dimension(format!(
            "h has {} entries, pilots have M={}",
            h.len(),
            pilots.num_antennas()
        )));
    }
    let lf = l as f64;
    let mut y = pilots.matrix().ad_mul(h) * C64::from((lf * cfg.bs_power()).sqrt());
    if let Some(z) = jamming {
        if z.len() != l || g.len() != z.num_antennas() {
            return Err(Error::Dimension(format!(
                "jammer block {}x{} incompatible with g of length {} and L={l}",
                z.num_antennas(),
                z.len(),
                g.len()
            )));
        }
        y += z.matrix().ad_mul(g) * C64::from((lf * cfg.jammer_power()).sqrt());
    }
    if cfg.noise_variance > 0.0 {
        y += standard_complex_normal(l, rng) * C64::from(cfg.noise_variance.sqrt());
    }
    Ok(y)
}

/// `C_hy = √(L·P_b)·R_hΦ`.
fn cross_covariance(
    pilots: &PilotMatrix,
    r_h: &ChannelCovariance,
    cfg: &TrainingConfig,
) -> ComplexMatrix {
    let lf = pilots.len() as f64;
    (r_h.matrix() * pilots.matrix()) * C64::from((lf * cfg.bs_power()).sqrt())
}

/// `C_yy = L·P_b·ΦᴴR_hΦ + L·P_j·ZᴴR_gZ + σ²I_L`, the jammer term included
/// only when `jamming` is given.
fn observation_covariance(
    pilots: &PilotMatrix,
    jamming: Option<&JammingMatrix>,
    r_h: &ChannelCovariance,
    r_g: &ChannelCovariance,
    cfg: &TrainingConfig,
) -> ComplexMatrix {
    let l = pilots.len();
    let lf = l as f64;
    let phi = pilots.matrix();
    let mut c = phi.ad_mul(&(r_h.matrix() * phi)) * C64::from(lf * cfg.bs_power());
    if let Some(z) = jamming {
        let zm = z.matrix();
        c += zm.ad_mul(&(r_g.matrix() * zm)) * C64::from(lf * cfg.jammer_power());
    }
    for i in 0..l {
        c[(i, i)] += C64::from(cfg.noise_variance);
    }
    hermitian_part(&c)
}

/// Covariance of the MMSE estimate,
/// `ψ = R_hΦ (ΦᴴR_hΦ + (P_j/P_b)ZᴴR_gZ + σ²/(L·P_b)·I)⁻¹ ΦᴴR_h`,
/// evaluated as `C_hy C_yy⁻¹ C_hyᴴ` through a Cholesky solve.
pub fn error_covariance_psi(
    pilots: &PilotMatrix,
    jamming: Option<&JammingMatrix>,
    r_h: &ChannelCovariance,
    r_g: &ChannelCovariance,
    cfg: &TrainingConfig,
) -> Result<ComplexMatrix> {
    check_dims(pilots, jamming, r_h, r_g)?;
    let c_hy = cross_covariance(pilots, r_h, cfg);
    let c_yy = observation_covariance(pilots, jamming, r_h, r_g, cfg);
    let x = solve_hpd(&c_yy, &c_hy.adjoint())?;
    let psi = hermitian_part(&(&c_hy * x));
    linalg::ensure_finite(&psi, "error_covariance_psi")?;
    Ok(psi)
}

/// `tr(R_h − ψ) / M`.
pub fn closed_form_mse(psi: &ComplexMatrix, r_h: &ChannelCovariance) -> Result<f64> {
    let m = r_h.dim();
    if psi.nrows() != m || psi.ncols() != m {
        return Err(Error::Dimension(format!(
            "psi is {}x{}, R_h is {m}x{m}",
            psi.nrows(),
            psi.ncols()
        )));
    }
    let mse = (r_h.trace() - linalg::trace_re(psi)) / m as f64;
    if mse < -tolerances::MSE_NEGATIVE {
        return Err(Error::Consistency(format!("negative MSE {mse:.3e}")));
    }
    Ok(mse.max(0.0))
}

/// Smallest eigenvalue of `R_h − ψ`, the estimation error covariance.
pub fn error_covariance_min_eigenvalue(
    psi: &ComplexMatrix,
    r_h: &ChannelCovariance,
) -> Result<f64> {
    Ok(hermitian_evd(&hermitian_part(&(r_h.matrix() - psi)))?.min_eigenvalue())
}

/// The linear estimator `W` with `ĥ = W y`. In jammer-unaware mode the
/// jamming term is left out of `C_yy`.
pub fn estimator_matrix(
    pilots: &PilotMatrix,
    jamming: Option<&JammingMatrix>,
    r_h: &ChannelCovariance,
    r_g: &ChannelCovariance,
    cfg: &TrainingConfig,
    mode: EstimatorMode,
) -> Result<ComplexMatrix> {
    check_dims(pilots, jamming, r_h, r_g)?;
    let assumed = match mode {
        EstimatorMode::JammerAware => jamming,
        EstimatorMode::JammerUnaware => None,
    };
    let c_hy = cross_covariance(pilots, r_h, cfg);
    let c_yy = observation_covariance(pilots, assumed, r_h, r_g, cfg);
    // W = C_hy C_yy⁻¹  ⇔  Wᴴ = C_yy⁻¹ C_hyᴴ
    Ok(solve_hpd(&c_yy, &c_hy.adjoint())?.adjoint())
}

/// `ĥ = C_hy C_yy⁻¹ y`.
pub fn mmse_estimate(
    y: &ComplexVector,
    pilots: &PilotMatrix,
    jamming: Option<&JammingMatrix>,
    r_h: &ChannelCovariance,
    r_g: &ChannelCovariance,
    cfg: &TrainingConfig,
    mode: EstimatorMode,
) -> Result<ComplexVector> {
    if y.len() != pilots.len() {
        return Err(Error::Dimension(format!(
            "y has {} entries, pilots have L={}",
            y.len(),
            pilots.len()
        )));
    }
    Ok(estimator_matrix(pilots, jamming, r_h, r_g, cfg, mode)? * y)
}

/// Exact per-antenna MSE of an arbitrary linear estimator `ĥ = W y` against
/// the true signal model:
/// `tr(R_h − W C_hyᴴ − C_hy Wᴴ + W C_yy Wᴴ) / M`.
pub fn linear_estimator_mse(
    estimator: &ComplexMatrix,
    pilots: &PilotMatrix,
    jamming: Option<&JammingMatrix>,
    r_h: &ChannelCovariance,
    r_g: &ChannelCovariance,
    cfg: &TrainingConfig,
) -> Result<f64> {
    check_dims(pilots, jamming, r_h, r_g)?;
    let c_hy = cross_covariance(pilots, r_h, cfg);
    let c_yy = observation_covariance(pilots, jamming, r_h, r_g, cfg);
    let cross = linalg::trace_re(&(estimator * c_hy.adjoint()));
    let quad = linalg::trace_re(&(estimator * c_yy * estimator.adjoint()));
    let m = r_h.dim() as f64;
    Ok(((r_h.trace() - 2.0 * cross + quad) / m).max(0.0))
}

/// Closed-form MSE of the scenario. Jammer-aware mode is `tr(R_h − ψ)/M`;
/// jammer-unaware mode evaluates the mismatched estimator exactly.
pub fn scenario_mse(
    pilots: &PilotMatrix,
    jamming: Option<&JammingMatrix>,
    r_h: &ChannelCovariance,
    r_g: &ChannelCovariance,
    cfg: &TrainingConfig,
    mode: EstimatorMode,
) -> Result<f64> {
    match mode {
        EstimatorMode::JammerAware => {
            let psi = error_covariance_psi(pilots, jamming, r_h, r_g, cfg)?;
            closed_form_mse(&psi, r_h)
        }
        EstimatorMode::JammerUnaware => {
            let w = estimator_matrix(pilots, jamming, r_h, r_g, cfg, mode)?;
            linear_estimator_mse(&w, pilots, jamming, r_h, r_g, cfg)
        }
    }
}

/// Neumaier-compensated sum.
pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0_f64;
    let mut c = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// Runs `f(trial)` for every trial index, in parallel when enabled. The
/// output order is the trial order regardless of thread count.
pub(crate) fn map_trials<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..count).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).map(f).collect()
    }
}

/// Monte-Carlo MSE: the mean of `‖h − ĥ‖²/M` over independent draws of
/// `h`, `g` and `w`. Trial `t` uses a stream derived from `(seed, t)`.
#[allow(clippy::too_many_arguments)]
pub fn empirical_mse(
    cfg: &TrainingConfig,
    pilots: &PilotMatrix,
    jamming: Option<&JammingMatrix>,
    r_h: &ChannelCovariance,
    r_g: &ChannelCovariance,
    mode: EstimatorMode,
    trials: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if trials == 0 {
        return Err(Error::Config("Monte-Carlo needs at least one trial".into()));
    }
    let w = estimator_matrix(pilots, jamming, r_h, r_g, cfg, mode)?;
    let m = r_h.dim() as f64;
    let empty = ComplexVector::zeros(0);

    let per_trial: Vec<f64> = map_trials(trials, |t| {
        let mut rng = rng_for(seed, &[t as u64]);
        let h = crate::channel::sample_channel(r_h, &mut rng);
        let g = match jamming {
            Some(_) => crate::channel::sample_channel(r_g, &mut rng),
            None => empty.clone(),
        };
        let y = received_signal(pilots, jamming, &h, &g, cfg, &mut rng)
            .expect("dimensions checked by estimator_matrix");
        EstimationOutcome::new(&h, &w * y).squared_error / m
    });

    let n = trials as f64;
    let mean = compensated_sum(per_trial.iter().copied()) / n;
    let std_err = if trials > 1 {
        let ss = compensated_sum(per_trial.iter().map(|v| (v - mean) * (v - mean)));
        (ss / (n - 1.0) / n).sqrt()
    } else {
        0.0
    };
    Ok(MonteCarloEstimate {
        mean,
        std_err,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{exponential_covariance, CorrelationSpec};
    use crate::jammer::{optimal_jamming, single_shot_jamming};

    fn cov(m: usize, r: f64) -> ChannelCovariance {
        exponential_covariance(CorrelationSpec::new(m, r).unwrap()).unwrap()
    }

    fn cfg(m: usize, n: usize, l: usize, pb: f64, pj: f64, r: f64) -> TrainingConfig {
        TrainingConfig::new(m, n, l, pb, pj, r)
    }

    #[test]
    fn optimal_pilots_identity_covariance() {
        let p = optimal_pilots(&cov(5, 0.0), 2).unwrap();
        assert_eq!(
            p.matrix(),
            &ComplexMatrix::identity(5, 5).columns(0, 2).into_owned()
        );
        let w = worst_case_pilots(&cov(5, 0.0), 2).unwrap();
        assert_eq!(
            w.matrix(),
            &ComplexMatrix::identity(5, 5).columns(3, 2).into_owned()
        );
    }

    #[test]
    fn two_antenna_pilots() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let r = cov(2, 0.5);
        let opt = optimal_pilots(&r, 1).unwrap();
        let worst = worst_case_pilots(&r, 1).unwrap();
        // up to phase, which the EVD pins to a positive first entry
        assert!((opt.matrix()[(0, 0)] - C64::from(s)).norm() < 1e-12);
        assert!((opt.matrix()[(1, 0)] - C64::from(s)).norm() < 1e-12);
        assert!((worst.matrix()[(0, 0)] - C64::from(s)).norm() < 1e-12);
        assert!((worst.matrix()[(1, 0)] + C64::from(s)).norm() < 1e-12);
    }

    #[test]
    fn pilots_reject_too_long() {
        assert!(matches!(
            optimal_pilots(&cov(3, 0.5), 4),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            worst_case_pilots(&cov(3, 0.5), 0),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn optimal_pilots_diagonalize() {
        let r = cov(8, 0.7);
        let p = optimal_pilots(&r, 3).unwrap();
        let d = p.matrix().ad_mul(&(r.matrix() * p.matrix()));
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { r.eigenvalues()[i] } else { 0.0 };
                assert!((d[(i, j)] - C64::from(expected)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn worst_case_is_worse_than_optimal() {
        let r = cov(8, 0.7);
        let c = cfg(8, 8, 3, 5.0, 5.0, 0.7);
        let opt = optimal_pilots(&r, 3).unwrap();
        let worst = worst_case_pilots(&r, 3).unwrap();
        let m_opt = scenario_mse(&opt, None, &r, &r, &c, EstimatorMode::JammerAware).unwrap();
        let m_worst = scenario_mse(&worst, None, &r, &r, &c, EstimatorMode::JammerAware).unwrap();
        assert!(m_worst >= m_opt, "{m_worst} < {m_opt}");
    }

    #[test]
    fn random_pilots_square_unitary() {
        let mut rng = rng_for(9, &[]);
        let p = random_unitary_pilots(4, 4, &mut rng).unwrap();
        let u = p.matrix();
        assert!((u * u.adjoint() - ComplexMatrix::identity(4, 4)).norm() < 1e-10);
    }

    #[test]
    fn random_pilots_sandwiched() {
        let r = cov(16, 0.7);
        let c = cfg(16, 4, 4, 5.0, 5.0, 0.7);
        let mse = |p: &PilotMatrix| {
            scenario_mse(p, None, &r, &r, &c, EstimatorMode::JammerAware).unwrap()
        };
        let lo = mse(&optimal_pilots(&r, 4).unwrap());
        let hi = mse(&worst_case_pilots(&r, 4).unwrap());
        let mut rng = rng_for(10, &[]);
        let avg = (0..200)
            .map(|_| mse(&random_unitary_pilots(16, 4, &mut rng).unwrap()))
            .sum::<f64>()
            / 200.0;
        assert!(lo < avg && avg < hi, "{lo} {avg} {hi}");
    }

    #[test]
    fn received_signal_all_off() {
        let r = cov(4, 0.3);
        let mut c = cfg(4, 2, 2, f64::NEG_INFINITY, f64::NEG_INFINITY, 0.3);
        c.noise_variance = 0.0;
        let p = optimal_pilots(&r, 2).unwrap();
        let z = single_shot_jamming(2, 2).unwrap();
        let mut rng = rng_for(1, &[]);
        let h = crate::channel::sample_channel(&r, &mut rng);
        let g = crate::channel::sample_channel(&cov(2, 0.3), &mut rng);
        let y = received_signal(&p, Some(&z), &h, &g, &c, &mut rng).unwrap();
        assert_eq!(y.norm(), 0.0);
    }

    #[test]
    fn received_signal_noiseless_no_jammer() {
        let r = cov(4, 0.3);
        let mut c = cfg(4, 2, 2, 5.0, 5.0, 0.3);
        c.noise_variance = 0.0;
        let p = optimal_pilots(&r, 2).unwrap();
        let mut rng = rng_for(2, &[]);
        let h = crate::channel::sample_channel(&r, &mut rng);
        let y = received_signal(&p, None, &h, &ComplexVector::zeros(0), &c, &mut rng).unwrap();
        let expected = p.matrix().ad_mul(&h) * C64::from((2.0 * c.bs_power()).sqrt());
        assert_eq!(y, expected);
    }

    #[test]
    fn received_signal_dimension_errors() {
        let r = cov(4, 0.3);
        let c = cfg(4, 2, 2, 5.0, 5.0, 0.3);
        let p = optimal_pilots(&r, 2).unwrap();
        let mut rng = rng_for(3, &[]);
        let short = ComplexVector::zeros(3);
        assert!(received_signal(&p, None, &short, &short, &c, &mut rng).is_err());
        let z = single_shot_jamming(3, 2).unwrap();
        let h = ComplexVector::zeros(4);
        assert!(received_signal(&p, Some(&z), &h, &ComplexVector::zeros(2), &c, &mut rng).is_err());
    }

    #[test]
    fn psi_identity_closed_form() {
        let m = 6;
        let l = 3;
        let r = cov(m, 0.0);
        let c = cfg(m, 3, l, 2.0, 0.0, 0.0);
        let mut rng = rng_for(4, &[]);
        let p = random_unitary_pilots(m, l, &mut rng).unwrap();
        let psi = error_covariance_psi(&p, None, &r, &r, &c).unwrap();
        let lp = l as f64 * c.bs_power();
        let gain = lp / (lp + 1.0);
        let expected = p.matrix() * p.matrix().adjoint() * C64::from(gain);
        assert!((&psi - expected).norm() < 1e-12);
        assert!((linalg::trace_re(&psi) - l as f64 * gain).abs() < 1e-12);
    }

    #[test]
    fn psi_vanishes_in_noise() {
        let r = cov(8, 0.7);
        let mut c = cfg(8, 4, 2, 0.0, 0.0, 0.7);
        c.noise_variance = 1e8;
        let p = optimal_pilots(&r, 2).unwrap();
        let psi = error_covariance_psi(&p, None, &r, &r, &c).unwrap();
        assert!(linalg::trace_re(&psi) <= 1e-6);
    }

    #[test]
    fn mse_extremes() {
        let r = cov(5, 0.6);
        assert!((closed_form_mse(&ComplexMatrix::zeros(5, 5), &r).unwrap() - 1.0).abs() < 1e-15);
        assert!(closed_form_mse(r.matrix(), &r).unwrap().abs() < 1e-15);
        assert!(matches!(
            closed_form_mse(&ComplexMatrix::zeros(4, 4), &r),
            Err(Error::Dimension(_))
        ));
        let too_big = r.matrix() * C64::from(2.0);
        assert!(matches!(
            closed_form_mse(&too_big, &r),
            Err(Error::Consistency(_))
        ));
    }

    #[test]
    fn mse_identity_analytic() {
        let r = cov(4, 0.0);
        let c = cfg(4, 1, 2, 0.0, 0.0, 0.0);
        let p = optimal_pilots(&r, 2).unwrap();
        let mse = scenario_mse(&p, None, &r, &r, &c, EstimatorMode::JammerAware).unwrap();
        assert!((mse - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn estimate_of_zero_is_zero() {
        let r = cov(8, 0.7);
        let c = cfg(8, 4, 4, 5.0, 5.0, 0.7);
        let p = optimal_pilots(&r, 4).unwrap();
        let rg = cov(4, 0.7);
        let z = optimal_jamming(&rg, 4).unwrap();
        let est = mmse_estimate(
            &ComplexVector::zeros(4),
            &p,
            Some(&z),
            &r,
            &rg,
            &c,
            EstimatorMode::JammerAware,
        )
        .unwrap();
        assert_eq!(est.norm(), 0.0);
    }

    #[test]
    fn noiseless_estimate_recovers_channel() {
        let r = cov(6, 0.5);
        let mut c = cfg(6, 2, 6, 5.0, 5.0, 0.5);
        c.noise_variance = 1e-10;
        let p = optimal_pilots(&r, 6).unwrap();
        let mut rng = rng_for(6, &[]);
        for _ in 0..10 {
            let h = crate::channel::sample_channel(&r, &mut rng);
            let y = received_signal(&p, None, &h, &ComplexVector::zeros(0), &c, &mut rng).unwrap();
            let est = mmse_estimate(&y, &p, None, &r, &r, &c, EstimatorMode::JammerAware).unwrap();
            assert!((&est - &h).norm() / h.norm() <= 1e-4);
        }
    }

    #[test]
    fn estimator_mse_routes_agree() {
        // tr(R_h − ψ)/M and the generic linear-estimator formula must agree
        // for the MMSE estimator.
        let r = cov(8, 0.7);
        let rg = cov(4, 0.4);
        let mut c = cfg(8, 4, 4, 5.0, 3.0, 0.7);
        c.r_g = Some(0.4);
        let p = optimal_pilots(&r, 4).unwrap();
        let z = optimal_jamming(&rg, 4).unwrap();
        let a = scenario_mse(&p, Some(&z), &r, &rg, &c, EstimatorMode::JammerAware).unwrap();
        let w = estimator_matrix(&p, Some(&z), &r, &rg, &c, EstimatorMode::JammerAware).unwrap();
        let b = linear_estimator_mse(&w, &p, Some(&z), &r, &rg, &c).unwrap();
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        let unaware =
            scenario_mse(&p, Some(&z), &r, &rg, &c, EstimatorMode::JammerUnaware).unwrap();
        assert!(unaware >= a - 1e-12);
    }

    #[test]
    fn single_trial_noiseless_is_exact() {
        let r = cov(5, 0.5);
        let mut c = cfg(5, 1, 5, 5.0, 5.0, 0.5);
        c.noise_variance = 0.0;
        let p = optimal_pilots(&r, 5).unwrap();
        let est = empirical_mse(&c, &p, None, &r, &r, EstimatorMode::JammerAware, 1, 3).unwrap();
        assert!(est.mean < 1e-20);
        assert_eq!(est.std_err, 0.0);
        assert!(empirical_mse(&c, &p, None, &r, &r, EstimatorMode::JammerAware, 0, 3).is_err());
    }

    #[test]
    fn identity_scenario_monte_carlo() {
        let r = cov(4, 0.0);
        let c = cfg(4, 1, 2, 0.0, 0.0, 0.0);
        let p = optimal_pilots(&r, 2).unwrap();
        let est =
            empirical_mse(&c, &p, None, &r, &r, EstimatorMode::JammerAware, 10_000, 77).unwrap();
        assert!((est.mean - 2.0 / 3.0).abs() <= 3.0 * est.std_err, "{est:?}");
    }

    #[test]
    fn empirical_is_deterministic() {
        let r = cov(6, 0.4);
        let c = cfg(6, 3, 3, 5.0, 5.0, 0.4);
        let p = optimal_pilots(&r, 3).unwrap();
        let z = optimal_jamming(&cov(3, 0.4), 3).unwrap();
        let rg = cov(3, 0.4);
        let a = empirical_mse(
            &c,
            &p,
            Some(&z),
            &r,
            &rg,
            EstimatorMode::JammerAware,
            500,
            8,
        )
        .unwrap();
        let b = empirical_mse(
            &c,
            &p,
            Some(&z),
            &r,
            &rg,
            EstimatorMode::JammerAware,
            500,
            8,
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn config_validation() {
        assert!(cfg(4, 2, 5, 0.0, 0.0, 0.5).validate().is_err());
        assert!(cfg(4, 2, 0, 0.0, 0.0, 0.5).validate().is_err());
        assert!(cfg(4, 2, 2, f64::NAN, 0.0, 0.5).validate().is_err());
        assert!(cfg(4, 2, 2, 0.0, 0.0, 1.5).validate().is_err());
        assert!(cfg(4, 2, 2, 0.0, 0.0, 0.5).validate().is_ok());
    }

    #[test]
    fn compensated_sum_is_accurate() {
        let values = std::iter::once(1e16)
            .chain(std::iter::repeat_n(1.0, 1000))
            .chain(std::iter::once(-1e16));
        assert_eq!(compensated_sum(values), 1000.0);
    }
}
