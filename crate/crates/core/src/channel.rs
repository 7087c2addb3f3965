//! Spatial-correlation models for the BS–UE and jammer–UE channels.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    self, hermitian_evd, psd_sqrt_factor, ComplexMatrix, ComplexVector, HermitianEvd, C64,
};
use crate::tolerances;

/// Antenna count and correlation coefficient of one exponential model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationSpec {
    pub size: usize,
    pub coefficient: f64,
}

impl CorrelationSpec {
    pub fn new(size: usize, coefficient: f64) -> Result<Self> {
        let spec = Self { size, coefficient };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.size == 0 {
            return Err(Error::Domain("covariance size must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.coefficient) {
            return Err(Error::Domain(format!(
                "correlation coefficient {} outside [0, 1]",
                self.coefficient
            )));
        }
        Ok(())
    }
}

/// A Hermitian PSD channel covariance with its eigendecomposition and PSD
/// square root computed once at construction.
#[derive(Clone, Debug)]
pub struct ChannelCovariance {
    matrix: ComplexMatrix,
    evd: HermitianEvd,
    sqrt_factor: ComplexMatrix,
    degenerate: bool,
}

impl ChannelCovariance {
    /// Wraps an arbitrary Hermitian PSD matrix.
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        let evd = hermitian_evd(&matrix)?;
        let sqrt_factor = psd_sqrt_factor(&evd)?;
        let scale = matrix.norm().max(1.0);
        let err = (evd.reconstruct() - &matrix).norm() / scale;
        if err > tolerances::EVD_RECONSTRUCTION {
            return Err(Error::Consistency(format!(
                "covariance EVD reconstruction error {err:.3e}"
            )));
        }
        let degenerate = evd.min_eigenvalue() <= tolerances::PSD_CLAMP;
        Ok(Self {
            matrix,
            evd,
            sqrt_factor,
            degenerate,
        })
    }

    pub fn identity(size: usize) -> Result<Self> {
        exponential_covariance(CorrelationSpec::new(size, 0.0)?)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn evd(&self) -> &HermitianEvd {
        &self.evd
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.evd.eigenvalues
    }

    /// `F` with `F Fᴴ = R`, used for sampling.
    pub fn sqrt_factor(&self) -> &ComplexMatrix {
        &self.sqrt_factor
    }

    /// Set when the matrix is singular (e.g. `r = 1`, the all-ones matrix).
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn trace(&self) -> f64 {
        linalg::trace_re(&self.matrix)
    }

    pub fn has_unit_diagonal(&self) -> bool {
        self.matrix
            .diagonal()
            .iter()
            .all(|d| (d - C64::new(1.0, 0.0)).norm() <= tolerances::UNIT_DIAGONAL)
    }
}

/// `R_ij = r^|i−j|`.
pub fn exponential_covariance(spec: CorrelationSpec) -> Result<ChannelCovariance> {
    spec.validate()?;
    let r = spec.coefficient;
    let matrix = ComplexMatrix::from_fn(spec.size, spec.size, |i, j| {
        C64::new(r.powi(i.abs_diff(j) as i32), 0.0)
    });
    ChannelCovariance::from_matrix(matrix)
}

/// One realization `h ~ CN(0, R)`.
pub fn sample_channel<R: Rng + ?Sized>(cov: &ChannelCovariance, rng: &mut R) -> ComplexVector {
    linalg::sample_complex_gaussian(cov, rng)
}
