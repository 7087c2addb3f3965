//! Every numerical tolerance used by the library, in one place.

/// Max absolute entry of `A - Aᴴ` accepted as Hermitian.
pub const HERMITIAN: f64 = 1e-10;

/// Frobenius distance of `XᴴX` from the identity accepted as orthonormal.
pub const ORTHONORMAL: f64 = 1e-10;

/// Relative Frobenius error accepted for `U diag(λ) Uᴴ` against its input.
pub const EVD_RECONSTRUCTION: f64 = 1e-9;

/// Relative residual `‖AX − B‖_F / ‖B‖_F` accepted from an HPD solve.
pub const SOLVE_RESIDUAL: f64 = 1e-10;

/// Eigenvalues in `[-PSD_CLAMP, 0]` are treated as zero; below is an error.
pub const PSD_CLAMP: f64 = 1e-12;

/// Smallest eigenvalue accepted for `R_h − ψ` and similar error covariances.
pub const ERROR_COVARIANCE_PSD: f64 = 1e-9;

/// Unit-diagonal check for correlation-model covariances.
pub const UNIT_DIAGONAL: f64 = 1e-12;

/// An MSE below `-MSE_NEGATIVE` signals an inconsistent ψ.
pub const MSE_NEGATIVE: f64 = 1e-9;

/// Margin by which a sampled jammer must beat the eigen-optimal design
/// before it counts as a counterexample.
pub const LEMMA_MSE_GAP: f64 = 1e-9;

/// Slack on the top-L eigenvalue sum bound for `tr(ZᴴRZ)`.
pub const KY_FAN: f64 = 1e-9;

/// Pivot-magnitude ratio below which QR orthonormalization is rank deficient.
pub const RANK_DEFICIENT: f64 = 1e-10;
