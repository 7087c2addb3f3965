//! Dense complex linear algebra shared by every other module.

use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::channel::ChannelCovariance;
use crate::error::{Error, Result};
use crate::tolerances;

pub type C64 = Complex<f64>;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are sorted in descending order and column `i` of
/// `eigenvectors` belongs to `eigenvalues[i]`. Each eigenvector is scaled so
/// that its first largest-magnitude entry is real and positive, which makes
/// the decomposition reproducible bit for bit.
#[derive(Clone, Debug)]
pub struct HermitianEvd {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEvd {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `U diag(λ) Uᴴ`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut scaled = self.eigenvectors.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            scaled.column_mut(j).scale_mut(lambda);
        }
        &scaled * self.eigenvectors.adjoint()
    }

    /// Eigenvectors of the `count` largest eigenvalues.
    pub fn leading(&self, count: usize) -> ComplexMatrix {
        self.eigenvectors.columns(0, count).into_owned()
    }

    /// Eigenvectors of the `count` smallest eigenvalues, in descending
    /// eigenvalue order.
    pub fn trailing(&self, count: usize) -> ComplexMatrix {
        let n = self.dim();
        self.eigenvectors.columns(n - count, count).into_owned()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }
}

pub fn ensure_finite(m: &ComplexMatrix, op: &'static str) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(op))
    }
}

/// Largest `|a_ij − conj(a_ji)|`.
pub fn max_asymmetry(a: &ComplexMatrix) -> f64 {
    let n = a.nrows().min(a.ncols());
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

fn check_hermitian(a: &ComplexMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "expected a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let asymmetry = max_asymmetry(a);
    if asymmetry > tolerances::HERMITIAN {
        return Err(Error::NotHermitian { asymmetry });
    }
    Ok(())
}

/// `(A + Aᴴ) / 2`.
pub fn hermitian_part(a: &ComplexMatrix) -> ComplexMatrix {
    (a + a.adjoint()).scale(0.5)
}

pub fn trace_re(a: &ComplexMatrix) -> f64 {
    a.diagonal().iter().map(|z| z.re).sum()
}

/// `‖XᴴX − I‖_F`.
pub fn orthonormality_error(x: &ComplexMatrix) -> f64 {
    let gram = x.adjoint() * x;
    (gram - ComplexMatrix::identity(x.ncols(), x.ncols())).norm()
}

pub fn hermitian_evd(a: &ComplexMatrix) -> Result<HermitianEvd> {
    check_hermitian(a)?;
    ensure_finite(a, "hermitian_evd")?;
    let n = a.nrows();
    if n == 0 {
        return Err(Error::Dimension("empty matrix".into()));
    }

    let eig = hermitian_part(a).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort: equal eigenvalues keep the solver's column order.
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));

    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).into_owned();
        col.normalize_mut();
        fix_phase(&mut col);
        eigenvectors.set_column(dst, &col);
    }

    Ok(HermitianEvd {
        eigenvalues,
        eigenvectors,
    })
}

/// Rotates `v` so its first (within rounding) largest-magnitude entry is
/// real and positive.
fn fix_phase(v: &mut ComplexVector) {
    let max_mag = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max_mag == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .position(|z| z.norm() >= max_mag * (1.0 - 1e-9))
        .expect("max exists");
    let phase = v[pivot] / v[pivot].norm();
    for z in v.iter_mut() {
        *z *= phase.conj();
    }
    v[pivot] = C64::new(v[pivot].norm(), 0.0);
}

fn relative_residual(a: &ComplexMatrix, x: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let bn = b.norm();
    let r = (a * x - b).norm();
    if bn == 0.0 {
        r
    } else {
        r / bn
    }
}

/// Solves `A X = B` for Hermitian positive definite `A` via Cholesky.
pub fn solve_hpd(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_hermitian(a)?;
    if b.nrows() != a.nrows() {
        return Err(Error::Dimension(format!(
            "solve_hpd: A is {0}x{0} but B has {1} rows",
            a.nrows(),
            b.nrows()
        )));
    }
    ensure_finite(a, "solve_hpd")?;
    ensure_finite(b, "solve_hpd")?;

    let a = hermitian_part(a);
    let chol = a
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Singular("Cholesky factorization failed".into()))?;
    let mut x = chol.solve(b);

    let mut residual = relative_residual(&a, &x, b);
    if residual > tolerances::SOLVE_RESIDUAL {
        // one step of iterative refinement
        let correction = chol.solve(&(b - &a * &x));
        x += correction;
        residual = relative_residual(&a, &x, b);
    }
    ensure_finite(&x, "solve_hpd")?;
    if residual > tolerances::SOLVE_RESIDUAL {
        return Err(Error::Singular(format!(
            "HPD solve residual {residual:.3e} exceeds {:.0e}",
            tolerances::SOLVE_RESIDUAL
        )));
    }
    Ok(x)
}

/// Columns `U_i √λ_i`, so that `F Fᴴ = A`. Eigenvalues slightly below zero
/// are clamped; anything below `-PSD_CLAMP` is rejected.
pub fn psd_sqrt_factor(evd: &HermitianEvd) -> Result<ComplexMatrix> {
    let min = evd.min_eigenvalue();
    if min < -tolerances::PSD_CLAMP {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
        });
    }
    let mut factor = evd.eigenvectors.clone();
    for (j, &lambda) in evd.eigenvalues.iter().enumerate() {
        factor.column_mut(j).scale_mut(lambda.max(0.0).sqrt());
    }
    Ok(factor)
}

/// `n` i.i.d. CN(0, 1) entries: real and imaginary parts independent, each
/// N(0, 1/2).
pub fn standard_complex_normal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexVector::from_fn(n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(s * re, s * im)
    })
}

/// Draws `v ~ CN(0, cov)` as `U diag(√λ) e` with `e ~ CN(0, I)`.
pub fn sample_complex_gaussian<R: Rng + ?Sized>(
    cov: &ChannelCovariance,
    rng: &mut R,
) -> ComplexVector {
    let factor = cov.sqrt_factor();
    let e = standard_complex_normal(factor.ncols(), rng);
    factor * e
}

const MAX_ORTHONORMALIZE_RETRIES: usize = 3;

/// A `rows × cols` matrix with orthonormal columns, Haar distributed: the
/// QR factor of an i.i.d. CN(0, 1) matrix with the phases of `diag(R)`
/// folded back into `Q`.
pub fn random_orthonormal_frame<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    rng: &mut R,
) -> Result<ComplexMatrix> {
    if cols == 0 || cols > rows {
        return Err(Error::Dimension(format!(
            "orthonormal frame needs 1 <= cols <= rows, got {rows}x{cols}"
        )));
    }
    for _ in 0..=MAX_ORTHONORMALIZE_RETRIES {
        let draws = standard_complex_normal(rows * cols, rng);
        let g = ComplexMatrix::from_column_slice(rows, cols, draws.as_slice());
        let scale = g.norm();
        let qr = g.qr();
        let r = qr.r();
        let mut q = qr.q();
        let rank_ok = (0..cols).all(|j| r[(j, j)].norm() > tolerances::RANK_DEFICIENT * scale);
        if !rank_ok {
            continue;
        }
        for j in 0..cols {
            let phase = r[(j, j)] / r[(j, j)].norm();
            for z in q.column_mut(j).iter_mut() {
                *z *= phase;
            }
        }
        return Ok(q);
    }
    Err(Error::Singular(
        "random frame rank deficient after retries".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_for;

    fn real(rows: usize, cols: usize, data: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_row_slice(
            rows,
            cols,
            &data.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>(),
        )
    }

    #[test]
    fn evd_identity() {
        let evd = hermitian_evd(&ComplexMatrix::identity(3, 3)).unwrap();
        assert_eq!(evd.eigenvalues, vec![1.0, 1.0, 1.0]);
        assert!((evd.reconstruct() - ComplexMatrix::identity(3, 3)).norm() < 1e-12);
        assert!(orthonormality_error(&evd.eigenvectors) < 1e-12);
    }

    #[test]
    fn evd_two_by_two() {
        let evd = hermitian_evd(&real(2, 2, &[1.0, 0.5, 0.5, 1.0])).unwrap();
        assert!((evd.eigenvalues[0] - 1.5).abs() < 1e-14);
        assert!((evd.eigenvalues[1] - 0.5).abs() < 1e-14);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let u = &evd.eigenvectors;
        assert!((u[(0, 0)] - C64::new(s, 0.0)).norm() < 1e-12);
        assert!((u[(1, 0)] - C64::new(s, 0.0)).norm() < 1e-12);
        assert!((u[(0, 1)] - C64::new(s, 0.0)).norm() < 1e-12);
        assert!((u[(1, 1)] + C64::new(s, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn evd_complex_hermitian() {
        let a = ComplexMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(2.0, 0.0),
                C64::new(0.0, 1.0),
                C64::new(0.0, -1.0),
                C64::new(2.0, 0.0),
            ],
        );
        let evd = hermitian_evd(&a).unwrap();
        assert!((evd.eigenvalues[0] - 3.0).abs() < 1e-12);
        assert!((evd.eigenvalues[1] - 1.0).abs() < 1e-12);
        assert!((evd.reconstruct() - &a).norm() < 1e-12);
    }

    #[test]
    fn evd_rejects_bad_input() {
        assert!(matches!(
            hermitian_evd(&ComplexMatrix::zeros(2, 3)),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            hermitian_evd(&real(2, 2, &[1.0, 0.2, 0.3, 1.0])),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn solve_identity_and_scalar() {
        let mut rng = rng_for(1, &[]);
        let b =
            ComplexMatrix::from_column_slice(3, 2, standard_complex_normal(6, &mut rng).as_slice());
        let x = solve_hpd(&ComplexMatrix::identity(3, 3), &b).unwrap();
        assert!((x - &b).norm() < 1e-15);

        let two = ComplexMatrix::identity(3, 3).scale(2.0);
        let x = solve_hpd(&two, &ComplexMatrix::identity(3, 3)).unwrap();
        assert!((x - ComplexMatrix::identity(3, 3).scale(0.5)).norm() < 1e-15);
    }

    #[test]
    fn solve_random_hpd_residual() {
        let mut rng = rng_for(2, &[]);
        for _ in 0..20 {
            let m = ComplexMatrix::from_column_slice(
                5,
                5,
                standard_complex_normal(25, &mut rng).as_slice(),
            );
            let a = m.adjoint() * &m + ComplexMatrix::identity(5, 5);
            let b = ComplexMatrix::from_column_slice(
                5,
                3,
                standard_complex_normal(15, &mut rng).as_slice(),
            );
            let x = solve_hpd(&a, &b).unwrap();
            assert!((&a * &x - &b).norm() / b.norm() <= 1e-10);
        }
    }

    #[test]
    fn solve_rejects_indefinite() {
        let a = real(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        let b = ComplexMatrix::identity(2, 2);
        assert!(matches!(solve_hpd(&a, &b), Err(Error::Singular(_))));
        assert!(matches!(
            solve_hpd(&a, &ComplexMatrix::identity(3, 3)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn sqrt_factor_rejects_negative() {
        let evd = hermitian_evd(&real(2, 2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
        assert!(matches!(psd_sqrt_factor(&evd), Err(Error::NotPsd { .. })));
        let tiny = hermitian_evd(&real(2, 2, &[1.0, 0.0, 0.0, -1e-13])).unwrap();
        let f = psd_sqrt_factor(&tiny).unwrap();
        assert_eq!(f.column(1).norm(), 0.0);
    }

    #[test]
    fn random_frames_are_orthonormal() {
        let mut rng = rng_for(3, &[]);
        for _ in 0..100 {
            let q = random_orthonormal_frame(7, 4, &mut rng).unwrap();
            assert!(orthonormality_error(&q) < 1e-10);
        }
        let sq = random_orthonormal_frame(5, 5, &mut rng).unwrap();
        assert!((&sq * sq.adjoint() - ComplexMatrix::identity(5, 5)).norm() < 1e-10);
        assert!(random_orthonormal_frame(3, 4, &mut rng).is_err());
        assert!(random_orthonormal_frame(3, 0, &mut rng).is_err());
    }
}
