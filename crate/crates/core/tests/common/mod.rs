//! Independent oracles shared by the integration tests. Nothing here calls
//! into the library's eigen or solve routines.
#![allow(dead_code)]

use fddjam::channel::{exponential_covariance, ChannelCovariance, CorrelationSpec};
use fddjam::linalg::{ComplexMatrix, C64};

pub fn cov(size: usize, r: f64) -> ChannelCovariance {
    exponential_covariance(CorrelationSpec::new(size, r).unwrap()).unwrap()
}

/// `r^|i−j|` built directly as a real matrix.
pub fn exponential_real(size: usize, r: f64) -> Vec<Vec<f64>> {
    (0..size)
        .map(|i| (0..size).map(|j| r.powi(i.abs_diff(j) as i32)).collect())
        .collect()
}

/// Cyclic Jacobi eigenvalue iteration for a real symmetric matrix, sorted
/// descending.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

/// `tr(ψ)` straight from the normalized expression
/// `R_hΦ (ΦᴴR_hΦ + (P_j/P_b)ZᴴR_gZ + σ²/(L·P_b)·I)⁻¹ ΦᴴR_h`
/// with an explicit LU inverse.
pub fn psi_trace_explicit_inverse(
    r_h: &ComplexMatrix,
    phi: &ComplexMatrix,
    r_g: &ComplexMatrix,
    z: Option<&ComplexMatrix>,
    pb: f64,
    pj: f64,
    sigma2: f64,
) -> f64 {
    let l = phi.ncols();
    let mut inner = phi.adjoint() * r_h * phi;
    if let Some(z) = z {
        inner += z.adjoint() * r_g * z * C64::from(pj / pb);
    }
    inner += ComplexMatrix::identity(l, l) * C64::from(sigma2 / (l as f64 * pb));
    let inv = inner.try_inverse().expect("invertible");
    let psi = r_h * phi * inv * phi.adjoint() * r_h;
    psi.diagonal().iter().map(|z| z.re).sum()
}

/// Real-part trace.
pub fn trace(a: &ComplexMatrix) -> f64 {
    a.diagonal().iter().map(|z| z.re).sum()
}
