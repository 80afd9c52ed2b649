//! Dense linear-algebra kernels with a single tolerance policy.
//!
//! Singular values at or below `rel_tol * sigma_max * max(rows, cols)` are
//! treated as zero. [`pinv`] and [`rank`] share this rule so that rank
//! arithmetic on stacked matrices agrees with the projectors built from them.
//! Singular values come from the symmetric eigenproblem of
//! `[[0, M], [M^T, 0]]`, whose spectrum is `±sigma_i` plus zeros.
//! `nalgebra`'s bidiagonal SVD occasionally returns inconsistent factors
//! for exactly rank-deficient inputs; its symmetric eigensolver does not.

use nalgebra::linalg::SymmetricEigen;
use nalgebra::{DMatrix, DVector};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Default relative tolerance for rank decisions and pseudoinverses.
pub const DEFAULT_REL_TOL: f64 = 1e-10;

/// Symmetry tolerance accepted by [`eigenvalues_symmetric`], relative to `max(1, ‖A‖_F)`.
pub const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct RankResult {
    pub rank: usize,
    /// Descending.
    pub singular_values: Vec<f64>,
    pub tolerance_used: f64,
}

pub(crate) fn ensure_finite(m: &Matrix, what: &'static str) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

fn check_rel_tol(rel_tol: f64) -> Result<()> {
    if rel_tol > 0.0 && rel_tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "relative tolerance must be positive, got {rel_tol}"
        )))
    }
}

/// Thin singular triplets, `sigma` descending with `min(rows, cols)` entries.
/// Columns of `u` and `v` are meaningful only for nonzero `sigma`.
struct Triplets {
    sigma: Vec<f64>,
    u: Matrix,
    v: Matrix,
}

fn svd(m: &Matrix) -> Triplets {
    let (r, c) = m.shape();
    let mut aug = Matrix::zeros(r + c, r + c);
    aug.view_mut((0, r), (r, c)).copy_from(m);
    aug.view_mut((r, 0), (c, r)).copy_from(&m.transpose());
    let eig = SymmetricEigen::new(aug);
    let mut order: Vec<usize> = (0..r + c).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let q = r.min(c);
    let mut u = Matrix::zeros(r, q);
    let mut v = Matrix::zeros(c, q);
    let mut sigma = Vec::with_capacity(q);
    for (col, &i) in order.iter().take(q).enumerate() {
        sigma.push(eig.eigenvalues[i].max(0.0));
        let vec = eig.eigenvectors.column(i);
        u.set_column(col, &(vec.rows(0, r) * std::f64::consts::SQRT_2));
        v.set_column(col, &(vec.rows(r, c) * std::f64::consts::SQRT_2));
    }
    Triplets { sigma, u, v }
}

/// Absolute cutoff below which singular values count as zero.
pub fn rank_tolerance(sigma_max: f64, rows: usize, cols: usize, rel_tol: f64) -> f64 {
    rel_tol * sigma_max * rows.max(cols) as f64
}

/// Singular values in descending order.
pub fn singular_values(m: &Matrix) -> Result<Vec<f64>> {
    ensure_finite(m, "singular value input")?;
    if m.is_empty() {
        return Ok(Vec::new());
    }
    Ok(svd(m).sigma)
}

/// Largest singular value (induced 2-norm); zero for empty matrices.
pub fn spectral_norm(m: &Matrix) -> Result<f64> {
    Ok(singular_values(m)?.first().copied().unwrap_or(0.0))
}

/// Moore–Penrose pseudoinverse via SVD.
pub fn pinv(m: &Matrix, rel_tol: f64) -> Result<Matrix> {
    check_rel_tol(rel_tol)?;
    ensure_finite(m, "pseudoinverse input")?;
    if m.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    let t = svd(m);
    let cutoff = rank_tolerance(t.sigma[0], m.nrows(), m.ncols(), rel_tol);
    let mut p = Matrix::zeros(m.ncols(), m.nrows());
    for (i, &s) in t.sigma.iter().enumerate() {
        if s > cutoff {
            p += t.v.column(i) * t.u.column(i).transpose() / s;
        }
    }
    Ok(p)
}

/// Numerical rank under the shared tolerance rule.
pub fn rank(m: &Matrix, rel_tol: f64) -> Result<RankResult> {
    check_rel_tol(rel_tol)?;
    let singular_values = singular_values(m)?;
    let sigma_max = singular_values.first().copied().unwrap_or(0.0);
    let tolerance_used = rank_tolerance(sigma_max, m.nrows(), m.ncols(), rel_tol);
    let rank = singular_values.iter().filter(|&&s| s > tolerance_used).count();
    Ok(RankResult {
        rank,
        singular_values,
        tolerance_used,
    })
}

fn check_symmetric(a: &Matrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::dims(
            "symmetric eigensolver",
            "square matrix",
            format!("{}x{}", a.nrows(), a.ncols()),
        ));
    }
    ensure_finite(a, "eigensolver input")?;
    let asym = (a - a.transpose()).amax();
    if asym > SYMMETRY_TOL * a.norm().max(1.0) {
        return Err(Error::NotSymmetric(asym));
    }
    Ok(())
}

/// Eigenvalues (descending) and matching orthonormal eigenvectors as columns.
pub fn symmetric_eigen(a: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    check_symmetric(a)?;
    let n = a.nrows();
    if n == 0 {
        return Ok((Vec::new(), Matrix::zeros(0, 0)));
    }
    let sym = (a + a.transpose()) * 0.5;
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numerical("symmetric eigensolver failed to converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = Matrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Real eigenvalues of a symmetric matrix, sorted descending.
pub fn eigenvalues_symmetric(a: &Matrix) -> Result<Vec<f64>> {
    symmetric_eigen(a).map(|(values, _)| values)
}

/// Standard normal distribution function.
pub fn gaussian_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Inverse of the standard normal distribution function.
///
/// Acklam's rational approximation (relative error about 1.15e-9) followed
/// by one Halley step against [`gaussian_cdf`].
pub fn gaussian_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "quantile probability must lie in (0, 1), got {p}"
        )));
    }
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383_577_518_672_69e2,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    let x = if p < P_LOW {
        tail((-2.0 * p.ln()).sqrt())
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -tail((-2.0 * (1.0 - p).ln()).sqrt())
    };

    // Halley refinement.
    let e = gaussian_cdf(x) - p;
    let u = e * (2.0 * std::f64::consts::PI).sqrt() * (x * x / 2.0).exp();
    Ok(x - u / (1.0 + x * u / 2.0))
}
