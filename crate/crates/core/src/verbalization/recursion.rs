//! Least-squares fit of the affine recursion
//! `ωₙ = A·ω_{n−1} + B·vₙ + C·φ̄ₙ + c`.

use nalgebra::SVD;

use crate::{Error, Matrix, Result, Vector};

#[derive(Debug, Clone, PartialEq)]
pub struct RecursionMap {
    pub a: Matrix,
    pub b: Matrix,
    pub c: Matrix,
    pub bias: Vector,
}

impl RecursionMap {
    pub fn apply(&self, previous: &Vector, v: &Vector, phi: &Vector) -> Vector {
        &self.a * previous + &self.b * v + &self.c * phi + &self.bias
    }

    /// `ωₙ = ω_{n−1}`.
    pub fn hold(omega_dim: usize, v_dim: usize, phi_dim: usize) -> Self {
        Self {
            a: Matrix::identity(omega_dim, omega_dim),
            b: Matrix::zeros(omega_dim, v_dim),
            c: Matrix::zeros(omega_dim, phi_dim),
            bias: Vector::zeros(omega_dim),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecursionFit {
    pub map: RecursionMap,
    /// `‖ωₙ − Ω̂(ω_{n−1}, vₙ, φ̄ₙ)‖₂` for `n ≥ 1`.
    pub residuals: Vec<f64>,
    /// `1 − RSS/TSS`, with TSS about the mean of ωₙ over `n ≥ 1`.
    pub score: f64,
    pub design_rank: usize,
}

fn check_lengths(omega: &[Vector], v: &[Vector], phi: &[Vector]) -> Result<(usize, usize, usize)> {
    if omega.len() != v.len() || omega.len() != phi.len() {
        return Err(Error::InvalidInput(format!(
            "feature sequences differ in length: ω {}, v {}, φ {}",
            omega.len(),
            v.len(),
            phi.len()
        )));
    }
    let first = |s: &[Vector]| s.first().map_or(0, |x| x.len());
    let dims = (first(omega), first(v), first(phi));
    for (name, seq, d) in [("ω", omega, dims.0), ("v", v, dims.1), ("φ", phi, dims.2)] {
        if let Some(bad) = seq.iter().find(|x| x.len() != d) {
            return Err(Error::dims(format!("{name} feature"), d, bad.len()));
        }
    }
    Ok(dims)
}

/// Ordinary least squares of ωₙ on `(ω_{n−1}, vₙ, φ̄ₙ, 1)`, one column per ω coordinate.
///
/// Needs at least `p + 2` epochs, `p` being the number of regressors.
/// Collinear designs with enough epochs get the minimum-norm solution.
pub fn fit_recursion_map(omega: &[Vector], v: &[Vector], phi: &[Vector]) -> Result<RecursionFit> {
    let (k, dv, dp) = check_lengths(omega, v, phi)?;
    let p = k + dv + dp + 1;
    if omega.len() < p + 2 {
        return Err(Error::Underdetermined {
            epochs: omega.len(),
            required: p + 2,
        });
    }
    let rows = omega.len() - 1;
    let mut x = Matrix::zeros(rows, p);
    let mut y = Matrix::zeros(rows, k);
    for r in 0..rows {
        let n = r + 1;
        let regressors = omega[n - 1]
            .iter()
            .chain(v[n].iter())
            .chain(phi[n].iter())
            .copied()
            .chain(std::iter::once(1.0));
        for (j, val) in regressors.enumerate() {
            x[(r, j)] = val;
        }
        y.row_mut(r).copy_from(&omega[n].transpose());
    }

    let svd = SVD::new(x.clone(), true, true);
    let max_sv = svd.singular_values.max();
    let tol = max_sv * rows.max(p) as f64 * f64::EPSILON;
    let design_rank = svd.singular_values.iter().filter(|&&s| s > tol).count();
    let theta = svd
        .solve(&y, tol)
        .map_err(|e| Error::InvalidInput(format!("least-squares solve failed: {e}")))?;

    let fitted = &x * &theta;
    let resid = &y - &fitted;
    let residuals = (0..rows).map(|r| resid.row(r).norm()).collect();
    let rss = resid.norm_squared();

    let mut tss = 0.0;
    let mut scale = 0.0;
    for c in 0..k {
        let col = y.column(c);
        let mean = col.mean();
        tss += col.iter().map(|t| (t - mean).powi(2)).sum::<f64>();
        scale += col.norm_squared();
    }
    let zero_variance = tss <= (16.0 * f64::EPSILON).powi(2) * scale;
    let score = if zero_variance {
        1.0
    } else {
        (1.0 - rss / tss).min(1.0)
    };

    let theta_t = theta.transpose();
    let map = RecursionMap {
        a: theta_t.columns(0, k).into_owned(),
        b: theta_t.columns(k, dv).into_owned(),
        c: theta_t.columns(k + dv, dp).into_owned(),
        bias: theta_t.column(p - 1).into_owned(),
    };
    Ok(RecursionFit {
        map,
        residuals,
        score,
        design_rank,
    })
}
