//! Trapezoid quadrature on uniform grids.

use crate::{Error, Result, Vector};

/// Trapezoid integral of vector samples spaced `dt` apart.
pub fn trapezoid(samples: &[Vector], dt: f64) -> Result<Vector> {
    if samples.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "trapezoid rule needs at least 2 samples, got {}",
            samples.len()
        )));
    }
    let dim = samples[0].len();
    let mut acc = Vector::zeros(dim);
    for pair in samples.windows(2) {
        if pair[1].len() != dim {
            return Err(Error::dims("quadrature sample", dim, pair[1].len()));
        }
        acc += (&pair[0] + &pair[1]) * (0.5 * dt);
    }
    Ok(acc)
}

/// Trapezoid time-average over the span covered by `samples`.
pub fn trapezoid_mean(samples: &[Vector], dt: f64) -> Result<Vector> {
    let span = (samples.len().saturating_sub(1)) as f64 * dt;
    Ok(trapezoid(samples, dt)? / span)
}
