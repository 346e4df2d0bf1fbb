//! Penalized least-squares change-point detection on piecewise-constant
//! multivariate signals.
//!
//! A top-down binary segmentation pass splits a segment at the position of
//! largest cost reduction while that reduction exceeds the penalty and both
//! halves respect the minimum length. A bottom-up pass then merges adjacent
//! segments whose merge costs no more than the penalty. Cost is the
//! time-integrated squared deviation from the segment mean, so the penalty
//! does not depend on the grid step. Ties favour fewer boundaries.

use crate::epsilon::EpsilonEstimate;
use crate::{Error, Result, Vector, TIME_TOLERANCE};

use super::VerbalizationConfig;

/// Strictly increasing grid-aligned epoch boundaries `t_0 < … < t_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    t0: f64,
    dt: f64,
    indices: Vec<usize>,
}

impl Partition {
    pub fn new(t0: f64, dt: f64, indices: Vec<usize>) -> Result<Self> {
        if indices.len() < 2 {
            return Err(Error::InvalidInput(
                "a partition needs at least two boundaries".into(),
            ));
        }
        if indices.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(
                "partition boundaries must be strictly increasing".into(),
            ));
        }
        Ok(Self { t0, dt, indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn boundaries(&self) -> Vec<f64> {
        self.indices
            .iter()
            .map(|&i| self.t0 + i as f64 * self.dt)
            .collect()
    }

    pub fn epoch_count(&self) -> usize {
        self.indices.len() - 1
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }
}

/// Prefix sums for O(1) segment costs.
struct Prefix {
    dims: usize,
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
}

impl Prefix {
    fn new(signal: &[Vector]) -> Self {
        let dims = signal.first().map_or(0, |v| v.len());
        let mut sum = vec![0.0; (signal.len() + 1) * dims];
        let mut sum_sq = vec![0.0; signal.len() + 1];
        for (i, x) in signal.iter().enumerate() {
            for d in 0..dims {
                sum[(i + 1) * dims + d] = sum[i * dims + d] + x[d];
            }
            sum_sq[i + 1] = sum_sq[i] + x.norm_squared();
        }
        Self { dims, sum, sum_sq }
    }

    /// Squared deviation from the mean over samples `a..b`.
    fn sse(&self, a: usize, b: usize) -> f64 {
        let n = (b - a) as f64;
        let mut between = 0.0;
        for d in 0..self.dims {
            let s = self.sum[b * self.dims + d] - self.sum[a * self.dims + d];
            between += s * s / n;
        }
        (self.sum_sq[b] - self.sum_sq[a] - between).max(0.0)
    }
}

/// Change points (first index of each new segment) of `signal`.
pub fn detect_change_points(
    signal: &[Vector],
    dt: f64,
    min_len: usize,
    penalty: f64,
) -> Vec<usize> {
    let min_len = min_len.max(1);
    let n = signal.len();
    if n < 2 * min_len {
        return Vec::new();
    }
    let prefix = Prefix::new(signal);
    let cost = |a: usize, b: usize| prefix.sse(a, b) * dt;

    let mut change_points = Vec::new();
    let mut stack = vec![(0usize, n)];
    while let Some((a, b)) = stack.pop() {
        if b - a < 2 * min_len {
            continue;
        }
        let whole = cost(a, b);
        let mut best: Option<(usize, f64)> = None;
        for k in (a + min_len)..=(b - min_len) {
            let gain = whole - cost(a, k) - cost(k, b);
            if best.is_none_or(|(_, g)| gain > g) {
                best = Some((k, gain));
            }
        }
        if let Some((k, gain)) = best {
            if gain > penalty {
                change_points.push(k);
                stack.push((k, b));
                stack.push((a, k));
            }
        }
    }
    change_points.sort_unstable();

    // Bottom-up pass: merge the cheapest adjacent pair while it costs ≤ penalty.
    loop {
        let mut bounds = Vec::with_capacity(change_points.len() + 2);
        bounds.push(0);
        bounds.extend_from_slice(&change_points);
        bounds.push(n);
        let mut cheapest: Option<(usize, f64)> = None;
        for (j, w) in bounds.windows(3).enumerate() {
            let increase = cost(w[0], w[2]) - cost(w[0], w[1]) - cost(w[1], w[2]);
            if cheapest.is_none_or(|(_, c)| increase < c) {
                cheapest = Some((j, increase));
            }
        }
        match cheapest {
            Some((j, increase)) if increase <= penalty => {
                change_points.remove(j);
            }
            _ => break,
        }
    }
    change_points
}

/// Minimum epoch length in grid steps.
pub(crate) fn min_len_steps(min_epoch_len: f64, dt: f64) -> usize {
    ((min_epoch_len / dt) - TIME_TOLERANCE).ceil().max(1.0) as usize
}

/// Partitions the estimate's grid at the change points of the stacked ε̂.
pub fn segment_epochs(eps_est: &EpsilonEstimate, cfg: &VerbalizationConfig) -> Result<Partition> {
    cfg.validate()?;
    let min_len = min_len_steps(cfg.min_epoch_len, eps_est.dt);
    let n = eps_est.len();
    if n < 2 * min_len {
        return Err(Error::Degenerate(format!(
            "{n} grid points cannot hold two epochs of minimum length {min_len}"
        )));
    }
    let signal = eps_est.stacked();
    let mut indices = vec![0];
    indices.extend(detect_change_points(
        &signal,
        eps_est.dt,
        min_len,
        cfg.changepoint_penalty,
    ));
    indices.push(n - 1);
    Partition::new(eps_est.t0, eps_est.dt, indices)
}
