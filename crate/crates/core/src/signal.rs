//! Exogenous signal generators for free controls `u°ᵢ` and ε-parameters.
//!
//! During integration signals are sampled at grid points and held constant
//! across each step (zero-order hold).

use std::fmt;
use std::sync::Arc;

use crate::rng::SplitMix64;
use crate::{Error, Result, Vector, TIME_TOLERANCE};

pub trait Signal: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;
    fn eval(&self, t: f64) -> Vector;
}

pub type SignalRef = Arc<dyn Signal>;

#[derive(Debug, Clone)]
pub struct Constant(pub Vector);

impl Constant {
    pub fn scalar(value: f64) -> SignalRef {
        Arc::new(Constant(Vector::from_element(1, value)))
    }
}

impl Signal for Constant {
    fn dim(&self) -> usize {
        self.0.len()
    }

    fn eval(&self, _t: f64) -> Vector {
        self.0.clone()
    }
}

/// Right-continuous step function: `values[k]` holds on `[breaks[k-1], breaks[k])`.
///
/// A grid time within [`TIME_TOLERANCE`] below a break already reads the
/// value after the break, so breaks placed on grid points switch exactly there.
#[derive(Debug, Clone)]
pub struct PiecewiseConstant {
    breaks: Vec<f64>,
    values: Vec<Vector>,
}

impl PiecewiseConstant {
    pub fn new(breaks: Vec<f64>, values: Vec<Vector>) -> Result<Self> {
        if values.len() != breaks.len() + 1 {
            return Err(Error::InvalidInput(format!(
                "piecewise-constant signal needs {} values for {} breaks, got {}",
                breaks.len() + 1,
                breaks.len(),
                values.len()
            )));
        }
        if breaks.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(
                "piecewise-constant breaks must be strictly increasing".into(),
            ));
        }
        let dim = values[0].len();
        if let Some(bad) = values.iter().find(|v| v.len() != dim) {
            return Err(Error::dims("piecewise-constant value", dim, bad.len()));
        }
        Ok(Self { breaks, values })
    }

    /// Seeded random walk: starts at `start` on `t0` and adds an independent
    /// uniform increment in `[-step_size, step_size)` per coordinate every
    /// `interval`, for `steps` increments.
    pub fn random_walk(
        start: Vector,
        t0: f64,
        interval: f64,
        steps: usize,
        step_size: f64,
        rng: &mut SplitMix64,
    ) -> Result<Self> {
        let mut values = vec![start.clone()];
        let mut current = start;
        for _ in 0..steps {
            current = current.map(|x| x + rng.uniform(-step_size, step_size));
            values.push(current.clone());
        }
        let breaks = (1..=steps).map(|k| t0 + k as f64 * interval).collect();
        Self::new(breaks, values)
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &[Vector] {
        &self.values
    }
}

impl Signal for PiecewiseConstant {
    fn dim(&self) -> usize {
        self.values[0].len()
    }

    fn eval(&self, t: f64) -> Vector {
        let k = self.breaks.partition_point(|&b| b <= t + TIME_TOLERANCE);
        self.values[k].clone()
    }
}

/// `offset + amplitude · sin(angular_freq · t + phase)`, coordinate-wise.
#[derive(Debug, Clone)]
pub struct Sinusoid {
    pub offset: Vector,
    pub amplitude: Vector,
    pub angular_freq: f64,
    pub phase: f64,
}

impl Signal for Sinusoid {
    fn dim(&self) -> usize {
        self.offset.len()
    }

    fn eval(&self, t: f64) -> Vector {
        let s = (self.angular_freq * t + self.phase).sin();
        &self.offset + &self.amplitude * s
    }
}

/// Constant `base` until `start`, then drifting linearly with `slope`.
#[derive(Debug, Clone)]
pub struct Ramp {
    pub base: Vector,
    pub slope: Vector,
    pub start: f64,
}

impl Signal for Ramp {
    fn dim(&self) -> usize {
        self.base.len()
    }

    fn eval(&self, t: f64) -> Vector {
        let elapsed = (t - self.start).max(0.0);
        &self.base + &self.slope * elapsed
    }
}

/// Wraps an arbitrary closure.
pub struct FnSignal {
    dim: usize,
    f: Arc<dyn Fn(f64) -> Vector + Send + Sync>,
}

impl FnSignal {
    pub fn new(dim: usize, f: impl Fn(f64) -> Vector + Send + Sync + 'static) -> Self {
        Self {
            dim,
            f: Arc::new(f),
        }
    }
}

impl fmt::Debug for FnSignal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnSignal").field("dim", &self.dim).finish()
    }
}

impl Signal for FnSignal {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, t: f64) -> Vector {
        (self.f)(t)
    }
}
