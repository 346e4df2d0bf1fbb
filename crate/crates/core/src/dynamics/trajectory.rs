use crate::{Error, Result, Vector, TIME_TOLERANCE};

/// Samples of a game on a uniform grid `t0 + i·dt`.
///
/// All sample arrays share the grid length. `epsilon_truth` is present for
/// synthetic trajectories and absent for ingested data.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    t0: f64,
    dt: f64,
    phi: Vec<Vector>,
    xi: Vec<Vector>,
    u_free: [Vec<Vector>; 2],
    u_realized: [Vec<Vector>; 2],
    epsilon_truth: Option<[Vec<Vector>; 2]>,
}

impl Trajectory {
    pub fn from_parts(
        t0: f64,
        dt: f64,
        phi: Vec<Vector>,
        xi: Vec<Vector>,
        u_free: [Vec<Vector>; 2],
        u_realized: [Vec<Vector>; 2],
        epsilon_truth: Option<[Vec<Vector>; 2]>,
    ) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() || !t0.is_finite() {
            return Err(Error::InvalidInput(format!(
                "invalid grid: t0 = {t0}, dt = {dt}"
            )));
        }
        let len = phi.len();
        if len == 0 {
            return Err(Error::InvalidInput(
                "trajectory must contain at least one sample".into(),
            ));
        }
        let mut lengths = vec![("xi", xi.len())];
        for i in 0..2 {
            lengths.push(("u_free", u_free[i].len()));
            lengths.push(("u_realized", u_realized[i].len()));
            if let Some(eps) = &epsilon_truth {
                lengths.push(("epsilon_truth", eps[i].len()));
            }
        }
        if let Some((name, got)) = lengths.into_iter().find(|(_, l)| *l != len) {
            return Err(Error::dims(
                format!("trajectory column {name} length"),
                len,
                got,
            ));
        }
        Ok(Self {
            t0,
            dt,
            phi,
            xi,
            u_free,
            u_realized,
            epsilon_truth,
        })
    }

    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Grid time of sample `i` (also valid past the last sample).
    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.time(i)).collect()
    }

    pub fn end_time(&self) -> f64 {
        self.time(self.len() - 1)
    }

    /// Grid index of `t`, if `t` lies on the grid within the time tolerance.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        grid_index(self.t0, self.dt, t).filter(|&i| i < self.len())
    }

    pub fn phi(&self) -> &[Vector] {
        &self.phi
    }

    pub fn xi(&self) -> &[Vector] {
        &self.xi
    }

    pub fn u_free(&self, player: usize) -> &[Vector] {
        &self.u_free[player]
    }

    pub fn u_realized(&self, player: usize) -> &[Vector] {
        &self.u_realized[player]
    }

    pub fn epsilon_truth(&self, player: usize) -> Option<&[Vector]> {
        self.epsilon_truth.as_ref().map(|e| e[player].as_slice())
    }

    pub fn has_epsilon_truth(&self) -> bool {
        self.epsilon_truth.is_some()
    }
}

/// Index `i ≥ 0` with `t0 + i·dt == t` up to [`TIME_TOLERANCE`].
pub(crate) fn grid_index(t0: f64, dt: f64, t: f64) -> Option<usize> {
    let steps = (t - t0) / dt;
    let rounded = steps.round();
    if rounded < 0.0 || ((t0 + rounded * dt) - t).abs() > TIME_TOLERANCE * (1.0 + t.abs()) {
        return None;
    }
    Some(rounded as usize)
}

/// Number of whole steps of size `dt` that fit in `span`.
pub(crate) fn whole_steps(span: f64, dt: f64) -> usize {
    (span / dt + TIME_TOLERANCE).floor().max(0.0) as usize
}
