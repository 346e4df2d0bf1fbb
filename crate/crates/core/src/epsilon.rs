//! A-posteriori recovery of ε and frozen-ε short-term prediction.
//!
//! ε is recovered from the realized controls, pointwise in time:
//! `ε̂ᵢ(t) = argmin ‖uᵢ − u°ᵢ − Pᵢφ − Qᵢξ − Rᵢε‖₂`, solved through the normal
//! equations `RᵀR ε = Rᵀ(u − u° − Pφ − Qξ)`. No temporal smoothing is applied.

use nalgebra::Cholesky;

use crate::dynamics::{grid_jet, AffineFeedback, GameDefinition, GameState};
use crate::dynamics::{step_integrate_with_jet, Trajectory};
use crate::signal::SignalRef;
use crate::{Error, Matrix, Result, Vector};

#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonEstimate {
    pub t0: f64,
    pub dt: f64,
    pub epsilon_hat: [Vec<Vector>; 2],
    /// Attained least-squares residual `‖u − û‖₂` per player and grid point.
    pub residual_norm: [Vec<f64>; 2],
    pub rank_ok: [bool; 2],
}

impl EpsilonEstimate {
    pub fn len(&self) -> usize {
        self.epsilon_hat[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    /// `(ε̂₁, ε̂₂)` stacked into one vector per grid point.
    pub fn stacked(&self) -> Vec<Vector> {
        self.epsilon_hat[0]
            .iter()
            .zip(&self.epsilon_hat[1])
            .map(|(a, b)| {
                Vector::from_iterator(a.len() + b.len(), a.iter().chain(b.iter()).copied())
            })
            .collect()
    }
}

/// Least-squares solver for one player's ε.
struct Recovery<'a> {
    family: &'a AffineFeedback,
    gram: Cholesky<f64, nalgebra::Dyn>,
    rt: Matrix,
}

impl<'a> Recovery<'a> {
    fn new(game: &'a GameDefinition, player: usize) -> Result<Self> {
        let family = game
            .feedback(player)
            .as_affine()
            .ok_or(Error::UnsupportedFamily { player })?;
        if !family.recovery_supported() {
            return Err(Error::RankDeficient { player });
        }
        let rt = family.r().transpose();
        let gram = Cholesky::new(&rt * family.r()).ok_or(Error::RankDeficient { player })?;
        Ok(Self { family, gram, rt })
    }

    fn solve(&self, u: &Vector, u_free: &Vector, phi: &Vector, xi: &Vector) -> (Vector, f64) {
        let target = u - self.family.known_part(u_free, phi, xi);
        let eps = self.gram.solve(&(&self.rt * &target));
        let residual = (target - self.family.r() * &eps).norm();
        (eps, residual)
    }
}

fn check_shapes(traj: &Trajectory, game: &GameDefinition) -> Result<()> {
    let dims = game.dims();
    let checks = [
        ("φ", dims.state, traj.phi()[0].len()),
        ("ξ", dims.intention, traj.xi()[0].len()),
        ("u°₁", dims.controls[0], traj.u_free(0)[0].len()),
        ("u°₂", dims.controls[1], traj.u_free(1)[0].len()),
        ("u₁", dims.controls[0], traj.u_realized(0)[0].len()),
        ("u₂", dims.controls[1], traj.u_realized(1)[0].len()),
    ];
    for (name, expected, got) in checks {
        if expected != got {
            return Err(Error::dims(
                format!("trajectory column {name}"),
                expected,
                got,
            ));
        }
    }
    Ok(())
}

/// Pointwise least-squares ε̂ over the whole trajectory grid.
pub fn estimate_epsilon(traj: &Trajectory, game: &GameDefinition) -> Result<EpsilonEstimate> {
    check_shapes(traj, game)?;
    let solvers = [Recovery::new(game, 0)?, Recovery::new(game, 1)?];
    let mut epsilon_hat = [
        Vec::with_capacity(traj.len()),
        Vec::with_capacity(traj.len()),
    ];
    let mut residual_norm = [
        Vec::with_capacity(traj.len()),
        Vec::with_capacity(traj.len()),
    ];
    for n in 0..traj.len() {
        for (i, solver) in solvers.iter().enumerate() {
            let (eps, res) = solver.solve(
                &traj.u_realized(i)[n],
                &traj.u_free(i)[n],
                &traj.phi()[n],
                &traj.xi()[n],
            );
            epsilon_hat[i].push(eps);
            residual_norm[i].push(res);
        }
    }
    Ok(EpsilonEstimate {
        t0: traj.t0(),
        dt: traj.dt(),
        epsilon_hat,
        residual_norm,
        rank_ok: [true, true],
    })
}

/// ε̂ at a single grid point.
pub fn estimate_epsilon_at(
    traj: &Trajectory,
    game: &GameDefinition,
    index: usize,
) -> Result<[Vector; 2]> {
    check_shapes(traj, game)?;
    if index >= traj.len() {
        return Err(Error::InvalidInput(format!(
            "grid index {index} out of range for trajectory of length {}",
            traj.len()
        )));
    }
    let solve = |i: usize| -> Result<Vector> {
        let solver = Recovery::new(game, i)?;
        Ok(solver
            .solve(
                &traj.u_realized(i)[index],
                &traj.u_free(i)[index],
                &traj.phi()[index],
                &traj.xi()[index],
            )
            .0)
    };
    Ok([solve(0)?, solve(1)?])
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionReport {
    pub anchor_time: f64,
    pub horizon: f64,
    pub frozen_epsilon: [Vector; 2],
    /// Grid times of the predicted segment, starting at the anchor.
    pub times: Vec<f64>,
    pub predicted_phi: Vec<Vector>,
    /// Recorded φ over the part of the horizon the source trajectory covers.
    pub actual_phi: Vec<Vector>,
    /// Sup-norm `‖φ̂ − φ‖∞` per grid point covered by `actual_phi`.
    pub error_profile: Vec<f64>,
}

impl PredictionReport {
    pub fn max_error(&self) -> f64 {
        self.error_profile.iter().copied().fold(0.0, f64::max)
    }
}

/// Integrates forward from the recorded state at `t_0` with ε held at ε̂(t_0).
///
/// The future free controls are sampled on the trajectory's grid. Jet
/// entries above order 0 come from the recorded history before the anchor
/// and from the prediction itself afterwards.
pub fn freeze_and_predict(
    game: &GameDefinition,
    traj: &Trajectory,
    t_0: f64,
    horizon: f64,
    u_free_future: &[SignalRef; 2],
) -> Result<PredictionReport> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::InvalidInput(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    let anchor = traj.index_of(t_0).ok_or_else(|| {
        Error::InvalidInput(format!("anchor time {t_0} is not on the trajectory grid"))
    })?;
    let steps = crate::dynamics::whole_steps(horizon, traj.dt());
    if steps == 0 {
        return Err(Error::InvalidInput(format!(
            "horizon {horizon} is shorter than one grid step ({})",
            traj.dt()
        )));
    }
    for (i, sig) in u_free_future.iter().enumerate() {
        if sig.dim() != game.dims().controls[i] {
            return Err(Error::dims(
                format!("player {i} future free control"),
                game.dims().controls[i],
                sig.dim(),
            ));
        }
    }
    let frozen = estimate_epsilon_at(traj, game, anchor)?;
    let order = game.dims().jet_order;
    let dt = traj.dt();

    // History window for finite-difference jets, then the predicted samples.
    let history_start = anchor.saturating_sub(order);
    let mut phi_hist: Vec<Vector> = traj.phi()[history_start..=anchor].to_vec();
    let mut state = GameState {
        time: traj.time(anchor),
        phi: traj.phi()[anchor].clone(),
        xi: traj.xi()[anchor].clone(),
    };
    let mut times = vec![state.time];
    let mut predicted = vec![state.phi.clone()];
    for m in 0..steps {
        let n_abs = anchor + m;
        let last = phi_hist.len() - 1;
        // Index `last` equals `n_abs` whenever history is short, so missing
        // samples yield zero derivatives exactly as in the simulator.
        let jet = grid_jet(&phi_hist, last, order, dt);
        let t = traj.time(n_abs);
        let u_free = [u_free_future[0].eval(t), u_free_future[1].eval(t)];
        let next = step_integrate_with_jet(
            game,
            &state,
            &jet[1..],
            [&u_free[0], &u_free[1]],
            [&frozen[0], &frozen[1]],
            dt,
        )?;
        state = GameState {
            time: traj.time(n_abs + 1),
            ..next
        };
        phi_hist.push(state.phi.clone());
        times.push(state.time);
        predicted.push(state.phi.clone());
    }

    let available = (traj.len() - anchor).min(steps + 1);
    let actual_phi: Vec<Vector> = traj.phi()[anchor..anchor + available].to_vec();
    let error_profile = predicted
        .iter()
        .zip(&actual_phi)
        .map(|(p, a)| (p - a).amax())
        .collect();
    Ok(PredictionReport {
        anchor_time: traj.time(anchor),
        horizon,
        frozen_epsilon: frozen,
        times,
        predicted_phi: predicted,
        actual_phi,
        error_profile,
    })
}

/// Outcome of one anchor in a batch prediction sweep.
#[derive(Debug)]
pub struct AnchorOutcome {
    pub anchor: f64,
    pub max_error: Result<f64>,
}

/// One [`freeze_and_predict`] per anchor; failures are reported per anchor.
pub fn prediction_error_profile(
    game: &GameDefinition,
    traj: &Trajectory,
    anchors: &[f64],
    horizon: f64,
    u_free_future: &[SignalRef; 2],
) -> Vec<AnchorOutcome> {
    anchors
        .iter()
        .map(|&anchor| AnchorOutcome {
            anchor,
            max_error: freeze_and_predict(game, traj, anchor, horizon, u_free_future)
                .map(|r| r.max_error()),
        })
        .collect()
}
