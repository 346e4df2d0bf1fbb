//! Fixed-step classical RK4 with zero-order hold on `u°` and ε.

use crate::signal::SignalRef;
use crate::{Error, Result, Vector};

use super::trajectory::whole_steps;
use super::{GameDefinition, GameState, Trajectory};

/// Inputs held constant over one integration step.
struct Held<'a> {
    u_free: [&'a Vector; 2],
    epsilon: [&'a Vector; 2],
    /// Jet entries of order ≥ 1, frozen at the step's left grid point.
    higher_jet: &'a [Vector],
}

fn rates(
    game: &GameDefinition,
    held: &Held<'_>,
    phi: &Vector,
    xi: &Vector,
    time: f64,
) -> Result<(Vector, Vector)> {
    let mut jet = Vec::with_capacity(held.higher_jet.len() + 1);
    jet.push(phi.clone());
    jet.extend(held.higher_jet.iter().cloned());
    let u1 = game.eval_feedback(0, held.u_free[0], &jet, xi, held.epsilon[0])?;
    let u2 = game.eval_feedback(1, held.u_free[1], &jet, xi, held.epsilon[1])?;
    let dphi = game.phi_rate(phi, xi, &u1, &u2)?;
    let dxi = game.xi_rate(xi, phi, &u1, &u2)?;
    if dphi.iter().chain(dxi.iter()).any(|x| !x.is_finite()) {
        return Err(Error::IntegrationFault { time });
    }
    Ok((dphi, dxi))
}

fn rk4(
    game: &GameDefinition,
    state: &GameState,
    held: &Held<'_>,
    dt: f64,
) -> Result<(Vector, Vector)> {
    let (phi, xi, t) = (&state.phi, &state.xi, state.time);
    let half = 0.5 * dt;
    let (k1p, k1x) = rates(game, held, phi, xi, t)?;
    let (k2p, k2x) = rates(
        game,
        held,
        &(phi + &k1p * half),
        &(xi + &k1x * half),
        t + half,
    )?;
    let (k3p, k3x) = rates(
        game,
        held,
        &(phi + &k2p * half),
        &(xi + &k2x * half),
        t + half,
    )?;
    let (k4p, k4x) = rates(game, held, &(phi + &k3p * dt), &(xi + &k3x * dt), t + dt)?;
    let sixth = dt / 6.0;
    let phi_next = phi + (k1p + k2p * 2.0 + k3p * 2.0 + k4p) * sixth;
    let xi_next = xi + (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * sixth;
    if phi_next
        .iter()
        .chain(xi_next.iter())
        .any(|x| !x.is_finite())
    {
        return Err(Error::IntegrationFault { time: t + dt });
    }
    Ok((phi_next, xi_next))
}

fn check_step_inputs(game: &GameDefinition, state: &GameState, dt: f64) -> Result<()> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidInput(format!(
            "step size must be positive and finite, got {dt}"
        )));
    }
    if !state.is_finite() {
        return Err(Error::InvalidInput("state entries must be finite".into()));
    }
    let dims = game.dims();
    if state.phi.len() != dims.state {
        return Err(Error::dims("φ", dims.state, state.phi.len()));
    }
    if state.xi.len() != dims.intention {
        return Err(Error::dims("ξ", dims.intention, state.xi.len()));
    }
    Ok(())
}

/// One RK4 step of the coupled `(φ, ξ)` system with held `u°` and ε.
///
/// Feedbacks are re-evaluated at every stage from the stage values of
/// `φ, ξ`; jet entries above order 0 are taken as zero. Use
/// [`step_integrate_with_jet`] to supply them.
pub fn step_integrate(
    game: &GameDefinition,
    state: &GameState,
    u_free: [&Vector; 2],
    epsilon: [&Vector; 2],
    dt: f64,
) -> Result<GameState> {
    let zeros = vec![Vector::zeros(game.dims().state); game.dims().jet_order];
    step_integrate_with_jet(game, state, &zeros, u_free, epsilon, dt)
}

/// [`step_integrate`] with explicit jet entries of order `1..=k`, held across the step.
pub fn step_integrate_with_jet(
    game: &GameDefinition,
    state: &GameState,
    higher_jet: &[Vector],
    u_free: [&Vector; 2],
    epsilon: [&Vector; 2],
    dt: f64,
) -> Result<GameState> {
    check_step_inputs(game, state, dt)?;
    if higher_jet.len() != game.dims().jet_order {
        return Err(Error::dims(
            "higher φ-jet",
            game.dims().jet_order,
            higher_jet.len(),
        ));
    }
    let held = Held {
        u_free,
        epsilon,
        higher_jet,
    };
    let (phi, xi) = rk4(game, state, &held, dt)?;
    Ok(GameState {
        time: state.time + dt,
        phi,
        xi,
    })
}

/// φ-jet `[φₙ, φ̇ₙ, φ̈ₙ]` (truncated to `order`) from backward differences of
/// the stored samples. Missing history contributes zero derivatives.
pub fn grid_jet(phi: &[Vector], n: usize, order: usize, dt: f64) -> Vec<Vector> {
    let cur = &phi[n];
    let mut jet = vec![cur.clone()];
    if order >= 1 {
        jet.push(if n >= 1 {
            (cur - &phi[n - 1]) / dt
        } else {
            Vector::zeros(cur.len())
        });
    }
    if order >= 2 {
        jet.push(if n >= 2 {
            (cur - &phi[n - 1] * 2.0 + &phi[n - 2]) / (dt * dt)
        } else {
            Vector::zeros(cur.len())
        });
    }
    jet
}

/// Stepwise simulation that records every grid point.
///
/// Running to `t_end` in one call or in several consecutive calls produces
/// bit-identical records: no state is reset between calls.
pub struct Simulator<'a> {
    game: &'a GameDefinition,
    u_free_signals: &'a [SignalRef; 2],
    epsilon_signals: &'a [SignalRef; 2],
    t0: f64,
    dt: f64,
    state: GameState,
    phi: Vec<Vector>,
    xi: Vec<Vector>,
    u_free: [Vec<Vector>; 2],
    u_realized: [Vec<Vector>; 2],
    epsilon: [Vec<Vector>; 2],
    jet: Vec<Vector>,
}

impl<'a> Simulator<'a> {
    pub fn new(
        game: &'a GameDefinition,
        init: GameState,
        u_free_signals: &'a [SignalRef; 2],
        epsilon_signals: &'a [SignalRef; 2],
        dt: f64,
    ) -> Result<Self> {
        check_step_inputs(game, &init, dt)?;
        let dims = game.dims();
        for i in 0..2 {
            if u_free_signals[i].dim() != dims.controls[i] {
                return Err(Error::dims(
                    format!("player {i} free-control signal"),
                    dims.controls[i],
                    u_free_signals[i].dim(),
                ));
            }
            if epsilon_signals[i].dim() != dims.epsilon[i] {
                return Err(Error::dims(
                    format!("player {i} ε signal"),
                    dims.epsilon[i],
                    epsilon_signals[i].dim(),
                ));
            }
        }
        let mut sim = Self {
            game,
            u_free_signals,
            epsilon_signals,
            t0: init.time,
            dt,
            state: init,
            phi: Vec::new(),
            xi: Vec::new(),
            u_free: [Vec::new(), Vec::new()],
            u_realized: [Vec::new(), Vec::new()],
            epsilon: [Vec::new(), Vec::new()],
            jet: Vec::new(),
        };
        sim.record()?;
        Ok(sim)
    }

    fn record(&mut self) -> Result<()> {
        let n = self.phi.len();
        let t = self.state.time;
        self.phi.push(self.state.phi.clone());
        self.xi.push(self.state.xi.clone());
        self.jet = grid_jet(&self.phi, n, self.game.dims().jet_order, self.dt);
        for i in 0..2 {
            let u0 = self.u_free_signals[i].eval(t);
            let eps = self.epsilon_signals[i].eval(t);
            let u = self
                .game
                .eval_feedback(i, &u0, &self.jet, &self.state.xi, &eps)?;
            self.u_free[i].push(u0);
            self.epsilon[i].push(eps);
            self.u_realized[i].push(u);
        }
        Ok(())
    }

    /// Number of completed steps.
    pub fn steps(&self) -> usize {
        self.phi.len() - 1
    }

    pub fn state(&self) -> &GameState {
        &self.state
    }

    pub fn advance(&mut self, steps: usize) -> Result<()> {
        for _ in 0..steps {
            let n = self.phi.len() - 1;
            let held = Held {
                u_free: [&self.u_free[0][n], &self.u_free[1][n]],
                epsilon: [&self.epsilon[0][n], &self.epsilon[1][n]],
                higher_jet: &self.jet[1..],
            };
            let (phi, xi) = rk4(self.game, &self.state, &held, self.dt)?;
            self.state = GameState {
                time: self.t0 + (n + 1) as f64 * self.dt,
                phi,
                xi,
            };
            self.record()?;
        }
        Ok(())
    }

    /// Advances to the last grid point not after `t`.
    pub fn advance_to(&mut self, t: f64) -> Result<()> {
        let target = whole_steps(t - self.t0, self.dt);
        let done = self.steps();
        if target > done {
            self.advance(target - done)?;
        }
        Ok(())
    }

    pub fn finish(self) -> Trajectory {
        Trajectory::from_parts(
            self.t0,
            self.dt,
            self.phi,
            self.xi,
            self.u_free,
            self.u_realized,
            Some(self.epsilon),
        )
        .expect("simulator records columns in lockstep")
    }
}

/// Simulates on the grid `init.time + m·dt ≤ t_end`, recording φ, ξ, u°,
/// realized u and the true ε at every grid point.
pub fn simulate(
    game: &GameDefinition,
    init: GameState,
    u_free_signals: &[SignalRef; 2],
    epsilon_signals: &[SignalRef; 2],
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    if !(t_end > init.time) {
        return Err(Error::InvalidInput(format!(
            "t_end ({t_end}) must exceed the initial time ({})",
            init.time
        )));
    }
    let mut sim = Simulator::new(game, init, u_free_signals, epsilon_signals, dt)?;
    sim.advance_to(t_end)?;
    Ok(sim.finish())
}
