//! Dialogues: discrete-time 2-person games driven by continuous intention fields.
//!
//! The intention field `ξ` evolves continuously under ε-represented controls.
//! Over each epoch `[t_{n−1}, t_n]` of a fixed schedule, known functionals
//! turn the continuous traces into an utterance: a state `φₙ` (by default a
//! mean of the ε-parameters) and a control pair `vₙ` (by default the mean
//! free controls). A discrete step map `φₙ = Φ(φ_{n−1}, vₙ; ξ|epoch)` is then
//! checked against the utterances as a consistency constraint.

use std::fmt;
use std::sync::Arc;

use crate::dynamics::{grid_index, GameDefinition, GameState, Simulator, Trajectory};
use crate::quadrature::trapezoid_mean;
use crate::signal::SignalRef;
use crate::{Error, Matrix, Result, Vector};

/// Continuous traces restricted to one closed epoch.
///
/// Exogenous inputs (`u°`, ε) are zero-order held on the grid, so their
/// closing sample is the value applied over the epoch's last step rather than
/// the value that takes over at the boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochTrace {
    pub start: f64,
    pub end: f64,
    pub dt: f64,
    pub epsilon: [Vec<Vector>; 2],
    pub u_free: [Vec<Vector>; 2],
    pub xi: Vec<Vector>,
    pub phi: Vec<Vector>,
}

/// `samples[start..end]` followed by `samples[end − 1]`.
pub fn held_closure(samples: &[Vector], start: usize, end: usize) -> Vec<Vector> {
    let mut out = samples[start..end].to_vec();
    out.push(samples[end - 1].clone());
    out
}

impl EpochTrace {
    /// Builds the trace for grid indices `start..=end` using the supplied ε
    /// samples (true or estimated).
    pub fn from_trajectory(
        traj: &Trajectory,
        epsilon: [&[Vector]; 2],
        start: usize,
        end: usize,
    ) -> Result<Self> {
        if end <= start || end >= traj.len() {
            return Err(Error::InvalidInput(format!(
                "epoch indices [{start}, {end}] invalid for a trajectory of length {}",
                traj.len()
            )));
        }
        if epsilon.iter().any(|e| e.len() != traj.len()) {
            return Err(Error::InvalidInput(
                "ε samples do not match the trajectory grid".into(),
            ));
        }
        Ok(Self {
            start: traj.time(start),
            end: traj.time(end),
            dt: traj.dt(),
            epsilon: epsilon.map(|e| held_closure(e, start, end)),
            u_free: [0, 1].map(|i| held_closure(traj.u_free(i), start, end)),
            xi: traj.xi()[start..=end].to_vec(),
            phi: traj.phi()[start..=end].to_vec(),
        })
    }
}

fn stack(parts: &[&Vector]) -> Vector {
    let len = parts.iter().map(|p| p.len()).sum();
    Vector::from_iterator(len, parts.iter().flat_map(|p| p.iter().copied()))
}

fn check_epoch(len: usize, what: &str) -> Result<()> {
    if len < 2 {
        return Err(Error::InvalidInput(format!(
            "{what}: epoch needs at least 2 grid points, got {len}"
        )));
    }
    Ok(())
}

/// `M · mean(ε₁ ⊕ ε₂)` over the epoch (trapezoid rule); `M = I` when `weights` is `None`.
pub fn utterance_state_functional(
    epsilon_trace: [&[Vector]; 2],
    xi_trace: &[Vector],
    dt: f64,
    weights: Option<&Matrix>,
) -> Result<Vector> {
    check_epoch(epsilon_trace[0].len(), "utterance state")?;
    if epsilon_trace[1].len() != epsilon_trace[0].len() || xi_trace.len() != epsilon_trace[0].len()
    {
        return Err(Error::InvalidInput(
            "utterance state traces differ in length".into(),
        ));
    }
    let stacked: Vec<Vector> = epsilon_trace[0]
        .iter()
        .zip(epsilon_trace[1])
        .map(|(a, b)| stack(&[a, b]))
        .collect();
    let mean = trapezoid_mean(&stacked, dt)?;
    match weights {
        None => Ok(mean),
        Some(m) if m.ncols() == mean.len() => Ok(m * mean),
        Some(m) => Err(Error::dims(
            "utterance weight matrix columns",
            mean.len(),
            m.ncols(),
        )),
    }
}

/// Per-player trapezoid mean of `u°ᵢ` over the epoch.
pub fn utterance_control_functional(
    u_free_trace: [&[Vector]; 2],
    xi_trace: &[Vector],
    dt: f64,
) -> Result<[Vector; 2]> {
    check_epoch(u_free_trace[0].len(), "utterance control")?;
    if u_free_trace[1].len() != u_free_trace[0].len() || xi_trace.len() != u_free_trace[0].len() {
        return Err(Error::InvalidInput(
            "utterance control traces differ in length".into(),
        ));
    }
    Ok([
        trapezoid_mean(u_free_trace[0], dt)?,
        trapezoid_mean(u_free_trace[1], dt)?,
    ])
}

pub trait UtteranceStateMap: Send + Sync {
    fn evaluate(&self, epoch: &EpochTrace) -> Result<Vector>;
}

pub trait UtteranceControlMap: Send + Sync {
    fn evaluate(&self, epoch: &EpochTrace) -> Result<[Vector; 2]>;
}

/// `Φ(φ_{n−1}, vₙ; ξ|epoch) → φₙ`.
pub trait DiscreteStepMap: Send + Sync {
    fn step(&self, previous: &Vector, control: &[Vector; 2], epoch: &EpochTrace) -> Result<Vector>;
}

/// Weighted mean of the stacked ε-parameters.
#[derive(Debug, Clone, Default)]
pub struct MeanEpsilon {
    pub weights: Option<Matrix>,
}

impl UtteranceStateMap for MeanEpsilon {
    fn evaluate(&self, epoch: &EpochTrace) -> Result<Vector> {
        utterance_state_functional(
            [&epoch.epsilon[0], &epoch.epsilon[1]],
            &epoch.xi,
            epoch.dt,
            self.weights.as_ref(),
        )
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct MeanFreeControl;

impl UtteranceControlMap for MeanFreeControl {
    fn evaluate(&self, epoch: &EpochTrace) -> Result<[Vector; 2]> {
        utterance_control_functional([&epoch.u_free[0], &epoch.u_free[1]], &epoch.xi, epoch.dt)
    }
}

/// `φₙ = α·φ_{n−1} + β·(v₁ ⊕ v₂) + bias`.
#[derive(Debug, Clone)]
pub struct LinearStep {
    pub alpha: Matrix,
    pub beta: Matrix,
    pub bias: Vector,
}

impl DiscreteStepMap for LinearStep {
    fn step(
        &self,
        previous: &Vector,
        control: &[Vector; 2],
        _epoch: &EpochTrace,
    ) -> Result<Vector> {
        let v = stack(&[&control[0], &control[1]]);
        if self.alpha.ncols() != previous.len() {
            return Err(Error::dims(
                "discrete map α columns",
                previous.len(),
                self.alpha.ncols(),
            ));
        }
        if self.beta.ncols() != v.len() {
            return Err(Error::dims(
                "discrete map β columns",
                v.len(),
                self.beta.ncols(),
            ));
        }
        Ok(&self.alpha * previous + &self.beta * v + &self.bias)
    }
}

/// `φₙ = φ_{n−1}`.
#[derive(Debug, Clone, Copy, Default)]
pub struct HoldStep;

impl DiscreteStepMap for HoldStep {
    fn step(
        &self,
        previous: &Vector,
        _control: &[Vector; 2],
        _epoch: &EpochTrace,
    ) -> Result<Vector> {
        Ok(previous.clone())
    }
}

/// A dialogue: continuous game part, epoch schedule and the three known maps.
///
/// The game's φ is bookkeeping only; its intention field and feedbacks carry
/// the continuous dynamics.
#[derive(Clone)]
pub struct DialogueDefinition {
    game: GameDefinition,
    initial: GameState,
    schedule: Vec<f64>,
    state_map: Arc<dyn UtteranceStateMap>,
    control_map: Arc<dyn UtteranceControlMap>,
    step_map: Arc<dyn DiscreteStepMap>,
}

impl fmt::Debug for DialogueDefinition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DialogueDefinition")
            .field("game", &self.game)
            .field("initial", &self.initial)
            .field("schedule", &self.schedule)
            .finish_non_exhaustive()
    }
}

impl DialogueDefinition {
    pub fn new(
        game: GameDefinition,
        initial: GameState,
        schedule: Vec<f64>,
        state_map: Arc<dyn UtteranceStateMap>,
        control_map: Arc<dyn UtteranceControlMap>,
        step_map: Arc<dyn DiscreteStepMap>,
    ) -> Result<Self> {
        if schedule.len() < 2 {
            return Err(Error::InvalidInput(
                "epoch schedule needs at least two boundaries".into(),
            ));
        }
        if schedule.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput(
                "epoch schedule must be strictly increasing".into(),
            ));
        }
        if (schedule[0] - initial.time).abs() > crate::TIME_TOLERANCE {
            return Err(Error::InvalidInput(format!(
                "schedule starts at {} but the initial state is at {}",
                schedule[0], initial.time
            )));
        }
        Ok(Self {
            game,
            initial,
            schedule,
            state_map,
            control_map,
            step_map,
        })
    }

    pub fn game(&self) -> &GameDefinition {
        &self.game
    }

    pub fn initial(&self) -> &GameState {
        &self.initial
    }

    pub fn schedule(&self) -> &[f64] {
        &self.schedule
    }

    pub fn epoch_count(&self) -> usize {
        self.schedule.len() - 1
    }

    pub fn step_map(&self) -> &dyn DiscreteStepMap {
        self.step_map.as_ref()
    }

    /// Grid indices of the schedule for step `dt`; errors if any boundary is off-grid.
    pub fn grid_indices(&self, dt: f64) -> Result<Vec<usize>> {
        let t0 = self.schedule[0];
        self.schedule
            .iter()
            .map(|&t| {
                grid_index(t0, dt, t).ok_or_else(|| {
                    Error::InvalidInput(format!("epoch boundary {t} is not aligned with dt = {dt}"))
                })
            })
            .collect()
    }
}

/// One discrete step `(φₙ, vₙ)` over `[t_{n−1}, t_n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Utterance {
    /// 1-based epoch index `n`.
    pub index: usize,
    pub epoch: (f64, f64),
    pub state: Vector,
    pub control: [Vector; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct DialogueTranscript {
    pub utterances: Vec<Utterance>,
    /// The continuous trace the utterances were read from.
    pub trace: Trajectory,
    /// Grid indices of the schedule boundaries inside `trace`.
    pub boundary_indices: Vec<usize>,
    /// `‖φₙ − Φ(φ_{n−1}, vₙ; ξ)‖₂` for `n ≥ 2`.
    pub step_residuals: Vec<f64>,
}

impl DialogueTranscript {
    pub fn epoch_trace(&self, epoch: usize) -> Result<EpochTrace> {
        let eps = [0, 1].map(|i| self.trace.epsilon_truth(i).unwrap_or(&[]));
        EpochTrace::from_trajectory(
            &self.trace,
            eps,
            self.boundary_indices[epoch],
            self.boundary_indices[epoch + 1],
        )
    }
}

fn residuals(
    utterances: &[Utterance],
    traces: &[EpochTrace],
    step_map: &dyn DiscreteStepMap,
) -> Result<Vec<f64>> {
    utterances
        .windows(2)
        .zip(&traces[1..])
        .map(|(pair, trace)| {
            let predicted = step_map.step(&pair[0].state, &pair[1].control, trace)?;
            if predicted.len() != pair[1].state.len() {
                return Err(Error::dims(
                    "discrete map output",
                    pair[1].state.len(),
                    predicted.len(),
                ));
            }
            Ok((&pair[1].state - predicted).norm())
        })
        .collect()
}

/// Integrates ξ across all epochs without resets, evaluates the utterance
/// functionals per epoch and the step residuals against the discrete map.
pub fn run_dialogue(
    def: &DialogueDefinition,
    u_free_signals: &[SignalRef; 2],
    epsilon_signals: &[SignalRef; 2],
    dt: f64,
) -> Result<DialogueTranscript> {
    let indices = def.grid_indices(dt)?;
    let mut sim = Simulator::new(
        &def.game,
        def.initial.clone(),
        u_free_signals,
        epsilon_signals,
        dt,
    )?;
    for &idx in &indices[1..] {
        sim.advance(idx - sim.steps())?;
    }
    let trace = sim.finish();
    let eps = [0, 1].map(|i| trace.epsilon_truth(i).expect("simulated traces carry ε"));

    let mut utterances = Vec::with_capacity(def.epoch_count());
    let mut traces = Vec::with_capacity(def.epoch_count());
    for (n, w) in indices.windows(2).enumerate() {
        let epoch = EpochTrace::from_trajectory(&trace, eps, w[0], w[1])?;
        utterances.push(Utterance {
            index: n + 1,
            epoch: (epoch.start, epoch.end),
            state: def.state_map.evaluate(&epoch)?,
            control: def.control_map.evaluate(&epoch)?,
        });
        traces.push(epoch);
    }
    let step_residuals = residuals(&utterances, &traces, def.step_map.as_ref())?;
    Ok(DialogueTranscript {
        utterances,
        trace,
        boundary_indices: indices,
        step_residuals,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualStats {
    pub max: f64,
    pub mean: f64,
}

/// Recomputes the step residuals of a transcript against `step_map`.
pub fn check_step_consistency(
    transcript: &DialogueTranscript,
    step_map: &dyn DiscreteStepMap,
) -> Result<ResidualStats> {
    if transcript.utterances.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "step consistency needs at least 2 utterances, got {}",
            transcript.utterances.len()
        )));
    }
    let traces = (0..transcript.utterances.len())
        .map(|e| transcript.epoch_trace(e))
        .collect::<Result<Vec<_>>>()?;
    let res = residuals(&transcript.utterances, &traces, step_map)?;
    Ok(ResidualStats {
        max: res.iter().copied().fold(0.0, f64::max),
        mean: res.iter().sum::<f64>() / res.len() as f64,
    })
}
