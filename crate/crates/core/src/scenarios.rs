//! Frozen, seeded scenario catalog.
//!
//! Every named scenario is a pure function of its name, overrides and seed:
//! building the same scenario twice yields bit-identical generated data. All
//! randomness comes from [`crate::rng::SplitMix64`].
//!
//! The game scenarios share one scalar linear game
//!
//! ```text
//! φ̇ = −0.5·φ + 1.0·u₁ + 0.8·u₂ + 0.4·ξ
//! ξ̇ = −1.0·ξ + 0.5·φ
//! u₁ = u°₁ − 0.3·φ + 0.1·ξ + 1.0·ε₁
//! u₂ = u°₂ − 0.2·φ − 0.1·ξ + 0.7·ε₂
//! ```
//!
//! with `φ(0) = 1`, `ξ(0) = 0`. The dialogue scenarios use a scalar intention
//! field `ξ̇ = −ξ + 0.5·u₁ + 0.5·u₂` with feedbacks
//! `uᵢ = u°ᵢ + Qᵢ·ξ + εᵢ`, `Q = (−0.2, 0.3)`, and the discrete map
//! `φₙ = 0.6·φ_{n−1} + 0.5·vₙ`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dialogue::{
    held_closure, run_dialogue, utterance_control_functional, DialogueDefinition,
    DialogueTranscript, DiscreteStepMap, EpochTrace, LinearStep, MeanEpsilon, MeanFreeControl,
};
use crate::dynamics::{
    simulate, AffineFeedback, GameDefinition, GameState, LinearSystem, Trajectory,
};
use crate::rng::SplitMix64;
use crate::signal::{Constant, PiecewiseConstant, Ramp, SignalRef, Sinusoid};
use crate::{Error, Matrix, Result, Vector};

pub const CATALOG: [&str; 8] = [
    "affine-1",
    "drift-1",
    "jump-1",
    "dlg-1",
    "dlg-incoherent",
    "verb-1",
    "hidden-dialogue-1",
    "white-1",
];

/// Closed-loop eigenvalues of "affine-1" (state matrix of `(φ, ξ)` with the
/// feedbacks substituted): `[[−0.96, 0.42], [0.5, −1.0]]`.
pub const AFFINE_1_CLOSED_LOOP_EIGENVALUES: [f64; 2] =
    [-0.521_306_202_352_811_4, -1.438_693_797_647_188_6];

/// Coefficients of the planted recursion `ωₙ = 0.8·ω_{n−1} + 0.5·vₙ + 0.1`.
pub const PLANTED_RECURSION: (f64, f64, f64) = (0.8, 0.5, 0.1);

/// Smallest ε jump between consecutive planted epochs in "hidden-dialogue-1".
pub const PLANTED_MIN_JUMP: f64 = 0.5;

const BASE_GAINS: [(f64, f64, f64); 2] = [(-0.3, 0.1, 1.0), (-0.2, -0.1, 0.7)];

/// Caller-adjustable knobs. Fields a scenario does not use are ignored.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioOverrides {
    pub seed: Option<u64>,
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    /// Number of epochs (epoch-structured scenarios).
    pub epochs: Option<usize>,
    pub epoch_len: Option<f64>,
    /// Scalar ε-gains `(R₁, R₂)` of the feedbacks.
    pub epsilon_gain: Option<[f64; 2]>,
}

impl ScenarioOverrides {
    fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: Option<f64>| match v {
            Some(x) if !(x > 0.0) || !x.is_finite() => Err(Error::InvalidInput(format!(
                "override {name} must be positive, got {x}"
            ))),
            _ => Ok(()),
        };
        positive("dt", self.dt)?;
        positive("t_end", self.t_end)?;
        positive("epoch_len", self.epoch_len)?;
        if self.epochs == Some(0) {
            return Err(Error::InvalidInput("override epochs must be >= 1".into()));
        }
        if let Some(g) = self.epsilon_gain {
            if g.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput(
                    "override epsilon_gain must be finite".into(),
                ));
            }
        }
        Ok(())
    }
}

/// A continuous game with its exogenous signals and grid.
#[derive(Debug, Clone)]
pub struct GameScenario {
    pub name: String,
    pub seed: u64,
    pub game: GameDefinition,
    pub init: GameState,
    pub u_free: [SignalRef; 2],
    pub epsilon: [SignalRef; 2],
    pub t_end: f64,
    pub dt: f64,
    /// Default prediction anchors and horizon.
    pub anchors: Vec<f64>,
    pub horizon: f64,
    /// Planted interior epoch boundaries, when the scenario has any.
    pub planted_boundaries: Vec<f64>,
}

impl GameScenario {
    pub fn simulate(&self) -> Result<Trajectory> {
        simulate(
            &self.game,
            self.init.clone(),
            &self.u_free,
            &self.epsilon,
            self.t_end,
            self.dt,
        )
    }

    /// The same scenario with ε frozen at its initial value.
    pub fn constant_epsilon_control(&self) -> GameScenario {
        let t = self.init.time;
        GameScenario {
            name: format!("{}-control", self.name),
            epsilon: self
                .epsilon
                .each_ref()
                .map(|s| -> SignalRef { Arc::new(Constant(s.eval(t))) }),
            ..self.clone()
        }
    }
}

/// A dialogue with its exogenous signals and integration step.
#[derive(Debug, Clone)]
pub struct DialogueScenario {
    pub name: String,
    pub seed: u64,
    pub definition: DialogueDefinition,
    pub u_free: [SignalRef; 2],
    pub epsilon: [SignalRef; 2],
    pub dt: f64,
}

impl DialogueScenario {
    pub fn run(&self) -> Result<DialogueTranscript> {
        run_dialogue(&self.definition, &self.u_free, &self.epsilon, self.dt)
    }
}

#[derive(Debug, Clone)]
pub enum Scenario {
    Game(GameScenario),
    Dialogue(DialogueScenario),
}

impl Scenario {
    pub fn name(&self) -> &str {
        match self {
            Scenario::Game(g) => &g.name,
            Scenario::Dialogue(d) => &d.name,
        }
    }

    pub fn into_game(self) -> Option<GameScenario> {
        match self {
            Scenario::Game(g) => Some(g),
            Scenario::Dialogue(_) => None,
        }
    }

    pub fn into_dialogue(self) -> Option<DialogueScenario> {
        match self {
            Scenario::Dialogue(d) => Some(d),
            Scenario::Game(_) => None,
        }
    }

    /// The continuous game and its recorded trajectory: the simulation for a
    /// game scenario, the intention-field trace for a dialogue.
    pub fn continuous(&self) -> Result<(GameDefinition, Trajectory)> {
        match self {
            Scenario::Game(g) => Ok((g.game.clone(), g.simulate()?)),
            Scenario::Dialogue(d) => Ok((d.definition.game().clone(), d.run()?.trace)),
        }
    }
}

/// Linear recursion `ωₙ = α·ω_{n−1} + β·vₙ + bias` with starting value `ω₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecursionPlan {
    pub alpha: Matrix,
    pub beta: Matrix,
    pub bias: Vector,
    pub initial: Vector,
}

/// Epoch values `ω₁ … ω_N` of the plan and the piecewise-constant ε signal
/// (stacked over players) that holds `ωₙ` on epoch `n` of `boundaries`.
pub fn planted_recursion_epsilon(
    plan: &RecursionPlan,
    boundaries: &[f64],
    v_plan: &[Vector],
) -> Result<(Vec<Vector>, PiecewiseConstant)> {
    let epochs = boundaries.len().saturating_sub(1);
    if epochs == 0 || v_plan.len() != epochs {
        return Err(Error::InvalidInput(format!(
            "epoch plan with {} boundaries needs {} control values, got {}",
            boundaries.len(),
            epochs,
            v_plan.len()
        )));
    }
    let k = plan.initial.len();
    if plan.alpha.shape() != (k, k) || plan.beta.nrows() != k || plan.bias.len() != k {
        return Err(Error::InvalidInput(
            "recursion plan matrices are inconsistent".into(),
        ));
    }
    if let Some(bad) = v_plan.iter().find(|v| v.len() != plan.beta.ncols()) {
        return Err(Error::dims("planned control", plan.beta.ncols(), bad.len()));
    }
    let mut omega = Vec::with_capacity(epochs);
    let mut prev = plan.initial.clone();
    for v in v_plan {
        let next = &plan.alpha * &prev + &plan.beta * v + &plan.bias;
        omega.push(next.clone());
        prev = next;
    }
    let signal = PiecewiseConstant::new(boundaries[1..epochs].to_vec(), omega.clone())?;
    Ok((omega, signal))
}

fn scalar(x: f64) -> Vector {
    Vector::from_element(1, x)
}

fn scalar_matrix(x: f64) -> Matrix {
    Matrix::from_element(1, 1, x)
}

/// Splits a stacked signal into one scalar piecewise-constant signal per player.
fn split_players(signal: &PiecewiseConstant) -> Result<[SignalRef; 2]> {
    let part = |i: usize| -> Result<SignalRef> {
        Ok(Arc::new(PiecewiseConstant::new(
            signal.breaks().to_vec(),
            signal.values().iter().map(|v| scalar(v[i])).collect(),
        )?))
    };
    Ok([part(0)?, part(1)?])
}

fn base_game(epsilon_gain: Option<[f64; 2]>) -> Result<GameDefinition> {
    let r = epsilon_gain.unwrap_or([BASE_GAINS[0].2, BASE_GAINS[1].2]);
    let system = LinearSystem {
        a: scalar_matrix(-0.5),
        b: [scalar_matrix(1.0), scalar_matrix(0.8)],
        c: scalar_matrix(0.4),
        d: scalar_matrix(-1.0),
        e: scalar_matrix(0.5),
        f: [scalar_matrix(0.0), scalar_matrix(0.0)],
    };
    system.into_game([
        AffineFeedback::scalar(BASE_GAINS[0].0, BASE_GAINS[0].1, r[0]).into(),
        AffineFeedback::scalar(BASE_GAINS[1].0, BASE_GAINS[1].1, r[1]).into(),
    ])
}

fn base_init() -> GameState {
    GameState {
        time: 0.0,
        phi: scalar(1.0),
        xi: scalar(0.0),
    }
}

fn sinusoid_controls() -> [SignalRef; 2] {
    [
        Arc::new(Sinusoid {
            offset: scalar(0.1),
            amplitude: scalar(0.3),
            angular_freq: 1.3,
            phase: 0.0,
        }),
        Arc::new(Sinusoid {
            offset: scalar(-0.05),
            amplitude: scalar(0.2),
            angular_freq: 0.7,
            phase: 0.5,
        }),
    ]
}

fn random_walk_pair(
    rng: &mut SplitMix64,
    t_end: f64,
    interval: f64,
    step: f64,
) -> Result<[SignalRef; 2]> {
    let steps = (t_end / interval).ceil() as usize;
    let mut walk = || -> Result<SignalRef> {
        Ok(Arc::new(PiecewiseConstant::random_walk(
            scalar(0.0),
            0.0,
            interval,
            steps,
            step,
            rng,
        )?))
    };
    Ok([walk()?, walk()?])
}

fn epoch_boundaries(epochs: usize, epoch_len: f64) -> Vec<f64> {
    (0..=epochs).map(|k| k as f64 * epoch_len).collect()
}

struct Grid {
    t_end: f64,
    dt: f64,
}

fn game_scenario(
    name: &str,
    seed: u64,
    ov: &ScenarioOverrides,
    grid: Grid,
    u_free: [SignalRef; 2],
    epsilon: [SignalRef; 2],
) -> Result<GameScenario> {
    Ok(GameScenario {
        name: name.to_string(),
        seed,
        game: base_game(ov.epsilon_gain)?,
        init: base_init(),
        u_free,
        epsilon,
        t_end: grid.t_end,
        dt: grid.dt,
        anchors: Vec::new(),
        horizon: 1.0,
        planted_boundaries: Vec::new(),
    })
}

fn build_affine_1(ov: &ScenarioOverrides, seed: u64) -> Result<GameScenario> {
    let grid = Grid {
        t_end: ov.t_end.unwrap_or(10.0),
        dt: ov.dt.unwrap_or(0.01),
    };
    let u_free: [SignalRef; 2] = [Constant::scalar(0.2), Constant::scalar(-0.1)];
    let epsilon: [SignalRef; 2] = [Constant::scalar(0.5), Constant::scalar(-0.5)];
    let mut s = game_scenario("affine-1", seed, ov, grid, u_free, epsilon)?;
    s.anchors = vec![2.0, 5.0, 8.0];
    s.horizon = 1.0;
    Ok(s)
}

fn build_drift_1(ov: &ScenarioOverrides, seed: u64) -> Result<GameScenario> {
    let grid = Grid {
        t_end: ov.t_end.unwrap_or(10.0),
        dt: ov.dt.unwrap_or(0.01),
    };
    let epsilon: [SignalRef; 2] = [
        Arc::new(Ramp {
            base: scalar(0.3),
            slope: scalar(0.4),
            start: 5.0,
        }),
        Constant::scalar(-0.2),
    ];
    let mut s = game_scenario("drift-1", seed, ov, grid, sinusoid_controls(), epsilon)?;
    s.anchors = vec![5.0];
    s.horizon = 0.5;
    Ok(s)
}

fn build_jump_1(ov: &ScenarioOverrides, seed: u64) -> Result<GameScenario> {
    let grid = Grid {
        t_end: ov.t_end.unwrap_or(10.0),
        dt: ov.dt.unwrap_or(0.01),
    };
    let epsilon: [SignalRef; 2] = [
        Arc::new(PiecewiseConstant::new(
            vec![5.0],
            vec![scalar(0.2), scalar(0.8)],
        )?),
        Constant::scalar(-0.2),
    ];
    let mut s = game_scenario("jump-1", seed, ov, grid, sinusoid_controls(), epsilon)?;
    s.anchors = vec![4.5];
    s.horizon = 1.0;
    s.planted_boundaries = vec![5.0];
    Ok(s)
}

fn build_verb_1(ov: &ScenarioOverrides, seed: u64) -> Result<GameScenario> {
    let grid = Grid {
        t_end: ov.t_end.unwrap_or(10.0),
        dt: ov.dt.unwrap_or(0.01),
    };
    let mut rng = SplitMix64::new(seed);
    let u_free = random_walk_pair(&mut rng, grid.t_end, 0.25, 0.2)?;
    let epsilon = random_walk_pair(&mut rng, grid.t_end, 0.5, 0.3)?;
    let mut s = game_scenario("verb-1", seed, ov, grid, u_free, epsilon)?;
    s.anchors = vec![2.0, 6.0];
    Ok(s)
}

/// Draws per-epoch control means so consecutive planted ε values differ by at
/// least [`PLANTED_MIN_JUMP`] for some player.
fn planted_controls(rng: &mut SplitMix64, plan: &RecursionPlan, epochs: usize) -> Vec<Vector> {
    let mut v_plan: Vec<Vector> = Vec::with_capacity(epochs);
    let mut prev = plan.initial.clone();
    let mut prev_omega: Option<Vector> = None;
    for _ in 0..epochs {
        loop {
            let v = Vector::from_fn(plan.beta.ncols(), |_, _| rng.uniform(-2.0, 2.0));
            let omega = &plan.alpha * &prev + &plan.beta * &v + &plan.bias;
            let jump = prev_omega
                .as_ref()
                .map_or(f64::INFINITY, |p| (&omega - p).amax());
            if jump >= PLANTED_MIN_JUMP {
                prev = omega.clone();
                prev_omega = Some(omega);
                v_plan.push(v);
                break;
            }
        }
    }
    v_plan
}

fn build_hidden_dialogue_1(ov: &ScenarioOverrides, seed: u64) -> Result<GameScenario> {
    let epochs = ov.epochs.unwrap_or(20);
    let epoch_len = ov.epoch_len.unwrap_or(1.0);
    let dt = ov.dt.unwrap_or(0.01);
    let boundaries = epoch_boundaries(epochs, epoch_len);
    let (alpha, beta, bias) = PLANTED_RECURSION;
    let plan = RecursionPlan {
        alpha: Matrix::identity(2, 2) * alpha,
        beta: Matrix::identity(2, 2) * beta,
        bias: Vector::from_element(2, bias),
        initial: Vector::zeros(2),
    };
    let mut rng = SplitMix64::new(seed);
    let v_plan = planted_controls(&mut rng, &plan, epochs);
    let (_, eps_signal) = planted_recursion_epsilon(&plan, &boundaries, &v_plan)?;
    let u_signal = PiecewiseConstant::new(boundaries[1..epochs].to_vec(), v_plan)?;
    let grid = Grid {
        t_end: ov.t_end.unwrap_or(epochs as f64 * epoch_len),
        dt,
    };
    let mut s = game_scenario(
        "hidden-dialogue-1",
        seed,
        ov,
        grid,
        split_players(&u_signal)?,
        split_players(&eps_signal)?,
    )?;
    s.planted_boundaries = boundaries[1..epochs].to_vec();
    s.anchors = vec![2.5, 10.5];
    Ok(s)
}

fn build_white_1(ov: &ScenarioOverrides, seed: u64) -> Result<GameScenario> {
    let epoch_len = ov.epoch_len.unwrap_or(0.5);
    let grid = Grid {
        t_end: ov.t_end.unwrap_or(20.0),
        dt: ov.dt.unwrap_or(0.01),
    };
    let pieces = (grid.t_end / epoch_len).ceil() as usize;
    let mut rng = SplitMix64::new(seed);
    let u_free = random_walk_pair(&mut rng, grid.t_end, 0.25, 0.3)?;
    let breaks: Vec<f64> = (1..pieces).map(|k| k as f64 * epoch_len).collect();
    let mut iid = || -> Result<SignalRef> {
        let values = (0..pieces)
            .map(|_| scalar(rng.uniform(-1.0, 1.0)))
            .collect();
        Ok(Arc::new(PiecewiseConstant::new(breaks.clone(), values)?))
    };
    let epsilon = [iid()?, iid()?];
    game_scenario("white-1", seed, ov, grid, u_free, epsilon)
}

fn dialogue_game(epsilon_gain: Option<[f64; 2]>) -> Result<GameDefinition> {
    let r = epsilon_gain.unwrap_or([1.0, 1.0]);
    let system = LinearSystem {
        a: scalar_matrix(0.0),
        b: [scalar_matrix(0.0), scalar_matrix(0.0)],
        c: scalar_matrix(0.0),
        d: scalar_matrix(-1.0),
        e: scalar_matrix(0.0),
        f: [scalar_matrix(0.5), scalar_matrix(0.5)],
    };
    system.into_game([
        AffineFeedback::scalar(0.0, -0.2, r[0]).into(),
        AffineFeedback::scalar(0.0, 0.3, r[1]).into(),
    ])
}

fn dialogue_step_map() -> LinearStep {
    LinearStep {
        alpha: Matrix::identity(2, 2) * 0.6,
        beta: Matrix::identity(2, 2) * 0.5,
        bias: Vector::zeros(2),
    }
}

/// Epoch-mean free controls exactly as the dialogue engine will read them.
fn sampled_epoch_controls(
    u_free: &[SignalRef; 2],
    indices: &[usize],
    dt: f64,
) -> Result<Vec<[Vector; 2]>> {
    let last = *indices.last().expect("schedules are non-empty");
    let samples = u_free.each_ref().map(|s| {
        (0..=last)
            .map(|i| s.eval(i as f64 * dt))
            .collect::<Vec<_>>()
    });
    indices
        .windows(2)
        .map(|w| {
            let traces = samples.each_ref().map(|s| held_closure(s, w[0], w[1]));
            let xi = vec![Vector::zeros(1); traces[0].len()];
            utterance_control_functional([&traces[0], &traces[1]], &xi, dt)
        })
        .collect()
}

fn build_dialogue(
    name: &str,
    coherent: bool,
    ov: &ScenarioOverrides,
    seed: u64,
) -> Result<DialogueScenario> {
    let epochs = ov.epochs.unwrap_or(10);
    let epoch_len = ov.epoch_len.unwrap_or(1.0);
    let dt = ov.dt.unwrap_or(0.01);
    let schedule = epoch_boundaries(epochs, epoch_len);
    let game = dialogue_game(ov.epsilon_gain)?;
    let initial = GameState {
        time: 0.0,
        phi: scalar(0.0),
        xi: scalar(0.0),
    };
    let step_map = dialogue_step_map();
    let definition = DialogueDefinition::new(
        game,
        initial,
        schedule.clone(),
        Arc::new(MeanEpsilon::default()),
        Arc::new(MeanFreeControl),
        Arc::new(step_map.clone()),
    )?;
    let indices = definition.grid_indices(dt)?;

    let mut rng = SplitMix64::new(seed);
    let u_free = random_walk_pair(&mut rng, epochs as f64 * epoch_len, 0.1, 0.2)?;
    let mut values: Vec<Vector> = Vec::with_capacity(epochs);
    if coherent {
        let controls = sampled_epoch_controls(&u_free, &indices, dt)?;
        let dummy = EpochTrace {
            start: 0.0,
            end: 0.0,
            dt,
            epsilon: [Vec::new(), Vec::new()],
            u_free: [Vec::new(), Vec::new()],
            xi: Vec::new(),
            phi: Vec::new(),
        };
        values.push(Vector::from_fn(2, |_, _| rng.uniform(-0.5, 0.5)));
        for control in &controls[1..] {
            let next = step_map.step(values.last().expect("seeded above"), control, &dummy)?;
            values.push(next);
        }
    } else {
        for _ in 0..epochs {
            values.push(Vector::from_fn(2, |_, _| rng.uniform(-1.0, 1.0)));
        }
    }
    let stacked = PiecewiseConstant::new(schedule[1..epochs].to_vec(), values)?;
    Ok(DialogueScenario {
        name: name.to_string(),
        seed,
        definition,
        u_free,
        epsilon: split_players(&stacked)?,
        dt,
    })
}

fn default_seed(name: &str) -> u64 {
    match name {
        "verb-1" => 0x5EED_0006,
        "hidden-dialogue-1" => 0x5EED_0007,
        "white-1" => 0x5EED_0008,
        "dlg-1" => 0x5EED_0004,
        "dlg-incoherent" => 0x5EED_0005,
        _ => 0,
    }
}

/// Builds a catalog scenario.
pub fn build_scenario(name: &str, overrides: &ScenarioOverrides) -> Result<Scenario> {
    overrides.validate()?;
    let seed = overrides.seed.unwrap_or_else(|| default_seed(name));
    let scenario = match name {
        "affine-1" => Scenario::Game(build_affine_1(overrides, seed)?),
        "drift-1" => Scenario::Game(build_drift_1(overrides, seed)?),
        "jump-1" => Scenario::Game(build_jump_1(overrides, seed)?),
        "verb-1" => Scenario::Game(build_verb_1(overrides, seed)?),
        "hidden-dialogue-1" => Scenario::Game(build_hidden_dialogue_1(overrides, seed)?),
        "white-1" => Scenario::Game(build_white_1(overrides, seed)?),
        "dlg-1" => Scenario::Dialogue(build_dialogue("dlg-1", true, overrides, seed)?),
        "dlg-incoherent" => {
            Scenario::Dialogue(build_dialogue("dlg-incoherent", false, overrides, seed)?)
        }
        _ => {
            return Err(Error::UnknownScenario {
                name: name.to_string(),
                known: CATALOG.iter().map(|s| s.to_string()).collect(),
            })
        }
    };
    Ok(scenario)
}
