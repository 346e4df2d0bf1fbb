mod common;

use std::sync::Arc;

use igame_core::dialogue::{
    check_step_consistency, run_dialogue, utterance_control_functional, utterance_state_functional,
    DialogueDefinition, HoldStep, MeanEpsilon, MeanFreeControl,
};
use igame_core::scenarios::{build_scenario, DialogueScenario, ScenarioOverrides};
use igame_core::signal::{Constant, SignalRef};
use igame_core::{simulate, AffineFeedback, Dimensions, GameDefinition, GameState, Matrix, Vector};

fn scenario(name: &str) -> DialogueScenario {
    build_scenario(name, &ScenarioOverrides::default())
        .unwrap()
        .into_dialogue()
        .unwrap()
}

fn scalars(xs: impl IntoIterator<Item = f64>) -> Vec<Vector> {
    xs.into_iter().map(|x| Vector::from_element(1, x)).collect()
}

/// ZOH samples over `[start, end)` sampled from the signal, closed by repeating the last held value.
fn held_samples(
    signal: &SignalRef,
    t0: f64,
    dt: f64,
    start: usize,
    end: usize,
    coord: usize,
) -> Vec<f64> {
    let mut out: Vec<f64> = (start..end)
        .map(|k| signal.eval(t0 + k as f64 * dt)[coord])
        .collect();
    out.push(*out.last().unwrap());
    out
}

#[test]
fn consistent_dialogue_has_vanishing_residuals() {
    let s = scenario("dlg-1");
    let transcript = s.run().unwrap();
    assert_eq!(transcript.utterances.len(), s.definition.epoch_count());
    assert_eq!(transcript.utterances.len(), 10);
    assert_eq!(transcript.step_residuals.len(), 9);
    let worst = transcript
        .step_residuals
        .iter()
        .copied()
        .fold(0.0, f64::max);
    assert!(worst <= 1e-9, "max residual {worst}");
    let stats = check_step_consistency(&transcript, s.definition.step_map()).unwrap();
    assert!(stats.max <= 1e-9);
    assert_eq!(stats.max, worst);
}

#[test]
fn incoherent_dialogue_residuals_are_bounded_away_from_zero() {
    let s = scenario("dlg-incoherent");
    let transcript = s.run().unwrap();
    let stats = check_step_consistency(&transcript, s.definition.step_map()).unwrap();
    assert!(stats.max > 0.1, "max {}", stats.max);
    assert!(stats.mean > 0.01, "mean {}", stats.mean);
}

#[test]
fn epoch_by_epoch_equals_one_pass() {
    let s = scenario("dlg-1");
    let transcript = s.run().unwrap();
    let end = *s.definition.schedule().last().unwrap();
    let one_pass = simulate(
        s.definition.game(),
        s.definition.initial().clone(),
        &s.u_free,
        &s.epsilon,
        end,
        s.dt,
    )
    .unwrap();
    assert_eq!(transcript.trace.xi(), one_pass.xi());
    assert_eq!(transcript.trace, one_pass);
}

#[test]
fn utterance_states_are_epoch_means_of_epsilon() {
    let s = scenario("dlg-1");
    let transcript = s.run().unwrap();
    let t0 = s.definition.schedule()[0];
    for (n, u) in transcript.utterances.iter().enumerate() {
        let (a, b) = (
            transcript.boundary_indices[n],
            transcript.boundary_indices[n + 1],
        );
        for p in 0..2 {
            let oracle =
                common::trapezoid_average(&held_samples(&s.epsilon[p], t0, s.dt, a, b, 0), s.dt);
            assert!((u.state[p] - oracle).abs() <= 1e-12, "epoch {n} player {p}");
        }
        assert_eq!(u.index, n + 1);
    }
}

#[test]
fn utterance_controls_match_direct_quadrature() {
    let s = scenario("dlg-1");
    let transcript = s.run().unwrap();
    let t0 = s.definition.schedule()[0];
    for (n, u) in transcript.utterances.iter().enumerate() {
        let (a, b) = (
            transcript.boundary_indices[n],
            transcript.boundary_indices[n + 1],
        );
        for p in 0..2 {
            let oracle =
                common::trapezoid_average(&held_samples(&s.u_free[p], t0, s.dt, a, b, 0), s.dt);
            assert!(
                (u.control[p][0] - oracle).abs() <= 1e-12,
                "epoch {n} player {p}"
            );
        }
    }
}

#[test]
fn functional_examples() {
    let xi = scalars([0.0; 101]);
    let ramp = scalars((0..=100).map(|k| k as f64 / 100.0));
    let flat = scalars([0.4; 101]);
    let v = utterance_control_functional([&ramp, &flat], &xi, 0.01).unwrap();
    assert!((v[0][0] - 0.5).abs() < 1e-12);
    assert!((v[1][0] - 0.4).abs() < 1e-15);

    let zero_weights = Matrix::zeros(2, 2);
    let phi = utterance_state_functional([&ramp, &flat], &xi, 0.01, Some(&zero_weights)).unwrap();
    assert_eq!(phi, Vector::zeros(2));

    let short = scalars([1.0]);
    assert!(utterance_state_functional([&short, &short], &short, 0.01, None).is_err());
    assert!(utterance_control_functional([&short, &short], &short, 0.01).is_err());
}

fn quiet_game() -> GameDefinition {
    let fb = || AffineFeedback::scalar(0.0, 0.0, 1.0).into();
    GameDefinition::new(
        Dimensions::scalar(),
        |_, _, _, _| Vector::zeros(1),
        |_, _, _, _| Vector::zeros(1),
        [fb(), fb()],
    )
    .unwrap()
}

fn hold_definition(schedule: Vec<f64>) -> igame_core::Result<DialogueDefinition> {
    DialogueDefinition::new(
        quiet_game(),
        GameState::new(0.0, Vector::zeros(1), Vector::zeros(1)).unwrap(),
        schedule,
        Arc::new(MeanEpsilon::default()),
        Arc::new(MeanFreeControl),
        Arc::new(HoldStep),
    )
}

#[test]
fn zero_signals_with_hold_map_have_zero_residuals() {
    let def = hold_definition(vec![0.0, 0.5, 1.0, 1.5, 2.0]).unwrap();
    let zero: [SignalRef; 2] = [Constant::scalar(0.0), Constant::scalar(0.0)];
    let transcript = run_dialogue(&def, &zero, &zero, 0.01).unwrap();
    assert_eq!(transcript.utterances.len(), 4);
    assert!(transcript.step_residuals.iter().all(|&r| r == 0.0));
    let stats = check_step_consistency(&transcript, &HoldStep).unwrap();
    assert_eq!((stats.max, stats.mean), (0.0, 0.0));
}

#[test]
fn schedule_validation() {
    assert!(hold_definition(vec![0.0]).is_err());
    assert!(hold_definition(vec![0.0, 1.0, 1.0]).is_err());
    assert!(hold_definition(vec![0.5, 1.0]).is_err());
    let def = hold_definition(vec![0.0, 0.505, 1.0]).unwrap();
    let zero: [SignalRef; 2] = [Constant::scalar(0.0), Constant::scalar(0.0)];
    assert!(run_dialogue(&def, &zero, &zero, 0.01).is_err());
}

#[test]
fn single_utterance_cannot_be_checked() {
    let def = hold_definition(vec![0.0, 1.0]).unwrap();
    let zero: [SignalRef; 2] = [Constant::scalar(0.0), Constant::scalar(0.0)];
    let transcript = run_dialogue(&def, &zero, &zero, 0.1).unwrap();
    assert!(transcript.step_residuals.is_empty());
    assert!(check_step_consistency(&transcript, &HoldStep).is_err());
}
