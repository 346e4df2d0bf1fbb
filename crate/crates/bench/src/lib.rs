//! Fixtures shared by the criterion benches.

use igame_core::scenarios::{build_scenario, GameScenario, ScenarioOverrides};
use igame_core::Trajectory;

/// A catalog game scenario with default overrides.
pub fn scenario(name: &str) -> GameScenario {
    build_scenario(name, &ScenarioOverrides::default())
        .and_then(|s| {
            s.into_game().ok_or_else(|| {
                igame_core::Error::InvalidInput(format!("{name} is not a game scenario"))
            })
        })
        .expect("catalog scenario")
}

/// The scenario together with its simulated trajectory.
pub fn recorded(name: &str) -> (GameScenario, Trajectory) {
    let s = scenario(name);
    let traj = s.simulate().expect("catalog scenarios integrate");
    (s, traj)
}
