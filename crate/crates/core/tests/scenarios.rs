use igame_core::scenarios::{
    build_scenario, Scenario, ScenarioOverrides, AFFINE_1_CLOSED_LOOP_EIGENVALUES, CATALOG,
};
use igame_core::{Error, Trajectory, Vector};
use sha2::{Digest, Sha256};

fn trajectory_digest(traj: &Trajectory) -> String {
    let mut h = Sha256::new();
    let mut feed = |xs: &[Vector]| {
        for x in xs {
            for v in x.iter() {
                h.update(v.to_le_bytes());
            }
        }
    };
    feed(traj.phi());
    feed(traj.xi());
    for i in 0..2 {
        feed(traj.u_free(i));
        feed(traj.u_realized(i));
        feed(traj.epsilon_truth(i).unwrap());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn trace(name: &str) -> Trajectory {
    match build_scenario(name, &ScenarioOverrides::default()).unwrap() {
        Scenario::Game(g) => g.simulate().unwrap(),
        Scenario::Dialogue(d) => d.run().unwrap().trace,
    }
}

const GOLDEN: &[(&str, &str)] = &[
    (
        "affine-1",
        "185ceba542f3bf1b3f0f7c19f6e4f4c834195853d1f98aa2af8a93ea70a54dde",
    ),
    (
        "drift-1",
        "402a016c51d2cca87374b9ae91f2c2506d76611c359c2c9b162ee7cf990dd5ea",
    ),
    (
        "jump-1",
        "73a6abfb8f4b1a7b8ef4dfae899f7de4f38db325f66d80cd6ec0a42bc0e13509",
    ),
    (
        "dlg-1",
        "8bb9ab4ce67526db50ec15d1bc7e18eb32be4f9f7d74bc40ab0ae8f57697e77b",
    ),
    (
        "dlg-incoherent",
        "8c4d0b0fa782e2b77dc7ca0ab8626c0fee53052ae142d59c0d74937a081d2dfc",
    ),
    (
        "verb-1",
        "8c641112f27c0278564e35e623799516512270b888534f8a619628a5ba6f03f6",
    ),
    (
        "hidden-dialogue-1",
        "fbf8bbee9f14c11c59baa184f77858897fcc9d260b6fdc94d56e3d31c77f8bee",
    ),
    (
        "white-1",
        "e8f85b18fd3596dcc5d42890a46619006b48f3c51d3e9cf7a6355bd508c35a70",
    ),
];

#[test]
fn catalog_is_frozen() {
    assert_eq!(GOLDEN.len(), CATALOG.len());
    for (name, digest) in GOLDEN {
        assert_eq!(&trajectory_digest(&trace(name)), digest, "{name}");
    }
}

#[test]
fn rebuilding_is_bit_identical() {
    for name in CATALOG {
        assert_eq!(trace(name), trace(name), "{name}");
    }
}

#[test]
fn seed_override_changes_random_scenarios_only() {
    let reseeded = ScenarioOverrides {
        seed: Some(42),
        ..Default::default()
    };
    let simulate = |name: &str, ov: &ScenarioOverrides| {
        build_scenario(name, ov)
            .unwrap()
            .into_game()
            .unwrap()
            .simulate()
            .unwrap()
    };
    assert_ne!(simulate("verb-1", &reseeded), trace("verb-1"));
    assert_eq!(simulate("affine-1", &reseeded), trace("affine-1"));
}

#[test]
fn affine_1_closed_loop_is_stable() {
    let s = build_scenario("affine-1", &ScenarioOverrides::default())
        .unwrap()
        .into_game()
        .unwrap();
    // Probe the linear closed loop column by column.
    let one = |x: f64| Vector::from_element(1, x);
    let rate = |phi: f64, xi: f64| -> [f64; 2] {
        let u: Vec<Vector> = (0..2)
            .map(|i| {
                s.game
                    .eval_feedback(i, &one(0.0), &[one(phi)], &one(xi), &one(0.0))
                    .unwrap()
            })
            .collect();
        [
            s.game.phi_rate(&one(phi), &one(xi), &u[0], &u[1]).unwrap()[0],
            s.game.xi_rate(&one(xi), &one(phi), &u[0], &u[1]).unwrap()[0],
        ]
    };
    let (c0, c1) = (rate(1.0, 0.0), rate(0.0, 1.0));
    let trace = c0[0] + c1[1];
    let det = c0[0] * c1[1] - c1[0] * c0[1];
    let disc = (trace * trace - 4.0 * det).sqrt();
    let eig = [(trace + disc) / 2.0, (trace - disc) / 2.0];
    for (got, pinned) in eig.iter().zip(AFFINE_1_CLOSED_LOOP_EIGENVALUES) {
        assert!(*got < 0.0);
        assert!((got - pinned).abs() < 1e-12, "{got} vs {pinned}");
    }
}

#[test]
fn hidden_dialogue_plan_has_twenty_epochs() {
    let s = build_scenario("hidden-dialogue-1", &ScenarioOverrides::default())
        .unwrap()
        .into_game()
        .unwrap();
    assert_eq!(s.planted_boundaries.len() + 1, 20);
    assert_eq!(s.t_end, 20.0);
    assert_eq!(s.dt, 0.01);
    assert!(s
        .planted_boundaries
        .iter()
        .enumerate()
        .all(|(k, &b)| b == (k + 1) as f64));
}

#[test]
fn unknown_scenario_lists_catalog() {
    match build_scenario("affine-2", &ScenarioOverrides::default()) {
        Err(Error::UnknownScenario { known, .. }) => assert_eq!(known.len(), CATALOG.len()),
        other => panic!("unexpected {other:?}"),
    }
}
