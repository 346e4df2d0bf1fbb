use criterion::{black_box, criterion_group, criterion_main, Criterion};
use igame_bench::{recorded, scenario};
use igame_core::epsilon::{estimate_epsilon, prediction_error_profile};
use igame_core::verbalization::{verbalize, VerbalizationConfig};

fn bench_simulate(c: &mut Criterion) {
    let s = scenario("hidden-dialogue-1");
    c.bench_function("simulate hidden-dialogue-1", |b| {
        b.iter(|| black_box(s.simulate().unwrap()))
    });
}

fn bench_estimate(c: &mut Criterion) {
    let (s, traj) = recorded("verb-1");
    c.bench_function("estimate verb-1", |b| {
        b.iter(|| black_box(estimate_epsilon(&traj, &s.game).unwrap()))
    });
    c.bench_function("predict affine-1 anchors", |b| {
        let (a, at) = recorded("affine-1");
        b.iter(|| {
            black_box(prediction_error_profile(
                &a.game, &at, &a.anchors, a.horizon, &a.u_free,
            ))
        })
    });
}

fn bench_verbalize(c: &mut Criterion) {
    let cfg = VerbalizationConfig::default();
    for name in ["hidden-dialogue-1", "white-1"] {
        let (s, traj) = recorded(name);
        c.bench_function(&format!("verbalize {name}"), |b| {
            b.iter(|| black_box(verbalize(&traj, &s.game, &cfg).unwrap()))
        });
    }
}

criterion_group!(benches, bench_simulate, bench_estimate, bench_verbalize);
criterion_main!(benches);
