use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use geolens::config::RunConfig;
use geolens::lens::{uniform_grid, w_profile, BallPair};
use geolens::{Execution, ModelKind};

fn setup(kind: ModelKind) -> (RunConfig, BallPair) {
    let mut cfg = RunConfig::default();
    cfg.manifold.kind = kind;
    cfg.lens.big = 1.2;
    cfg.lens.small = 0.6;
    cfg.lens.grid = 40;
    cfg.lens.budget = 1024;
    let m = cfg.model().unwrap();
    let conv = cfg.convexity(&m, Execution::Sequential).unwrap();
    let bp = BallPair::new(&m, &cfg.direction(&m).unwrap(), 1.2, 0.6, conv).unwrap();
    (cfg, bp)
}

fn bench_profile(c: &mut Criterion) {
    let mut group = c.benchmark_group("w_profile");
    group.sample_size(10);
    for kind in [ModelKind::Euclidean, ModelKind::Sphere, ModelKind::Hyperbolic] {
        let (cfg, bp) = setup(kind);
        let plan = cfg.plan(bp.manifold(), bp.small_radius()).unwrap();
        let grid = uniform_grid(1.8, cfg.lens.grid);
        for exec in [Execution::Sequential, Execution::Parallel] {
            let opts = cfg.lens_options(exec);
            group.bench_with_input(BenchmarkId::new(format!("{exec:?}"), kind), &exec, |b, _| {
                b.iter(|| w_profile(&bp, &grid, &plan, &opts).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_profile);
criterion_main!(benches);
