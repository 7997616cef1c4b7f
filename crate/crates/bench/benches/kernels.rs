use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use pohozaev_core::coupled::{descend, Baselines};
use pohozaev_core::energy::{reduced_gradient, report};
use pohozaev_core::{
    EnergyParams, Nonlinearity, Profile, RadialGrid, ShootingConfig, SolveConfig, State,
};

fn bump(g: RadialGrid) -> Profile {
    Profile::from_fn(g, |r| {
        3.0 * (-r * r).exp() + 0.5 * (-(r - 2.0).powi(2)).exp()
    })
}

fn grid_ops(c: &mut Criterion) {
    let mut group = c.benchmark_group("grid");
    for n in [1000usize, 4000, 16000] {
        let g = RadialGrid::new(20.0, n).unwrap();
        let p = bump(g);
        group.bench_with_input(BenchmarkId::new("laplacian", n), &p, |b, p| {
            b.iter(|| black_box(p.laplacian()))
        });
        group.bench_with_input(BenchmarkId::new("kinetic", n), &p, |b, p| {
            b.iter(|| black_box(p.kinetic()))
        });
        group.bench_with_input(BenchmarkId::new("rearrange", n), &p, |b, p| {
            b.iter(|| black_box(p.rearrange()))
        });
    }
    group.finish();
}

fn energy(c: &mut Criterion) {
    let mut group = c.benchmark_group("energy");
    let params = EnergyParams::symmetric(Nonlinearity::cubic(), 2.0);
    for n in [1000usize, 4000, 16000] {
        let g = RadialGrid::new(20.0, n).unwrap();
        let s = State::new(bump(g), bump(g)).unwrap();
        group.bench_with_input(BenchmarkId::new("report", n), &s, |b, s| {
            b.iter(|| black_box(report(s, &params)))
        });
        group.bench_with_input(BenchmarkId::new("reduced_gradient", n), &s, |b, s| {
            b.iter(|| black_box(reduced_gradient(s, &params).unwrap()))
        });
    }
    group.finish();
}

fn solvers(c: &mut Criterion) {
    let mut group = c.benchmark_group("solvers");
    group.sample_size(10);
    let params = EnergyParams::symmetric(Nonlinearity::cubic(), 2.0);
    let g = RadialGrid::new(20.0, 4000).unwrap();
    let shooting = ShootingConfig::default();
    group.bench_function("scalar_cubic_4000", |b| {
        b.iter(|| {
            black_box(pohozaev_core::solve_scalar(&Nonlinearity::cubic(), &g, &shooting).unwrap())
        })
    });
    let base = Baselines::compute(&params, &g, &shooting).unwrap();
    let start = State::new(base.u0.profile.clone(), base.v0.profile.clone()).unwrap();
    let cfg = SolveConfig::default();
    group.bench_function("descent_scalar_pair_4000", |b| {
        b.iter(|| black_box(descend(&params, &start, &cfg).unwrap()))
    });
    group.bench_function("coupled_4000", |b| {
        b.iter(|| {
            black_box(
                pohozaev_core::coupled::solve_coupled_with_baselines(&params, &g, &cfg, &base)
                    .unwrap(),
            )
        })
    });
    group.finish();
}

criterion_group!(benches, grid_ops, energy, solvers);
criterion_main!(benches);
