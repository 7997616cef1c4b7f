use pohozaev_core::coupled::{
    certify, certify_state, classify, descend, solve_coupled, solve_coupled_with_baselines,
    Baselines, InitStrategy, Kind, SolveConfig,
};
use pohozaev_core::energy::{energy_i, report, residuals, EnergyParams};
use pohozaev_core::grid::{Profile, RadialGrid, State};
use pohozaev_core::nonlinearity::Nonlinearity;
use pohozaev_core::scalar::{solve_scalar, ShootingConfig};
use pohozaev_core::Error;
use proptest::prelude::*;

fn grid(n: usize) -> RadialGrid {
    RadialGrid::new(20.0, n).unwrap()
}

fn cubic(beta: f64) -> EnergyParams {
    EnergyParams::symmetric(Nonlinearity::cubic(), beta)
}

fn scale(p: &Profile, c: f64) -> Profile {
    Profile::new(*p.grid(), p.values().iter().map(|x| c * x).collect()).unwrap()
}

#[test]
fn equal_split_ansatz_solves_the_system() {
    // u = v = w / sqrt(1 + beta) turns both equations into the scalar one.
    let g = grid(4000);
    let w = solve_scalar(&Nonlinearity::cubic(), &g, &ShootingConfig::default()).unwrap();
    let p = cubic(2.0);
    let c = 1.0 / 3f64.sqrt();
    let s = State::new(scale(&w.profile, c), scale(&w.profile, c)).unwrap();
    let (ru, rv) = residuals(&s, &p);
    assert!(ru < 1e-8 && rv < 1e-8, "{ru} {rv}");
    assert!((energy_i(&s, &p) - 2.0 * w.action / 3.0).abs() < 1e-9 * w.action);
}

#[test]
fn strong_coupling_gives_vector_ground_state() {
    let g = grid(4000);
    let w = solve_scalar(&Nonlinearity::cubic(), &g, &ShootingConfig::default()).unwrap();
    let gs = solve_coupled(&cubic(2.0), &g, &SolveConfig::default()).unwrap();
    assert_eq!(gs.kind, Kind::Vector);
    let oracle = 2.0 * w.action / 3.0;
    assert!(
        (gs.energy - oracle).abs() < 0.01 * oracle,
        "{} vs {oracle}",
        gs.energy
    );
    // The discrete optimum sits far closer than the 1% contract.
    assert!((gs.energy - oracle).abs() < 1e-6 * oracle);
}

#[test]
fn weak_coupling_gives_scalar_ground_state() {
    let g = grid(4000);
    let w = solve_scalar(&Nonlinearity::cubic(), &g, &ShootingConfig::default()).unwrap();
    let gs = solve_coupled(&cubic(0.1), &g, &SolveConfig::default()).unwrap();
    assert!(!gs.kind.is_vector(), "{:?}", gs.kind);
    assert!((gs.energy - w.action).abs() < 1e-3 * w.action);
}

#[test]
fn stronger_component_wins_at_weak_coupling() {
    // -Lap v + v = 2 v^3 is solved by w / sqrt(2), with half the action.
    let g = grid(4000);
    let w = solve_scalar(&Nonlinearity::cubic(), &g, &ShootingConfig::default()).unwrap();
    let p = EnergyParams::new(
        Nonlinearity::cubic(),
        Nonlinearity::power_sum(&[(2.0, 3.0)]).unwrap(),
        0.1,
    );
    let gs = solve_coupled(&p, &g, &SolveConfig::default()).unwrap();
    assert_eq!(gs.kind, Kind::ScalarV);
    assert!((gs.energy - 0.5 * w.action).abs() < 1e-3 * w.action);
}

#[test]
fn symmetric_start_stays_symmetric() {
    let g = grid(4000);
    let cfg = SolveConfig {
        init_strategy: vec![InitStrategy::ScalarPair],
        ..SolveConfig::default()
    };
    let gs = solve_coupled(&cubic(2.0), &g, &cfg).unwrap();
    assert_eq!(gs.origin, "scalar_pair");
    let (u, v) = (gs.state.u.values(), gs.state.v.values());
    let top = u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    for (a, b) in u.iter().zip(v) {
        assert!((a - b).abs() <= 1e-4 * top);
    }
}

#[test]
fn swapping_the_equations_swaps_the_answer() {
    let g = grid(2000);
    let f = Nonlinearity::cubic();
    let h = Nonlinearity::power_sum(&[(1.0, 3.0), (0.5, 2.5)]).unwrap();
    let a = solve_coupled(
        &EnergyParams::new(f.clone(), h.clone(), 1.5),
        &g,
        &SolveConfig::default(),
    )
    .unwrap();
    let b = solve_coupled(&EnergyParams::new(h, f, 1.5), &g, &SolveConfig::default()).unwrap();
    assert!(
        (a.energy - b.energy).abs() < 1e-8 * a.energy,
        "{} {}",
        a.energy,
        b.energy
    );
    let flip = |k: Kind| match k {
        Kind::ScalarU => Kind::ScalarV,
        Kind::ScalarV => Kind::ScalarU,
        Kind::Vector => Kind::Vector,
    };
    assert_eq!(a.kind, flip(b.kind));
}

#[test]
fn descent_trace_never_increases() {
    let g = grid(2000);
    let p = cubic(1.5);
    let b = Baselines::compute(&p, &g, &ShootingConfig::default()).unwrap();
    let start = State::new(b.u0.profile.clone(), scale(&b.v0.profile, 0.1)).unwrap();
    let d = descend(&p, &start, &SolveConfig::default()).unwrap();
    assert!(d.converged);
    assert!(d.trace.len() > 10);
    assert!(d.trace.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn never_worse_than_the_scalar_baselines() {
    let g = grid(2000);
    for beta in [0.3, 0.8, 1.3, 3.0] {
        let p = cubic(beta);
        let b = Baselines::compute(&p, &g, &ShootingConfig::default()).unwrap();
        let gs = solve_coupled_with_baselines(&p, &g, &SolveConfig::default(), &b).unwrap();
        assert!(gs.energy <= b.polished_min(&p) + 1e-9);
        assert!(gs.energy > 0.0);
        let rep = report(&gs.state, &p);
        assert!(rep.J.abs() <= 1e-6 * (1.0 + rep.K));
        assert!((rep.I - rep.K / 3.0).abs() <= 1e-6 * (1.0 + rep.K));
    }
}

#[test]
fn baselines_do_not_depend_on_beta() {
    let g = grid(2000);
    let a = Baselines::compute(&cubic(0.2), &g, &ShootingConfig::default()).unwrap();
    let b = Baselines::compute(&cubic(7.0), &g, &ShootingConfig::default()).unwrap();
    assert!((a.u0.action - b.u0.action).abs() <= 1e-12 * a.u0.action);
    assert!(
        (a.polished_min(&cubic(0.2)) - b.polished_min(&cubic(7.0))).abs() <= 1e-12 * a.u0.action
    );
}

#[test]
fn same_seed_same_bits() {
    let g = grid(1000);
    let cfg = SolveConfig {
        seed: 7,
        ..SolveConfig::default()
    };
    let a = solve_coupled(&cubic(2.0), &g, &cfg).unwrap();
    let b = solve_coupled(&cubic(2.0), &g, &cfg).unwrap();
    assert_eq!(a.state, b.state);
    assert_eq!(a.origin, b.origin);
}

#[test]
fn certificate_on_a_fine_grid() {
    let g = grid(16000);
    let p = cubic(2.0);
    let gs = solve_coupled(&p, &g, &SolveConfig::default()).unwrap();
    let rep = certify(&gs, &p).unwrap();
    assert!(rep.residual_u < 1e-5 && rep.residual_v < 1e-5);

    // Scalar solutions lie on the manifold too; the solver's embedding of
    // the scalar ground state certifies as is.
    let b = Baselines::compute(&p, &g, &ShootingConfig::default()).unwrap();
    certify_state(&b.scalar_u, &p).unwrap();
    certify_state(&b.scalar_v, &p).unwrap();
    let raw = State::new(b.u0.profile.clone(), Profile::zeros(g)).unwrap();
    let rep = report(&raw, &p);
    assert!(rep.residual_u < 1e-5);
    assert!(rep.J.abs() < 2e-6 * (1.0 + rep.K));

    let noisy: Vec<f64> = gs
        .state
        .u
        .values()
        .iter()
        .enumerate()
        .map(|(i, x)| {
            if i < g.intervals() {
                x + 1e-2 * ((i * 7919 % 200) as f64 / 100.0 - 1.0)
            } else {
                0.0
            }
        })
        .collect();
    let noisy = State::new(Profile::new(g, noisy).unwrap(), gs.state.v.clone()).unwrap();
    match certify_state(&noisy, &p) {
        Err(Error::CertificationFailure { clause, .. }) => assert_eq!(clause, "residual"),
        other => panic!("noise passed certification: {other:?}"),
    }
}

#[test]
fn default_grid_misses_only_the_residual_clause() {
    let g = grid(4000);
    let p = cubic(2.0);
    let gs = solve_coupled(&p, &g, &SolveConfig::default()).unwrap();
    match certify(&gs, &p) {
        Err(Error::CertificationFailure { clause, .. }) => assert_eq!(clause, "residual"),
        Ok(_) => {}
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn scalar_embeddings_classify() {
    let g = grid(1000);
    let w = solve_scalar(&Nonlinearity::cubic(), &g, &ShootingConfig::default()).unwrap();
    let z = Profile::zeros(g);
    assert_eq!(
        classify(&State::new(w.profile.clone(), z.clone()).unwrap(), 1e-6),
        Ok(Kind::ScalarU)
    );
    assert_eq!(
        classify(&State::new(z.clone(), w.profile.clone()).unwrap(), 1e-6),
        Ok(Kind::ScalarV)
    );
    assert_eq!(
        classify(&State::new(z.clone(), z).unwrap(), 1e-6),
        Err(Error::ZeroState)
    );
}

#[test]
fn rejected_inputs() {
    let g = grid(500);
    assert_eq!(
        solve_coupled(&cubic(-1.0), &g, &SolveConfig::default()).unwrap_err(),
        Error::NegativeBeta(-1.0)
    );
    assert_eq!(
        solve_coupled(&cubic(0.0), &g, &SolveConfig::default()).unwrap_err(),
        Error::NegativeBeta(0.0)
    );
    for cfg in [
        SolveConfig {
            grad_tol: 0.0,
            ..SolveConfig::default()
        },
        SolveConfig {
            backtrack: 1.0,
            ..SolveConfig::default()
        },
        SolveConfig {
            max_iters: 0,
            ..SolveConfig::default()
        },
        SolveConfig {
            init_strategy: vec![],
            ..SolveConfig::default()
        },
    ] {
        assert!(
            matches!(solve_coupled(&cubic(1.0), &g, &cfg), Err(Error::Config(_))),
            "{cfg:?}"
        );
    }
}

#[test]
fn exhausted_budget_is_reported() {
    let g = grid(1000);
    let cfg = SolveConfig {
        max_iters: 3,
        ..SolveConfig::default()
    };
    assert!(matches!(
        solve_coupled(&cubic(2.0), &g, &cfg),
        Err(Error::NoConvergence(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn classification_ignores_scale_and_follows_swaps(
        a in 0.1f64..5.0,
        b in prop_oneof![Just(0.0), 1e-9f64..1e-8, 0.01f64..5.0],
        width in 0.5f64..3.0,
        c in 0.01f64..100.0,
    ) {
        let g = grid(200);
        let u = Profile::from_fn(g, |r| a * (-(r / width).powi(2)).exp());
        let v = Profile::from_fn(g, |r| b * (-(r / width).powi(2)).exp());
        let s = State::new(u, v).unwrap();
        let k = classify(&s, 1e-6).unwrap();
        let big = State::new(scale(&s.u, c), scale(&s.v, c)).unwrap();
        prop_assert_eq!(classify(&big, 1e-6).unwrap(), k);
        let flipped = classify(&s.swapped(), 1e-6).unwrap();
        let expect = match k { Kind::ScalarU => Kind::ScalarV, Kind::ScalarV => Kind::ScalarU, Kind::Vector => Kind::Vector };
        prop_assert_eq!(flipped, expect);
        prop_assert_eq!(k == Kind::ScalarU, b < 1e-3);
    }
}
