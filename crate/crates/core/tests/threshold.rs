use pohozaev_core::threshold::{bisect_beta0, compare_energies, sweep};
use pohozaev_core::{
    EnergyParams, Error, Kind, Nonlinearity, RadialGrid, ScalarGroundState, ShootingConfig,
    SolveConfig,
};
use proptest::prelude::*;
use std::sync::OnceLock;

fn grid(n: usize) -> RadialGrid {
    RadialGrid::new(20.0, n).unwrap()
}

fn cubic(beta: f64) -> EnergyParams {
    EnergyParams::symmetric(Nonlinearity::cubic(), beta)
}

fn ground_state() -> &'static ScalarGroundState {
    static GS: OnceLock<ScalarGroundState> = OnceLock::new();
    GS.get_or_init(|| {
        pohozaev_core::solve_scalar(
            &Nonlinearity::cubic(),
            &grid(4000),
            &ShootingConfig::default(),
        )
        .unwrap()
    })
}

#[test]
fn side_by_side_bound_for_the_cubic() {
    // For the cubic, K = 3M and P = M on a ground state, so the pair (w, w)
    // has reduced objective 2M / sqrt(1 + 2 beta) while I(w, 0) = M.
    let w = ground_state();
    for beta in [0.01, 0.5, 1.0, 1.5, 2.0, 3.0, 10.0] {
        let c = compare_energies(&cubic(beta), w, w, &grid(4000)).unwrap();
        let ratio = c.lhs / c.rhs;
        let oracle = 2.0 / (1.0 + 2.0 * beta).sqrt();
        assert!(
            (ratio - oracle).abs() < 1e-4,
            "beta {beta}: {ratio} vs {oracle}"
        );
        assert!((c.rhs - w.action).abs() < 1e-12 * w.action);
        if beta >= 2.0 {
            assert!(c.beats);
        }
        if beta <= 1.0 {
            assert!(!c.beats);
        }
    }
}

#[test]
fn mismatched_grid_is_rejected() {
    let w = ground_state();
    assert_eq!(
        compare_energies(&cubic(1.0), w, w, &grid(2000)),
        Err(Error::GridMismatch)
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bound_decreases_with_coupling(a in 0.01f64..20.0, gap in 1e-3f64..5.0) {
        let w = ground_state();
        let lo = compare_energies(&cubic(a), w, w, &grid(4000)).unwrap();
        let hi = compare_energies(&cubic(a + gap), w, w, &grid(4000)).unwrap();
        prop_assert!(hi.lhs < lo.lhs);
        prop_assert_eq!(hi.rhs, lo.rhs);
    }
}

#[test]
fn six_point_sweep_brackets_the_transition() {
    let g = grid(2000);
    let betas = [0.1, 0.5, 0.9, 1.1, 2.0, 5.0];
    let r = sweep(&cubic(1.0), &betas, &g, &SolveConfig::default()).unwrap();
    assert_eq!(r.rows.len(), betas.len());
    assert_eq!(r.failed(), 0);
    let (lo, hi) = r.beta0_bracket.unwrap();
    assert!(lo >= 0.9 && hi <= 1.1);
    let mut seen_vector = false;
    for (row, beta) in r.rows.iter().zip(betas) {
        assert_eq!(row.beta, beta);
        let s = row.outcome.as_ref().unwrap();
        assert!(s.m <= row.lhs_bound + 1e-9);
        assert_eq!(s.vector_beats_scalar, s.m < row.scalar_min - 1e-9);
        if seen_vector {
            assert_eq!(s.kind, Kind::Vector);
        }
        seen_vector |= s.kind.is_vector();
        // The symmetric-ansatz energy 2 I / (1 + beta) when below I.
        if beta > 1.0 {
            let oracle = 2.0 * row.scalar_min / (1.0 + beta);
            assert!((s.m - oracle).abs() < 1e-6 * oracle);
        } else {
            assert!((s.m - row.scalar_min).abs() < 1e-9 * s.m);
        }
    }
}

#[test]
fn a_failing_row_leaves_the_rest() {
    let g = grid(1000);
    let r = sweep(&cubic(1.0), &[-1.0, 2.0], &g, &SolveConfig::default()).unwrap();
    assert_eq!(r.rows[0].outcome, Err(Error::NegativeBeta(-1.0)));
    assert!(r.rows[0].lhs_bound.is_nan());
    assert_eq!(r.rows[1].kind(), Some(Kind::Vector));
    assert_eq!(r.failed(), 1);
    assert!(r.beta0_bracket.is_none());
}

#[test]
fn bisection_finds_the_unit_threshold() {
    let b = bisect_beta0(
        &cubic(1.0),
        (0.9, 1.1),
        1e-2,
        &grid(2000),
        &SolveConfig::default(),
    )
    .unwrap();
    assert!((b - 1.0).abs() <= 0.02, "{b}");
}

#[test]
fn bracket_without_transition() {
    let r = bisect_beta0(
        &cubic(1.0),
        (1.5, 2.0),
        1e-2,
        &grid(1000),
        &SolveConfig::default(),
    );
    assert_eq!(r, Err(Error::InvalidBracket));
}
