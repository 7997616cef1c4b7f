//! Where the coupled ground state stops being scalar.
//!
//! `compare_energies` evaluates the explicit upper bound obtained by putting
//! both scalar ground states side by side; `sweep` solves the system on a
//! list of couplings and `bisect_beta0` refines a kind transition.

use rayon::prelude::*;

use crate::coupled::{solve_coupled_with_baselines, Baselines, GroundState, Kind, SolveConfig};
use crate::energy::{energy_i, projected_energy, EnergyParams};
use crate::error::{Error, Result};
use crate::grid::{RadialGrid, State};
use crate::scalar::ScalarGroundState;

/// Margin by which a vector energy must undercut the scalar one.
pub const BEATS_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    /// Reduced objective of the pair `(u0, v0)`, an upper bound for `m`.
    pub lhs: f64,
    /// `min { I(u0, 0), I(0, v0) }`.
    pub rhs: f64,
    pub beats: bool,
}

pub fn compare_energies(
    params: &EnergyParams,
    u0: &ScalarGroundState,
    v0: &ScalarGroundState,
    grid: &RadialGrid,
) -> Result<Comparison> {
    if !(params.beta > 0.0) {
        return Err(Error::NegativeBeta(params.beta));
    }
    if u0.profile.grid() != grid || v0.profile.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let zero = crate::grid::Profile::zeros(*grid);
    let pair = State::new(u0.profile.clone(), v0.profile.clone())?;
    let lhs = projected_energy(&pair, params)?;
    let iu = energy_i(&State::new(u0.profile.clone(), zero.clone())?, params);
    let iv = energy_i(&State::new(zero, v0.profile.clone())?, params);
    let rhs = iu.min(iv);
    Ok(Comparison {
        lhs,
        rhs,
        beats: lhs < rhs,
    })
}

/// A converged sweep row.
#[derive(Debug, Clone, PartialEq)]
pub struct Solved {
    pub m: f64,
    pub kind: Kind,
    pub vector_beats_scalar: bool,
    pub ground_state: GroundState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub beta: f64,
    /// Polished scalar competitor, shared by all rows.
    pub scalar_min: f64,
    /// `lhs` of [`compare_energies`] at this coupling (NaN if undefined).
    pub lhs_bound: f64,
    pub outcome: std::result::Result<Solved, Error>,
}

impl SweepRow {
    pub fn kind(&self) -> Option<Kind> {
        self.outcome.as_ref().ok().map(|s| s.kind)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// First pair of consecutive converged rows whose kinds differ in being
    /// vector.
    pub beta0_bracket: Option<(f64, f64)>,
}

impl SweepResult {
    pub fn failed(&self) -> usize {
        self.rows.iter().filter(|r| r.outcome.is_err()).count()
    }
}

/// Solves the system for every coupling in `beta_list`, in parallel.
///
/// A failing row keeps its error and does not stop the others.
pub fn sweep(
    params_base: &EnergyParams,
    beta_list: &[f64],
    grid: &RadialGrid,
    cfg: &SolveConfig,
) -> Result<SweepResult> {
    if beta_list.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::Config("beta_list must be sorted ascending".into()));
    }
    if beta_list.is_empty() {
        return Ok(SweepResult {
            rows: Vec::new(),
            beta0_bracket: None,
        });
    }
    cfg.validate()?;
    let baselines = Baselines::compute(params_base, grid, &cfg.shooting)?;
    sweep_with_baselines(params_base, beta_list, grid, cfg, &baselines)
}

pub fn sweep_with_baselines(
    params_base: &EnergyParams,
    beta_list: &[f64],
    grid: &RadialGrid,
    cfg: &SolveConfig,
    baselines: &Baselines,
) -> Result<SweepResult> {
    let scalar_min = baselines.polished_min(params_base);
    let rows: Vec<SweepRow> = beta_list
        .par_iter()
        .map(|&beta| {
            let params = EnergyParams {
                beta,
                ..params_base.clone()
            };
            let lhs_bound = compare_energies(&params, &baselines.u0, &baselines.v0, grid)
                .map(|c| c.lhs)
                .unwrap_or(f64::NAN);
            let outcome =
                solve_coupled_with_baselines(&params, grid, cfg, baselines).map(|gs| Solved {
                    m: gs.energy,
                    kind: gs.kind,
                    vector_beats_scalar: gs.energy < scalar_min - BEATS_MARGIN,
                    ground_state: gs,
                });
            SweepRow {
                beta,
                scalar_min,
                lhs_bound,
                outcome,
            }
        })
        .collect();
    let converged: Vec<(f64, Kind)> = rows
        .iter()
        .filter_map(|r| r.kind().map(|k| (r.beta, k)))
        .collect();
    let beta0_bracket = converged
        .windows(2)
        .find(|w| w[0].1.is_vector() != w[1].1.is_vector())
        .map(|w| (w[0].0, w[1].0));
    Ok(SweepResult {
        rows,
        beta0_bracket,
    })
}

/// Bisects on whether the computed ground state is vector until the bracket
/// is narrower than `tol`, and returns its midpoint.
pub fn bisect_beta0(
    params_base: &EnergyParams,
    bracket: (f64, f64),
    tol: f64,
    grid: &RadialGrid,
    cfg: &SolveConfig,
) -> Result<f64> {
    let (mut lo, mut hi) = bracket;
    if !(lo > 0.0 && lo < hi && hi.is_finite()) || !(tol > 0.0) {
        return Err(Error::InvalidBracket);
    }
    if hi - lo < tol {
        return Ok(0.5 * (lo + hi));
    }
    cfg.validate()?;
    let baselines = Baselines::compute(params_base, grid, &cfg.shooting)?;
    let is_vector = |beta: f64| -> Result<bool> {
        let params = EnergyParams {
            beta,
            ..params_base.clone()
        };
        Ok(
            solve_coupled_with_baselines(&params, grid, cfg, &baselines)?
                .kind
                .is_vector(),
        )
    };
    let (at_lo, at_hi) = rayon::join(|| is_vector(lo), || is_vector(hi));
    let at_lo = at_lo?;
    if at_lo == at_hi? {
        return Err(Error::InvalidBracket);
    }
    while hi - lo >= tol {
        let mid = 0.5 * (lo + hi);
        if is_vector(mid)? == at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlinearity::Nonlinearity;
    use crate::scalar::{solve_scalar, ShootingConfig};

    #[test]
    fn narrow_bracket_returns_midpoint_without_solving() {
        let g = RadialGrid::new(20.0, 64).unwrap();
        let p = EnergyParams::symmetric(Nonlinearity::cubic(), 1.0);
        let b = bisect_beta0(&p, (0.9, 1.1), 0.5, &g, &SolveConfig::default()).unwrap();
        assert!((b - 1.0).abs() < 1e-15);
    }

    #[test]
    fn malformed_bracket() {
        let g = RadialGrid::new(20.0, 64).unwrap();
        let p = EnergyParams::symmetric(Nonlinearity::cubic(), 1.0);
        assert_eq!(
            bisect_beta0(&p, (1.1, 0.9), 1e-2, &g, &SolveConfig::default()),
            Err(Error::InvalidBracket)
        );
    }

    #[test]
    fn empty_sweep() {
        let g = RadialGrid::new(20.0, 64).unwrap();
        let p = EnergyParams::symmetric(Nonlinearity::cubic(), 1.0);
        let r = sweep(&p, &[], &g, &SolveConfig::default()).unwrap();
        assert!(r.rows.is_empty());
        assert!(r.beta0_bracket.is_none());
    }

    #[test]
    fn unsorted_sweep_is_rejected() {
        let g = RadialGrid::new(20.0, 64).unwrap();
        let p = EnergyParams::symmetric(Nonlinearity::cubic(), 1.0);
        assert!(matches!(
            sweep(&p, &[2.0, 1.0], &g, &SolveConfig::default()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn comparison_needs_positive_beta() {
        let g = RadialGrid::new(20.0, 1000).unwrap();
        let gs = solve_scalar(&Nonlinearity::cubic(), &g, &ShootingConfig::default()).unwrap();
        let p = EnergyParams::symmetric(Nonlinearity::cubic(), 0.0);
        assert_eq!(
            compare_energies(&p, &gs, &gs, &g),
            Err(Error::NegativeBeta(0.0))
        );
    }
}
