//! Radial ground states of `-Lap w + w = f(w)` in 3D.
//!
//! The center value is found by shooting: `w'' + (2/r) w' - w + f(w) = 0`
//! with `w(0) = a`, `w'(0) = 0` either overshoots (crosses zero) or
//! undershoots (turns back up), and the ground state sits on the boundary
//! between the two. The bisected trajectory is resampled onto the grid, its
//! unreliable tail replaced by the linear decay `C e^{-r} / r`, and the result
//! is polished by Newton's method on the discrete equation.

use crate::energy::{residuals, EnergyParams};
use crate::error::{Error, Result};
use crate::grid::{Profile, RadialGrid, State};
use crate::linalg::solve_tridiagonal;
use crate::nonlinearity::Nonlinearity;

/// Shooting trajectories whose magnitude exceeds this are reported as blowup.
pub const BLOWUP: f64 = 1e6;
/// A trajectory below this level while still decreasing is reported as decayed.
pub const DECAY_LEVEL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingConfig {
    pub a_min: f64,
    pub a_max: f64,
    /// Integration step; `None` means a quarter of the grid spacing.
    pub ode_step: Option<f64>,
    pub max_bisect: usize,
    /// Radius up to which outcomes are classified; `None` means the grid radius.
    pub classify_radius: Option<f64>,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        ShootingConfig {
            a_min: 0.1,
            a_max: 50.0,
            ode_step: None,
            max_bisect: 200,
            classify_radius: None,
        }
    }
}

impl ShootingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.a_min > 0.0 && self.a_min < self.a_max && self.a_max.is_finite()) {
            return Err(Error::Config(format!(
                "shooting bracket must satisfy 0 < a_min < a_max, got [{}, {}]",
                self.a_min, self.a_max
            )));
        }
        if let Some(s) = self.ode_step {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::Config(format!("ode_step must be positive, got {s}")));
            }
        }
        if let Some(r) = self.classify_radius {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::Config(format!(
                    "classify_radius must be positive, got {r}"
                )));
            }
        }
        if self.max_bisect == 0 {
            return Err(Error::Config("max_bisect must be at least 1".into()));
        }
        Ok(())
    }

    fn step_for(&self, grid: &RadialGrid) -> f64 {
        self.ode_step.unwrap_or(grid.spacing() / 4.0)
    }

    fn radius_for(&self, grid: &RadialGrid) -> f64 {
        self.classify_radius.unwrap_or(grid.radius())
    }
}

/// Fate of a single shooting trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shot {
    /// `w` reached zero with `w' < 0` at this radius.
    Crosses(f64),
    /// `w'` became nonnegative while `w > 0` at this radius (or the
    /// trajectory reached the classification radius without decaying).
    TurnsUp(f64),
    /// `w` fell below `DECAY_LEVEL` while positive and decreasing.
    Decays,
}

impl Shot {
    fn overshoots(&self) -> bool {
        matches!(self, Shot::Crosses(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarGroundState {
    pub profile: Profile,
    pub center_value: f64,
    pub action: f64,
    pub residual: f64,
}

struct Trajectory {
    step: f64,
    w: Vec<f64>,
    dw: Vec<f64>,
}

impl Trajectory {
    /// Cubic Hermite value at radius `r`, or `None` beyond the recorded range.
    fn at(&self, r: f64) -> Option<f64> {
        let x = r / self.step;
        let k = x.floor() as usize;
        if k + 1 >= self.w.len() {
            return if k + 1 == self.w.len() && x == k as f64 {
                Some(self.w[k])
            } else {
                None
            };
        }
        let s = x - k as f64;
        let (h00, h10) = (
            2.0 * s * s * s - 3.0 * s * s + 1.0,
            s * s * s - 2.0 * s * s + s,
        );
        let (h01, h11) = (-2.0 * s * s * s + 3.0 * s * s, s * s * s - s * s);
        Some(
            h00 * self.w[k]
                + h10 * self.step * self.dw[k]
                + h01 * self.w[k + 1]
                + h11 * self.step * self.dw[k + 1],
        )
    }
}

/// Integrates from `w(0) = a` and classifies the outcome. With `record`, the
/// trajectory up to the stopping radius is kept.
fn integrate(
    nl: &Nonlinearity,
    a: f64,
    step: f64,
    radius: f64,
    record: bool,
) -> Result<(Shot, Option<Trajectory>)> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::NonpositiveAmplitude(a));
    }
    let rhs = |r: f64, w: f64, dw: f64| w - nl.f(w) - 2.0 * dw / r;
    // Series w = a + alpha r^2 + gamma r^4 about the origin.
    let g0 = a - nl.f(a);
    let alpha = g0 / 6.0;
    let gamma = (1.0 - nl.derivative(a)) * g0 / 120.0;
    let mut r = step;
    let mut w = a + alpha * r * r + gamma * r.powi(4);
    let mut dw = 2.0 * alpha * r + 4.0 * gamma * r.powi(3);
    let mut traj = record.then(|| Trajectory {
        step,
        w: vec![a, w],
        dw: vec![0.0, dw],
    });
    let steps = (radius / step).ceil() as usize;
    let mut outcome = Shot::TurnsUp(radius);
    for _ in 1..steps.max(1) {
        if w <= 0.0 {
            outcome = Shot::Crosses(r);
            break;
        }
        if dw >= 0.0 {
            outcome = Shot::TurnsUp(r);
            break;
        }
        if w < DECAY_LEVEL {
            outcome = Shot::Decays;
            break;
        }
        let k1 = (dw, rhs(r, w, dw));
        let k2 = (
            dw + 0.5 * step * k1.1,
            rhs(
                r + 0.5 * step,
                w + 0.5 * step * k1.0,
                dw + 0.5 * step * k1.1,
            ),
        );
        let k3 = (
            dw + 0.5 * step * k2.1,
            rhs(
                r + 0.5 * step,
                w + 0.5 * step * k2.0,
                dw + 0.5 * step * k2.1,
            ),
        );
        let k4 = (
            dw + step * k3.1,
            rhs(r + step, w + step * k3.0, dw + step * k3.1),
        );
        w += step / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        dw += step / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        r += step;
        if !w.is_finite() || w.abs() > BLOWUP {
            return Err(Error::Blowup(r));
        }
        if let Some(t) = traj.as_mut() {
            t.w.push(w);
            t.dw.push(dw);
        }
    }
    Ok((outcome, traj))
}

/// Shoots from center value `a` using the integration step and radius of `cfg`
/// resolved against `grid`.
pub fn shoot(nl: &Nonlinearity, a: f64, grid: &RadialGrid, cfg: &ShootingConfig) -> Result<Shot> {
    cfg.validate()?;
    integrate(nl, a, cfg.step_for(grid), cfg.radius_for(grid), false).map(|(s, _)| s)
}

/// Overshoot predicate for bisection; blowup counts as overshoot.
fn overshoots(nl: &Nonlinearity, a: f64, step: f64, radius: f64) -> Result<bool> {
    match integrate(nl, a, step, radius, false) {
        Ok((s, _)) => Ok(s.overshoots()),
        Err(Error::Blowup(_)) => Ok(true),
        Err(e) => Err(e),
    }
}

/// Bisects the center value between undershoot and overshoot.
pub fn bisect_center(
    nl: &Nonlinearity,
    grid: &RadialGrid,
    cfg: &ShootingConfig,
) -> Result<(f64, f64)> {
    cfg.validate()?;
    let (step, radius) = (cfg.step_for(grid), cfg.radius_for(grid));
    let (mut lo, mut hi) = (cfg.a_min, cfg.a_max);
    let bracket_err = Error::BracketFailure {
        a_min: cfg.a_min,
        a_max: cfg.a_max,
    };
    if overshoots(nl, lo, step, radius)? || !overshoots(nl, hi, step, radius)? {
        return Err(bracket_err);
    }
    for _ in 0..cfg.max_bisect {
        if hi - lo < 1e-12 * lo {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if overshoots(nl, mid, step, radius)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo, hi))
}

/// Newton's method on `-Lap u + u - f(u) = 0` at nodes `0..N` with `u_N = 0`.
///
/// Steps are damped until the residual norm decreases. Stops when the
/// weighted residual norm is below `tol` or the Newton update is at roundoff
/// level. Returns the number of iterations taken.
pub(crate) fn newton_polish(
    nl: &Nonlinearity,
    grid: &RadialGrid,
    u: &mut [f64],
    tol: f64,
    max_iter: usize,
) -> Result<usize> {
    let n = grid.intervals();
    let h2 = grid.spacing() * grid.spacing();
    let residual = |u: &[f64]| -> Vec<f64> {
        let lap = grid.laplacian(u);
        (0..n).map(|i| -lap[i] + u[i] - nl.f(u[i])).collect()
    };
    let norm = |r: &[f64]| {
        grid.integrate_with(|i| if i < n { r[i] * r[i] } else { 0.0 })
            .sqrt()
    };
    let mut res = residual(u);
    let mut rn = norm(&res);
    for it in 0..max_iter {
        if rn <= tol {
            return Ok(it);
        }
        let mut lower = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        diag[0] = 6.0 / h2 + 1.0 - nl.derivative(u[0]);
        upper[0] = -6.0 / h2;
        for i in 1..n {
            let inv = 1.0 / i as f64;
            lower[i] = -(1.0 - inv) / h2;
            diag[i] = 2.0 / h2 + 1.0 - nl.derivative(u[i]);
            upper[i] = -(1.0 + inv) / h2;
        }
        let rhs: Vec<f64> = res.iter().map(|r| -r).collect();
        let delta = solve_tridiagonal(&lower, &diag, &upper, &rhs)
            .ok_or_else(|| Error::NoConvergence("singular Newton matrix".into()))?;
        let scale = u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let step_size = delta.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if step_size <= 1e-11 * scale {
            // Quadratic convergence: the remaining error is at roundoff level.
            return Ok(it);
        }
        let mut lambda = 1.0;
        loop {
            let trial: Vec<f64> = (0..=n)
                .map(|i| if i < n { u[i] + lambda * delta[i] } else { 0.0 })
                .collect();
            let tr = residual(&trial);
            let tn = norm(&tr);
            if tn < rn || lambda < 1e-4 {
                if !(tn < rn) {
                    return Err(Error::NoConvergence(format!(
                        "Newton stalled at residual {rn:e}"
                    )));
                }
                u.copy_from_slice(&trial);
                res = tr;
                rn = tn;
                break;
            }
            lambda *= 0.5;
        }
    }
    if rn <= tol {
        Ok(max_iter)
    } else {
        Err(Error::NoConvergence(format!(
            "Newton residual {rn:e} after {max_iter} iterations"
        )))
    }
}

/// Samples the bisected trajectories on the grid, switching to the decaying
/// linear tail where the two trajectories start to disagree.
fn initial_profile(
    nl: &Nonlinearity,
    grid: &RadialGrid,
    lo: f64,
    hi: f64,
    step: f64,
) -> Result<Vec<f64>> {
    let radius = grid.radius();
    let (_, tl) = integrate(nl, lo, step, radius, true)?;
    let th = match integrate(nl, hi, step, radius, true) {
        Ok((_, t)) => t,
        Err(Error::Blowup(_)) => None,
        Err(e) => return Err(e),
    };
    let tl = tl.expect("recorded");
    let mut out = vec![0.0; grid.len()];
    let mut matched: Option<(f64, f64)> = None;
    for i in 0..grid.intervals() {
        let r = grid.node(i);
        if let Some((rm, wm)) = matched {
            out[i] = wm * rm / r * (-(r - rm)).exp();
            continue;
        }
        let wl = tl.at(r);
        let wh = th.as_ref().and_then(|t| t.at(r));
        match (wl, wh) {
            (Some(a), Some(b)) if a > 0.0 && (a - b).abs() <= 1e-6 * a => out[i] = 0.5 * (a + b),
            _ => {
                if i == 0 {
                    return Err(Error::NoConvergence("shooting trajectory too short".into()));
                }
                matched = Some((grid.node(i - 1), out[i - 1]));
                let (rm, wm) = matched.unwrap();
                out[i] = wm * rm / r * (-(r - rm)).exp();
            }
        }
    }
    Ok(out)
}

pub fn solve_scalar(
    nl: &Nonlinearity,
    grid: &RadialGrid,
    cfg: &ShootingConfig,
) -> Result<ScalarGroundState> {
    let (lo, hi) = bisect_center(nl, grid, cfg)?;
    let mut u = initial_profile(nl, grid, lo, hi, cfg.step_for(grid))?;
    newton_polish(nl, grid, &mut u, 1e-11, 50)?;
    let n = grid.intervals();
    if u[..n].iter().any(|x| !(*x > 0.0)) || u.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::NoConvergence(
            "polished profile is not positive and decreasing".into(),
        ));
    }
    let center_value = u[0];
    let profile = Profile::new(*grid, u)?;
    let state = State::new(profile.clone(), Profile::zeros(*grid))?;
    let params = EnergyParams::new(nl.clone(), Nonlinearity::power_sum(&[])?, 0.0);
    let action = crate::energy::energy_i(&state, &params);
    let residual = residuals(&state, &params).0;
    Ok(ScalarGroundState {
        profile,
        center_value,
        action,
        residual,
    })
}

fn scalar_components(nl: &Nonlinearity, gs: &ScalarGroundState) -> crate::energy::Components {
    let grid = *gs.profile.grid();
    let state = State::new(gs.profile.clone(), Profile::zeros(grid)).expect("same grid");
    let params = EnergyParams::new(nl.clone(), Nonlinearity::PowerSum(Vec::new()), 0.0);
    crate::energy::components(&state, &params)
}

/// Relative defect `|K + 3M - 6P| / (6P)` of the scalar Pohozaev identity.
pub fn pohozaev_residual(nl: &Nonlinearity, gs: &ScalarGroundState) -> f64 {
    let c = scalar_components(nl, gs);
    (c.kinetic + 3.0 * c.mass - 6.0 * c.potential).abs() / (6.0 * c.potential)
}

/// `2 int F(u) - int u^2`, positive for genuine ground states.
pub fn well_margin(nl: &Nonlinearity, gs: &ScalarGroundState) -> f64 {
    2.0 * scalar_components(nl, gs).well()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::components;

    fn grid() -> RadialGrid {
        RadialGrid::new(20.0, 4000).unwrap()
    }

    #[test]
    fn shooting_outcomes_for_the_cubic() {
        let g = grid();
        let cfg = ShootingConfig::default();
        let cubic = Nonlinearity::cubic();
        assert!(matches!(
            shoot(&cubic, 0.5, &g, &cfg).unwrap(),
            Shot::TurnsUp(_)
        ));
        assert!(matches!(
            shoot(&cubic, 10.0, &g, &cfg).unwrap(),
            Shot::Crosses(_)
        ));
        assert_eq!(
            shoot(&cubic, -1.0, &g, &cfg),
            Err(Error::NonpositiveAmplitude(-1.0))
        );
    }

    #[test]
    fn linear_equation_never_decays() {
        let g = grid();
        let cfg = ShootingConfig::default();
        let zero = Nonlinearity::power_sum(&[]).unwrap();
        for a in [0.1, 1.0, 10.0] {
            let s = shoot(&zero, a, &g, &cfg).unwrap();
            assert!(matches!(s, Shot::TurnsUp(_)), "{s:?}");
        }
        assert!(matches!(
            solve_scalar(&zero, &g, &cfg),
            Err(Error::BracketFailure { .. })
        ));
    }

    #[test]
    fn cubic_ground_state() {
        let g = grid();
        let gs = solve_scalar(&Nonlinearity::cubic(), &g, &ShootingConfig::default()).unwrap();
        assert!(
            (gs.center_value - 4.3374).abs() < 1e-3 * 4.3374,
            "{}",
            gs.center_value
        );
        assert!(gs.residual < 1e-6);
        assert!(gs.action > 0.0);
        let vals = gs.profile.values();
        assert!(vals[..g.intervals()].iter().all(|x| *x > 0.0));
        assert!(vals.windows(2).all(|w| w[1] <= w[0]));
        // For the cubic, Nehari K + M = 4P holds exactly on the discrete
        // solution, and together with Pohozaev gives K = 3M and I = M.
        let st = State::new(gs.profile.clone(), Profile::zeros(g)).unwrap();
        let c = components(&st, &EnergyParams::symmetric(Nonlinearity::cubic(), 0.0));
        assert!((c.kinetic + c.mass - 4.0 * c.potential).abs() < 1e-9 * c.kinetic);
        assert!((gs.action - c.mass).abs() < 1e-4 * c.mass);
        assert!(well_margin(&Nonlinearity::cubic(), &gs) > 0.0);
    }

    #[test]
    fn pohozaev_identity_converges_at_second_order() {
        let cubic = Nonlinearity::cubic();
        let res: Vec<f64> = [2000, 4000, 8000]
            .iter()
            .map(|&n| {
                let g = RadialGrid::new(20.0, n).unwrap();
                let gs = solve_scalar(&cubic, &g, &ShootingConfig::default()).unwrap();
                pohozaev_residual(&cubic, &gs)
            })
            .collect();
        assert!(res[2] < 1e-5, "{res:?}");
        for w in res.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order > 1.8, "{res:?}");
        }
    }

    #[test]
    fn log_enhanced_ground_state() {
        let g = RadialGrid::new(20.0, 8000).unwrap();
        let nl = Nonlinearity::log_enhanced(1.0).unwrap();
        let gs = solve_scalar(&nl, &g, &ShootingConfig::default()).unwrap();
        assert!(gs.residual < 1e-6);
        assert!(well_margin(&nl, &gs) > 0.0);
        assert!(pohozaev_residual(&nl, &gs) < 1e-5);
        assert!(gs.profile.values().windows(2).all(|w| w[1] <= w[0]));
    }
}
