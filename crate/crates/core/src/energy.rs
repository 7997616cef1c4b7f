//! Action and Pohozaev functionals of the coupled system and the dilation
//! projection onto the Pohozaev manifold `J = 0`.
//!
//! With `K = int |grad u|^2 + |grad v|^2`, `M = int u^2 + v^2` and
//! `P = int F(u) + G(v) + (beta/2) u^2 v^2`:
//!
//! ```text
//! I = K/2 + M/2 - P,    W = P - M/2,    J = K/2 - 3 W.
//! ```
//!
//! Along the dilation ray `t -> (u(./t), v(./t))` the action is
//! `t K / 2 - t^3 W`, maximized at `t = sqrt(K / (6 W))` with value
//! `(K/3)^{3/2} (2 W)^{-1/2}`.

use crate::error::{Error, Result};
use crate::grid::{RadialGrid, State};
use crate::nonlinearity::Nonlinearity;

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyParams {
    pub f: Nonlinearity,
    pub g: Nonlinearity,
    pub beta: f64,
}

impl EnergyParams {
    pub fn new(f: Nonlinearity, g: Nonlinearity, beta: f64) -> Self {
        EnergyParams { f, g, beta }
    }

    /// Same nonlinearity in both equations.
    pub fn symmetric(f: Nonlinearity, beta: f64) -> Self {
        EnergyParams {
            g: f.clone(),
            f,
            beta,
        }
    }
}

/// Raw integrals from which every functional is assembled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Components {
    /// `K = int |grad u|^2 + |grad v|^2`
    pub kinetic: f64,
    /// `M = int u^2 + v^2`
    pub mass: f64,
    /// `P = int F(u) + G(v) + (beta/2) u^2 v^2`
    pub potential: f64,
}

impl Components {
    pub fn action(&self) -> f64 {
        0.5 * self.kinetic + 0.5 * self.mass - self.potential
    }

    pub fn well(&self) -> f64 {
        self.potential - 0.5 * self.mass
    }

    pub fn pohozaev(&self) -> f64 {
        0.5 * self.kinetic - 3.0 * self.well()
    }

    pub fn norm_h1_sq(&self) -> f64 {
        self.kinetic + self.mass
    }

    /// `(K/3)^{3/2} (2W)^{-1/2}`, or `NoProjection` when `W <= 0`.
    pub fn projected(&self) -> Result<f64> {
        let w = self.well();
        if !(w > 0.0) {
            return Err(Error::NoProjection(w));
        }
        Ok((self.kinetic / 3.0).powf(1.5) / (2.0 * w).sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[allow(non_snake_case)]
pub struct EnergyReport {
    pub I: f64,
    pub J: f64,
    pub K: f64,
    pub W: f64,
    pub normH1_sq: f64,
    pub residual_u: f64,
    pub residual_v: f64,
}

pub fn components(state: &State, params: &EnergyParams) -> Components {
    components_of(state.grid(), state.u.values(), state.v.values(), params)
}

pub(crate) fn components_of(
    grid: &RadialGrid,
    u: &[f64],
    v: &[f64],
    params: &EnergyParams,
) -> Components {
    let kinetic = grid.kinetic(u) + grid.kinetic(v);
    let mass = grid.integrate_with(|i| u[i] * u[i] + v[i] * v[i]);
    let potential = grid.integrate_with(|i| {
        let uv = u[i] * v[i];
        params.f.primitive(u[i]) + params.g.primitive(v[i]) + 0.5 * params.beta * uv * uv
    });
    Components {
        kinetic,
        mass,
        potential,
    }
}

pub fn energy_i(state: &State, params: &EnergyParams) -> f64 {
    components(state, params).action()
}

pub fn pohozaev_j(state: &State, params: &EnergyParams) -> f64 {
    components(state, params).pohozaev()
}

/// Nodal residuals `(-Lap u + u - f(u) - beta u v^2, -Lap v + v - g(v) - beta u^2 v)`.
///
/// The last node is pinned by the boundary condition and reported as zero.
/// Paired with the quadrature weights this is the exact gradient of the
/// discrete action: `dI/du_i = w_i * first_variation_u[i]`.
pub fn first_variation(state: &State, params: &EnergyParams) -> (Vec<f64>, Vec<f64>) {
    let grid = state.grid();
    let (u, v) = (state.u.values(), state.v.values());
    let (lu, lv) = (grid.laplacian(u), grid.laplacian(v));
    let n = grid.intervals();
    let b = params.beta;
    let mut ru = vec![0.0; n + 1];
    let mut rv = vec![0.0; n + 1];
    for i in 0..n {
        ru[i] = -lu[i] + u[i] - params.f.f(u[i]) - b * u[i] * v[i] * v[i];
        rv[i] = -lv[i] + v[i] - params.g.f(v[i]) - b * u[i] * u[i] * v[i];
    }
    (ru, rv)
}

fn weighted_norm(grid: &RadialGrid, values: &[f64]) -> f64 {
    grid.integrate_with(|i| values[i] * values[i]).sqrt()
}

/// Relative L2 residuals `|res_u| / (1 + |u|_{H^1})` and likewise for `v`.
pub fn residuals(state: &State, params: &EnergyParams) -> (f64, f64) {
    let grid = state.grid();
    let (ru, rv) = first_variation(state, params);
    let norm = |p: &[f64]| (grid.kinetic(p) + grid.integrate_with(|i| p[i] * p[i])).sqrt();
    (
        weighted_norm(grid, &ru) / (1.0 + norm(state.u.values())),
        weighted_norm(grid, &rv) / (1.0 + norm(state.v.values())),
    )
}

pub fn report(state: &State, params: &EnergyParams) -> EnergyReport {
    let c = components(state, params);
    let (residual_u, residual_v) = residuals(state, params);
    EnergyReport {
        I: c.action(),
        J: c.pohozaev(),
        K: c.kinetic,
        W: c.well(),
        normH1_sq: c.norm_h1_sq(),
        residual_u,
        residual_v,
    }
}

pub fn projected_energy(state: &State, params: &EnergyParams) -> Result<f64> {
    components(state, params).projected()
}

/// Value and Euclidean gradient (with respect to the nodal values) of the
/// reduced objective `E = (K/3)^{3/2} (2W)^{-1/2}`.
///
/// Boundary nodes get zero gradient: the origin carries no weight and the
/// last node is pinned.
pub fn reduced_gradient(state: &State, params: &EnergyParams) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    reduced_gradient_of(state.grid(), state.u.values(), state.v.values(), params)
}

pub(crate) fn reduced_gradient_of(
    grid: &RadialGrid,
    u: &[f64],
    v: &[f64],
    params: &EnergyParams,
) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    let c = components_of(grid, u, v, params);
    let e = c.projected()?;
    let (lu, lv) = (grid.laplacian(u), grid.laplacian(v));
    let n = grid.intervals();
    let (k, w, b) = (c.kinetic, c.well(), params.beta);
    let ck = 1.5 * e / k;
    let cw = 0.5 * e / w;
    let mut gu = vec![0.0; n + 1];
    let mut gv = vec![0.0; n + 1];
    for i in 1..n {
        let wi = grid.weight(i);
        let dwu = params.f.f(u[i]) + b * u[i] * v[i] * v[i] - u[i];
        let dwv = params.g.f(v[i]) + b * u[i] * u[i] * v[i] - v[i];
        gu[i] = wi * (ck * (-2.0 * lu[i]) - cw * dwu);
        gv[i] = wi * (ck * (-2.0 * lv[i]) - cw * dwv);
    }
    Ok((e, gu, gv))
}

/// Dilates `state` onto `J = 0` and returns the dilated state with its factor.
///
/// The factor starts from the closed form `sqrt(K / (6W))` and is then
/// refined by a bracketed secant iteration on the discrete `J` of the
/// interpolated state, which removes the interpolation error of the dilation.
pub fn project_pohozaev(state: &State, params: &EnergyParams) -> Result<(State, f64)> {
    if state.is_zero() {
        return Err(Error::ZeroState);
    }
    let c = components(state, params);
    let w = c.well();
    if !(w > 0.0) {
        return Err(Error::NoProjection(w));
    }
    let tol = 1e-12 * (1.0 + c.kinetic);
    if c.pohozaev().abs() <= tol {
        return Ok((state.clone(), 1.0));
    }
    let seed = (c.kinetic / (6.0 * w)).sqrt();
    let j_at = |t: f64| -> Result<(State, f64)> {
        let s = state.dilate(t)?;
        let j = pohozaev_j(&s, params);
        Ok((s, j))
    };
    let (s0, j0) = j_at(seed)?;
    if j0.abs() <= tol {
        return Ok((s0, seed));
    }
    // J(t) ~ t K/2 - 3 t^3 W is positive below the root and negative above.
    let mut lo = (seed, j0);
    let mut hi = (seed, j0);
    let mut step = 1.0 + 1e-3;
    for _ in 0..60 {
        if lo.1 > 0.0 && hi.1 < 0.0 {
            break;
        }
        if lo.1 <= 0.0 {
            let t = lo.0 / step;
            lo = (t, j_at(t)?.1);
        }
        if hi.1 >= 0.0 {
            let t = hi.0 * step;
            hi = (t, j_at(t)?.1);
        }
        step *= 2.0;
    }
    if !(lo.1 > 0.0 && hi.1 < 0.0) {
        return Ok((s0, seed));
    }
    let mut best = (seed, j0, s0);
    let mut side = 0i8;
    let (mut jl, mut jh) = (lo.1, hi.1);
    for _ in 0..100 {
        let mut t = (lo.0 * jh - hi.0 * jl) / (jh - jl);
        if !(t > lo.0 && t < hi.0) {
            t = 0.5 * (lo.0 + hi.0);
        }
        let (s, j) = j_at(t)?;
        if j.abs() < best.1.abs() {
            best = (t, j, s);
        }
        if j.abs() <= tol || hi.0 - lo.0 <= 1e-15 * t {
            break;
        }
        if j > 0.0 {
            lo = (t, j);
            jl = j;
            if side == 1 {
                jh *= 0.5;
            }
            side = 1;
        } else {
            hi = (t, j);
            jh = j;
            if side == -1 {
                jl *= 0.5;
            }
            side = -1;
        }
    }
    Ok((best.2, best.0))
}
