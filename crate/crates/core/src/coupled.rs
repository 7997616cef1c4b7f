//! Ground states of the coupled system by minimization over the Pohozaev
//! manifold.
//!
//! The reduced objective `E = (K/3)^{3/2} (2W)^{-1/2}` is the action at the
//! point where the dilation ray through a state meets `J = 0`, so minimizing
//! `E` over states with `W > 0` minimizes the action over the manifold
//! without a retraction. Descent runs with an `H^1` preconditioner and
//! Armijo backtracking from several starts; each result is dilated onto
//! `J = 0` and polished by Newton's method on the constrained critical point
//! equations `I' = lambda J'`, `J = 0`. The lowest candidate wins.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::energy::{
    components, components_of, energy_i, project_pohozaev, reduced_gradient_of, report,
    EnergyParams, EnergyReport,
};
use crate::error::{Error, Result};
use crate::grid::{Profile, RadialGrid, State};
use crate::linalg::{solve_block_tridiagonal, solve_tridiagonal, Block};
use crate::scalar::{solve_scalar, ScalarGroundState, ShootingConfig};

/// Certificate tolerance on `|J|` and `|I - K/3|`, relative to `1 + K`.
pub const POHOZAEV_TOL: f64 = 1e-6;
/// Certificate tolerance on the relative PDE residuals.
pub const RESIDUAL_TOL: f64 = 1e-5;
/// Energies closer than this (relative to `1 + |m|`) are ties.
pub const ENERGY_TIE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InitStrategy {
    /// The pair of scalar ground states.
    ScalarPair,
    /// One scalar ground state with a small multiple of the other added.
    PerturbedScalar,
    /// Sums of random Gaussians.
    RandomGaussians,
}

impl InitStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            InitStrategy::ScalarPair => "scalar_pair",
            InitStrategy::PerturbedScalar => "perturbed_scalar",
            InitStrategy::RandomGaussians => "random_gaussians",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "scalar_pair" => Ok(InitStrategy::ScalarPair),
            "perturbed_scalar" => Ok(InitStrategy::PerturbedScalar),
            "random_gaussians" => Ok(InitStrategy::RandomGaussians),
            other => Err(Error::Config(format!("unknown init strategy `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub max_iters: usize,
    /// Tolerance on the `H^{-1}` norm of the reduced-objective gradient.
    pub grad_tol: f64,
    /// Initial line-search step.
    pub step: f64,
    pub backtrack: f64,
    pub armijo: f64,
    pub init_strategy: Vec<InitStrategy>,
    pub classify_tol: f64,
    pub seed: u64,
    /// Number of starts drawn by `RandomGaussians`.
    pub random_starts: usize,
    /// Used for the scalar baselines.
    pub shooting: ShootingConfig,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            max_iters: 20000,
            grad_tol: 1e-7,
            step: 1.0,
            backtrack: 0.5,
            armijo: 1e-4,
            init_strategy: vec![
                InitStrategy::ScalarPair,
                InitStrategy::PerturbedScalar,
                InitStrategy::RandomGaussians,
            ],
            classify_tol: 1e-6,
            seed: 0,
            random_starts: 2,
            shooting: ShootingConfig::default(),
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {x}")))
            }
        };
        positive("grad_tol", self.grad_tol)?;
        positive("step", self.step)?;
        positive("classify_tol", self.classify_tol)?;
        positive("armijo", self.armijo)?;
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return Err(Error::Config(format!(
                "backtrack must lie in (0, 1), got {}",
                self.backtrack
            )));
        }
        if self.init_strategy.is_empty() {
            return Err(Error::Config(
                "init_strategy must name at least one strategy".into(),
            ));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be at least 1".into()));
        }
        self.shooting.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Vector,
    ScalarU,
    ScalarV,
}

impl Kind {
    pub fn name(&self) -> &'static str {
        match self {
            Kind::Vector => "vector",
            Kind::ScalarU => "scalar_u",
            Kind::ScalarV => "scalar_v",
        }
    }

    pub fn is_vector(&self) -> bool {
        *self == Kind::Vector
    }
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundState {
    pub state: State,
    pub energy: f64,
    pub kind: Kind,
    pub residuals: (f64, f64),
    pub iterations: usize,
    /// Reduced objective after every accepted descent step, starting value first.
    pub trace: Vec<f64>,
    /// Where the winning candidate came from.
    pub origin: String,
}

/// Scalar ground states of the two equations, with their embeddings
/// `(u0, 0)` and `(0, v0)` polished onto the discrete manifold. None of this
/// depends on `beta`, so sweeps compute it once.
#[derive(Debug, Clone, PartialEq)]
pub struct Baselines {
    pub u0: ScalarGroundState,
    pub v0: ScalarGroundState,
    pub scalar_u: State,
    pub scalar_v: State,
}

impl Baselines {
    pub fn compute(
        params: &EnergyParams,
        grid: &RadialGrid,
        shooting: &ShootingConfig,
    ) -> Result<Self> {
        shooting.validate()?;
        let u0 = solve_scalar(&params.f, grid, shooting)?;
        let same = params.g == params.f;
        let v0 = if same {
            u0.clone()
        } else {
            solve_scalar(&params.g, grid, shooting)?
        };
        let zero = Profile::zeros(*grid);
        let scalar_u = finish(&State::new(u0.profile.clone(), zero.clone())?, params)?;
        let scalar_v = if same {
            scalar_u.swapped()
        } else {
            finish(&State::new(zero, v0.profile.clone())?, params)?
        };
        Ok(Baselines {
            u0,
            v0,
            scalar_u,
            scalar_v,
        })
    }

    /// `min { I(u0, 0), I(0, v0) }` for the raw scalar ground states.
    pub fn scalar_min(&self) -> f64 {
        self.u0.action.min(self.v0.action)
    }

    /// The same minimum over the embeddings polished onto `J = 0`, which is
    /// the value the coupled solver competes against.
    pub fn polished_min(&self, params: &EnergyParams) -> f64 {
        energy_i(&self.scalar_u, params).min(energy_i(&self.scalar_v, params))
    }
}

/// `scalar_u` if `|v| <= tol |(u, v)|_{H^1}`, `scalar_v` symmetrically,
/// `vector` otherwise.
pub fn classify(state: &State, tol: f64) -> Result<Kind> {
    if state.is_zero() {
        return Err(Error::ZeroState);
    }
    let grid = state.grid();
    let l2 = |p: &[f64]| grid.integrate_with(|i| p[i] * p[i]).sqrt();
    let (u, v) = (state.u.values(), state.v.values());
    let h1 = (grid.kinetic(u) + grid.kinetic(v))
        .sqrt()
        .hypot(l2(u).hypot(l2(v)));
    if l2(v) <= tol * h1 {
        Ok(Kind::ScalarU)
    } else if l2(u) <= tol * h1 {
        Ok(Kind::ScalarV)
    } else {
        Ok(Kind::Vector)
    }
}

/// Outcome of one descent run.
#[derive(Debug, Clone, PartialEq)]
pub struct Descent {
    pub state: State,
    pub energy: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub trace: Vec<f64>,
    /// False when the iteration budget ran out first.
    pub converged: bool,
}

/// `H^1` Gram matrix on the interior nodes `1..N`.
struct Preconditioner {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
}

impl Preconditioner {
    fn new(grid: &RadialGrid) -> Self {
        let n = grid.intervals();
        let m = n - 1;
        let mut lower = vec![0.0; m];
        let mut diag = vec![0.0; m];
        let mut upper = vec![0.0; m];
        for k in 0..m {
            let i = k + 1;
            diag[k] = grid.edge(i - 1) + grid.edge(i) + grid.weight(i);
            lower[k] = -grid.edge(i - 1);
            upper[k] = -grid.edge(i);
        }
        Preconditioner { lower, diag, upper }
    }

    /// Riesz representative of a Euclidean gradient (zero at both ends).
    fn apply(&self, g: &[f64]) -> Vec<f64> {
        let n = g.len() - 1;
        let p = solve_tridiagonal(&self.lower, &self.diag, &self.upper, &g[1..n])
            .expect("H1 Gram matrix is positive definite");
        let mut out = vec![0.0; n + 1];
        out[1..n].copy_from_slice(&p);
        out
    }

    /// `z^T A z` for `z` zero at both ends.
    fn norm_sq(&self, z: &[f64]) -> f64 {
        let m = self.diag.len();
        (0..m)
            .map(|k| {
                let mut az = self.diag[k] * z[k + 1];
                if k > 0 {
                    az += self.lower[k] * z[k];
                }
                if k + 1 < m {
                    az += self.upper[k] * z[k + 2];
                }
                az * z[k + 1]
            })
            .sum()
    }
}

/// Nodal `r u'(r)` on the interior nodes, zero at both ends.
fn dilation_generator(grid: &RadialGrid, u: &[f64]) -> Vec<f64> {
    let n = grid.intervals();
    let mut z = vec![0.0; n + 1];
    for i in 1..n {
        z[i] = 0.5 * i as f64 * (u[i + 1] - u[i - 1]);
    }
    z
}

fn extrapolate_origin(u: &mut [f64]) {
    u[0] = (4.0 * u[1] - u[2]) / 3.0;
}

/// Preconditioned descent on the reduced objective from `start`.
///
/// Steps leaving `W > 0` are rejected by the line search. Stops when the
/// gradient norm drops below `grad_tol`, when the objective decreases by less
/// than `1e-12` over 50 iterations, or when the line search can no longer
/// make progress.
pub fn descend(params: &EnergyParams, start: &State, cfg: &SolveConfig) -> Result<Descent> {
    const WINDOW: usize = 50;
    let grid = *start.grid();
    let n = grid.intervals();
    let pre = Preconditioner::new(&grid);
    // Every dilate of a state has the same objective, so start from the one
    // on J = 0, the scale the grid resolves best.
    let start = match project_pohozaev(start, params) {
        Ok((s, _)) => s,
        Err(_) => start.clone(),
    };
    let mut u = start.u.values().to_vec();
    let mut v = start.v.values().to_vec();
    let (mut e, mut gu, mut gv) = reduced_gradient_of(&grid, &u, &v, params)?;
    let mut trace = vec![e];
    let mut alpha = cfg.step;
    let mut gnorm = f64::INFINITY;
    let mut iterations = 0;
    for it in 0..cfg.max_iters {
        iterations = it;
        let mut pu = pre.apply(&gu);
        let mut pv = pre.apply(&gv);
        // The continuum objective is flat along dilations and the discrete one
        // nearly so; moving along that direction only trades discretization
        // error, so it is removed in the H^1 inner product.
        let zu = dilation_generator(&grid, &u);
        let zv = dilation_generator(&grid, &v);
        let gz: f64 = (1..n).map(|i| gu[i] * zu[i] + gv[i] * zv[i]).sum();
        let zaz = pre.norm_sq(&zu) + pre.norm_sq(&zv);
        if zaz > 0.0 {
            let c = gz / zaz;
            for i in 1..n {
                pu[i] -= c * zu[i];
                pv[i] -= c * zv[i];
            }
        }
        let slope: f64 = (1..n).map(|i| gu[i] * pu[i] + gv[i] * pv[i]).sum();
        gnorm = slope.max(0.0).sqrt();
        if gnorm < cfg.grad_tol {
            break;
        }
        if trace.len() > WINDOW && trace[trace.len() - 1 - WINDOW] - e < 1e-12 {
            break;
        }
        let mut accepted = None;
        let mut first_try = true;
        while alpha > 1e-20 {
            let mut tu: Vec<f64> = (0..=n).map(|i| u[i] - alpha * pu[i]).collect();
            let mut tv: Vec<f64> = (0..=n).map(|i| v[i] - alpha * pv[i]).collect();
            extrapolate_origin(&mut tu);
            extrapolate_origin(&mut tv);
            if let Ok(c) = components_of(&grid, &tu, &tv, params).projected() {
                if c.is_finite() && c <= e - cfg.armijo * alpha * slope {
                    accepted = Some((tu, tv));
                    break;
                }
            }
            alpha *= cfg.backtrack;
            first_try = false;
        }
        let Some((tu, tv)) = accepted else {
            break;
        };
        u = tu;
        v = tv;
        let next = reduced_gradient_of(&grid, &u, &v, params)?;
        e = next.0;
        gu = next.1;
        gv = next.2;
        trace.push(e);
        if first_try {
            alpha = (alpha * 2.0).min(1e6);
        }
        iterations = it + 1;
    }
    Ok(Descent {
        converged: iterations < cfg.max_iters || gnorm < cfg.grad_tol,
        state: State::new(Profile::new(grid, u)?, Profile::new(grid, v)?)?,
        energy: e,
        gradient_norm: gnorm,
        iterations,
        trace,
    })
}

/// Newton's method for the critical points of the action on `J = 0`:
///
/// ```text
/// (1 - l)(-Lap u) + (1 - 3l)(u - f(u) - beta u v^2) = 0
/// (1 - l)(-Lap v) + (1 - 3l)(v - g(v) - beta u^2 v) = 0
/// J(u, v) = 0
/// ```
///
/// which is `I' = l J'` written out. Returns the polished state and the
/// multiplier `l`, which vanishes in the continuum limit.
pub fn constrained_polish(
    state: &State,
    params: &EnergyParams,
    max_iter: usize,
) -> Result<(State, f64)> {
    let grid = *state.grid();
    let n = grid.intervals();
    let h2 = grid.spacing() * grid.spacing();
    let b = params.beta;
    let mut u = state.u.values().to_vec();
    let mut v = state.v.values().to_vec();
    let mut lam = 0.0;

    // Returns (F_u, F_v, Q_u, Q_v, J) with Q the nodal gradient of J.
    let evaluate = |u: &[f64], v: &[f64], lam: f64| {
        let (lu, lv) = (grid.laplacian(u), grid.laplacian(v));
        let mut fu = vec![0.0; n];
        let mut fv = vec![0.0; n];
        let mut qu = vec![0.0; n];
        let mut qv = vec![0.0; n];
        for i in 0..n {
            let su = u[i] - params.f.f(u[i]) - b * u[i] * v[i] * v[i];
            let sv = v[i] - params.g.f(v[i]) - b * u[i] * u[i] * v[i];
            fu[i] = (1.0 - lam) * -lu[i] + (1.0 - 3.0 * lam) * su;
            fv[i] = (1.0 - lam) * -lv[i] + (1.0 - 3.0 * lam) * sv;
            qu[i] = -lu[i] + 3.0 * su;
            qv[i] = -lv[i] + 3.0 * sv;
        }
        let c = components_of(&grid, u, v, params);
        (fu, fv, qu, qv, c.pohozaev(), c.kinetic)
    };
    let merit = |fu: &[f64], fv: &[f64], j: f64, k: f64| {
        let r = grid.integrate_with(|i| {
            if i < n {
                fu[i] * fu[i] + fv[i] * fv[i]
            } else {
                0.0
            }
        });
        r.sqrt() + j.abs() / (1.0 + k)
    };

    let (mut fu, mut fv, mut qu, mut qv, mut j, mut k) = evaluate(&u, &v, lam);
    let mut phi = merit(&fu, &fv, j, k);
    for _ in 0..max_iter {
        let mut lower: Vec<Block> = vec![[0.0; 4]; n];
        let mut diag: Vec<Block> = vec![[0.0; 4]; n];
        let mut upper: Vec<Block> = vec![[0.0; 4]; n];
        let c1 = 1.0 - lam;
        let c3 = 1.0 - 3.0 * lam;
        for i in 0..n {
            let (lap_d, lap_l, lap_u) = if i == 0 {
                (6.0 / h2, 0.0, -6.0 / h2)
            } else {
                let inv = 1.0 / i as f64;
                (2.0 / h2, -(1.0 - inv) / h2, -(1.0 + inv) / h2)
            };
            let duu = c1 * lap_d + c3 * (1.0 - params.f.derivative(u[i]) - b * v[i] * v[i]);
            let dvv = c1 * lap_d + c3 * (1.0 - params.g.derivative(v[i]) - b * u[i] * u[i]);
            let duv = -c3 * 2.0 * b * u[i] * v[i];
            diag[i] = [duu, duv, duv, dvv];
            lower[i] = [c1 * lap_l, 0.0, 0.0, c1 * lap_l];
            upper[i] = [c1 * lap_u, 0.0, 0.0, c1 * lap_u];
        }
        let rhs_a: Vec<[f64; 2]> = (0..n).map(|i| [-fu[i], -fv[i]]).collect();
        let rhs_b: Vec<[f64; 2]> = (0..n).map(|i| [qu[i], qv[i]]).collect();
        let singular = || Error::NoConvergence("singular constrained Newton matrix".into());
        let a = solve_block_tridiagonal(&lower, &diag, &upper, &rhs_a).ok_or_else(singular)?;
        let bb = solve_block_tridiagonal(&lower, &diag, &upper, &rhs_b).ok_or_else(singular)?;
        let wqa: f64 = (0..n)
            .map(|i| grid.weight(i) * (qu[i] * a[i][0] + qv[i] * a[i][1]))
            .sum();
        let wqb: f64 = (0..n)
            .map(|i| grid.weight(i) * (qu[i] * bb[i][0] + qv[i] * bb[i][1]))
            .sum();
        if wqb == 0.0 || !wqb.is_finite() {
            return Err(singular());
        }
        let dl = (-j - wqa) / wqb;
        let du: Vec<f64> = (0..n).map(|i| a[i][0] + dl * bb[i][0]).collect();
        let dv: Vec<f64> = (0..n).map(|i| a[i][1] + dl * bb[i][1]).collect();
        let scale = u.iter().chain(&v).fold(0.0f64, |m, x| m.max(x.abs()));
        let size = du.iter().chain(&dv).fold(0.0f64, |m, x| m.max(x.abs()));
        if size <= 1e-11 * scale && j.abs() <= 1e-12 * (1.0 + k) {
            break;
        }
        let mut step = 1.0;
        let mut moved = false;
        while step > 1e-4 {
            let tu: Vec<f64> = (0..=n)
                .map(|i| if i < n { u[i] + step * du[i] } else { 0.0 })
                .collect();
            let tv: Vec<f64> = (0..=n)
                .map(|i| if i < n { v[i] + step * dv[i] } else { 0.0 })
                .collect();
            let tl = lam + step * dl;
            let t = evaluate(&tu, &tv, tl);
            let tphi = merit(&t.0, &t.1, t.4, t.5);
            if tphi.is_finite() && tphi < phi {
                u = tu;
                v = tv;
                lam = tl;
                (fu, fv, qu, qv, j, k) = t;
                phi = tphi;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if !moved {
            if size <= 1e-8 * scale {
                break;
            }
            return Err(Error::NoConvergence(format!(
                "constrained Newton stalled with update {size:e}"
            )));
        }
    }
    if !(j.abs() <= POHOZAEV_TOL * 1e-3 * (1.0 + k)) {
        return Err(Error::NoConvergence(format!(
            "constrained Newton left J = {j:e}"
        )));
    }
    Ok((
        State::new(Profile::new(grid, u)?, Profile::new(grid, v)?)?,
        lam,
    ))
}

/// Puts a state on the manifold: closed-form dilation, then the constrained
/// Newton polish.
fn finish(state: &State, params: &EnergyParams) -> Result<State> {
    let (projected, _) = project_pohozaev(state, params)?;
    let (polished, _) = constrained_polish(&projected, params, 40)?;
    Ok(polished)
}

struct Candidate {
    state: State,
    energy: f64,
    kind: Kind,
    residual: f64,
    residuals: (f64, f64),
    iterations: usize,
    trace: Vec<f64>,
    origin: String,
    order: usize,
}

fn candidate(
    state: State,
    params: &EnergyParams,
    cfg: &SolveConfig,
    iterations: usize,
    trace: Vec<f64>,
    origin: String,
    order: usize,
) -> Result<Candidate> {
    let rep = report(&state, params);
    let kind = classify(&state, cfg.classify_tol)?;
    Ok(Candidate {
        energy: rep.I,
        kind,
        residual: rep.residual_u.max(rep.residual_v),
        residuals: (rep.residual_u, rep.residual_v),
        state,
        iterations,
        trace,
        origin,
        order,
    })
}

/// Deterministic argmin: energy, then vector before scalar on ties, then
/// lower residual, then scalar_u before scalar_v, then start order.
fn better(a: &Candidate, b: &Candidate) -> bool {
    let tie = ENERGY_TIE * (1.0 + a.energy.abs().max(b.energy.abs()));
    if (a.energy - b.energy).abs() > tie {
        return a.energy < b.energy;
    }
    let va = a.kind.is_vector();
    let vb = b.kind.is_vector();
    if va != vb {
        return va;
    }
    if a.residual != b.residual {
        return a.residual < b.residual;
    }
    if a.kind != b.kind {
        return a.kind < b.kind;
    }
    a.order < b.order
}

fn random_profile(grid: RadialGrid, rng: &mut ChaCha8Rng) -> Profile {
    let bumps: Vec<(f64, f64, f64)> = (0..rng.gen_range(1..=2))
        .map(|_| {
            (
                rng.gen_range(1.0..4.0),
                rng.gen_range(0.0..2.0),
                rng.gen_range(0.5..2.0),
            )
        })
        .collect();
    Profile::from_fn(grid, |r| {
        bumps
            .iter()
            .map(|&(a, c, w)| a * (-((r - c) / w).powi(2)).exp())
            .sum()
    })
}

fn scaled(p: &Profile, s: f64) -> Profile {
    let vals = p.values().iter().map(|x| s * x).collect();
    Profile::new(*p.grid(), vals).expect("scaling keeps the boundary value")
}

/// Starting states for the configured strategies, labelled.
fn starts(
    baselines: &Baselines,
    params: &EnergyParams,
    grid: RadialGrid,
    cfg: &SolveConfig,
) -> Vec<(String, State)> {
    let (u0, v0) = (&baselines.u0.profile, &baselines.v0.profile);
    let mut out = Vec::new();
    for strategy in &cfg.init_strategy {
        match strategy {
            InitStrategy::ScalarPair => {
                out.push((
                    "scalar_pair".into(),
                    State::new(u0.clone(), v0.clone()).expect("grid"),
                ));
            }
            InitStrategy::PerturbedScalar => {
                out.push((
                    "perturbed_scalar_u".into(),
                    State::new(u0.clone(), scaled(v0, 0.1)).expect("grid"),
                ));
                out.push((
                    "perturbed_scalar_v".into(),
                    State::new(scaled(u0, 0.1), v0.clone()).expect("grid"),
                ));
            }
            InitStrategy::RandomGaussians => {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                for k in 0..cfg.random_starts {
                    let mut s = State::new(
                        random_profile(grid, &mut rng),
                        random_profile(grid, &mut rng),
                    )
                    .expect("grid");
                    // Raise the amplitude until the well is attractive.
                    for _ in 0..20 {
                        if components(&s, params).well() > 0.0 {
                            break;
                        }
                        s = State::new(scaled(&s.u, 1.5), scaled(&s.v, 1.5)).expect("grid");
                    }
                    out.push((format!("random_gaussians_{k}"), s));
                }
            }
        }
    }
    out
}

pub fn solve_coupled(
    params: &EnergyParams,
    grid: &RadialGrid,
    cfg: &SolveConfig,
) -> Result<GroundState> {
    if !(params.beta > 0.0) {
        return Err(Error::NegativeBeta(params.beta));
    }
    cfg.validate()?;
    let baselines = Baselines::compute(params, grid, &cfg.shooting)?;
    solve_coupled_with_baselines(params, grid, cfg, &baselines)
}

/// As [`solve_coupled`], reusing precomputed scalar ground states.
pub fn solve_coupled_with_baselines(
    params: &EnergyParams,
    grid: &RadialGrid,
    cfg: &SolveConfig,
    baselines: &Baselines,
) -> Result<GroundState> {
    if !(params.beta > 0.0) {
        return Err(Error::NegativeBeta(params.beta));
    }
    cfg.validate()?;
    let grid = *grid;
    if baselines.scalar_u.grid() != &grid {
        return Err(Error::GridMismatch);
    }
    let mut candidates: Vec<Candidate> = Vec::new();
    for (k, (name, s)) in [
        ("scalar_u", &baselines.scalar_u),
        ("scalar_v", &baselines.scalar_v),
    ]
    .into_iter()
    .enumerate()
    {
        candidates.push(candidate(
            s.clone(),
            params,
            cfg,
            0,
            Vec::new(),
            name.into(),
            k,
        )?);
    }

    let starts = starts(baselines, params, grid, cfg);
    let feasible: Vec<(usize, String, State)> = starts
        .into_iter()
        .enumerate()
        .filter(|(_, (_, s))| components(s, params).well() > 0.0)
        .map(|(k, (name, s))| (k + 2, name, s))
        .collect();
    if feasible.is_empty() {
        return Err(Error::InfeasibleStart);
    }
    let runs: Vec<Result<Candidate>> = feasible
        .par_iter()
        .map(|(order, name, s)| {
            let d = descend(params, s, cfg)?;
            if !d.converged {
                return Err(Error::NoConvergence(format!(
                    "{name}: gradient norm {:e} after {} iterations",
                    d.gradient_norm, d.iterations
                )));
            }
            let fin = finish(&d.state, params)?;
            candidate(
                fin,
                params,
                cfg,
                d.iterations,
                d.trace,
                name.clone(),
                *order,
            )
        })
        .collect();
    let mut last_err = None;
    let mut converged = 0;
    for r in runs {
        match r {
            Ok(c) => {
                candidates.push(c);
                converged += 1;
            }
            Err(e) => last_err = Some(e),
        }
    }
    // Baselines alone do not make a ground state claim.
    if converged == 0 {
        if let Some(e) = last_err {
            return Err(e);
        }
    }
    let mut best: Option<Candidate> = None;
    for c in candidates {
        if best.as_ref().map_or(true, |b| better(&c, b)) {
            best = Some(c);
        }
    }
    let best = best.ok_or_else(|| Error::NoConvergence("no candidate converged".into()))?;
    Ok(GroundState {
        state: best.state,
        energy: best.energy,
        kind: best.kind,
        residuals: best.residuals,
        iterations: best.iterations,
        trace: best.trace,
        origin: best.origin,
    })
}

/// Recomputes every integral from the stored state and checks, in this
/// order, the PDE residuals, the Pohozaev identity and `I = K/3`. The first
/// violated clause is reported.
pub fn certify_state(state: &State, params: &EnergyParams) -> Result<EnergyReport> {
    let rep = report(state, params);
    let worst = rep.residual_u.max(rep.residual_v);
    if !(worst < RESIDUAL_TOL) {
        return Err(Error::CertificationFailure {
            clause: "residual".into(),
            detail: format!(
                "residuals ({:e}, {:e}) not below {RESIDUAL_TOL:e}",
                rep.residual_u, rep.residual_v
            ),
        });
    }
    let scale = 1.0 + rep.K;
    if !(rep.J.abs() <= POHOZAEV_TOL * scale) {
        return Err(Error::CertificationFailure {
            clause: "pohozaev".into(),
            detail: format!("|J| = {:e} > {:e}", rep.J.abs(), POHOZAEV_TOL * scale),
        });
    }
    let gap = (rep.I - rep.K / 3.0).abs();
    if !(gap <= POHOZAEV_TOL * scale) {
        return Err(Error::CertificationFailure {
            clause: "action".into(),
            detail: format!("|I - K/3| = {gap:e} > {:e}", POHOZAEV_TOL * scale),
        });
    }
    Ok(rep)
}

pub fn certify(gs: &GroundState, params: &EnergyParams) -> Result<EnergyReport> {
    certify_state(&gs.state, params)
}
