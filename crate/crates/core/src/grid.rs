//! Uniform radial discretization of radial functions on a ball `B_R` in 3D.
//!
//! Nodes are `r_i = i h`, `i = 0..=N`, with composite trapezoid weights
//! `w_i = 4 pi r_i^2 h c_i`. The central-difference Laplacian
//! `u'' + (2/r) u'` is self-adjoint with respect to these weights, and the
//! discrete kinetic energy
//!
//! ```text
//! K(u) = 4 pi h sum_{i<N} i (i+1) (u_{i+1} - u_i)^2
//! ```
//!
//! satisfies `dK/du_i = -2 w_i (Lap u)_i` exactly for `0 < i < N`. The origin
//! carries zero weight, so `u_0` does not enter any integral.

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const MIN_INTERVALS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid {
    radius: f64,
    intervals: usize,
}

impl RadialGrid {
    pub fn new(radius: f64, intervals: usize) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "radius must be positive, got {radius}"
            )));
        }
        if intervals < MIN_INTERVALS {
            return Err(Error::InvalidGrid(format!(
                "need at least {MIN_INTERVALS} intervals, got {intervals}"
            )));
        }
        Ok(RadialGrid { radius, intervals })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Number of intervals `N`.
    pub fn intervals(&self) -> usize {
        self.intervals
    }

    /// Number of nodes, `N + 1`.
    pub fn len(&self) -> usize {
        self.intervals + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.radius / self.intervals as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.intervals {
            self.radius
        } else {
            i as f64 * self.spacing()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }

    pub fn weight(&self, i: usize) -> f64 {
        let h = self.spacing();
        let r = i as f64 * h;
        let c = if i == 0 || i == self.intervals {
            0.5
        } else {
            1.0
        };
        4.0 * PI * r * r * h * c
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.weight(i)).collect()
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got,
            });
        }
        Ok(())
    }

    /// `sum w_i s_i`, approximating `4 pi int_0^R s(r) r^2 dr`.
    pub fn integrate(&self, samples: &[f64]) -> Result<f64> {
        self.check_len(samples.len())?;
        Ok(self.integrate_unchecked(samples))
    }

    pub(crate) fn integrate_unchecked(&self, samples: &[f64]) -> f64 {
        samples
            .iter()
            .enumerate()
            .map(|(i, s)| self.weight(i) * s)
            .sum()
    }

    /// Integral of `g(i, r_i)` without materializing samples.
    pub(crate) fn integrate_with(&self, mut g: impl FnMut(usize) -> f64) -> f64 {
        (0..self.len()).map(|i| self.weight(i) * g(i)).sum()
    }

    /// Radial Laplacian with the symmetry limit `6 (u_1 - u_0) / h^2` at the
    /// origin and a zero ghost value beyond `R`.
    pub fn laplacian(&self, values: &[f64]) -> Vec<f64> {
        let n = self.intervals;
        debug_assert_eq!(values.len(), n + 1);
        let h2 = self.spacing() * self.spacing();
        let mut out = vec![0.0; n + 1];
        out[0] = 6.0 * (values[1] - values[0]) / h2;
        for i in 1..=n {
            let inv = 1.0 / i as f64;
            let right = if i < n { values[i + 1] } else { 0.0 };
            out[i] = ((1.0 + inv) * right - 2.0 * values[i] + (1.0 - inv) * values[i - 1]) / h2;
        }
        out
    }

    /// Discrete `int |grad u|^2`, the quadratic form of `-Lap`.
    pub fn kinetic(&self, values: &[f64]) -> f64 {
        let h = self.spacing();
        let sum: f64 = values
            .windows(2)
            .enumerate()
            .map(|(i, w)| {
                let d = w[1] - w[0];
                (i * (i + 1)) as f64 * d * d
            })
            .sum();
        4.0 * PI * h * sum
    }

    /// Coupling coefficient between nodes `i` and `i + 1` in the kinetic form.
    pub(crate) fn edge(&self, i: usize) -> f64 {
        4.0 * PI * self.spacing() * (i * (i + 1)) as f64
    }
}

/// A radial function sampled on the nodes of a grid, zero at `r = R`.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    grid: RadialGrid,
    values: Vec<f64>,
}

impl Profile {
    pub fn new(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        grid.check_len(values.len())?;
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Parse(format!(
                "non-finite profile value at node {i}"
            )));
        }
        if *values.last().unwrap() != 0.0 {
            return Err(Error::Parse(format!(
                "profile must vanish at r = R, got {}",
                values.last().unwrap()
            )));
        }
        Ok(Profile { grid, values })
    }

    /// Samples `g` at every node; the last node is clamped to zero.
    pub fn from_fn(grid: RadialGrid, g: impl Fn(f64) -> f64) -> Self {
        let mut values: Vec<f64> = grid.nodes().into_iter().map(g).collect();
        *values.last_mut().unwrap() = 0.0;
        Profile { grid, values }
    }

    pub fn zeros(grid: RadialGrid) -> Self {
        Profile {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    /// Internal constructor for values already known to satisfy the contract.
    pub(crate) fn from_raw(grid: RadialGrid, mut values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        *values.last_mut().unwrap() = 0.0;
        Profile { grid, values }
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn kinetic(&self) -> f64 {
        self.grid.kinetic(&self.values)
    }

    /// `int u^2`.
    pub fn mass(&self) -> f64 {
        self.grid
            .integrate_with(|i| self.values[i] * self.values[i])
    }

    pub fn laplacian(&self) -> Vec<f64> {
        self.grid.laplacian(&self.values)
    }

    /// `r -> u(r / t)` by linear interpolation; arguments beyond `R` read 0.
    pub fn dilate(&self, t: f64) -> Result<Profile> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::NonpositiveDilation(t));
        }
        let n = self.grid.intervals;
        let values = (0..=n)
            .map(|i| {
                let x = i as f64 / t;
                let j = x.floor();
                if j >= n as f64 {
                    return 0.0;
                }
                let j = j as usize;
                let theta = x - j as f64;
                if theta == 0.0 {
                    self.values[j]
                } else {
                    (1.0 - theta) * self.values[j] + theta * self.values[j + 1]
                }
            })
            .collect();
        Ok(Profile::from_raw(self.grid, values))
    }

    /// Radially decreasing rearrangement of `|u|` under the 3D measure.
    ///
    /// `|u|` is refined by cubic interpolation onto a grid `REFINE` times
    /// finer and read as the piecewise-linear function through those points.
    /// Its distribution function `mu(s) = |{x : u(|x|) > s}|` is then exact
    /// and piecewise cubic in `s`; the rearranged value at node `r_k` solves
    /// `mu(s) = 4 pi r_k^3 / 3`. Nonincreasing profiles are returned as-is,
    /// which makes the map idempotent.
    pub fn rearrange(&self) -> Profile {
        let abs: Vec<f64> = self.values.iter().map(|v| v.abs()).collect();
        if abs.windows(2).all(|w| w[1] <= w[0]) {
            return Profile::from_raw(self.grid, abs);
        }
        let fine_vals = refine_cubic(&abs, REFINE);
        let fine_h = self.grid.spacing() / REFINE as f64;
        let dist = Distribution::new(&fine_vals, fine_h);
        let targets = (0..fine_vals.len()).map(|j| {
            let r = j as f64 * fine_h;
            4.0 / 3.0 * PI * r * r * r
        });
        let fine_star = dist.quantiles(targets);
        let mut out: Vec<f64> = fine_star.iter().step_by(REFINE).copied().collect();
        dist.correct_kinks(&mut out, &fine_star, REFINE);
        for k in 1..out.len() {
            out[k] = out[k].min(out[k - 1]);
        }
        Profile::from_raw(self.grid, out)
    }
}

/// Distribution function of a nonnegative piecewise-linear radial function
/// on a uniform mesh.
struct Distribution<'a> {
    vals: &'a [f64],
    h: f64,
}

/// `4 pi / 3 (b^3 - a^3)` without cancellation.
fn shell(a: f64, b: f64) -> f64 {
    4.0 / 3.0 * PI * (b - a) * (b * b + a * b + a * a)
}

impl<'a> Distribution<'a> {
    fn new(vals: &'a [f64], h: f64) -> Self {
        Distribution { vals, h }
    }

    /// Volume of the part of segment `m` where the function exceeds `s`,
    /// assuming `lo < s < hi` on that segment.
    fn partial(&self, m: usize, s: f64) -> f64 {
        let (a, b) = (m as f64 * self.h, (m + 1) as f64 * self.h);
        let (ya, yb) = (self.vals[m], self.vals[m + 1]);
        let x = a + (ya - s) / (ya - yb) * self.h;
        if ya > yb {
            shell(a, x)
        } else {
            shell(x, b)
        }
    }

    /// Volume of `{u > s}`.
    fn measure(&self, s: f64) -> f64 {
        let mut mu = 0.0;
        for m in 0..self.vals.len() - 1 {
            let (ya, yb) = (self.vals[m], self.vals[m + 1]);
            let (lo, hi) = if ya < yb { (ya, yb) } else { (yb, ya) };
            if s < lo {
                mu += shell(m as f64 * self.h, (m + 1) as f64 * self.h);
            } else if s < hi && s > lo {
                mu += self.partial(m, s);
            }
        }
        mu
    }

    /// Compensates the trapezoid rule for the corners of the rearranged
    /// profile.
    ///
    /// An interior local maximum at level `c` makes `u*` flatten abruptly
    /// just after the radius enclosing volume `mu(c)`; an interior local
    /// minimum does the same just before it. The coarse trapezoid rule is not
    /// consistent across such a corner, so on a window around it the coarse
    /// sum of `4 pi r^2 u*` is compared with the fine one (both with their
    /// smooth Euler-Maclaurin end terms removed) and the node on the sloped
    /// side absorbs the difference. This cancels the defect in every
    /// `sum w Phi(u*)` to first order in `Phi`.
    fn correct_kinks(&self, out: &mut [f64], fine: &[f64], refine: usize) {
        const WINDOW: usize = 3;
        let n = out.len() - 1;
        let hf = self.h;
        let h = hf * refine as f64;
        let g = |j: usize| {
            let r = j as f64 * hf;
            4.0 * PI * r * r * fine[j]
        };
        let slope = |j: usize| (g(j + 1) - g(j - 1)) / (2.0 * hf);
        let top = self.vals.iter().cloned().fold(0.0, f64::max);
        for m in 1..self.vals.len() - 1 {
            let (l, c, r) = (self.vals[m - 1], self.vals[m], self.vals[m + 1]);
            let is_max = c > l && c > r;
            let is_min = c < l && c < r;
            if !(is_max || is_min) || c <= 1e-12 * top {
                continue;
            }
            let xi = (3.0 * self.measure(c) / (4.0 * PI)).cbrt();
            let k = (xi / h).floor() as usize;
            if k <= WINDOW || k + 1 + WINDOW >= n {
                continue;
            }
            let (a, b) = (k - WINDOW, k + 1 + WINDOW);
            let coarse: f64 = (a..=b)
                .map(|i| {
                    let r = i as f64 * h;
                    let c = if i == a || i == b { 0.5 } else { 1.0 };
                    c * 4.0 * PI * r * r * out[i]
                })
                .sum::<f64>()
                * h;
            let fine_sum: f64 = (a * refine..=b * refine)
                .map(|j| {
                    let c = if j == a * refine || j == b * refine {
                        0.5
                    } else {
                        1.0
                    };
                    c * g(j)
                })
                .sum::<f64>()
                * hf;
            let jump = slope(b * refine) - slope(a * refine);
            let defect = coarse - fine_sum - (h * h - hf * hf) / 12.0 * jump;
            let node = if is_max { k } else { k + 1 };
            let r = node as f64 * h;
            out[node] -= defect / (4.0 * PI * r * r * h);
        }
    }

    /// Solves `mu(s) = target` for each (nondecreasing) target volume.
    fn quantiles(&self, targets: impl Iterator<Item = f64>) -> Vec<f64> {
        let segs = self.vals.len() - 1;
        // (level, segment, becomes_full): a segment turns partial when s drops
        // below its upper value and full when s drops below its lower value.
        let mut events: Vec<(f64, usize, bool)> = Vec::with_capacity(2 * segs);
        for m in 0..segs {
            let (ya, yb) = (self.vals[m], self.vals[m + 1]);
            let (lo, hi) = if ya < yb { (ya, yb) } else { (yb, ya) };
            if hi > lo {
                events.push((hi, m, false));
            }
            events.push((lo, m, true));
        }
        events.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.2.cmp(&y.2)));

        let mut full = 0.0;
        let mut active: Vec<usize> = Vec::new();
        let mut slot = vec![usize::MAX; segs];
        let mu = |active: &[usize], full: f64, s: f64| -> f64 {
            full + active.iter().map(|&m| self.partial(m, s)).sum::<f64>()
        };

        let top = events.first().map_or(0.0, |e| e.0);
        let mut out = Vec::new();
        let mut targets = targets.peekable();
        let mut e = 0;
        // Levels strictly above the current band have been applied.
        let mut upper = top;
        while e < events.len() {
            let level = events[e].0;
            // Band (level, upper): mu is smooth there.
            if level < upper {
                let mu_hi = mu(&active, full, upper);
                let mu_lo = mu(&active, full, level);
                while let Some(&t) = targets.peek() {
                    if t > mu_lo {
                        break;
                    }
                    out.push(if t <= mu_hi {
                        upper
                    } else {
                        solve_monotone(|s| mu(&active, full, s) - t, level, upper)
                    });
                    targets.next();
                }
            }
            while e < events.len() && events[e].0 == level {
                let (_, m, becomes_full) = events[e];
                if becomes_full {
                    if slot[m] != usize::MAX {
                        let idx = slot[m];
                        active.swap_remove(idx);
                        if idx < active.len() {
                            slot[active[idx]] = idx;
                        }
                        slot[m] = usize::MAX;
                    }
                    let (a, b) = (m as f64 * self.h, (m + 1) as f64 * self.h);
                    full += shell(a, b);
                } else {
                    slot[m] = active.len();
                    active.push(m);
                }
                e += 1;
            }
            upper = level;
        }
        let bottom = upper;
        out.extend(targets.map(|_| bottom));
        out
    }
}

/// Root of a decreasing function on `[lo, hi]` with `g(lo) >= 0 >= g(hi)`,
/// by safeguarded false position.
fn solve_monotone(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let (mut glo, mut ghi) = (g(lo), g(hi));
    let mut side = 0i8;
    for _ in 0..200 {
        if hi - lo <= 1e-15 * hi.abs().max(1e-300) {
            break;
        }
        let mut s = if glo != ghi {
            (lo * ghi - hi * glo) / (ghi - glo)
        } else {
            0.5 * (lo + hi)
        };
        if !(s > lo && s < hi) {
            s = 0.5 * (lo + hi);
        }
        let gs = g(s);
        if gs == 0.0 {
            return s;
        }
        if gs > 0.0 {
            lo = s;
            glo = gs;
            if side == 1 {
                ghi *= 0.5;
            }
            side = 1;
        } else {
            hi = s;
            ghi = gs;
            if side == -1 {
                glo *= 0.5;
            }
            side = -1;
        }
    }
    0.5 * (lo + hi)
}

/// Refinement factor used by [`Profile::rearrange`].
pub const REFINE: usize = 16;

/// Four-point Lagrange interpolation onto a grid `m` times finer, using even
/// reflection at the origin and zeros beyond the last node. Output values are
/// made nonnegative.
fn refine_cubic(values: &[f64], m: usize) -> Vec<f64> {
    let n = values.len() - 1;
    let at = |i: isize| -> f64 {
        let k = i.unsigned_abs();
        if k > n {
            0.0
        } else {
            values[k]
        }
    };
    let mut out = Vec::with_capacity(n * m + 1);
    for j in 0..n {
        let j = j as isize;
        let (a, b, c, d) = (at(j - 1), at(j), at(j + 1), at(j + 2));
        for s in 0..m {
            if s == 0 {
                out.push(b);
                continue;
            }
            let x = s as f64 / m as f64;
            let la = -x * (x - 1.0) * (x - 2.0) / 6.0;
            let lb = (x + 1.0) * (x - 1.0) * (x - 2.0) / 2.0;
            let lc = -(x + 1.0) * x * (x - 2.0) / 2.0;
            let ld = (x + 1.0) * x * (x - 1.0) / 6.0;
            out.push((la * a + lb * b + lc * c + ld * d).abs());
        }
    }
    out.push(values[n]);
    out
}

/// A pair of radial profiles on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub u: Profile,
    pub v: Profile,
}

impl State {
    pub fn new(u: Profile, v: Profile) -> Result<Self> {
        if u.grid != v.grid {
            return Err(Error::GridMismatch);
        }
        Ok(State { u, v })
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.u.grid
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    pub fn dilate(&self, t: f64) -> Result<State> {
        Ok(State {
            u: self.u.dilate(t)?,
            v: self.v.dilate(t)?,
        })
    }

    /// Swaps the two components.
    pub fn swapped(&self) -> State {
        State {
            u: self.v.clone(),
            v: self.u.clone(),
        }
    }
}
