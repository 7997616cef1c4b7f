//! Run configuration: flat `key = value` lines with dotted sections.
//!
//! ```text
//! # comment
//! grid.R = 20
//! grid.N = 4000
//! f.family = power_sum
//! f.terms = [[1, 3], [0.5, 2.5]]
//! g.family = cubic
//! beta = 2
//! solver.init_strategy = scalar_pair, random_gaussians
//! output.dir = out
//! ```
//!
//! Unknown or repeated keys are errors. Array values are JSON.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::coupled::{InitStrategy, SolveConfig};
use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::nonlinearity::{Nonlinearity, SampleSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub grid: RadialGrid,
    pub f: Option<Nonlinearity>,
    pub g: Option<Nonlinearity>,
    pub beta: Option<f64>,
    pub beta_list: Option<Vec<f64>>,
    /// Solver settings, including the shooting settings and the seed.
    pub solver: SolveConfig,
    pub output_dir: PathBuf,
    /// Exponent tried first for the growth condition.
    pub p_test: f64,
    pub samples: SampleSpec,
    /// When set, a sweep refines its bracket by bisection to this width.
    pub bisect_tol: Option<f64>,
}

const KEYS: &[&str] = &[
    "grid.R",
    "grid.N",
    "f.family",
    "f.terms",
    "f.amplitude",
    "g.family",
    "g.terms",
    "g.amplitude",
    "beta",
    "beta_list",
    "seed",
    "solver.max_iters",
    "solver.grad_tol",
    "solver.step",
    "solver.backtrack",
    "solver.armijo",
    "solver.init_strategy",
    "solver.classify_tol",
    "solver.random_starts",
    "shooting.a_min",
    "shooting.a_max",
    "shooting.ode_step",
    "shooting.max_bisect",
    "shooting.classify_radius",
    "output.dir",
    "assumptions.p_test",
    "assumptions.t_max",
    "assumptions.n_samples",
    "sweep.bisect_tol",
];

struct Entries {
    map: BTreeMap<String, (usize, String)>,
}

impl Entries {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.map.remove(key)
    }

    fn real(&mut self, key: &str) -> Result<Option<f64>> {
        self.take(key)
            .map(|(line, v)| {
                v.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| {
                        Error::Config(format!("line {line}: {key} expects a number, got `{v}`"))
                    })
            })
            .transpose()
    }

    fn int(&mut self, key: &str) -> Result<Option<usize>> {
        self.take(key)
            .map(|(line, v)| {
                v.parse::<usize>().map_err(|_| {
                    Error::Config(format!(
                        "line {line}: {key} expects a nonnegative integer, got `{v}`"
                    ))
                })
            })
            .transpose()
    }

    fn json<T: serde::de::DeserializeOwned>(&mut self, key: &str) -> Result<Option<T>> {
        self.take(key)
            .map(|(line, v)| {
                serde_json::from_str(&v)
                    .map_err(|e| Error::Config(format!("line {line}: {key}: {e}")))
            })
            .transpose()
    }

    fn nonlinearity(&mut self, prefix: &str) -> Result<Option<Nonlinearity>> {
        let family = self.take(&format!("{prefix}.family"));
        let terms: Option<Vec<(f64, f64)>> = self.json(&format!("{prefix}.terms"))?;
        let amplitude = self.real(&format!("{prefix}.amplitude"))?;
        let Some((line, family)) = family else {
            if terms.is_some() || amplitude.is_some() {
                return Err(Error::Config(format!("{prefix}.family is missing")));
            }
            return Ok(None);
        };
        let stray = |what: &str| {
            Error::Config(format!(
                "line {line}: {prefix}.{what} does not apply to family `{family}`"
            ))
        };
        let nl = match family.as_str() {
            "cubic" => {
                if terms.is_some() {
                    return Err(stray("terms"));
                }
                if amplitude.is_some() {
                    return Err(stray("amplitude"));
                }
                Nonlinearity::cubic()
            }
            "power_sum" => {
                if amplitude.is_some() {
                    return Err(stray("amplitude"));
                }
                let terms = terms.ok_or_else(|| Error::Config(format!("{prefix}.terms is required for power_sum")))?;
                if terms.is_empty() {
                    return Err(Error::Config(format!("{prefix}.terms is empty")));
                }
                Nonlinearity::power_sum(&terms)?
            }
            "log_enhanced" => {
                if terms.is_some() {
                    return Err(stray("terms"));
                }
                Nonlinearity::log_enhanced(amplitude.unwrap_or(1.0))?
            }
            other => {
                return Err(Error::Config(format!(
                    "line {line}: unknown {prefix}.family `{other}` (expected cubic, power_sum or log_enhanced)"
                )))
            }
        };
        Ok(Some(nl))
    }
}

fn unquote(v: &str) -> &str {
    v.strip_prefix('"')
        .and_then(|s| s.strip_suffix('"'))
        .unwrap_or(v)
}

fn strategies(line: usize, v: &str) -> Result<Vec<InitStrategy>> {
    let names: Vec<String> = if v.starts_with('[') {
        serde_json::from_str(v)
            .map_err(|e| Error::Config(format!("line {line}: solver.init_strategy: {e}")))?
    } else {
        v.split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect()
    };
    names.iter().map(|n| InitStrategy::parse(n)).collect()
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let t = raw.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let (key, value) = t.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {line}: expected `key = value`, got `{t}`"))
            })?;
            let key = key.trim();
            let value = unquote(value.trim()).to_string();
            if !KEYS.contains(&key) {
                return Err(Error::Config(format!("line {line}: unknown key `{key}`")));
            }
            if let Some((first, _)) = map.insert(key.to_string(), (line, value)) {
                return Err(Error::Config(format!(
                    "line {line}: `{key}` already set on line {first}"
                )));
            }
        }
        let mut e = Entries { map };

        let radius = e.real("grid.R")?.unwrap_or(20.0);
        let intervals = e.int("grid.N")?.unwrap_or(4000);
        let grid = RadialGrid::new(radius, intervals)?;
        let f = e.nonlinearity("f")?;
        let g = e.nonlinearity("g")?;
        let beta = e.real("beta")?;
        let beta_list: Option<Vec<f64>> = e.json("beta_list")?;

        let mut solver = SolveConfig::default();
        if let Some(x) = e.int("solver.max_iters")? {
            solver.max_iters = x;
        }
        if let Some(x) = e.real("solver.grad_tol")? {
            solver.grad_tol = x;
        }
        if let Some(x) = e.real("solver.step")? {
            solver.step = x;
        }
        if let Some(x) = e.real("solver.backtrack")? {
            solver.backtrack = x;
        }
        if let Some(x) = e.real("solver.armijo")? {
            solver.armijo = x;
        }
        if let Some((line, v)) = e.take("solver.init_strategy") {
            solver.init_strategy = strategies(line, &v)?;
        }
        if let Some(x) = e.real("solver.classify_tol")? {
            solver.classify_tol = x;
        }
        if let Some(x) = e.int("solver.random_starts")? {
            solver.random_starts = x;
        }
        if let Some((line, v)) = e.take("seed") {
            solver.seed = v.parse().map_err(|_| {
                Error::Config(format!(
                    "line {line}: seed expects a nonnegative integer, got `{v}`"
                ))
            })?;
        }
        if let Some(x) = e.real("shooting.a_min")? {
            solver.shooting.a_min = x;
        }
        if let Some(x) = e.real("shooting.a_max")? {
            solver.shooting.a_max = x;
        }
        solver.shooting.ode_step = e.real("shooting.ode_step")?;
        if let Some(x) = e.int("shooting.max_bisect")? {
            solver.shooting.max_bisect = x;
        }
        solver.shooting.classify_radius = e.real("shooting.classify_radius")?;
        solver.validate()?;

        let output_dir = PathBuf::from(
            e.take("output.dir")
                .map(|(_, v)| v)
                .unwrap_or_else(|| ".".into()),
        );
        let p_test = e.real("assumptions.p_test")?.unwrap_or(3.0);
        let mut samples = SampleSpec::default();
        if let Some(x) = e.real("assumptions.t_max")? {
            samples.t_max = x;
        }
        if let Some(x) = e.int("assumptions.n_samples")? {
            samples.n_samples = x;
        }
        let bisect_tol = e.real("sweep.bisect_tol")?;
        if let Some(t) = bisect_tol {
            if !(t > 0.0) {
                return Err(Error::Config(format!(
                    "sweep.bisect_tol must be positive, got {t}"
                )));
            }
        }
        debug_assert!(e.map.is_empty(), "unconsumed keys {:?}", e.map.keys());

        Ok(RunConfig {
            grid,
            f,
            g,
            beta,
            beta_list,
            solver,
            output_dir,
            p_test,
            samples,
            bisect_tol,
        })
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn require_f(&self) -> Result<&Nonlinearity> {
        self.f
            .as_ref()
            .ok_or_else(|| Error::Config("f.family is missing".into()))
    }

    pub fn require_g(&self) -> Result<&Nonlinearity> {
        self.g
            .as_ref()
            .ok_or_else(|| Error::Config("g.family is missing".into()))
    }

    pub fn require_beta(&self) -> Result<f64> {
        self.beta
            .ok_or_else(|| Error::Config("beta is missing".into()))
    }

    pub fn require_beta_list(&self) -> Result<&[f64]> {
        self.beta_list
            .as_deref()
            .ok_or_else(|| Error::Config("beta_list is missing".into()))
    }
}
