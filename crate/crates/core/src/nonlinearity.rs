//! Model nonlinearities `f` with exact primitives `F`, and sampled checks of
//! the growth conditions (f1)-(f3) and the Ambrosetti-Rabinowitz condition.
//!
//! Every nonlinearity is odd in `t` and its primitive is even, with
//! `F(0) = 0`. Primitives are closed forms, never quadrature.

use crate::error::{Error, Result};

/// Margin by which `inf f(t)t/F(t)` must exceed 2 for AR to be certified.
pub const AR_MARGIN: f64 = 0.05;

/// One term `a |t|^p sign(t)` of a power-sum nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerTerm {
    pub coefficient: f64,
    pub exponent: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Nonlinearity {
    /// `f(t) = sum a_i |t|^{p_i} sign(t)`.
    PowerSum(Vec<PowerTerm>),
    /// `F(t) = a t^2 ln(1 + t^2) / 2`, which violates AR.
    LogEnhanced { amplitude: f64 },
}

fn subcritical(p: f64) -> bool {
    p > 1.0 && p < 5.0
}

impl Nonlinearity {
    /// Builds a power sum from `(coefficient, exponent)` pairs. An empty list
    /// is allowed and gives `f = 0`.
    pub fn power_sum(terms: &[(f64, f64)]) -> Result<Self> {
        let mut out = Vec::with_capacity(terms.len());
        for &(a, p) in terms {
            if !subcritical(p) {
                return Err(Error::InvalidExponent(p));
            }
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::InvalidNonlinearity(format!(
                    "power-sum coefficient must be positive, got {a}"
                )));
            }
            out.push(PowerTerm {
                coefficient: a,
                exponent: p,
            });
        }
        Ok(Nonlinearity::PowerSum(out))
    }

    /// `f(t) = t^3`.
    pub fn cubic() -> Self {
        Nonlinearity::PowerSum(vec![PowerTerm {
            coefficient: 1.0,
            exponent: 3.0,
        }])
    }

    pub fn log_enhanced(amplitude: f64) -> Result<Self> {
        if !(amplitude > 0.0 && amplitude.is_finite()) {
            return Err(Error::InvalidNonlinearity(format!(
                "log-enhanced amplitude must be positive, got {amplitude}"
            )));
        }
        Ok(Nonlinearity::LogEnhanced { amplitude })
    }

    /// `f(t)`.
    pub fn f(&self, t: f64) -> f64 {
        match self {
            Nonlinearity::PowerSum(terms) => {
                let s = t.abs();
                let mag: f64 = terms
                    .iter()
                    .map(|term| term.coefficient * s.powf(term.exponent))
                    .sum();
                mag.copysign(t)
            }
            Nonlinearity::LogEnhanced { amplitude } => {
                let t2 = t * t;
                amplitude * (t * t2.ln_1p() + t * t2 / (1.0 + t2))
            }
        }
    }

    /// The primitive `F(t) = int_0^t f`.
    pub fn primitive(&self, t: f64) -> f64 {
        match self {
            Nonlinearity::PowerSum(terms) => {
                let s = t.abs();
                terms
                    .iter()
                    .map(|term| {
                        term.coefficient * s.powf(term.exponent + 1.0) / (term.exponent + 1.0)
                    })
                    .sum()
            }
            Nonlinearity::LogEnhanced { amplitude } => {
                let t2 = t * t;
                0.5 * amplitude * t2 * t2.ln_1p()
            }
        }
    }

    /// `f'(t)`, used by Newton polishing.
    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            Nonlinearity::PowerSum(terms) => {
                let s = t.abs();
                terms
                    .iter()
                    .map(|term| term.coefficient * term.exponent * s.powf(term.exponent - 1.0))
                    .sum()
            }
            Nonlinearity::LogEnhanced { amplitude } => {
                let t2 = t * t;
                let q = 1.0 + t2;
                amplitude * (t2.ln_1p() + 2.0 * t2 / q + (3.0 * t2 + t2 * t2) / (q * q))
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Nonlinearity::PowerSum(terms) if terms.is_empty())
    }
}

/// Sampling range for [`check_assumptions`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSpec {
    pub t_max: f64,
    pub n_samples: usize,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec {
            t_max: 10.0,
            n_samples: 1000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArVerdict {
    /// `mu F(t) <= f(t) t` held on every sample with this `mu > 2`.
    Certified { mu: f64 },
    /// `mu F(t) > f(t) t` at this sample.
    Violated { mu: f64, t: f64 },
    /// `F(t) <= 0` at a sample with `t > 0`, so `0 < mu F(t)` fails.
    NonpositivePrimitive { t: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthConstant {
    pub epsilon: f64,
    /// Valid for `|f| <= eps|t| + C|t|^p` and `|F| <= eps t^2 + C|t|^{p+1}`.
    pub c_subcritical: f64,
    /// Same bounds with the critical exponent 5 (resp. 6).
    pub c_critical: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionReport {
    pub f1_ok: bool,
    pub f2_ok: bool,
    /// Exponent at which `f(t)/|t|^p -> 0` was observed (or the last one tried).
    pub f2_exponent: f64,
    pub f3_ok: bool,
    pub f3_witness: Option<f64>,
    pub ar_ok: bool,
    pub ar: ArVerdict,
    /// Sampled infimum of `f(t)t/F(t)` and where it was attained.
    pub ar_infimum: f64,
    pub ar_infimum_at: f64,
    pub growth_constants: Vec<GrowthConstant>,
}

impl AssumptionReport {
    /// (f1), (f2) and (f3) all hold on the samples.
    pub fn admissible(&self) -> bool {
        self.f1_ok && self.f2_ok && self.f3_ok
    }
}

/// Ratios along a geometric sequence tend to zero: nonincreasing over the
/// second half and the last one is small relative to the first.
fn ratios_vanish(ratios: &[f64]) -> bool {
    if ratios.iter().any(|r| !r.is_finite()) {
        return false;
    }
    let tail = &ratios[ratios.len() / 2..];
    let monotone = tail.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    let first = ratios[0].max(1e-300);
    let last = *ratios.last().unwrap();
    monotone && (last <= 1e-3 * first.max(1.0) || last == 0.0)
}

fn f1_holds(nl: &Nonlinearity) -> bool {
    let ratios: Vec<f64> = (1..=30)
        .map(|k| {
            let t = 10f64.powi(-k);
            (nl.f(t) / t).abs()
        })
        .collect();
    ratios_vanish(&ratios)
}

fn f2_holds(nl: &Nonlinearity, p: f64) -> bool {
    let ratios: Vec<f64> = (1..=12)
        .map(|k| {
            let t = 10f64.powi(k);
            nl.f(t).abs() / t.powf(p)
        })
        .collect();
    ratios_vanish(&ratios)
}

/// Checks (f1)-(f3) and AR on samples.
///
/// (f2) only asks for *some* `p` in `(1, 5)`; if `p_test` fails the limit
/// test, larger exponents toward 5 are tried and the one that passed is
/// reported. The AR infimum is taken over a logarithmic grid on
/// `[1e-6, 1e12]` together with the linear samples on `(0, t_max]`, since
/// AR is a condition on the whole half-line.
pub fn check_assumptions(
    nl: &Nonlinearity,
    p_test: f64,
    samples: SampleSpec,
) -> Result<AssumptionReport> {
    if !subcritical(p_test) {
        return Err(Error::InvalidExponent(p_test));
    }
    if !(samples.t_max > 0.0 && samples.t_max.is_finite()) || samples.n_samples < 100 {
        return Err(Error::Config(format!(
            "sample spec needs t_max > 0 and n_samples >= 100, got {samples:?}"
        )));
    }

    let f1_ok = f1_holds(nl);

    let candidates = [0.0, 0.5, 0.75, 0.9].map(|frac| p_test + frac * (5.0 - p_test));
    let mut f2_ok = false;
    let mut f2_exponent = p_test;
    for &p in &candidates {
        f2_exponent = p;
        if f2_holds(nl, p) {
            f2_ok = true;
            break;
        }
    }

    let n = samples.n_samples;
    let linear: Vec<f64> = (1..=n)
        .map(|k| samples.t_max * k as f64 / n as f64)
        .collect();

    let f3_witness = linear
        .iter()
        .copied()
        .find(|&t| nl.primitive(t) > 0.5 * t * t);

    let (lo, hi) = (-6.0f64, 12.0f64);
    let logarithmic = (0..n).map(|k| 10f64.powf(lo + (hi - lo) * k as f64 / (n - 1) as f64));
    let mut ar_infimum = f64::INFINITY;
    let mut ar_infimum_at = f64::NAN;
    let mut nonpositive = None;
    for t in linear.iter().copied().chain(logarithmic) {
        let big_f = nl.primitive(t);
        if big_f <= 0.0 {
            nonpositive.get_or_insert(t);
            continue;
        }
        let ratio = nl.f(t) * t / big_f;
        if ratio < ar_infimum {
            ar_infimum = ratio;
            ar_infimum_at = t;
        }
    }
    let threshold = 2.0 + AR_MARGIN;
    let ar = if let Some(t) = nonpositive {
        ArVerdict::NonpositivePrimitive { t }
    } else if ar_infimum >= threshold {
        ArVerdict::Certified { mu: ar_infimum }
    } else {
        ArVerdict::Violated {
            mu: threshold,
            t: ar_infimum_at,
        }
    };

    let growth_constants = [1.0, 0.1, 0.01, 1e-3]
        .iter()
        .map(|&eps| {
            let sup_over = |q: f64| {
                linear
                    .iter()
                    .map(|&t| {
                        let cf = (nl.f(t).abs() - eps * t) / t.powf(q);
                        let cbig = (nl.primitive(t).abs() - eps * t * t) / t.powf(q + 1.0);
                        cf.max(cbig)
                    })
                    .fold(0.0f64, f64::max)
            };
            GrowthConstant {
                epsilon: eps,
                c_subcritical: sup_over(p_test),
                c_critical: sup_over(5.0),
            }
        })
        .collect();

    Ok(AssumptionReport {
        f1_ok,
        f2_ok,
        f2_exponent,
        f3_ok: f3_witness.is_some(),
        f3_witness,
        ar_ok: matches!(ar, ArVerdict::Certified { .. }),
        ar,
        ar_infimum,
        ar_infimum_at,
        growth_constants,
    })
}
