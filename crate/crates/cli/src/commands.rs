use std::path::{Path, PathBuf};

use pohozaev_core::coupled::certify_state;
use pohozaev_core::energy::report;
use pohozaev_core::io::{
    fmt_f64, profile_csv, read_state_csv, report_text, state_csv, write_atomic,
};
use pohozaev_core::nonlinearity::check_assumptions;
use pohozaev_core::threshold::{bisect_beta0, sweep as run_sweep};
use pohozaev_core::{
    certify, solve_coupled, solve_scalar, EnergyParams, Error, Nonlinearity, Profile, RunConfig,
    State,
};

pub const OK: u8 = 0;
pub const CONFIG: u8 = 1;
pub const NUMERIC: u8 = 2;
pub const CERTIFICATION: u8 = 3;
pub const PARTIAL: u8 = 4;

/// Scalar ground states must reach this Newton residual.
const SCALAR_RESIDUAL: f64 = 1e-6;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_)
        | Error::Parse(_)
        | Error::Io(_)
        | Error::InvalidExponent(_)
        | Error::InvalidNonlinearity(_)
        | Error::InvalidGrid(_)
        | Error::LengthMismatch { .. }
        | Error::GridMismatch
        | Error::NegativeBeta(_)
        | Error::InvalidBracket => CONFIG,
        Error::CertificationFailure { .. } => CERTIFICATION,
        _ => NUMERIC,
    }
}

fn fail(e: Error) -> u8 {
    eprintln!("error: {e}");
    exit_code(&e)
}

fn load(path: &Path, out: Option<PathBuf>) -> Result<RunConfig, Error> {
    let mut cfg = RunConfig::load(path)?;
    if let Some(dir) = out {
        cfg.output_dir = dir;
    }
    Ok(cfg)
}

fn admissible(cfg: &RunConfig, name: &str, nl: &Nonlinearity) -> Result<(), Error> {
    let rep = check_assumptions(nl, cfg.p_test, cfg.samples)?;
    if rep.admissible() {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "{name} fails the growth assumptions: {rep:?}"
        )))
    }
}

fn coupled_params(cfg: &RunConfig, beta: f64) -> Result<EnergyParams, Error> {
    let f = cfg.require_f()?;
    let g = cfg.require_g()?;
    admissible(cfg, "f", f)?;
    admissible(cfg, "g", g)?;
    Ok(EnergyParams::new(f.clone(), g.clone(), beta))
}

pub fn scalar(path: &Path, out: Option<PathBuf>) -> u8 {
    let run = || -> Result<u8, Error> {
        let cfg = load(path, out)?;
        let f = cfg.require_f()?;
        admissible(&cfg, "f", f)?;
        cfg.solver.shooting.validate()?;
        let gs = solve_scalar(f, &cfg.grid, &cfg.solver.shooting)?;
        let params = EnergyParams::new(f.clone(), Nonlinearity::power_sum(&[])?, 0.0);
        let embedded = State::new(gs.profile.clone(), Profile::zeros(cfg.grid))?;
        let mut text = report_text(&report(&embedded, &params));
        text.push_str(&format!(
            "center_value={}\nresidual={}\n",
            fmt_f64(gs.center_value),
            fmt_f64(gs.residual)
        ));
        write_atomic(&cfg.output_dir.join("u0.csv"), &profile_csv(&gs.profile))?;
        write_atomic(&cfg.output_dir.join("u0.report"), &text)?;
        println!(
            "a={} I={} residual={}",
            fmt_f64(gs.center_value),
            fmt_f64(gs.action),
            fmt_f64(gs.residual)
        );
        if gs.residual < SCALAR_RESIDUAL {
            Ok(OK)
        } else {
            eprintln!(
                "error: scalar residual {:e} above {SCALAR_RESIDUAL:e}",
                gs.residual
            );
            Ok(NUMERIC)
        }
    };
    run().unwrap_or_else(fail)
}

pub fn coupled(path: &Path, out: Option<PathBuf>) -> u8 {
    let run = || -> Result<u8, Error> {
        let cfg = load(path, out)?;
        let params = coupled_params(&cfg, cfg.require_beta()?)?;
        let gs = solve_coupled(&params, &cfg.grid, &cfg.solver)?;
        write_atomic(&cfg.output_dir.join("state.csv"), &state_csv(&gs.state))?;
        write_atomic(
            &cfg.output_dir.join("state.report"),
            &report_text(&report(&gs.state, &params)),
        )?;
        println!(
            "kind={} m={} beta={}",
            gs.kind,
            fmt_f64(gs.energy),
            fmt_f64(params.beta)
        );
        certify(&gs, &params)?;
        Ok(OK)
    };
    run().unwrap_or_else(fail)
}

pub fn sweep(path: &Path, out: Option<PathBuf>) -> u8 {
    let run = || -> Result<u8, Error> {
        let cfg = load(path, out)?;
        let betas = cfg.require_beta_list()?;
        if betas.is_empty() {
            return Err(Error::Config("beta_list is empty".into()));
        }
        let params = coupled_params(&cfg, betas[0])?;
        let result = run_sweep(&params, betas, &cfg.grid, &cfg.solver)?;
        let mut csv = String::from("beta,m,kind,scalar_min,lhs_bound,beats\n");
        for row in &result.rows {
            let (m, kind, beats) = match &row.outcome {
                Ok(s) => (s.m, s.kind.name(), s.vector_beats_scalar),
                Err(e) => {
                    eprintln!("row beta={}: {e}", row.beta);
                    (f64::NAN, "failed", false)
                }
            };
            csv.push_str(&format!(
                "{},{},{kind},{},{},{beats}\n",
                fmt_f64(row.beta),
                fmt_f64(m),
                fmt_f64(row.scalar_min),
                fmt_f64(row.lhs_bound)
            ));
        }
        write_atomic(&cfg.output_dir.join("sweep.csv"), &csv)?;
        let failed = result.failed();
        let mut summary = format!("rows={} failed={failed}", result.rows.len());
        match result.beta0_bracket {
            Some((lo, hi)) => {
                summary.push_str(&format!(
                    " bracket_lo={} bracket_hi={}",
                    fmt_f64(lo),
                    fmt_f64(hi)
                ));
                if let Some(tol) = cfg.bisect_tol {
                    let b = bisect_beta0(&params, (lo, hi), tol, &cfg.grid, &cfg.solver)?;
                    summary.push_str(&format!(" beta0={}", fmt_f64(b)));
                }
            }
            None => summary.push_str(" bracket=none"),
        }
        println!("{summary}");
        Ok(match failed {
            0 => OK,
            n if n == result.rows.len() => NUMERIC,
            _ => PARTIAL,
        })
    };
    run().unwrap_or_else(fail)
}

pub fn check(path: &Path, state: &Path) -> u8 {
    let run = || -> Result<u8, Error> {
        let cfg = RunConfig::load(path)?;
        let params = coupled_params(&cfg, cfg.require_beta()?)?;
        if !(params.beta > 0.0) {
            return Err(Error::NegativeBeta(params.beta));
        }
        let s = read_state_csv(state, &cfg.grid)?;
        print!("{}", report_text(&report(&s, &params)));
        certify_state(&s, &params)?;
        Ok(OK)
    };
    run().unwrap_or_else(fail)
}
