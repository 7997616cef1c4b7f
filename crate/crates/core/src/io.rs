//! Plain-text persistence: profile CSVs and `key=value` reports.
//!
//! Floats are written with 17 significant digits so that reading a file back
//! reproduces the bits. Every file is written to a temporary sibling and
//! renamed into place.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::energy::EnergyReport;
use crate::error::{Error, Result};
use crate::grid::{Profile, RadialGrid, State};

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, so readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::Io(format!("{} has no file name", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.tmp{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::from(e)
    })
}

pub fn profile_csv(p: &Profile) -> String {
    let mut out = String::from("r,u\n");
    for (i, u) in p.values().iter().enumerate() {
        out.push_str(&format!("{},{}\n", fmt_f64(p.grid().node(i)), fmt_f64(*u)));
    }
    out
}

pub fn state_csv(s: &State) -> String {
    let mut out = String::from("r,u,v\n");
    let (u, v) = (s.u.values(), s.v.values());
    for i in 0..u.len() {
        out.push_str(&format!(
            "{},{},{}\n",
            fmt_f64(s.grid().node(i)),
            fmt_f64(u[i]),
            fmt_f64(v[i])
        ));
    }
    out
}

/// Parses an `r,u,v` CSV onto `grid`. The row count must match the node
/// count and each `r` must sit on its node.
pub fn parse_state_csv(text: &str, grid: &RadialGrid) -> Result<State> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty state file".into()))?;
    if header.split(',').map(str::trim).collect::<Vec<_>>() != ["r", "u", "v"] {
        return Err(Error::Parse(format!(
            "expected header `r,u,v`, got `{header}`"
        )));
    }
    let mut u = Vec::with_capacity(grid.len());
    let mut v = Vec::with_capacity(grid.len());
    for (i, line) in lines.enumerate() {
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 3 {
            return Err(Error::Parse(format!(
                "row {}: expected 3 columns, got {}",
                i + 1,
                cols.len()
            )));
        }
        let num = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|e| Error::Parse(format!("row {}: `{s}`: {e}", i + 1)))
        };
        let r = num(cols[0])?;
        if i < grid.len() && (r - grid.node(i)).abs() > 1e-9 * grid.radius() {
            return Err(Error::GridMismatch);
        }
        u.push(num(cols[1])?);
        v.push(num(cols[2])?);
    }
    if u.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            got: u.len(),
        });
    }
    State::new(Profile::new(*grid, u)?, Profile::new(*grid, v)?)
}

pub fn read_state_csv(path: &Path, grid: &RadialGrid) -> Result<State> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_state_csv(&text, grid)
}

/// One `key=value` line per field.
pub fn report_text(r: &EnergyReport) -> String {
    let mut out = String::new();
    for (k, v) in [
        ("I", r.I),
        ("J", r.J),
        ("K", r.K),
        ("W", r.W),
        ("normH1_sq", r.normH1_sq),
        ("residual_u", r.residual_u),
        ("residual_v", r.residual_v),
    ] {
        out.push_str(&format!("{k}={}\n", fmt_f64(v)));
    }
    out
}
