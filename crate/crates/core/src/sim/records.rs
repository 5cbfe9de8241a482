//! Per-step simulation log and its CSV form.
//!
//! Column order: `t`, then for each turbine `i` (1-based) `U_eff_i`,
//! `omega_r_i`, `pitch_i`, `tau_gen_i`, `P_dem_i`, `P_gen_i`, `thrust_i`,
//! `mode_i`, `sat_i`, then `r`, `P_bar`, `e`, `u`. Reals are written in
//! scientific notation with 9 significant digits; `mode` is 0 (tracking) or
//! 1 (greedy fallback) and `sat` is 0 or 1.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::turbine::Mode;

/// One turbine's row segment. Turbine quantities (`omega_r`, `pitch`,
/// `tau_gen`, `p_gen`, `thrust`, `mode`) describe the state at `t`; the pitch
/// and torque are those applied over the preceding sample, so
/// `p_gen = tau_gen·omega_r·N·η`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurbineRecord {
    pub u_eff: f64,
    pub omega_r: f64,
    pub pitch: f64,
    pub tau_gen: f64,
    pub p_dem: f64,
    pub p_gen: f64,
    pub thrust: f64,
    pub mode: Mode,
    pub saturated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub t: f64,
    pub turbines: Vec<TurbineRecord>,
    pub r: f64,
    pub p_bar: f64,
    pub e: f64,
    pub u: f64,
}

const TURBINE_COLUMNS: [&str; 9] = [
    "U_eff", "omega_r", "pitch", "tau_gen", "P_dem", "P_gen", "thrust", "mode", "sat",
];

pub fn header(n_turbines: usize) -> String {
    let mut cols = vec!["t".to_string()];
    for i in 1..=n_turbines {
        cols.extend(TURBINE_COLUMNS.iter().map(|c| format!("{c}_{i}")));
    }
    cols.extend(["r", "P_bar", "e", "u"].map(String::from));
    cols.join(",")
}

fn push_real(line: &mut String, v: f64) {
    if !line.is_empty() {
        line.push(',');
    }
    write!(line, "{v:.8e}").expect("write to String");
}

fn push_flag(line: &mut String, v: u8) {
    line.push(',');
    write!(line, "{v}").expect("write to String");
}

pub fn format_row(rec: &StepRecord) -> String {
    let mut line = String::with_capacity(32 + 128 * rec.turbines.len());
    push_real(&mut line, rec.t);
    for tr in &rec.turbines {
        for v in [tr.u_eff, tr.omega_r, tr.pitch, tr.tau_gen, tr.p_dem, tr.p_gen, tr.thrust] {
            push_real(&mut line, v);
        }
        push_flag(&mut line, tr.mode.code());
        push_flag(&mut line, tr.saturated as u8);
    }
    for v in [rec.r, rec.p_bar, rec.e, rec.u] {
        push_real(&mut line, v);
    }
    line
}

pub fn write_records_to<W: Write>(records: &[StepRecord], mut out: W) -> std::io::Result<()> {
    let n = records.first().map_or(0, |r| r.turbines.len());
    writeln!(out, "{}", header(n))?;
    for rec in records {
        writeln!(out, "{}", format_row(rec))?;
    }
    out.flush()
}

pub fn write_records(records: &[StepRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_records_to(records, std::io::BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

pub fn parse_records(text: &str, path: &Path) -> Result<Vec<StepRecord>> {
    let err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut lines = text.lines();
    let head = lines.next().ok_or_else(|| err(1, "missing header".into()))?;
    let n_cols = head.split(',').count();
    if n_cols < 5 || (n_cols - 5) % TURBINE_COLUMNS.len() != 0 {
        return Err(err(1, format!("unexpected column count {n_cols}")));
    }
    let n = (n_cols - 5) / TURBINE_COLUMNS.len();
    if head != header(n) {
        return Err(err(1, "header does not match the record layout".into()));
    }

    let mut records = Vec::new();
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != n_cols {
            return Err(err(lineno, format!("expected {n_cols} fields, got {}", fields.len())));
        }
        let real = |k: usize| -> Result<f64> {
            fields[k]
                .parse::<f64>()
                .map_err(|e| err(lineno, format!("column {}: {e}", k + 1)))
        };
        let flag = |k: usize| -> Result<u8> {
            fields[k]
                .parse::<u8>()
                .map_err(|e| err(lineno, format!("column {}: {e}", k + 1)))
        };
        let mut turbines = Vec::with_capacity(n);
        for i in 0..n {
            let b = 1 + i * TURBINE_COLUMNS.len();
            let mode = Mode::from_code(flag(b + 7)?)
                .ok_or_else(|| err(lineno, format!("column {}: bad mode", b + 8)))?;
            turbines.push(TurbineRecord {
                u_eff: real(b)?,
                omega_r: real(b + 1)?,
                pitch: real(b + 2)?,
                tau_gen: real(b + 3)?,
                p_dem: real(b + 4)?,
                p_gen: real(b + 5)?,
                thrust: real(b + 6)?,
                mode,
                saturated: flag(b + 8)? != 0,
            });
        }
        let tail = n_cols - 4;
        records.push(StepRecord {
            t: real(0)?,
            turbines,
            r: real(tail)?,
            p_bar: real(tail + 1)?,
            e: real(tail + 2)?,
            u: real(tail + 3)?,
        });
    }
    Ok(records)
}

pub fn read_records(path: impl AsRef<Path>) -> Result<Vec<StepRecord>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_records(&text, path)
}
