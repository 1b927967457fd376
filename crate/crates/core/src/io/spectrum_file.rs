//! Line-oriented sector files.
//!
//! ```text
//! # format_version=1
//! # N=3
//! # L=6.2831853071795862
//! # c=...
//! # n_over_c=...
//! # P=0
//! # M=2
//! # tolerance=1.0000000000000000e-15
//! # energy_ceiling=none
//! # level_count=1
//! # e_max_certified=none
//! # columns=m_1..m_N lambda_1..lambda_N E P residual
//! -1 0 1 -0.99999... 0.0000000000000000 0.99999... 1.99999... 0 1.1e-16
//! ```
//!
//! Quantum numbers are exact (`3`, `-5/2`); the cutoff convention is `|m| < M`.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::bethe::rounding_floor;
use crate::error::{Error, Result};
use crate::quantum::{HalfInt, ModelParams, QuantumNumbers};
use crate::sector::{Level, SpectrumSector};

use super::number::{format_f64, format_sci};

pub const SPECTRUM_FORMAT_VERSION: u32 = 1;

fn opt_f64(x: Option<f64>) -> String {
    x.map_or_else(|| "none".to_string(), format_f64)
}

/// Serialises a sector into `out`.
pub fn write_sector<W: Write>(sector: &SpectrumSector<f64>, mut out: W) -> Result<()> {
    let p = sector.params();
    let mut s = String::new();
    let mut kv = |k: &str, v: String| {
        s.push_str("# ");
        s.push_str(k);
        s.push('=');
        s.push_str(&v);
        s.push('\n');
    };
    kv("format_version", SPECTRUM_FORMAT_VERSION.to_string());
    kv("N", p.n_particles().to_string());
    kv("L", format_f64(p.ring_length()));
    kv("c", format_f64(p.coupling()));
    kv("n_over_c", format_f64(p.density_ratio()));
    kv("P", sector.momentum().map_or_else(|| "all".into(), |m| m.to_string()));
    kv("M", sector.cutoff().to_string());
    kv("tolerance", format_sci(sector.tolerance()));
    kv("energy_ceiling", opt_f64(sector.energy_ceiling()));
    kv("level_count", sector.len().to_string());
    kv("e_max_certified", opt_f64(sector.e_max_certified()));
    kv("columns", "m_1..m_N lambda_1..lambda_N E P residual".into());
    for lvl in sector.levels() {
        let mut fields: Vec<String> = Vec::with_capacity(2 * p.n_particles() + 3);
        fields.extend(lvl.quantum_numbers.twice().iter().map(|&t| HalfInt(t).to_string()));
        fields.extend(lvl.rapidities.iter().map(|&x| format_f64(x)));
        fields.push(format_f64(lvl.energy));
        fields.push(lvl.quantum_numbers.total_momentum().to_string());
        fields.push(format_sci(lvl.residual_norm));
        s.push_str(&fields.join(" "));
        s.push('\n');
    }
    out.write_all(s.as_bytes())?;
    out.flush()?;
    Ok(())
}

/// Writes (replacing) the file at `path`.
pub fn write_sector_file(sector: &SpectrumSector<f64>, path: impl AsRef<Path>) -> Result<()> {
    let mut buf = Vec::new();
    write_sector(sector, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

pub fn read_sector_file(path: impl AsRef<Path>) -> Result<SpectrumSector<f64>> {
    let f = fs::File::open(path)?;
    read_sector(BufReader::new(f))
}

#[derive(Default)]
struct Header {
    version: Option<u32>,
    n: Option<usize>,
    l: Option<f64>,
    c: Option<f64>,
    n_over_c: Option<f64>,
    momentum: Option<Option<i64>>,
    cutoff: Option<i64>,
    tolerance: Option<f64>,
    ceiling: Option<Option<f64>>,
    level_count: Option<usize>,
    e_max: Option<Option<f64>>,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn num<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| parse_err(line, format!("bad value '{v}' for {key}")))
}

fn opt_num(line: usize, key: &str, v: &str) -> Result<Option<f64>> {
    if v == "none" {
        Ok(None)
    } else {
        num(line, key, v).map(Some)
    }
}

/// Parses a sector file and re-checks its invariants.
pub fn read_sector<R: BufRead>(source: R) -> Result<SpectrumSector<f64>> {
    let mut h = Header::default();
    let mut records: Vec<(usize, String)> = Vec::new();
    let mut last_complete = 0;
    let mut truncated = false;
    let mut reader = source;
    let mut lineno = 0;
    loop {
        let mut raw = String::new();
        if reader.read_line(&mut raw)? == 0 {
            break;
        }
        lineno += 1;
        if !raw.ends_with('\n') {
            truncated = true;
            break;
        }
        let line = raw.trim_end_matches(['\n', '\r']);
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            let (k, v) = rest
                .split_once('=')
                .ok_or_else(|| parse_err(lineno, format!("header line without '=': {rest}")))?;
            let (k, v) = (k.trim(), v.trim());
            match k {
                "format_version" => h.version = Some(num(lineno, k, v)?),
                "N" => h.n = Some(num(lineno, k, v)?),
                "L" => h.l = Some(num(lineno, k, v)?),
                "c" => h.c = Some(num(lineno, k, v)?),
                "n_over_c" => h.n_over_c = Some(num(lineno, k, v)?),
                "P" => h.momentum = Some(if v == "all" { None } else { Some(num(lineno, k, v)?) }),
                "M" => h.cutoff = Some(num(lineno, k, v)?),
                "tolerance" => h.tolerance = Some(num(lineno, k, v)?),
                "energy_ceiling" => h.ceiling = Some(opt_num(lineno, k, v)?),
                "level_count" => h.level_count = Some(num(lineno, k, v)?),
                "e_max_certified" => h.e_max = Some(opt_num(lineno, k, v)?),
                _ => {}
            }
        } else if !line.trim().is_empty() {
            records.push((lineno, line.to_string()));
        }
        last_complete = lineno;
    }
    if truncated {
        return Err(parse_err(
            last_complete,
            format!("truncated file: last complete line is {last_complete}"),
        ));
    }

    let missing = |k: &str| parse_err(last_complete, format!("missing header key '{k}'"));
    let version = h.version.ok_or_else(|| missing("format_version"))?;
    if version != SPECTRUM_FORMAT_VERSION {
        return Err(parse_err(1, format!("unsupported format_version {version}")));
    }
    let n = h.n.ok_or_else(|| missing("N"))?;
    let params = ModelParams::new(n, h.l.ok_or_else(|| missing("L"))?, h.c.ok_or_else(|| missing("c"))?)
        .map_err(|e| Error::Integrity(e.to_string()))?;
    if let Some(r) = h.n_over_c {
        if (r - params.density_ratio()).abs() > 1e-12 * r.abs() {
            return Err(Error::Integrity(format!(
                "n_over_c = {r} disagrees with N/(L c) = {}",
                params.density_ratio()
            )));
        }
    }
    let momentum = h.momentum.ok_or_else(|| missing("P"))?;
    let cutoff = h.cutoff.ok_or_else(|| missing("M"))?;
    let tolerance = h.tolerance.ok_or_else(|| missing("tolerance"))?;
    let ceiling = h.ceiling.unwrap_or(None);
    let level_count = h.level_count.ok_or_else(|| missing("level_count"))?;

    if records.len() < level_count {
        return Err(parse_err(
            last_complete,
            format!(
                "truncated file: level_count = {level_count} but {} records; last complete line is {last_complete}",
                records.len()
            ),
        ));
    }
    if records.len() > level_count {
        return Err(Error::Integrity(format!(
            "level_count = {level_count} but {} records",
            records.len()
        )));
    }

    let mut levels = Vec::with_capacity(records.len());
    for (ln, rec) in &records {
        let lvl = parse_record(*ln, rec, n, cutoff)?;
        let p_rec: i64 = rec.split_whitespace().nth(2 * n + 1).unwrap().parse().unwrap();
        let p_qn = lvl.quantum_numbers.total_momentum();
        if p_rec != p_qn {
            return Err(Error::Integrity(format!(
                "line {ln}: recorded P = {p_rec} but Σm = {p_qn}"
            )));
        }
        if let Some(p) = momentum {
            if p_qn != p {
                return Err(Error::Integrity(format!(
                    "line {ln}: level momentum {p_qn} in sector P = {p}"
                )));
            }
        }
        let sum: f64 = lvl.rapidities.iter().sum();
        let want = std::f64::consts::TAU / params.ring_length() * p_qn as f64;
        let tol = 10.0 * tolerance.max(rounding_floor(&lvl.rapidities));
        if (sum - want).abs() > tol {
            return Err(Error::Integrity(format!(
                "line {ln}: Σλ = {sum} does not reproduce momentum {want}"
            )));
        }
        let e: f64 = lvl.rapidities.iter().map(|x| x * x).sum();
        if (e - lvl.energy).abs() > 8.0 * f64::EPSILON * e.abs().max(1.0) {
            return Err(Error::Integrity(format!(
                "line {ln}: E = {} but Σλ² = {e}",
                lvl.energy
            )));
        }
        levels.push(lvl);
    }
    let mut sector = SpectrumSector::new(params, momentum, cutoff, tolerance, ceiling, levels.clone())
        .map_err(|e| Error::Integrity(e.to_string()))?;
    if sector.levels() != levels.as_slice() {
        return Err(Error::Integrity("records are not in canonical (energy, quantum number) order".into()));
    }
    sector.set_e_max_certified(h.e_max.unwrap_or(None));
    Ok(sector)
}

fn parse_record(ln: usize, rec: &str, n: usize, cutoff: i64) -> Result<Level<f64>> {
    let fields: Vec<&str> = rec.split_whitespace().collect();
    if fields.len() != 2 * n + 3 {
        return Err(parse_err(
            ln,
            format!("expected {} fields, found {}", 2 * n + 3, fields.len()),
        ));
    }
    let twice = fields[..n]
        .iter()
        .map(|f| f.parse::<HalfInt>().map(|h| h.0).map_err(|e| parse_err(ln, e)))
        .collect::<Result<Vec<i64>>>()?;
    let quantum_numbers = QuantumNumbers::from_twice(twice, cutoff).map_err(|e| Error::Integrity(format!("line {ln}: {e}")))?;
    let rapidities = fields[n..2 * n]
        .iter()
        .map(|f| num::<f64>(ln, "lambda", f))
        .collect::<Result<Vec<f64>>>()?;
    let energy = num(ln, "E", fields[2 * n])?;
    let _: i64 = num(ln, "P", fields[2 * n + 1])?;
    let residual_norm = num(ln, "residual", fields[2 * n + 2])?;
    Ok(Level {
        energy,
        quantum_numbers,
        rapidities,
        residual_norm,
    })
}
