//! Statistics reports: a TOML document plus whitespace-separated tables for
//! plotting, one per figure-style output.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{Delta3Curve, Histogram, RatioSeries, UnfoldedSequence, POISSON_MEAN_RATIO};

use super::number::format_sci;

pub const REPORT_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub format_version: u32,
    /// `CERTIFIED`, or `UNCERTIFIED` when levels beyond the certified range
    /// were analysed on request.
    pub status: String,
    pub source: SourceSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selection: Option<SelectionSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unfolding: Option<UnfoldingSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lsd: Option<LsdSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<RatioSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta3: Option<Delta3Section>,
    /// Table name to file name, relative to the report.
    #[serde(default)]
    pub tables: BTreeMap<String, String>,
}

impl StatsReport {
    pub fn new(source: SourceSection, certified: bool) -> Self {
        Self {
            format_version: REPORT_FORMAT_VERSION,
            status: if certified { "CERTIFIED" } else { "UNCERTIFIED" }.into(),
            source,
            selection: None,
            unfolding: None,
            lsd: None,
            ratio: None,
            delta3: None,
            tables: BTreeMap::new(),
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Integrity(format!("report serialisation: {e}")))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            line: 0,
            message: e.to_string(),
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SourceSection {
    /// `sector` or `synthetic`.
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_particles: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ring_length: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coupling: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_over_c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coupling_formula: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub momentum: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver_tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e_max_certified: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub synthetic_levels: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionSection {
    pub window_start: usize,
    pub window_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dedup_tolerance: Option<f64>,
    pub dedup_removed: usize,
    pub first_energy: f64,
    pub last_energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnfoldingSection {
    pub degree: usize,
    /// Polynomial in `x = (E - center) / half_width`, lowest order first.
    pub coefficients: Vec<f64>,
    pub center: f64,
    pub half_width: f64,
    pub mean_spacing: f64,
}

impl UnfoldingSection {
    pub fn from_sequence(u: &UnfoldedSequence<f64>) -> Option<Self> {
        u.smooth_model().map(|m| Self {
            degree: m.degree(),
            coefficients: m.coefficients.clone(),
            center: m.center,
            half_width: m.half_width,
            mean_spacing: u.mean_spacing(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LsdSection {
    pub n_bins: usize,
    pub s_max: f64,
    pub bin_width: f64,
    pub total: usize,
    pub overflow_count: usize,
    pub overflow_mass: f64,
    pub first_bin_density: f64,
    pub poisson_first_bin_density: f64,
    pub chi_square: f64,
    pub degrees_of_freedom: usize,
}

impl LsdSection {
    pub fn from_histogram(h: &Histogram<f64>) -> Self {
        let (chi_square, dof) = h.chi_square_against_poisson();
        Self {
            n_bins: h.n_bins(),
            s_max: h.s_max,
            bin_width: h.bin_width,
            total: h.total,
            overflow_count: h.overflow_count,
            overflow_mass: h.overflow_mass(),
            first_bin_density: h.densities[0],
            poisson_first_bin_density: h.poisson_reference()[0],
            chi_square,
            degrees_of_freedom: dof,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioSection {
    pub window_size: usize,
    pub n_values: usize,
    pub mean: f64,
    pub poisson_mean: f64,
    pub zero_spacings: usize,
    pub n_windows: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub windowed_mean_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub windowed_mean_max: Option<f64>,
}

impl RatioSection {
    pub fn from_series(r: &RatioSeries<f64>) -> Self {
        let min = r.windowed_means.iter().copied().reduce(f64::min);
        let max = r.windowed_means.iter().copied().reduce(f64::max);
        Self {
            window_size: r.window_size,
            n_values: r.chi.len(),
            mean: r.mean(),
            poisson_mean: POISSON_MEAN_RATIO,
            zero_spacings: r.zero_spacings.len(),
            n_windows: r.windowed_means.len(),
            windowed_mean_min: min,
            windowed_mean_max: max,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSection {
    pub w_min: f64,
    pub w_max: f64,
    /// `γ0` (slope fit) or `α` (exponent fit).
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intercept: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Delta3Section {
    pub n_starts: usize,
    pub n_points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_first: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_last: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope_fit: Option<FitSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent_fit: Option<FitSection>,
}

impl Delta3Section {
    pub fn from_curve(c: &Delta3Curve<f64>) -> Self {
        Self {
            n_starts: c.n_starts,
            n_points: c.values.len(),
            w_first: c.window_lengths.first().copied(),
            w_last: c.window_lengths.last().copied(),
            slope_fit: c.fit.map(|f| FitSection {
                w_min: f.w_min,
                w_max: f.w_max,
                value: f.gamma0,
                intercept: Some(f.gamma1),
            }),
            exponent_fit: c.exponent.map(|f| FitSection {
                w_min: f.w_min,
                w_max: f.w_max,
                value: f.alpha,
                intercept: None,
            }),
        }
    }
}

/// A named numeric table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Spacing density next to the Poisson bin average.
    pub fn lsd(h: &Histogram<f64>) -> Self {
        let mut t = Self::new("lsd", &["s", "density", "poisson"]);
        let reference = h.poisson_reference();
        for ((s, d), p) in h.bin_centers().into_iter().zip(&h.densities).zip(reference) {
            t.rows.push(vec![s, *d, p]);
        }
        t
    }

    pub fn ratio(r: &RatioSeries<f64>) -> Self {
        let mut t = Self::new("ratio", &["n", "chi"]);
        t.rows = r.chi.iter().enumerate().map(|(i, &c)| vec![i as f64, c]).collect();
        t
    }

    /// Block means, indexed by the centre of each block.
    pub fn ratio_windows(r: &RatioSeries<f64>) -> Self {
        let mut t = Self::new("ratio_windows", &["n_center", "mean_chi", "poisson"]);
        let w = r.window_size as f64;
        t.rows = r
            .windowed_means
            .iter()
            .enumerate()
            .map(|(i, &m)| vec![(i as f64 + 0.5) * w, m, POISSON_MEAN_RATIO])
            .collect();
        t
    }

    /// Δ3 with the Poisson line `W/15` alongside.
    pub fn delta3(c: &Delta3Curve<f64>) -> Self {
        let mut t = Self::new("delta3", &["W", "delta3", "poisson"]);
        t.rows = c
            .window_lengths
            .iter()
            .zip(&c.values)
            .map(|(&w, &d)| vec![w, d, w / 15.0])
            .collect();
        t
    }
}

pub fn write_table<W: Write>(table: &Table, mut out: W) -> Result<()> {
    let mut s = format!("# {}\n", table.columns.join(" "));
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|&x| format_sci(x)).collect();
        s.push_str(&cells.join(" "));
        s.push('\n');
    }
    out.write_all(s.as_bytes())?;
    Ok(())
}

pub fn read_table<R: BufRead>(name: &str, source: R) -> Result<Table> {
    let mut columns = Vec::new();
    let mut rows = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        if let Some(h) = line.strip_prefix('#') {
            columns = h.split_whitespace().map(String::from).collect();
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|f| {
                f.parse::<f64>().map_err(|_| Error::Parse {
                    line: i + 1,
                    message: format!("bad number '{f}'"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != columns.len() {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("expected {} columns, found {}", columns.len(), row.len()),
            });
        }
        rows.push(row);
    }
    Ok(Table {
        name: name.into(),
        columns,
        rows,
    })
}

/// Writes `<dir>/<stem>.toml` and one `<dir>/<stem>_<table>.dat` per table,
/// replacing existing files. Returns the report path.
pub fn write_stats_report(report: &StatsReport, tables: &[Table], dir: impl AsRef<Path>, stem: &str) -> Result<PathBuf> {
    let dir = dir.as_ref();
    let mut report = report.clone();
    for t in tables {
        let file = format!("{stem}_{}.dat", t.name);
        let mut buf = Vec::new();
        write_table(t, &mut buf)?;
        fs::write(dir.join(&file), buf)?;
        report.tables.insert(t.name.clone(), file);
    }
    let path = dir.join(format!("{stem}.toml"));
    fs::write(&path, report.to_toml()?)?;
    Ok(path)
}

/// Reads a table written by [`write_stats_report`].
pub fn read_table_file(name: &str, path: impl AsRef<Path>) -> Result<Table> {
    read_table(name, BufReader::new(fs::File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_curve_gives_empty_table() {
        let c = Delta3Curve::<f64>::new(vec![], vec![], 0).unwrap();
        let mut r = StatsReport::new(SourceSection { kind: "synthetic".into(), ..Default::default() }, true);
        r.delta3 = Some(Delta3Section::from_curve(&c));
        let dir = tempfile::tempdir().unwrap();
        let path = write_stats_report(&r, &[Table::delta3(&c)], dir.path(), "empty").unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let back = StatsReport::from_toml(&text).unwrap();
        assert_eq!(back.delta3.unwrap().n_points, 0);
        let t = read_table_file("delta3", dir.path().join(&back.tables["delta3"])).unwrap();
        assert!(t.rows.is_empty());
        assert_eq!(t.columns, vec!["W", "delta3", "poisson"]);
    }

    #[test]
    fn table_values_round_trip() {
        let mut t = Table::new("x", &["a", "b"]);
        t.rows = vec![vec![0.1 + 0.2, std::f64::consts::PI], vec![1e-300, -2.5e17]];
        let mut buf = Vec::new();
        write_table(&t, &mut buf).unwrap();
        let back = read_table("x", buf.as_slice()).unwrap();
        assert_eq!(back, t);
    }
}
