//! TOML documents for saturation certificates and sector-equivalence checks.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::ModelParams;
use crate::sector::SaturationReport;
use crate::symmetry::EquivalenceReport;

pub const VERIFICATION_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSection {
    pub n_particles: usize,
    pub ring_length: f64,
    pub coupling: f64,
    pub n_over_c: f64,
    /// How `coupling` follows from `n_over_c`.
    pub coupling_formula: String,
}

impl ModelSection {
    pub fn new(params: &ModelParams<f64>) -> Self {
        Self {
            n_particles: params.n_particles(),
            ring_length: params.ring_length(),
            coupling: params.coupling(),
            n_over_c: params.density_ratio(),
            coupling_formula: "c = N / (L * n_over_c)".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewLevel {
    pub quantum_numbers: String,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaturationDocument {
    pub format_version: u32,
    pub status: String,
    pub model: ModelSection,
    pub momentum: i64,
    pub cutoff: i64,
    pub large_cutoff: i64,
    pub match_tolerance: f64,
    pub e_max: f64,
    pub e_top: f64,
    pub n_levels_small: usize,
    pub n_levels_large_below_emax: usize,
    pub new_levels_found: usize,
    pub energy_mismatches: usize,
    pub max_energy_deviation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub new_levels_above_emax: Option<usize>,
    #[serde(default)]
    pub new_levels: Vec<NewLevel>,
}

impl SaturationDocument {
    pub fn new(params: &ModelParams<f64>, momentum: i64, match_tolerance: f64, r: &SaturationReport<f64>) -> Self {
        Self {
            format_version: VERIFICATION_FORMAT_VERSION,
            status: if r.certified { "CERTIFIED" } else { "NOT_CERTIFIED" }.into(),
            model: ModelSection::new(params),
            momentum,
            cutoff: r.m_small,
            large_cutoff: r.m_large,
            match_tolerance,
            e_max: r.e_max,
            e_top: r.e_top,
            n_levels_small: r.n_levels_small,
            n_levels_large_below_emax: r.n_levels_large_below_emax,
            new_levels_found: r.new_levels_found,
            energy_mismatches: r.energy_mismatches,
            max_energy_deviation: r.max_energy_deviation,
            new_levels_above_emax: r.new_levels_above_emax,
            new_levels: r
                .new_levels
                .iter()
                .map(|(m, e)| NewLevel {
                    quantum_numbers: m.to_string(),
                    energy: *e,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairResult {
    pub from: i64,
    pub to: i64,
    pub nu: i64,
    pub n_compared: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<usize>,
    pub passed: bool,
}

impl PairResult {
    pub fn new(from: i64, to: i64, r: &EquivalenceReport<f64>) -> Self {
        Self {
            from,
            to,
            nu: r.nu,
            n_compared: r.n_compared,
            max_deviation: r.max_deviation,
            tolerance: r.tolerance,
            first_failure: r.first_failure,
            passed: r.passed(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryDocument {
    pub format_version: u32,
    pub status: String,
    pub model: ModelSection,
    #[serde(rename = "pair")]
    pub pairs: Vec<PairResult>,
}

impl SymmetryDocument {
    pub fn new(params: &ModelParams<f64>, pairs: Vec<PairResult>) -> Self {
        let ok = pairs.iter().all(|p| p.passed);
        Self {
            format_version: VERIFICATION_FORMAT_VERSION,
            status: if ok { "PASSED" } else { "FAILED" }.into(),
            model: ModelSection::new(params),
            pairs,
        }
    }
}

/// Writes any of the documents above as TOML.
pub fn write_document<S: Serialize>(doc: &S, path: impl AsRef<Path>) -> Result<()> {
    let text = toml::to_string(doc).map_err(|e| Error::Integrity(format!("document serialisation: {e}")))?;
    fs::write(path, text)?;
    Ok(())
}

pub fn read_document<S: for<'de> Deserialize<'de>>(path: impl AsRef<Path>) -> Result<S> {
    let text = fs::read_to_string(path)?;
    toml::from_str(&text).map_err(|e| Error::Parse {
        line: 0,
        message: e.to_string(),
    })
}
