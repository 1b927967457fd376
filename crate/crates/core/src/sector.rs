//! Fixed-momentum spectra, cutoff saturation and degeneracy removal.

use std::cmp::Ordering;
use std::collections::HashMap;

use rayon::prelude::*;

use crate::bethe::{solve_state, SolverOptions};
use crate::enumerate::enumerate_quantum_sets;
use crate::error::{Error, Result};
use crate::quantum::{ModelParams, QuantumNumbers};
use crate::scalar::Real;

/// Default energy-match tolerance when comparing spectra at two cutoffs.
pub const DEFAULT_MATCH_TOL: f64 = 1e-10;

const CHUNK: usize = 1 << 15;

/// One eigenstate of a sector.
#[derive(Debug, Clone, PartialEq)]
pub struct Level<T> {
    pub energy: T,
    pub quantum_numbers: QuantumNumbers,
    pub rapidities: Vec<T>,
    pub residual_norm: T,
}

/// Energy-sorted levels at fixed `(N, c, L)` and total momentum.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSector<T> {
    params: ModelParams<T>,
    momentum: Option<i64>,
    cutoff: i64,
    tolerance: T,
    energy_ceiling: Option<T>,
    levels: Vec<Level<T>>,
    e_max_certified: Option<T>,
}

fn level_order<T: Real>(a: &Level<T>, b: &Level<T>) -> Ordering {
    a.energy
        .partial_cmp(&b.energy)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.quantum_numbers.cmp(&b.quantum_numbers))
}

impl<T: Real> SpectrumSector<T> {
    /// Assembles a sector from solved levels, sorting them canonically.
    ///
    /// `momentum = None` is the all-momentum spectrum. `energy_ceiling` marks a
    /// sector that kept only levels with `E <= ceiling`.
    pub fn new(
        params: ModelParams<T>,
        momentum: Option<i64>,
        cutoff: i64,
        tolerance: T,
        energy_ceiling: Option<T>,
        mut levels: Vec<Level<T>>,
    ) -> Result<Self> {
        let n = params.n_particles();
        for lvl in &levels {
            if lvl.quantum_numbers.len() != n || lvl.rapidities.len() != n {
                return Err(Error::contract(format!("level {} does not have N = {n} entries", lvl.quantum_numbers)));
            }
            if lvl.quantum_numbers.max_abs_twice() >= 2 * cutoff {
                return Err(Error::contract(format!("level {} exceeds cutoff {cutoff}", lvl.quantum_numbers)));
            }
            if let Some(p) = momentum {
                if lvl.quantum_numbers.total_momentum() != p {
                    return Err(Error::contract(format!(
                        "level {} has momentum {} in sector P = {p}",
                        lvl.quantum_numbers,
                        lvl.quantum_numbers.total_momentum()
                    )));
                }
            }
        }
        levels.sort_by(level_order);
        if levels.windows(2).any(|w| w[0].quantum_numbers == w[1].quantum_numbers) {
            return Err(Error::contract("duplicate quantum numbers in sector"));
        }
        Ok(Self {
            params,
            momentum,
            cutoff,
            tolerance,
            energy_ceiling,
            levels,
            e_max_certified: None,
        })
    }

    pub fn params(&self) -> &ModelParams<T> {
        &self.params
    }

    /// `None` for the all-momentum spectrum.
    pub fn momentum(&self) -> Option<i64> {
        self.momentum
    }

    pub fn cutoff(&self) -> i64 {
        self.cutoff
    }

    /// Solver tolerance the levels were computed with.
    pub fn tolerance(&self) -> T {
        self.tolerance
    }

    pub fn energy_ceiling(&self) -> Option<T> {
        self.energy_ceiling
    }

    pub fn levels(&self) -> &[Level<T>] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn energies(&self) -> Vec<T> {
        self.levels.iter().map(|l| l.energy).collect()
    }

    pub fn max_energy(&self) -> Option<T> {
        self.levels.last().map(|l| l.energy)
    }

    pub fn e_max_certified(&self) -> Option<T> {
        self.e_max_certified
    }

    /// Records a completeness ceiling established elsewhere (a saturation
    /// check or a trusted file header).
    pub fn set_e_max_certified(&mut self, e: Option<T>) {
        self.e_max_certified = e;
    }

    /// Levels with `E <= e_max_certified`; empty when uncertified.
    pub fn certified_levels(&self) -> &[Level<T>] {
        match self.e_max_certified {
            Some(e) => {
                let k = self.levels.partition_point(|l| l.energy <= e);
                &self.levels[..k]
            }
            None => &[],
        }
    }

    /// Energy below which this sector provably contains every Bethe state of
    /// its momentum, whatever the cutoff: see [`cutoff_energy_floor`].
    pub fn completeness_floor(&self) -> T {
        cutoff_energy_floor(&self.params, self.cutoff, self.momentum)
    }
}

/// Rigorous lower bound on the energy of any state that needs a quantum
/// number with `|m| >= cutoff`.
///
/// Each arctangent is bounded by π/2, so `|λ_j - (2π/L) m_j| < (N-1)π/L`; a
/// state with `|m_j| >= M` therefore has `|λ_j| > a = (π/L)(2M - N + 1)`. At
/// fixed momentum `p = 2πP/L = Σλ` the other `N-1` rapidities contribute at
/// least `(p - λ_j)²/(N-1)`, and minimising over `|λ_j| >= a` gives the floor.
pub fn cutoff_energy_floor<T: Real>(params: &ModelParams<T>, cutoff: i64, momentum: Option<i64>) -> T {
    let n = params.n_particles();
    let scale = T::PI() / params.ring_length();
    let a = scale * T::of_int(2 * cutoff - n as i64 + 1);
    if a <= T::zero() {
        return T::zero();
    }
    let floor = match momentum {
        Some(p) if n > 1 => {
            let p = T::TAU() / params.ring_length() * T::of_int(p);
            let rest = T::of_usize(n - 1);
            let f = |x: T| x * x + (p - x) * (p - x) / rest;
            if (p / T::of_usize(n)).abs() >= a {
                p * p / T::of_usize(n)
            } else {
                f(a).min(f(-a))
            }
        }
        _ => a * a,
    };
    // relative slack for rounding in the bound and in the energies
    floor * (T::one() - T::lit(1e-12))
}

/// Lower bound on the energy of the state labelled by `m`, from the same
/// per-rapidity estimate; used to skip solves that cannot land below a ceiling.
fn state_energy_lower_bound<T: Real>(m: &QuantumNumbers, params: &ModelParams<T>) -> T {
    let n = m.len() as i64;
    let scale = T::PI() / params.ring_length();
    m.twice()
        .iter()
        .map(|&t| {
            let a = scale * T::of_int(t.abs() - n + 1);
            if a > T::zero() {
                a * a
            } else {
                T::zero()
            }
        })
        .sum()
}

fn require_sector_params<T: Real>(params: &ModelParams<T>) -> Result<()> {
    if params.n_particles().is_multiple_of(2) {
        return Err(Error::Unsupported(format!(
            "sectors are built for odd N only, got N = {}",
            params.n_particles()
        )));
    }
    Ok(())
}

/// Solves every set with `Σ m = momentum` (all sets when `None`) in parallel,
/// keeping levels with `E <= ceiling` when a ceiling is given.
fn build<T: Real>(
    params: &ModelParams<T>,
    momentum: Option<i64>,
    cutoff: i64,
    opts: &SolverOptions<T>,
    ceiling: Option<T>,
) -> Result<SpectrumSector<T>> {
    require_sector_params(params)?;
    opts.validate()?;
    if cutoff < 1 {
        return Err(Error::contract(format!("cutoff must be >= 1, got {cutoff}")));
    }
    let mut sets = enumerate_quantum_sets(params.n_particles(), cutoff, momentum)
        .filter(|m| ceiling.is_none_or(|e| state_energy_lower_bound(m, params) <= e));
    let mut levels = Vec::new();
    loop {
        let chunk: Vec<QuantumNumbers> = sets.by_ref().take(CHUNK).collect();
        if chunk.is_empty() {
            break;
        }
        let solved: Vec<Result<Level<T>>> = chunk
            .into_par_iter()
            .map(|m| {
                solve_state(&m, params, opts).map(|s| Level {
                    energy: s.energy,
                    quantum_numbers: s.quantum_numbers,
                    rapidities: s.rapidities,
                    residual_norm: s.residual_norm,
                })
            })
            .collect();
        for lvl in solved {
            let lvl = lvl?;
            if ceiling.is_none_or(|e| lvl.energy <= e) {
                levels.push(lvl);
            }
        }
    }
    SpectrumSector::new(*params, momentum, cutoff, opts.tolerance, ceiling, levels)
}

/// All levels with total momentum `P` and quantum numbers `|m| < M`.
///
/// Solves run on the current rayon pool; the result does not depend on its
/// size. Fails on the first (in enumeration order) set that does not converge.
pub fn build_sector<T: Real>(params: &ModelParams<T>, momentum: i64, cutoff: i64, opts: &SolverOptions<T>) -> Result<SpectrumSector<T>> {
    build(params, Some(momentum), cutoff, opts, None)
}

/// Like [`build_sector`], retaining only levels with `E <= ceiling`. Sets
/// whose energy provably exceeds the ceiling are never solved.
pub fn build_sector_below<T: Real>(
    params: &ModelParams<T>,
    momentum: i64,
    cutoff: i64,
    opts: &SolverOptions<T>,
    ceiling: T,
) -> Result<SpectrumSector<T>> {
    build(params, Some(momentum), cutoff, opts, Some(ceiling))
}

/// The spectrum over all momenta under the cutoff.
pub fn build_full_spectrum<T: Real>(params: &ModelParams<T>, cutoff: i64, opts: &SolverOptions<T>, ceiling: Option<T>) -> Result<SpectrumSector<T>> {
    build(params, None, cutoff, opts, ceiling)
}

/// Outcome of comparing one sector against the same sector at a larger cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct SaturationReport<T> {
    pub m_small: i64,
    pub m_large: i64,
    /// Certification ceiling: the smaller of the top energy of the small
    /// sector and its completeness floor.
    pub e_max: T,
    /// Largest energy present in the small sector.
    pub e_top: T,
    pub n_levels_small: usize,
    pub n_levels_large_below_emax: usize,
    /// Levels of the large sector below `e_max` whose quantum numbers are
    /// absent from the small sector.
    pub new_levels_found: usize,
    /// Paired levels whose energies differ by more than the match tolerance.
    pub energy_mismatches: usize,
    pub max_energy_deviation: T,
    /// Up to 20 of the new levels, for reporting.
    pub new_levels: Vec<(QuantumNumbers, T)>,
    /// New levels in `(e_max, e_top]`, when the large sector reaches `e_top`.
    /// These lie in the cutoff-truncated tail and are not certified against.
    pub new_levels_above_emax: Option<usize>,
    pub certified: bool,
}

/// Checks that enlarging the cutoff adds no level below the small sector's
/// certification ceiling and reproduces every shared level's energy within
/// `match_tol`. On success stamps `e_max_certified` onto `small`; a small
/// sector with no level below the ceiling is never certified.
pub fn verify_saturation<T: Real>(small: &mut SpectrumSector<T>, large: &SpectrumSector<T>, match_tol: T) -> Result<SaturationReport<T>> {
    if !(match_tol > T::zero()) {
        return Err(Error::contract("match tolerance must be positive"));
    }
    if small.params != large.params || small.momentum != large.momentum {
        return Err(Error::contract("saturation check needs sectors with identical parameters and momentum"));
    }
    if large.cutoff < small.cutoff {
        return Err(Error::contract(format!(
            "large cutoff {} is below small cutoff {}",
            large.cutoff, small.cutoff
        )));
    }
    let e_top = small.max_energy().unwrap_or(T::zero());
    let e_max = e_top.min(small.completeness_floor());
    if let Some(c) = large.energy_ceiling {
        if c < e_max {
            return Err(Error::contract(format!(
                "large sector only holds levels up to {c}, certification needs {e_max}"
            )));
        }
    }
    // keyed on the values alone: the two sectors carry different cutoffs
    let index: HashMap<&[i64], T> = small
        .levels
        .iter()
        .map(|l| (l.quantum_numbers.twice(), l.energy))
        .collect();
    let below = |s: &SpectrumSector<T>| s.levels.iter().take_while(|l| l.energy < e_max).count();

    let mut new_levels = Vec::new();
    let mut new_count = 0;
    let mut mismatches = 0;
    let mut max_dev = T::zero();
    let mut paired = 0;
    for lvl in large.levels.iter().take_while(|l| l.energy < e_max) {
        match index.get(lvl.quantum_numbers.twice()) {
            Some(&e) => {
                paired += 1;
                let d = (e - lvl.energy).abs();
                max_dev = max_dev.max(d);
                if d > match_tol {
                    mismatches += 1;
                }
            }
            None => {
                new_count += 1;
                if new_levels.len() < 20 {
                    new_levels.push((lvl.quantum_numbers.clone(), lvl.energy));
                }
            }
        }
    }
    let n_small = below(small);
    // a small-sector level missing from the large sector is a mismatch too
    mismatches += n_small.saturating_sub(paired);

    let new_above = match large.energy_ceiling {
        Some(c) if c < e_top => None,
        _ => Some(
            large
                .levels
                .iter()
                .filter(|l| l.energy >= e_max && l.energy <= e_top)
                .filter(|l| !index.contains_key(l.quantum_numbers.twice()))
                .count(),
        ),
    };

    // a certificate covering no level at all certifies nothing
    let certified = new_count == 0 && mismatches == 0 && n_small > 0;
    if certified {
        small.e_max_certified = Some(e_max);
    }
    Ok(SaturationReport {
        m_small: small.cutoff,
        m_large: large.cutoff,
        e_max,
        e_top,
        n_levels_small: n_small,
        n_levels_large_below_emax: below(large),
        new_levels_found: new_count,
        energy_mismatches: mismatches,
        max_energy_deviation: max_dev,
        new_levels,
        new_levels_above_emax: new_above,
        certified,
    })
}

/// Builds the sector at `M` and a ceiling-limited companion at `large_cutoff`
/// and certifies the former against the latter.
pub fn build_certified_sector<T: Real>(
    params: &ModelParams<T>,
    momentum: i64,
    cutoff: i64,
    large_cutoff: i64,
    opts: &SolverOptions<T>,
    match_tol: T,
) -> Result<(SpectrumSector<T>, SpectrumSector<T>, SaturationReport<T>)> {
    let mut small = build_sector(params, momentum, cutoff, opts)?;
    let ceiling = small.max_energy().unwrap_or(T::zero()).min(small.completeness_floor());
    let large = build_sector_below(params, momentum, large_cutoff, opts, ceiling)?;
    let report = verify_saturation(&mut small, &large, match_tol)?;
    Ok((small, large, report))
}

/// Drops every level closer than `tol` to its predecessor; returns the kept
/// energies and the number removed.
pub fn deduplicate_energies<T: Real>(levels: &[T], tol: T) -> Result<(Vec<T>, usize)> {
    if !(tol > T::zero()) {
        return Err(Error::contract("deduplication tolerance must be positive"));
    }
    if levels.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::contract("levels must be sorted ascending"));
    }
    let mut kept = Vec::with_capacity(levels.len());
    for (i, &e) in levels.iter().enumerate() {
        if i == 0 || e - levels[i - 1] >= tol {
            kept.push(e);
        }
    }
    let removed = levels.len() - kept.len();
    Ok((kept, removed))
}
