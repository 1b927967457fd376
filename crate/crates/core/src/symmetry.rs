//! Momentum-shift equivalences between sectors.
//!
//! On the unit ring, `m_i -> m_i + k` maps a Bethe solution `λ` to `λ + k`
//! for any coupling. Sector `P` is then carried onto sector `P + kN` with every
//! energy raised by `ν = 2kP + k²N`. Combined with the reflection `m -> -m`
//! this leaves `P = 0, 1, ..., (N-1)/2` as the only independent spectra for
//! odd N.

use crate::error::{Error, Result};
use crate::quantum::QuantumNumbers;
use crate::scalar::Real;
use crate::sector::SpectrumSector;

/// Default tolerance for comparing shifted spectra.
pub const DEFAULT_EQUIVALENCE_TOL: f64 = 1e-9;

/// A shift of all quantum numbers by `k`, seen from sector `source_momentum`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShiftMap {
    pub k: i64,
    pub nu: i64,
    pub source_momentum: i64,
    pub target_momentum: i64,
}

impl ShiftMap {
    pub fn new(source_momentum: i64, k: i64, n_particles: usize) -> Self {
        Self {
            k,
            nu: nu_shift(source_momentum, k, n_particles),
            source_momentum,
            target_momentum: source_momentum + k * n_particles as i64,
        }
    }

    /// The shift (if any) that carries sector `from` onto sector `to`.
    pub fn between(from: i64, to: i64, n_particles: usize) -> Option<Self> {
        let n = n_particles as i64;
        ((to - from) % n == 0).then(|| Self::new(from, (to - from) / n, n_particles))
    }
}

/// `m'_i = m_i + k`.
pub fn shift_quantum_numbers(m: &QuantumNumbers, k: i64) -> QuantumNumbers {
    m.shifted(k)
}

/// `ν = 2kP + k²N`.
pub fn nu_shift(momentum: i64, k: i64, n_particles: usize) -> i64 {
    2 * k * momentum + k * k * n_particles as i64
}

/// `{0, 1, ..., (N-1)/2}` for odd N.
pub fn independent_momenta(n_particles: usize) -> Result<Vec<i64>> {
    if n_particles.is_multiple_of(2) {
        return Err(Error::Unsupported(format!(
            "independent momenta are established for odd N only, got N = {n_particles}"
        )));
    }
    Ok((0..=((n_particles as i64 - 1) / 2)).collect())
}

/// Maps any momentum onto its representative in [`independent_momenta`]
/// together with the energy offset: `E(P) = E(representative) + offset`.
pub fn canonical_momentum(momentum: i64, n_particles: usize) -> Result<(i64, i64)> {
    independent_momenta(n_particles)?;
    let n = n_particles as i64;
    let r = momentum.rem_euclid(n);
    // r or r - n (its reflection partner is n - r) is the smallest in magnitude
    let (base, rep) = if r <= (n - 1) / 2 { (r, r) } else { (r - n, n - r) };
    let k = (momentum - base) / n;
    // E(P) = E(base) + ν(base, k), and E(base) = E(-base) = E(rep)
    Ok((rep, nu_shift(base, k, n_particles)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport<T> {
    pub nu: i64,
    pub n_compared: usize,
    pub max_deviation: T,
    /// First index (0-based) where `|E_b - E_a - ν| > tol`.
    pub first_failure: Option<usize>,
    pub tolerance: T,
}

impl<T: Real> EquivalenceReport<T> {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Compares the lowest `n_levels` certified energies of two sectors after
/// offsetting `a` by `nu`.
pub fn verify_sector_equivalence<T: Real>(
    a: &SpectrumSector<T>,
    b: &SpectrumSector<T>,
    nu: i64,
    n_levels: usize,
    tol: T,
) -> Result<EquivalenceReport<T>> {
    let (pa, pb) = (a.params(), b.params());
    if pa.n_particles() != pb.n_particles() || pa.coupling() != pb.coupling() || pa.ring_length() != pb.ring_length() {
        return Err(Error::contract("sectors differ in N, c or L"));
    }
    for (name, s) in [("first", a), ("second", b)] {
        let have = s.certified_levels().len();
        if have < n_levels {
            return Err(Error::contract(format!(
                "{name} sector (P = {:?}) has {have} certified levels, {n_levels} requested",
                s.momentum()
            )));
        }
    }
    let nu_t = T::of_int(nu);
    let mut max_dev = T::zero();
    let mut first_failure = None;
    for (j, (la, lb)) in a.levels().iter().zip(b.levels()).take(n_levels).enumerate() {
        let d = (lb.energy - la.energy - nu_t).abs();
        if d > max_dev {
            max_dev = d;
        }
        if d > tol && first_failure.is_none() {
            first_failure = Some(j);
        }
    }
    Ok(EquivalenceReport {
        nu,
        n_compared: n_levels,
        max_deviation: max_dev,
        first_failure,
        tolerance: tol,
    })
}
