//! Model parameters and Bethe quantum numbers.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Particle number, ring length and coupling of a Lieb-Liniger ring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<T> {
    n_particles: usize,
    ring_length: T,
    coupling: T,
}

impl<T: Real> ModelParams<T> {
    pub fn new(n_particles: usize, ring_length: T, coupling: T) -> Result<Self> {
        if n_particles == 0 {
            return Err(Error::contract("N must be at least 1"));
        }
        if !(ring_length > T::zero() && ring_length.is_finite()) {
            return Err(Error::contract(format!("ring length must be positive, got {ring_length}")));
        }
        if !(coupling > T::zero() && coupling.is_finite()) {
            return Err(Error::contract(format!(
                "coupling must be positive and finite, got {coupling}"
            )));
        }
        Ok(Self {
            n_particles,
            ring_length,
            coupling,
        })
    }

    /// Ring of circumference 2π.
    pub fn on_unit_ring(n_particles: usize, coupling: T) -> Result<Self> {
        Self::new(n_particles, T::TAU(), coupling)
    }

    /// Parameters from the dimensionless density `n/c`, with `n = N/L`.
    pub fn from_density_ratio(n_particles: usize, ring_length: T, ratio: T) -> Result<Self> {
        if !(ratio > T::zero() && ratio.is_finite()) {
            return Err(Error::contract(format!("n/c must be positive, got {ratio}")));
        }
        let c = T::of_usize(n_particles) / (ring_length * ratio);
        Self::new(n_particles, ring_length, c)
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    pub fn ring_length(&self) -> T {
        self.ring_length
    }

    pub fn coupling(&self) -> T {
        self.coupling
    }

    /// `n/c = N / (L c)`.
    pub fn density_ratio(&self) -> T {
        T::of_usize(self.n_particles) / (self.ring_length * self.coupling)
    }

    /// Same ring, different coupling.
    pub fn with_coupling(&self, coupling: T) -> Result<Self> {
        Self::new(self.n_particles, self.ring_length, coupling)
    }

    /// True when `L` is 2π to the last bit, the convention under which momenta are integers.
    pub fn is_unit_ring(&self) -> bool {
        self.ring_length == T::TAU()
    }
}

/// A strictly increasing set of N distinct Bethe quantum numbers.
///
/// Values are stored doubled so that half-odd-integers (even N) stay exact:
/// `twice[i] = 2 m_i`. All values satisfy `|m_i| < cutoff`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuantumNumbers {
    twice: Vec<i64>,
    cutoff: i64,
}

impl QuantumNumbers {
    /// Builds a set from doubled values; input order is irrelevant.
    pub fn from_twice(mut twice: Vec<i64>, cutoff: i64) -> Result<Self> {
        let n = twice.len();
        if n == 0 {
            return Err(Error::contract("quantum-number set is empty"));
        }
        if cutoff < 1 {
            return Err(Error::contract(format!("cutoff must be >= 1, got {cutoff}")));
        }
        let want_odd = n.is_multiple_of(2);
        for &t in &twice {
            if (t.rem_euclid(2) == 1) != want_odd {
                return Err(Error::contract(format!(
                    "N = {n} requires {} quantum numbers, got {}",
                    if want_odd { "half-odd-integer" } else { "integer" },
                    HalfInt(t)
                )));
            }
            if t.abs() >= 2 * cutoff {
                return Err(Error::contract(format!(
                    "quantum number {} violates |m| < {cutoff}",
                    HalfInt(t)
                )));
            }
        }
        twice.sort_unstable();
        if twice.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::contract("quantum numbers must be distinct"));
        }
        Ok(Self { twice, cutoff })
    }

    /// Integer quantum numbers (odd N).
    pub fn from_integers(values: &[i64], cutoff: i64) -> Result<Self> {
        Self::from_twice(values.iter().map(|&m| 2 * m).collect(), cutoff)
    }

    /// Smallest cutoff admitting the given integers.
    pub fn with_minimal_cutoff(values: &[i64]) -> Result<Self> {
        let cutoff = values.iter().map(|m| m.abs() + 1).max().unwrap_or(1);
        Self::from_integers(values, cutoff)
    }

    pub(crate) fn from_sorted_twice_unchecked(twice: Vec<i64>, cutoff: i64) -> Self {
        debug_assert!(twice.windows(2).all(|w| w[0] < w[1]));
        Self { twice, cutoff }
    }

    pub fn len(&self) -> usize {
        self.twice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.twice.is_empty()
    }

    pub fn cutoff(&self) -> i64 {
        self.cutoff
    }

    pub fn twice(&self) -> &[i64] {
        &self.twice
    }

    /// Integer values; `None` for half-odd-integer sets.
    pub fn integers(&self) -> Option<Vec<i64>> {
        if self.twice.iter().all(|t| t % 2 == 0) {
            Some(self.twice.iter().map(|t| t / 2).collect())
        } else {
            None
        }
    }

    pub fn values<T: Real>(&self) -> Vec<T> {
        self.twice
            .iter()
            .map(|&t| T::of_int(t) / T::lit(2.0))
            .collect()
    }

    /// Exact `Σ m_i`. Always an integer: either all m are integers, or there is
    /// an even number of half-odd-integers.
    pub fn total_momentum(&self) -> i64 {
        self.twice.iter().sum::<i64>() / 2
    }

    /// Largest |m_i|, doubled.
    pub fn max_abs_twice(&self) -> i64 {
        self.twice.iter().map(|t| t.abs()).max().unwrap_or(0)
    }

    /// `m_i + k` for all i, cutoff widened by |k| so the result stays valid.
    pub fn shifted(&self, k: i64) -> Self {
        Self {
            twice: self.twice.iter().map(|t| t + 2 * k).collect(),
            cutoff: self.cutoff + k.abs(),
        }
    }

    /// The reflected set `{-m_i}`.
    pub fn negated(&self) -> Self {
        Self {
            twice: self.twice.iter().rev().map(|t| -t).collect(),
            cutoff: self.cutoff,
        }
    }

    pub fn with_cutoff(&self, cutoff: i64) -> Result<Self> {
        Self::from_twice(self.twice.clone(), cutoff)
    }
}

impl fmt::Display for QuantumNumbers {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, &t) in self.twice.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", HalfInt(t))?;
        }
        write!(f, "}}")
    }
}

/// Displays a doubled value as `3` or `-5/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HalfInt(pub i64);

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl std::str::FromStr for HalfInt {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if let Some(num) = s.strip_suffix("/2") {
            let t: i64 = num.parse().map_err(|_| format!("bad half-integer '{s}'"))?;
            if t % 2 == 0 {
                return Err(format!("'{s}' is not a half-odd-integer"));
            }
            Ok(HalfInt(t))
        } else {
            let m: i64 = s.parse().map_err(|_| format!("bad integer '{s}'"))?;
            Ok(HalfInt(2 * m))
        }
    }
}
