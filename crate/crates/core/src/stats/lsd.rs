use crate::error::{Error, Result};
use crate::scalar::Real;

use super::unfold::UnfoldedSequence;

/// Normalised histogram of unfolded nearest-neighbour spacings on `[0, s_max)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram<T> {
    pub s_max: T,
    pub bin_width: T,
    pub counts: Vec<usize>,
    /// `count / (total · bin_width)`.
    pub densities: Vec<T>,
    /// Spacings `>= s_max`.
    pub overflow_count: usize,
    pub total: usize,
}

impl<T: Real> Histogram<T> {
    pub fn n_bins(&self) -> usize {
        self.counts.len()
    }

    pub fn bin_edges(&self, k: usize) -> (T, T) {
        let w = self.bin_width;
        (w * T::of_usize(k), w * T::of_usize(k + 1))
    }

    pub fn bin_centers(&self) -> Vec<T> {
        (0..self.n_bins())
            .map(|k| {
                let (a, b) = self.bin_edges(k);
                (a + b) / T::lit(2.0)
            })
            .collect()
    }

    /// Mass beyond `s_max`, excluded from the bins.
    pub fn overflow_mass(&self) -> T {
        if self.total == 0 {
            return T::zero();
        }
        T::of_usize(self.overflow_count) / T::of_usize(self.total)
    }

    /// `Σ density · width`, at most one.
    pub fn mass(&self) -> T {
        self.densities.iter().map(|&d| d * self.bin_width).sum()
    }

    /// Bin averages of the Poisson density `e^{-s}`.
    pub fn poisson_reference(&self) -> Vec<T> {
        (0..self.n_bins())
            .map(|k| {
                let (a, b) = self.bin_edges(k);
                ((-a).exp() - (-b).exp()) / self.bin_width
            })
            .collect()
    }

    /// Pearson statistic against `e^{-s}` over the bins, with the overflow as
    /// one extra cell. Returns `(statistic, degrees of freedom)`.
    pub fn chi_square_against_poisson(&self) -> (T, usize) {
        let total = T::of_usize(self.total);
        let mut stat = T::zero();
        for (k, &c) in self.counts.iter().enumerate() {
            let (a, b) = self.bin_edges(k);
            let expected = total * ((-a).exp() - (-b).exp());
            let d = T::of_usize(c) - expected;
            stat = stat + d * d / expected;
        }
        let expected = total * (-self.s_max).exp();
        let d = T::of_usize(self.overflow_count) - expected;
        stat = stat + d * d / expected;
        (stat, self.n_bins())
    }
}

pub fn lsd_histogram<T: Real>(unfolded: &UnfoldedSequence<T>, n_bins: usize, s_max: T) -> Result<Histogram<T>> {
    if n_bins < 5 {
        return Err(Error::contract(format!("need at least 5 bins, got {n_bins}")));
    }
    if !(s_max > T::zero()) {
        return Err(Error::contract("s_max must be positive"));
    }
    let spacings = unfolded.spacings();
    let width = s_max / T::of_usize(n_bins);
    let mut counts = vec![0usize; n_bins];
    let mut overflow = 0;
    for s in &spacings {
        if *s >= s_max {
            overflow += 1;
            continue;
        }
        let k = (*s / width).floor().to_usize().unwrap_or(0).min(n_bins - 1);
        counts[k] += 1;
    }
    let total = spacings.len();
    let norm = if total == 0 { T::zero() } else { T::one() / (T::of_usize(total) * width) };
    let densities = counts.iter().map(|&c| T::of_usize(c) * norm).collect();
    Ok(Histogram {
        s_max,
        bin_width: width,
        counts,
        densities,
        overflow_count: overflow,
        total,
    })
}
