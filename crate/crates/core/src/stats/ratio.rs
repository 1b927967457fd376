use crate::error::{Error, Result};
use crate::scalar::Real;

/// Blocks averaged per windowed mean when none is requested.
pub const DEFAULT_RATIO_WINDOW: usize = 500;

/// `<χ>` for a Poisson spectrum, `2 ln 2 - 1`.
pub const POISSON_MEAN_RATIO: f64 = 0.386_294_361_119_890_6;

/// `χ_n = min(ξ_n, 1/ξ_n)` with `ξ_n = s_n / s_{n-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioSeries<T> {
    pub chi: Vec<T>,
    /// Indices into `chi` where a spacing was exactly zero; `χ` is 0 there.
    pub zero_spacings: Vec<usize>,
    /// Means over consecutive non-overlapping blocks of `window_size` values;
    /// a trailing partial block is dropped.
    pub windowed_means: Vec<T>,
    pub window_size: usize,
}

impl<T: Real> RatioSeries<T> {
    pub fn mean(&self) -> T {
        if self.chi.is_empty() {
            return T::zero();
        }
        self.chi.iter().copied().sum::<T>() / T::of_usize(self.chi.len())
    }
}

/// Spacing-ratio statistic on raw (not unfolded) levels.
pub fn ratio_statistic<T: Real>(levels: &[T], window_size: usize) -> Result<RatioSeries<T>> {
    if levels.len() < 3 {
        return Err(Error::contract("ratio statistic needs at least three levels"));
    }
    if window_size == 0 {
        return Err(Error::contract("window size must be positive"));
    }
    let s: Vec<T> = levels.windows(2).map(|w| w[1] - w[0]).collect();
    if s.iter().any(|&d| !(d >= T::zero())) {
        return Err(Error::contract("levels must be sorted ascending"));
    }
    let mut chi = Vec::with_capacity(s.len() - 1);
    let mut zero_spacings = Vec::new();
    for (i, w) in s.windows(2).enumerate() {
        let (prev, cur) = (w[0], w[1]);
        if prev == T::zero() || cur == T::zero() {
            zero_spacings.push(i);
            chi.push(T::zero());
        } else {
            let xi = cur / prev;
            chi.push(xi.min(xi.recip()));
        }
    }
    let windowed_means = chi
        .chunks_exact(window_size)
        .map(|b| b.iter().copied().sum::<T>() / T::of_usize(window_size))
        .collect();
    Ok(RatioSeries {
        chi,
        zero_spacings,
        windowed_means,
        window_size,
    })
}
