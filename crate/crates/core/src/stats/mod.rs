//! Spectral statistics: unfolding, nearest-neighbour spacings, the spacing
//! ratio and the Δ3 rigidity.

mod delta3;
mod lsd;
mod ratio;
mod synthetic;
mod unfold;

pub use delta3::{
    delta3_closed_form, delta3_curve, fit_exponent, fit_slope, rigidity_from_moments, Delta3Curve, ExponentFit, SlopeFit,
    WindowMoments,
};
pub use lsd::{lsd_histogram, Histogram};
pub use ratio::{ratio_statistic, RatioSeries, DEFAULT_RATIO_WINDOW, POISSON_MEAN_RATIO};
pub use synthetic::synthetic_poisson_levels;
pub use unfold::{unfold, unfold_window, SmoothStaircase, UnfoldedSequence, DEFAULT_UNFOLD_DEGREE};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Nearest-neighbour spacings `s_n = E_n - E_{n-1}`.
pub fn spacings<T: Real>(levels: &[T]) -> Result<Vec<T>> {
    if levels.len() < 2 {
        return Err(Error::contract("spacings need at least two levels"));
    }
    let s: Vec<T> = levels.windows(2).map(|w| w[1] - w[0]).collect();
    if let Some(i) = s.iter().position(|&d| !(d >= T::zero())) {
        return Err(Error::contract(format!("levels not sorted at index {}", i + 1)));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_examples() {
        assert_eq!(spacings(&[0.0, 1.0, 2.0, 3.0]).unwrap(), vec![1.0, 1.0, 1.0]);
        assert_eq!(spacings(&[0.0, 0.5, 2.0]).unwrap(), vec![0.5, 1.5]);
        assert!(spacings(&[1.0]).is_err());
        assert!(spacings(&[0.0, 2.0, 1.0]).is_err());
    }
}
