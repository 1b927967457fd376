use crate::error::{Error, Result};
use crate::linalg::least_squares;
use crate::scalar::Real;

/// Polynomial degree used when none is requested. The density of states is
/// close to linear in energy, so the level count is close to quadratic.
pub const DEFAULT_UNFOLD_DEGREE: usize = 2;

/// Smooth staircase `ξ(E) = Σ_k c_k x^k` with `x = (E - center) / half_width`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothStaircase<T> {
    pub coefficients: Vec<T>,
    pub center: T,
    pub half_width: T,
}

impl<T: Real> SmoothStaircase<T> {
    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    fn scaled(&self, e: T) -> T {
        (e - self.center) / self.half_width
    }

    pub fn eval(&self, e: T) -> T {
        let x = self.scaled(e);
        self.coefficients.iter().rev().fold(T::zero(), |acc, &c| acc * x + c)
    }

    /// `dξ/dE`.
    pub fn derivative(&self, e: T) -> T {
        let x = self.scaled(e);
        let d = self
            .coefficients
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(T::zero(), |acc, (k, &c)| acc * x + T::of_usize(k) * c);
        d / self.half_width
    }
}

/// Levels mapped to unit mean spacing.
#[derive(Debug, Clone, PartialEq)]
pub struct UnfoldedSequence<T> {
    values: Vec<T>,
    smooth_model: Option<SmoothStaircase<T>>,
    source_window: (usize, usize),
}

impl<T: Real> UnfoldedSequence<T> {
    /// Wraps a sequence that is already unfolded (e.g. a synthetic or
    /// picket-fence spectrum). Values must be non-decreasing.
    pub fn from_unfolded(values: Vec<T>) -> Result<Self> {
        if values.windows(2).any(|w| !(w[1] >= w[0])) {
            return Err(Error::contract("unfolded values must be sorted"));
        }
        let n = values.len();
        Ok(Self {
            values,
            smooth_model: None,
            source_window: (0, n),
        })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn smooth_model(&self) -> Option<&SmoothStaircase<T>> {
        self.smooth_model.as_ref()
    }

    /// Half-open index range `[start, end)` into the source levels.
    pub fn source_window(&self) -> (usize, usize) {
        self.source_window
    }

    pub fn mean_spacing(&self) -> T {
        let n = self.values.len();
        if n < 2 {
            return T::zero();
        }
        (self.values[n - 1] - self.values[0]) / T::of_usize(n - 1)
    }

    pub fn spacings(&self) -> Vec<T> {
        self.values.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// Unfolds all of `levels`.
pub fn unfold<T: Real>(levels: &[T], degree: usize) -> Result<UnfoldedSequence<T>> {
    unfold_window(levels, 0, levels.len(), degree)
}

/// Fits a degree-`degree` polynomial to the staircase of `levels[start..end]`,
/// taking `η(E_n) = n - 1/2` at the n-th level of the window, and maps each
/// level through it. Rejects fits that are not increasing over the window.
pub fn unfold_window<T: Real>(levels: &[T], start: usize, end: usize, degree: usize) -> Result<UnfoldedSequence<T>> {
    if start >= end || end > levels.len() {
        return Err(Error::contract(format!(
            "window [{start}, {end}) outside {} levels",
            levels.len()
        )));
    }
    let window = &levels[start..end];
    let n = window.len();
    if n < 10 * (degree + 1) {
        return Err(Error::contract(format!(
            "degree {degree} unfolding needs at least {} levels, got {n}",
            10 * (degree + 1)
        )));
    }
    if window.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::contract("levels must be sorted ascending"));
    }
    let (lo, hi) = (window[0], window[n - 1]);
    let half = (hi - lo) / T::lit(2.0);
    if !(half > T::zero()) {
        return Err(Error::Unfolding("all levels coincide".into()));
    }
    let center = (lo + hi) / T::lit(2.0);
    let cols = degree + 1;
    let mut design = Vec::with_capacity(n * cols);
    for &e in window {
        let x = (e - center) / half;
        let mut p = T::one();
        for _ in 0..cols {
            design.push(p);
            p = p * x;
        }
    }
    let staircase: Vec<T> = (0..n).map(|i| T::of_usize(i) + T::lit(0.5)).collect();
    let coefficients = least_squares(&design, cols, &staircase)
        .ok_or_else(|| Error::Unfolding("rank-deficient staircase fit".into()))?;
    let model = SmoothStaircase {
        coefficients,
        center,
        half_width: half,
    };

    // monotone at every level and on a uniform grid across the window
    let grid = 256;
    let probes = window.iter().copied().chain((0..=grid).map(|k| lo + (hi - lo) * T::of_usize(k) / T::of_usize(grid)));
    for e in probes {
        let d = model.derivative(e);
        if !(d > T::zero()) {
            return Err(Error::Unfolding(format!(
                "smooth staircase not increasing at E = {e} (dξ/dE = {d}); coefficients {:?}",
                model.coefficients
            )));
        }
    }
    let values: Vec<T> = window.iter().map(|&e| model.eval(e)).collect();
    Ok(UnfoldedSequence {
        values,
        smooth_model: Some(model),
        source_window: (start, end),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equidistant_linear_fit_is_exact() {
        let e: Vec<f64> = (1..=100).map(f64::from).collect();
        let u = unfold(&e, 1).unwrap();
        for s in u.spacings() {
            assert!((s - 1.0).abs() < 1e-9);
        }
        // ξ_n = E_n - 1/2
        assert!((u.values()[0] - 0.5).abs() < 1e-9);
        assert_eq!(u.source_window(), (0, 100));
    }

    #[test]
    fn quadratic_staircase() {
        // η(E) = E² exactly: levels E_n = sqrt(n)
        let e: Vec<f64> = (1..=1000).map(|n| (n as f64).sqrt()).collect();
        let u = unfold(&e, 2).unwrap();
        let interior = &u.values()[10..990];
        let bad = interior
            .iter()
            .enumerate()
            .filter(|(i, &x)| (x - (i + 11) as f64).abs() > 0.5 + 1e-9)
            .count();
        assert!(bad * 100 <= interior.len(), "{bad} interior points off");
    }

    #[test]
    fn too_few_levels() {
        let e: Vec<f64> = (0..20).map(f64::from).collect();
        assert!(matches!(unfold(&e, 2), Err(Error::Contract(_))));
    }

    #[test]
    fn non_monotone_fit_is_rejected() {
        // a dense cluster followed by a sparse tail: the parabola turns over
        let mut e: Vec<f64> = (0..200).map(|i| i as f64 / 199.0).collect();
        e.extend((0..20).map(|i| 100.0 + 100.0 * i as f64 / 19.0));
        assert!(matches!(unfold(&e, 2), Err(Error::Unfolding(_))));
    }

    #[test]
    fn window_bookkeeping() {
        let e: Vec<f64> = (0..200).map(|i| i as f64 * 0.5).collect();
        let u = unfold_window(&e, 50, 150, 1).unwrap();
        assert_eq!(u.len(), 100);
        assert_eq!(u.source_window(), (50, 150));
        assert!((u.mean_spacing() - 1.0).abs() < 1e-12);
    }
}
