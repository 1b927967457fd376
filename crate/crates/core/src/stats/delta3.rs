//! Δ3 rigidity: the mean-square deviation of the unfolded staircase from its
//! best straight line over a window `[ξ_s, ξ_s + W]`.
//!
//! The staircase is piecewise constant, so every window integral reduces to a
//! sum over the levels inside the window and no quadrature is involved.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::fit_line;
use crate::scalar::Real;

use super::unfold::UnfoldedSequence;

/// Window integrals, each scaled by `2/W`:
/// `x1 = ∫ξ`, `x2 = ∫ξ²`, `p = ∫η̂`, `q = ∫ξη̂`, `t = ∫η̂²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowMoments<T> {
    pub x1: T,
    pub x2: T,
    pub p: T,
    pub q: T,
    pub t: T,
}

impl<T: Real> WindowMoments<T> {
    /// `steps` are the sorted levels strictly inside `(start, start + length)`;
    /// `η̂` counts how many of them lie at or below `ξ`.
    pub fn compute(steps: &[T], start: T, length: T) -> Self {
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let end = start + length;
        let scale = two / length;
        let x1 = two * start + length;
        let x2 = two / three * (length * length + three * start * start + three * start * length);
        let (mut p, mut q, mut t) = (T::zero(), T::zero(), T::zero());
        for (j, &y) in steps.iter().enumerate() {
            let rest = end - y;
            p = p + rest;
            q = q + (end + y) * rest / two;
            // η̂² jumps by 2j - 1 at the j-th step (1-based)
            t = t + T::of_usize(2 * j + 1) * rest;
        }
        Self {
            x1,
            x2,
            p: p * scale,
            q: q * scale,
            t: t * scale,
        }
    }
}

/// Minimises over the line `Aξ + B` and returns `(Δ3, A, B)`.
pub fn rigidity_from_moments<T: Real>(m: &WindowMoments<T>) -> (T, T, T) {
    let two = T::lit(2.0);
    let det = m.x1 * m.x1 - two * m.x2;
    let a = (m.p * m.x1 - two * m.q) / det;
    let b = (m.q * m.x1 - m.p * m.x2) / det;
    let d3 = m.t / two + a * a * m.x2 / two + b * b - a * m.q - b * m.p + a * b * m.x1;
    (d3, a, b)
}

fn window_value<T: Real>(values: &[T], start: T, length: T) -> T {
    let lo = values.partition_point(|&x| x <= start);
    let hi = values.partition_point(|&x| x < start + length);
    let local: Vec<T> = values[lo..hi.max(lo)].iter().map(|&x| x - start).collect();
    // evaluated with the window start as origin; Δ3 is translation invariant
    // and the moments lose far less to cancellation there
    let m = WindowMoments::compute(&local, T::zero(), length);
    rigidity_from_moments(&m).0.max(T::zero())
}

/// Δ3 for one window of the unfolded spectrum.
pub fn delta3_closed_form<T: Real>(unfolded: &UnfoldedSequence<T>, window_start: T, window_length: T) -> Result<T> {
    if !(window_length > T::zero()) {
        return Err(Error::contract("window length must be positive"));
    }
    let v = unfolded.values();
    let (Some(&first), Some(&last)) = (v.first(), v.last()) else {
        return Err(Error::contract("empty unfolded sequence"));
    };
    if window_start < first || window_start + window_length > last {
        return Err(Error::contract(format!(
            "window [{window_start}, {}] outside data range [{first}, {last}]",
            window_start + window_length
        )));
    }
    Ok(window_value(v, window_start, window_length))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit<T> {
    pub gamma0: T,
    pub gamma1: T,
    pub w_min: T,
    pub w_max: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentFit<T> {
    pub alpha: T,
    pub w_min: T,
    pub w_max: T,
}

/// Δ3 sampled on a grid of window lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct Delta3Curve<T> {
    pub window_lengths: Vec<T>,
    pub values: Vec<T>,
    /// Window starts averaged per length, placed at consecutive levels.
    pub n_starts: usize,
    pub fit: Option<SlopeFit<T>>,
    pub exponent: Option<ExponentFit<T>>,
}

impl<T: Real> Delta3Curve<T> {
    pub fn new(window_lengths: Vec<T>, values: Vec<T>, n_starts: usize) -> Result<Self> {
        if window_lengths.len() != values.len() {
            return Err(Error::contract("grid and values differ in length"));
        }
        if window_lengths.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::contract("window lengths must be strictly increasing"));
        }
        Ok(Self {
            window_lengths,
            values,
            n_starts,
            fit: None,
            exponent: None,
        })
    }

    fn points_in(&self, w_min: T, w_max: T) -> (Vec<T>, Vec<T>) {
        self.window_lengths
            .iter()
            .zip(&self.values)
            .filter(|(&w, _)| w >= w_min && w <= w_max)
            .map(|(&w, &d)| (w, d))
            .unzip()
    }
}

/// Averages Δ3 over `n_starts` windows beginning at the first `n_starts`
/// unfolded levels, for every length in `w_grid`.
pub fn delta3_curve<T: Real>(unfolded: &UnfoldedSequence<T>, w_grid: &[T], n_starts: usize) -> Result<Delta3Curve<T>> {
    let v = unfolded.values();
    if w_grid.is_empty() {
        return Err(Error::contract("empty window grid"));
    }
    if w_grid.windows(2).any(|w| !(w[1] > w[0])) || !(w_grid[0] > T::zero()) {
        return Err(Error::contract("window grid must be positive and strictly increasing"));
    }
    if n_starts == 0 || n_starts > v.len() {
        return Err(Error::contract(format!(
            "n_starts = {n_starts} with {} unfolded levels",
            v.len()
        )));
    }
    let last_start = v[n_starts - 1];
    let feasible = *v.last().unwrap() - last_start;
    let w_max = *w_grid.last().unwrap();
    if w_max > feasible {
        return Err(Error::contract(format!(
            "insufficient data: with {n_starts} starts the largest feasible window is W = {feasible}, requested {w_max}"
        )));
    }
    let starts = &v[..n_starts];
    let n = T::of_usize(n_starts);
    let values = w_grid
        .par_iter()
        .map(|&w| starts.iter().map(|&s| window_value(v, s, w)).fold(T::zero(), |a, b| a + b) / n)
        .collect();
    Delta3Curve::new(w_grid.to_vec(), values, n_starts)
}

/// Least-squares line `Δ3 = γ0 W + γ1` over grid points in `[w_min, w_max]`.
pub fn fit_slope<T: Real>(curve: &Delta3Curve<T>, w_min: T, w_max: T) -> Result<SlopeFit<T>> {
    let (w, d) = curve.points_in(w_min, w_max);
    if w.len() < 3 {
        return Err(Error::contract(format!(
            "slope fit needs 3 grid points in [{w_min}, {w_max}], found {}",
            w.len()
        )));
    }
    let (gamma0, gamma1) = fit_line(&w, &d).ok_or_else(|| Error::contract("degenerate grid"))?;
    Ok(SlopeFit {
        gamma0,
        gamma1,
        w_min,
        w_max,
    })
}

/// Slope of `log Δ3` against `log W` over `[w_min, w_max]`.
pub fn fit_exponent<T: Real>(curve: &Delta3Curve<T>, w_min: T, w_max: T) -> Result<ExponentFit<T>> {
    let (w, d) = curve.points_in(w_min, w_max);
    if w.len() < 2 {
        return Err(Error::contract(format!("exponent fit needs 2 grid points in [{w_min}, {w_max}]")));
    }
    if d.iter().any(|&x| !(x > T::zero())) {
        return Err(Error::contract("exponent fit needs positive Δ3 values"));
    }
    let lw: Vec<T> = w.iter().map(|x| x.ln()).collect();
    let ld: Vec<T> = d.iter().map(|x| x.ln()).collect();
    let (alpha, _) = fit_line(&lw, &ld).ok_or_else(|| Error::contract("degenerate grid"))?;
    Ok(ExponentFit { alpha, w_min, w_max })
}
