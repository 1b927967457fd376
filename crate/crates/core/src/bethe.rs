//! Bethe equations of the Lieb-Liniger ring and their Newton solver.
//!
//! For quantum numbers `m` the rapidities solve
//!
//! ```text
//! F_i(λ) = λ_i - (2π/L) m_i + (2/L) Σ_{k≠i} atan((λ_i - λ_k)/c) = 0.
//! ```
//!
//! `F` is the gradient of a strictly convex function (the Yang-Yang action),
//! so its Jacobian is symmetric positive definite and a damped Newton
//! iteration converges from any start; the guess policies only decide how
//! many iterations that takes.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::quantum::{ModelParams, QuantumNumbers};
use crate::scalar::Real;

/// Which closed-form solution seeds the Newton iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GuessPolicy {
    /// Strong-coupling start for `n/c <= 1`, weak-coupling start otherwise,
    /// each falling back to the other and then to continuation.
    #[default]
    Auto,
    StrongCoupling,
    WeakCoupling,
    /// Solve at a larger coupling and walk `c` down geometrically.
    Continuation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions<T> {
    /// Target max-norm of the Bethe residual.
    pub tolerance: T,
    pub max_iterations: usize,
    /// Initial Newton step fraction in (0, 1].
    pub damping: T,
    pub guess_policy: GuessPolicy,
}

impl<T: Real> Default for SolverOptions<T> {
    fn default() -> Self {
        Self {
            tolerance: T::lit(1e-15),
            max_iterations: 200,
            damping: T::one(),
            guess_policy: GuessPolicy::Auto,
        }
    }
}

impl<T: Real> SolverOptions<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > T::zero()) {
            return Err(Error::contract("solver tolerance must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(Error::contract("max_iterations must be >= 1"));
        }
        if !(self.damping > T::zero() && self.damping <= T::one()) {
            return Err(Error::contract("damping must lie in (0, 1]"));
        }
        Ok(())
    }

    /// Tolerance actually enforced for a given solution.
    ///
    /// A residual below `4 eps (max|λ| + N)` cannot be certified in the scalar
    /// type: `λ_i` itself is only representable to half an ulp and the
    /// arctangent sum carries `N - 1` roundings. The requested tolerance is
    /// raised to that floor, never lowered.
    pub fn effective_tolerance(&self, rapidities: &[T]) -> T {
        self.tolerance.max(rounding_floor(rapidities))
    }
}

pub(crate) fn rounding_floor<T: Real>(rapidities: &[T]) -> T {
    let scale = rapidities
        .iter()
        .fold(T::zero(), |acc, x| acc.max(x.abs()));
    T::lit(4.0) * T::epsilon() * (scale + T::of_usize(rapidities.len()))
}

/// A solved Bethe state.
#[derive(Debug, Clone, PartialEq)]
pub struct BetheState<T> {
    pub quantum_numbers: QuantumNumbers,
    /// Strictly increasing.
    pub rapidities: Vec<T>,
    /// `Σ λ_i²`
    pub energy: T,
    /// `Σ λ_i`
    pub momentum: T,
    /// Max-norm of the Bethe residual at the returned rapidities.
    pub residual_norm: T,
}

impl<T: Real> BetheState<T> {
    pub(crate) fn from_rapidities(quantum_numbers: QuantumNumbers, rapidities: Vec<T>, residual_norm: T) -> Self {
        let energy = rapidities.iter().map(|&l| l * l).sum();
        let momentum = rapidities.iter().copied().sum();
        Self {
            quantum_numbers,
            rapidities,
            energy,
            momentum,
            residual_norm,
        }
    }

    /// `Q_k = Σ λ_i^k` for each requested order.
    pub fn charges(&self, orders: &[u32]) -> Vec<T> {
        orders.iter().map(|&k| conserved_charge(self, k)).collect()
    }
}

fn check_dims<T: Real>(rapidities: &[T], m: &QuantumNumbers, params: &ModelParams<T>) -> Result<()> {
    let n = params.n_particles();
    if rapidities.len() != n || m.len() != n {
        return Err(Error::contract(format!(
            "dimension mismatch: N = {n}, {} rapidities, {} quantum numbers",
            rapidities.len(),
            m.len()
        )));
    }
    Ok(())
}

/// Bethe residual `F(λ)`; zero exactly at a Bethe state.
pub fn bethe_residual<T: Real>(rapidities: &[T], m: &QuantumNumbers, params: &ModelParams<T>) -> Result<Vec<T>> {
    check_dims(rapidities, m, params)?;
    Ok(residual_unchecked(rapidities, &m.values::<T>(), params))
}

fn residual_unchecked<T: Real>(lam: &[T], m: &[T], params: &ModelParams<T>) -> Vec<T> {
    let l = params.ring_length();
    let c = params.coupling();
    let k = T::TAU() / l;
    let g = T::lit(2.0) / l;
    lam.iter()
        .enumerate()
        .map(|(i, &li)| {
            let mut s = T::zero();
            for (j, &lj) in lam.iter().enumerate() {
                if j != i {
                    s = s + ((li - lj) / c).atan();
                }
            }
            li - k * m[i] + g * s
        })
        .collect()
}

/// Analytic Jacobian of [`bethe_residual`].
pub fn bethe_jacobian<T: Real>(rapidities: &[T], params: &ModelParams<T>) -> Result<Matrix<T>> {
    if rapidities.len() != params.n_particles() {
        return Err(Error::contract(format!(
            "dimension mismatch: N = {}, {} rapidities",
            params.n_particles(),
            rapidities.len()
        )));
    }
    Ok(jacobian_unchecked(rapidities, params))
}

fn jacobian_unchecked<T: Real>(lam: &[T], params: &ModelParams<T>) -> Matrix<T> {
    let n = lam.len();
    let c = params.coupling();
    let g = T::lit(2.0) / params.ring_length();
    let mut jac = Matrix::zeros(n);
    for i in 0..n {
        let mut diag = T::one();
        for j in 0..n {
            if j == i {
                continue;
            }
            // c/(c² + d²) written to avoid overflowing c²
            let d = (lam[i] - lam[j]) / c;
            let w = g / (c * (T::one() + d * d));
            diag = diag + w;
            jac.set(i, j, -w);
        }
        jac.set(i, i, diag);
    }
    jac
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingLimit {
    /// `c → ∞`: free fermions, `λ_j = (2π/L) m_j`.
    Infinite,
    /// `c → 0`: free bosons, `λ_j = (2π/L)(m_j - j + (N+1)/2)`.
    Zero,
}

/// Closed-form rapidities in the two coupling limits. Only `L` and `N` of
/// `params` are used.
pub fn limit_rapidities<T: Real>(m: &QuantumNumbers, params: &ModelParams<T>, limit: CouplingLimit) -> Vec<T> {
    let k = T::TAU() / params.ring_length();
    let n = m.len() as i64;
    let half = T::lit(0.5);
    m.twice()
        .iter()
        .enumerate()
        .map(|(idx, &t)| {
            let twice = match limit {
                CouplingLimit::Infinite => t,
                // 2(m_j - j + (N+1)/2) with j = idx + 1
                CouplingLimit::Zero => t - 2 * (idx as i64 + 1) + n + 1,
            };
            k * (T::of_int(twice) * half)
        })
        .collect()
}

/// Exact state at `c = 0` or `c = ∞`; the residual is zero by construction.
pub fn limit_state<T: Real>(m: &QuantumNumbers, params: &ModelParams<T>, limit: CouplingLimit) -> BetheState<T> {
    BetheState::from_rapidities(m.clone(), limit_rapidities(m, params, limit), T::zero())
}

/// `Q_k = Σ λ_i^k`; `Q_1` is the momentum and `Q_2` the energy.
pub fn conserved_charge<T: Real>(state: &BetheState<T>, k: u32) -> T {
    match k {
        1 => state.rapidities.iter().copied().sum(),
        _ => state.rapidities.iter().map(|&l| l.powi(k as i32)).sum(),
    }
}

fn max_norm<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |acc, x| acc.max(x.abs()))
}

fn l2_norm<T: Real>(v: &[T]) -> T {
    v.iter().map(|&x| x * x).sum::<T>().sqrt()
}

/// Damped Newton from `guess`. On failure returns the best max-norm residual seen.
fn newton<T: Real>(m: &[T], params: &ModelParams<T>, guess: Vec<T>, opts: &SolverOptions<T>) -> std::result::Result<(Vec<T>, T), T> {
    let mut lam = guess;
    let mut f = residual_unchecked(&lam, m, params);
    let mut r = max_norm(&f);
    let mut r2 = l2_norm(&f);
    let mut best = r;
    let mut damp = opts.damping;
    let mut streak = 0usize;
    let min_damp = T::lit(1e-10);

    for _ in 0..opts.max_iterations {
        if !r.is_finite() {
            return Err(T::infinity());
        }
        if r <= opts.effective_tolerance(&lam) {
            return Ok((lam, r));
        }
        let jac = jacobian_unchecked(&lam, params);
        let rhs: Vec<T> = f.iter().map(|&x| -x).collect();
        let Some(step) = jac.solve(&rhs) else {
            return Err(best);
        };
        loop {
            let trial: Vec<T> = lam.iter().zip(&step).map(|(&x, &d)| x + damp * d).collect();
            let ft = residual_unchecked(&trial, m, params);
            let rt = max_norm(&ft);
            let rt2 = l2_norm(&ft);
            if rt2 <= r2 || rt <= opts.effective_tolerance(&trial) {
                lam = trial;
                f = ft;
                r = rt;
                r2 = rt2;
                best = best.min(r);
                streak += 1;
                if streak >= 2 {
                    damp = opts.damping;
                }
                break;
            }
            damp = damp * T::lit(0.5);
            streak = 0;
            if damp < min_damp {
                // rounding-level stagnation
                return if r <= opts.effective_tolerance(&lam) { Ok((lam, r)) } else { Err(best) };
            }
        }
    }
    if r <= opts.effective_tolerance(&lam) {
        Ok((lam, r))
    } else {
        Err(best)
    }
}

fn strictly_increasing<T: Real>(v: &[T]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

fn attempt<T: Real>(
    m: &[T],
    params: &ModelParams<T>,
    guess: Vec<T>,
    opts: &SolverOptions<T>,
    best: &mut T,
) -> Option<(Vec<T>, T)> {
    match newton(m, params, guess, opts) {
        Ok((lam, r)) if strictly_increasing(&lam) => Some((lam, r)),
        Ok((_, r)) | Err(r) => {
            *best = best.min(r);
            None
        }
    }
}

/// Continuation in the coupling: solve near the strong-coupling limit, then
/// walk `c` down by factors of two, reusing each solution as the next guess.
fn continuation<T: Real>(qn: &QuantumNumbers, m: &[T], params: &ModelParams<T>, opts: &SolverOptions<T>, best: &mut T) -> Option<(Vec<T>, T)> {
    let target = params.coupling();
    let hundred = T::lit(100.0);
    let mut c = target * hundred;
    let mut lam = None;
    for _ in 0..20 {
        let p = params.with_coupling(c).ok()?;
        let guess = limit_rapidities(qn, &p, CouplingLimit::Infinite);
        if let Some((l, _)) = attempt(m, &p, guess, opts, best) {
            lam = Some(l);
            break;
        }
        c = c * hundred;
    }
    let mut lam = lam?;
    let mut ratio = T::lit(2.0);
    while c > target {
        let next = (c / ratio).max(target);
        let p = params.with_coupling(next).ok()?;
        match attempt(m, &p, lam.clone(), opts, best) {
            Some((l, r)) => {
                lam = l;
                c = next;
                if c == target {
                    return Some((lam, r));
                }
            }
            None => {
                ratio = ratio.sqrt();
                if ratio < T::lit(1.0001) {
                    return None;
                }
            }
        }
    }
    let r = max_norm(&residual_unchecked(&lam, m, params));
    Some((lam, r))
}

/// Solves the Bethe equations for one quantum-number set.
pub fn solve_state<T: Real>(qn: &QuantumNumbers, params: &ModelParams<T>, opts: &SolverOptions<T>) -> Result<BetheState<T>> {
    opts.validate()?;
    if qn.len() != params.n_particles() {
        return Err(Error::contract(format!(
            "dimension mismatch: N = {}, {} quantum numbers",
            params.n_particles(),
            qn.len()
        )));
    }
    let m = qn.values::<T>();
    let strong = limit_rapidities(qn, params, CouplingLimit::Infinite);
    let weak = || limit_rapidities(qn, params, CouplingLimit::Zero);
    let mut best = T::infinity();

    let order: &[GuessPolicy] = match opts.guess_policy {
        GuessPolicy::Auto if params.density_ratio() <= T::one() => &[GuessPolicy::StrongCoupling, GuessPolicy::WeakCoupling, GuessPolicy::Continuation],
        GuessPolicy::Auto => &[GuessPolicy::WeakCoupling, GuessPolicy::StrongCoupling, GuessPolicy::Continuation],
        GuessPolicy::StrongCoupling => &[GuessPolicy::StrongCoupling],
        GuessPolicy::WeakCoupling => &[GuessPolicy::WeakCoupling],
        GuessPolicy::Continuation => &[GuessPolicy::Continuation],
    };
    for policy in order {
        let found = match policy {
            GuessPolicy::StrongCoupling => attempt(&m, params, strong.clone(), opts, &mut best),
            GuessPolicy::WeakCoupling => attempt(&m, params, weak(), opts, &mut best),
            GuessPolicy::Continuation => continuation(qn, &m, params, opts, &mut best),
            GuessPolicy::Auto => unreachable!(),
        };
        if let Some((lam, r)) = found {
            return Ok(BetheState::from_rapidities(qn.clone(), lam, r));
        }
    }
    Err(Error::NonConvergence {
        quantum_numbers: qn.clone(),
        best_residual: best.as_f64(),
    })
}
