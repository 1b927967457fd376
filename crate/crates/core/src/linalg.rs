//! Small dense kernels: the Newton systems are N x N with N of order ten and the
//! unfolding fits have a handful of columns, so nothing here needs blocking.

use crate::scalar::Real;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Solves `A x = b` by Gaussian elimination with partial pivoting.
    /// Returns `None` for a numerically singular matrix.
    pub fn solve(&self, b: &[T]) -> Option<Vec<T>> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut a = self.data.clone();
        let mut x = b.to_vec();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r, &s| {
                    a[r * n + col]
                        .abs()
                        .partial_cmp(&a[s * n + col].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap();
            if a[pivot * n + col] == T::zero() || !a[pivot * n + col].is_finite() {
                return None;
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                }
                x.swap(col, pivot);
            }
            let d = a[col * n + col];
            for r in col + 1..n {
                let f = a[r * n + col] / d;
                if f == T::zero() {
                    continue;
                }
                for j in col..n {
                    a[r * n + j] = a[r * n + j] - f * a[col * n + j];
                }
                x[r] = x[r] - f * x[col];
            }
        }
        for col in (0..n).rev() {
            let mut s = x[col];
            for j in col + 1..n {
                s = s - a[col * n + j] * x[j];
            }
            x[col] = s / a[col * n + col];
        }
        Some(x)
    }
}

/// Least-squares solution of an overdetermined system with `cols` columns,
/// given row-major `design` (rows x cols), via Householder QR.
pub fn least_squares<T: Real>(design: &[T], cols: usize, rhs: &[T]) -> Option<Vec<T>> {
    let rows = rhs.len();
    assert_eq!(design.len(), rows * cols);
    if rows < cols {
        return None;
    }
    let mut a = design.to_vec();
    let mut b = rhs.to_vec();
    for k in 0..cols {
        let norm = (k..rows)
            .map(|i| a[i * cols + k] * a[i * cols + k])
            .sum::<T>()
            .sqrt();
        if norm == T::zero() {
            return None;
        }
        let alpha = if a[k * cols + k] > T::zero() { -norm } else { norm };
        // v = x - alpha e_k, stored in place of column k
        let mut v: Vec<T> = (k..rows).map(|i| a[i * cols + k]).collect();
        v[0] = v[0] - alpha;
        let vnorm2: T = v.iter().map(|&x| x * x).sum();
        if vnorm2 == T::zero() {
            continue;
        }
        let two = T::lit(2.0);
        for j in k..cols {
            let dot: T = (k..rows).map(|i| v[i - k] * a[i * cols + j]).sum();
            let f = two * dot / vnorm2;
            for i in k..rows {
                a[i * cols + j] = a[i * cols + j] - f * v[i - k];
            }
        }
        let dot: T = (k..rows).map(|i| v[i - k] * b[i]).sum();
        let f = two * dot / vnorm2;
        for i in k..rows {
            b[i] = b[i] - f * v[i - k];
        }
    }
    let mut x = vec![T::zero(); cols];
    for k in (0..cols).rev() {
        let mut s = b[k];
        for j in k + 1..cols {
            s = s - a[k * cols + j] * x[j];
        }
        let d = a[k * cols + k];
        if d == T::zero() {
            return None;
        }
        x[k] = s / d;
    }
    Some(x)
}

/// Ordinary least-squares line `y = slope * x + intercept`.
pub fn fit_line<T: Real>(x: &[T], y: &[T]) -> Option<(T, T)> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let nf = T::of_usize(n);
    let mx = x.iter().copied().sum::<T>() / nf;
    let my = y.iter().copied().sum::<T>() / nf;
    let sxx: T = x.iter().map(|&xi| (xi - mx) * (xi - mx)).sum();
    if sxx == T::zero() {
        return None;
    }
    let sxy: T = x.iter().zip(y).map(|(&xi, &yi)| (xi - mx) * (yi - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}
