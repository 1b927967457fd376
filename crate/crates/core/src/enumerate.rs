//! Lexicographic enumeration of quantum-number sets under a cutoff.

use crate::quantum::QuantumNumbers;

/// Iterator over every strictly increasing N-subset of the admissible values
/// `|m| < M` (integers for odd N, half-odd-integers for even N), optionally
/// restricted to `Σ m = P`. The sum constraint prunes branches before any set
/// is materialised.
#[derive(Debug, Clone)]
pub struct QuantumSetIter {
    n: usize,
    cutoff: i64,
    /// Number of admissible values.
    width: i64,
    /// `twice = 2 * index - offset`.
    offset: i64,
    /// Required sum of indices, if filtered.
    target: Option<i64>,
    cur: Vec<i64>,
    state: IterState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum IterState {
    Fresh,
    Running,
    Done,
}

/// Streams all admissible sets; empty when `N > 2M - 1` (odd N) or
/// `N > 2M` (even N), or when no set reaches the requested momentum.
pub fn enumerate_quantum_sets(n: usize, cutoff: i64, momentum: Option<i64>) -> QuantumSetIter {
    QuantumSetIter::new(n, cutoff, momentum)
}

impl QuantumSetIter {
    pub fn new(n: usize, cutoff: i64, momentum: Option<i64>) -> Self {
        let (width, offset) = if n % 2 == 1 {
            (2 * cutoff - 1, 2 * (cutoff - 1))
        } else {
            (2 * cutoff, 2 * cutoff - 1)
        };
        let mut state = if n == 0 || cutoff < 1 || n as i64 > width {
            IterState::Done
        } else {
            IterState::Fresh
        };
        // Σ twice = 2 Σ idx - N offset must equal 2P
        let target = momentum.and_then(|p| {
            let num = 2 * p + n as i64 * offset;
            if num % 2 != 0 {
                state = IterState::Done;
                None
            } else {
                Some(num / 2)
            }
        });
        Self {
            n,
            cutoff,
            width: width.max(0),
            offset,
            target,
            cur: vec![0; n],
            state,
        }
    }

    /// Admissible range for position `pos` given the prefix before it.
    fn bounds(&self, pos: usize, partial: i64) -> Option<(i64, i64)> {
        let r = (self.n - pos - 1) as i64;
        let prev = if pos == 0 { -1 } else { self.cur[pos - 1] };
        let mut lo = prev + 1;
        let mut hi = self.width - 1 - r;
        if let Some(s) = self.target {
            let rest = s - partial;
            let tri = r * (r - 1) / 2;
            // the other r values can reach at most r(K-1) - tri
            lo = lo.max(rest - r * (self.width - 1) + tri);
            // and at least r(x+1) + tri
            hi = hi.min((rest - r - tri).div_euclid(r + 1));
        }
        (lo <= hi).then_some((lo, hi))
    }

    /// Sets `cur[pos..]` to the smallest feasible completion.
    fn fill(&mut self, from: usize) -> bool {
        let mut partial: i64 = self.cur[..from].iter().sum();
        for pos in from..self.n {
            match self.bounds(pos, partial) {
                Some((lo, _)) => {
                    self.cur[pos] = lo;
                    partial += lo;
                }
                None => return false,
            }
        }
        true
    }

    fn emit(&self) -> QuantumNumbers {
        let twice = self.cur.iter().map(|&i| 2 * i - self.offset).collect();
        QuantumNumbers::from_sorted_twice_unchecked(twice, self.cutoff)
    }
}

impl Iterator for QuantumSetIter {
    type Item = QuantumNumbers;

    fn next(&mut self) -> Option<QuantumNumbers> {
        match self.state {
            IterState::Done => return None,
            IterState::Fresh => {
                self.state = IterState::Running;
                if self.fill(0) {
                    return Some(self.emit());
                }
                self.state = IterState::Done;
                return None;
            }
            IterState::Running => {}
        }
        let mut pos = self.n;
        while pos > 0 {
            pos -= 1;
            let partial: i64 = self.cur[..pos].iter().sum();
            if let Some((_, hi)) = self.bounds(pos, partial) {
                if self.cur[pos] < hi {
                    self.cur[pos] += 1;
                    if self.fill(pos + 1) {
                        return Some(self.emit());
                    }
                }
            }
        }
        self.state = IterState::Done;
        None
    }
}
