//! Compensated (Kahan-Babuska-Neumaier) summation.
//!
//! Monte Carlo reductions in this crate must not depend on how a batch is
//! partitioned across workers. Plain `f64` addition drops low-order bits in a
//! partition-dependent way; the accumulator below carries an explicit
//! correction term, so merging per-chunk partial sums in a fixed order agrees
//! with a single sequential pass to far better than 1e-12 relative.

/// Running sum with a Neumaier correction term.
///
/// Neumaier's variant of Kahan's algorithm also handles terms that are larger
/// in magnitude than the running sum, which happens routinely when merging
/// chunk totals.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    correction: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add one term.
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.correction += (self.sum - t) + x;
        } else {
            self.correction += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Fold another accumulator into this one. Used when combining per-chunk
    /// partial sums; callers must merge in a fixed (chunk-index) order to get
    /// bit-identical totals across worker counts.
    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.correction += other.correction;
    }

    /// The compensated total.
    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.correction
    }
}
