//! Compensated accumulation.

use crate::scalar::Real;

/// Neumaier-compensated running sum.
///
/// The result depends only on the order in which terms are added, so callers
/// that fix the iteration order get reproducible sums.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum<R> {
    sum: R,
    comp: R,
}

impl<R: Real> CompensatedSum<R> {
    pub fn new() -> Self {
        Self {
            sum: R::zero(),
            comp: R::zero(),
        }
    }

    pub fn add(&mut self, value: R) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.comp = self.comp + ((self.sum - t) + value);
        } else {
            self.comp = self.comp + ((value - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn value(&self) -> R {
        self.sum + self.comp
    }
}

impl<R: Real> std::iter::FromIterator<R> for CompensatedSum<R> {
    fn from_iter<I: IntoIterator<Item = R>>(iter: I) -> Self {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Compensated sum of an iterator.
pub fn compensated_sum<R: Real, I: IntoIterator<Item = R>>(iter: I) -> R {
    iter.into_iter().collect::<CompensatedSum<R>>().value()
}
