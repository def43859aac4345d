//! Order-independent reductions.
//!
//! Polarization permutes node values, so any sum that must be bit-identical
//! before and after polarization is taken in a canonical order: sort by value,
//! then add pairwise.

use crate::scalar::Real;

/// Sums `terms` in ascending order with pairwise accumulation. The result
/// depends only on the multiset of terms.
pub fn canonical_sum<T: Real>(mut terms: Vec<T>) -> T {
    terms.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite summands"));
    pairwise(&terms)
}

fn pairwise<T: Real>(xs: &[T]) -> T {
    if xs.len() <= 32 {
        return xs.iter().fold(T::zero(), |acc, &x| acc + x);
    }
    let mid = xs.len() / 2;
    pairwise(&xs[..mid]) + pairwise(&xs[mid..])
}

/// Neumaier-compensated running sum, for the solver's hot loops where the
/// order is fixed by the node numbering.
#[derive(Clone, Copy, Debug, Default)]
pub struct Compensated<T> {
    sum: T,
    carry: T,
}

impl<T: Real> Compensated<T> {
    pub fn new() -> Self {
        Self { sum: T::zero(), carry: T::zero() }
    }

    #[inline]
    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry = self.carry + ((self.sum - t) + x);
        } else {
            self.carry = self.carry + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.carry
    }
}
