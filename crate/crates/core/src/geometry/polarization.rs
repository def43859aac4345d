//! Reflections about `x₁ = a` and polarization of node sets.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `σ_a(x) = (2a − x₁, x₂, …, x_N)`.
pub fn reflect<T: Real, const N: usize>(mut x: [T; N], a: T) -> [T; N] {
    if N > 0 {
        x[0] = a + a - x[0];
    }
    x
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// `P_a`: the Σ⁻ side receives the union, the Σ⁺ side the intersection.
    P,
    /// `P̃_a`: the opposite sorting.
    PTilde,
}

/// Position of a node relative to the plane `x₁ = a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `x₁ > a`.
    Positive,
    /// `x₁ < a`.
    Negative,
    OnPlane,
}

/// A lattice-aligned hyperplane `x₁ = a`.
///
/// Stored as the integer pair-sum `k`: line `i` along `x₁` mirrors to line
/// `k − i`. Mirrors that fall outside the lattice window are reported as
/// missing; the caller treats them as outside the domain (value 0).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarizationPlane<T> {
    pair_sum: i64,
    offset: T,
    n0: usize,
    len: usize,
}

impl<T: Real> PolarizationPlane<T> {
    pub(crate) fn new(pair_sum: i64, offset: T, n0: usize, len: usize) -> Self {
        Self { pair_sum, offset, n0, len }
    }

    pub fn pair_sum(&self) -> i64 {
        self.pair_sum
    }

    /// The offset `a`.
    pub fn offset(&self) -> T {
        self.offset
    }

    /// Number of nodes of the lattice the plane belongs to.
    pub fn lattice_len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn side(&self, idx: usize) -> Side {
        let twice = 2 * (idx % self.n0) as i64;
        match twice.cmp(&self.pair_sum) {
            std::cmp::Ordering::Greater => Side::Positive,
            std::cmp::Ordering::Less => Side::Negative,
            std::cmp::Ordering::Equal => Side::OnPlane,
        }
    }

    /// `σ_a(idx)` when it lies inside the lattice window.
    #[inline]
    pub fn mirror(&self, idx: usize) -> Option<usize> {
        let i = (idx % self.n0) as i64;
        let j = self.pair_sum - i;
        if j < 0 || j >= self.n0 as i64 {
            None
        } else {
            Some((idx as i64 - i + j) as usize)
        }
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.len {
            return Err(Error::ShapeMismatch(format!(
                "plane built for {} nodes applied to {len}",
                self.len
            )));
        }
        Ok(())
    }
}

/// `P_a(mask)` or `P̃_a(mask)`, node-exact.
pub fn polarize_set<T: Real>(
    mask: &[bool],
    plane: &PolarizationPlane<T>,
    variant: Variant,
) -> Result<Vec<bool>> {
    plane.check_len(mask.len())?;
    Ok((0..mask.len())
        .map(|i| {
            let here = mask[i];
            let there = plane.mirror(i).is_some_and(|j| mask[j]);
            match (plane.side(i), variant) {
                (Side::OnPlane, _) => here,
                (Side::Positive, Variant::P) | (Side::Negative, Variant::PTilde) => here && there,
                (Side::Negative, Variant::P) | (Side::Positive, Variant::PTilde) => here || there,
            }
        })
        .collect())
}

/// Domain monotonicity oracle: `mask₁ ⊆ mask₂ ⟹ P(mask₁) ⊆ P(mask₂)`.
pub fn monotonicity_check<T: Real>(
    mask1: &[bool],
    mask2: &[bool],
    plane: &PolarizationPlane<T>,
    variant: Variant,
) -> Result<bool> {
    if mask1.len() != mask2.len() {
        return Err(Error::ShapeMismatch("masks differ in length".into()));
    }
    if let Some(i) = (0..mask1.len()).find(|&i| mask1[i] && !mask2[i]) {
        return Err(Error::Precondition(format!("mask1 is not contained in mask2 (node {i})")));
    }
    let p1 = polarize_set(mask1, plane, variant)?;
    let p2 = polarize_set(mask2, plane, variant)?;
    Ok(p1.iter().zip(&p2).all(|(&a, &b)| !a || b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::grid::Lattice;

    fn line(n: usize, h: f64) -> Lattice<f64> {
        Lattice::centred(vec![n], h, vec![0.0]).unwrap()
    }

    #[test]
    fn reflect_examples() {
        assert_eq!(reflect([3.0, 2.0], 1.0), [-1.0, 2.0]);
        assert_eq!(reflect([0.5, 0.7], 0.0), [-0.5, 0.7]);
        assert_eq!(reflect([0.25, 9.0], 0.25), [0.25, 9.0]);
        let x: [f64; 3] = [0.3, -1.1, 2.0];
        let back = reflect(reflect(x, 0.7), 0.7);
        assert!((back[0] - x[0]).abs() < 1e-15);
        assert_eq!(&back[1..], &x[1..]);
        // Exact whenever the arithmetic is.
        assert_eq!(reflect(reflect([0.375, 1.0], 0.75), 0.75), [0.375, 1.0]);
    }

    #[test]
    fn one_dimensional_interval_shifts_left() {
        // Nodes at -3, -2.5, ..., 3; mask = nodes in (-1, 2).
        let lat = line(13, 0.5);
        let mask: Vec<bool> = (0..13)
            .map(|i| {
                let x = lat.axis_coord(0, i);
                x > -1.0 && x < 2.0
            })
            .collect();
        let plane = lat.plane(0.0).unwrap();
        let out = polarize_set(&mask, &plane, Variant::P).unwrap();
        let expect: Vec<bool> = (0..13)
            .map(|i| {
                let x = lat.axis_coord(0, i);
                x > -2.0 && x < 1.0
            })
            .collect();
        assert_eq!(out, expect);
        assert_eq!(out.iter().filter(|&&b| b).count(), mask.iter().filter(|&&b| b).count());
    }

    #[test]
    fn single_point_swaps_to_negative_side() {
        let lat = line(9, 1.0);
        let mut mask = vec![false; 9];
        mask[6] = true;
        let plane = lat.plane(1.0).unwrap();
        let out = polarize_set(&mask, &plane, Variant::P).unwrap();
        let mut expect = vec![false; 9];
        expect[plane.mirror(6).unwrap()] = true;
        assert_eq!(out, expect);
        assert_eq!(plane.mirror(6), Some(4));
    }

    #[test]
    fn mirror_is_an_involution() {
        let lat = Lattice::<f64>::centred(vec![7, 3], 1.0, vec![0.0, 0.0]).unwrap();
        for k in -2..16 {
            let plane = lat.plane_from_pair_sum(k);
            for i in 0..lat.len() {
                if let Some(j) = plane.mirror(i) {
                    assert_eq!(plane.mirror(j), Some(i));
                    match plane.side(i) {
                        Side::OnPlane => assert_eq!(i, j),
                        Side::Positive => assert_eq!(plane.side(j), Side::Negative),
                        Side::Negative => assert_eq!(plane.side(j), Side::Positive),
                    }
                }
            }
        }
    }

    #[test]
    fn monotonicity_rejects_non_nested() {
        let lat = line(5, 1.0);
        let plane = lat.plane(0.0).unwrap();
        let a = [true, false, false, false, false];
        let b = [false, true, false, false, false];
        assert!(matches!(
            monotonicity_check(&a, &b, &plane, Variant::P),
            Err(Error::Precondition(_))
        ));
        assert!(monotonicity_check(&a, &a, &plane, Variant::P).unwrap());
    }
}
