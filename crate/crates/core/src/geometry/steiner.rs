//! Steiner symmetry of lattice masks, decided two independent ways.

use crate::error::{Error, Result};
use crate::geometry::grid::Lattice;
use crate::geometry::polarization::{polarize_set, Variant};
use crate::scalar::Real;

/// A plane and a node that the corresponding polarization moves.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SteinerWitness<T> {
    pub offset: T,
    pub pair_sum: i64,
    pub variant: Variant,
    pub node: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SteinerReport<T> {
    /// Fixed by every `P_a`, `a ≥ 0`, and every `P̃_a`, `a ≤ 0`.
    pub by_polarization: bool,
    /// Every `x₁`-row is one segment symmetric about the axis.
    pub by_rows: bool,
    pub witness: Option<SteinerWitness<T>>,
}

impl<T> SteinerReport<T> {
    pub fn is_symmetric(&self) -> bool {
        self.by_polarization
    }

    pub fn agree(&self) -> bool {
        self.by_polarization == self.by_rows
    }
}

/// Steiner symmetry about the `x₁`-centre of the lattice window.
pub fn is_steiner_symmetric<T: Real>(lattice: &Lattice<T>, mask: &[bool]) -> Result<SteinerReport<T>> {
    let witness = polarization_witness(lattice, mask)?;
    Ok(SteinerReport {
        by_polarization: witness.is_none(),
        by_rows: steiner_by_rows(lattice, mask)?,
        witness,
    })
}

/// First plane (scanning outward from the axis) whose polarization moves a
/// node, or `None` when the mask is fixed by all of them.
pub fn polarization_witness<T: Real>(
    lattice: &Lattice<T>,
    mask: &[bool],
) -> Result<Option<SteinerWitness<T>>> {
    check_len(lattice, mask)?;
    let k0 = lattice.centre_pair_sum();
    let kmax = 2 * (lattice.shape()[0] as i64 - 1);
    let planes = (0..=k0).flat_map(|s| [(k0 + s, Variant::P), (k0 - s, Variant::PTilde)]);
    for (k, variant) in planes {
        if !(0..=kmax).contains(&k) {
            continue;
        }
        let plane = lattice.plane_from_pair_sum(k);
        let out = polarize_set(mask, &plane, variant)?;
        if let Some(node) = (0..mask.len()).find(|&i| out[i] != mask[i]) {
            return Ok(Some(SteinerWitness { offset: plane.offset(), pair_sum: k, variant, node }));
        }
    }
    Ok(None)
}

/// Direct definition: every row parallel to `x₁` is empty or a contiguous
/// run symmetric about the window centre.
pub fn steiner_by_rows<T: Real>(lattice: &Lattice<T>, mask: &[bool]) -> Result<bool> {
    check_len(lattice, mask)?;
    let n0 = lattice.shape()[0];
    for row in mask.chunks(n0) {
        let first = row.iter().position(|&b| b);
        let last = row.iter().rposition(|&b| b);
        if let (Some(f), Some(l)) = (first, last) {
            if f + l != n0 - 1 || !row[f..=l].iter().all(|&b| b) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn check_len<T: Real>(lattice: &Lattice<T>, mask: &[bool]) -> Result<()> {
    if mask.len() != lattice.len() {
        return Err(Error::ShapeMismatch(format!(
            "mask has {} entries, lattice {}",
            mask.len(),
            lattice.len()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::domain::DomainDescriptor;
    use crate::geometry::grid::Grid;

    #[test]
    fn centred_rectangle_is_symmetric() {
        let d = DomainDescriptor::centered_rectangle(1.0, 0.5).unwrap();
        let g = Grid::build(d, 1.0 / 16.0).unwrap();
        let r = is_steiner_symmetric(g.lattice(), g.mask()).unwrap();
        assert!(r.by_polarization && r.by_rows && r.witness.is_none());
    }

    #[test]
    fn annulus_is_not() {
        let g = Grid::build(DomainDescriptor::unit_disk(), 1.0 / 16.0).unwrap();
        let lat = g.lattice();
        let mask: Vec<bool> = (0..g.len())
            .map(|i| {
                let [x, y] = lat.point(i);
                g.is_inside(i) && x * x + y * y > 0.25
            })
            .collect();
        let r = is_steiner_symmetric(lat, &mask).unwrap();
        assert!(!r.by_polarization && !r.by_rows);
        assert!(r.witness.is_some());
    }

    #[test]
    fn shifted_rectangle_has_witness() {
        let h: f64 = 1.0 / 8.0;
        let lat = Lattice::centred(vec![21, 9], h, vec![0.0, 0.0]).unwrap();
        // Rectangle |x1 - h| < 0.5, |x2| < 0.4.
        let mask: Vec<bool> = (0..lat.len())
            .map(|i| {
                let [x, y] = lat.point(i);
                (x - h).abs() < 0.5 && y.abs() < 0.4
            })
            .collect();
        let r = is_steiner_symmetric(&lat, &mask).unwrap();
        assert!(!r.by_rows && !r.by_polarization);
        let w = r.witness.unwrap();
        let k = (w.offset * 2.0 / h).round();
        assert_eq!(w.offset, k * h / 2.0);
        let plane = lat.plane_from_pair_sum(w.pair_sum);
        let moved = polarize_set(&mask, &plane, w.variant).unwrap();
        assert_ne!(moved[w.node], mask[w.node]);
    }

    #[test]
    fn stadium_grid_is_steiner() {
        let d = DomainDescriptor::stadium(0.5, 0.5).unwrap();
        let g = Grid::build(d, 1.0 / 32.0).unwrap();
        assert_eq!(g.components().1, 1);
        let r = is_steiner_symmetric(g.lattice(), g.mask()).unwrap();
        assert!(r.by_polarization && r.by_rows);
    }
}
