//! Uniform Cartesian lattices and domain masks.
//!
//! Nodes are numbered with axis 0 (`x₁`) fastest. Coordinates are computed
//! from the window centre as `centre + (2i − (n − 1))·h/2`, which makes mirror
//! pairs about the centre bit-exact negatives of each other.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::geometry::domain::DomainDescriptor;
use crate::geometry::polarization::PolarizationPlane;
use crate::scalar::Real;

/// Relative slack used when deciding whether a length is a multiple of `h`.
const ALIGN_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Lattice<T> {
    shape: Vec<usize>,
    h: T,
    centre: Vec<T>,
}

impl<T: Real> Lattice<T> {
    /// Lattice with node `0` at `origin` along every axis.
    pub fn new(shape: Vec<usize>, h: T, origin: Vec<T>) -> Result<Self> {
        if !(h > T::zero() && h.is_finite()) {
            return Err(Error::InvalidSpacing(h.to_f64_lossy()));
        }
        if shape.is_empty() || shape.len() != origin.len() || shape.contains(&0) {
            return Err(Error::ShapeMismatch(format!(
                "lattice shape {shape:?} with {} origin coordinates",
                origin.len()
            )));
        }
        let centre = shape
            .iter()
            .zip(&origin)
            .map(|(&n, &o)| o + T::from_usize_lossy(n - 1) * h / T::lit(2.0))
            .collect();
        Ok(Self { shape, h, centre })
    }

    /// Lattice with the given window centre along every axis.
    pub fn centred(shape: Vec<usize>, h: T, centre: Vec<T>) -> Result<Self> {
        let origin = vec![T::zero(); centre.len()];
        let mut lat = Self::new(shape, h, origin)?;
        lat.centre = centre;
        Ok(lat)
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn h(&self) -> T {
        self.h
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `h^N`, the volume element of the lattice.
    pub fn cell_volume(&self) -> T {
        self.h.powi(self.dim() as i32)
    }

    pub fn centre(&self) -> &[T] {
        &self.centre
    }

    pub fn origin(&self) -> Vec<T> {
        (0..self.dim()).map(|k| self.axis_coord(k, 0)).collect()
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.shape[..axis].iter().product()
    }

    pub fn index(&self, multi: &[usize]) -> usize {
        let mut idx = 0;
        let mut stride = 1;
        for (k, &i) in multi.iter().enumerate() {
            idx += i * stride;
            stride *= self.shape[k];
        }
        idx
    }

    pub fn multi_index(&self, mut idx: usize) -> Vec<usize> {
        self.shape
            .iter()
            .map(|&n| {
                let i = idx % n;
                idx /= n;
                i
            })
            .collect()
    }

    /// Component `axis` of the multi-index of node `idx`.
    #[inline]
    pub fn index_along(&self, idx: usize, axis: usize) -> usize {
        (idx / self.stride(axis)) % self.shape[axis]
    }

    /// Coordinate of lattice line `i` along `axis`.
    #[inline]
    pub fn axis_coord(&self, axis: usize, i: usize) -> T {
        let twice = 2 * i as i64 - (self.shape[axis] as i64 - 1);
        self.centre[axis] + T::lit(twice as f64) * self.h / T::lit(2.0)
    }

    #[inline]
    pub fn coord(&self, idx: usize, axis: usize) -> T {
        self.axis_coord(axis, self.index_along(idx, axis))
    }

    /// Planar position of a node; the second coordinate is 0 on 1-D lattices.
    pub fn point(&self, idx: usize) -> [T; 2] {
        let y = if self.dim() > 1 { self.coord(idx, 1) } else { T::zero() };
        [self.coord(idx, 0), y]
    }

    /// Neighbour one step along `axis`, forward or backward.
    #[inline]
    pub fn neighbor(&self, idx: usize, axis: usize, forward: bool) -> Option<usize> {
        let i = self.index_along(idx, axis);
        let s = self.stride(axis);
        if forward {
            (i + 1 < self.shape[axis]).then(|| idx + s)
        } else {
            (i > 0).then(|| idx - s)
        }
    }

    /// Pair-sum of the window's own mirror plane (its `x₁` centre).
    pub fn centre_pair_sum(&self) -> i64 {
        self.shape[0] as i64 - 1
    }

    /// Plane `x₁ = a`; `2a` must be aligned with the lattice.
    pub fn plane(&self, a: T) -> Result<PolarizationPlane<T>> {
        let k = self.pair_sum_real(a);
        let r = k.round();
        if (k - r).abs() > T::lit(ALIGN_TOL) * T::one().max(k.abs()) {
            return Err(Error::UnalignedPlane { a: a.to_f64_lossy() });
        }
        Ok(self.plane_from_pair_sum(r.to_i64().expect("pair sum fits i64")))
    }

    /// The aligned plane with the largest offset not exceeding `a`.
    pub fn plane_floor(&self, a: T) -> PolarizationPlane<T> {
        let k = self.pair_sum_real(a);
        let k = (k + T::lit(ALIGN_TOL) * T::one().max(k.abs())).floor();
        self.plane_from_pair_sum(k.to_i64().expect("pair sum fits i64"))
    }

    /// Plane whose mirror map sends line `i` to line `k − i` along `x₁`.
    pub fn plane_from_pair_sum(&self, k: i64) -> PolarizationPlane<T> {
        let offset = self.centre[0]
            + T::lit((k - self.centre_pair_sum()) as f64) * self.h / T::lit(2.0);
        PolarizationPlane::new(k, offset, self.shape[0], self.len())
    }

    fn pair_sum_real(&self, a: T) -> T {
        (a - self.centre[0]) * T::lit(2.0) / self.h + T::lit(self.centre_pair_sum() as f64)
    }
}

/// A lattice, the inside-mask of a domain, and (optionally) its analytic
/// descriptor.
#[derive(Clone, Debug)]
pub struct Grid<T> {
    lattice: Lattice<T>,
    mask: Vec<bool>,
    boundary_adjacent: Vec<bool>,
    descriptor: Option<DomainDescriptor<T>>,
}

impl<T: Real> Grid<T> {
    /// Discretizes `descriptor` with spacing `h`. The window is the bounding
    /// box, so every inside node's neighbours exist (possibly as boundary
    /// ghosts holding 0).
    pub fn build(descriptor: DomainDescriptor<T>, h: T) -> Result<Self> {
        Self::build_with_margin(descriptor, h, 0)
    }

    /// Like [`Grid::build`] with `margin` extra outside node layers on every
    /// side, so that reflections of the domain stay inside the window.
    pub fn build_with_margin(descriptor: DomainDescriptor<T>, h: T, margin: usize) -> Result<Self> {
        if !(h > T::zero() && h.is_finite()) {
            return Err(Error::InvalidSpacing(h.to_f64_lossy()));
        }
        let bb = descriptor.bounding_box();
        let half = (bb[0][1] - bb[0][0]) / T::lit(2.0);
        let mx = half / h;
        let mx_round = mx.round();
        if (mx - mx_round).abs() > T::lit(ALIGN_TOL) * mx.max(T::one()) || mx_round < T::one() {
            return Err(Error::NotMirrorClosed(format!(
                "h = {h} does not divide the x1 half-width {half}"
            )));
        }
        let mx = mx_round.to_usize().expect("node count fits usize");
        let half_y = (bb[1][1] - bb[1][0]) / T::lit(2.0);
        let my = (half_y / h - T::lit(ALIGN_TOL)).ceil().max(T::one());
        let my = my.to_usize().expect("node count fits usize");
        let shape = vec![2 * (mx + margin) + 1, 2 * (my + margin) + 1];
        let centre = vec![descriptor.axis(), (bb[1][0] + bb[1][1]) / T::lit(2.0)];
        let lattice = Lattice::centred(shape, h, centre)?;

        let tol = h * T::lit(ALIGN_TOL);
        let mask: Vec<bool> = (0..lattice.len())
            .map(|i| descriptor.signed_distance(lattice.point(i)) < -tol)
            .collect();
        let grid = Self::assemble(lattice, mask, Some(descriptor))?;
        let (_, count) = grid.components();
        if count != 1 {
            return Err(Error::Disconnected { components: count });
        }
        Ok(grid)
    }

    /// Grid from an explicit mask, without a descriptor. Connectivity is not
    /// enforced so that test fixtures can use arbitrary sets.
    pub fn from_mask(lattice: Lattice<T>, mask: Vec<bool>) -> Result<Self> {
        Self::assemble(lattice, mask, None)
    }

    fn assemble(
        lattice: Lattice<T>,
        mask: Vec<bool>,
        descriptor: Option<DomainDescriptor<T>>,
    ) -> Result<Self> {
        if mask.len() != lattice.len() {
            return Err(Error::ShapeMismatch(format!(
                "mask has {} entries, lattice {}",
                mask.len(),
                lattice.len()
            )));
        }
        if !mask.iter().any(|&m| m) {
            return Err(Error::EmptyMask);
        }
        let boundary_adjacent = (0..lattice.len())
            .map(|i| {
                mask[i]
                    && (0..lattice.dim()).any(|ax| {
                        [false, true].iter().any(|&fw| match lattice.neighbor(i, ax, fw) {
                            Some(j) => !mask[j],
                            None => true,
                        })
                    })
            })
            .collect();
        Ok(Self { lattice, mask, boundary_adjacent, descriptor })
    }

    pub fn lattice(&self) -> &Lattice<T> {
        &self.lattice
    }

    pub fn h(&self) -> T {
        self.lattice.h
    }

    pub fn len(&self) -> usize {
        self.mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.is_empty()
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    #[inline]
    pub fn is_inside(&self, idx: usize) -> bool {
        self.mask[idx]
    }

    pub fn inside_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Inside nodes with at least one non-inside neighbour.
    pub fn boundary_adjacent(&self) -> &[bool] {
        &self.boundary_adjacent
    }

    pub fn descriptor(&self) -> Option<&DomainDescriptor<T>> {
        self.descriptor.as_ref()
    }

    /// Descriptor normal at the boundary point closest to node `idx`, `None`
    /// at corners or without a descriptor.
    pub fn boundary_normal(&self, idx: usize) -> Option<[T; 2]> {
        let d = self.descriptor.as_ref()?;
        d.outward_normal(self.lattice.point(idx), self.h() * T::lit(1e-6))
    }

    /// Connected components of the inside mask (2N-neighbour adjacency).
    pub fn components(&self) -> (Vec<Option<usize>>, usize) {
        connected_components(&self.lattice, |i| self.mask[i], |_, _| true)
    }

    /// Whether the lattice is mirror-symmetric about the descriptor axis.
    pub fn is_mirror_closed(&self) -> bool {
        match &self.descriptor {
            Some(d) => {
                let c = self.lattice.centre[0];
                (c - d.axis()).abs() <= self.h() * T::lit(ALIGN_TOL)
            }
            None => true,
        }
    }
}

/// Labels the connected components of `{i : include(i)}` where neighbours
/// `i, j` are joined when `same(i, j)`. Labels are assigned in node order.
pub fn connected_components<T: Real>(
    lattice: &Lattice<T>,
    include: impl Fn(usize) -> bool,
    same: impl Fn(usize, usize) -> bool,
) -> (Vec<Option<usize>>, usize) {
    let n = lattice.len();
    let mut labels = vec![None; n];
    let mut count = 0;
    let mut queue = VecDeque::new();
    for start in 0..n {
        if labels[start].is_some() || !include(start) {
            continue;
        }
        labels[start] = Some(count);
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            for ax in 0..lattice.dim() {
                for fw in [false, true] {
                    if let Some(j) = lattice.neighbor(i, ax, fw) {
                        if labels[j].is_none() && include(j) && same(i, j) {
                            labels[j] = Some(count);
                            queue.push_back(j);
                        }
                    }
                }
            }
        }
        count += 1;
    }
    (labels, count)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_interior_count() {
        let d = DomainDescriptor::centered_rectangle(1.0, 1.0).unwrap();
        let g = Grid::build(d, 1.0 / 32.0).unwrap();
        assert_eq!(g.lattice().shape(), &[65, 65]);
        assert_eq!(g.inside_count(), 63 * 63);
    }

    #[test]
    fn disk_mask_is_membership() {
        let g = Grid::build(DomainDescriptor::unit_disk(), 1.0 / 64.0).unwrap();
        let lat = g.lattice();
        for i in 0..g.len() {
            let [x, y] = lat.point(i);
            assert_eq!(g.is_inside(i), x * x + y * y < 1.0, "node {i}");
        }
    }

    #[test]
    fn coordinates_mirror_exactly() {
        let g = Grid::build(DomainDescriptor::<f64>::unit_disk(), 1.0 / 24.0).unwrap();
        let lat = g.lattice();
        let n = lat.shape()[0];
        for i in 0..n {
            assert_eq!(lat.axis_coord(0, i), -lat.axis_coord(0, n - 1 - i));
        }
        assert_eq!(lat.axis_coord(0, n / 2), 0.0);
    }

    #[test]
    fn rejects_misaligned_spacing() {
        let d = DomainDescriptor::centered_rectangle(1.0, 1.0).unwrap();
        assert!(matches!(Grid::build(d, 0.3), Err(Error::NotMirrorClosed(_))));
        let d = DomainDescriptor::centered_rectangle(1.0, 1.0).unwrap();
        assert!(matches!(Grid::build(d, -1.0), Err(Error::InvalidSpacing(_))));
    }

    #[test]
    fn offset_rectangle_lattice() {
        let d = DomainDescriptor::rectangle(0.0, 2.0, 0.0, 1.0).unwrap();
        let g = Grid::build(d, 1.0 / 16.0).unwrap();
        let lat = g.lattice();
        assert_eq!(lat.axis_coord(0, 0), 0.0);
        assert_eq!(lat.axis_coord(0, lat.shape()[0] - 1), 2.0);
        assert_eq!(g.inside_count(), 31 * 15);
    }

    #[test]
    fn planes_align() {
        let lat = Lattice::<f64>::centred(vec![9, 1], 0.25, vec![0.0, 0.0]).unwrap();
        let p = lat.plane(0.125).unwrap();
        assert_eq!(p.pair_sum(), 9);
        assert_eq!(p.offset(), 0.125);
        assert!(lat.plane(0.1).is_err());
        assert_eq!(lat.plane_floor(0.2).pair_sum(), 9);
        assert_eq!(lat.plane_floor(0.25).pair_sum(), 10);
    }

    #[test]
    fn components_count() {
        let lat = Lattice::<f64>::centred(vec![5, 1], 1.0, vec![0.0, 0.0]).unwrap();
        let mask = [true, true, false, true, false];
        let (labels, count) = connected_components(&lat, |i| mask[i], |_, _| true);
        assert_eq!(count, 2);
        assert_eq!(labels, vec![Some(0), Some(0), None, Some(1), None]);
    }

    #[test]
    fn boundary_adjacency() {
        let d = DomainDescriptor::centered_rectangle(1.0, 1.0).unwrap();
        let g = Grid::build(d, 0.5).unwrap();
        let adj = g.boundary_adjacent().iter().filter(|&&b| b).count();
        assert_eq!(adj, 8);
    }
}
