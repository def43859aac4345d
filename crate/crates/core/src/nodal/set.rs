//! Zero sets and nodal domains of grid functions.

use crate::error::{Error, Result};
use crate::geometry::connected_components;
use crate::rearrange::GridFunction;
use crate::scalar::Real;

/// One point of the discrete nodal set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Crossing<T> {
    /// Where `u` vanishes: the linear interpolant's zero on a sign-changing
    /// edge, or the node itself for a zero node.
    pub point: [T; 2],
    /// Endpoints of the edge; both equal for a zero node.
    pub nodes: (usize, usize),
}

impl<T> Crossing<T> {
    pub fn is_node(&self) -> bool {
        self.nodes.0 == self.nodes.1
    }
}

/// The discrete `Z(u)`: sign-changing edges between inside nodes plus the
/// inside nodes with `|u| ≤ τ`.
#[derive(Clone, Debug, PartialEq)]
pub struct NodalSet<T> {
    crossings: Vec<Crossing<T>>,
    tau: T,
    plateau: Vec<usize>,
}

impl<T: Real> NodalSet<T> {
    /// A set given directly by its points, e.g. an analytic curve sampled
    /// by hand.
    pub fn from_points(points: impl IntoIterator<Item = [T; 2]>) -> Self {
        let crossings = points.into_iter().map(|point| Crossing { point, nodes: (0, 0) }).collect();
        Self { crossings, tau: T::zero(), plateau: Vec::new() }
    }

    pub fn crossings(&self) -> &[Crossing<T>] {
        &self.crossings
    }

    pub fn points(&self) -> impl Iterator<Item = [T; 2]> + '_ {
        self.crossings.iter().map(|c| c.point)
    }

    pub fn len(&self) -> usize {
        self.crossings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.crossings.is_empty()
    }

    pub fn tau(&self) -> T {
        self.tau
    }

    /// Interior zero nodes whose neighbours are all zero as well.
    pub fn plateau_nodes(&self) -> &[usize] {
        &self.plateau
    }
}

/// Extracts `Z(u)` with zero threshold `tau`.
pub fn extract_nodal_set<T: Real>(u: &GridFunction<T>, tau: T) -> Result<NodalSet<T>> {
    if !(tau >= T::zero()) {
        return Err(Error::Precondition(format!("zero threshold must be nonnegative, got {tau}")));
    }
    let grid = u.grid();
    let lat = grid.lattice();
    let vals = u.values();
    let zero = |i: usize| vals[i].abs() <= tau;
    let mut crossings = Vec::new();
    let mut plateau = Vec::new();
    for i in 0..lat.len() {
        if !grid.is_inside(i) {
            continue;
        }
        if zero(i) {
            crossings.push(Crossing { point: lat.point(i), nodes: (i, i) });
            let flat = !grid.boundary_adjacent()[i]
                && (0..lat.dim()).all(|ax| {
                    [false, true].iter().all(|&fw| lat.neighbor(i, ax, fw).is_none_or(zero))
                });
            if flat {
                plateau.push(i);
            }
            continue;
        }
        for ax in 0..lat.dim() {
            let Some(j) = lat.neighbor(i, ax, true) else { continue };
            if !grid.is_inside(j) || zero(j) || vals[i].signum() == vals[j].signum() {
                continue;
            }
            let t = vals[i] / (vals[i] - vals[j]);
            let (a, b) = (lat.point(i), lat.point(j));
            let point = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
            crossings.push(Crossing { point, nodes: (i, j) });
        }
    }
    Ok(NodalSet { crossings, tau, plateau })
}

/// Nodal-domain labels: connected components of same-sign inside nodes with
/// `|u| > τ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodalDomains {
    pub labels: Vec<Option<usize>>,
    pub count: usize,
    /// Sign (+1 or −1) of each domain.
    pub signs: Vec<i8>,
}

impl NodalDomains {
    pub fn positive_count(&self) -> usize {
        self.signs.iter().filter(|&&s| s > 0).count()
    }

    pub fn negative_count(&self) -> usize {
        self.signs.iter().filter(|&&s| s < 0).count()
    }
}

pub fn nodal_domains<T: Real>(u: &GridFunction<T>, tau: T) -> NodalDomains {
    let grid = u.grid();
    let vals = u.values();
    let (labels, count) = connected_components(
        grid.lattice(),
        |i| grid.is_inside(i) && vals[i].abs() > tau,
        |i, j| (vals[i] > T::zero()) == (vals[j] > T::zero()),
    );
    let mut signs = vec![0i8; count];
    for (i, l) in labels.iter().enumerate() {
        if let Some(l) = *l {
            signs[l] = if vals[i] > T::zero() { 1 } else { -1 };
        }
    }
    NodalDomains { labels, count, signs }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;
    use std::sync::Arc;

    use super::*;
    use crate::geometry::{DomainDescriptor, Grid};

    fn square(h: f64) -> Arc<Grid<f64>> {
        Arc::new(Grid::build(DomainDescriptor::centered_rectangle(1.0, 1.0).unwrap(), h).unwrap())
    }

    #[test]
    fn linear_field_straddles_axis() {
        let g = square(1.0 / 8.0);
        let u = GridFunction::from_fn(g.clone(), |p| p[0] + 0.05).unwrap();
        let z = extract_nodal_set(&u, 0.0).unwrap();
        assert_eq!(z.len(), 15);
        for c in z.crossings() {
            let (a, b) = (g.lattice().point(c.nodes.0), g.lattice().point(c.nodes.1));
            assert!(a[0] < -0.05 && b[0] > -0.05);
            assert!((c.point[0] + 0.05).abs() < 1e-12);
        }
        let d = nodal_domains(&u, 0.0);
        assert_eq!((d.count, d.positive_count(), d.negative_count()), (2, 1, 1));
    }

    #[test]
    fn exact_zero_column_is_kept() {
        let u = GridFunction::from_fn(square(1.0 / 8.0), |p| p[0]).unwrap();
        let z = extract_nodal_set(&u, 0.0).unwrap();
        assert_eq!(z.len(), 15);
        assert!(z.crossings().iter().all(|c| c.is_node() && c.point[0] == 0.0));
        assert!(z.plateau_nodes().is_empty());
        assert_eq!(nodal_domains(&u, 0.0).count, 2);
    }

    #[test]
    fn positive_field_has_no_zero_set() {
        let u = GridFunction::from_fn(square(1.0 / 8.0), |p| 2.0 - p[0] * p[1]).unwrap();
        assert!(extract_nodal_set(&u, 0.0).unwrap().is_empty());
        assert_eq!(nodal_domains(&u, 0.0).count, 1);
    }

    #[test]
    fn rectangle_mode_crossings_near_midline() {
        let d = DomainDescriptor::rectangle(0.0, 2.0, 0.0, 1.0).unwrap();
        let h = 1.0 / 32.0;
        let g = Arc::new(Grid::build(d, h).unwrap());
        let u = GridFunction::from_fn(g, |p| (PI * p[0]).sin() * (PI * p[1]).sin() + 1e-3 * p[1]).unwrap();
        let z = extract_nodal_set(&u, 0.0).unwrap();
        assert!(!z.is_empty());
        assert!(z.points().all(|p| (p[0] - 1.0).abs() < h));
    }

    #[test]
    fn checkerboard_has_four_domains() {
        let u = GridFunction::from_fn(square(1.0 / 16.0), |p| (PI * p[0]).sin() * (PI * p[1]).sin()).unwrap();
        let d = nodal_domains(&u, 0.0);
        assert_eq!((d.count, d.positive_count()), (4, 2));
        let scaled = u.scale(3.5);
        assert_eq!(nodal_domains(&scaled, 0.0), d);
    }

    #[test]
    fn flat_zero_patch_is_flagged() {
        let u = GridFunction::from_fn(square(1.0 / 8.0), |p| if p[0].abs() < 0.3 { 0.0 } else { p[0] }).unwrap();
        let z = extract_nodal_set(&u, 0.0).unwrap();
        assert!(!z.plateau_nodes().is_empty());
        assert!(extract_nodal_set(&u, -1.0).is_err());
    }
}
