//! Distances from the nodal set to the boundary: `d` and the leftward
//! `e₁`-gap `d₁` with its contact sets.

use crate::error::{Error, Result};
use crate::geometry::{DomainDescriptor, Grid};
use crate::nodal::set::NodalSet;
use crate::rearrange::GridFunction;
use crate::scalar::Real;

fn descriptor<T: Real>(grid: &Grid<T>) -> Result<&DomainDescriptor<T>> {
    grid.descriptor().ok_or(Error::NoDescriptor)
}

/// `dist(Z(u), ∂Ω)` measured to the analytic boundary.
///
/// Values below `h` are at the resolution limit; see [`below_resolution`].
pub fn dist_to_boundary<T: Real>(set: &NodalSet<T>, grid: &Grid<T>) -> Result<T> {
    if set.is_empty() {
        return Err(Error::NotSignChanging);
    }
    let dom = descriptor(grid)?;
    Ok(set.points().fold(T::infinity(), |m, p| m.min((-dom.signed_distance(p)).max(T::zero()))))
}

/// Whether a length is too small to be distinguished from 0 at spacing `h`.
pub fn below_resolution<T: Real>(d: T, h: T) -> bool {
    d <= h
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContactKind {
    /// `∂Y(u)` found from the `2h` neighbourhood rule.
    Regular,
    /// `Y(u)` has no neighbours in `Z(u) ∖ Y(u)`; its extreme points in `x₂`
    /// stand in for `∂Y(u)`.
    ExtremeFallback,
    /// `d ≤ h`: the nodal set already reaches the boundary. The contact sets
    /// are still reported but the sign of `u` near the boundary is not checked.
    BelowResolution,
}

/// `d₁`, `Y(u)` and `∂Y(u)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Contact<T> {
    pub d: T,
    pub d1: T,
    pub y: Vec<[T; 2]>,
    pub boundary_y: Vec<[T; 2]>,
    pub kind: ContactKind,
}

/// Leftward gap `α ≥ 0` with `(z₁ − α, z₂)` on the boundary.
fn leftward_gap<T: Real>(dom: &DomainDescriptor<T>, z: [T; 2]) -> T {
    dom.ray_exit(z, [-T::one(), T::zero()]).unwrap_or(T::zero())
}

/// Computes `d₁` and the contact sets of `Z(u)`.
///
/// When `d > h`, `u` must be positive on the inside nodes next to the
/// boundary; a field that is negative there must be flipped first
/// ([`Error::SignFlipRequired`]).
/// `Y(u)` collects the points whose gap is within `h²/L` of the minimum,
/// `L` the half-width of the domain.
pub fn e1_distance_d1<T: Real>(set: &NodalSet<T>, u: &GridFunction<T>) -> Result<Contact<T>> {
    let grid = u.grid();
    let dom = descriptor(grid)?;
    let h = grid.h();
    let d = dist_to_boundary(set, grid)?;
    let gaps: Vec<T> = set.points().map(|z| leftward_gap(dom, z)).collect();
    let d1 = gaps.iter().fold(T::infinity(), |m, &g| m.min(g));
    let resolved = !below_resolution(d, h);
    if resolved {
        check_positive_near_boundary(u, set.tau())?;
    }

    let scale = dom.half_width();
    let tol = h * h / scale + T::epsilon() * T::lit(64.0) * scale;
    let points: Vec<[T; 2]> = set.points().collect();
    let in_y: Vec<bool> = gaps.iter().map(|&g| g <= d1 + tol).collect();
    let y: Vec<[T; 2]> = points.iter().zip(&in_y).filter(|(_, &m)| m).map(|(p, _)| *p).collect();
    let band = h * T::lit(2.0);
    let rest: Vec<[T; 2]> = points.iter().zip(&in_y).filter(|(_, &m)| !m).map(|(p, _)| *p).collect();
    let boundary_y: Vec<[T; 2]> = y
        .iter()
        .copied()
        .filter(|a| rest.iter().any(|b| (a[0] - b[0]).hypot(a[1] - b[1]) <= band))
        .collect();
    if !boundary_y.is_empty() {
        let kind = if resolved { ContactKind::Regular } else { ContactKind::BelowResolution };
        return Ok(Contact { d, d1, y, boundary_y, kind });
    }
    let lo = y.iter().copied().fold(y[0], |m, p| if (p[1], p[0]) < (m[1], m[0]) { p } else { m });
    let hi = y.iter().copied().fold(y[0], |m, p| if (p[1], p[0]) > (m[1], m[0]) { p } else { m });
    let boundary_y = if lo == hi { vec![lo] } else { vec![lo, hi] };
    let kind = if resolved { ContactKind::ExtremeFallback } else { ContactKind::BelowResolution };
    Ok(Contact { d, d1, y, boundary_y, kind })
}

/// `u > 0` on every boundary-adjacent inside node where `|u| > τ`.
fn check_positive_near_boundary<T: Real>(u: &GridFunction<T>, tau: T) -> Result<()> {
    let grid = u.grid();
    let (mut pos, mut neg) = (false, false);
    for (i, &v) in u.values().iter().enumerate() {
        if grid.is_inside(i) && grid.boundary_adjacent()[i] && v.abs() > tau {
            pos |= v > T::zero();
            neg |= v < T::zero();
        }
    }
    match (pos, neg) {
        (_, false) => Ok(()),
        (false, true) => Err(Error::SignFlipRequired),
        (true, true) => Err(Error::Precondition("u takes both signs next to the boundary".into())),
    }
}
