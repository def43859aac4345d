//! One-sided normal derivatives at boundary points.

use crate::error::{Error, Result};
use crate::rearrange::GridFunction;
use crate::scalar::Real;

/// Bilinear interpolation of the node values of `u` at `q`; 0 beyond the
/// lattice window.
pub fn sample<T: Real>(u: &GridFunction<T>, q: [T; 2]) -> T {
    let lat = u.grid().lattice();
    let h = lat.h();
    let origin = lat.origin();
    let shape = lat.shape();
    let (ny, oy) = if lat.dim() > 1 { (shape[1], origin[1]) } else { (1, T::zero()) };
    let value = |i: i64, j: i64| -> T {
        if i < 0 || j < 0 || i >= shape[0] as i64 || j >= ny as i64 {
            T::zero()
        } else {
            u.values()[i as usize + j as usize * shape[0]]
        }
    };
    let sx = (q[0] - origin[0]) / h;
    let sy = if lat.dim() > 1 { (q[1] - oy) / h } else { T::zero() };
    let (fx, fy) = (sx.floor(), sy.floor());
    let (tx, ty) = (sx - fx, sy - fy);
    let (Some(i), Some(j)) = (fx.to_i64(), fy.to_i64()) else { return T::zero() };
    let one = T::one();
    value(i, j) * (one - tx) * (one - ty)
        + value(i + 1, j) * tx * (one - ty)
        + value(i, j + 1) * (one - tx) * ty
        + value(i + 1, j + 1) * tx * ty
}

/// Outward normal derivative of `u` at the boundary point nearest to `b`.
///
/// Uses the Dirichlet value `u(b) = 0` and interpolated samples at depths
/// `h` and `2h` along the inward normal:
/// `∂u/∂n ≈ (−4u(b − hn) + u(b − 2hn)) / 2h`. Positive means `u` increases
/// outward. Points within `2h` of a corner have no usable normal.
pub fn normal_derivative<T: Real>(u: &GridFunction<T>, b: [T; 2]) -> Result<T> {
    let grid = u.grid();
    let dom = grid.descriptor().ok_or(Error::NoDescriptor)?;
    let h = grid.h();
    let b = dom.project_to_boundary(b);
    let n = dom.outward_normal(b, h * T::lit(2.0)).ok_or(Error::Corner)?;
    let at = |s: T| sample(u, [b[0] - s * n[0], b[1] - s * n[1]]);
    let (u1, u2) = (at(h), at(h + h));
    Ok((u2 - T::lit(4.0) * u1) / (h + h))
}
