//! Lattice integrals that polarization leaves invariant (or decreases).

use crate::error::{Error, Result};
use crate::rearrange::function::GridFunction;
use crate::scalar::Real;
use crate::sum::canonical_sum;

/// `hᴺ Σ G(v(x))` over the nodes where `v ≠ 0`.
///
/// `G(0) = 0` is assumed, so nodes with value 0 are skipped. The sum is taken
/// in canonical order and therefore depends only on the multiset of values:
/// it is bit-identical for `v` and any polarization of `v`.
pub fn pointwise_integral<T: Real>(v: &GridFunction<T>, g: impl Fn(T) -> T) -> T {
    let terms: Vec<T> = v.values().iter().filter(|&&x| x != T::zero()).map(|&x| g(x)).collect();
    canonical_sum(terms) * v.grid().lattice().cell_volume()
}

/// `hᴺ Σ_edges |Δv / h|ᵖ` over all lattice edges, including the edges from
/// the window's outermost nodes to the zero values beyond it.
///
/// Each edge difference is a forward difference along one axis. At `p = 2`
/// this equals the forward-difference cell energy `hᴺ Σ_cells |∇_h v|²`.
pub fn dirichlet_energy<T: Real>(v: &GridFunction<T>, p: T) -> Result<T> {
    if !(p > T::one()) {
        return Err(Error::Precondition(format!("dirichlet_energy needs p > 1, got {p}")));
    }
    let lat = v.grid().lattice();
    let h = lat.h();
    let vals = v.values();
    let mut terms = Vec::new();
    let mut push = |d: T| {
        if d != T::zero() {
            terms.push((d.abs() / h).powf(p));
        }
    };
    for axis in 0..lat.dim() {
        for i in 0..vals.len() {
            match lat.neighbor(i, axis, true) {
                Some(j) => push(vals[j] - vals[i]),
                None => push(vals[i]),
            }
            if lat.neighbor(i, axis, false).is_none() {
                push(vals[i]);
            }
        }
    }
    Ok(canonical_sum(terms) * lat.cell_volume())
}
