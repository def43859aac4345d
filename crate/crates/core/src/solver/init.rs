use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::solver::config::Initializer;
use crate::solver::operator::Discretization;
use crate::solver::poisson::{solve_metric, BoxPoisson};

/// Distance of each unknown to the boundary: the analytic distance when a
/// descriptor is attached, the lattice hop count to the nearest outside node
/// (or window edge) times `h` otherwise.
pub(crate) fn boundary_distance<T: Real>(op: &Discretization<T>) -> Vec<T> {
    let grid = op.grid();
    let lat = grid.lattice();
    if let Some(d) = grid.descriptor() {
        return op.nodes().iter().map(|&i| d.signed_distance(lat.point(i)).abs()).collect();
    }
    let mut hops = vec![usize::MAX; grid.len()];
    let mut queue = VecDeque::new();
    for i in 0..grid.len() {
        if grid.is_inside(i) {
            let at_edge = (0..lat.dim()).any(|a| lat.neighbor(i, a, false).is_none() || lat.neighbor(i, a, true).is_none());
            let near_outside = (0..lat.dim())
                .flat_map(|a| [lat.neighbor(i, a, false), lat.neighbor(i, a, true)])
                .any(|j| j.is_some_and(|j| !grid.is_inside(j)));
            if at_edge || near_outside {
                hops[i] = 1;
                queue.push_back(i);
            }
        }
    }
    while let Some(i) = queue.pop_front() {
        for a in 0..lat.dim() {
            for fw in [false, true] {
                if let Some(j) = lat.neighbor(i, a, fw) {
                    if grid.is_inside(j) && hops[j] == usize::MAX {
                        hops[j] = hops[i] + 1;
                        queue.push_back(j);
                    }
                }
            }
        }
    }
    op.nodes().iter().map(|&i| T::from_usize_lossy(hops[i]) * op.h()).collect()
}

fn symmetry_axis<T: Real>(op: &Discretization<T>) -> T {
    let grid = op.grid();
    grid.descriptor().map_or_else(|| grid.lattice().centre()[0], |d| d.axis())
}

pub(crate) fn positive_bump<T: Real>(op: &Discretization<T>) -> Vec<T> {
    boundary_distance(op)
}

pub(crate) fn antisymmetric_bump<T: Real>(op: &Discretization<T>) -> Vec<T> {
    let axis = symmetry_axis(op);
    let lat = op.grid().lattice();
    boundary_distance(op)
        .into_iter()
        .zip(op.nodes())
        .map(|(d, &i)| (lat.coord(i, 0) - axis) * d)
        .collect()
}

/// Uniform noise on the unknowns, smoothed by one metric solve and scaled to
/// unit sup-norm.
pub(crate) fn random_field<T: Real>(op: &Discretization<T>, pre: &BoxPoisson<T>, seed: u64) -> Vec<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w: Vec<T> = (0..op.unknowns()).map(|_| T::lit(rng.gen_range(-1.0..1.0))).collect();
    let mut x = vec![T::zero(); w.len()];
    solve_metric(op, pre, &w, &mut x, T::lit(1e-8), 500);
    let m = x.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if m > T::zero() {
        x.iter_mut().for_each(|v| *v = *v / m);
    }
    x
}

pub(crate) fn initial_field<T: Real>(
    op: &Discretization<T>,
    pre: &BoxPoisson<T>,
    init: &Initializer<T>,
    seed: u64,
) -> Result<Vec<T>> {
    match init {
        Initializer::AntisymmetricBump => Ok(antisymmetric_bump(op)),
        Initializer::Random => Ok(random_field(op, pre, seed)),
        Initializer::User(u) => {
            if !u.escaped_nodes().is_empty() {
                return Err(Error::Precondition("user field is nonzero outside the domain".into()));
            }
            op.restrict(u)
        }
    }
}
