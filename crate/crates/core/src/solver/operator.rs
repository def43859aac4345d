//! The discrete p-energy on the inside nodes of a grid.
//!
//! Unknowns are the values at inside nodes. Every lattice edge with both ends
//! inside contributes `hᴺ |Δu/h|ᵖ`. An edge from an inside node to a
//! non-inside node is cut by the analytic boundary at fraction `θ` of its
//! length; it contributes `hᴺ θ^{1−p} |u/h|ᵖ`, the energy of the linear
//! profile that vanishes on the true boundary. Without a descriptor `θ = 1`
//! and the energy coincides with [`crate::rearrange::dirichlet_energy`].

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::Grid;
use crate::nonlinearity::{Nonlinearity, SourceTerm};
use crate::rearrange::GridFunction;
use crate::scalar::Real;
use crate::sum::Compensated;

const NONE: u32 = u32::MAX;

/// Smallest admissible cut fraction; closer cuts are moved to this distance.
pub const MIN_CUT_FRACTION: f64 = 0.05;

#[derive(Clone, Copy, Debug)]
pub(crate) struct BoundaryEdge<T> {
    pub node: u32,
    pub theta: T,
}

#[derive(Clone, Debug)]
pub struct Discretization<T> {
    grid: Arc<Grid<T>>,
    p: T,
    /// Lattice index of each unknown.
    nodes: Vec<usize>,
    /// Unknown index of each lattice node, `NONE` off the mask.
    local: Vec<u32>,
    /// Edges between inside nodes, `(lower, upper)` along their axis.
    edges: Vec<(u32, u32)>,
    boundary: Vec<BoundaryEdge<T>>,
    /// `θ^{1−p}` per boundary edge.
    boundary_weight: Vec<T>,
    /// Regularization of `|t|^{p−2}` for `p < 2`.
    eps_reg: T,
}

impl<T: Real> Discretization<T> {
    pub fn new(grid: Arc<Grid<T>>, p: T) -> Result<Self> {
        if !(p > T::one() && p.is_finite()) {
            return Err(Error::Precondition(format!("p must exceed 1, got {p}")));
        }
        let lat = grid.lattice();
        let mut local = vec![NONE; grid.len()];
        let mut nodes = Vec::with_capacity(grid.inside_count());
        for i in 0..grid.len() {
            if grid.is_inside(i) {
                local[i] = nodes.len() as u32;
                nodes.push(i);
            }
        }
        let mut edges = Vec::new();
        let mut boundary = Vec::new();
        let min_theta = T::lit(MIN_CUT_FRACTION);
        for (k, &i) in nodes.iter().enumerate() {
            for axis in 0..lat.dim() {
                for forward in [false, true] {
                    match lat.neighbor(i, axis, forward) {
                        Some(j) if grid.is_inside(j) => {
                            if forward {
                                edges.push((k as u32, local[j]));
                            }
                        }
                        other => {
                            let theta = match (grid.descriptor(), other) {
                                (Some(d), Some(j)) if lat.dim() == 2 => {
                                    d.cut_fraction(lat.point(i), lat.point(j)).max(min_theta)
                                }
                                _ => T::one(),
                            };
                            boundary.push(BoundaryEdge { node: k as u32, theta });
                        }
                    }
                }
            }
        }
        let boundary_weight = boundary.iter().map(|b| b.theta.powf(T::one() - p)).collect();
        Ok(Self { grid, p, nodes, local, edges, boundary, boundary_weight, eps_reg: T::lit(1e-10) })
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }

    pub fn p(&self) -> T {
        self.p
    }

    pub fn unknowns(&self) -> usize {
        self.nodes.len()
    }

    pub fn h(&self) -> T {
        self.grid.h()
    }

    /// `hᴺ`.
    pub fn volume(&self) -> T {
        self.grid.lattice().cell_volume()
    }

    pub fn set_eps_reg(&mut self, eps: T) {
        self.eps_reg = eps;
    }

    pub fn eps_reg(&self) -> T {
        self.eps_reg
    }

    pub(crate) fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub(crate) fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub(crate) fn boundary(&self) -> &[BoundaryEdge<T>] {
        &self.boundary
    }

    pub(crate) fn boundary_weights(&self) -> &[T] {
        &self.boundary_weight
    }

    /// Unknown index of lattice node `i`.
    pub fn local_index(&self, i: usize) -> Option<usize> {
        let k = self.local[i];
        (k != NONE).then_some(k as usize)
    }

    /// Values at the inside nodes.
    pub fn restrict(&self, v: &GridFunction<T>) -> Result<Vec<T>> {
        if v.grid().lattice() != self.grid.lattice() {
            return Err(Error::ShapeMismatch("function and operator lattices differ".into()));
        }
        Ok(self.nodes.iter().map(|&i| v.values()[i]).collect())
    }

    /// Grid function with the given inside values and zeros elsewhere.
    pub fn extend(&self, x: &[T]) -> GridFunction<T> {
        let mut values = vec![T::zero(); self.grid.len()];
        for (&i, &v) in self.nodes.iter().zip(x) {
            values[i] = v;
        }
        GridFunction::from_window_values(self.grid.clone(), values).expect("finite values")
    }

    #[inline]
    fn pow_p(&self, t: T) -> T {
        if self.p == T::lit(2.0) {
            t * t
        } else {
            t.abs().powf(self.p)
        }
    }

    /// `|t|^{p−2} t`, regularized near 0 for `p < 2`.
    #[inline]
    pub(crate) fn flux(&self, t: T) -> T {
        let two = T::lit(2.0);
        if self.p == two {
            t
        } else if t == T::zero() {
            T::zero()
        } else if self.p < two {
            (t * t + self.eps_reg * self.eps_reg).powf((self.p - two) / two) * t
        } else {
            t.abs().powf(self.p - two) * t
        }
    }

    /// The cut-weighted Dirichlet energy `D(u)`.
    pub fn dirichlet(&self, x: &[T]) -> T {
        let h = self.h();
        let mut s = Compensated::new();
        for &(a, b) in &self.edges {
            s.add(self.pow_p((x[b as usize] - x[a as usize]) / h));
        }
        for (e, &w) in self.boundary.iter().zip(&self.boundary_weight) {
            s.add(w * self.pow_p(x[e.node as usize] / h));
        }
        s.value() * self.volume()
    }

    /// `−Δ_p u` on the inside nodes, i.e. `∇D(u) / (p hᴺ)`.
    pub fn p_laplacian(&self, x: &[T]) -> Vec<T> {
        let h = self.h();
        let mut out = vec![T::zero(); x.len()];
        for &(a, b) in &self.edges {
            let g = self.flux((x[b as usize] - x[a as usize]) / h) / h;
            out[a as usize] = out[a as usize] - g;
            out[b as usize] = out[b as usize] + g;
        }
        for (e, &w) in self.boundary.iter().zip(&self.boundary_weight) {
            let k = e.node as usize;
            out[k] = out[k] + w * self.flux(x[k] / h) / h;
        }
        out
    }

    /// `hᴺ Σ |u|ʳ`.
    pub fn lp_mass(&self, x: &[T], r: T) -> T {
        let mut s = Compensated::new();
        for &v in x {
            if v != T::zero() {
                s.add(v.abs().powf(r));
            }
        }
        s.value() * self.volume()
    }

    /// `hᴺ Σ aᵢbᵢ`.
    pub fn inner(&self, a: &[T], b: &[T]) -> T {
        let mut s = Compensated::new();
        for (&x, &y) in a.iter().zip(b) {
            s.add(x * y);
        }
        s.value() * self.volume()
    }

    pub fn energy(&self, x: &[T], nl: &Nonlinearity<T>) -> T {
        let mut s = Compensated::new();
        for &v in x {
            if v != T::zero() {
                s.add(nl.primitive(v));
            }
        }
        self.dirichlet(x) / self.p - s.value() * self.volume()
    }

    /// `−Δ_p u − f(u)`: the energy gradient divided by `hᴺ`.
    pub fn residual(&self, x: &[T], nl: &Nonlinearity<T>) -> Vec<T> {
        let mut r = self.p_laplacian(x);
        for (ri, &v) in r.iter_mut().zip(x) {
            *ri = *ri - nl.f(v);
        }
        r
    }

    /// The plain `H¹` metric: `(1/h²)` times the 5-point Laplacian with
    /// boundary edges weighted by `1/θ`.
    pub fn metric_apply(&self, x: &[T], out: &mut [T]) {
        Metric::plain(self).apply(self, x, out);
    }
}

/// A weighted graph Laplacian on the unknowns, used as the inner product
/// of descent directions.
#[derive(Clone, Debug)]
pub(crate) struct Metric<T> {
    /// Coefficient of each interior edge, in units of `1/h²`.
    edge: Vec<T>,
    /// Coefficient of each boundary edge, in units of `1/h²`.
    boundary: Vec<T>,
    /// `c̄^{−1/2}` per unknown, `c̄` the mean coefficient relative to the
    /// plain metric; `None` when all coefficients are plain.
    scale: Option<Vec<T>>,
}

impl<T: Real> Metric<T> {
    pub fn plain(op: &Discretization<T>) -> Self {
        Self {
            edge: vec![T::one(); op.edges.len()],
            boundary: op.boundary.iter().map(|b| T::one() / b.theta).collect(),
            scale: None,
        }
    }

    /// The second variation of `D/p` at `x` with every edge slope floored
    /// at `floor · max slope`: edge coefficients `(p−1) max(|Δu/h|, δ)^{p−2}`.
    /// For `p = 2` this is the plain metric.
    pub fn lagged(op: &Discretization<T>, x: &[T], floor: T) -> Self {
        let p = op.p;
        if p == T::lit(2.0) {
            return Self::plain(op);
        }
        let h = op.h();
        let slopes: Vec<T> = op.edges.iter().map(|&(a, b)| ((x[b as usize] - x[a as usize]) / h).abs()).collect();
        let bslopes: Vec<T> = op.boundary.iter().map(|e| (x[e.node as usize] / h).abs()).collect();
        let max = slopes.iter().chain(&bslopes).fold(T::zero(), |m, &v| m.max(v));
        if max == T::zero() {
            return Self::plain(op);
        }
        let delta = floor * max;
        let coef = |g: T| (p - T::one()) * g.max(delta).powf(p - T::lit(2.0));
        let edge: Vec<T> = slopes.iter().map(|&g| coef(g)).collect();
        let brel: Vec<T> = bslopes.iter().map(|&g| coef(g)).collect();
        let boundary = brel.iter().zip(&op.boundary_weight).map(|(&c, &w)| c * w).collect();
        let mut sum = vec![T::zero(); op.nodes.len()];
        let mut cnt = vec![0usize; op.nodes.len()];
        for (&(a, b), &c) in op.edges.iter().zip(&edge) {
            for k in [a as usize, b as usize] {
                sum[k] = sum[k] + c;
                cnt[k] += 1;
            }
        }
        for (e, &c) in op.boundary.iter().zip(&brel) {
            let k = e.node as usize;
            sum[k] = sum[k] + c;
            cnt[k] += 1;
        }
        let scale = sum
            .iter()
            .zip(&cnt)
            .map(|(&s, &c)| (T::from_usize_lossy(c.max(1)) / s).sqrt())
            .collect();
        Self { edge, boundary, scale: Some(scale) }
    }

    pub fn apply(&self, op: &Discretization<T>, x: &[T], out: &mut [T]) {
        let h2 = op.h() * op.h();
        out.iter_mut().for_each(|o| *o = T::zero());
        for (&(a, b), &c) in op.edges.iter().zip(&self.edge) {
            let d = c * (x[a as usize] - x[b as usize]) / h2;
            out[a as usize] = out[a as usize] + d;
            out[b as usize] = out[b as usize] - d;
        }
        for (e, &c) in op.boundary.iter().zip(&self.boundary) {
            let k = e.node as usize;
            out[k] = out[k] + c * x[k] / h2;
        }
    }

    pub fn scale(&self) -> Option<&[T]> {
        self.scale.as_deref()
    }
}
