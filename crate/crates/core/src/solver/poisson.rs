//! Fast Dirichlet Poisson solves on a box and preconditioned CG for the
//! `H¹` metric on general masks.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::scalar::Real;
use crate::solver::operator::{Discretization, Metric};

/// Inverse of the 5-point Dirichlet Laplacian on an axis-aligned box of
/// lattice nodes, diagonalised by the type-I discrete sine transform.
pub(crate) struct BoxPoisson<T: Real> {
    /// Box size along each axis.
    dims: Vec<usize>,
    /// Eigenvalues of the 1-D second difference along each axis.
    eig: Vec<Vec<T>>,
    fft: Vec<Arc<dyn Fft<T>>>,
    /// Lattice index → box offset for every unknown.
    offsets: Vec<usize>,
}

impl<T: Real> BoxPoisson<T> {
    /// Box spanning the inside nodes of `op`.
    pub fn new(op: &Discretization<T>) -> Self {
        let lat = op.grid().lattice();
        let dim = lat.dim();
        let mut lo = vec![usize::MAX; dim];
        let mut hi = vec![0; dim];
        for &i in op.nodes() {
            for axis in 0..dim {
                let j = lat.index_along(i, axis);
                lo[axis] = lo[axis].min(j);
                hi[axis] = hi[axis].max(j);
            }
        }
        let dims: Vec<usize> = (0..dim).map(|a| hi[a] - lo[a] + 1).collect();
        let h2 = op.h() * op.h();
        let mut planner = FftPlanner::new();
        let mut eig = Vec::with_capacity(dim);
        let mut fft = Vec::with_capacity(dim);
        for &n in &dims {
            let n1 = T::from_usize_lossy(n + 1);
            eig.push(
                (1..=n)
                    .map(|k| {
                        let c = (T::PI() * T::from_usize_lossy(k) / n1).cos();
                        (T::lit(2.0) - T::lit(2.0) * c) / h2
                    })
                    .collect(),
            );
            fft.push(planner.plan_fft_forward(2 * (n + 1)));
        }
        let offsets = op
            .nodes()
            .iter()
            .map(|&i| {
                let mut off = 0;
                let mut stride = 1;
                for axis in 0..dim {
                    off += (lat.index_along(i, axis) - lo[axis]) * stride;
                    stride *= dims[axis];
                }
                off
            })
            .collect();
        Self { dims, eig, fft, offsets }
    }

    /// Unnormalised DST-I along `axis` of the box array `data`.
    fn transform(&self, data: &mut [T], axis: usize, buf: &mut Vec<Complex<T>>) {
        let n = self.dims[axis];
        let m = 2 * (n + 1);
        let stride: usize = self.dims[..axis].iter().product();
        let count = data.len() / n;
        buf.resize(m, Complex::new(T::zero(), T::zero()));
        let mut line = vec![T::zero(); n];
        for l in 0..count {
            let base = (l / stride) * stride * n + (l % stride);
            for (j, v) in line.iter_mut().enumerate() {
                *v = data[base + j * stride];
            }
            dst1(&mut line, &*self.fft[axis], buf);
            for (j, v) in line.iter().enumerate() {
                data[base + j * stride] = *v;
            }
        }
    }

    /// Solves `L z = r` on the box with zero Dirichlet data; `r` and `z` are
    /// indexed by unknown.
    pub fn solve(&self, r: &[T], z: &mut [T]) {
        let total: usize = self.dims.iter().product();
        let mut data = vec![T::zero(); total];
        for (&off, &v) in self.offsets.iter().zip(r) {
            data[off] = v;
        }
        let mut buf = Vec::new();
        for axis in 0..self.dims.len() {
            self.transform(&mut data, axis, &mut buf);
        }
        for (idx, v) in data.iter_mut().enumerate() {
            let mut rem = idx;
            let mut lam = T::zero();
            for axis in 0..self.dims.len() {
                lam = lam + self.eig[axis][rem % self.dims[axis]];
                rem /= self.dims[axis];
            }
            *v = *v / lam;
        }
        for axis in 0..self.dims.len() {
            self.transform(&mut data, axis, &mut buf);
        }
        let scale = self
            .dims
            .iter()
            .fold(T::one(), |s, &n| s * T::lit(2.0) / T::from_usize_lossy(n + 1));
        for (&off, zi) in self.offsets.iter().zip(z.iter_mut()) {
            *zi = data[off] * scale;
        }
    }
}

/// `X_k = Σⱼ xⱼ sin(π j k / (n + 1))`, `j, k = 1..n`, via a complex FFT of
/// the odd extension.
fn dst1<T: Real>(x: &mut [T], fft: &dyn Fft<T>, buf: &mut [Complex<T>]) {
    let n = x.len();
    let zero = Complex::new(T::zero(), T::zero());
    buf[0] = zero;
    buf[n + 1] = zero;
    for j in 0..n {
        buf[j + 1] = Complex::new(x[j], T::zero());
        buf[2 * n + 1 - j] = Complex::new(-x[j], T::zero());
    }
    fft.process(buf);
    let half = T::lit(0.5);
    for k in 0..n {
        x[k] = -buf[k + 1].im * half;
    }
}

/// Outcome of a conjugate-gradient solve.
#[derive(Clone, Copy, Debug)]
pub(crate) struct CgStats {
    pub iterations: usize,
    pub converged: bool,
}

/// Preconditioned CG for `A x = b` with `A` the plain metric of `op`,
/// starting from `x = 0`. Stops at relative residual `tol`.
pub(crate) fn solve_metric<T: Real>(
    op: &Discretization<T>,
    pre: &BoxPoisson<T>,
    b: &[T],
    x: &mut [T],
    tol: T,
    max_iter: usize,
) -> CgStats {
    solve_weighted(op, &Metric::plain(op), pre, b, x, tol, max_iter)
}

/// PCG for a weighted metric, preconditioned by the box solve sandwiched
/// between the metric's diagonal scalings.
pub(crate) fn solve_weighted<T: Real>(
    op: &Discretization<T>,
    metric: &Metric<T>,
    pre: &BoxPoisson<T>,
    b: &[T],
    x: &mut [T],
    tol: T,
    max_iter: usize,
) -> CgStats {
    let n = b.len();
    let dot = |u: &[T], v: &[T]| u.iter().zip(v).fold(T::zero(), |s, (&a, &c)| s + a * c);
    x.iter_mut().for_each(|v| *v = T::zero());
    let bnorm = dot(b, b).sqrt();
    if bnorm == T::zero() {
        return CgStats { iterations: 0, converged: true };
    }
    let mut r = b.to_vec();
    let mut z = vec![T::zero(); n];
    let mut tmp = vec![T::zero(); n];
    let precondition = |r: &[T], z: &mut [T], tmp: &mut [T]| match metric.scale() {
        None => pre.solve(r, z),
        Some(s) => {
            for k in 0..n {
                tmp[k] = r[k] * s[k];
            }
            pre.solve(tmp, z);
            for k in 0..n {
                z[k] = z[k] * s[k];
            }
        }
    };
    precondition(&r, &mut z, &mut tmp);
    let mut d = z.clone();
    let mut rz = dot(&r, &z);
    let mut ad = vec![T::zero(); n];
    for it in 1..=max_iter {
        metric.apply(op, &d, &mut ad);
        let dad = dot(&d, &ad);
        if !(dad > T::zero()) {
            return CgStats { iterations: it, converged: false };
        }
        let alpha = rz / dad;
        for k in 0..n {
            x[k] = x[k] + alpha * d[k];
            r[k] = r[k] - alpha * ad[k];
        }
        if dot(&r, &r).sqrt() <= tol * bnorm {
            return CgStats { iterations: it, converged: true };
        }
        precondition(&r, &mut z, &mut tmp);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            d[k] = z[k] + beta * d[k];
        }
    }
    CgStats { iterations: max_iter, converged: false }
}
