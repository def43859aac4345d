//! First and second Dirichlet eigenpairs of the p-Laplacian by descent on
//! the Rayleigh quotient `R(u) = D(u) / ‖u‖ₚᵖ`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::Grid;
use crate::rearrange::{GridFunction, NehariScaling};
use crate::scalar::{signed_pow, Real};
use crate::solver::config::SolverConfig;
use crate::solver::init::{antisymmetric_bump, initial_field, positive_bump};
use crate::solver::config::Initializer;
use crate::solver::nehari::Fibre;
use crate::solver::nodal_solver::{sup, METRIC_FLOOR};
use crate::solver::operator::Discretization;
use crate::solver::operator::Metric;
use crate::solver::poisson::{solve_weighted, BoxPoisson};

#[derive(Clone, Debug)]
pub struct EigenResult<T> {
    pub lambda: T,
    /// Eigenfunction with `‖u‖ₚ = 1`.
    pub u: GridFunction<T>,
    /// Sup-norm of `−Δ_p u − λ|u|^{p−2}u`.
    pub residual: T,
    pub iterations: usize,
    pub converged: bool,
    /// `|Q⁺ − Q⁻|` for the second eigenpair, 0 for the first.
    pub quotient_gap: T,
    /// For the second eigenpair, `(‖u⁺‖ₚ, ‖u⁻‖ₚ)`; `αᵖ + βᵖ = 1`.
    pub scaling: Option<NehariScaling<T>>,
}

/// Outcome of balancing the per-part quotients over `u⁺ + r u⁻`, `r > 0`.
#[derive(Clone, Debug)]
pub struct Equalized<T> {
    /// The ratio `β/α` applied to `u⁻`.
    pub ratio: T,
    /// `⟨−Δ_p w, w±⟩ / ‖w±‖ₚᵖ` at the returned `w`.
    pub quotients: (T, T),
    pub w: GridFunction<T>,
}

fn quotients<T: Real>(f: &Fibre<T>, r: T, p: T) -> (T, T) {
    let (g, _) = f.gradient(T::one(), r);
    let (mp, mm) = f.masses();
    (g[0] / mp, g[1] / (r.powf(p) * mm))
}

/// Ratio `r` with `Q⁺(r) = Q⁻(r)` by bisection in `ln r`; `Q⁺` increases
/// and `Q⁻` decreases in `r`.
///
/// When `u⁺` and `u⁻` are (numerically) decoupled, both quotients are flat
/// in `r`, any root is set by rounding noise, and the residual does not
/// depend on `r` anyway. The parts are then given equal `Lᵖ` norms.
pub(crate) fn equalize<T: Real>(op: &Discretization<T>, x: &[T]) -> Result<(T, T, T)> {
    if !(x.iter().any(|&v| v > T::zero()) && x.iter().any(|&v| v < T::zero())) {
        return Err(Error::NotSignChanging);
    }
    let p = op.p();
    let f = Fibre::new(op, x, p, T::zero());
    let (mp, mm) = f.masses();
    if !(mp > T::zero() && mm > T::zero()) {
        return Err(Error::ZeroMass);
    }
    let gap = |s: T| {
        let (a, b) = quotients(&f, s.exp(), p);
        a - b
    };
    let (mut lo, mut hi) = (-T::one(), T::one());
    let (q1, _) = quotients(&f, T::one(), p);
    if gap(hi) - gap(lo) <= T::lit(1e-9) * q1.abs() {
        let r = (mp / mm).powf(T::one() / p);
        let (a, b) = quotients(&f, r, p);
        return Ok((r, a, b));
    }
    let mut width = T::one();
    for _ in 0..64 {
        if gap(lo) <= T::zero() {
            break;
        }
        width = width * T::lit(2.0);
        lo = lo - width;
    }
    width = T::one();
    for _ in 0..64 {
        if gap(hi) >= T::zero() {
            break;
        }
        width = width * T::lit(2.0);
        hi = hi + width;
    }
    if !(gap(lo) <= T::zero() && gap(hi) >= T::zero()) {
        return Err(Error::Solver("quotient equalization failed to bracket".into()));
    }
    for _ in 0..200 {
        let mid = (lo + hi) * T::lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if gap(mid) < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r = ((lo + hi) * T::lit(0.5)).exp();
    let (a, b) = quotients(&f, r, p);
    Ok((r, a, b))
}

fn scale_negative<T: Real>(x: &[T], r: T) -> Vec<T> {
    x.iter().map(|&v| if v < T::zero() { r * v } else { v }).collect()
}

fn normalize<T: Real>(op: &Discretization<T>, x: &mut [T]) {
    let n = op.lp_mass(x, op.p()).powf(T::one() / op.p());
    x.iter_mut().for_each(|v| *v = *v / n);
}

/// Balances the two per-part quotients of `u` over the family `u⁺ + r u⁻`.
pub fn equalize_quotients<T: Real>(u: &GridFunction<T>, p: T) -> Result<Equalized<T>> {
    if !u.escaped_nodes().is_empty() {
        return Err(Error::Precondition("field is nonzero outside the domain".into()));
    }
    let op = Discretization::new(u.grid().clone(), p)?;
    let x = op.restrict(u)?;
    let (ratio, qp, qm) = equalize(&op, &x)?;
    Ok(Equalized { ratio, quotients: (qp, qm), w: op.extend(&scale_negative(&x, ratio)) })
}

struct Quotient<T> {
    value: T,
    rho: Vec<T>,
}

fn rayleigh<T: Real>(op: &Discretization<T>, x: &[T]) -> Quotient<T> {
    let p = op.p();
    let m = op.lp_mass(x, p);
    let value = op.dirichlet(x) / m;
    let mut rho = op.p_laplacian(x);
    for (r, &v) in rho.iter_mut().zip(x) {
        *r = *r - value * signed_pow(v, p);
    }
    Quotient { value, rho }
}

fn setup<T: Real>(grid: Arc<Grid<T>>, p: T, cfg: &SolverConfig<T>) -> Result<(Discretization<T>, BoxPoisson<T>)> {
    cfg.validate()?;
    let mut op = Discretization::new(grid, p)?;
    op.set_eps_reg(cfg.eps_reg);
    let pre = BoxPoisson::new(&op);
    Ok((op, pre))
}

/// Descent driver shared by both eigenpairs. `retract` maps a trial point
/// to the admissible set and returns its objective value.
fn descend<T: Real>(
    op: &Discretization<T>,
    pre: &BoxPoisson<T>,
    cfg: &SolverConfig<T>,
    start: (Vec<T>, T),
    retract: impl Fn(&[T]) -> Option<(Vec<T>, T)>,
    gap: impl Fn(&[T]) -> T,
) -> (Vec<T>, Quotient<T>, usize, bool) {
    let p = op.p();
    let tol = cfg.residual_tolerance(p);
    let (mut x, mut j) = start;
    let mut q = rayleigh(op, &x);
    let mut t = cfg.initial_step;
    let t_min = cfg.initial_step * T::lit(1e-14);
    let t_max = cfg.initial_step;
    let noise = T::epsilon() * T::lit(256.0);
    let mut d = vec![T::zero(); x.len()];
    let mut trial = vec![T::zero(); x.len()];
    for it in 0..cfg.max_iter {
        let res = sup(&q.rho);
        let scale = T::one().max(q.value);
        if res <= tol * scale && gap(&x) <= T::lit(1e-6) * q.value {
            return (x, q, it, true);
        }
        let metric = Metric::lagged(op, &x, T::lit(METRIC_FLOOR));
        solve_weighted(op, &metric, pre, &q.rho, &mut d, cfg.cg_tol.min(T::lit(1e-8)), 2000);
        d.iter_mut().for_each(|v| *v = -*v);
        let slope = p * op.inner(&q.rho, &d) / op.lp_mass(&x, p);
        let mut first = true;
        let accepted = loop {
            for k in 0..x.len() {
                trial[k] = x[k] + t * d[k];
            }
            if let Some((w, val)) = retract(&trial) {
                if val <= j + T::lit(1e-4) * t * slope {
                    break Some((w, val));
                }
                if val - j <= noise * j {
                    let qw = rayleigh(op, &w);
                    if sup(&qw.rho) < res {
                        break Some((w, val));
                    }
                }
            }
            t = t * cfg.backtrack;
            first = false;
            if t < t_min {
                break None;
            }
        };
        match accepted {
            Some((w, val)) => {
                x = w;
                j = val;
                q = rayleigh(op, &x);
                if first {
                    t = (t * T::lit(2.0)).min(t_max);
                }
            }
            None => return (x, q, it, false),
        }
    }
    let res = sup(&q.rho);
    let ok = res <= tol * T::one().max(q.value) && gap(&x) <= T::lit(1e-6) * q.value;
    (x, q, cfg.max_iter, ok)
}

/// `λ₁` and its positive eigenfunction.
///
/// Each step moves along the `H¹` gradient of the quotient, takes the
/// absolute value and renormalizes in `Lᵖ`. For `p = 2` a unit step is one
/// step of inverse iteration.
pub fn first_eigenpair<T: Real>(grid: Arc<Grid<T>>, p: T, cfg: &SolverConfig<T>) -> Result<EigenResult<T>> {
    let (op, pre) = setup(grid, p, cfg)?;
    let mut x = match &cfg.initializer {
        Initializer::AntisymmetricBump => positive_bump(&op),
        other => initial_field(&op, &pre, other, cfg.seed)?.into_iter().map(|v| v.abs()).collect(),
    };
    if x.iter().all(|&v| v == T::zero()) {
        return Err(Error::ZeroMass);
    }
    normalize(&op, &mut x);
    let r0 = op.dirichlet(&x);
    let retract = |y: &[T]| {
        let mut w: Vec<T> = y.iter().map(|v| v.abs()).collect();
        if w.iter().all(|&v| v == T::zero()) {
            return None;
        }
        normalize(&op, &mut w);
        let r = op.dirichlet(&w);
        Some((w, r))
    };
    let (x, q, iterations, converged) = descend(&op, &pre, cfg, (x, r0), retract, |_| T::zero());
    Ok(EigenResult {
        lambda: q.value,
        residual: sup(&q.rho),
        u: op.extend(&x),
        iterations,
        converged,
        quotient_gap: T::zero(),
        scaling: None,
    })
}

/// `λ₂` and a sign-changing eigenfunction.
///
/// The objective is `J(v) = max R` over `αv⁺ + βv⁻`; the maximum sits where
/// the per-part quotients agree, found by [`equalize_quotients`]. Each step
/// is a gradient step on `R` at the balanced point followed by a fresh
/// balance, accepted when `J` decreases.
pub fn second_eigenpair<T: Real>(grid: Arc<Grid<T>>, p: T, cfg: &SolverConfig<T>) -> Result<EigenResult<T>> {
    let (op, pre) = setup(grid, p, cfg)?;
    let x0 = match &cfg.initializer {
        Initializer::AntisymmetricBump => antisymmetric_bump(&op),
        other => initial_field(&op, &pre, other, cfg.seed)?,
    };
    let balance = |y: &[T]| -> Option<(Vec<T>, T)> {
        let (r, qp, qm) = equalize(&op, y).ok()?;
        let mut w = scale_negative(y, r);
        normalize(&op, &mut w);
        Some((w, qp.max(qm)))
    };
    let start = balance(&x0).ok_or(Error::NotSignChanging)?;
    let gap = |y: &[T]| {
        equalize(&op, y).map_or(T::infinity(), |(_, a, b)| (a - b).abs())
    };
    let (x, q, iterations, converged) = descend(&op, &pre, cfg, start, balance, gap);
    let quotient_gap = gap(&x);
    let pos: Vec<T> = x.iter().map(|&v| v.max(T::zero())).collect();
    let neg: Vec<T> = x.iter().map(|&v| v.min(T::zero())).collect();
    let inv = T::one() / p;
    let scaling = NehariScaling::new(op.lp_mass(&pos, p).powf(inv), op.lp_mass(&neg, p).powf(inv))?;
    Ok(EigenResult {
        lambda: q.value,
        residual: sup(&q.rho),
        u: op.extend(&x),
        iterations,
        converged,
        quotient_gap,
        scaling: Some(scaling),
    })
}
