//! Least-energy sign-changing solutions: projected preconditioned descent of
//! the energy on the nodal Nehari set.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::Grid;
use crate::nonlinearity::{validate_assumptions, Check, Nonlinearity, Sampling};
use crate::rearrange::GridFunction;
use crate::scalar::Real;
use crate::solver::config::{Initializer, SolverConfig};
use crate::solver::init::{initial_field, random_field};
use crate::solver::nehari::{defects_from_residual, project};
use crate::solver::operator::Discretization;
use crate::solver::operator::Metric;
use crate::solver::poisson::{solve_weighted, BoxPoisson};

/// One row of the diagnostics stream.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterationRecord<T> {
    pub iteration: usize,
    pub energy: T,
    /// Sup-norm of `−Δ_p u − f(u)`.
    pub residual: T,
    /// Larger of the two relative Nehari defects.
    pub nehari_defect: T,
    /// Step length accepted after this record (0 for the last one).
    pub step: T,
    /// Inner CG iterations spent on the search direction (0 for the last
    /// record).
    pub cg_iterations: usize,
}

#[derive(Clone, Debug)]
pub struct NodalSolution<T> {
    pub u: GridFunction<T>,
    pub energy: T,
    pub residual: T,
    /// Relative defects of `u⁺` and `u⁻`.
    pub nehari_defects: (T, T),
    pub iterations: usize,
    pub converged: bool,
    pub restarts: usize,
    pub trace: Vec<IterationRecord<T>>,
}

impl<T: Real> NodalSolution<T> {
    /// Diagnostics as CSV:
    /// `iteration,energy,residual,nehari_defect,step,cg_iterations`.
    pub fn trace_csv(&self) -> String {
        trace_csv(&self.trace)
    }
}

pub fn trace_csv<T: Real>(trace: &[IterationRecord<T>]) -> String {
    let mut out = String::from("iteration,energy,residual,nehari_defect,step,cg_iterations\n");
    for r in trace {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.iteration, r.energy, r.residual, r.nehari_defect, r.step, r.cg_iterations
        );
    }
    out
}

/// Smallest edge slope, relative to the largest, seen by the metric.
pub(crate) const METRIC_FLOOR: f64 = 1e-3;

pub(crate) fn sup<T: Real>(x: &[T]) -> T {
    x.iter().fold(T::zero(), |m, v| m.max(v.abs()))
}

enum Outcome<T> {
    Done(NodalSolution<T>),
    /// The line search could not make progress; the partial result is kept.
    Stalled(NodalSolution<T>),
}

struct Run<'a, T: Real> {
    op: &'a Discretization<T>,
    pre: &'a BoxPoisson<T>,
    nl: &'a Nonlinearity<T>,
    cfg: &'a SolverConfig<T>,
    tol: T,
}

impl<T: Real> Run<'_, T> {
    fn finish(&self, x: &[T], e: T, r: &[T], it: usize, converged: bool, trace: Vec<IterationRecord<T>>) -> NodalSolution<T> {
        NodalSolution {
            u: self.op.extend(x),
            energy: e,
            residual: sup(r),
            nehari_defects: defects_from_residual(self.op, x, r, self.nl),
            iterations: it,
            converged,
            restarts: 0,
            trace,
        }
    }

    fn descend(&self, x0: &[T]) -> Result<Outcome<T>> {
        let (op, nl, cfg) = (self.op, self.nl, self.cfg);
        let (_, mut x) = project(op, x0, nl)?;
        let mut e = op.energy(&x, nl);
        let mut r = op.residual(&x, nl);
        let mut res = sup(&r);
        let mut t = cfg.initial_step;
        let t_max = cfg.initial_step;
        let t_min = cfg.initial_step * T::lit(1e-14);
        let mut trace = Vec::new();
        let mut d = vec![T::zero(); x.len()];
        let mut trial = vec![T::zero(); x.len()];
        let noise = T::epsilon() * T::lit(256.0);
        for it in 0..cfg.max_iter {
            let (gp, gm) = defects_from_residual(op, &x, &r, nl);
            let defect = gp.max(gm);
            trace.push(IterationRecord {
                iteration: it,
                energy: e,
                residual: res,
                nehari_defect: defect,
                step: T::zero(),
                cg_iterations: 0,
            });
            if res < self.tol && defect < cfg.eps_neh {
                return Ok(Outcome::Done(self.finish(&x, e, &r, it, true, trace)));
            }
            let metric = Metric::lagged(op, &x, T::lit(METRIC_FLOOR));
            let stats = solve_weighted(op, &metric, self.pre, &r, &mut d, cfg.cg_tol, 2000);
            d.iter_mut().for_each(|v| *v = -*v);
            let mut slope = op.inner(&r, &d);
            if !stats.converged && !(slope < T::zero()) {
                // An unconverged inner solve need not give descent; fall
                // back to the box-preconditioned gradient.
                self.pre.solve(&r, &mut d);
                d.iter_mut().for_each(|v| *v = -*v);
                slope = op.inner(&r, &d);
            }
            trace.last_mut().expect("pushed above").cg_iterations = stats.iterations;
            let scale = op.dirichlet(&x).abs() + e.abs();
            let mut first = true;
            let accepted = loop {
                for k in 0..x.len() {
                    trial[k] = x[k] + t * d[k];
                }
                if let Ok((_, w)) = project(op, &trial, nl) {
                    let ew = op.energy(&w, nl);
                    if ew <= e + T::lit(1e-4) * t * slope {
                        let rw = op.residual(&w, nl);
                        break Some((w, ew, rw));
                    }
                    if ew - e <= noise * scale {
                        let rw = op.residual(&w, nl);
                        if sup(&rw) < res {
                            break Some((w, ew, rw));
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
                Some((w, ew, rw)) => {
                    trace.last_mut().expect("pushed above").step = t;
                    x = w;
                    e = ew;
                    r = rw;
                    res = sup(&r);
                    if first {
                        t = (t * T::lit(2.0)).min(t_max);
                    }
                }
                None => return Ok(Outcome::Stalled(self.finish(&x, e, &r, it, false, trace))),
            }
        }
        let it = cfg.max_iter;
        let (gp, gm) = defects_from_residual(op, &x, &r, nl);
        let converged = res < self.tol && gp.max(gm) < cfg.eps_neh;
        trace.push(IterationRecord {
            iteration: it,
            energy: e,
            residual: res,
            nehari_defect: gp.max(gm),
            step: T::zero(),
            cg_iterations: 0,
        });
        Ok(Outcome::Done(self.finish(&x, e, &r, it, converged, trace)))
    }
}

fn check_nonlinearity<T: Real>(nl: &Nonlinearity<T>) -> Result<()> {
    if nl.is_resonant() {
        return Err(Error::InvalidNonlinearity(
            "the least-energy nodal solver needs the power family; use second_eigenpair for the resonant case".into(),
        ));
    }
    // The small-s condition holds for every power with q > p (the limit is
    // 0), so λ₁ is not needed here.
    let report = validate_assumptions(nl, &Sampling::standard(T::one()))?;
    for check in [&report.subcritical, &report.monotonicity, &report.superquadratic] {
        if let Check::Fail(why) = check {
            return Err(Error::InvalidNonlinearity(why.clone()));
        }
    }
    Ok(())
}

/// Minimizes the energy over the nodal Nehari set.
///
/// Each iteration takes the `H¹` gradient direction, tries a step, projects
/// the trial point back onto the Nehari set and accepts it under an Armijo
/// test on the energy. A run whose line search stalls is restarted from a
/// fresh random field with a smaller regularization, at most
/// `cfg.max_restarts` times. Hitting `cfg.max_iter` returns the partial
/// result with `converged = false`.
pub fn solve_least_energy_nodal<T: Real>(
    grid: Arc<Grid<T>>,
    nl: &Nonlinearity<T>,
    cfg: &SolverConfig<T>,
) -> Result<NodalSolution<T>> {
    cfg.validate()?;
    check_nonlinearity(nl)?;
    let mut op = Discretization::new(grid, nl.p())?;
    op.set_eps_reg(cfg.eps_reg);
    let pre = BoxPoisson::new(&op);
    let tol = cfg.residual_tolerance(nl.p());
    let mut x0 = initial_field(&op, &pre, &cfg.initializer, cfg.seed)?;
    let mut restarts = 0;
    let mut last_err = None;
    loop {
        let run = Run { op: &op, pre: &pre, nl, cfg, tol };
        let outcome = run.descend(&x0);
        let partial = match outcome {
            Ok(Outcome::Done(mut s)) => {
                s.restarts = restarts;
                return Ok(s);
            }
            Ok(Outcome::Stalled(s)) => Some(s),
            Err(e @ (Error::NotSignChanging | Error::ZeroMass | Error::Solver(_))) => {
                last_err = Some(e);
                None
            }
            Err(e) => return Err(e),
        };
        if restarts >= cfg.max_restarts {
            return match partial {
                Some(mut s) => {
                    s.restarts = restarts;
                    Ok(s)
                }
                None => Err(last_err.unwrap_or(Error::NotSignChanging)),
            };
        }
        restarts += 1;
        op.set_eps_reg(op.eps_reg() / T::lit(10.0));
        let seed = cfg.seed.wrapping_add(restarts as u64);
        x0 = random_field(&op, &pre, seed);
        if matches!(cfg.initializer, Initializer::User(_)) && partial.is_none() {
            // A user field that cannot be projected is a caller error.
            return Err(last_err.unwrap_or(Error::NotSignChanging));
        }
    }
}
