//! Discrete energy, Nehari projection, the least-energy nodal solver and
//! the first two eigenpairs.

mod config;
mod eigen;
mod init;
mod nehari;
mod nodal_solver;
mod operator;
mod poisson;

use crate::error::{Error, Result};
use crate::nonlinearity::Nonlinearity;
use crate::rearrange::{GridFunction, NehariScaling};
use crate::scalar::Real;

pub use config::{Initializer, SolverConfig};
pub use eigen::{equalize_quotients, first_eigenpair, second_eigenpair, EigenResult, Equalized};
pub use nehari::{closed_form_scaling, nehari_defects, project};
pub use nodal_solver::{solve_least_energy_nodal, trace_csv, IterationRecord, NodalSolution};
pub use operator::{Discretization, MIN_CUT_FRACTION};

fn discretize<T: Real>(u: &GridFunction<T>, p: T) -> Result<(Discretization<T>, Vec<T>)> {
    if let Some(&node) = u.escaped_nodes().first() {
        return Err(Error::Precondition(format!("field is nonzero at node {node} outside the domain")));
    }
    let op = Discretization::new(u.grid().clone(), p)?;
    let x = op.restrict(u)?;
    Ok((op, x))
}

/// `E[u] = D(u)/p − ∫F(u)` with the solver's Dirichlet energy.
pub fn energy<T: Real>(u: &GridFunction<T>, nl: &Nonlinearity<T>) -> Result<T> {
    let (op, x) = discretize(u, nl.p())?;
    Ok(op.energy(&x, nl))
}

/// Node-wise `−Δ_p u − f(u)`, the energy gradient divided by `hᴺ`.
pub fn residual<T: Real>(u: &GridFunction<T>, nl: &Nonlinearity<T>) -> Result<GridFunction<T>> {
    let (op, x) = discretize(u, nl.p())?;
    Ok(op.extend(&op.residual(&x, nl)))
}

/// Projects a sign-changing `u` onto the nodal Nehari set.
pub fn nehari_project<T: Real>(
    u: &GridFunction<T>,
    nl: &Nonlinearity<T>,
) -> Result<(NehariScaling<T>, GridFunction<T>)> {
    let (op, x) = discretize(u, nl.p())?;
    let (s, w) = project(&op, &x, nl)?;
    Ok((s, op.extend(&w)))
}

/// The decoupled per-part scaling `α = (D(u⁺) / (C ∫|u⁺|^q))^{1/(q−p)}`.
pub fn nehari_closed_form<T: Real>(u: &GridFunction<T>, nl: &Nonlinearity<T>) -> Result<NehariScaling<T>> {
    let (op, x) = discretize(u, nl.p())?;
    closed_form_scaling(&op, &x, nl)
}

/// Relative Nehari defects `⟨E′(u), u±⟩ / ∫u± f(u±)`.
pub fn nehari_defect<T: Real>(u: &GridFunction<T>, nl: &Nonlinearity<T>) -> Result<(T, T)> {
    let (op, x) = discretize(u, nl.p())?;
    Ok(nehari_defects(&op, &x, nl))
}
