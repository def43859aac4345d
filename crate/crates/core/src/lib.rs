//! Least-energy nodal solutions and second eigenfunctions of the Dirichlet
//! p-Laplacian on Steiner-symmetric planar domains, exact two-point
//! rearrangement (polarization) on lattices, and the tools to check that
//! nodal sets reach the boundary.
//!
//! Everything numerical is generic over [`scalar::Real`] (`f32` or `f64`);
//! the `*64` and `*32` aliases below fix the scalar.
//!
//! ```
//! use std::sync::Arc;
//! use nodal_lab::{first_eigenpair, DomainDescriptor, Grid, SolverConfig};
//!
//! let grid = Arc::new(Grid::build(DomainDescriptor::centered_rectangle(1.0, 1.0)?, 1.0 / 16.0)?);
//! let eig = first_eigenpair(grid, 2.0, &SolverConfig::default())?;
//! assert!((eig.lambda - std::f64::consts::PI.powi(2) / 2.0).abs() < 0.05);
//! # Ok::<(), nodal_lab::Error>(())
//! ```

pub mod driver;
pub mod error;
pub mod geometry;
pub mod nodal;
pub mod nonlinearity;
pub mod rearrange;
pub mod scalar;
pub mod solver;
pub mod sum;

pub use error::{Error, Result};
pub use geometry::{DomainDescriptor, Grid, Lattice, PolarizationPlane};
pub use nodal::NodalDecomposition;
pub use nonlinearity::Nonlinearity;
pub use rearrange::{GridFunction, NehariScaling};
pub use scalar::Real;
pub use solver::{first_eigenpair, second_eigenpair, solve_least_energy_nodal, NodalSolution, SolverConfig};

pub type DomainDescriptor64 = DomainDescriptor<f64>;
pub type DomainDescriptor32 = DomainDescriptor<f32>;
pub type Grid64 = Grid<f64>;
pub type Grid32 = Grid<f32>;
pub type GridFunction64 = GridFunction<f64>;
pub type GridFunction32 = GridFunction<f32>;
pub type Nonlinearity64 = Nonlinearity<f64>;
pub type Nonlinearity32 = Nonlinearity<f32>;
pub type SolverConfig64 = SolverConfig<f64>;
pub type SolverConfig32 = SolverConfig<f32>;
