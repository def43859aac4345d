//! Domains, lattices, reflections and polarization of node sets.

pub mod domain;
pub mod grid;
pub mod io;
pub mod polarization;
pub mod steiner;

pub use domain::{DomainDescriptor, Membership, Point, Shape};
pub use grid::{connected_components, Grid, Lattice};
pub use io::{read_mask, write_mask};
pub use polarization::{monotonicity_check, polarize_set, reflect, PolarizationPlane, Side, Variant};
pub use steiner::{is_steiner_symmetric, polarization_witness, steiner_by_rows, SteinerReport, SteinerWitness};
