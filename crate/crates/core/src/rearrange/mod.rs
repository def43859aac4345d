//! Grid functions, their polarization, and the quantities polarization
//! preserves.

pub mod field_io;
pub mod function;
pub mod integrals;
pub mod polarize;

pub use field_io::{read_field, read_field_on, write_field};
pub use function::{negative_part, positive_part, GridFunction, NehariScaling};
pub use integrals::{dirichlet_energy, pointwise_integral};
pub use polarize::{
    plus_minus_commutation_check, polarize_function, polarize_values, support_decomposition_check,
};
