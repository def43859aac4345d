//! Plain-text field format: the lattice header `n1 n2 h ox oy`, then one row
//! of `n1` values per `x₂`-line.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::io::{header, parse_header, parse_num};
use crate::geometry::{Grid, Lattice};
use crate::rearrange::function::GridFunction;
use crate::scalar::Real;

pub fn write_field<T: Real>(v: &GridFunction<T>) -> Result<String> {
    let lat = v.grid().lattice();
    let mut out = header(lat)?;
    out.push('\n');
    for row in v.values().chunks(lat.shape()[0]) {
        let line: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    Ok(out)
}

pub fn read_field<T: Real>(text: &str) -> Result<(Lattice<T>, Vec<T>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let first = lines.next().ok_or_else(|| Error::Parse("empty field file".into()))?;
    let lattice: Lattice<T> = parse_header(first)?;
    let mut values = Vec::with_capacity(lattice.len());
    for line in lines {
        for tok in line.split_whitespace() {
            values.push(parse_num::<T>(tok)?);
        }
    }
    if values.len() != lattice.len() {
        return Err(Error::Parse(format!(
            "field has {} values, header announces {}",
            values.len(),
            lattice.len()
        )));
    }
    Ok((lattice, values))
}

/// Reads a field onto `grid`, whose lattice must match the file header to
/// within rounding of the origin.
pub fn read_field_on<T: Real>(grid: Arc<Grid<T>>, text: &str) -> Result<GridFunction<T>> {
    let (lat, values) = read_field::<T>(text)?;
    let own = grid.lattice();
    let shape_ok = lat.shape() == own.shape()
        || (own.dim() == 1 && lat.shape() == [own.shape()[0], 1]);
    let tol = own.h() * T::lit(1e-9);
    let geom_ok = (lat.h() - own.h()).abs() <= tol
        && lat.origin().iter().zip(own.origin()).all(|(a, b)| (*a - b).abs() <= tol);
    if !shape_ok || !geom_ok {
        return Err(Error::ShapeMismatch(
            "field header does not match the domain lattice".into(),
        ));
    }
    GridFunction::from_window_values(grid, values)
}
