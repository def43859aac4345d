use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::Grid;
use crate::scalar::Real;

/// Nodal values on every node of a grid's lattice window.
///
/// Functions built with [`GridFunction::new`] vanish off the inside mask
/// (Dirichlet condition). Polarization may move values to window nodes
/// outside the mask; [`GridFunction::escaped_nodes`] lists them.
#[derive(Clone, Debug)]
pub struct GridFunction<T> {
    grid: Arc<Grid<T>>,
    values: Vec<T>,
}

impl<T: Real> PartialEq for GridFunction<T> {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.grid, &other.grid) || self.grid.lattice() == other.grid.lattice())
            && self.values == other.values
    }
}

impl<T: Real> GridFunction<T> {
    /// Takes one value per lattice node; values off the inside mask are
    /// replaced by 0.
    pub fn new(grid: Arc<Grid<T>>, mut values: Vec<T>) -> Result<Self> {
        check_values(&grid, &values)?;
        for (v, &inside) in values.iter_mut().zip(grid.mask()) {
            if !inside {
                *v = T::zero();
            }
        }
        Ok(Self { grid, values })
    }

    /// Takes values as given, including nonzero values off the mask.
    pub fn from_window_values(grid: Arc<Grid<T>>, values: Vec<T>) -> Result<Self> {
        check_values(&grid, &values)?;
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<Grid<T>>) -> Self {
        let values = vec![T::zero(); grid.len()];
        Self { grid, values }
    }

    /// Samples `f` at the inside nodes.
    pub fn from_fn(grid: Arc<Grid<T>>, f: impl Fn([T; 2]) -> T) -> Result<Self> {
        let lat = grid.lattice();
        let values = (0..grid.len())
            .map(|i| if grid.is_inside(i) { f(lat.point(i)) } else { T::zero() })
            .collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Same grid, new values (taken as given).
    pub fn with_values(&self, values: Vec<T>) -> Result<Self> {
        Self::from_window_values(self.grid.clone(), values)
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self { grid: self.grid.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|v| v * s)
    }

    /// `self + t·other`.
    pub fn axpy(&self, t: T, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| a + t * b).collect();
        Ok(Self { grid: self.grid.clone(), values })
    }

    /// Nodes carrying a nonzero value.
    pub fn support(&self) -> Vec<bool> {
        self.values.iter().map(|&v| v != T::zero()).collect()
    }

    /// Nodes off the inside mask carrying a nonzero value.
    pub fn escaped_nodes(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.grid.is_inside(i) && self.values[i] != T::zero()).collect()
    }

    pub fn sup_norm(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn has_positive(&self) -> bool {
        self.values.iter().any(|&v| v > T::zero())
    }

    pub fn has_negative(&self) -> bool {
        self.values.iter().any(|&v| v < T::zero())
    }

    pub fn is_sign_changing(&self) -> bool {
        self.has_positive() && self.has_negative()
    }

    pub(crate) fn check_same_grid(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || self.grid.lattice() == other.grid.lattice() {
            Ok(())
        } else {
            Err(Error::ShapeMismatch("grid functions live on different lattices".into()))
        }
    }
}

fn check_values<T: Real>(grid: &Grid<T>, values: &[T]) -> Result<()> {
    if values.len() != grid.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} values for a lattice of {} nodes",
            values.len(),
            grid.len()
        )));
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Precondition(format!("non-finite value at node {i}")));
    }
    Ok(())
}

/// `v⁺ = max(v, 0)`.
pub fn positive_part<T: Real>(v: &GridFunction<T>) -> GridFunction<T> {
    v.map(|x| x.max(T::zero()))
}

/// `v⁻ = min(v, 0)`.
pub fn negative_part<T: Real>(v: &GridFunction<T>) -> GridFunction<T> {
    v.map(|x| x.min(T::zero()))
}

/// Scales of the positive and negative parts in `αv⁺ + βv⁻`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NehariScaling<T> {
    pub alpha: T,
    pub beta: T,
}

impl<T: Real> NehariScaling<T> {
    pub fn new(alpha: T, beta: T) -> Result<Self> {
        if alpha == T::zero() || beta == T::zero() || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::Precondition(format!(
                "scalings must be finite and nonzero, got ({alpha}, {beta})"
            )));
        }
        Ok(Self { alpha, beta })
    }

    pub fn identity() -> Self {
        Self { alpha: T::one(), beta: T::one() }
    }

    /// `|α|ᵖ + |β|ᵖ`, equal to 1 for the resonant normalization.
    pub fn p_mass(&self, p: T) -> T {
        self.alpha.abs().powf(p) + self.beta.abs().powf(p)
    }

    /// `αv⁺ + βv⁻`.
    pub fn apply(&self, v: &GridFunction<T>) -> GridFunction<T> {
        v.map(|x| if x > T::zero() { self.alpha * x } else { self.beta * x })
    }
}
