use crate::error::{Error, Result};
use crate::rearrange::GridFunction;
use crate::scalar::Real;

/// Starting field of a solver run.
#[derive(Clone, Debug, Default)]
pub enum Initializer<T> {
    /// `(x₁ − axis) · dist(x, ∂Ω)`: sign-changing and odd about the axis.
    #[default]
    AntisymmetricBump,
    /// Smoothed uniform noise drawn from the configured seed.
    Random,
    User(GridFunction<T>),
}

impl<T> Initializer<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Self::AntisymmetricBump => "antisymmetric-bump",
            Self::Random => "random",
            Self::User(_) => "user",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolverConfig<T> {
    /// First trial step length along the preconditioned direction.
    pub initial_step: T,
    /// Step reduction factor on rejection, in `(0, 1)`.
    pub backtrack: T,
    /// Residual sup-norm tolerance; `None` selects `1e-6` for `p = 2` and
    /// `1e-4` otherwise.
    pub eps_res: Option<T>,
    /// Relative Nehari defect tolerance.
    pub eps_neh: T,
    pub max_iter: usize,
    pub seed: u64,
    pub initializer: Initializer<T>,
    /// Fresh random starts allowed after a sign part collapses.
    pub max_restarts: usize,
    /// Initial regularization of `|∇u|^{p−2}` for `p < 2`.
    pub eps_reg: T,
    /// Relative tolerance of the inner metric solves.
    pub cg_tol: T,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            initial_step: T::one(),
            backtrack: T::lit(0.5),
            eps_res: None,
            eps_neh: T::lit(1e-8),
            max_iter: 5000,
            seed: 0,
            initializer: Initializer::AntisymmetricBump,
            max_restarts: 3,
            eps_reg: T::lit(1e-10),
            cg_tol: T::lit(1e-3),
        }
    }
}

impl<T: Real> SolverConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: T| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Precondition(format!("solver.{name} must be positive, got {v}")))
            }
        };
        positive("initial_step", self.initial_step)?;
        positive("eps_neh", self.eps_neh)?;
        positive("eps_reg", self.eps_reg)?;
        positive("cg_tol", self.cg_tol)?;
        if let Some(e) = self.eps_res {
            positive("eps_res", e)?;
        }
        if !(self.backtrack > T::zero() && self.backtrack < T::one()) {
            return Err(Error::Precondition(format!(
                "solver.backtrack must lie in (0, 1), got {}",
                self.backtrack
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::Precondition("solver.max_iter must be at least 1".into()));
        }
        Ok(())
    }

    /// Residual tolerance in effect for exponent `p`.
    pub fn residual_tolerance(&self, p: T) -> T {
        self.eps_res
            .unwrap_or_else(|| if p == T::lit(2.0) { T::lit(1e-6) } else { T::lit(1e-4) })
    }
}
