//! Scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar the lattice, energies and solvers are generic over.
///
/// Implemented for `f32` and `f64`. Polarization of raw values needs much
/// less (see [`crate::rearrange::polarize_values`]) and works for any
/// totally ordered `Copy` type with a zero.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + rustfft::FftNum
    + Default
    + Debug
    + Display
    + FromStr
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Every value used by the crate is representable.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// |t|^{p-2} t, taking the value 0 at t = 0 for every p > 1.
#[inline]
pub fn signed_pow<T: Real>(t: T, p: T) -> T {
    if t == T::zero() {
        T::zero()
    } else {
        t.abs().powf(p - T::one()) * t.signum()
    }
}
