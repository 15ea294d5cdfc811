use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar used throughout the crate.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Relative slack for tangency and violation tests in the LP solver.
    fn solver_tol() -> Self;

    /// Largest accepted 1-norm condition number of a solver Gram matrix.
    fn max_condition() -> Self;

    /// Relative slack for checks that hold exactly in real arithmetic.
    fn round_off() -> Self {
        Self::epsilon() * Self::lit(64.0)
    }

    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn solver_tol() -> f64 {
        1e-9
    }

    fn max_condition() -> f64 {
        1e12
    }
}

impl Real for f32 {
    fn solver_tol() -> f32 {
        1e-4
    }

    fn max_condition() -> f32 {
        1e6
    }
}
