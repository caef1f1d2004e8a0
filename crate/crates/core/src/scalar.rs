//! Floating-point scalar abstraction shared by every solver component.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssignOps, ToPrimitive};

/// Real scalar the solver is generic over: `f32` or `f64`.
///
/// Besides the arithmetic bounds, each implementation pins the tolerances
/// that make feasibility and optimality checks assertable at its precision.
pub trait Real:
    Float + NumAssignOps + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Absolute tolerance on total mass and marginal agreement.
    fn mass_tol() -> Self;

    /// Relative optimality tolerance; the effective threshold for a problem
    /// is `rel_tol * (1 + |c|_inf)`.
    fn rel_tol() -> Self;

    /// Magnitude below which a pivot element or a basic value is treated as
    /// exactly zero.
    fn zero_tol() -> Self;

    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).unwrap_or_else(Self::nan)
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn mass_tol() -> Self {
        1e-9
    }
    fn rel_tol() -> Self {
        1e-9
    }
    fn zero_tol() -> Self {
        1e-13
    }
}

impl Real for f32 {
    fn mass_tol() -> Self {
        1e-5
    }
    fn rel_tol() -> Self {
        1e-4
    }
    fn zero_tol() -> Self {
        1e-6
    }
}

/// The pair of thresholds every check in a solve uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T> {
    /// Feasibility tolerance on masses.
    pub mass: T,
    /// Optimality / slackness / acceptance threshold, already scaled by the cost.
    pub lp: T,
}

impl<T: Real> Tolerances<T> {
    /// Tolerances for a cost with sup-norm `cost_scale`, using the default
    /// relative factor for `T`.
    pub fn for_cost_scale(cost_scale: T) -> Self {
        Self::with_rel(T::rel_tol(), cost_scale)
    }

    pub fn with_rel(rel: T, cost_scale: T) -> Self {
        Tolerances {
            mass: T::mass_tol(),
            lp: rel * (T::one() + cost_scale.abs()),
        }
    }
}
