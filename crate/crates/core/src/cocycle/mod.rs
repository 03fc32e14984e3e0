//! Linear cocycles over shifts and circle rotations.
//!
//! A cocycle is generated by a driving system `T` and a matrix map
//! `x -> A(x)`; `A(x, n) = A(T^{n-1} x) ... A(x)`. Orbits are generated from
//! an explicit seed, products are rescaled every [`RENORM_PERIOD`] steps
//! with the logarithm of the factor kept in a ledger, and every estimate is
//! a deterministic function of the driver, the generator and the seed.

mod driver;
mod lyapunov;
mod spec;
mod splitting;

pub use driver::{generate_orbit, generate_two_sided, DriverKind, DrivingSystem, Orbit, OrbitPoints};
pub use lyapunov::{cohen_gap, lyapunov_estimates, tail_window_max, LyapunovEstimate, OrbitReport};
pub use spec::{CocyclePath, CocycleSpec, FourierCocycle, Generator, ScaledMatrix, RENORM_PERIOD};
pub use splitting::{
    cone_check, equivariance_residual, oseledets_splitting_2d, recurrence_liminf, ConeReport, RecurrenceReport,
    SplittingEstimate, MIN_SPLITTING_GAP,
};
