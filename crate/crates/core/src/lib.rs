//! Line transversals to disjoint balls.
//!
//! * [`geom`]: balls, scenes, projections, disk feasibility and scene generation.
//! * [`sextic`]: the direction-sextic of three balls in `R^3`, its Hessian,
//!   tritangent recovery, pair cones and curve tracing.
//! * [`flexprobe`]: the lifted parametrization behind the flex-freeness of
//!   cone boundaries and its certificates.
//! * [`cone`]: direction cones of ordered families: feasibility, convexity,
//!   geometric permutations and components.
//! * [`polyid`]: exact rational replay of the algebraic identities.

pub mod cone;
pub mod error;
pub mod flexprobe;
pub mod geom;
pub mod poly;
pub mod polyid;
pub mod scenes;
pub mod sextic;

pub use error::{Result, TransversalError};
