//! Epsilon-net sampling for probabilistic roadmaps.
//!
//! The crate is organised around the pieces of a sample-complexity study of
//! PRM in the unit cube `[0,1]^d`:
//!
//! * [`geometry`]: points, norms, typed obstacles and their membership and
//!   segment predicates, unit-ball volumes.
//! * [`sampling`]: greedy Build-Net, Sukharev grids, epsilon-net sampling
//!   (ENS) and periodic templates.
//! * [`bounds`]: closed-form necessary/sufficient sample sizes and radii, net
//!   cardinality bounds and the sample-complexity table.
//! * [`prm`]: roadmap construction, shortest paths, completeness checks, the
//!   waypoint stretch oracle and adversarial environments.
//! * [`coverage`]: Monte Carlo uncovered-volume estimates, dispersion and the
//!   template-size table.
//!
//! Randomised routines take an explicit `u64` seed and are bit-for-bit
//! reproducible regardless of the rayon thread count.

pub mod bounds;
pub mod coverage;
mod error;
pub mod geometry;
pub mod prm;
mod rng;
pub mod sampling;
pub mod spatial;

pub use error::{Error, Result};
pub use geometry::{Environment, Norm, Obstacle, Point, Segment};
pub use sampling::{Eps, SampleSet};

/// Default tolerance for membership and collision predicates.
pub const DEFAULT_TOL: f64 = 1e-9;
