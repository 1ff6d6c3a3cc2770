//! Solvers for two-player bargaining problems over convex feasible sets:
//! closed-form axiomatic solutions, a harmonic-measure solution computed by
//! finite differences, and a reflected-random-walk estimator for the same
//! quantity, plus tooling to compare them.

pub mod analysis;
pub mod error;
pub mod geometry;
pub mod harmonic;
pub mod io;
pub mod montecarlo;
pub mod solutions;
pub mod payoff;
pub mod rng;

pub use analysis::SolverId;
pub use error::{Error, Result};
pub use geometry::{make_problem, BargainingProblem, ConvexPolygon, ParetoChain, Preset};
pub use harmonic::{GridSpec, HarmonicField, SolveMode};
pub use montecarlo::{StepLaw, WalkConfig, WalkDomain};
pub use payoff::{AffineMap, Payoff};
