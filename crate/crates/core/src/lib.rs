//! Finite-difference laboratory for the convexity of superlevel sets of
//! solutions to semilinear elliptic problems in the plane.
//!
//! The crate builds two families of counterexamples to quasiconcavity:
//!
//! * elongated stadium domains, where a constrained minimizer of the
//!   torsion energy develops a non-convex superlevel set ([`varmin`]);
//! * convex rings with a small off-centre hole carrying a large Dirichlet
//!   value, where the unique solution dips along the segment joining the
//!   hole to the maximum of the unperturbed solution ([`ringlab`]).
//!
//! Non-convexity is certified by explicit three-point witnesses and by the
//! convex-hull area deficiency of marching-squares contours
//! ([`quasiconcavity`]).

pub mod cutoff;
pub mod elliptic;
pub mod exec;
pub mod geometry;
pub mod pipeline;
pub mod quasiconcavity;
pub mod ringlab;
pub mod varmin;

mod error;
mod quad;
mod point;

pub use error::{Error, Result};
pub use exec::Execution;
pub use point::Point;
