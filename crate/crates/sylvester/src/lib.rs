//! Solvers for generalized smallest intersecting/enclosing ball problems.
//!
//! Given closed convex targets in R^n and a gauge describing how cost grows
//! with displacement, the objective is the smallest "radius" V such that a
//! gauge ball of radius V around a chosen center reaches every intersect
//! target and covers every enclose target. The crate provides
//!
//! * [`geometry`]: the closed set vocabulary (balls, boxes, halfspaces,
//!   singletons, a parabola epigraph, all of R^n) with projections,
//!   farthest points, normal cones, and ray entry times, plus the gauge
//!   dynamics (Euclidean, scaled Euclidean, sup-norm, 1-norm);
//! * [`timefns`]: per-target reach/cover times, the max-type objectives,
//!   active index sets, and subgradient selections;
//! * [`subgrad`]: the projected subgradient solver with harmonic-family
//!   step schedules and a certified error bound;
//! * [`smoothing`]: a log-sum-exp smoothing of the intersect objective, a
//!   majorization-minimization outer loop, and an accelerated projected
//!   gradient inner solver;
//! * [`directional`]: single-direction reach times, their subgradients,
//!   and the matching subgradient solver;
//! * [`generator`]: the deterministic congruential box-instance generator
//!   used by the benchmark tables.
//!
//! With the default `parallel` feature the per-target loops inside the
//! smoothing evaluator run on rayon. Chunking is fixed-size and partial
//! results are combined in index order, so outputs are bitwise identical
//! across thread counts and to the sequential fallback.

pub mod directional;
pub mod generator;
pub mod geometry;
mod parallel;
pub mod report;
pub mod smoothing;
pub mod subgrad;
pub mod timefns;
mod vecops;

pub use geometry::{ConvexSet, Dynamic, GeomError, NormalConeRep};
pub use report::{SolverReport, StepSchedule, StopReason};
pub use timefns::{ActiveSets, InstanceError, SylvesterInstance};
