//! Dimension-theoretic estimation for discrete-time dynamical systems.
//!
//! The crate computes separated/spanning/cover counts in the orbit
//! (Bowen) metric of a map sequence, extracts per-radius exponential
//! growth rates, and regresses those rates against `|log eps|` to
//! estimate metric mean dimension. Plain ball-cover counts give
//! Minkowski (box) dimension the same way.
//!
//! Organization:
//!
//! - [`space`]: compact metric spaces as distance + sampler handles.
//! - [`system`]: indexed map sequences with lazy composition, shifting,
//!   blocking, damping, and truncation; exact rational orbit evaluation
//!   where the map data permits it.
//! - [`bowen`]: orbit caches and the max-over-iterates metric.
//! - [`fixtures`]: the catalogue of example systems with attached
//!   analytic ground truth (block interval maps, product shifts,
//!   toral power sequences, damped and truncated families).
//! - [`estimate`]: greedy counting kernels, count tables, growth
//!   rates, and dimension reports.
//! - [`oracle`]: exact closed-form count bounds used to validate the
//!   numeric estimators.
//! - [`props`]: toleranced numerical checks of structural relations
//!   between estimates (power scaling, composition order, restriction
//!   to invariant or non-wandering sets, box-dimension ceilings).
//!
//! Everything is deterministic: identical inputs, resolutions, and
//! seeds produce identical outputs. Values are immutable after
//! construction and safe to share across threads.

pub mod bowen;
pub mod error;
pub mod estimate;
pub mod fixtures;
pub mod oracle;
pub mod props;
pub mod space;
pub mod system;

mod rational;
mod rng;

pub use bowen::BowenContext;
pub use error::{Error, Result};
pub use space::{MetricSpace, Point, SampleSet};
pub use system::{SeqKind, SystemSequence};
