//! Simulation-based verification toolkit for autonomous VTOL landing.
//!
//! The crate simulates a waypoint-following vehicle through parameterized
//! landing scenarios, builds over-approximating reachtubes from sampled
//! trajectories, and checks goal containment and obstacle avoidance against
//! those tubes.
//!
//! Pipeline, in the order data flows:
//!
//! * [`scenarios`] draws an initial state and a landing target, then runs the
//!   closed loop of [`perception`], [`planner`] and [`vehicle`] to produce a
//!   [`vehicle::Trace`].
//! * [`reach`] samples many such traces, learns a per-axis discrepancy
//!   envelope and bloats the nominal trace into a [`reach::Reachtube`].
//! * [`safety`] evaluates the tube against the goal box and the unsafe boxes.
//!
//! All set computations use axis-aligned boxes from [`geometry`]. Every random
//! draw flows from a root seed through named streams in [`seed`], so results
//! are reproducible regardless of how many worker threads are used.

// `!(x > 0.0)` is how validation rejects NaN along with non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod perception;
pub mod planner;
pub mod reach;
pub mod safety;
pub mod scenarios;
pub mod seed;
pub mod vehicle;

pub use error::{Error, Result};
pub use geometry::{Aabb, HyperRect, Vec3};
