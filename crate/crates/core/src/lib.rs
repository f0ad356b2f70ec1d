//! Learning safe numeric planning action models from fully observed
//! execution trajectories.
//!
//! Preconditions are learned as convex polytopes over the observed pre-state
//! function values and effects as affine assignments fitted by least squares.
//! Two learners are provided and registered by name in
//! [`learn::LearnerRegistry`]:
//!
//! * `nsam` only admits an action once its observations span a
//!   full-dimensional region; other observed actions are reported unsafe.
//! * `nsam-star` additionally handles those actions by restricting them to
//!   the affine subspace their observations span.
//!
//! [`eval`] measures learned models against a ground truth and [`bench`]
//! provides ground-truth domains and trajectory generators.

pub mod bench;
pub mod eval;
pub mod learn;
pub mod numerics;
pub mod pddl;
pub mod precision;
pub mod sam;
