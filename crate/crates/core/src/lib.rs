//! Engagement detection over streams of upper-body skeleton frames.
//!
//! The pipeline for one user is:
//!
//! 1. [`features::extract_features`] turns a frame (plus its predecessor) into
//!    body-relative pose features and per-hand speeds.
//! 2. [`features::evaluate_bank`] evaluates the 37 binary posture classifiers
//!    into a [`features::ClassifierVector`].
//! 3. [`intent::IntentModel`] scores the vector and decides intention-to-act.
//! 4. [`fst::Machine`] runs the compiled transition table (see [`guard`]) and
//!    emits finalized, possibly relabeled, [`fst::LabeledFrame`]s.
//!
//! [`pipeline::Engine`] wires these stages together; [`eval`] scores label
//! sequences against ground truth and [`skeleton::synth`] produces scripted
//! synthetic streams with ground-truth labels.

pub mod eval;
pub mod features;
pub mod fst;
pub mod guard;
pub mod intent;
pub mod pipeline;
pub mod skeleton;
mod state;

pub use state::{EngagementState, ParseStateError};
