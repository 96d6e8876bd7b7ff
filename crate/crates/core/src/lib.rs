//! Metric program synthesis for 2D inverse constructive solid geometry.
//!
//! Given a bitmap, [`search::metric_synth`] builds an approximate finite tree
//! automaton whose states are clusters of similar scenes, extracts candidate
//! programs from it, and repairs them with distance-guided rewriting until one
//! renders the bitmap exactly.

pub mod baseline;
pub mod benchgen;
pub mod budget;
pub mod config;
pub mod csg;
pub mod error;
pub mod harness;
pub mod metric;
pub mod search;
pub mod xfta;

pub use error::{Error, Result};
