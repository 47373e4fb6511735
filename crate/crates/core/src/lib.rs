//! Core algorithms for screening co-occurring body image distress, disordered
//! eating and metabolic challenges in social-media posts.
//!
//! The crate is `no_std` (it needs `alloc`) and performs no IO. It covers the
//! whole evaluation path:
//!
//! * [`corpus`]: posts, identifier scrubbing, keyword filtering, tokenization
//!   and a seeded synthetic corpus generator.
//! * [`sampling`]: seeded sampling and stratified train/validation/test splits.
//! * [`annotation`]: dual-annotator records, Cohen's kappa and inclusive merging.
//! * [`prediction`]: the canonical structured-prediction text format.
//! * [`grounding`]: locating quoted evidence in source posts, coverage.
//! * [`metrics`]: exact match, per-label and comorbidity metrics.
//! * [`baseline`]: a lexicon predictor used to drive the pipeline end to end.
//!
//! File formats and the command-line front end live in the `triad` crate.
#![no_std]

extern crate alloc;

pub mod annotation;
pub mod baseline;
pub mod construct;
pub mod corpus;
pub mod error;
pub mod grounding;
pub mod metrics;
pub mod prediction;
pub mod rng;
pub mod sampling;
pub mod stats;
mod text;

pub use construct::{Construct, LabelVector, Level};
pub use error::{Error, Result};
