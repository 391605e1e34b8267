//! Readability assessment engine.
//!
//! Five traditional grade-level formulas (Flesch-Kincaid, Gunning Fog, SMOG,
//! Coleman-Liau, Automated Readability Index) in their original and
//! recalibrated variants, the NERF linguistic-feature formula, and the
//! machinery around them: a deterministic text pipeline, psycholinguistic
//! lexicon lookups, constituency-tree features, least-squares calibration and
//! an evaluation harness.

pub mod text;
pub mod lexicon;
pub mod syntax;
pub mod formulas;
pub mod nerf;
pub mod corpus;
pub mod calibration;
pub mod evaluation;
pub mod api;

pub use api::{request, Error, LexiconPair, Request};
