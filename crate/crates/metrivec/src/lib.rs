//! Riemann integration and oscillation analysis for functions mapping a
//! real interval into metrizable vector spaces.
//!
//! The crate provides tagged-partition machinery, a sampled Riemann
//! integrator with Cauchy-criterion diagnostics, Darboux oscillation
//! sums, discontinuity-set measure brackets, and a gallery of functions
//! whose integrability flips between metrics on the same underlying
//! space. Probes are seeded and deterministic; with the default
//! `parallel` feature the independent evaluations run on rayon without
//! changing any reported value.

pub mod error;
pub mod exec;
pub mod point;
pub mod spaces;
pub mod partitions;
pub mod integration;
pub mod oscillation;
pub mod calculus;
pub mod gallery;
pub mod atlas;
pub mod report;

pub use error::{Error, Result};
pub use point::Point;
pub use spaces::{Space, SpaceKind, VectorValue};
