//! Reconstruction of regulatory structures from perturbation experiments.
//!
//! An experiment graph records measured states of discrete-valued species,
//! connected by perturbation edges (interventions) and response edges (the
//! system relaxing). This crate checks such graphs for validity, repairs
//! invalid ones with a minimal number of hidden binary species, and
//! enumerates every set of reactions plus rate order that reproduces the
//! observed responses under the fastest-reaction semantics.
//!
//! ```
//! use netrecon_core::{fixtures, pipeline};
//!
//! let g = fixtures::fig1();
//! let report = pipeline::solve(&g, &pipeline::SolveOptions::default()).unwrap();
//! assert_eq!(report.hidden, 2);
//! assert_eq!(report.solution_count(), 2);
//! ```

pub mod bounds;
pub mod error;
pub mod extension;
pub mod fixtures;
pub mod io;
pub mod model;
pub mod oracle;
pub mod par;
pub mod pipeline;
pub mod reconstruct;
pub mod simulate;
pub mod synth;
pub mod validity;

pub use error::{Error, Result};
pub use model::{Edge, ExperimentGraph, Reaction, RegulatoryStructure, SpeciesTable, StateVector};
