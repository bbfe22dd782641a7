//! Stock interaction networks from tick-level trade data.
//!
//! The crate is organised as a pipeline:
//!
//! - [`ingest`]: tick parsing, VWAP bars, log returns, period splits.
//! - [`infostats`]: Pearson correlation, entropies, adaptive-partition mutual
//!   information with a permutation significance test, distances.
//! - [`rmt`]: eigen-analysis of correlation matrices against the
//!   Marchenko–Pastur law, surrogate shuffles.
//! - [`netgraph`]: minimum spanning trees, degree distributions, power-law
//!   fits, Perron hub scores, Fiedler communities, GraphML/GEXF export.
//! - [`synth`]: synthetic markets with planted structure.
//!
//! Interchangeable algorithms (MI estimators, network distance methods, graph
//! export formats) sit behind traits and are looked up by name in a
//! [`registry::Registry`].

pub mod error;
pub mod infostats;
pub mod ingest;
pub mod io;
pub mod netgraph;
pub mod registry;
pub mod rmt;
pub mod seed;
pub mod synth;

pub use error::{Error, Result};
