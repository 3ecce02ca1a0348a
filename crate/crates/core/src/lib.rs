//! Consonance networks ("syntonets") over musical temperaments.
//!
//! The crate builds note scales under five historical temperaments, gives
//! each note a partial spectrum with a tunable anharmonicity, scores every
//! note pair for consonance and dissonance, and thresholds the scores into
//! unweighted networks. Those networks are then compared with classical
//! random-graph ensembles through a 34-dimensional topological signature and
//! a principal-component projection fitted on the ensembles.
//!
//! ```
//! use syntonet::scale::{build_scale, Temperament, TemperamentName, C1_HZ};
//! use syntonet::spectrum::AnharmonicityLaw;
//! use syntonet::syntony::{build_syntony_matrix, threshold_graph, SyntonyKind, SyntonyWindows};
//!
//! let scale = build_scale(&Temperament::new(TemperamentName::Equal), C1_HZ, 2)?;
//! let law = AnharmonicityLaw::harmonic(0.05)?;
//! let m = build_syntony_matrix(&scale, law, &SyntonyWindows::default(), SyntonyKind::Consonance)?;
//! let g = threshold_graph(&m, 30)?;
//! assert_eq!(g.edge_count(), 30);
//! # Ok::<(), syntonet::Error>(())
//! ```

pub mod error;
pub mod export;
pub mod graph;
pub mod graphmodels;
pub mod metrics;
pub mod projection;
pub mod scale;
pub mod spectrum;
pub mod syntony;

pub use error::{Error, Result};
