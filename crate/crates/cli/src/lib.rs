//! Experiment pipelines behind the `syntonet` command: configuration,
//! reference corpus, run directories with manifests, tables and SVG plots.

pub mod analysis;
pub mod config;
pub mod corpus;
pub mod output;
pub mod pipeline;
pub mod plot;
pub mod tables;
