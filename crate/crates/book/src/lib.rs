//! The guide in `book/` as doc-tests: each chapter is the documentation of
//! one module, so `cargo test` runs every code block it contains.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/temperaments.md")]
pub mod temperaments {}
#[doc = include_str!("../../../book/src/spectra.md")]
pub mod spectra {}
#[doc = include_str!("../../../book/src/consonance.md")]
pub mod consonance {}
#[doc = include_str!("../../../book/src/syntonets.md")]
pub mod syntonets {}
#[doc = include_str!("../../../book/src/models.md")]
pub mod models {}
#[doc = include_str!("../../../book/src/measurements.md")]
pub mod measurements {}
#[doc = include_str!("../../../book/src/pca.md")]
pub mod pca {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
