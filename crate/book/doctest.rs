//! Every chapter of the guide is included here as a doc comment, so
//! `cargo test` compiles and runs its code listings.

#[doc = include_str!("src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("src/metric_spaces.md")]
pub mod metric_spaces {}
#[doc = include_str!("src/curves.md")]
pub mod curves {}
#[doc = include_str!("src/variation.md")]
pub mod variation {}
#[doc = include_str!("src/speed_measure.md")]
pub mod speed_measure {}
#[doc = include_str!("src/decomposition.md")]
pub mod decomposition {}
#[doc = include_str!("src/ac_analysis.md")]
pub mod ac_analysis {}
#[doc = include_str!("src/cli.md")]
pub mod cli {}
