//! Configuration, file formats and batch commands of the `nsbf` tool.
//!
//! The numerical work is done by [`nsbf_core`]; this crate reads problem
//! descriptions, caches coefficient builds and writes CSV results.

// `!(x <= limit)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cache;
pub mod commands;
pub mod config;
pub mod format;
pub mod problem;
pub mod table;
