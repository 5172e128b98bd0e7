//! Files, configuration and orchestration around `cipsar-core`.
//!
//! The `cipsar` binary drives four stages: `simulate` synthesizes traces for
//! a phantom, `preprocess` turns raw data into one trace per source,
//! `invert` reconstructs one dielectric profile per source and stacks them
//! into a slant-range image, and `verify` runs numerical self-checks.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod invert;
pub mod io;
pub mod simulate;
pub mod verify;

pub use cipsar_core as core;
pub use config::PipelineConfig;
pub use error::{CliError, Result};
