//! Embedded AIS trajectory warehouse.

pub mod cluster;
mod codec;
pub mod config;
pub mod error;
pub mod exec;
pub mod geom;
pub mod grid;
pub mod heatmap;
pub mod ingest;
pub mod partition;
pub mod pipeline;
pub mod synth;
pub mod time;
pub mod trajectory;

pub use error::{Error, Result};
pub use exec::Execution;
