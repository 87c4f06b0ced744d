//! File formats, the experiment runner and the command-line front end for
//! `netres-core`.

pub mod checkpoint;
pub mod cli;
pub mod config;
pub mod error;
pub mod experiment;
pub mod pipeline;
pub mod tables;
pub mod traffic_csv;

pub use error::{Error, Result};
