//! File formats, the parallel experiment runner and the command line for
//! [`mixcode_core`].

pub mod checkpoint;
pub mod config;
pub mod dataset_file;
pub mod results;
pub mod runner;
