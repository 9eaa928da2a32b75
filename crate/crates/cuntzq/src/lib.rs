//! File formats, configuration and the batch driver around `cuntzq-core`.

pub mod config;
pub mod mtx;
pub mod parse;
pub mod random;
pub mod run;

pub use config::{Mode, Settings};
pub use run::{run, Outcome};
