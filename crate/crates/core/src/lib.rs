pub mod algebra;
pub mod cli;
pub mod constructions;
pub mod error;
pub mod gap;
pub mod linalg;
pub mod pingpong;
pub mod thresholds;
pub mod words;

pub use error::{Error, Result};
pub use thresholds::Thresholds;
