pub mod elicitation;
pub mod error;
pub mod frontier;
pub mod io;
pub mod simharness;
pub mod utility;

pub use error::{Error, Result};
