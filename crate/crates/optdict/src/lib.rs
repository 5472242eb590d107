//! File formats and the `optdict` command-line front end for
//! [`optdict_core`].

pub mod cli;
mod error;
pub mod io;

pub use crate::cli::run;
pub use crate::error::{AppError, AppResult};
