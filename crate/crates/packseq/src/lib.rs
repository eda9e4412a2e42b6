//! File formats, trial pools and the HTTP evaluation service around
//! [`packseq_core`].

pub mod error;
pub mod formats;
pub mod pool;
pub mod service;

pub use error::{Error, Result};
