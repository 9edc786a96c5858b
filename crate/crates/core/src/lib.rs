pub mod error;
pub mod forward;
pub mod geometry;
pub mod harness;
pub mod io;
pub mod mcmc;
pub mod observation;
pub mod specfun;
pub mod stats;

pub use error::{Error, Result};
