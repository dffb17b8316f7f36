// tabulated constants keep their published digits
#![allow(clippy::excessive_precision)]

pub mod degeneracy;
pub mod dtn;
pub mod error;
pub mod experiment;
pub mod forward;
pub mod noise;
pub mod output;
pub mod quadrature;
pub mod recon_dl;
pub mod recon_ft;
pub mod sources;
pub mod specfun;
pub mod validate;

pub use error::{Error, Result, SpecfunError};
