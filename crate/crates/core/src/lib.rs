pub mod coverings;
pub mod discretize;
pub mod error;
pub mod lie;
pub mod linalg;
pub mod operators;
pub mod output;
pub mod quadrature;
pub mod representations;
pub mod residue;
pub mod spectra;
pub mod trace;

pub use error::{Error, Result};
