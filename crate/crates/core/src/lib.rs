pub mod dilation;
pub mod error;
pub mod fock;
pub mod matrix;
pub mod multiplier;
pub mod pnorm;
pub mod poly;

pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, PExponent, C64};
