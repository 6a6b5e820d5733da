pub mod bitlinalg;
pub mod codes;
pub mod diagnostics;
pub mod error;
pub mod harness;
pub mod noise;
pub mod pauli;
pub mod stabsim;

pub use error::{Error, Result};
