pub mod algebra;
pub mod cli;
pub mod curvezeta;
pub mod ecurve;
pub mod error;
pub mod ffield;
pub mod nonabelian;
pub mod numtheory;
pub mod qsim;
pub mod shor;
pub mod units;

pub use error::{Error, Result};
