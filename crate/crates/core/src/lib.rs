pub mod dyadic;
pub mod error;
pub mod field;
pub mod complex;
pub mod interval;
pub mod poly;
pub mod roots;
pub mod sequence;
pub mod series;
pub mod criterion;
pub mod report;
pub mod sieve;

pub use error::{Error, Result};
