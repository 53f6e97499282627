//! Exact computation of the sequence `x_0 = 1`, `x_{n+1} = 1 + n / x_n`, its
//! integer companions (the involution numbers `a_n`), and a verifier that
//! checks the known arithmetic facts about them over chosen ranges.

pub mod arith;
pub mod error;
pub mod sequence;
pub mod series;
pub mod oracle;
pub mod report;
pub mod checks;
pub mod verifier;
pub mod cli;

pub use arith::{ExactRational, Int, Nat};
pub use error::{Error, Result};
