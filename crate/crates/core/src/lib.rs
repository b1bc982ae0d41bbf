//! Nuclear numerical ranges of 2×2 matrices and the error-correction codes
//! they produce for two-qubit channels with two block-diagonal Kraus operators.

pub mod channels;
pub mod error;
pub mod io;
pub mod linalg;
pub mod oracle;
pub mod ranges;
pub mod solver;

pub use error::{Error, Result};
