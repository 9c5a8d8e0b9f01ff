//! Exact computation with modules over finite preadditive categories.

pub mod abelian;
pub mod basechange;
pub mod check;
pub mod cli;
pub mod diagram;
pub mod error;
pub mod fpcat;
pub mod matring;
pub mod module;
pub mod ringoid;
pub mod tensor;

pub use error::{AlgError, Result};
