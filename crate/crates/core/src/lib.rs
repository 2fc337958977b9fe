//! Symbolic engine for Chekanov-Eliashberg DGAs over F2.

pub mod algebra;
pub mod augment;
pub mod cli;
pub mod diagram;
pub mod error;
pub mod formula;
pub mod io;
pub mod linearized;
pub mod twisted;

pub use algebra::{Action, DgaBuilder, Element, FreeDga, GenId, Generator, Word};
pub use error::{Error, Result};
