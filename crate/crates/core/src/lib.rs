//! Finite-dimensional boundary triples for adjoint pairs.
//!
//! [`triple`] holds the data, [`extension`] the operators `A_B`, their
//! resolvents, solution operators and M-functions, [`spaces`] the detection
//! spaces and bordered resolvents, and [`synth`] random and structured test
//! triples.

mod error;
pub mod extension;
pub mod io;
pub mod spaces;
pub mod synth;
pub mod triple;

pub use error::CoreError;
pub use extension::{Extension, Pencil};
pub use triple::{make_triple, FiniteTriple};

pub type Result<T, E = CoreError> = std::result::Result<T, E>;
