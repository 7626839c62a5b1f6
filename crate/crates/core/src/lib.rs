//! The algebraic small object argument, executed over finite sets and finite presheaves.

pub mod ambient;
pub mod arrows;
pub mod awfs;
pub mod density;
pub mod error;
pub mod fincat;
pub mod finset;
pub mod freemonad;
pub mod presheaf;

pub use error::{Error, Result, DEFAULT_CAP};
