//! Finite relational structures with a single symmetric relation, their
//! homomorphisms, and tools for deciding membership in classes defined by
//! separating homomorphisms into finite templates.
//!
//! Elements are dense indices `0..n` with string names kept alongside.
//! Tuples are `Vec<usize>` of the structure's arity.

pub mod analysis;
pub mod efgame;
pub mod error;
pub mod generators;
pub mod hom;
pub mod io;
pub mod membership;
pub mod polymorphism;
pub mod structure;

pub use error::{Error, FormatError, Result};
pub use structure::{Homomorphism, Hypergraph, KStructure};
