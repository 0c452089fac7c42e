//! Permutation-product toolkit over alternating groups.
//!
//! The crate revolves around a single convention: composition reads left to
//! right, `(a·b)(i) = b(a(i))`, with commutator `[a, g] = a·g·a⁻¹·g⁻¹` and
//! conjugation `g⁻¹·a·g`. Everything else builds on that:
//!
//! - [`perm`]: permutations with explicit degree, cycle decompositions,
//!   conjugator search in the symmetric and alternating groups.
//! - [`transform`]: rewriting the cycle structure of a group element by
//!   short scripts of commutation and conjugation steps.
//! - [`product`]: vectors of group elements with per-slot provenance, and
//!   maps that transform whole vectors while acting on their folds.
//! - [`bp`]: branching programs and their encoding as a single permutation
//!   whose cycle structure answers the program.
//! - [`reduce`]: instance transformations between product problems, down to
//!   deciding whether a product equals one fixed element.
//! - [`leakage`]: rerandomization of product vectors, statistical distance
//!   of leakage outputs, and a threshold amplifier for weak distinguishers.
//! - [`verify`]: the built-in acceptance checks, runnable from the CLI and
//!   from the test suite.

#![forbid(unsafe_code)]

pub mod bp;
pub mod error;
pub mod leakage;
pub mod perm;
pub mod product;
pub mod reduce;
pub mod transform;
pub mod verify;

pub use error::{Error, Result};
pub use perm::{Parity, Permutation};
