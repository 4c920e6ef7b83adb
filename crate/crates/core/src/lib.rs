//! Exact computational tools for sheaves on finite spaces.
//!
//! The crate covers cellular sheaves and their cohomology over simplicial
//! complexes, set-valued presheaves on finite topologies, Galois connections
//! on finite posets, binary and flat grayscale morphology, and the
//! bi-Heyting modal operators on subgraph lattices. All linear algebra is
//! carried out over arbitrary-precision rationals.

pub mod cellsheaf;
pub mod cohomology;
pub mod complex;
pub mod error;
pub mod finsheaf;
pub mod galois;
pub mod io;
pub mod modal;
pub mod morphology;
pub mod poset;
pub mod rational;

pub use error::{Error, Result};
pub use poset::{Direction, FinitePoset, FiniteTopology};
pub use rational::{parse_rational, format_rational, Rational, RationalMatrix};
