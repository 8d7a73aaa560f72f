//! Chain-level homological algebra over semisimple quiver rings, in exact
//! arithmetic.
//!
//! The crate builds and verifies A-infinity (co)algebras over a ground ring
//! `k = ⊕ K e_v`, runs the bar and cobar constructions, checks twisting
//! cochains and the acyclicity of their Koszul complexes on truncated windows,
//! and ships a small text format plus a bundled corpus of worked examples
//! (unknot, Hopf link, trefoil, mirror 7_2, products of spheres, the free
//! circle model).
//!
//! Everything is computed over exact fields (arbitrary-precision rationals or
//! a prime field GF(p)); there is no floating point anywhere. The crate is
//! `no_std`-compatible (alloc required); IO, the CLI, and JSON reporting live
//! in the companion `koszulkit-cli` crate.

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod ainfty;
pub mod barcobar;
pub mod cubical;
pub mod dsl;
pub mod ground;
pub mod homology;
pub mod koszul;
pub mod ncalg;
pub mod scalars;

pub use ground::{Decoration, GenSym, GradedModule, GroundRing, Quiver};
pub use ncalg::{Derivation, Element, Word};
pub use scalars::{FieldSpec, Scalar, SparseMatrix};
