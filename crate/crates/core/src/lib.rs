//! Exact computation engine for generalized q-boson algebras of diagonal type.
//!
//! Starting from a symmetrizable Borcherds-Cartan datum the engine builds the
//! Nichols algebras `R` (generated by the `f'_{ik}`) and `S` (generated by the
//! `e_{ik}`) as quotients of free algebras by the radical of the skew pairing,
//! realizes the smash product `B = R # S` with its Verma representation on
//! `R`, constructs truncated extremal projectors and decomposes integrable
//! `B`-modules into copies of `R`.

pub mod cache;
pub mod cartan;
pub mod error;
pub mod freebraided;
pub mod linalg;
pub mod nichols;
pub mod qboson;
pub mod repmod;
pub mod pairing;
pub mod scalars;

pub use cartan::{BraidingMatrix, CartanDatum, DatumDocument, GeneratorIndex};
pub use error::{Error, Result};
pub use freebraided::{FreeElement, Multidegree, Side, Tensor, Word};
pub use scalars::{FieldElement, FieldSpec};
