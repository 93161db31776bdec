//! Exact symbolic engine for graded manifolds in a polynomial model.
//!
//! The crate is layered bottom-up:
//!
//! * [`gcore`]: Koszul signs, shuffles and the shift isomorphism.
//! * [`galg`]: graded-commutative polynomials over a chart.
//! * [`mvf`]: multivector fields and the Schouten–Nijenhuis bracket.
//! * [`linfty`]: (blended) L∞ structure maps, Jacobiators, Maurer–Cartan sums.
//! * [`vderive`]: V-algebras, higher derived brackets and the combined
//!   structure on `V[1] ⊕ 𝔞`.
//! * [`qgeom`]: blended homological vector fields and deformations of
//!   submanifolds of coisotropic type.
//! * [`courant`]: Courant algebroids and Dirac structures.
//! * [`cli`]: the `gradedq` job runner.
//!
//! All arithmetic is over exact rationals.

pub mod cli;
pub mod courant;
pub mod error;
pub mod galg;
pub mod gcore;
pub mod linfty;
pub mod mvf;
mod poly;
pub mod qgeom;
pub mod random;
pub mod vderive;

pub use error::{Error, Result};
