//! Nonvanishing syzygies of Veronese embeddings of weighted projective spaces
//! `P(1^n, 2)`: closed-form predictions of which Betti table entries are nonzero,
//! and an exact Koszul-cohomology oracle over a prime field to check them.

pub mod error;
pub mod harness;
pub mod koszul;
pub mod predictions;
pub mod veronese_model;
pub mod weighted_ring;

pub use error::{Error, ErrorKind, Result};
pub use veronese_model::{QuotientModule, VeroneseModel};
pub use weighted_ring::{Monomial, Weights};
