//! Exact Weil representations of finite symplectic groups.
//!
//! Everything is built over the universal ring 𝒜 = ℤ[1/p, ζ_p] and pushed to
//! residue fields F_ℓ(ζ_p) through the structure morphism φ. Arithmetic is
//! exact throughout.

pub mod cyclotomic;
pub mod error;
pub mod exactalg;
pub mod finsymp;
pub mod gl1theta;
pub mod heisenberg;
pub mod intertwine;
pub mod json;
mod polyfp;
pub mod weilrep;

pub use error::{Error, Result};
