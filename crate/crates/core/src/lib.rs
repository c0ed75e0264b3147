//! Exact toric Mori theory for foliated pairs.
//!
//! A toric foliation on `X(Σ)` is given by a rational subspace `V ⊆ N_Q`;
//! its canonical divisor is `K_F = -Σ_{ρ ⊂ V} D_ρ`. This crate computes the
//! invariants that govern such pairs `(F, Δ)` on complete fans: intersection
//! numbers with torus-invariant curves, the Kleiman–Mori cone and its
//! extremal rays, lengths `-(K_F+Δ)·R`, contractions and projective-bundle
//! structures, Fujita-type freeness, sheaf cohomology of torus-invariant
//! divisors, and the toric MMP. All arithmetic is exact.

pub mod cohomology;
pub mod cone;
pub mod dd;
pub mod divisor;
mod error;
pub mod fan;
pub mod foliation;
pub mod io;
pub mod lattice;
pub mod lp;
pub mod mmp;
pub mod moricone;

pub use num_bigint::BigInt as Int;
/// Exact rational number used throughout.
pub type Rat = num_rational::BigRational;

pub use cohomology::{kodaira_check, serre_duality_check, weil_cohomology, CohomologyReport};
pub use divisor::{CartierData, Polytope, TorusDivisor};
pub use error::{Error, Result};
pub use fan::{Fan, Wall};
pub use foliation::{FoliatedPair, FoliationSubspace};
pub use lattice::{IntMatrix, IntVector, RatVector};
pub use mmp::{run_mmp, MmpTrace};
pub use moricone::{mori_cone, ContractionKind, ExtremalRay, MoriCone};
