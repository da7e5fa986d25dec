//! Exact computations around the mod-d invariants φ and 𝔕 of rational
//! homology 3-spheres given by Heegaard gluings, together with the finite
//! algebra used to verify their defining identities.

pub mod coinv;
pub mod error;
pub mod exactalg;
pub mod homology3;
pub mod invariants;
pub mod multilinear;
pub mod symplectic;
pub mod trees;
pub mod verify;

pub use error::{Error, Result};
