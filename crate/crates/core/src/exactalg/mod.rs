//! Exact linear algebra over ℤ, ℤ/m and 𝔽_p.

mod fp;
mod int_matrix;
mod residue;
mod smith;
mod text;

pub use fp::{is_prime, quotient_dim, rank_mod_p, subspace_closure, FpSubspace};
pub use int_matrix::IntMatrix;
pub use residue::{ext_gcd, inv_mod, mul_mod, neg_mod, reduce_i64, ResidueMatrix};
pub use smith::{smith_normal_form, SmithDecomposition};
pub(crate) use text::{content_lines, parse_body, parse_usize};
pub use text::{format_int_matrix, format_residue_matrix, parse_matrix, MatrixText};
