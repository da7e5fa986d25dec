//! Λ³H_p with its Lagrangian splitting, the intersection form, the
//! contraction map, and the invariant bilinear forms on Λ³H_p and 𝔰𝔭_2g.
//!
//! Conventions: ω(aᵢ,bᵢ) = s_ω, evaluated pointwise. With s_ω = −1 the
//! forms reproduce the reference table of values on the three generators
//! of the antisymmetric coinvariants (e.g. Θ(a₁∧a₂∧a₃, b₁∧b₂∧b₃) = −1 and
//! Q(a₁∧a₂∧b₂, b₁∧a₃∧b₃) = −4).

mod ext3;
mod forms;

pub use ext3::{
    contract, is_a, label_name, omega, omega_labels, parse_label, varpi_labels, Ext3Basis,
    Ext3Vector, HVector, Label,
};
pub use forms::{
    j_form, k_form, q_form, t1_form, t2_form, theta_basis, theta_form, tj_form, tk_form, FormId,
    FormTable,
};
