use std::fmt;
use std::str::FromStr;

use super::ext3::{contract, omega, omega_labels, Ext3Basis, Ext3Vector};
use crate::error::{dim_mismatch, Error, Result};
use crate::exactalg::{mul_mod, reduce_i64};
use crate::symplectic::{Conventions, SpLieElement};

/// Θ on basis vectors: the determinant of the pairing matrix ω(xᵢ, yⱼ).
pub fn theta_basis(basis: &Ext3Basis, i: usize, j: usize, conv: Conventions) -> i64 {
    let g = basis.genus();
    let (x, y) = (basis.triple(i), basis.triple(j));
    let w = |r: usize, c: usize| omega_labels(g, x[r], y[c], conv);
    let det = w(0, 0) * (w(1, 1) * w(2, 2) - w(1, 2) * w(2, 1))
        - w(0, 1) * (w(1, 0) * w(2, 2) - w(1, 2) * w(2, 0))
        + w(0, 2) * (w(1, 0) * w(2, 1) - w(1, 1) * w(2, 0));
    debug_assert_eq!(det, permutation_sum(&w));
    det
}

/// `Σ_σ sgn(σ) Π ω(xᵢ, y_σ(i))`.
fn permutation_sum(w: &dyn Fn(usize, usize) -> i64) -> i64 {
    const PERMS: [([usize; 3], i64); 6] = [
        ([0, 1, 2], 1),
        ([1, 2, 0], 1),
        ([2, 0, 1], 1),
        ([0, 2, 1], -1),
        ([2, 1, 0], -1),
        ([1, 0, 2], -1),
    ];
    PERMS
        .iter()
        .map(|(s, sign)| sign * w(0, s[0]) * w(1, s[1]) * w(2, s[2]))
        .sum()
}

fn check_pair(x: &Ext3Vector, y: &Ext3Vector, basis: &Ext3Basis) -> Result<()> {
    if x.g != y.g || x.p != y.p || x.g != basis.genus() {
        return Err(dim_mismatch(
            format!("genus {} mod {}", x.g, x.p),
            format!("genus {} mod {}", y.g, y.p),
        ));
    }
    Ok(())
}

pub fn theta_form(
    x: &Ext3Vector,
    y: &Ext3Vector,
    basis: &Ext3Basis,
    conv: Conventions,
) -> Result<u64> {
    check_pair(x, y, basis)?;
    let p = x.p;
    let mut acc = 0u64;
    for (i, cx) in x.support() {
        for (j, cy) in y.support() {
            let t = theta_basis(basis, i, j, conv);
            if t != 0 {
                acc = (acc + mul_mod(mul_mod(cx, cy, p), reduce_i64(t, p), p)) % p;
            }
        }
    }
    Ok(acc)
}

/// `Q(x, y) = ω(C(x), C(y))`.
pub fn q_form(x: &Ext3Vector, y: &Ext3Vector, basis: &Ext3Basis, conv: Conventions) -> Result<u64> {
    check_pair(x, y, basis)?;
    omega(&contract(x, basis, conv), &contract(y, basis, conv), conv)
}

/// `ᵗJ(x, y) = Θ(π_B x, π_A y)`.
pub fn tj_form(
    x: &Ext3Vector,
    y: &Ext3Vector,
    basis: &Ext3Basis,
    conv: Conventions,
) -> Result<u64> {
    theta_form(&x.pi_b(basis), &y.pi_a(basis), basis, conv)
}

/// `J(x, y) = −Θ(π_A x, π_B y)`.
pub fn j_form(x: &Ext3Vector, y: &Ext3Vector, basis: &Ext3Basis, conv: Conventions) -> Result<u64> {
    let t = theta_form(&x.pi_a(basis), &y.pi_b(basis), basis, conv)?;
    Ok((x.p - t) % x.p)
}

fn check_sp(x: &SpLieElement, y: &SpLieElement) -> Result<()> {
    if x.genus() != y.genus() || x.modulus() != y.modulus() {
        return Err(dim_mismatch(
            format!("genus {} mod {}", x.genus(), x.modulus()),
            format!("genus {} mod {}", y.genus(), y.modulus()),
        ));
    }
    Ok(())
}

pub fn t1_form(x: &SpLieElement, y: &SpLieElement) -> Result<u64> {
    check_sp(x, y)?;
    Ok(x.gl().try_mul(y.gl())?.trace())
}

pub fn t2_form(x: &SpLieElement, y: &SpLieElement) -> Result<u64> {
    check_sp(x, y)?;
    Ok(mul_mod(x.gl().trace(), y.gl().trace(), x.modulus()))
}

pub fn k_form(x: &SpLieElement, y: &SpLieElement) -> Result<u64> {
    check_sp(x, y)?;
    Ok(x.a_block().try_mul(y.b_block())?.trace())
}

pub fn tk_form(x: &SpLieElement, y: &SpLieElement) -> Result<u64> {
    check_sp(x, y)?;
    Ok(x.b_block().try_mul(y.a_block())?.trace())
}

/// Named invariant bilinear forms. The first ten live on Λ³H_p, the last
/// four on 𝔰𝔭_2g.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FormId {
    Theta,
    Q,
    J,
    TJ,
    /// `ᵗJ − J`.
    TJMinusJ,
    /// `−J = Θ(π_A, π_B)`.
    NegJ,
    /// `Θ(π_{A²B}, π_{B²A})`.
    ThetaA2bB2a,
    /// `Θ(π_{B²A}, π_{A²B})`.
    ThetaB2aA2b,
    /// `Q(π_{A²B}, π_{B²A})`.
    QA2bB2a,
    /// `Q(π_{B²A}, π_{A²B})`.
    QB2aA2b,
    T1,
    T2,
    K,
    TK,
}

impl FormId {
    pub const EXT3_BASIS: [FormId; 6] = [
        FormId::NegJ,
        FormId::TJ,
        FormId::ThetaA2bB2a,
        FormId::ThetaB2aA2b,
        FormId::QA2bB2a,
        FormId::QB2aA2b,
    ];
    pub const SP_BASIS: [FormId; 4] = [FormId::T1, FormId::T2, FormId::K, FormId::TK];

    pub fn on_sp(self) -> bool {
        matches!(self, FormId::T1 | FormId::T2 | FormId::K | FormId::TK)
    }

    pub fn name(self) -> &'static str {
        match self {
            FormId::Theta => "theta",
            FormId::Q => "q",
            FormId::J => "j",
            FormId::TJ => "tj",
            FormId::TJMinusJ => "tj-j",
            FormId::NegJ => "neg-j",
            FormId::ThetaA2bB2a => "theta-a2b-b2a",
            FormId::ThetaB2aA2b => "theta-b2a-a2b",
            FormId::QA2bB2a => "q-a2b-b2a",
            FormId::QB2aA2b => "q-b2a-a2b",
            FormId::T1 => "t1",
            FormId::T2 => "t2",
            FormId::K => "k",
            FormId::TK => "tk",
        }
    }

    pub fn all() -> [FormId; 14] {
        use FormId::*;
        [
            Theta,
            Q,
            J,
            TJ,
            TJMinusJ,
            NegJ,
            ThetaA2bB2a,
            ThetaB2aA2b,
            QA2bB2a,
            QB2aA2b,
            T1,
            T2,
            K,
            TK,
        ]
    }
}

impl fmt::Display for FormId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FormId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FormId::all()
            .into_iter()
            .find(|f| f.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidParameter(format!("unknown form `{s}`")))
    }
}

/// A form together with the conventions it is evaluated under.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FormTable {
    pub id: FormId,
    pub conventions: Conventions,
}

impl FormTable {
    pub fn new(id: FormId, conventions: Conventions) -> Self {
        Self { id, conventions }
    }

    pub fn eval_ext3(&self, x: &Ext3Vector, y: &Ext3Vector, basis: &Ext3Basis) -> Result<u64> {
        let c = self.conventions;
        let p = x.p;
        match self.id {
            FormId::Theta => theta_form(x, y, basis, c),
            FormId::Q => q_form(x, y, basis, c),
            FormId::J => j_form(x, y, basis, c),
            FormId::TJ => tj_form(x, y, basis, c),
            FormId::TJMinusJ => Ok((tj_form(x, y, basis, c)? + p - j_form(x, y, basis, c)?) % p),
            FormId::NegJ => theta_form(&x.pi_a(basis), &y.pi_b(basis), basis, c),
            FormId::ThetaA2bB2a => theta_form(&x.pi_a2b(basis), &y.pi_b2a(basis), basis, c),
            FormId::ThetaB2aA2b => theta_form(&x.pi_b2a(basis), &y.pi_a2b(basis), basis, c),
            FormId::QA2bB2a => q_form(&x.pi_a2b(basis), &y.pi_b2a(basis), basis, c),
            FormId::QB2aA2b => q_form(&x.pi_b2a(basis), &y.pi_a2b(basis), basis, c),
            id => Err(Error::InvalidParameter(format!(
                "{id} is a form on sp, not on ext3"
            ))),
        }
    }

    pub fn eval_sp(&self, x: &SpLieElement, y: &SpLieElement) -> Result<u64> {
        match self.id {
            FormId::T1 => t1_form(x, y),
            FormId::T2 => t2_form(x, y),
            FormId::K => k_form(x, y),
            FormId::TK => tk_form(x, y),
            id => Err(Error::InvalidParameter(format!(
                "{id} is a form on ext3, not on sp"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multilinear::ext3::Label;
    use proptest::prelude::*;

    const C: Conventions = Conventions {
        omega_sign: -1,
        weld_sign: -1,
    };

    fn w(b: &Ext3Basis, p: u64, t: [Label; 3]) -> Ext3Vector {
        Ext3Vector::wedge(b, p, t[0], t[1], t[2])
    }

    #[test]
    fn theta_and_q_examples() {
        let b = Ext3Basis::new(3);
        let (a1, a2, a3, b1, b2, b3) = (0, 1, 2, 3, 4, 5);
        let p = 5;
        let aaa = w(&b, p, [a1, a2, a3]);
        let bbb = w(&b, p, [b1, b2, b3]);
        assert_eq!(theta_form(&aaa, &bbb, &b, C).unwrap(), 4);
        let x = w(&b, p, [a1, a2, b2]);
        let y = w(&b, p, [b1, a3, b3]);
        assert_eq!(q_form(&x, &y, &b, C).unwrap(), 1); // −4 mod 5
        for t in [aaa, bbb, x, y] {
            assert_eq!(q_form(&t, &t, &b, C).unwrap(), 0);
        }
    }

    #[test]
    fn antisymmetry_on_basis() {
        let b = Ext3Basis::new(3);
        for i in 0..b.dim() {
            for j in 0..b.dim() {
                assert_eq!(theta_basis(&b, i, j, C), -theta_basis(&b, j, i, C));
            }
        }
    }

    #[test]
    fn sp_form_examples() {
        let z = SpLieElement::zero(3, 5);
        let y = SpLieElement::n(3, 5, 0, 1)
            .try_add(&SpLieElement::u(3, 5, 1, 1))
            .unwrap();
        for f in FormId::SP_BASIS {
            assert_eq!(FormTable::new(f, C).eval_sp(&z, &y).unwrap(), 0);
        }
        let l11 = SpLieElement::l(3, 5, 0, 0);
        let u11 = SpLieElement::u(3, 5, 0, 0);
        assert_eq!(tk_form(&l11, &u11).unwrap(), 1);
        assert_eq!(k_form(&l11, &u11).unwrap(), 0);
        let n11 = SpLieElement::n(3, 5, 0, 0);
        assert_eq!(t2_form(&n11, &n11).unwrap(), 1);
    }

    #[test]
    fn kind_mismatch_rejected() {
        let b = Ext3Basis::new(2);
        let x = Ext3Vector::zero(&b, 5);
        assert!(FormTable::new(FormId::T1, C).eval_ext3(&x, &x, &b).is_err());
        let z = SpLieElement::zero(2, 5);
        assert!(FormTable::new(FormId::Q, C).eval_sp(&z, &z).is_err());
    }

    #[test]
    fn names_parse() {
        for f in FormId::all() {
            assert_eq!(f.name().parse::<FormId>().unwrap(), f);
        }
        assert!("nope".parse::<FormId>().is_err());
    }

    proptest! {
        #[test]
        fn bilinear(xs in proptest::collection::vec(0u64..7, 20),
                    ys in proptest::collection::vec(0u64..7, 20),
                    zs in proptest::collection::vec(0u64..7, 20),
                    c in 0i64..7) {
            let b = Ext3Basis::new(3);
            let mk = |v: &Vec<u64>| Ext3Vector { g: 3, p: 7, coords: v.clone() };
            let (x, y, z) = (mk(&xs), mk(&ys), mk(&zs));
            let xz = x.scale(c).try_add(&z).unwrap();
            for f in [FormId::Theta, FormId::Q, FormId::J, FormId::TJ, FormId::QA2bB2a] {
                let t = FormTable::new(f, C);
                let lhs = t.eval_ext3(&xz, &y, &b).unwrap();
                let rhs = (mul_mod(reduce_i64(c, 7), t.eval_ext3(&x, &y, &b).unwrap(), 7)
                    + t.eval_ext3(&z, &y, &b).unwrap()) % 7;
                prop_assert_eq!(lhs, rhs);
            }
        }
    }
}
