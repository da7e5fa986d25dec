use std::collections::HashMap;

use crate::error::{dim_mismatch, Error, Result};
use crate::exactalg::{mul_mod, reduce_i64, ResidueMatrix};
use crate::symplectic::Conventions;

/// Index of a basis vector of H: `0..g` are a₁…a_g, `g..2g` are b₁…b_g.
pub type Label = usize;

pub fn label_name(g: usize, l: Label) -> String {
    if l < g {
        format!("a{}", l + 1)
    } else {
        format!("b{}", l - g + 1)
    }
}

/// Parses `a3` / `b1` into a label.
pub fn parse_label(g: usize, s: &str) -> Result<Label> {
    let err = || Error::InvalidParameter(format!("bad basis label `{s}` for genus {g}"));
    let (side, num) = s.split_at(1.min(s.len()));
    let i: usize = num.parse().map_err(|_| err())?;
    if i == 0 || i > g {
        return Err(err());
    }
    match side {
        "a" => Ok(i - 1),
        "b" => Ok(g + i - 1),
        _ => Err(err()),
    }
}

pub fn is_a(g: usize, l: Label) -> bool {
    l < g
}

/// Position in the order a₁ < b₁ < a₂ < b₂ < …
fn key(g: usize, l: Label) -> usize {
    if l < g {
        2 * l
    } else {
        2 * (l - g) + 1
    }
}

/// ω on basis labels as an integer in {−1, 0, 1}.
pub fn omega_labels(g: usize, x: Label, y: Label, conv: Conventions) -> i64 {
    let s = conv.omega_sign as i64;
    if x < g && y == x + g {
        s
    } else if x >= g && y + g == x {
        -s
    } else {
        0
    }
}

/// The symmetric pairing with matrix `(0 Id; Id 0)`.
pub fn varpi_labels(g: usize, x: Label, y: Label) -> i64 {
    i64::from((x < g && y == x + g) || (x >= g && y + g == x))
}

/// Vector of H_p = 𝔽_p^{2g}.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HVector {
    pub g: usize,
    pub p: u64,
    pub coords: Vec<u64>,
}

impl HVector {
    pub fn zero(g: usize, p: u64) -> Self {
        Self {
            g,
            p,
            coords: vec![0; 2 * g],
        }
    }

    pub fn basis(g: usize, p: u64, l: Label) -> Self {
        let mut v = Self::zero(g, p);
        v.coords[l] = 1;
        v
    }

    fn add_scaled(&mut self, l: Label, c: i64) {
        self.coords[l] = (self.coords[l] + reduce_i64(c, self.p)) % self.p;
    }
}

pub fn omega(u: &HVector, v: &HVector, conv: Conventions) -> Result<u64> {
    if u.g != v.g || u.p != v.p {
        return Err(dim_mismatch(
            format!("genus {}", u.g),
            format!("genus {}", v.g),
        ));
    }
    let (g, p) = (u.g, u.p);
    let mut acc = 0u64;
    for x in 0..2 * g {
        if u.coords[x] == 0 {
            continue;
        }
        for y in 0..2 * g {
            let w = omega_labels(g, x, y, conv);
            if w != 0 && v.coords[y] != 0 {
                acc =
                    (acc + mul_mod(mul_mod(u.coords[x], v.coords[y], p), reduce_i64(w, p), p)) % p;
            }
        }
    }
    Ok(acc)
}

/// Basis of Λ³H: increasing triples in the order a₁ < b₁ < a₂ < …
#[derive(Clone, Debug)]
pub struct Ext3Basis {
    g: usize,
    triples: Vec<[Label; 3]>,
    index: HashMap<[Label; 3], usize>,
}

impl Ext3Basis {
    pub fn new(g: usize) -> Self {
        let mut by_key: Vec<Label> = (0..2 * g).collect();
        by_key.sort_by_key(|&l| key(g, l));
        let mut triples = Vec::new();
        for i in 0..by_key.len() {
            for j in i + 1..by_key.len() {
                for k in j + 1..by_key.len() {
                    triples.push([by_key[i], by_key[j], by_key[k]]);
                }
            }
        }
        let index = triples.iter().enumerate().map(|(i, t)| (*t, i)).collect();
        Self { g, triples, index }
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn dim(&self) -> usize {
        self.triples.len()
    }

    pub fn triple(&self, i: usize) -> [Label; 3] {
        self.triples[i]
    }

    /// `u∧v∧w = sign · e_idx`, or `None` when two labels coincide.
    pub fn wedge(&self, u: Label, v: Label, w: Label) -> Option<(i64, usize)> {
        let mut t = [u, v, w];
        let mut sign = 1i64;
        // bubble sort by key, tracking the permutation sign
        for pass in 0..2 {
            for i in 0..2 - pass {
                let (ki, kj) = (key(self.g, t[i]), key(self.g, t[i + 1]));
                if ki == kj {
                    return None;
                }
                if ki > kj {
                    t.swap(i, i + 1);
                    sign = -sign;
                }
            }
        }
        Some((sign, self.index[&t]))
    }

    /// Number of a-labels in basis triple `i`.
    pub fn a_count(&self, i: usize) -> usize {
        self.triples[i].iter().filter(|&&l| l < self.g).count()
    }

    pub fn name(&self, i: usize) -> String {
        let t = self.triples[i];
        format!(
            "{}^{}^{}",
            label_name(self.g, t[0]),
            label_name(self.g, t[1]),
            label_name(self.g, t[2])
        )
    }

    /// Column of Λ³M on basis vector `i`, for `M` a 2g×2g matrix mod p.
    pub fn action_column(&self, m: &ResidueMatrix, i: usize) -> Vec<(usize, u64)> {
        let p = m.modulus();
        let [u, v, w] = self.triples[i];
        let support = |c: Label| -> Vec<(Label, u64)> {
            (0..2 * self.g)
                .filter_map(|r| {
                    let x = m.get(r, c);
                    (x != 0).then_some((r, x))
                })
                .collect()
        };
        let (su, sv, sw) = (support(u), support(v), support(w));
        let mut acc: HashMap<usize, u64> = HashMap::new();
        for &(x, cx) in &su {
            for &(y, cy) in &sv {
                if x == y {
                    continue;
                }
                let cxy = mul_mod(cx, cy, p);
                for &(z, cz) in &sw {
                    if let Some((s, idx)) = self.wedge(x, y, z) {
                        let c = mul_mod(cxy, cz, p);
                        let c = if s < 0 { (p - c) % p } else { c };
                        let e = acc.entry(idx).or_insert(0);
                        *e = (*e + c) % p;
                    }
                }
            }
        }
        let mut out: Vec<(usize, u64)> = acc.into_iter().filter(|&(_, c)| c != 0).collect();
        out.sort_unstable();
        out
    }
}

/// Element of Λ³H_p in the basis of [`Ext3Basis`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ext3Vector {
    pub g: usize,
    pub p: u64,
    pub coords: Vec<u64>,
}

impl Ext3Vector {
    pub fn zero(basis: &Ext3Basis, p: u64) -> Self {
        Self {
            g: basis.genus(),
            p,
            coords: vec![0; basis.dim()],
        }
    }

    pub fn wedge(basis: &Ext3Basis, p: u64, u: Label, v: Label, w: Label) -> Self {
        let mut x = Self::zero(basis, p);
        if let Some((s, i)) = basis.wedge(u, v, w) {
            x.coords[i] = reduce_i64(s, p);
        }
        x
    }

    pub fn support(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.coords
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (i, c))
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        if self.g != rhs.g || self.p != rhs.p {
            return Err(dim_mismatch(self.coords.len(), rhs.coords.len()));
        }
        let coords = self
            .coords
            .iter()
            .zip(&rhs.coords)
            .map(|(a, b)| (a + b) % self.p)
            .collect();
        Ok(Self { coords, ..*self })
    }

    pub fn scale(&self, c: i64) -> Self {
        let c = reduce_i64(c, self.p);
        Self {
            coords: self.coords.iter().map(|&x| mul_mod(x, c, self.p)).collect(),
            ..*self
        }
    }

    fn project(&self, basis: &Ext3Basis, a_count: usize) -> Self {
        let coords = self
            .coords
            .iter()
            .enumerate()
            .map(|(i, &c)| if basis.a_count(i) == a_count { c } else { 0 })
            .collect();
        Self { coords, ..*self }
    }

    /// Λ³A component.
    pub fn pi_a(&self, basis: &Ext3Basis) -> Self {
        self.project(basis, 3)
    }

    /// Λ³B component.
    pub fn pi_b(&self, basis: &Ext3Basis) -> Self {
        self.project(basis, 0)
    }

    /// Λ²A ∧ B component.
    pub fn pi_a2b(&self, basis: &Ext3Basis) -> Self {
        self.project(basis, 2)
    }

    /// A ∧ Λ²B component.
    pub fn pi_b2a(&self, basis: &Ext3Basis) -> Self {
        self.project(basis, 1)
    }

    /// Image under Λ³M.
    pub fn act(&self, basis: &Ext3Basis, m: &ResidueMatrix) -> Self {
        let mut out = Self::zero(basis, self.p);
        for (i, c) in self.support() {
            for (j, v) in basis.action_column(m, i) {
                out.coords[j] = (out.coords[j] + mul_mod(c, v, self.p)) % self.p;
            }
        }
        out
    }
}

/// `C(a∧b∧c) = 2[ω(b,c)a + ω(c,a)b + ω(a,b)c]`, extended linearly.
pub fn contract(x: &Ext3Vector, basis: &Ext3Basis, conv: Conventions) -> HVector {
    let g = x.g;
    let mut out = HVector::zero(g, x.p);
    for (i, c) in x.support() {
        let [a, b, cc] = basis.triple(i);
        let c = c as i64;
        out.add_scaled(a, 2 * c * omega_labels(g, b, cc, conv));
        out.add_scaled(b, 2 * c * omega_labels(g, cc, a, conv));
        out.add_scaled(cc, 2 * c * omega_labels(g, a, b, conv));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const C: Conventions = Conventions {
        omega_sign: -1,
        weld_sign: -1,
    };

    #[test]
    fn basis_size_and_order() {
        let b = Ext3Basis::new(3);
        assert_eq!(b.dim(), 20);
        // a₁ < b₁ < a₂: first triple is a₁∧b₁∧a₂
        assert_eq!(b.name(0), "a1^b1^a2");
        let (s, i) = b.wedge(3, 0, 1).unwrap(); // b₁∧a₁∧a₂ = −a₁∧b₁∧a₂
        assert_eq!((s, i), (-1, 0));
        assert!(b.wedge(1, 1, 2).is_none());
        assert_eq!(Ext3Basis::new(4).dim(), 56);
    }

    #[test]
    fn labels_round_trip() {
        for l in 0..8 {
            assert_eq!(parse_label(4, &label_name(4, l)).unwrap(), l);
        }
        assert!(parse_label(4, "c1").is_err());
        assert!(parse_label(4, "a5").is_err());
        assert!(parse_label(4, "a0").is_err());
    }

    #[test]
    fn omega_examples() {
        let h = |l| HVector::basis(3, 5, l);
        assert_eq!(omega(&h(0), &h(1), C).unwrap(), 0);
        assert_eq!(omega(&h(0), &h(3), C).unwrap(), 4);
        assert_eq!(omega(&h(3), &h(0), C).unwrap(), 1);
    }

    #[test]
    fn contraction_examples() {
        let b = Ext3Basis::new(3);
        let p = 5;
        let (a1, a2, a3, b1, b2, b3) = (0, 1, 2, 3, 4, 5);
        assert_eq!(
            contract(&Ext3Vector::wedge(&b, p, a1, a2, a3), &b, C),
            HVector::zero(3, p)
        );
        let mut e = HVector::zero(3, p);
        e.coords[a1] = 3; // 2·(−1) mod 5
        assert_eq!(contract(&Ext3Vector::wedge(&b, p, a1, a2, b2), &b, C), e);
        let mut e = HVector::zero(3, p);
        e.coords[b1] = 3;
        assert_eq!(contract(&Ext3Vector::wedge(&b, p, b1, a3, b3), &b, C), e);
    }

    #[test]
    fn projections_sum_to_identity() {
        let b = Ext3Basis::new(3);
        let x = Ext3Vector {
            g: 3,
            p: 7,
            coords: (0..20).map(|i| i as u64 % 7).collect(),
        };
        let sum = x
            .pi_a(&b)
            .try_add(&x.pi_b(&b))
            .unwrap()
            .try_add(&x.pi_a2b(&b))
            .unwrap()
            .try_add(&x.pi_b2a(&b))
            .unwrap();
        assert_eq!(sum, x);
        let w = Ext3Vector::wedge(&b, 7, 0, 1, 2);
        assert_eq!(w.pi_a(&b), w);
        let w = Ext3Vector::wedge(&b, 7, 0, 1, 4);
        assert_eq!(w.pi_a(&b), Ext3Vector::zero(&b, 7));
        assert_eq!(w.pi_a2b(&b), w);
    }

    #[test]
    fn action_of_identity_and_swap() {
        let b = Ext3Basis::new(2);
        let id = ResidueMatrix::identity(5, 4);
        for i in 0..b.dim() {
            assert_eq!(b.action_column(&id, i), vec![(i, 1)]);
        }
    }
}
