//! Degree-1 and degree-2 labeled uni-trivalent trees.
//!
//! A degree-2 tree `T(w,x | y,z)` is stored as an ordered 4-tuple of basis
//! labels (left vertex leaves `w,x`, right vertex leaves `y,z`). Every
//! relation preserves the multiset of labels, so the relation subspace
//! splits into blocks of at most 24 tuples; each block keeps a fully
//! reduced echelon basis and canonical forms are the reductions modulo it.
//!
//! Degree-1 trees (tripods) are identified with Λ³H_p, so a
//! [`TripodElement`] is just an [`Ext3Vector`].

use std::collections::{BTreeMap, HashMap};

use crate::error::{dim_mismatch, Error, Result};
use crate::exactalg::{mul_mod, reduce_i64, FpSubspace, ResidueMatrix};
use crate::multilinear::{label_name, omega_labels, varpi_labels, Ext3Basis, Ext3Vector, Label};
use crate::symplectic::Conventions;

pub type TripodElement = Ext3Vector;

pub type Tuple = [Label; 4];

/// Which relations define the quotient.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RelationSet {
    pub ihx: bool,
}

impl Default for RelationSet {
    fn default() -> Self {
        Self { ihx: true }
    }
}

/// Relations generated from tuple `t`, as signed tuple combinations.
pub fn relations_at(t: Tuple, set: RelationSet) -> Vec<Vec<(Tuple, i64)>> {
    let [w, x, y, z] = t;
    let mut out = vec![
        vec![([w, x, y, z], 1), ([x, w, y, z], 1)],
        vec![([w, x, y, z], 1), ([w, x, z, y], 1)],
        vec![([w, x, y, z], 1), ([y, z, w, x], -1)],
    ];
    if set.ihx {
        out.push(vec![
            ([w, x, y, z], 1),
            ([w, z, y, x], -1),
            ([x, z, w, y], -1),
        ]);
    }
    out
}

#[derive(Clone, Debug)]
struct Block {
    tuples: Vec<Tuple>,
    index: HashMap<Tuple, usize>,
    relations: FpSubspace,
}

/// Relation data for 𝒜₂(H_p) at fixed `(g, p)`.
#[derive(Clone, Debug)]
pub struct TreeAlgebra {
    g: usize,
    p: u64,
    set: RelationSet,
    blocks: HashMap<Tuple, Block>,
}

fn sorted(t: Tuple) -> Tuple {
    let mut s = t;
    s.sort_unstable();
    s
}

fn permutations(m: Tuple) -> Vec<Tuple> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    if a != b && a != c && a != d && b != c && b != d && c != d {
                        out.push([m[a], m[b], m[c], m[d]]);
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

impl TreeAlgebra {
    pub fn new(g: usize, p: u64) -> Result<Self> {
        Self::with_relations(g, p, RelationSet::default())
    }

    pub fn with_relations(g: usize, p: u64, set: RelationSet) -> Result<Self> {
        if g == 0 || !crate::exactalg::is_prime(p) || p > u32::MAX as u64 {
            return Err(Error::InvalidParameter(format!(
                "tree algebra needs g ≥ 1 and a prime p, got g = {g}, p = {p}"
            )));
        }
        let n = 2 * g;
        let mut blocks = HashMap::new();
        for a in 0..n {
            for b in a..n {
                for c in b..n {
                    for d in c..n {
                        let m = [a, b, c, d];
                        let tuples = permutations(m);
                        let index: HashMap<Tuple, usize> =
                            tuples.iter().enumerate().map(|(i, t)| (*t, i)).collect();
                        let mut relations = FpSubspace::new(p as u32, tuples.len());
                        for &t in &tuples {
                            for rel in relations_at(t, set) {
                                let mut v = vec![0u32; tuples.len()];
                                for (u, s) in rel {
                                    let i = index[&u];
                                    v[i] = ((v[i] as u64 + reduce_i64(s, p)) % p) as u32;
                                }
                                relations.insert(&v)?;
                            }
                        }
                        blocks.insert(
                            m,
                            Block {
                                tuples,
                                index,
                                relations,
                            },
                        );
                    }
                }
            }
        }
        Ok(Self { g, p, set, blocks })
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn relation_set(&self) -> RelationSet {
        self.set
    }

    /// Number of raw tuples, `(2g)^4`.
    pub fn tuple_count(&self) -> usize {
        (2 * self.g).pow(4)
    }

    pub fn tuple_index(&self, t: Tuple) -> usize {
        let n = 2 * self.g;
        ((t[0] * n + t[1]) * n + t[2]) * n + t[3]
    }

    pub fn tuple_at(&self, mut i: usize) -> Tuple {
        let n = 2 * self.g;
        let mut t = [0; 4];
        for k in (0..4).rev() {
            t[k] = i % n;
            i /= n;
        }
        t
    }

    /// Dimension of 𝒜₂(H_p) under the chosen relations.
    pub fn dim(&self) -> usize {
        self.blocks
            .values()
            .map(|b| b.relations.quotient_dim())
            .sum()
    }

    /// All relation vectors in raw tuple coordinates.
    pub fn relation_vectors(&self) -> Vec<Vec<(usize, u64)>> {
        let mut out = Vec::new();
        for i in 0..self.tuple_count() {
            for rel in relations_at(self.tuple_at(i), self.set) {
                let mut acc: BTreeMap<usize, u64> = BTreeMap::new();
                for (t, s) in rel {
                    let e = acc.entry(self.tuple_index(t)).or_insert(0);
                    *e = (*e + reduce_i64(s, self.p)) % self.p;
                }
                out.push(acc.into_iter().filter(|&(_, c)| c != 0).collect());
            }
        }
        out
    }

    /// Representative in the fixed complement of the relation subspace.
    pub fn canonicalize(&self, t: &TreeH2) -> Result<TreeH2> {
        self.check(t)?;
        let mut by_block: BTreeMap<Tuple, Vec<(Tuple, u64)>> = BTreeMap::new();
        for (&u, &c) in &t.terms {
            by_block.entry(sorted(u)).or_default().push((u, c));
        }
        let mut out = TreeH2::zero(self.g, self.p);
        for (m, terms) in by_block {
            let block = &self.blocks[&m];
            let sparse: Vec<(usize, u32)> = terms
                .iter()
                .map(|&(u, c)| (block.index[&u], c as u32))
                .collect();
            let reduced = block.relations.reduce_sparse(&sparse)?;
            for (i, &c) in reduced.iter().enumerate() {
                if c != 0 {
                    out.terms.insert(block.tuples[i], c as u64);
                }
            }
        }
        Ok(out)
    }

    pub fn equivalent(&self, x: &TreeH2, y: &TreeH2) -> Result<bool> {
        Ok(self.canonicalize(x)? == self.canonicalize(y)?)
    }

    /// Column of the induced action of `m` (2g×2g, mod p) on raw tuple `i`.
    pub fn action_column(&self, m: &ResidueMatrix, i: usize) -> Vec<(usize, u64)> {
        let p = self.p;
        let n = 2 * self.g;
        let t = self.tuple_at(i);
        let support: Vec<Vec<(Label, u64)>> = t
            .iter()
            .map(|&c| {
                (0..n)
                    .filter_map(|r| {
                        let x = m.get(r, c);
                        (x != 0).then_some((r, x))
                    })
                    .collect()
            })
            .collect();
        let mut acc: BTreeMap<usize, u64> = BTreeMap::new();
        for &(w, cw) in &support[0] {
            for &(x, cx) in &support[1] {
                let cwx = mul_mod(cw, cx, p);
                for &(y, cy) in &support[2] {
                    let cwxy = mul_mod(cwx, cy, p);
                    for &(z, cz) in &support[3] {
                        let e = acc.entry(self.tuple_index([w, x, y, z])).or_insert(0);
                        *e = (*e + mul_mod(cwxy, cz, p)) % p;
                    }
                }
            }
        }
        acc.into_iter().filter(|&(_, c)| c != 0).collect()
    }

    fn check(&self, t: &TreeH2) -> Result<()> {
        if t.g != self.g || t.p != self.p {
            return Err(dim_mismatch(
                format!("genus {} mod {}", self.g, self.p),
                format!("genus {} mod {}", t.g, t.p),
            ));
        }
        Ok(())
    }
}

/// Formal 𝔽_p-combination of degree-2 trees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeH2 {
    pub g: usize,
    pub p: u64,
    terms: BTreeMap<Tuple, u64>,
}

impl TreeH2 {
    pub fn zero(g: usize, p: u64) -> Self {
        Self {
            g,
            p,
            terms: BTreeMap::new(),
        }
    }

    pub fn tree(g: usize, p: u64, t: Tuple) -> Self {
        let mut x = Self::zero(g, p);
        x.add_term(t, 1);
        x
    }

    pub fn add_term(&mut self, t: Tuple, c: i64) {
        let c = reduce_i64(c, self.p);
        let e = self.terms.entry(t).or_insert(0);
        *e = (*e + c) % self.p;
        if *e == 0 {
            self.terms.remove(&t);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (Tuple, u64)> + '_ {
        self.terms.iter().map(|(&t, &c)| (t, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        if self.g != rhs.g || self.p != rhs.p {
            return Err(dim_mismatch(
                format!("genus {} mod {}", self.g, self.p),
                format!("genus {} mod {}", rhs.g, rhs.p),
            ));
        }
        let mut out = self.clone();
        for (t, c) in rhs.terms() {
            out.add_term(t, c as i64);
        }
        Ok(out)
    }

    pub fn scale(&self, c: i64) -> Self {
        let c = reduce_i64(c, self.p);
        let mut out = Self::zero(self.g, self.p);
        for (t, x) in self.terms() {
            out.add_term(t, mul_mod(c, x, self.p) as i64);
        }
        out
    }

    pub fn format(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let n = |l| label_name(self.g, l);
        self.terms()
            .map(|([w, x, y, z], c)| format!("{c}*T({},{}|{},{})", n(w), n(x), n(y), n(z)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// `d₁(T(a,b|c,d)) = 2ω(a,b)ω(c,d) + ω(a,c)ω(b,d) − ω(a,d)ω(b,c)`.
pub fn d1_tuple(g: usize, t: Tuple, conv: Conventions) -> i64 {
    let w = |x, y| omega_labels(g, x, y, conv);
    let [a, b, c, d] = t;
    2 * w(a, b) * w(c, d) + w(a, c) * w(b, d) - w(a, d) * w(b, c)
}

/// `d₂(T(a,b|c,d)) = ϖ(a,c)ϖ(b,d) − ϖ(a,d)ϖ(b,c)`.
pub fn d2_tuple(g: usize, t: Tuple) -> i64 {
    let v = |x, y| varpi_labels(g, x, y);
    let [a, b, c, d] = t;
    v(a, c) * v(b, d) - v(a, d) * v(b, c)
}

fn linear(t: &TreeH2, f: impl Fn(Tuple) -> i64) -> u64 {
    t.terms().fold(0, |acc, (u, c)| {
        (acc + mul_mod(c, reduce_i64(f(u), t.p), t.p)) % t.p
    })
}

pub fn d1(t: &TreeH2, conv: Conventions) -> u64 {
    linear(t, |u| d1_tuple(t.g, u, conv))
}

pub fn d2(t: &TreeH2) -> u64 {
    linear(t, |u| d2_tuple(t.g, u))
}

/// Welding of two tripods `(u₁,u₂,u₃)`, `(v₁,v₂,v₃)`:
/// `s_w Σ ω(uᵢ,vⱼ) T(u_{i+1},u_{i+2} | v_{j+1},v_{j+2})`.
pub fn bracket_triples(
    g: usize,
    p: u64,
    u: [Label; 3],
    v: [Label; 3],
    conv: Conventions,
) -> TreeH2 {
    let mut out = TreeH2::zero(g, p);
    let s = conv.weld_sign as i64;
    for i in 0..3 {
        for j in 0..3 {
            let w = omega_labels(g, u[i], v[j], conv);
            if w != 0 {
                let t = [
                    u[(i + 1) % 3],
                    u[(i + 2) % 3],
                    v[(j + 1) % 3],
                    v[(j + 2) % 3],
                ];
                out.add_term(t, s * w);
            }
        }
    }
    out
}

/// Bilinear extension of [`bracket_triples`] (not canonicalized).
pub fn bracket(
    x: &TripodElement,
    y: &TripodElement,
    basis: &Ext3Basis,
    conv: Conventions,
) -> Result<TreeH2> {
    if x.g != y.g || x.p != y.p || x.g != basis.genus() {
        return Err(dim_mismatch(
            format!("genus {} mod {}", x.g, x.p),
            format!("genus {} mod {}", y.g, y.p),
        ));
    }
    let mut out = TreeH2::zero(x.g, x.p);
    for (i, cx) in x.support() {
        for (j, cy) in y.support() {
            let b = bracket_triples(x.g, x.p, basis.triple(i), basis.triple(j), conv);
            out = out.try_add(&b.scale(mul_mod(cx, cy, x.p) as i64))?;
        }
    }
    Ok(out)
}

/// `d₁([e_i, e_j])` on basis tripods, as an integer.
pub fn d1_bracket_basis(basis: &Ext3Basis, i: usize, j: usize, conv: Conventions) -> i64 {
    weld_sum(basis, i, j, conv, |t| d1_tuple(basis.genus(), t, conv))
}

/// `d₂([e_i, e_j])` on basis tripods, as an integer.
pub fn d2_bracket_basis(basis: &Ext3Basis, i: usize, j: usize, conv: Conventions) -> i64 {
    weld_sum(basis, i, j, conv, |t| d2_tuple(basis.genus(), t))
}

fn weld_sum(
    basis: &Ext3Basis,
    i: usize,
    j: usize,
    conv: Conventions,
    f: impl Fn(Tuple) -> i64,
) -> i64 {
    let g = basis.genus();
    let (u, v) = (basis.triple(i), basis.triple(j));
    let mut acc = 0;
    for a in 0..3 {
        for b in 0..3 {
            let w = omega_labels(g, u[a], v[b], conv);
            if w != 0 {
                acc += w * f([
                    u[(a + 1) % 3],
                    u[(a + 2) % 3],
                    v[(b + 1) % 3],
                    v[(b + 2) % 3],
                ]);
            }
        }
    }
    conv.weld_sign as i64 * acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const C: Conventions = Conventions {
        omega_sign: -1,
        weld_sign: -1,
    };
    // genus 3 labels
    const A1: Label = 0;
    const A2: Label = 1;
    const A3: Label = 2;
    const B1: Label = 3;
    const B2: Label = 4;
    const B3: Label = 5;

    fn combo(g: usize, p: u64, terms: &[(Tuple, i64)]) -> TreeH2 {
        let mut t = TreeH2::zero(g, p);
        for &(u, c) in terms {
            t.add_term(u, c);
        }
        t
    }

    #[test]
    fn relation_examples_vanish() {
        let alg = TreeAlgebra::new(3, 5).unwrap();
        let (w, x, y, z) = (A1, B2, A3, B1);
        let as_rel = combo(3, 5, &[([w, x, y, z], 1), ([x, w, y, z], 1)]);
        assert!(alg.canonicalize(&as_rel).unwrap().is_zero());
        let swap = combo(3, 5, &[([w, x, y, z], 1), ([y, z, w, x], -1)]);
        assert!(alg.canonicalize(&swap).unwrap().is_zero());
        let ihx = combo(
            3,
            5,
            &[
                ([B1, A2, A1, B2], 1),
                ([B1, B2, A1, A2], -1),
                ([A2, B2, B1, A1], -1),
            ],
        );
        assert!(alg.canonicalize(&ihx).unwrap().is_zero());
    }

    #[test]
    fn ihx_dropped_keeps_instance_nonzero() {
        let alg = TreeAlgebra::with_relations(3, 5, RelationSet { ihx: false }).unwrap();
        let ihx = combo(
            3,
            5,
            &[
                ([B1, A2, A1, B2], 1),
                ([B1, B2, A1, A2], -1),
                ([A2, B2, B1, A1], -1),
            ],
        );
        assert!(!alg.canonicalize(&ihx).unwrap().is_zero());
    }

    #[test]
    fn d_values_on_single_tree() {
        let t = [A2, B2, A2, B2];
        assert_eq!(d1_tuple(3, t, C), 3);
        assert_eq!(d2_tuple(3, t), -1);
    }

    #[test]
    fn d_maps_kill_relations() {
        let g: usize = 3;
        for i in 0..(2 * g).pow(4) {
            let alg_t = {
                let n = 2 * g;
                [i / (n * n * n), (i / (n * n)) % n, (i / n) % n, i % n]
            };
            for rel in relations_at(alg_t, RelationSet::default()) {
                let s1: i64 = rel.iter().map(|&(t, c)| c * d1_tuple(g, t, C)).sum();
                let s2: i64 = rel.iter().map(|&(t, c)| c * d2_tuple(g, t)).sum();
                assert_eq!((s1, s2), (0, 0), "{rel:?}");
            }
        }
    }

    #[test]
    fn table_tree_columns() {
        let b = Ext3Basis::new(3);
        let pairs = [
            ([A1, A2, A3], [B1, B2, B3], 3, 3),
            ([A1, A2, B2], [B1, A2, B2], 5, -1),
            ([A1, A2, B2], [B1, A3, B3], 2, 0),
        ];
        for (x, y, e1, e2) in pairs {
            let x = Ext3Vector::wedge(&b, 7, x[0], x[1], x[2]);
            let y = Ext3Vector::wedge(&b, 7, y[0], y[1], y[2]);
            let t = bracket(&x, &y, &b, C).unwrap();
            assert_eq!(d1(&t, C), reduce_i64(e1, 7));
            assert_eq!(d2(&t), reduce_i64(e2, 7));
        }
    }

    #[test]
    fn disjoint_support_brackets_to_zero() {
        let b = Ext3Basis::new(3);
        let x = Ext3Vector::wedge(&b, 5, A1, A2, B2);
        let y = Ext3Vector::wedge(&b, 5, A1, A3, B3);
        assert!(bracket(&x, &y, &b, C).unwrap().is_zero());
    }

    #[test]
    fn a12_generators_have_invertible_d_matrix() {
        let t1 = TreeH2::tree(3, 5, [B1, B2, A1, A2]);
        let t2 = TreeH2::tree(3, 5, [A1, B1, A2, B2]);
        assert_eq!((d1(&t1, C), d2(&t1)), (1, 1));
        assert_eq!((d1(&t2, C), d2(&t2)), (2, 0));
    }

    #[test]
    fn linear_identities_on_basis_pairs() {
        use crate::multilinear::{FormId, FormTable};
        let (g, p) = (4, 5);
        let b = Ext3Basis::new(g);
        let form = |id| FormTable::new(id, C);
        let half = 3; // 2⁻¹ mod 5
        for i in 0..b.dim() {
            let x = Ext3Vector::wedge(&b, p, b.triple(i)[0], b.triple(i)[1], b.triple(i)[2]);
            for j in 0..b.dim() {
                let y = Ext3Vector::wedge(&b, p, b.triple(j)[0], b.triple(j)[1], b.triple(j)[2]);
                let th = form(FormId::Theta).eval_ext3(&x, &y, &b).unwrap();
                let q = form(FormId::Q).eval_ext3(&x, &y, &b).unwrap();
                let tjj = form(FormId::TJMinusJ).eval_ext3(&x, &y, &b).unwrap();
                let e1 = reduce_i64(-3 * th as i64 - (half * q) as i64, p);
                let e2 = reduce_i64(th as i64 - 4 * tjj as i64, p);
                assert_eq!(reduce_i64(d1_bracket_basis(&b, i, j, C), p), e1, "{i} {j}");
                assert_eq!(reduce_i64(d2_bracket_basis(&b, i, j, C), p), e2, "{i} {j}");
            }
        }
    }

    #[test]
    fn tuple_index_roundtrip() {
        let alg = TreeAlgebra::new(2, 5).unwrap();
        for i in 0..alg.tuple_count() {
            assert_eq!(alg.tuple_index(alg.tuple_at(i)), i);
        }
    }

    #[test]
    fn identity_action_is_identity() {
        let alg = TreeAlgebra::new(2, 5).unwrap();
        let id = ResidueMatrix::identity(5, 4);
        for i in 0..alg.tuple_count() {
            assert_eq!(alg.action_column(&id, i), vec![(i, 1)]);
        }
    }

    fn shared() -> &'static TreeAlgebra {
        static ALG: std::sync::OnceLock<TreeAlgebra> = std::sync::OnceLock::new();
        ALG.get_or_init(|| TreeAlgebra::new(3, 5).unwrap())
    }

    fn tuple3() -> impl Strategy<Value = [Label; 3]> {
        proptest::array::uniform3(0usize..6)
    }

    proptest! {
        #[test]
        fn canonicalize_idempotent_and_linear(
            ts in proptest::collection::vec((proptest::array::uniform4(0usize..6), -4i64..5), 0..8),
            us in proptest::collection::vec((proptest::array::uniform4(0usize..6), -4i64..5), 0..8),
        ) {
            let alg = shared();
            let x = combo(3, 5, &ts);
            let y = combo(3, 5, &us);
            let cx = alg.canonicalize(&x).unwrap();
            prop_assert_eq!(alg.canonicalize(&cx).unwrap(), cx.clone());
            let cy = alg.canonicalize(&y).unwrap();
            let sum = alg.canonicalize(&x.try_add(&y).unwrap()).unwrap();
            prop_assert_eq!(sum, alg.canonicalize(&cx.try_add(&cy).unwrap()).unwrap());
        }

        #[test]
        fn bracket_antisymmetric(u in tuple3(), v in tuple3()) {
            let alg = shared();
            let lhs = bracket_triples(3, 5, u, v, C);
            let rhs = bracket_triples(3, 5, v, u, C).scale(-1);
            prop_assert!(alg.equivalent(&lhs, &rhs).unwrap());
        }
    }
}
