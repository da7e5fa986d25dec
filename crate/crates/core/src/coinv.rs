//! Coinvariant quotients `V_G` of finite 𝔽_p-modules of GL_g(ℤ) and SL_g(ℤ).
//!
//! The group is replaced by its generators S = {Id + e_ij (i ≠ j), D_g}
//! (only the elementary ones for SL). Since `gh − 1 = (g − 1)h + (h − 1)`,
//! the augmentation ideal is the right ideal generated by the `s − 1`, so
//! `I·V = span{(s − 1)w : s ∈ S, w a basis vector}`; it is automatically
//! stable under the group. [`augmentation_closure`] nonetheless runs the
//! fixed-point iteration on a dense echelon basis as a reference path.
//!
//! The fast path uses the diagonal sign matrices of the group. When such a
//! matrix acts on a basis vector by −1, `(t − 1)w = −2w`, so for odd p every
//! vector of nonzero weight lies in `I·V`. The quotient is therefore
//! `V₀ / π₀(I·V + R)`, where `V₀` is the weight-zero span and `R` holds any
//! defining relations of the module.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactalg::{is_prime, mul_mod, rank_mod_p, reduce_i64, FpSubspace, ResidueMatrix};
use crate::multilinear::{parse_label, Ext3Basis, Ext3Vector, FormId, FormTable, Label};
use crate::symplectic::{d_g, elementary, embed_gl, Conventions, SpLieElement};
use crate::trees::{d1_tuple, d2_tuple, RelationSet, TreeAlgebra};

/// Largest ambient dimension accepted by the weight-zero engine.
pub const FEASIBLE_DIM: usize = 20_000;
/// Largest ambient dimension accepted by the dense closure.
pub const DENSE_DIM: usize = 1_000;

pub type SparseVec = Vec<(usize, u64)>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpaceId {
    /// Symmetric matrices with `β ↦ GβᵗG`.
    Sym,
    Gl,
    Sl,
    Sp,
    Ext3,
    Ext3Tensor,
    Ext3Wedge,
    SpTensor,
    SpWedge,
    A2Tree,
}

impl SpaceId {
    pub fn all() -> [SpaceId; 10] {
        use SpaceId::*;
        [
            Sym, Gl, Sl, Sp, Ext3, Ext3Tensor, Ext3Wedge, SpTensor, SpWedge, A2Tree,
        ]
    }

    pub fn name(self) -> &'static str {
        match self {
            SpaceId::Sym => "sym",
            SpaceId::Gl => "gl",
            SpaceId::Sl => "sl",
            SpaceId::Sp => "sp",
            SpaceId::Ext3 => "ext3",
            SpaceId::Ext3Tensor => "ext3-tensor",
            SpaceId::Ext3Wedge => "ext3-wedge",
            SpaceId::SpTensor => "sp-tensor",
            SpaceId::SpWedge => "sp-wedge",
            SpaceId::A2Tree => "a2tree",
        }
    }

    fn base(self) -> Base {
        match self {
            SpaceId::Sym => Base::Sym,
            SpaceId::Gl => Base::Gl,
            SpaceId::Sl => Base::Sl,
            SpaceId::Sp | SpaceId::SpTensor | SpaceId::SpWedge => Base::Sp,
            SpaceId::Ext3 | SpaceId::Ext3Tensor | SpaceId::Ext3Wedge => Base::Ext3,
            SpaceId::A2Tree => Base::Tree,
        }
    }

    fn shape(self) -> Shape {
        match self {
            SpaceId::Ext3Tensor | SpaceId::SpTensor => Shape::Tensor,
            SpaceId::Ext3Wedge | SpaceId::SpWedge => Shape::Wedge,
            _ => Shape::Single,
        }
    }
}

impl fmt::Display for SpaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SpaceId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let alias = match s {
            "ext3⊗ext3" | "ext3-ext3" => "ext3-tensor",
            "Λ²ext3" | "ext3^ext3" => "ext3-wedge",
            "sp⊗sp" | "sp-sp" => "sp-tensor",
            "Λ²sp" | "sp^sp" => "sp-wedge",
            other => other,
        };
        SpaceId::all()
            .into_iter()
            .find(|x| x.name() == alias)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown space `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Group {
    Gl,
    Sl,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Base {
    Sym,
    Gl,
    Sl,
    Sp,
    Ext3,
    Tree,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Shape {
    Single,
    Tensor,
    Wedge,
}

/// Symmetric-matrix coordinates (i ≤ j).
fn sym_pairs(g: usize) -> Vec<(usize, usize)> {
    (0..g).flat_map(|i| (i..g).map(move |j| (i, j))).collect()
}

/// Traceless coordinates: off-diagonal entries, then x_ii for i < g − 1.
fn sl_coords(g: usize) -> Vec<(usize, usize)> {
    let mut v: Vec<(usize, usize)> = (0..g)
        .flat_map(|i| (0..g).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    v.extend((0..g.saturating_sub(1)).map(|i| (i, i)));
    v
}

fn sparse(v: &[u64]) -> SparseVec {
    v.iter()
        .enumerate()
        .filter(|&(_, &c)| c != 0)
        .map(|(i, &c)| (i, c))
        .collect()
}

fn gl_unit(g: usize, p: u64, i: usize, j: usize) -> ResidueMatrix {
    let mut m = ResidueMatrix::zeros(p, g, g);
    m.set(i, j, 1);
    m
}

/// Context shared by all generators of one space.
#[derive(Clone, Debug)]
struct BaseCtx {
    base: Base,
    g: usize,
    p: u64,
    ext3: Option<Ext3Basis>,
    trees: Option<TreeAlgebra>,
}

impl BaseCtx {
    fn new(base: Base, g: usize, p: u64, set: RelationSet) -> Result<Self> {
        Ok(Self {
            base,
            g,
            p,
            ext3: (base == Base::Ext3).then(|| Ext3Basis::new(g)),
            trees: if base == Base::Tree {
                Some(TreeAlgebra::with_relations(g, p, set)?)
            } else {
                None
            },
        })
    }

    fn dim(&self) -> usize {
        let g = self.g;
        match self.base {
            Base::Sym => g * (g + 1) / 2,
            Base::Gl => g * g,
            Base::Sl => g * g - 1,
            Base::Sp => SpLieElement::coord_dim(g),
            Base::Ext3 => self.ext3.as_ref().map_or(0, Ext3Basis::dim),
            Base::Tree => (2 * g).pow(4),
        }
    }

    /// Columns of the action of `gm ∈ GL_g` on the base module.
    fn columns(&self, gm: &ResidueMatrix) -> Result<Vec<SparseVec>> {
        let (g, p) = (self.g, self.p);
        let n = self.dim();
        Ok(match self.base {
            Base::Sym => {
                let pairs = sym_pairs(g);
                let gt = gm.transpose();
                pairs
                    .iter()
                    .map(|&(i, j)| {
                        let mut e = gl_unit(g, p, i, j);
                        e.set(j, i, 1);
                        let x = gm.try_mul(&e)?.try_mul(&gt)?;
                        Ok(sparse(
                            &pairs.iter().map(|&(r, c)| x.get(r, c)).collect::<Vec<_>>(),
                        ))
                    })
                    .collect::<Result<_>>()?
            }
            Base::Gl | Base::Sl => {
                let inv = gm.inverse_mod()?;
                let coords = if self.base == Base::Gl {
                    (0..g)
                        .flat_map(|i| (0..g).map(move |j| (i, j)))
                        .collect::<Vec<_>>()
                } else {
                    sl_coords(g)
                };
                coords
                    .iter()
                    .map(|&(i, j)| {
                        let mut e = gl_unit(g, p, i, j);
                        if self.base == Base::Sl && i == j {
                            e.set(g - 1, g - 1, p - 1);
                        }
                        let x = gm.try_mul(&e)?.try_mul(&inv)?;
                        Ok(sparse(
                            &coords.iter().map(|&(r, c)| x.get(r, c)).collect::<Vec<_>>(),
                        ))
                    })
                    .collect::<Result<_>>()?
            }
            Base::Sp => (0..n)
                .map(|k| {
                    let mut unit = vec![0; n];
                    unit[k] = 1;
                    let x = SpLieElement::from_coords(g, p, &unit)?.act(gm)?;
                    Ok(sparse(&x.coords()))
                })
                .collect::<Result<_>>()?,
            Base::Ext3 => {
                let m = embed_gl(gm)?;
                let basis = self.ext3.as_ref().expect("ext3 basis");
                (0..n).map(|i| basis.action_column(m.body(), i)).collect()
            }
            Base::Tree => {
                let m = embed_gl(gm)?;
                let alg = self.trees.as_ref().expect("tree algebra");
                (0..n).map(|i| alg.action_column(m.body(), i)).collect()
            }
        })
    }
}

/// A finite 𝔽_p-module with the action of a generating set of the group.
#[derive(Clone, Debug)]
pub struct ActionSpec {
    pub space: SpaceId,
    pub group: Group,
    pub g: usize,
    pub p: u64,
    ctx: BaseCtx,
    dim: usize,
    base_dim: usize,
    shape: Shape,
    generators: Vec<(String, Vec<SparseVec>)>,
    torus: Vec<(String, Vec<SparseVec>)>,
    relations: Vec<SparseVec>,
}

impl ActionSpec {
    pub fn new(space: SpaceId, group: Group, g: usize, p: u64) -> Result<Self> {
        Self::with_relations(space, group, g, p, RelationSet::default())
    }

    /// As [`new`](Self::new), with the tree relations chosen explicitly.
    pub fn with_relations(
        space: SpaceId,
        group: Group,
        g: usize,
        p: u64,
        set: RelationSet,
    ) -> Result<Self> {
        if g == 0 || p < 3 || !is_prime(p) || p > u32::MAX as u64 {
            return Err(Error::InvalidParameter(format!(
                "coinvariants need g ≥ 1 and an odd prime p, got g = {g}, p = {p}"
            )));
        }
        let ctx = BaseCtx::new(space.base(), g, p, set)?;
        let base_dim = ctx.dim();
        let shape = space.shape();
        let dim = match shape {
            Shape::Single => base_dim,
            Shape::Tensor => base_dim * base_dim,
            Shape::Wedge => base_dim * base_dim.saturating_sub(1) / 2,
        };
        if dim > FEASIBLE_DIM {
            return Err(Error::Infeasible {
                dimension: dim,
                limit: FEASIBLE_DIM,
            });
        }
        let mut generators = Vec::new();
        for i in 0..g {
            for j in 0..g {
                if i != j {
                    let e = elementary(g, p, i, j, 1);
                    generators.push((format!("E{}{}", i + 1, j + 1), ctx.columns(&e)?));
                }
            }
        }
        if group == Group::Gl {
            generators.push(("D".to_string(), ctx.columns(&d_g(g, p))?));
        }
        let flips: Vec<Vec<usize>> = match group {
            Group::Gl => (0..g).map(|k| vec![k]).collect(),
            Group::Sl => (0..g.saturating_sub(1)).map(|k| vec![k, k + 1]).collect(),
        };
        let mut torus = Vec::new();
        for f in flips {
            let t = ResidueMatrix::from_fn(p, g, g, |r, c| match (r == c, f.contains(&r)) {
                (true, true) => -1,
                (true, false) => 1,
                _ => 0,
            });
            let name = f
                .iter()
                .map(|k| (k + 1).to_string())
                .collect::<Vec<_>>()
                .join(",");
            torus.push((format!("T[{name}]"), ctx.columns(&t)?));
        }
        let relations = ctx
            .trees
            .as_ref()
            .map(|a| a.relation_vectors())
            .unwrap_or_default();
        Ok(Self {
            space,
            group,
            g,
            p,
            ctx,
            dim,
            base_dim,
            shape,
            generators,
            torus,
            relations,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generator_names(&self) -> Vec<&str> {
        self.generators.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    /// Same module with the generators listed in the order `perm`.
    pub fn reordered(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.generators.len()];
        if perm.len() != seen.len()
            || perm
                .iter()
                .any(|&i| i >= seen.len() || std::mem::replace(&mut seen[i], true))
        {
            return Err(Error::InvalidParameter(
                "not a permutation of the generators".into(),
            ));
        }
        let mut out = self.clone();
        out.generators = perm.iter().map(|&i| self.generators[i].clone()).collect();
        Ok(out)
    }

    fn pair_index(&self, i: usize, j: usize) -> usize {
        let n = self.base_dim;
        i * n - i * (i + 1) / 2 + (j - i - 1)
    }

    fn pair_at(&self, mut k: usize) -> (usize, usize) {
        let n = self.base_dim;
        for i in 0..n {
            let row = n - i - 1;
            if k < row {
                return (i, i + 1 + k);
            }
            k -= row;
        }
        unreachable!("pair index out of range")
    }

    fn lift(&self, cols: &[SparseVec], idx: usize) -> SparseVec {
        let p = self.p;
        match self.shape {
            Shape::Single => cols[idx].clone(),
            Shape::Tensor => {
                let n = self.base_dim;
                let (i, j) = (idx / n, idx % n);
                let mut out = Vec::with_capacity(cols[i].len() * cols[j].len());
                for &(a, ca) in &cols[i] {
                    for &(b, cb) in &cols[j] {
                        out.push((a * n + b, mul_mod(ca, cb, p)));
                    }
                }
                out
            }
            Shape::Wedge => {
                let (i, j) = self.pair_at(idx);
                let mut acc: HashMap<usize, u64> = HashMap::new();
                for &(a, ca) in &cols[i] {
                    for &(b, cb) in &cols[j] {
                        let c = mul_mod(ca, cb, p);
                        let (k, c) = match a.cmp(&b) {
                            std::cmp::Ordering::Equal => continue,
                            std::cmp::Ordering::Less => (self.pair_index(a, b), c),
                            std::cmp::Ordering::Greater => (self.pair_index(b, a), (p - c) % p),
                        };
                        let e = acc.entry(k).or_insert(0);
                        *e = (*e + c) % p;
                    }
                }
                let mut out: SparseVec = acc.into_iter().filter(|&(_, c)| c != 0).collect();
                out.sort_unstable();
                out
            }
        }
    }

    /// Image of ambient basis vector `idx` under generator `k`.
    pub fn column(&self, k: usize, idx: usize) -> SparseVec {
        self.lift(&self.generators[k].1, idx)
    }

    fn torus_column(&self, k: usize, idx: usize) -> SparseVec {
        self.lift(&self.torus[k].1, idx)
    }

    /// Every group element used, torus included: `(name, column function)`.
    fn all_actions(&self) -> impl Iterator<Item = &Vec<SparseVec>> {
        self.generators.iter().chain(&self.torus).map(|(_, c)| c)
    }

    fn apply_dense(&self, cols: &[SparseVec], v: &[u32]) -> Vec<u32> {
        let p = self.p;
        let mut out = vec![0u64; self.dim];
        for (i, &x) in v.iter().enumerate() {
            if x != 0 {
                for (j, c) in self.lift(cols, i) {
                    out[j] = (out[j] + mul_mod(x as u64, c, p)) % p;
                }
            }
        }
        out.into_iter().map(|x| x as u32).collect()
    }

    /// Weight of each ambient basis vector: `true` iff every torus element
    /// fixes it. Fails if some torus element is not diagonal ±1.
    pub fn weight_zero_mask(&self) -> Result<Vec<bool>> {
        let p = self.p;
        let mut mask = vec![true; self.dim];
        for k in 0..self.torus.len() {
            for (idx, m) in mask.iter_mut().enumerate() {
                match self.torus_column(k, idx).as_slice() {
                    [(j, 1)] if *j == idx => {}
                    [(j, c)] if *j == idx && *c == p - 1 => *m = false,
                    _ => {
                        return Err(Error::InvalidParameter(format!(
                            "torus element {} does not act diagonally by ±1",
                            self.torus[k].0
                        )))
                    }
                }
            }
        }
        Ok(mask)
    }

    /// The scalar by which `−Id ∈ GL_g` acts, if it acts by ±1.
    pub fn minus_identity_sign(&self) -> Result<Option<i64>> {
        let m = ResidueMatrix::scalar(self.p, self.g, self.p - 1);
        let cols = self.ctx.columns(&m)?;
        let p = self.p;
        for sign in [1i64, -1] {
            let c = reduce_i64(sign, p);
            if (0..self.dim).all(|i| self.lift(&cols, i) == vec![(i, c)]) {
                return Ok(Some(sign));
            }
        }
        Ok(None)
    }

    /// Ambient index of a basis element given by its base-module indices.
    fn combine(&self, parts: &[(usize, i64)]) -> Option<(usize, i64)> {
        match (self.shape, parts) {
            (Shape::Single, [(i, s)]) => Some((*i, *s)),
            (Shape::Tensor, [(i, s), (j, t)]) => Some((i * self.base_dim + j, s * t)),
            (Shape::Wedge, [(i, s), (j, t)]) => match i.cmp(j) {
                std::cmp::Ordering::Equal => None,
                std::cmp::Ordering::Less => Some((self.pair_index(*i, *j), s * t)),
                std::cmp::Ordering::Greater => Some((self.pair_index(*j, *i), -s * t)),
            },
            _ => None,
        }
    }
}

/// Subspace of the ambient space generated by `(s − 1)w` and the relations,
/// closed under all generators by fixed-point iteration.
pub fn augmentation_closure(spec: &ActionSpec) -> Result<FpSubspace> {
    if spec.dim > DENSE_DIM {
        return Err(Error::Infeasible {
            dimension: spec.dim,
            limit: DENSE_DIM,
        });
    }
    let p = spec.p;
    let mut sub = FpSubspace::new(p as u32, spec.dim);
    for r in &spec.relations {
        sub.insert(&densify(r, spec.dim, p))?;
    }
    for cols in spec.all_actions() {
        for idx in 0..spec.dim {
            let mut v = densify(&spec.lift(cols, idx), spec.dim, p);
            v[idx] = ((v[idx] as u64 + p - 1) % p) as u32;
            sub.insert(&v)?;
        }
    }
    loop {
        let mut grew = false;
        for row in sub.basis() {
            for cols in spec.all_actions() {
                let img = spec.apply_dense(cols, &row);
                grew |= sub.insert(&img)?;
            }
        }
        if !grew {
            return Ok(sub);
        }
    }
}

/// Whether every generator maps `sub` into itself.
pub fn is_stable(spec: &ActionSpec, sub: &FpSubspace) -> Result<bool> {
    for row in sub.basis() {
        for cols in spec.all_actions() {
            if !sub.contains(&spec.apply_dense(cols, &row))? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn densify(v: &[(usize, u64)], dim: usize, p: u64) -> Vec<u32> {
    let mut out = vec![0u64; dim];
    for &(i, c) in v {
        out[i] = (out[i] + c) % p;
    }
    out.into_iter().map(|x| x as u32).collect()
}

/// `V₀ / π₀(I·V + R)`.
#[derive(Clone, Debug)]
pub struct WeightQuotient {
    ambient_dim: usize,
    weight_zero: Vec<usize>,
    slot: Vec<Option<usize>>,
    augmentation: FpSubspace,
}

impl WeightQuotient {
    pub fn compute(spec: &ActionSpec) -> Result<Self> {
        let p = spec.p;
        let mask = spec.weight_zero_mask()?;
        let weight_zero: Vec<usize> = (0..spec.dim).filter(|&i| mask[i]).collect();
        let mut slot = vec![None; spec.dim];
        for (k, &i) in weight_zero.iter().enumerate() {
            slot[i] = Some(k);
        }
        let n0 = weight_zero.len();
        let project = |v: &[(usize, u64)]| -> Vec<(usize, u32)> {
            v.iter()
                .filter_map(|&(i, c)| slot[i].map(|k| (k, c as u32)))
                .filter(|&(_, c)| c != 0)
                .collect()
        };
        let mut augmentation = FpSubspace::new(p as u32, n0);
        for r in &spec.relations {
            let v = project(r);
            if !v.is_empty() {
                augmentation.insert(&augmentation.reduce_sparse(&v)?)?;
            }
        }
        for k in 0..spec.generators.len() {
            if augmentation.is_full() {
                break;
            }
            let vectors: Vec<Vec<(usize, u32)>> = (0..spec.dim)
                .into_par_iter()
                .filter_map(|idx| {
                    let mut col = spec.column(k, idx);
                    col.push((idx, p - 1));
                    let mut v = project(&col);
                    v.sort_unstable();
                    let mut merged: Vec<(usize, u32)> = Vec::with_capacity(v.len());
                    for (i, c) in v {
                        match merged.last_mut() {
                            Some((j, d)) if *j == i => *d = ((*d as u64 + c as u64) % p) as u32,
                            _ => merged.push((i, c)),
                        }
                    }
                    merged.retain(|&(_, c)| c != 0);
                    (!merged.is_empty()).then_some(merged)
                })
                .collect();
            for v in vectors {
                augmentation.insert(&augmentation.reduce_sparse(&v)?)?;
            }
        }
        Ok(Self {
            ambient_dim: spec.dim,
            weight_zero,
            slot,
            augmentation,
        })
    }

    pub fn dimension(&self) -> usize {
        self.augmentation.quotient_dim()
    }

    pub fn weight_zero(&self) -> &[usize] {
        &self.weight_zero
    }

    /// The augmentation subspace in weight-zero coordinates.
    pub fn augmentation(&self) -> &FpSubspace {
        &self.augmentation
    }

    /// Coordinates of the class of an ambient vector in the quotient.
    pub fn class_of(&self, v: &[(usize, u64)]) -> Result<Vec<u32>> {
        let p = self.augmentation.prime() as u64;
        let mut dense = vec![0u64; self.weight_zero.len()];
        for &(i, c) in v {
            if let Some(k) = self.slot[i] {
                dense[k] = (dense[k] + c) % p;
            }
        }
        let dense: Vec<u32> = dense.into_iter().map(|x| x as u32).collect();
        self.augmentation.quotient_coords(&dense)
    }

    /// The full augmentation subspace `I·V + R` in ambient coordinates.
    pub fn ambient_subspace(&self) -> Result<FpSubspace> {
        let p = self.augmentation.prime();
        let mut sub = FpSubspace::new(p, self.ambient_dim);
        for i in 0..self.ambient_dim {
            if self.slot[i].is_none() {
                let mut e = vec![0u32; self.ambient_dim];
                e[i] = 1;
                sub.insert(&e)?;
            }
        }
        for row in self.augmentation.basis() {
            let mut e = vec![0u32; self.ambient_dim];
            for (k, &c) in row.iter().enumerate() {
                e[self.weight_zero[k]] = c;
            }
            sub.insert(&e)?;
        }
        Ok(sub)
    }
}

/// Known candidate generators of the quotient.
pub fn candidate_generators(spec: &ActionSpec) -> Result<Vec<(String, SparseVec)>> {
    let (g, p) = (spec.g, spec.p);
    let need = |k: usize| {
        if g < k {
            Err(Error::InvalidParameter(format!(
                "the listed generators of {} need g ≥ {k}",
                spec.space
            )))
        } else {
            Ok(())
        }
    };
    let labels =
        |s: &str| -> Result<Vec<Label>> { s.split('^').map(|l| parse_label(g, l)).collect() };
    let ext3 = |s: &str| -> Result<(usize, i64)> {
        let l = labels(s)?;
        let b = spec.ctx.ext3.as_ref().expect("ext3 basis");
        b.wedge(l[0], l[1], l[2])
            .map(|(sign, i)| (i, sign))
            .ok_or_else(|| Error::InvalidParameter(format!("degenerate wedge {s}")))
    };
    let sp = |s: &str| -> Result<(usize, i64)> {
        SpLieElement::basis_labels(g)
            .iter()
            .position(|x| x == s)
            .map(|i| (i, 1))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown sp basis element {s}")))
    };
    let mut out = Vec::new();
    let mut push = |name: String, parts: Vec<(usize, i64)>| {
        if let Some((i, s)) = spec.combine(&parts) {
            out.push((name, vec![(i, reduce_i64(s, p))]));
        }
    };
    match spec.space {
        SpaceId::Sym | SpaceId::Sl | SpaceId::Ext3 => {}
        SpaceId::Gl => push("e11".into(), vec![(0, 1)]),
        SpaceId::Sp => push("n11".into(), vec![sp("n11")?]),
        SpaceId::Ext3Tensor => {
            need(3)?;
            for (x, y) in [
                ("a1^a2^a3", "b1^b2^b3"),
                ("b1^b2^b3", "a1^a2^a3"),
                ("a1^a2^b2", "b1^a2^b2"),
                ("b1^a2^b2", "a1^a2^b2"),
                ("a1^a2^b2", "b1^a3^b3"),
                ("b1^a2^b2", "a1^a3^b3"),
            ] {
                push(format!("({x})⊗({y})"), vec![ext3(x)?, ext3(y)?]);
            }
        }
        SpaceId::Ext3Wedge => {
            need(3)?;
            for (x, y) in [
                ("a1^a2^a3", "b1^b2^b3"),
                ("a1^a2^b2", "b1^a2^b2"),
                ("a1^a2^b2", "b1^a3^b3"),
            ] {
                push(format!("({x})∧({y})"), vec![ext3(x)?, ext3(y)?]);
            }
        }
        SpaceId::SpTensor => {
            need(2)?;
            for (x, y) in [
                ("n11", "n11"),
                ("n11", "n22"),
                ("u11", "l11"),
                ("l11", "u11"),
            ] {
                push(format!("{x}⊗{y}"), vec![sp(x)?, sp(y)?]);
            }
        }
        SpaceId::SpWedge => push("u11∧l11".into(), vec![sp("u11")?, sp("l11")?]),
        SpaceId::A2Tree => {
            need(2)?;
            let alg = spec.ctx.trees.as_ref().expect("tree algebra");
            for t in ["b1,b2|a1,a2", "a1,b1|a2,b2"] {
                let l = labels(&t.replace([',', '|'], "^"))?;
                let idx = alg.tuple_index([l[0], l[1], l[2], l[3]]);
                push(format!("T({t})"), vec![(idx, 1)]);
            }
        }
    }
    Ok(out)
}

/// Outcome of a coinvariant computation.
#[derive(Clone, Debug)]
pub struct CoinvariantReport {
    pub space: SpaceId,
    pub group: Group,
    pub g: usize,
    pub p: u64,
    pub ambient_dim: usize,
    pub weight_zero_dim: usize,
    /// Augmentation subspace in weight-zero coordinates.
    pub augmentation: FpSubspace,
    pub dimension: usize,
    pub candidates: Vec<(String, Vec<u32>)>,
    pub spans: bool,
    /// For gl and sp: whether the trace vanishes on the augmentation
    /// subspace and is nonzero on the listed generator.
    pub trace_factors: Option<bool>,
}

pub fn coinvariants(space: SpaceId, g: usize, p: u64) -> Result<CoinvariantReport> {
    coinvariants_for(space, Group::Gl, g, p)
}

pub fn coinvariants_for(
    space: SpaceId,
    group: Group,
    g: usize,
    p: u64,
) -> Result<CoinvariantReport> {
    let spec = ActionSpec::new(space, group, g, p)?;
    report(&spec)
}

pub fn report(spec: &ActionSpec) -> Result<CoinvariantReport> {
    let q = WeightQuotient::compute(spec)?;
    let cands = candidate_generators(spec)?;
    let mut candidates = Vec::new();
    for (name, v) in &cands {
        candidates.push((name.clone(), q.class_of(v)?));
    }
    let rows: Vec<Vec<u32>> = candidates.iter().map(|(_, c)| c.clone()).collect();
    let spans = rank_mod_p(&rows, q.dimension(), spec.p as u32)? == q.dimension();
    let trace_factors = match spec.space {
        SpaceId::Gl | SpaceId::Sp => Some(trace_factors(spec, &cands)?),
        _ => None,
    };
    Ok(CoinvariantReport {
        space: spec.space,
        group: spec.group,
        g: spec.g,
        p: spec.p,
        ambient_dim: spec.dim,
        weight_zero_dim: q.weight_zero.len(),
        dimension: q.dimension(),
        augmentation: q.augmentation,
        candidates,
        spans,
        trace_factors,
    })
}

fn trace_factors(spec: &ActionSpec, cands: &[(String, SparseVec)]) -> Result<bool> {
    let g = spec.g;
    let tr: Vec<i64> = (0..spec.dim)
        .map(|i| i64::from(i < g * g && i / g == i % g))
        .collect();
    let f = Functional::Linear(tr).values(spec)?;
    Ok(is_invariant(spec, &f) && cands.iter().all(|(_, v)| dot(&f, v, spec.p) != 0))
}

/// A linear functional on a module: a bilinear form on a tensor square, a
/// map on trees, or explicit values on the ambient basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Functional {
    Form(FormId, Conventions),
    D1(Conventions),
    D2,
    Linear(Vec<i64>),
}

impl Functional {
    pub fn name(&self) -> String {
        match self {
            Functional::Form(id, _) => id.name().to_string(),
            Functional::D1(_) => "d1".into(),
            Functional::D2 => "d2".into(),
            Functional::Linear(_) => "linear".into(),
        }
    }

    /// Values on the ambient basis of `spec`.
    pub fn values(&self, spec: &ActionSpec) -> Result<Vec<u64>> {
        let (g, p) = (spec.g, spec.p);
        let wrong = || {
            Err(Error::InvalidParameter(format!(
                "functional {} does not apply to {}",
                self.name(),
                spec.space
            )))
        };
        match (self, spec.space) {
            (Functional::Linear(v), _) => {
                if v.len() != spec.dim {
                    return Err(crate::error::dim_mismatch(spec.dim, v.len()));
                }
                Ok(v.iter().map(|&x| reduce_i64(x, p)).collect())
            }
            (Functional::Form(id, conv), SpaceId::Ext3Tensor) if !id.on_sp() => {
                let basis = spec.ctx.ext3.as_ref().expect("ext3 basis");
                let n = basis.dim();
                let units: Vec<Ext3Vector> = (0..n)
                    .map(|i| {
                        let mut v = Ext3Vector::zero(basis, p);
                        v.coords[i] = 1;
                        v
                    })
                    .collect();
                let table = FormTable::new(*id, *conv);
                (0..n * n)
                    .into_par_iter()
                    .map(|k| table.eval_ext3(&units[k / n], &units[k % n], basis))
                    .collect()
            }
            (Functional::Form(id, conv), SpaceId::SpTensor) if id.on_sp() => {
                let n = spec.base_dim;
                let units: Vec<SpLieElement> = (0..n)
                    .map(|i| {
                        let mut v = vec![0; n];
                        v[i] = 1;
                        SpLieElement::from_coords(g, p, &v)
                    })
                    .collect::<Result<_>>()?;
                let table = FormTable::new(*id, *conv);
                (0..n * n)
                    .map(|k| table.eval_sp(&units[k / n], &units[k % n]))
                    .collect()
            }
            (Functional::D1(conv), SpaceId::A2Tree) => {
                let alg = spec.ctx.trees.as_ref().expect("tree algebra");
                Ok((0..spec.dim)
                    .map(|i| reduce_i64(d1_tuple(g, alg.tuple_at(i), *conv), p))
                    .collect())
            }
            (Functional::D2, SpaceId::A2Tree) => {
                let alg = spec.ctx.trees.as_ref().expect("tree algebra");
                Ok((0..spec.dim)
                    .map(|i| reduce_i64(d2_tuple(g, alg.tuple_at(i)), p))
                    .collect())
            }
            _ => wrong(),
        }
    }
}

fn dot(f: &[u64], v: &[(usize, u64)], p: u64) -> u64 {
    v.iter()
        .fold(0, |acc, &(i, c)| (acc + mul_mod(f[i], c, p)) % p)
}

/// Exhaustive invariance: `f(s·w) = f(w)` for every generator (torus
/// included) and ambient basis vector, and `f` kills the relations.
pub fn is_invariant(spec: &ActionSpec, f: &[u64]) -> bool {
    let p = spec.p;
    spec.relations.iter().all(|r| dot(f, r, p) == 0)
        && spec
            .all_actions()
            .collect::<Vec<_>>()
            .par_iter()
            .all(|cols| (0..spec.dim).all(|idx| dot(f, &spec.lift(cols, idx), p) == f[idx]))
}

/// Evaluation of candidate invariant functionals on the listed generators.
#[derive(Clone, Debug)]
pub struct FormBasisReport {
    pub space: SpaceId,
    pub g: usize,
    pub p: u64,
    pub dimension: usize,
    pub functionals: Vec<String>,
    pub generators: Vec<String>,
    /// `matrix[f][c]` = functional `f` on generator `c`.
    pub matrix: Vec<Vec<u64>>,
    pub rank: usize,
    pub invariant: Vec<bool>,
    /// Square, invertible, and of the size of the quotient.
    pub basis: bool,
}

pub fn invariant_forms(
    space: SpaceId,
    g: usize,
    p: u64,
    functionals: &[Functional],
) -> Result<FormBasisReport> {
    let spec = ActionSpec::new(space, Group::Gl, g, p)?;
    let q = WeightQuotient::compute(&spec)?;
    let cands = candidate_generators(&spec)?;
    let mut matrix = Vec::new();
    let mut invariant = Vec::new();
    for f in functionals {
        let vals = f.values(&spec)?;
        invariant.push(is_invariant(&spec, &vals));
        matrix.push(
            cands
                .iter()
                .map(|(_, v)| dot(&vals, v, p))
                .collect::<Vec<_>>(),
        );
    }
    let rows: Vec<Vec<u32>> = matrix
        .iter()
        .map(|r| r.iter().map(|&x| x as u32).collect())
        .collect();
    let rank = rank_mod_p(&rows, cands.len(), p as u32)?;
    let dimension = q.dimension();
    let basis = functionals.len() == dimension && cands.len() == dimension && rank == dimension;
    Ok(FormBasisReport {
        space,
        g,
        p,
        dimension,
        functionals: functionals.iter().map(Functional::name).collect(),
        generators: cands.into_iter().map(|(n, _)| n).collect(),
        matrix,
        rank,
        invariant,
        basis,
    })
}

/// The six forms on Λ³H_p ⊗ Λ³H_p.
pub fn ext3_forms(conv: Conventions) -> Vec<Functional> {
    FormId::EXT3_BASIS
        .iter()
        .map(|&f| Functional::Form(f, conv))
        .collect()
}

/// The four forms on 𝔰𝔭 ⊗ 𝔰𝔭.
pub fn sp_forms() -> Vec<Functional> {
    FormId::SP_BASIS
        .iter()
        .map(|&f| Functional::Form(f, Conventions::default()))
        .collect()
}

/// `d₁`, `d₂` on 𝒜₂.
pub fn tree_maps(conv: Conventions) -> Vec<Functional> {
    vec![Functional::D1(conv), Functional::D2]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dim(space: SpaceId, group: Group, g: usize) -> usize {
        coinvariants_for(space, group, g, 5).unwrap().dimension
    }

    #[test]
    fn small_spaces() {
        assert_eq!(dim(SpaceId::Sl, Group::Gl, 3), 0);
        assert_eq!(dim(SpaceId::Sym, Group::Gl, 3), 0);
        assert_eq!(dim(SpaceId::Ext3, Group::Gl, 3), 0);
        let gl = coinvariants(SpaceId::Gl, 3, 5).unwrap();
        assert_eq!(
            (gl.dimension, gl.spans, gl.trace_factors),
            (1, true, Some(true))
        );
        let sp = coinvariants(SpaceId::Sp, 3, 5).unwrap();
        assert_eq!(
            (sp.dimension, sp.spans, sp.trace_factors),
            (1, true, Some(true))
        );
        assert_eq!(dim(SpaceId::Sp, Group::Sl, 3), 1);
    }

    #[test]
    fn weighted_engine_matches_dense_closure() {
        for (space, group, g) in [
            (SpaceId::Gl, Group::Gl, 3),
            (SpaceId::Sl, Group::Sl, 3),
            (SpaceId::Sym, Group::Gl, 3),
            (SpaceId::Sp, Group::Gl, 3),
            (SpaceId::Sp, Group::Sl, 3),
            (SpaceId::Ext3, Group::Gl, 3),
            (SpaceId::Ext3Tensor, Group::Gl, 2),
            (SpaceId::SpWedge, Group::Gl, 2),
            (SpaceId::A2Tree, Group::Gl, 2),
        ] {
            let spec = ActionSpec::new(space, group, g, 5).unwrap();
            let dense = augmentation_closure(&spec).unwrap();
            let fast = WeightQuotient::compute(&spec).unwrap();
            assert_eq!(fast.ambient_subspace().unwrap(), dense, "{space} {group:?}");
            assert!(is_stable(&spec, &dense).unwrap());
        }
    }

    #[test]
    fn trivial_action_has_zero_augmentation() {
        let spec = ActionSpec::new(SpaceId::Gl, Group::Gl, 1, 5).unwrap();
        assert_eq!(augmentation_closure(&spec).unwrap().rank(), 0);
    }

    #[test]
    fn infeasible_rejected() {
        let err = ActionSpec::new(SpaceId::Ext3Tensor, Group::Gl, 6, 5).unwrap_err();
        assert!(matches!(
            err,
            Error::Infeasible {
                dimension: 48400,
                ..
            }
        ));
    }

    #[test]
    fn space_names_parse() {
        for s in SpaceId::all() {
            assert_eq!(s.name().parse::<SpaceId>().unwrap(), s);
        }
        assert_eq!("ext3⊗ext3".parse::<SpaceId>().unwrap(), SpaceId::Ext3Tensor);
    }

    #[test]
    fn a2tree_forms_at_genus_two() {
        let r = invariant_forms(SpaceId::A2Tree, 2, 5, &tree_maps(Conventions::default())).unwrap();
        assert_eq!(r.matrix, vec![vec![1, 2], vec![1, 0]]);
        assert!(r.invariant.iter().all(|&b| b));
        assert_eq!(r.rank, 2);
    }

    #[test]
    fn non_invariant_functional_detected() {
        let spec = ActionSpec::new(SpaceId::Gl, Group::Gl, 2, 5).unwrap();
        assert!(!is_invariant(&spec, &[1, 0, 0, 0]));
        assert!(is_invariant(&spec, &[1, 0, 0, 1]));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]
        #[test]
        fn dimension_independent_of_generator_order(seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let spec = ActionSpec::new(SpaceId::Sp, Group::Gl, 3, 5).unwrap();
            let mut perm: Vec<usize> = (0..spec.generator_count()).collect();
            perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let shuffled = spec.reordered(&perm).unwrap();
            prop_assert_eq!(
                WeightQuotient::compute(&shuffled).unwrap().ambient_subspace().unwrap(),
                WeightQuotient::compute(&spec).unwrap().ambient_subspace().unwrap()
            );
        }
    }
}
