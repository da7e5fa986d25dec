//! Verification suites: each check yields one PASS/FAIL line.
//!
//! The configuration carries the three knobs used by mutation testing: the
//! 𝔕 formula variant, the sign conventions and the tree relation set.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::coinv::{
    ext3_forms, invariant_forms, report, sp_forms, tree_maps, ActionSpec, Group, SpaceId,
};
use crate::error::{Error, Result};
use crate::exactalg::reduce_i64;
use crate::homology3::{
    h1_of_splitting, order_h1, random_gluing, sets_coincide, trivialize_mod_d, LensGluing,
};
use crate::invariants::{
    coboundary, cocycle_of_r, phi_lens, r_invariant_variant, run_check, run_invariance_suite,
    sample_rng, RVariant, SuiteConfig,
};
use crate::multilinear::{parse_label, Ext3Basis, Ext3Vector, FormId, FormTable};
use crate::symplectic::{alpha, sample_level_mod, Conventions, SympElement};
use crate::trees::{bracket, d1, d1_tuple, d2, d2_tuple, relations_at, RelationSet, TreeAlgebra};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Lens,
    Homology,
    Sets,
    Invariance,
    Cocycle,
    Alpha,
    Coinv,
    Forms,
    Trees,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Lens,
        Suite::Homology,
        Suite::Sets,
        Suite::Invariance,
        Suite::Cocycle,
        Suite::Alpha,
        Suite::Coinv,
        Suite::Forms,
        Suite::Trees,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lens => "lens",
            Suite::Homology => "homology",
            Suite::Sets => "sets",
            Suite::Invariance => "invariance",
            Suite::Cocycle => "cocycle",
            Suite::Alpha => "alpha",
            Suite::Coinv => "coinv",
            Suite::Forms => "forms",
            Suite::Trees => "trees",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown suite `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyConfig {
    pub g: usize,
    pub p: u64,
    pub trials: usize,
    pub seed: u64,
    pub variant: RVariant,
    pub conventions: Conventions,
    pub relations: RelationSet,
}

impl VerifyConfig {
    pub fn new(g: usize, p: u64, trials: usize, seed: u64) -> Self {
        Self {
            g,
            p,
            trials,
            seed,
            variant: RVariant::Full,
            conventions: Conventions::default(),
            relations: RelationSet::default(),
        }
    }
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self::new(4, 5, 1000, 7)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckLine {
    pub suite: Suite,
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckLine {
    fn new(
        suite: Suite,
        check: impl Into<String>,
        passed: bool,
        detail: impl Into<String>,
    ) -> Self {
        Self {
            suite,
            check: check.into(),
            passed,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for CheckLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{}.{} = {verdict}", self.suite, self.check)?;
        if !self.detail.is_empty() {
            write!(f, "; {}", self.detail)?;
        }
        Ok(())
    }
}

/// Runs every suite (concurrently) and returns the lines in a fixed order.
pub fn run_all(cfg: &VerifyConfig) -> Vec<CheckLine> {
    Suite::ALL
        .par_iter()
        .map(|&s| run_suite(s, cfg))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Runs one suite; an error becomes a single failing line.
pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Vec<CheckLine> {
    let out = match suite {
        Suite::Lens => lens_suite(),
        Suite::Homology => homology_suite(cfg),
        Suite::Sets => sets_suite(),
        Suite::Invariance => invariance_suite(cfg),
        Suite::Cocycle => cocycle_suite(cfg),
        Suite::Alpha => alpha_suite(cfg),
        Suite::Coinv => coinv_suite(cfg),
        Suite::Forms => forms_suite(cfg),
        Suite::Trees => trees_suite(cfg),
    };
    out.unwrap_or_else(|e| vec![CheckLine::new(suite, "error", false, e.to_string())])
}

pub fn all_passed(lines: &[CheckLine]) -> bool {
    lines.iter().all(|l| l.passed)
}

fn from_outcome(suite: Suite, o: &crate::invariants::CheckOutcome) -> CheckLine {
    match &o.failure {
        None => CheckLine::new(suite, o.name, true, format!("{} samples", o.samples)),
        Some((i, msg)) => CheckLine::new(suite, o.name, false, format!("sample {i}: {msg}")),
    }
}

/// φ of the Lens gluing equals −k mod d for d ∈ {5, 7}.
fn lens_suite() -> Result<Vec<CheckLine>> {
    let mut out = Vec::new();
    for d in [5i64, 7] {
        let mut cases = 0;
        let mut bad = None;
        for k in 0..d {
            for l in -d..=d {
                let Ok(lg) = LensGluing::new(d, k, l) else {
                    continue;
                };
                cases += 1;
                let v = phi_lens(d as u64, k, l)?;
                let want = reduce_i64(-k, d as u64);
                if v != want || lg.order() != BigInt::from(1 + d * k) {
                    bad.get_or_insert(format!("d = {d}, k = {k}, l = {l}: phi = {v}, want {want}"));
                }
            }
        }
        let detail = bad.clone().unwrap_or(format!("{cases} gluings"));
        out.push(CheckLine::new(
            Suite::Lens,
            format!("phi_minus_k_d{d}"),
            bad.is_none(),
            detail,
        ));
    }
    Ok(out)
}

/// Largest level tested against the trivialization criterion.
const TRIVIALIZATION_LEVELS: u64 = 12;

fn homology_suite(cfg: &VerifyConfig) -> Result<Vec<CheckLine>> {
    let g = cfg.g.clamp(1, 3);
    let order = run_check("order_is_det_h", cfg.trials, |i| {
        let mut rng = sample_rng(cfg.seed, 11, i);
        let hg = loop {
            let hg = random_gluing(&mut rng, g, 6);
            if !hg.h_block().det()?.is_zero() {
                break hg;
            }
        };
        let det = hg.h_block().det()?;
        let n = order_h1(&h1_of_splitting(&hg))?;
        if n != det.abs() {
            return Ok(Some(format!("order {n} but det H = {det}")));
        }
        for d in 2..=TRIVIALIZATION_LEVELS {
            let x = hg.reduce(d)?;
            let admissible =
                ((&n - BigInt::one()) % d).is_zero() || ((&n + BigInt::one()) % d).is_zero();
            match trivialize_mod_d(&x) {
                Ok(t) => {
                    if !admissible {
                        return Ok(Some(format!("trivialized at d = {d} with n = {n}")));
                    }
                    let prod = t.xa.try_mul(&x)?.try_mul(&t.yb)?;
                    if prod != SympElement::identity(g, d) {
                        return Ok(Some(format!("Xa X Yb is not the identity mod {d}")));
                    }
                }
                Err(Error::Inadmissible { .. }) if !admissible => {}
                Err(e) => return Ok(Some(format!("d = {d}, n = {n}: {e}"))),
            }
        }
        Ok(None)
    });
    Ok(vec![from_outcome(Suite::Homology, &order)])
}

fn sets_suite() -> Result<Vec<CheckLine>> {
    let mut hits = Vec::new();
    for d in 2..=1000 {
        if sets_coincide(d)? {
            hits.push(d);
        }
    }
    Ok(vec![CheckLine::new(
        Suite::Sets,
        "coincide_exactly_2_3_4_6",
        hits == [2, 3, 4, 6],
        format!("d <= 1000 with coincidence: {hits:?}"),
    )])
}

fn invariance_suite(cfg: &VerifyConfig) -> Result<Vec<CheckLine>> {
    let mut sc = SuiteConfig::new(cfg.g, cfg.p, cfg.trials, cfg.seed);
    sc.variant = cfg.variant;
    let rep = run_invariance_suite(sc)?;
    Ok(rep
        .checks
        .iter()
        .map(|c| from_outcome(Suite::Invariance, c))
        .collect())
}

/// The coboundary identity of 𝔕 over (g, p) ∈ {2, 3, 4} × {5, 7}.
fn cocycle_suite(cfg: &VerifyConfig) -> Result<Vec<CheckLine>> {
    let mut out = Vec::new();
    for g in [2usize, 3, 4] {
        for p in [5u64, 7] {
            let variant = cfg.variant;
            let r = move |x: &SympElement| r_invariant_variant(x, p, variant);
            let name = format!("coboundary_g{g}_p{p}");
            let stream = 20 + 2 * g as u64 + p;
            let o = run_check("coboundary", cfg.trials, |i| {
                let mut rng = sample_rng(cfg.seed, stream, i);
                let x = sample_level_mod(&mut rng, g, p, 3)?.0;
                let y = sample_level_mod(&mut rng, g, p, 3)?.0;
                let (lhs, rhs) = (coboundary(r, &x, &y, p)?, cocycle_of_r(&x, &y, p)?);
                Ok((lhs != rhs).then(|| format!("coboundary {lhs} vs cocycle {rhs}")))
            });
            let mut line = from_outcome(Suite::Cocycle, &o);
            line.check = name;
            out.push(line);
        }
    }
    Ok(out)
}

/// α is a homomorphism and Sp-equivariant modulo d², d ∈ {5, 6, 7, 10}.
fn alpha_suite(cfg: &VerifyConfig) -> Result<Vec<CheckLine>> {
    let g = cfg.g;
    let mut out = Vec::new();
    for d in [5u64, 6, 7, 10] {
        let o = run_check("alpha", cfg.trials, |i| {
            let mut rng = sample_rng(cfg.seed, 40 + d, i);
            let x = sample_level_mod(&mut rng, g, d, 2)?.0;
            let y = sample_level_mod(&mut rng, g, d, 2)?.0;
            let (ax, ay) = (alpha(&x, d)?, alpha(&y, d)?);
            if alpha(&x.try_mul(&y)?, d)? != ax.try_add(&ay)? {
                return Ok(Some("alpha(XY) != alpha(X) + alpha(Y)".into()));
            }
            let c = random_gluing(&mut rng, g, 6).reduce(d * d)?;
            let lhs = alpha(&x.conjugate_by(&c)?, d)?.to_matrix();
            let cd = c.reduce_to(d)?;
            let rhs = cd
                .body()
                .try_mul(&ax.to_matrix())?
                .try_mul(cd.inverse().body())?;
            Ok((lhs != rhs).then(|| "alpha(C X C^-1) != C alpha(X) C^-1".to_string()))
        });
        let mut line = from_outcome(Suite::Alpha, &o);
        line.check = format!("hom_equivariance_d{d}");
        out.push(line);
    }
    Ok(out)
}

fn coinv_suite(cfg: &VerifyConfig) -> Result<Vec<CheckLine>> {
    let (g, p) = (cfg.g, cfg.p);
    let mut out = Vec::new();
    let run = |space, group| -> Result<_> {
        report(&ActionSpec::with_relations(
            space,
            group,
            g,
            p,
            cfg.relations,
        )?)
    };
    for (space, group, want, label) in [
        (SpaceId::Sl, Group::Gl, 0, "sl"),
        (SpaceId::Gl, Group::Gl, 1, "gl"),
        (SpaceId::Sym, Group::Gl, 0, "sym"),
        (SpaceId::Sp, Group::Gl, 1, "sp"),
        (SpaceId::Sp, Group::Sl, 1, "sp_sl_variant"),
    ] {
        let r = run(space, group)?;
        let trace_ok = r.trace_factors.unwrap_or(true);
        out.push(CheckLine::new(
            Suite::Coinv,
            format!("{label}_dimension"),
            r.dimension == want && r.spans && trace_ok,
            format!("dimension = {}, expected {want}", r.dimension),
        ));
    }
    let spec = ActionSpec::new(SpaceId::Ext3, Group::Gl, g, p)?;
    let sign = spec.minus_identity_sign()?;
    let ext3 = report(&spec)?;
    out.push(CheckLine::new(
        Suite::Coinv,
        "ext3_center_kills",
        sign == Some(-1) && ext3.dimension == 0,
        format!("-Id acts by {sign:?}, dimension = {}", ext3.dimension),
    ));
    for (space, count) in [
        (SpaceId::Ext3Tensor, 6),
        (SpaceId::Ext3Wedge, 3),
        (SpaceId::SpTensor, 4),
        (SpaceId::SpWedge, 1),
        (SpaceId::A2Tree, 2),
    ] {
        let r = run(space, Group::Gl)?;
        out.push(CheckLine::new(
            Suite::Coinv,
            format!("{}_generators_span", space.name().replace('-', "_")),
            r.spans && r.candidates.len() == count,
            format!(
                "dimension = {}, {} listed generators",
                r.dimension,
                r.candidates.len()
            ),
        ));
    }
    Ok(out)
}

fn forms_suite(cfg: &VerifyConfig) -> Result<Vec<CheckLine>> {
    let (g, p, conv) = (cfg.g, cfg.p, cfg.conventions);
    let mut out = Vec::new();
    for (space, fs, label) in [
        (SpaceId::Ext3Tensor, ext3_forms(conv), "ext3_six_forms"),
        (SpaceId::SpTensor, sp_forms(), "sp_four_forms"),
        (SpaceId::A2Tree, tree_maps(conv), "tree_d1_d2"),
    ] {
        let r = invariant_forms(space, g, p, &fs)?;
        let inv = r.invariant.iter().all(|&b| b);
        out.push(CheckLine::new(
            Suite::Forms,
            format!("{label}_basis"),
            r.basis && inv,
            format!(
                "rank {} of {}, invariant = {inv}, matrix = {:?}",
                r.rank, r.dimension, r.matrix
            ),
        ));
    }
    let mut five = ext3_forms(conv);
    five.pop();
    let r = invariant_forms(SpaceId::Ext3Tensor, g, p, &five)?;
    out.push(CheckLine::new(
        Suite::Forms,
        "dropped_form_detected",
        !r.basis && r.rank < r.dimension,
        format!("rank {} of {}", r.rank, r.dimension),
    ));
    Ok(out)
}

/// Reference values `(d₁∘[,], d₂∘[,], Θ, Q, ᵗJ − J)` on the three generator pairs.
pub const TREE_TABLE: [(&str, &str, [i64; 5]); 3] = [
    ("a1^a2^a3", "b1^b2^b3", [3, 3, -1, 0, -1]),
    ("a1^a2^b2", "b1^a2^b2", [5, -1, -1, -4, 0]),
    ("a1^a2^b2", "b1^a3^b3", [2, 0, 0, -4, 0]),
];

/// Evaluates the five table columns on one pair under `conv`.
pub fn tree_table_row(
    g: usize,
    p: u64,
    x: &str,
    y: &str,
    conv: Conventions,
    alg: &TreeAlgebra,
) -> Result<[u64; 5]> {
    let basis = Ext3Basis::new(g);
    let wedge = |s: &str| -> Result<Ext3Vector> {
        let l = s
            .split('^')
            .map(|t| parse_label(g, t))
            .collect::<Result<Vec<_>>>()?;
        Ok(Ext3Vector::wedge(&basis, p, l[0], l[1], l[2]))
    };
    let (x, y) = (wedge(x)?, wedge(y)?);
    let t = alg.canonicalize(&bracket(&x, &y, &basis, conv)?)?;
    let f = |id| FormTable::new(id, conv).eval_ext3(&x, &y, &basis);
    Ok([
        d1(&t, conv),
        d2(&t),
        f(FormId::Theta)?,
        f(FormId::Q)?,
        f(FormId::TJMinusJ)?,
    ])
}

fn trees_suite(cfg: &VerifyConfig) -> Result<Vec<CheckLine>> {
    let (g, p, conv) = (cfg.g, cfg.p, cfg.conventions);
    if g < 3 {
        return Err(Error::InvalidParameter(
            "the tree table needs g >= 3".into(),
        ));
    }
    let alg = TreeAlgebra::with_relations(g, p, cfg.relations)?;
    let mut out = Vec::new();

    let mut bad = Vec::new();
    let n = 2 * g;
    for i in 0..n.pow(4) {
        for rel in relations_at(alg.tuple_at(i), cfg.relations) {
            let s1: i64 = rel.iter().map(|&(t, c)| c * d1_tuple(g, t, conv)).sum();
            let s2: i64 = rel.iter().map(|&(t, c)| c * d2_tuple(g, t)).sum();
            if reduce_i64(s1, p) != 0 || reduce_i64(s2, p) != 0 {
                bad.push(i);
            }
        }
    }
    out.push(CheckLine::new(
        Suite::Trees,
        "d1_d2_well_defined",
        bad.is_empty(),
        format!("{} relation failures", bad.len()),
    ));

    let mut mismatches = Vec::new();
    for (x, y, want) in TREE_TABLE {
        let got = tree_table_row(g, p, x, y, conv, &alg)?;
        for (col, (&w, &v)) in want.iter().zip(&got).enumerate() {
            if reduce_i64(w, p) != v {
                mismatches.push(format!("({x}, {y}) column {col}: got {v}, want {w}"));
            }
        }
    }
    out.push(CheckLine::new(
        Suite::Trees,
        "table_15_entries",
        mismatches.is_empty(),
        if mismatches.is_empty() {
            "all entries match".to_string()
        } else {
            mismatches.join("; ")
        },
    ));

    let basis = Ext3Basis::new(g);
    let units: Vec<Ext3Vector> = (0..basis.dim())
        .map(|i| {
            let mut v = Ext3Vector::zero(&basis, p);
            v.coords[i] = 1;
            v
        })
        .collect();
    let half = p.div_ceil(2);
    let failures: usize = (0..basis.dim())
        .into_par_iter()
        .map(|i| {
            let mut bad = 0;
            for j in 0..basis.dim() {
                let (x, y) = (&units[i], &units[j]);
                let f = |id| {
                    FormTable::new(id, conv)
                        .eval_ext3(x, y, &basis)
                        .unwrap_or(u64::MAX)
                };
                let (th, q, tjj) = (f(FormId::Theta), f(FormId::Q), f(FormId::TJMinusJ));
                let e1 = reduce_i64(-3 * th as i64 - (half * q % p) as i64, p);
                let e2 = reduce_i64(th as i64 - 4 * tjj as i64, p);
                let t = bracket(x, y, &basis, conv).expect("same genus");
                if d1(&t, conv) != e1 || d2(&t) != e2 {
                    bad += 1;
                }
            }
            bad
        })
        .sum();
    out.push(CheckLine::new(
        Suite::Trees,
        "linear_identities",
        failures == 0,
        format!(
            "{} basis pairs, {failures} failures",
            basis.dim() * basis.dim()
        ),
    ));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suites_pass() {
        let cfg = VerifyConfig::new(3, 5, 20, 1);
        for s in [
            Suite::Lens,
            Suite::Sets,
            Suite::Trees,
            Suite::Alpha,
            Suite::Homology,
        ] {
            let lines = run_suite(s, &cfg);
            assert!(all_passed(&lines), "{lines:#?}");
        }
        let lines = run_suite(Suite::Coinv, &VerifyConfig::new(4, 5, 1, 1));
        assert!(all_passed(&lines), "{lines:#?}");
    }

    #[test]
    fn genus_three_is_below_the_stable_range() {
        let lines = run_suite(Suite::Coinv, &VerifyConfig::new(3, 5, 1, 1));
        let l = lines
            .iter()
            .find(|l| l.check == "ext3_tensor_generators_span")
            .unwrap();
        assert!(!l.passed);
        assert!(l.detail.starts_with("dimension = 8"));
    }

    #[test]
    fn line_format() {
        let l = CheckLine::new(Suite::Sets, "x", false, "why");
        assert_eq!(l.to_string(), "sets.x = FAIL; why");
    }

    #[test]
    fn flipped_omega_breaks_table() {
        let mut cfg = VerifyConfig::new(3, 5, 1, 1);
        cfg.conventions = cfg.conventions.flip_omega();
        let lines = run_suite(Suite::Trees, &cfg);
        assert!(lines
            .iter()
            .any(|l| l.check == "table_15_entries" && !l.passed));
    }

    #[test]
    fn suite_names_parse() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
    }
}
