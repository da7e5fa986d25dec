//! The trace invariant φ, the mod-p³ invariant 𝔕, the carry cocycle and the
//! invariance suite.
//!
//! For a level-p element `X = (A B; C D)` modulo p³ write `D = Id + pD₁` and
//! `C = pC₁`, with bars for reductions mod p. Then
//!
//! ```text
//! 𝔕(X) = r(tr D₁) − ½ tr(D̄₁²)
//! ```
//!
//! where `r(a₀ + p·a₁) = a₁`. Expanding the lower-right block of a product
//! `XY` with `Y = (E F; G H)` gives `(XY)₁ = D₁ + H₁ + p(C₁F₁ + D₁H₁)`, and
//! `r(a + b) = r(a) + r(b) + carry(ā, b̄)`, so
//!
//! ```text
//! 𝔕(X) + 𝔕(Y) − 𝔕(XY) = −carry(tr D̄₁, tr H̄₁) − tr(C̄₁F̄₁).
//! ```
//!
//! Note the sign of the carry term: the version `+carry − tr(C̄₁F̄₁)` fails
//! already for `X = Y = diag(86, 16)` mod 125 (p = 5, g = 1), where the left
//! side is −1 and `carry(3, 3) = 1`. [`cocycle_of_r`] implements the identity
//! above.
//!
//! On Sp^B-level elements `D = ᵗG⁻¹` with `G = Id + pN` and `det G ≡ 1`
//! mod p³. Expanding the determinant, `tr N + p·½((tr N)² − tr N²) ≡ 0`
//! mod p², so `tr N ≡ p·½ tr N̄²`. With `D₁ ≡ −ᵗN + p·ᵗN²` this gives
//! `r(tr D₁) = ½ tr N̄² = ½ tr D̄₁²`, i.e. 𝔕 vanishes there.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactalg::{is_prime, mul_mod, ResidueMatrix};
use crate::homology3::LensGluing;
use crate::symplectic::{
    alpha, random_level, random_spa_level, random_spab, random_spb_level, trace_gl, SympElement,
};

/// `a = a₀ + p·a₁` with both digits in `{0, …, p−1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DigitPair {
    pub p: u64,
    pub a0: u64,
    pub a1: u64,
}

impl DigitPair {
    pub fn new(a: u64, p: u64) -> Result<Self> {
        if a >= p * p {
            return Err(Error::InvalidParameter(format!(
                "{a} is not a canonical residue modulo {}",
                p * p
            )));
        }
        Ok(Self {
            p,
            a0: a % p,
            a1: a / p,
        })
    }

    pub fn value(&self) -> u64 {
        self.a0 + self.p * self.a1
    }
}

/// The second p-adic digit of a residue modulo p².
pub fn r_digit(a: u64, p: u64) -> Result<u64> {
    Ok(DigitPair::new(a, p)?.a1)
}

/// 1 if `x + y ≥ p`, else 0, on canonical representatives.
pub fn carry_cocycle(x: u64, y: u64, p: u64) -> u64 {
    u64::from(x % p + y % p >= p)
}

fn check_phi_level(d: u64) -> Result<()> {
    if d < 3 || d.is_multiple_of(4) {
        return Err(Error::InvalidParameter(format!(
            "phi needs d >= 3 with 4 not dividing d, got {d}"
        )));
    }
    Ok(())
}

/// `tr(π_gl(α(X)))` in ℤ/d.
pub fn phi(x: &SympElement, d: u64) -> Result<u64> {
    check_phi_level(d)?;
    Ok(trace_gl(&alpha(x, d)?))
}

fn check_p(x: &SympElement, p: u64) -> Result<()> {
    if p < 5 || !is_prime(p) {
        return Err(Error::InvalidParameter(format!(
            "need a prime p >= 5, got {p}"
        )));
    }
    if x.modulus() != p * p * p {
        return Err(Error::ModulusTooSmall {
            modulus: x.modulus(),
            required: p * p * p,
        });
    }
    if !x.is_level(p)? {
        return Err(Error::LevelViolation { level: p });
    }
    Ok(())
}

/// `D₁ = (D − Id)/p` modulo p² for the lower-right block D.
fn d1_block(x: &SympElement, p: u64) -> Result<ResidueMatrix> {
    let h = x.blocks().h;
    h.try_sub(&ResidueMatrix::identity(h.modulus(), h.rows()))?
        .divide_exact(p)
}

/// Which formula to evaluate; the truncated one exists for mutation tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RVariant {
    #[default]
    Full,
    /// Omits the `−½ tr(D̄₁²)` correction.
    DropHalf,
}

pub fn r_invariant(x: &SympElement, p: u64) -> Result<u64> {
    r_invariant_variant(x, p, RVariant::Full)
}

pub fn r_invariant_variant(x: &SympElement, p: u64, variant: RVariant) -> Result<u64> {
    check_p(x, p)?;
    let d1 = d1_block(x, p)?;
    let digit = r_digit(d1.trace(), p)?;
    if variant == RVariant::DropHalf {
        return Ok(digit);
    }
    let bar = d1.reduce_to(p)?;
    let sq = bar.try_mul(&bar)?.trace();
    let inv2 = p.div_ceil(2);
    Ok((digit + p - mul_mod(inv2, sq, p)) % p)
}

/// `F(X) + F(Y) − F(XY)` in ℤ/modulus.
pub fn coboundary<F>(f: F, x: &SympElement, y: &SympElement, modulus: u64) -> Result<u64>
where
    F: Fn(&SympElement) -> Result<u64>,
{
    let xy = x.try_mul(y)?;
    Ok((f(x)? + f(y)? + modulus - f(&xy)? % modulus) % modulus)
}

/// The two ingredients of the coboundary of 𝔕 for `X = (A B; C D)`,
/// `Y = (E F; G H)`: `carry(tr D̄₁, tr H̄₁)` and `tr(C̄₁F̄₁)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CocycleTerms {
    pub carry: u64,
    pub trace_cf: u64,
}

pub fn cocycle_terms(x: &SympElement, y: &SympElement, p: u64) -> Result<CocycleTerms> {
    check_p(x, p)?;
    check_p(y, p)?;
    let tr_d = d1_block(x, p)?.reduce_to(p)?.trace();
    let tr_h = d1_block(y, p)?.reduce_to(p)?.trace();
    let c1 = x.blocks().g.divide_exact(p)?.reduce_to(p)?;
    let f1 = y.blocks().f.divide_exact(p)?.reduce_to(p)?;
    Ok(CocycleTerms {
        carry: carry_cocycle(tr_d, tr_h, p),
        trace_cf: c1.try_mul(&f1)?.trace(),
    })
}

/// `−carry(tr D̄₁, tr H̄₁) − tr(C̄₁F̄₁)`; equals the coboundary of 𝔕.
pub fn cocycle_of_r(x: &SympElement, y: &SympElement, p: u64) -> Result<u64> {
    let t = cocycle_terms(x, y, p)?;
    Ok((2 * p - t.carry - t.trace_cf) % p)
}

/// φ of the Lens gluing for (d, k, l), stabilized to genus 5.
pub fn phi_lens(d: u64, k: i64, l: i64) -> Result<u64> {
    check_phi_level(d)?;
    let lg = LensGluing::new(d as i64, k, l)?;
    let x = lg.gluing.stabilize(4).reduce(d * d)?;
    phi(&x, d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub g: usize,
    pub p: u64,
    pub trials: usize,
    pub seed: u64,
    pub variant: RVariant,
}

impl SuiteConfig {
    pub fn new(g: usize, p: u64, trials: usize, seed: u64) -> Self {
        Self {
            g,
            p,
            trials,
            seed,
            variant: RVariant::Full,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub samples: usize,
    /// First failing sample index with a description, if any.
    pub failure: Option<(usize, String)>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub checks: Vec<CheckOutcome>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckOutcome::passed)
    }
}

/// Independent stream per (seed, check, sample).
pub(crate) fn sample_rng(seed: u64, check: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(check << 32 | index as u64);
    rng
}

/// Runs `trials` samples of one check; `body` returns `Ok(None)` on success.
pub(crate) fn run_check<F>(name: &'static str, trials: usize, body: F) -> CheckOutcome
where
    F: Fn(usize) -> Result<Option<String>> + Sync,
{
    let failure = (0..trials)
        .into_par_iter()
        .filter_map(|i| match body(i) {
            Ok(None) => None,
            Ok(Some(msg)) => Some((i, msg)),
            Err(e) => Some((i, format!("error: {e}"))),
        })
        .min_by_key(|(i, _)| *i);
    CheckOutcome {
        name,
        samples: trials,
        failure,
    }
}

fn show(x: &SympElement) -> String {
    format!("{:?}", x.body())
}

/// Checks (a)–(e): vanishing on handlebody-level samples, conjugation
/// invariance, double-coset constancy, stabilization, and the coboundary
/// identity for 𝔕.
pub fn run_invariance_suite(cfg: SuiteConfig) -> Result<SuiteReport> {
    let SuiteConfig {
        g,
        p,
        trials,
        seed,
        variant,
    } = cfg;
    if g == 0 || p < 5 || !is_prime(p) {
        return Err(Error::InvalidParameter(format!(
            "need g >= 1 and a prime p >= 5, got g = {g}, p = {p}"
        )));
    }
    let r = move |x: &SympElement| r_invariant_variant(x, p, variant);
    let ph = move |x: &SympElement| phi(x, p);

    let vanishing = run_check("handlebody_vanishing", trials, |i| {
        let mut rng = sample_rng(seed, 1, i);
        for x in [
            random_spa_level(&mut rng, g, p)?,
            random_spb_level(&mut rng, g, p)?,
        ] {
            let (a, b) = (ph(&x)?, r(&x)?);
            if a != 0 || b != 0 {
                return Ok(Some(format!("phi = {a}, r = {b} on {}", show(&x))));
            }
        }
        Ok(None)
    });

    let conjugation = run_check("conjugation_invariance", trials, |i| {
        let mut rng = sample_rng(seed, 2, i);
        let x = random_level(&mut rng, g, p)?;
        let c = random_spab(&mut rng, g, p)?;
        let y = x.conjugate_by(&c)?;
        if ph(&x)? != ph(&y)? || r(&x)? != r(&y)? {
            return Ok(Some(format!("X = {}, conjugator = {}", show(&x), show(&c))));
        }
        Ok(None)
    });

    let double_coset = run_check("double_coset_constancy", trials, |i| {
        let mut rng = sample_rng(seed, 3, i);
        let x = random_level(&mut rng, g, p)?;
        let xa = random_spa_level(&mut rng, g, p)?;
        let yb = random_spb_level(&mut rng, g, p)?;
        let y = xa.try_mul(&x)?.try_mul(&yb)?;
        if ph(&x)? != ph(&y)? || r(&x)? != r(&y)? {
            return Ok(Some(format!(
                "X = {}, xa = {}, yb = {}",
                show(&x),
                show(&xa),
                show(&yb)
            )));
        }
        Ok(None)
    });

    let stabilization = run_check("stabilization", trials, |i| {
        let mut rng = sample_rng(seed, 4, i);
        let x = random_level(&mut rng, g, p)?;
        let k = 1 + i % 3;
        let y = x.stabilize(k);
        if ph(&x)? != ph(&y)? || r(&x)? != r(&y)? {
            return Ok(Some(format!("X = {}, k = {k}", show(&x))));
        }
        Ok(None)
    });

    let cocycle = run_check("coboundary_identity", trials, |i| {
        let mut rng = sample_rng(seed, 5, i);
        let x = random_level(&mut rng, g, p)?;
        let y = random_level(&mut rng, g, p)?;
        let lhs = coboundary(r, &x, &y, p)?;
        let rhs = cocycle_of_r(&x, &y, p)?;
        if lhs != rhs {
            return Ok(Some(format!(
                "coboundary = {lhs}, cocycle = {rhs}; X = {}, Y = {}",
                show(&x),
                show(&y)
            )));
        }
        Ok(None)
    });

    Ok(SuiteReport {
        config: cfg,
        checks: vec![vanishing, conjugation, double_coset, stabilization, cocycle],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::{sample_spa_level, upper_unipotent};
    use proptest::prelude::*;

    fn diag(m: u64, a: i64, b: i64) -> SympElement {
        SympElement::new(1, ResidueMatrix::from_i64(m, 2, 2, &[a, 0, 0, b]).unwrap()).unwrap()
    }

    #[test]
    fn digits() {
        assert_eq!(r_digit(3, 5).unwrap(), 0);
        assert_eq!(r_digit(17, 5).unwrap(), 3);
        assert_eq!(r_digit(24, 5).unwrap(), 4);
        assert!(r_digit(25, 5).is_err());
        let dp = DigitPair::new(17, 5).unwrap();
        assert_eq!((dp.a0, dp.a1, dp.value()), (2, 3, 17));
    }

    #[test]
    fn carry_examples_and_cocycle_identity() {
        for y in 0..5 {
            assert_eq!(carry_cocycle(0, y, 5), 0);
        }
        assert_eq!(carry_cocycle(3, 4, 5), 1);
        assert_eq!(carry_cocycle(2, 2, 5), 0);
        for p in [5u64, 7] {
            for x in 0..p {
                for y in 0..p {
                    for z in 0..p {
                        let lhs = (carry_cocycle(y, z, p) + carry_cocycle(x, (y + z) % p, p)) % p;
                        let rhs = (carry_cocycle(x, y, p) + carry_cocycle((x + y) % p, z, p)) % p;
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn digit_shift_rule() {
        let p = 7;
        for x in 0..p * p {
            for y in 0..p {
                let lhs = r_digit((x + p * y) % (p * p), p).unwrap();
                assert_eq!(lhs, (r_digit(x, p).unwrap() + y) % p);
            }
        }
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi(&SympElement::identity(2, 25), 5).unwrap(), 0);
        assert_eq!(phi(&diag(25, 11, 16), 5).unwrap(), 2);
        assert!(phi(&SympElement::identity(1, 64), 8).is_err());
        for seed in 0..20 {
            assert_eq!(phi(&sample_spa_level(2, 5, seed).unwrap(), 5).unwrap(), 0);
        }
    }

    #[test]
    fn r_examples() {
        assert_eq!(r_invariant(&SympElement::identity(3, 125), 5).unwrap(), 0);
        assert_eq!(r_invariant(&diag(125, 16, 86), 5).unwrap(), 1);
        let s = ResidueMatrix::from_i64(125, 2, 2, &[5, 10, 10, 15]).unwrap();
        let x = SympElement::new(2, upper_unipotent(&s).unwrap()).unwrap();
        assert_eq!(r_invariant(&x, 5).unwrap(), 0);
        assert!(r_invariant(&SympElement::identity(1, 27), 3).is_err());
        assert!(r_invariant(&diag(125, 2, 63), 5).is_err());
    }

    #[test]
    fn coboundary_counterexample_to_positive_carry() {
        let x = diag(125, 86, 16);
        assert_eq!(r_invariant(&x, 5).unwrap(), 3);
        assert_eq!(r_invariant(&x.try_mul(&x).unwrap(), 5).unwrap(), 2);
        let cob = coboundary(|y| r_invariant(y, 5), &x, &x, 5).unwrap();
        assert_eq!(cob, 4);
        assert_eq!(carry_cocycle(3, 3, 5), 1);
        assert_eq!(cocycle_of_r(&x, &x, 5).unwrap(), 4);
    }

    #[test]
    fn identity_pairs_vanish() {
        let id = SympElement::identity(2, 125);
        for seed in 0..20 {
            let y = crate::symplectic::sample_level(2, 5, seed).unwrap();
            assert_eq!(cocycle_of_r(&id, &y, 5).unwrap(), 0);
            assert_eq!(coboundary(|z| r_invariant(z, 5), &y, &id, 5).unwrap(), 0);
            assert_eq!(coboundary(|z| phi(z, 5), &y, &id, 5).unwrap(), 0);
        }
    }

    #[test]
    fn lens_phi() {
        assert_eq!(phi_lens(5, 2, 2).unwrap(), 3);
        assert_eq!(phi_lens(5, 1, 1).unwrap(), 4);
    }

    #[test]
    fn empty_suite_passes() {
        let rep = run_invariance_suite(SuiteConfig::new(2, 5, 0, 1)).unwrap();
        assert!(rep.passed());
        assert!(rep.checks.iter().all(|c| c.samples == 0));
    }

    #[test]
    fn small_suite_passes_and_mutation_fails() {
        let rep = run_invariance_suite(SuiteConfig::new(2, 5, 60, 4)).unwrap();
        assert!(rep.passed(), "{rep:?}");
        let mut cfg = SuiteConfig::new(2, 5, 60, 4);
        cfg.variant = RVariant::DropHalf;
        let rep = run_invariance_suite(cfg).unwrap();
        assert!(!rep.checks[4].passed());
    }

    proptest! {
        #[test]
        fn spa_sample_kills_cocycle(seed in any::<u64>(), seed2 in any::<u64>()) {
            let x = sample_spa_level(3, 7, seed).unwrap();
            let y = crate::symplectic::sample_level(3, 7, seed2).unwrap();
            prop_assert_eq!(cocycle_of_r(&x, &y, 7).unwrap(), 0);
        }

        #[test]
        fn phi_is_additive(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (x, _) = crate::symplectic::sample_level_mod(&mut rng, 3, 7, 2).unwrap();
            let (y, _) = crate::symplectic::sample_level_mod(&mut rng, 3, 7, 2).unwrap();
            prop_assert_eq!(coboundary(|z| phi(z, 7), &x, &y, 7).unwrap(), 0);
        }
    }
}
