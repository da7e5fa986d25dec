use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{d_g, embed_gl, lower_unipotent, upper_unipotent, SympElement};
use crate::error::{Error, Result};
use crate::exactalg::{inv_mod, is_prime, ResidueMatrix};

fn check_prime(p: u64) -> Result<()> {
    if p < 5 || !is_prime(p) {
        return Err(Error::InvalidParameter(format!(
            "samplers need a prime p >= 5, got {p}"
        )));
    }
    Ok(())
}

/// Uniform symmetric matrix in `scale · Sym_g` modulo `modulus`.
pub fn random_symmetric<R: Rng + ?Sized>(
    rng: &mut R,
    g: usize,
    modulus: u64,
    scale: u64,
) -> ResidueMatrix {
    let range = modulus / scale;
    let mut s = ResidueMatrix::zeros(modulus, g, g);
    for i in 0..g {
        for j in i..g {
            let v = rng.gen_range(0..range) * scale;
            s.set(i, j, v);
            s.set(j, i, v);
        }
    }
    s
}

fn random_matrix<R: Rng + ?Sized>(
    rng: &mut R,
    g: usize,
    modulus: u64,
    scale: u64,
) -> ResidueMatrix {
    let range = modulus / scale;
    let entries = (0..g * g)
        .map(|_| rng.gen_range(0..range) * scale)
        .collect();
    ResidueMatrix::new(modulus, g, g, entries).expect("shape")
}

/// Multiplies column 0 by det⁻¹ so that the determinant becomes 1.
fn normalize_det(gm: &mut ResidueMatrix) {
    let m = gm.modulus();
    let det = gm.det_mod().expect("square");
    let inv = inv_mod(det, m).expect("unit determinant");
    for r in 0..gm.rows() {
        let v = crate::exactalg::mul_mod(gm.get(r, 0), inv, m);
        gm.set(r, 0, v);
    }
}

/// Parameters of `(Id U; 0 Id)(Id 0; L Id)(ᵗD⁻¹ 0; 0 D)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelFactors {
    pub u: ResidueMatrix,
    pub l: ResidueMatrix,
    pub d: ResidueMatrix,
}

impl LevelFactors {
    pub fn compose(&self) -> Result<SympElement> {
        let g = self.d.rows();
        let m = self.d.modulus();
        let diag = ResidueMatrix::from_blocks(
            &self.d.inverse_mod()?.transpose(),
            &ResidueMatrix::zeros(m, g, g),
            &ResidueMatrix::zeros(m, g, g),
            &self.d,
        )?;
        let body = upper_unipotent(&self.u)?
            .try_mul(&lower_unipotent(&self.l)?)?
            .try_mul(&diag)?;
        SympElement::new(g, body)
    }

    /// Recovers the factors of a level element: `U = B D⁻¹`, `L = C ᵗD`.
    pub fn recover(x: &SympElement) -> Result<Self> {
        let b = x.blocks();
        Ok(Self {
            u: b.f.try_mul(&b.h.inverse_mod()?)?,
            l: b.g.try_mul(&b.h.transpose())?,
            d: b.h,
        })
    }
}

/// Level-d element modulo d^k from uniformly random factors.
pub fn sample_level_mod<R: Rng + ?Sized>(
    rng: &mut R,
    g: usize,
    d: u64,
    k: u32,
) -> Result<(SympElement, LevelFactors)> {
    if d < 2 || k < 2 {
        return Err(Error::InvalidParameter(format!(
            "need d >= 2 and exponent >= 2, got d = {d}, k = {k}"
        )));
    }
    let m = d.pow(k);
    let u = random_symmetric(rng, g, m, d);
    let l = random_symmetric(rng, g, m, d);
    let dd = ResidueMatrix::identity(m, g).try_add(&random_matrix(rng, g, m, d))?;
    let f = LevelFactors { u, l, d: dd };
    Ok((f.compose()?, f))
}

pub fn random_level<R: Rng + ?Sized>(rng: &mut R, g: usize, p: u64) -> Result<SympElement> {
    check_prime(p)?;
    Ok(sample_level_mod(rng, g, p, 3)?.0)
}

/// `(G 0; ᵗG⁻¹·pS₀ ᵗG⁻¹)` with `G = Id + pN`, det G = 1, modulo p³.
pub fn random_spb_level<R: Rng + ?Sized>(rng: &mut R, g: usize, p: u64) -> Result<SympElement> {
    check_prime(p)?;
    let m = p * p * p;
    let mut gm = ResidueMatrix::identity(m, g).try_add(&random_matrix(rng, g, m, p))?;
    normalize_det(&mut gm);
    let s0 = random_symmetric(rng, g, m, p);
    let inv_t = gm.inverse_mod()?.transpose();
    let lower = inv_t.try_mul(&s0)?;
    SympElement::from_blocks(&gm, &ResidueMatrix::zeros(m, g, g), &lower, &inv_t)
}

/// `(G G·pS₀; 0 ᵗG⁻¹)` with `G = Id + pN`, det G = 1, modulo p³.
pub fn random_spa_level<R: Rng + ?Sized>(rng: &mut R, g: usize, p: u64) -> Result<SympElement> {
    check_prime(p)?;
    let m = p * p * p;
    let mut gm = ResidueMatrix::identity(m, g).try_add(&random_matrix(rng, g, m, p))?;
    normalize_det(&mut gm);
    let s0 = random_symmetric(rng, g, m, p);
    let inv_t = gm.inverse_mod()?.transpose();
    let upper = gm.try_mul(&s0)?;
    SympElement::from_blocks(&gm, &upper, &ResidueMatrix::zeros(m, g, g), &inv_t)
}

/// `embed_gl(G)` with det G = ±1 modulo p³.
pub fn random_spab<R: Rng + ?Sized>(rng: &mut R, g: usize, p: u64) -> Result<SympElement> {
    check_prime(p)?;
    let m = p * p * p;
    let mut gm = loop {
        let c = random_matrix(rng, g, m, 1);
        if c.is_invertible() {
            break c;
        }
    };
    normalize_det(&mut gm);
    if rng.gen_bool(0.5) {
        gm = gm.try_mul(&d_g(g, m))?;
    }
    embed_gl(&gm)
}

pub fn sample_level(g: usize, p: u64, seed: u64) -> Result<SympElement> {
    random_level(&mut ChaCha8Rng::seed_from_u64(seed), g, p)
}

pub fn sample_spa_level(g: usize, p: u64, seed: u64) -> Result<SympElement> {
    random_spa_level(&mut ChaCha8Rng::seed_from_u64(seed), g, p)
}

pub fn sample_spb_level(g: usize, p: u64, seed: u64) -> Result<SympElement> {
    random_spb_level(&mut ChaCha8Rng::seed_from_u64(seed), g, p)
}

pub fn sample_spab(g: usize, p: u64, seed: u64) -> Result<SympElement> {
    random_spab(&mut ChaCha8Rng::seed_from_u64(seed), g, p)
}

#[cfg(test)]
mod tests {
    use super::super::{alpha, alpha32, trace_gl};
    use super::*;

    #[test]
    fn trivial_factors_give_identity() {
        let m = 125;
        let f = LevelFactors {
            u: ResidueMatrix::zeros(m, 3, 3),
            l: ResidueMatrix::zeros(m, 3, 3),
            d: ResidueMatrix::identity(m, 3),
        };
        assert_eq!(f.compose().unwrap(), SympElement::identity(3, m));
    }

    #[test]
    fn level_samples_and_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for g in 1..=4 {
            for _ in 0..50 {
                let (x, f) = sample_level_mod(&mut rng, g, 5, 3).unwrap();
                assert!(x.is_level(5).unwrap());
                assert_eq!(LevelFactors::recover(&x).unwrap(), f);
                let a = alpha32(&x, 5).unwrap();
                assert_eq!(
                    a.a_block(),
                    &f.u.divide_exact(5).unwrap().reduce_to(5).unwrap()
                );
                assert_eq!(
                    a.b_block(),
                    &f.l.divide_exact(5).unwrap().reduce_to(5).unwrap()
                );
            }
        }
    }

    #[test]
    fn handlebody_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let x = random_spb_level(&mut rng, 3, 7).unwrap();
            let b = x.blocks();
            assert!(b.f.is_zero());
            assert!(b.g.reduce_to(7).unwrap().is_zero());
            assert_eq!(b.e.det_mod().unwrap(), 1);
            assert_eq!(trace_gl(&alpha32(&x, 7).unwrap()), 0);
            let y = random_spa_level(&mut rng, 3, 7).unwrap();
            assert!(y.blocks().g.is_zero());
            assert!(y.is_level(7).unwrap());
            assert_eq!(trace_gl(&alpha(&y, 7).unwrap()), 0);
            let z = random_spab(&mut rng, 3, 7).unwrap();
            assert!(z.blocks().f.is_zero() && z.blocks().g.is_zero());
        }
    }

    #[test]
    fn rejects_small_primes() {
        assert!(sample_level(2, 3, 0).is_err());
        assert!(sample_spb_level(2, 4, 0).is_err());
        assert!(sample_spab(2, 9, 0).is_err());
    }

    #[test]
    fn deterministic_in_seed() {
        assert_eq!(
            sample_level(3, 5, 9).unwrap(),
            sample_level(3, 5, 9).unwrap()
        );
        assert_ne!(
            sample_level(3, 5, 9).unwrap(),
            sample_level(3, 5, 10).unwrap()
        );
    }
}
