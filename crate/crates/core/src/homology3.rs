//! Heegaard gluings, first homology, level admissibility and Lens-space
//! gluings.
//!
//! A gluing is recorded by its action on H₁ of the surface; H₁ of the
//! resulting 3-manifold is the cokernel of the lower-right block `H`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::error::{dim_mismatch, Error, Result};
use crate::exactalg::{ext_gcd, smith_normal_form, IntMatrix, ResidueMatrix};
use crate::symplectic::{is_symplectic_int, SympElement};

/// Integral symplectic matrix describing a Heegaard splitting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeegaardGluing {
    genus: usize,
    gluing: IntMatrix,
}

impl HeegaardGluing {
    pub fn new(genus: usize, gluing: IntMatrix) -> Result<Self> {
        if gluing.rows() != 2 * genus || gluing.cols() != 2 * genus {
            return Err(dim_mismatch(
                format!("{0}x{0}", 2 * genus),
                format!("{}x{}", gluing.rows(), gluing.cols()),
            ));
        }
        if !is_symplectic_int(&gluing, genus) {
            return Err(Error::NotSymplectic);
        }
        Ok(Self { genus, gluing })
    }

    pub fn identity(genus: usize) -> Self {
        Self {
            genus,
            gluing: IntMatrix::identity(2 * genus),
        }
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.gluing
    }

    pub fn h_block(&self) -> IntMatrix {
        let g = self.genus;
        self.gluing.submatrix(g, g, g, g)
    }

    pub fn reduce(&self, modulus: u64) -> Result<SympElement> {
        SympElement::new(self.genus, self.gluing.reduce(modulus)?)
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.genus != rhs.genus {
            return Err(dim_mismatch(self.genus, rhs.genus));
        }
        Ok(Self {
            genus: self.genus,
            gluing: self.gluing.try_mul(&rhs.gluing)?,
        })
    }

    /// Block sum with the identity of genus `k` in the a/b ordering.
    pub fn stabilize(&self, k: usize) -> Self {
        let g = self.genus;
        let n = g + k;
        let idx = |i: usize| if i < g { i } else { n + (i - g) };
        let mut m = IntMatrix::identity(2 * n);
        for r in 0..2 * g {
            for c in 0..2 * g {
                m.set(idx(r), idx(c), self.gluing.get(r, c).clone());
            }
        }
        Self {
            genus: n,
            gluing: m,
        }
    }
}

/// Order of a finite abelian group, or infinite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupOrder {
    Finite(BigInt),
    Infinite,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyReport {
    /// Invariant factors greater than one, each dividing the next.
    pub torsion: Vec<BigInt>,
    pub free_rank: usize,
    pub order: GroupOrder,
}

pub fn h1_of_splitting(hg: &HeegaardGluing) -> HomologyReport {
    let snf = smith_normal_form(&hg.h_block());
    let torsion: Vec<BigInt> = snf
        .invariant_factors
        .iter()
        .filter(|x| !x.is_one())
        .cloned()
        .collect();
    let free_rank = snf.nullity();
    let order = if free_rank == 0 {
        GroupOrder::Finite(torsion.iter().product())
    } else {
        GroupOrder::Infinite
    };
    HomologyReport {
        torsion,
        free_rank,
        order,
    }
}

pub fn order_h1(report: &HomologyReport) -> Result<BigInt> {
    match &report.order {
        GroupOrder::Finite(n) => Ok(n.clone()),
        GroupOrder::Infinite => Err(Error::NotRationalHomologySphere {
            free_rank: report.free_rank,
        }),
    }
}

/// All `d ∈ [2, bound]` dividing `n − 1` or `n + 1` (every d divides 0).
pub fn admissible_levels(n: &BigInt, bound: u64) -> Result<Vec<u64>> {
    if !n.is_positive() || bound < 2 {
        return Err(Error::InvalidParameter(format!(
            "need n >= 1 and bound >= 2, got n = {n}, bound = {bound}"
        )));
    }
    let below = n - 1u32;
    let above = n + 1u32;
    Ok((2..=bound)
        .filter(|&d| {
            let d = BigInt::from(d);
            (&below % &d).is_zero() || (&above % &d).is_zero()
        })
        .collect())
}

pub fn euler_phi(mut n: u64) -> u64 {
    let mut result = n;
    let mut q = 2;
    while q * q <= n {
        if n.is_multiple_of(q) {
            while n.is_multiple_of(q) {
                n /= q;
            }
            result -= result / q;
        }
        q += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// Whether the unit group (ℤ/d)ˣ is {±1}, i.e. d ∈ {2, 3, 4, 6}.
pub fn sets_coincide(d: u64) -> Result<bool> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("need d >= 2, got {d}")));
    }
    Ok(euler_phi(d) <= 2)
}

/// Elements `Xa = (Id A; 0 Id)` and `Yb` lower block triangular with
/// `Xa·X·Yb = Id` modulo d.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trivialization {
    pub xa: SympElement,
    pub yb: SympElement,
    pub a: ResidueMatrix,
}

pub fn trivialize_mod_d(x: &SympElement) -> Result<Trivialization> {
    let d = x.modulus();
    let b = x.blocks();
    let det = b.h.det_mod()?;
    if det != 1 % d && det != d - 1 {
        return Err(Error::Inadmissible { det, level: d });
    }
    let g = x.genus();
    let a = b.f.try_mul(&b.h.inverse_mod()?)?.neg();
    let id = ResidueMatrix::identity(d, g);
    let zero = ResidueMatrix::zeros(d, g, g);
    let xa = SympElement::from_blocks(&id, &a, &zero, &id)?;
    let lower = SympElement::from_blocks(&b.e.try_add(&a.try_mul(&b.g)?)?, &zero, &b.g, &b.h)?;
    Ok(Trivialization {
        xa,
        yb: lower.inverse(),
        a,
    })
}

/// Genus-1 gluing for the Lens space L(1+dk, dl), congruent to Id mod d.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LensGluing {
    pub d: i64,
    pub k: i64,
    pub l: i64,
    pub gluing: HeegaardGluing,
}

impl LensGluing {
    /// Solves `a(1+dk) − dl·b = 1` and completes the column `(dl, 1+dk)` to
    /// `(1 − dka, dl; −dkb, 1+dk)`, which has determinant one and reduces
    /// to the identity mod d.
    pub fn new(d: i64, k: i64, l: i64) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameter(format!("need d >= 2, got {d}")));
        }
        let p = 1 + d * k;
        let q = d * l;
        let (gcd, a, b) = ext_gcd(p as i128, -(q as i128));
        if gcd != 1 {
            return Err(Error::InvalidParameter(format!(
                "gcd(1 + dk, dl) = gcd({p}, {q}) = {gcd}, expected 1"
            )));
        }
        let (a, b) = (a as i64, b as i64);
        let m = IntMatrix::from_i64(2, 2, &[1 - d * k * a, q, -d * k * b, p])?;
        Ok(Self {
            d,
            k,
            l,
            gluing: HeegaardGluing::new(1, m)?,
        })
    }

    pub fn order(&self) -> BigInt {
        BigInt::from(1 + self.d * self.k).abs()
    }
}

/// Product of `length` random generators `(Id S; 0 Id)`, `(Id 0; S Id)` and
/// `embed_gl(E)` with E elementary or `D_g`; entries of S lie in [−2, 2].
pub fn random_gluing<R: Rng + ?Sized>(rng: &mut R, g: usize, length: usize) -> HeegaardGluing {
    let mut acc = IntMatrix::identity(2 * g);
    for _ in 0..length {
        let mut m = IntMatrix::identity(2 * g);
        match rng.gen_range(0..3) {
            0 | 1 => {
                let upper = rng.gen_bool(0.5);
                for i in 0..g {
                    for j in i..g {
                        let v = BigInt::from(rng.gen_range(-2i64..=2));
                        let (r, c) = if upper { (i, g + j) } else { (g + i, j) };
                        let (r2, c2) = if upper { (j, g + i) } else { (g + j, i) };
                        m.set(r, c, v.clone());
                        m.set(r2, c2, v);
                    }
                }
            }
            _ => {
                if g > 1 && rng.gen_bool(0.8) {
                    let i = rng.gen_range(0..g);
                    let j = (i + rng.gen_range(1..g)) % g;
                    let s: i64 = if rng.gen_bool(0.5) { 1 } else { -1 };
                    // E = Id + s·e_ij and ᵗE⁻¹ = Id − s·e_ji
                    m.set(i, j, BigInt::from(s));
                    m.set(g + j, g + i, BigInt::from(-s));
                } else {
                    m.set(0, 0, BigInt::from(-1));
                    m.set(g, g, BigInt::from(-1));
                }
            }
        }
        acc = &acc * &m;
    }
    HeegaardGluing {
        genus: g,
        gluing: acc,
    }
}

/// Parses a gluing file: `genus g` followed by `2g × 2g` integers.
pub fn parse_gluing(text: &str) -> Result<HeegaardGluing> {
    use crate::exactalg::{content_lines, parse_body, parse_usize, MatrixText};
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| Error::Parse {
        line: 1,
        message: "empty input".into(),
    })?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 2 || toks[0] != "genus" {
        return Err(Error::Parse {
            line: hline,
            message: "header must be `genus g`".into(),
        });
    }
    let g = parse_usize(toks[1], hline)?;
    if g == 0 {
        return Err(Error::Parse {
            line: hline,
            message: "genus must be positive".into(),
        });
    }
    let MatrixText::Integer(m) = parse_body(lines, 2 * g, 2 * g, None, hline)? else {
        unreachable!("no modulus supplied")
    };
    HeegaardGluing::new(g, m)
}

/// Comma-separated levels with runs of three or more written `a..b`.
pub fn format_levels(levels: &[u64]) -> String {
    let mut parts = Vec::new();
    let mut i = 0;
    while i < levels.len() {
        let mut j = i;
        while j + 1 < levels.len() && levels[j + 1] == levels[j] + 1 {
            j += 1;
        }
        if j >= i + 2 {
            parts.push(format!("{}..{}", levels[i], levels[j]));
        } else {
            parts.extend(levels[i..=j].iter().map(u64::to_string));
        }
        i = j + 1;
    }
    parts.join(",")
}
