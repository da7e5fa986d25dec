//! Symplectic matrices over ℤ/m in the basis a₁…a_g, b₁…b_g, the level
//! filtration, the maps α and α₃|₂, and exact samplers.
//!
//! Block letters follow `X = (E F; G H)`: `E` maps A to A, `F` maps B to A,
//! `G` maps A to B and `H` maps B to B. The symplectic condition
//! `ᵗX Ω X = Ω` is homogeneous in Ω, so it does not depend on the sign
//! convention for ω(aᵢ, bᵢ).
//!
//! Shape conventions for the Lagrangian stabilizers: Sp^A is upper block
//! triangular `(∗ ∗; 0 ∗)` and Sp^B is lower block triangular `(∗ 0; ∗ ∗)`.
//! This is the assignment used by the trivialization argument for levels
//! (`X = (Id A; 0 Id)` is an A-side element there); a different display of
//! the two shapes exists in the literature and is deliberately not followed.

mod lie;
mod sample;

pub use lie::SpLieElement;
pub use sample::{
    random_level, random_spa_level, random_spab, random_spb_level, random_symmetric, sample_level,
    sample_level_mod, sample_spa_level, sample_spab, sample_spb_level, LevelFactors,
};

use crate::error::{dim_mismatch, Error, Result};
use crate::exactalg::{parse_usize, IntMatrix, ResidueMatrix};

/// Sign choices for the intersection form and the welding bracket.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Conventions {
    /// ω(aᵢ, bᵢ).
    pub omega_sign: i8,
    /// Overall sign of the tripod bracket.
    pub weld_sign: i8,
}

impl Conventions {
    pub fn new(omega_sign: i8, weld_sign: i8) -> Result<Self> {
        for s in [omega_sign, weld_sign] {
            if s != 1 && s != -1 {
                return Err(Error::InvalidParameter(format!("sign must be ±1, got {s}")));
            }
        }
        Ok(Self {
            omega_sign,
            weld_sign,
        })
    }

    pub fn flip_omega(self) -> Self {
        Self {
            omega_sign: -self.omega_sign,
            ..self
        }
    }
}

impl Default for Conventions {
    /// The calibrated choice: ω(aᵢ,bᵢ) = −1 and a negative bracket sign.
    fn default() -> Self {
        Self {
            omega_sign: -1,
            weld_sign: -1,
        }
    }
}

/// Matrix of ω in the basis a₁…a_g, b₁…b_g.
pub fn omega_matrix(g: usize, modulus: u64, omega_sign: i8) -> ResidueMatrix {
    let s = omega_sign as i64;
    ResidueMatrix::from_fn(modulus, 2 * g, 2 * g, |r, c| {
        if r < g && c == r + g {
            s
        } else if r >= g && c + g == r {
            -s
        } else {
            0
        }
    })
}

pub fn is_symplectic(x: &ResidueMatrix, g: usize) -> bool {
    if x.rows() != 2 * g || x.cols() != 2 * g {
        return false;
    }
    let omega = omega_matrix(g, x.modulus(), 1);
    let lhs = x.transpose().try_mul(&omega).and_then(|t| t.try_mul(x));
    lhs.map(|l| l == omega).unwrap_or(false)
}

/// Integral version of [`is_symplectic`].
pub fn is_symplectic_int(x: &IntMatrix, g: usize) -> bool {
    if x.rows() != 2 * g || x.cols() != 2 * g {
        return false;
    }
    let mut om = IntMatrix::zeros(2 * g, 2 * g);
    for i in 0..g {
        om.set(i, i + g, 1.into());
        om.set(i + g, i, (-1).into());
    }
    &(&x.transpose() * &om) * x == om
}

/// Element of Sp_2g(ℤ/m).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SympElement {
    genus: usize,
    body: ResidueMatrix,
}

/// The four g×g blocks `(E F; G H)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Blocks {
    pub e: ResidueMatrix,
    pub f: ResidueMatrix,
    pub g: ResidueMatrix,
    pub h: ResidueMatrix,
}

impl SympElement {
    pub fn new(genus: usize, body: ResidueMatrix) -> Result<Self> {
        if genus == 0 {
            return Err(Error::InvalidParameter("genus must be positive".into()));
        }
        if body.rows() != 2 * genus || body.cols() != 2 * genus {
            return Err(dim_mismatch(
                format!("{0}x{0}", 2 * genus),
                format!("{}x{}", body.rows(), body.cols()),
            ));
        }
        if !is_symplectic(&body, genus) {
            return Err(Error::NotSymplectic);
        }
        Ok(Self { genus, body })
    }

    /// Skips the symplectic check; callers construct products of known elements.
    pub(crate) fn new_unchecked(genus: usize, body: ResidueMatrix) -> Self {
        debug_assert!(is_symplectic(&body, genus));
        Self { genus, body }
    }

    pub fn identity(genus: usize, modulus: u64) -> Self {
        Self {
            genus,
            body: ResidueMatrix::identity(modulus, 2 * genus),
        }
    }

    pub fn from_blocks(
        e: &ResidueMatrix,
        f: &ResidueMatrix,
        g: &ResidueMatrix,
        h: &ResidueMatrix,
    ) -> Result<Self> {
        let body = ResidueMatrix::from_blocks(e, f, g, h)?;
        Self::new(e.rows(), body)
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn modulus(&self) -> u64 {
        self.body.modulus()
    }

    pub fn body(&self) -> &ResidueMatrix {
        &self.body
    }

    pub fn blocks(&self) -> Blocks {
        let g = self.genus;
        Blocks {
            e: self.body.submatrix(0, 0, g, g),
            f: self.body.submatrix(0, g, g, g),
            g: self.body.submatrix(g, 0, g, g),
            h: self.body.submatrix(g, g, g, g),
        }
    }

    fn check_compatible(&self, rhs: &Self) -> Result<()> {
        if self.genus != rhs.genus {
            return Err(dim_mismatch(self.genus, rhs.genus));
        }
        if self.modulus() != rhs.modulus() {
            return Err(Error::ModulusMismatch {
                left: self.modulus(),
                right: rhs.modulus(),
            });
        }
        Ok(())
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        self.check_compatible(rhs)?;
        Ok(Self {
            genus: self.genus,
            body: self.body.try_mul(&rhs.body)?,
        })
    }

    /// `(E F; G H)⁻¹ = (ᵗH −ᵗF; −ᵗG ᵗE)`.
    pub fn inverse(&self) -> Self {
        let b = self.blocks();
        let body = ResidueMatrix::from_blocks(
            &b.h.transpose(),
            &b.f.transpose().neg(),
            &b.g.transpose().neg(),
            &b.e.transpose(),
        )
        .expect("blocks have matching shapes");
        Self {
            genus: self.genus,
            body,
        }
    }

    pub fn conjugate_by(&self, c: &Self) -> Result<Self> {
        c.try_mul(self)?.try_mul(&c.inverse())
    }

    pub fn reduce_to(&self, modulus: u64) -> Result<Self> {
        Ok(Self {
            genus: self.genus,
            body: self.body.reduce_to(modulus)?,
        })
    }

    /// True iff the element is ≡ Id mod d; `d` must divide the modulus.
    pub fn is_level(&self, d: u64) -> Result<bool> {
        if d < 2 || !self.modulus().is_multiple_of(d) {
            return Err(Error::InvalidParameter(format!(
                "level {d} does not divide the modulus {}",
                self.modulus()
            )));
        }
        Ok(self.body.reduce_to(d)?.is_identity())
    }

    /// Block sum with the identity of genus `k`, keeping the a/b ordering.
    pub fn stabilize(&self, k: usize) -> Self {
        let g = self.genus;
        let n = g + k;
        let idx = |i: usize| if i < g { i } else { n + (i - g) };
        let mut body = ResidueMatrix::identity(self.modulus(), 2 * n);
        for r in 0..2 * g {
            for c in 0..2 * g {
                body.set(idx(r), idx(c), self.body.get(r, c));
            }
        }
        Self { genus: n, body }
    }
}

/// `G ↦ (G 0; 0 ᵗG⁻¹)`.
pub fn embed_gl(gm: &ResidueMatrix) -> Result<SympElement> {
    if !gm.is_square() {
        return Err(Error::NotSquare {
            rows: gm.rows(),
            cols: gm.cols(),
        });
    }
    let inv_t = gm.inverse_mod()?.transpose();
    let z = ResidueMatrix::zeros(gm.modulus(), gm.rows(), gm.rows());
    Ok(SympElement::new_unchecked(
        gm.rows(),
        ResidueMatrix::from_blocks(gm, &z, &z, &inv_t)?,
    ))
}

/// `D_g = diag(−1, 1, …, 1)`.
pub fn d_g(g: usize, modulus: u64) -> ResidueMatrix {
    ResidueMatrix::from_fn(modulus, g, g, |r, c| match (r == c, r) {
        (true, 0) => -1,
        (true, _) => 1,
        _ => 0,
    })
}

/// Elementary matrix `Id + c·e_ij`.
pub fn elementary(g: usize, modulus: u64, i: usize, j: usize, c: i64) -> ResidueMatrix {
    let mut m = ResidueMatrix::identity(modulus, g);
    let v = m.get(i, j) as i64 + c;
    m.set_i64(i, j, v);
    m
}

/// `(Id S; 0 Id)`; symplectic iff S is symmetric.
pub fn upper_unipotent(s: &ResidueMatrix) -> Result<ResidueMatrix> {
    let g = s.rows();
    let m = s.modulus();
    ResidueMatrix::from_blocks(
        &ResidueMatrix::identity(m, g),
        s,
        &ResidueMatrix::zeros(m, g, g),
        &ResidueMatrix::identity(m, g),
    )
}

/// `(Id 0; S Id)`; symplectic iff S is symmetric.
pub fn lower_unipotent(s: &ResidueMatrix) -> Result<ResidueMatrix> {
    let g = s.rows();
    let m = s.modulus();
    ResidueMatrix::from_blocks(
        &ResidueMatrix::identity(m, g),
        &ResidueMatrix::zeros(m, g, g),
        s,
        &ResidueMatrix::identity(m, g),
    )
}

/// `(X − Id)/d mod d` for X ≡ Id mod d, packaged as (gl; a; b) blocks.
pub fn alpha(x: &SympElement, d: u64) -> Result<SpLieElement> {
    let m = x.modulus();
    if d < 2 || !m.is_multiple_of(d * d) {
        return Err(Error::ModulusTooSmall {
            modulus: m,
            required: d * d,
        });
    }
    if !x.is_level(d)? {
        return Err(Error::LevelViolation { level: d });
    }
    let delta = x
        .body()
        .try_sub(&ResidueMatrix::identity(m, 2 * x.genus()))?
        .divide_exact(d)?
        .reduce_to(d)?;
    let g = x.genus();
    SpLieElement::from_blocks(
        delta.submatrix(0, 0, g, g),
        delta.submatrix(0, g, g, g),
        delta.submatrix(g, 0, g, g),
    )
}

/// α₃|₂: the same read-off for level-p elements known modulo p³.
pub fn alpha32(x: &SympElement, p: u64) -> Result<SpLieElement> {
    if x.modulus() != p * p * p {
        return Err(Error::ModulusTooSmall {
            modulus: x.modulus(),
            required: p * p * p,
        });
    }
    alpha(x, p)
}

pub fn pi_gl(l: &SpLieElement) -> &ResidueMatrix {
    l.gl()
}

pub fn trace_gl(l: &SpLieElement) -> u64 {
    l.gl().trace()
}

/// Parses `genus g modulus m` followed by a `2g × 2g` block of integers.
pub fn parse_symp_element(text: &str) -> Result<SympElement> {
    use crate::exactalg::{content_lines, parse_body, MatrixText};
    let perr = |line, message: String| Error::Parse { line, message };
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| perr(1, "empty input".into()))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 4 || toks[0] != "genus" || toks[2] != "modulus" {
        return Err(perr(hline, "header must be `genus g modulus m`".into()));
    }
    let g = parse_usize(toks[1], hline)?;
    let m = parse_usize(toks[3], hline)? as u64;
    if g == 0 {
        return Err(perr(hline, "genus must be positive".into()));
    }
    let MatrixText::Residue(body) = parse_body(lines, 2 * g, 2 * g, Some(m), hline)? else {
        unreachable!("a modulus was supplied")
    };
    SympElement::new(g, body)
}

pub fn format_symp_element(x: &SympElement) -> String {
    let mut s = format!("genus {} modulus {}\n", x.genus(), x.modulus());
    for r in 0..2 * x.genus() {
        let row: Vec<String> = (0..2 * x.genus())
            .map(|c| x.body().get(r, c).to_string())
            .collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}
