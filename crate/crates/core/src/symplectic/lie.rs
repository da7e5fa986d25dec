use crate::error::{dim_mismatch, Error, Result};
use crate::exactalg::ResidueMatrix;

/// Element `(α β; γ −ᵗα)` of 𝔰𝔭_2g(ℤ/m), stored as its gl block α and the
/// symmetric blocks β (the A-side, upper right) and γ (the B-side, lower left).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpLieElement {
    genus: usize,
    gl: ResidueMatrix,
    a_block: ResidueMatrix,
    b_block: ResidueMatrix,
}

impl SpLieElement {
    pub fn from_blocks(
        gl: ResidueMatrix,
        a_block: ResidueMatrix,
        b_block: ResidueMatrix,
    ) -> Result<Self> {
        let g = gl.rows();
        for blk in [&gl, &a_block, &b_block] {
            if blk.rows() != g || blk.cols() != g {
                return Err(dim_mismatch(
                    format!("{g}x{g}"),
                    format!("{}x{}", blk.rows(), blk.cols()),
                ));
            }
            if blk.modulus() != gl.modulus() {
                return Err(Error::ModulusMismatch {
                    left: gl.modulus(),
                    right: blk.modulus(),
                });
            }
        }
        if !a_block.is_symmetric() || !b_block.is_symmetric() {
            return Err(Error::InvalidParameter(
                "a and b blocks of an sp element must be symmetric".into(),
            ));
        }
        Ok(Self {
            genus: g,
            gl,
            a_block,
            b_block,
        })
    }

    pub fn zero(genus: usize, modulus: u64) -> Self {
        let z = ResidueMatrix::zeros(modulus, genus, genus);
        Self {
            genus,
            gl: z.clone(),
            a_block: z.clone(),
            b_block: z,
        }
    }

    fn sym_unit(genus: usize, modulus: u64, i: usize, j: usize) -> ResidueMatrix {
        let mut m = ResidueMatrix::zeros(modulus, genus, genus);
        m.set(i, j, 1);
        m.set(j, i, 1);
        m
    }

    /// n_ij: gl block e_ij.
    pub fn n(genus: usize, modulus: u64, i: usize, j: usize) -> Self {
        let mut x = Self::zero(genus, modulus);
        x.gl.set(i, j, 1);
        x
    }

    /// u_ij: a block e_ij + e_ji (e_ii on the diagonal).
    pub fn u(genus: usize, modulus: u64, i: usize, j: usize) -> Self {
        let mut x = Self::zero(genus, modulus);
        x.a_block = Self::sym_unit(genus, modulus, i, j);
        x
    }

    /// l_ij: b block e_ij + e_ji (e_ii on the diagonal).
    pub fn l(genus: usize, modulus: u64, i: usize, j: usize) -> Self {
        let mut x = Self::zero(genus, modulus);
        x.b_block = Self::sym_unit(genus, modulus, i, j);
        x
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn modulus(&self) -> u64 {
        self.gl.modulus()
    }

    pub fn gl(&self) -> &ResidueMatrix {
        &self.gl
    }

    pub fn a_block(&self) -> &ResidueMatrix {
        &self.a_block
    }

    pub fn b_block(&self) -> &ResidueMatrix {
        &self.b_block
    }

    pub fn is_zero(&self) -> bool {
        self.gl.is_zero() && self.a_block.is_zero() && self.b_block.is_zero()
    }

    /// Full 2g×2g matrix `(α β; γ −ᵗα)`.
    pub fn to_matrix(&self) -> ResidueMatrix {
        ResidueMatrix::from_blocks(
            &self.gl,
            &self.a_block,
            &self.b_block,
            &self.gl.transpose().neg(),
        )
        .expect("blocks agree")
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        Ok(Self {
            genus: self.genus,
            gl: self.gl.try_add(&rhs.gl)?,
            a_block: self.a_block.try_add(&rhs.a_block)?,
            b_block: self.b_block.try_add(&rhs.b_block)?,
        })
    }

    pub fn scale(&self, c: i64) -> Self {
        Self {
            genus: self.genus,
            gl: self.gl.scale(c),
            a_block: self.a_block.scale(c),
            b_block: self.b_block.scale(c),
        }
    }

    /// Action of G ∈ GL_g through the block-diagonal embedding:
    /// `α ↦ GαG⁻¹`, `β ↦ GβᵗG`, `γ ↦ ᵗG⁻¹γG⁻¹`.
    pub fn act(&self, gm: &ResidueMatrix) -> Result<Self> {
        let inv = gm.inverse_mod()?;
        let inv_t = inv.transpose();
        Ok(Self {
            genus: self.genus,
            gl: gm.try_mul(&self.gl)?.try_mul(&inv)?,
            a_block: gm.try_mul(&self.a_block)?.try_mul(&gm.transpose())?,
            b_block: inv_t.try_mul(&self.b_block)?.try_mul(&inv)?,
        })
    }

    /// Number of coordinates: g² + g(g+1).
    pub fn coord_dim(genus: usize) -> usize {
        genus * genus + genus * (genus + 1)
    }

    /// Coordinates: gl entries row-major, then the upper triangles (i ≤ j)
    /// of the a and b blocks.
    pub fn coords(&self) -> Vec<u64> {
        let g = self.genus;
        let mut v: Vec<u64> = self.gl.entries().to_vec();
        for blk in [&self.a_block, &self.b_block] {
            for i in 0..g {
                for j in i..g {
                    v.push(blk.get(i, j));
                }
            }
        }
        v
    }

    pub fn from_coords(genus: usize, modulus: u64, v: &[u64]) -> Result<Self> {
        if v.len() != Self::coord_dim(genus) {
            return Err(dim_mismatch(Self::coord_dim(genus), v.len()));
        }
        let g = genus;
        let gl = ResidueMatrix::new(modulus, g, g, v[..g * g].to_vec())?;
        let mut blocks = [
            ResidueMatrix::zeros(modulus, g, g),
            ResidueMatrix::zeros(modulus, g, g),
        ];
        let mut k = g * g;
        for blk in blocks.iter_mut() {
            for i in 0..g {
                for j in i..g {
                    blk.set(i, j, v[k]);
                    blk.set(j, i, v[k]);
                    k += 1;
                }
            }
        }
        let [a_block, b_block] = blocks;
        Self::from_blocks(gl, a_block, b_block)
    }

    /// Labels of the coordinate basis: n_ij, u_ij, l_ij (1-based indices).
    pub fn basis_labels(genus: usize) -> Vec<String> {
        let g = genus;
        let mut out = Vec::new();
        for i in 0..g {
            for j in 0..g {
                out.push(format!("n{}{}", i + 1, j + 1));
            }
        }
        for pre in ["u", "l"] {
            for i in 0..g {
                for j in i..g {
                    out.push(format!("{pre}{}{}", i + 1, j + 1));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coords_round_trip() {
        let x = SpLieElement::n(3, 5, 0, 2)
            .try_add(&SpLieElement::u(3, 5, 1, 2).scale(2))
            .unwrap()
            .try_add(&SpLieElement::l(3, 5, 0, 0).scale(3))
            .unwrap();
        let back = SpLieElement::from_coords(3, 5, &x.coords()).unwrap();
        assert_eq!(back, x);
        assert_eq!(
            SpLieElement::basis_labels(3).len(),
            SpLieElement::coord_dim(3)
        );
    }

    #[test]
    fn matrix_is_in_sp() {
        // ᵗ(M)Ω + ΩM = 0 with Ω the standard form.
        let x = SpLieElement::n(2, 7, 0, 1)
            .try_add(&SpLieElement::u(2, 7, 0, 1))
            .unwrap()
            .try_add(&SpLieElement::l(2, 7, 1, 1).scale(3))
            .unwrap();
        let m = x.to_matrix();
        let om = super::super::omega_matrix(2, 7, 1);
        let lhs = m
            .transpose()
            .try_mul(&om)
            .unwrap()
            .try_add(&om.try_mul(&m).unwrap())
            .unwrap();
        assert!(lhs.is_zero());
    }

    #[test]
    fn rejects_non_symmetric() {
        let mut a = ResidueMatrix::zeros(5, 2, 2);
        a.set(0, 1, 1);
        let z = ResidueMatrix::zeros(5, 2, 2);
        assert!(SpLieElement::from_blocks(z.clone(), a, z).is_err());
    }
}
