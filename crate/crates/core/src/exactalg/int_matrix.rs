use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{dim_mismatch, Error, Result};

use super::residue::ResidueMatrix;

/// Dense integer matrix with arbitrary-precision entries, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if entries.len() != rows * cols {
            return Err(dim_mismatch(rows * cols, entries.len()));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            entries.iter().map(|&x| BigInt::from(x)).collect(),
        )
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: BigInt) {
        self.entries[r * self.cols + c] = value;
    }

    pub(crate) fn get_mut(&mut self, r: usize, c: usize) -> &mut BigInt {
        &mut self.entries[r * self.cols + c]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.entries[c * self.rows + r] = self.get(r, c).clone();
            }
        }
        t
    }

    pub fn try_mul(&self, rhs: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != rhs.rows {
            return Err(dim_mismatch(
                format!("{} rows on the right", self.cols),
                rhs.rows,
            ));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * rhs.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Copy of the block with top-left corner `(r0, c0)`.
    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> IntMatrix {
        let mut out = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                out.entries[r * cols + c] = self.get(r0 + r, c0 + c).clone();
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|r| (0..self.cols).all(|c| r == c || self.get(r, c).is_zero()))
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut a = self.entries.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k * n + k].is_zero() {
                let Some(swap) = (k + 1..n).find(|&r| !a[r * n + k].is_zero()) else {
                    return Ok(BigInt::zero());
                };
                for c in 0..n {
                    a.swap(k * n + c, swap * n + c);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j];
                    // Bareiss: the division is exact.
                    a[i * n + j] = v / &prev;
                }
                a[i * n + k] = BigInt::zero();
            }
            prev = a[k * n + k].clone();
        }
        Ok(sign * &a[n * n - 1])
    }

    /// Entry-wise reduction into canonical representatives modulo `modulus`.
    pub fn reduce(&self, modulus: u64) -> Result<ResidueMatrix> {
        let m = BigInt::from(modulus);
        let entries = self
            .entries
            .iter()
            .map(|x| {
                let r = x.mod_floor(&m);
                u64::try_from(r).expect("residue fits in u64")
            })
            .collect();
        ResidueMatrix::new(modulus, self.rows, self.cols, entries)
    }

    /// Maximum absolute entry; handy for bounding test inputs.
    pub fn max_abs(&self) -> BigInt {
        self.entries
            .iter()
            .map(|x| x.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;

    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        self.try_mul(rhs).expect("matrix dimensions agree")
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix{}x{}[", self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_examples() {
        assert_eq!(IntMatrix::identity(4).det().unwrap(), BigInt::one());
        let diag = IntMatrix::from_i64(2, 2, &[2, 0, 0, 3]).unwrap();
        assert_eq!(diag.det().unwrap(), BigInt::from(6));
        let m = IntMatrix::from_i64(2, 2, &[1, 2, 3, 4]).unwrap();
        assert_eq!(m.det().unwrap(), BigInt::from(-2));
    }

    #[test]
    fn det_rejects_non_square() {
        let m = IntMatrix::zeros(2, 3);
        assert!(matches!(m.det(), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn det_needs_pivot_swap() {
        let m = IntMatrix::from_i64(3, 3, &[0, 1, 2, 1, 0, 3, 4, -3, 8]).unwrap();
        // cofactor expansion along the first row: -1*(8-12) + 2*(-3-0) = 4 - 6
        assert_eq!(m.det().unwrap(), BigInt::from(-2));
    }

    #[test]
    fn new_validates_length() {
        assert!(IntMatrix::new(2, 2, vec![BigInt::zero(); 3]).is_err());
        assert!(IntMatrix::new(0, 2, vec![]).is_err());
    }
}
