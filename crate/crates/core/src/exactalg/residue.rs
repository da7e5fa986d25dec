use std::fmt;

use crate::error::{dim_mismatch, Error, Result};

/// Canonical representative of `x` modulo `m`.
pub fn reduce_i64(x: i64, m: u64) -> u64 {
    x.rem_euclid(m as i64) as u64
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn neg_mod(a: u64, m: u64) -> u64 {
    if a == 0 {
        0
    } else {
        m - a
    }
}

/// Extended gcd: returns (g, s, t) with s·a + t·b = g ≥ 0.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Inverse of `a` modulo `m`, if `a` is a unit.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (g, s, _) = ext_gcd(a as i128, m as i128);
    (g == 1).then(|| s.rem_euclid(m as i128) as u64)
}

/// Matrix over ℤ/m with entries in `{0, …, m−1}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ResidueMatrix {
    modulus: u64,
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
}

impl ResidueMatrix {
    pub fn new(modulus: u64, rows: usize, cols: usize, entries: Vec<u64>) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::InvalidParameter(format!(
                "modulus must be at least 2, got {modulus}"
            )));
        }
        if entries.len() != rows * cols {
            return Err(dim_mismatch(rows * cols, entries.len()));
        }
        let entries = entries.into_iter().map(|x| x % modulus).collect();
        Ok(Self {
            modulus,
            rows,
            cols,
            entries,
        })
    }

    pub fn from_i64(modulus: u64, rows: usize, cols: usize, entries: &[i64]) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::InvalidParameter(format!(
                "modulus must be at least 2, got {modulus}"
            )));
        }
        Self::new(
            modulus,
            rows,
            cols,
            entries.iter().map(|&x| reduce_i64(x, modulus)).collect(),
        )
    }

    pub fn zeros(modulus: u64, rows: usize, cols: usize) -> Self {
        Self {
            modulus,
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn identity(modulus: u64, n: usize) -> Self {
        Self::scalar(modulus, n, 1)
    }

    pub fn scalar(modulus: u64, n: usize, c: u64) -> Self {
        let mut m = Self::zeros(modulus, n, n);
        for i in 0..n {
            m.entries[i * n + i] = c % modulus;
        }
        m
    }

    pub fn from_fn(
        modulus: u64,
        rows: usize,
        cols: usize,
        f: impl Fn(usize, usize) -> i64,
    ) -> Self {
        let mut m = Self::zeros(modulus, rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.entries[r * cols + c] = reduce_i64(f(r, c), modulus);
            }
        }
        m
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: u64) {
        self.entries[r * self.cols + c] = value % self.modulus;
    }

    pub fn set_i64(&mut self, r: usize, c: usize, value: i64) {
        self.entries[r * self.cols + c] = reduce_i64(value, self.modulus);
    }

    /// Symmetric representative in `(−m/2, m/2]`.
    pub fn signed(&self, r: usize, c: usize) -> i64 {
        let v = self.get(r, c);
        if 2 * v > self.modulus {
            v as i64 - self.modulus as i64
        } else {
            v as i64
        }
    }

    fn check_same_shape(&self, rhs: &Self) -> Result<()> {
        if self.modulus != rhs.modulus {
            return Err(Error::ModulusMismatch {
                left: self.modulus,
                right: rhs.modulus,
            });
        }
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(dim_mismatch(
                format!("{}x{}", self.rows, self.cols),
                format!("{}x{}", rhs.rows, rhs.cols),
            ));
        }
        Ok(())
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.modulus != rhs.modulus {
            return Err(Error::ModulusMismatch {
                left: self.modulus,
                right: rhs.modulus,
            });
        }
        if self.cols != rhs.rows {
            return Err(dim_mismatch(self.cols, rhs.rows));
        }
        let m = self.modulus as u128;
        let mut out = Self::zeros(self.modulus, self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc: u128 = 0;
                for k in 0..self.cols {
                    acc += self.get(i, k) as u128 * rhs.get(k, j) as u128;
                }
                out.entries[i * rhs.cols + j] = (acc % m) as u64;
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        self.check_same_shape(rhs)?;
        let m = self.modulus;
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| (a + b) % m)
            .collect();
        Ok(Self {
            modulus: self.modulus,
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.check_same_shape(rhs)?;
        let m = self.modulus;
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| (a + m - b) % m)
            .collect();
        Ok(Self {
            modulus: self.modulus,
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn scale(&self, c: i64) -> Self {
        let c = reduce_i64(c, self.modulus);
        let mut out = self.clone();
        for e in &mut out.entries {
            *e = mul_mod(*e, c, self.modulus);
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(-1)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.modulus, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.entries[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    pub fn trace(&self) -> u64 {
        let n = self.rows.min(self.cols);
        (0..n).map(|i| self.get(i, i)).sum::<u64>() % self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| (0..self.cols).all(|c| self.get(r, c) == u64::from(r == c)))
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|r| (0..r).all(|c| self.get(r, c) == self.get(c, r)))
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        let mut out = Self::zeros(self.modulus, rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                out.entries[r * cols + c] = self.get(r0 + r, c0 + c);
            }
        }
        out
    }

    /// Assemble the 2×2 block matrix `(a b; c d)`.
    pub fn from_blocks(a: &Self, b: &Self, c: &Self, d: &Self) -> Result<Self> {
        let m = a.modulus;
        for blk in [b, c, d] {
            if blk.modulus != m {
                return Err(Error::ModulusMismatch {
                    left: m,
                    right: blk.modulus,
                });
            }
        }
        if a.rows != b.rows || c.rows != d.rows || a.cols != c.cols || b.cols != d.cols {
            return Err(dim_mismatch(
                "compatible block shapes",
                "incompatible blocks",
            ));
        }
        let rows = a.rows + c.rows;
        let cols = a.cols + b.cols;
        let mut out = Self::zeros(m, rows, cols);
        for (blk, r0, c0) in [
            (a, 0, 0),
            (b, 0, a.cols),
            (c, a.rows, 0),
            (d, a.rows, a.cols),
        ] {
            for r in 0..blk.rows {
                for cc in 0..blk.cols {
                    out.entries[(r0 + r) * cols + c0 + cc] = blk.get(r, cc);
                }
            }
        }
        Ok(out)
    }

    /// Reduce to a modulus dividing the current one.
    pub fn reduce_to(&self, modulus: u64) -> Result<Self> {
        if modulus < 2 || !self.modulus.is_multiple_of(modulus) {
            return Err(Error::InvalidParameter(format!(
                "{modulus} does not divide the modulus {}",
                self.modulus
            )));
        }
        Ok(Self {
            modulus,
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|x| x % modulus).collect(),
        })
    }

    /// Reinterpret the canonical representatives modulo a multiple of the current modulus.
    pub fn lift_to(&self, modulus: u64) -> Result<Self> {
        if !modulus.is_multiple_of(self.modulus) {
            return Err(Error::InvalidParameter(format!(
                "{modulus} is not a multiple of {}",
                self.modulus
            )));
        }
        Ok(Self {
            modulus,
            ..self.clone()
        })
    }

    /// Exact division of every entry by `q`, landing modulo `modulus / q`.
    pub fn divide_exact(&self, q: u64) -> Result<Self> {
        if q == 0 || !self.modulus.is_multiple_of(q) || self.modulus == q {
            return Err(Error::InvalidParameter(format!(
                "cannot divide modulo {} by {q}",
                self.modulus
            )));
        }
        if self.entries.iter().any(|x| x % q != 0) {
            return Err(Error::LevelViolation { level: q });
        }
        Ok(Self {
            modulus: self.modulus / q,
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|x| x / q).collect(),
        })
    }

    /// Row reduction by unimodular (Euclid) steps; returns the upper-triangular
    /// result together with the transformation applied, and the swap parity.
    fn euclid_eliminate(&self, track: Option<Self>) -> (Self, Option<Self>, bool) {
        let n = self.rows;
        let m = self.modulus as i128;
        let mut a = self.clone();
        let mut t = track;
        let mut odd = false;
        let row_op = |mat: &mut Self, dst: usize, src: usize, q: u64| {
            // dst -= q * src
            let cols = mat.cols;
            let modulus = mat.modulus;
            for c in 0..cols {
                let v = mul_mod(q, mat.entries[src * cols + c], modulus);
                let e = &mut mat.entries[dst * cols + c];
                *e = (*e + modulus - v) % modulus;
            }
        };
        let swap = |mat: &mut Self, r1: usize, r2: usize| {
            let cols = mat.cols;
            for c in 0..cols {
                mat.entries.swap(r1 * cols + c, r2 * cols + c);
            }
        };
        for k in 0..n.min(a.cols) {
            loop {
                // choose the row with the smallest nonzero entry in column k
                let piv = (k..n)
                    .filter(|&r| a.get(r, k) != 0)
                    .min_by_key(|&r| a.get(r, k));
                let Some(piv) = piv else { break };
                if piv != k {
                    swap(&mut a, piv, k);
                    if let Some(t) = t.as_mut() {
                        swap(t, piv, k);
                    }
                    odd = !odd;
                }
                let pv = a.get(k, k) as i128;
                let mut done = true;
                for r in k + 1..n {
                    let v = a.get(r, k) as i128;
                    if v == 0 {
                        continue;
                    }
                    let q = (v / pv) % m;
                    row_op(&mut a, r, k, q as u64);
                    if let Some(t) = t.as_mut() {
                        row_op(t, r, k, q as u64);
                    }
                    if a.get(r, k) != 0 {
                        done = false;
                    }
                }
                if done {
                    break;
                }
            }
        }
        (a, t, odd)
    }

    /// Determinant modulo m.
    pub fn det_mod(&self) -> Result<u64> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let (u, _, odd) = self.euclid_eliminate(None);
        let mut d = 1u64;
        for i in 0..self.rows {
            d = mul_mod(d, u.get(i, i), self.modulus);
        }
        Ok(if odd { neg_mod(d, self.modulus) } else { d })
    }

    /// Inverse modulo m; fails when the determinant is not a unit.
    pub fn inverse_mod(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let m = self.modulus;
        let (mut u, t, _) = self.euclid_eliminate(Some(Self::identity(m, n)));
        let mut t = t.expect("tracked transformation");
        // back substitution with unit pivots
        for k in (0..n).rev() {
            let inv = inv_mod(u.get(k, k), m).ok_or(Error::NotInvertible { modulus: m })?;
            for c in 0..n {
                u.entries[k * n + c] = mul_mod(u.entries[k * n + c], inv, m);
                t.entries[k * n + c] = mul_mod(t.entries[k * n + c], inv, m);
            }
            for r in 0..k {
                let q = u.get(r, k);
                if q == 0 {
                    continue;
                }
                for c in 0..n {
                    let vu = mul_mod(q, u.entries[k * n + c], m);
                    u.entries[r * n + c] = (u.entries[r * n + c] + m - vu) % m;
                    let vt = mul_mod(q, t.entries[k * n + c], m);
                    t.entries[r * n + c] = (t.entries[r * n + c] + m - vt) % m;
                }
            }
        }
        Ok(t)
    }

    pub fn is_invertible(&self) -> bool {
        self.det_mod()
            .map(|d| inv_mod(d, self.modulus).is_some())
            .unwrap_or(false)
    }
}

impl fmt::Debug for ResidueMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ResidueMatrix{}x{} mod {} [",
            self.rows, self.cols, self.modulus
        )?;
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
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn inverse_examples() {
        let id = ResidueMatrix::identity(5, 3);
        assert_eq!(id.inverse_mod().unwrap(), id);
        let two = ResidueMatrix::new(5, 1, 1, vec![2]).unwrap();
        assert_eq!(two.inverse_mod().unwrap().entries(), &[3]);
        let five = ResidueMatrix::new(25, 1, 1, vec![5]).unwrap();
        assert_eq!(
            five.inverse_mod(),
            Err(Error::NotInvertible { modulus: 25 })
        );
    }

    #[test]
    fn mismatched_moduli_rejected() {
        let a = ResidueMatrix::identity(5, 2);
        let b = ResidueMatrix::identity(7, 2);
        assert!(matches!(a.try_mul(&b), Err(Error::ModulusMismatch { .. })));
        assert!(matches!(a.try_add(&b), Err(Error::ModulusMismatch { .. })));
    }

    #[test]
    fn det_mod_composite() {
        // det = 2·3 − 1·1 = 5 ≡ 5 mod 25
        let a = ResidueMatrix::from_i64(25, 2, 2, &[2, 1, 1, 3]).unwrap();
        assert_eq!(a.det_mod().unwrap(), 5);
        assert!(!a.is_invertible());
        let b = ResidueMatrix::from_i64(10, 2, 2, &[0, 1, 1, 0]).unwrap();
        assert_eq!(b.det_mod().unwrap(), 9);
    }

    #[test]
    fn random_inverses_mod_composite() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &(n, m) in &[(2usize, 25u64), (3, 125), (4, 100), (5, 343), (3, 6)] {
            let mut found = 0;
            while found < 200 {
                let a =
                    ResidueMatrix::new(m, n, n, (0..n * n).map(|_| rng.gen_range(0..m)).collect())
                        .unwrap();
                match a.inverse_mod() {
                    Ok(inv) => {
                        assert!(a.try_mul(&inv).unwrap().is_identity());
                        assert!(inv.try_mul(&a).unwrap().is_identity());
                        found += 1;
                    }
                    Err(_) => assert!(!a.is_invertible()),
                }
            }
        }
    }

    #[test]
    fn ext_gcd_bezout() {
        for a in -20i128..20 {
            for b in -20i128..20 {
                let (g, s, t) = ext_gcd(a, b);
                assert_eq!(s * a + t * b, g);
                assert!(g >= 0);
            }
        }
    }
}
