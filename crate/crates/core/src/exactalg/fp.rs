use crate::error::{dim_mismatch, Error, Result};

/// Subspace of 𝔽_p^n held as a fully reduced row-echelon basis.
///
/// Because every basis row vanishes on the pivot columns of the other rows,
/// reducing a vector only touches the rows whose pivot it hits; this keeps
/// reduction of sparse vectors cheap even when the rank is large.
#[derive(Clone, Debug)]
pub struct FpSubspace {
    p: u32,
    dim: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
    row_of_pivot: Vec<Option<usize>>,
}

impl PartialEq for FpSubspace {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.dim == other.dim && self.basis() == other.basis()
    }
}

impl Eq for FpSubspace {}

impl FpSubspace {
    pub fn new(p: u32, dim: usize) -> Self {
        Self {
            p,
            dim,
            rows: Vec::new(),
            pivots: Vec::new(),
            row_of_pivot: vec![None; dim],
        }
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn quotient_dim(&self) -> usize {
        self.dim - self.rank()
    }

    pub fn is_full(&self) -> bool {
        self.rank() == self.dim
    }

    /// Echelon basis sorted by pivot column.
    pub fn basis(&self) -> Vec<Vec<u32>> {
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by_key(|&i| self.pivots[i]);
        order.into_iter().map(|i| self.rows[i].clone()).collect()
    }

    pub fn pivot_columns(&self) -> Vec<usize> {
        let mut p = self.pivots.clone();
        p.sort_unstable();
        p
    }

    /// Columns without a pivot; they index coordinates on the quotient.
    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.dim)
            .filter(|&c| self.row_of_pivot[c].is_none())
            .collect()
    }

    fn check(&self, v: &[u32]) -> Result<()> {
        if v.len() != self.dim {
            return Err(dim_mismatch(self.dim, v.len()));
        }
        Ok(())
    }

    /// Normal form of `v` modulo the subspace (zero on every pivot column).
    pub fn reduce(&self, v: &[u32]) -> Result<Vec<u32>> {
        self.check(v)?;
        let p = self.p as u64;
        let mut out: Vec<u64> = v.iter().map(|&x| x as u64 % p).collect();
        for (c, &x) in v.iter().enumerate() {
            let x = x as u64 % p;
            if x == 0 {
                continue;
            }
            if let Some(r) = self.row_of_pivot[c] {
                let f = p - x;
                for (o, &y) in out.iter_mut().zip(&self.rows[r]) {
                    if y != 0 {
                        *o = (*o + f * y as u64) % p;
                    }
                }
            }
        }
        Ok(out.into_iter().map(|x| x as u32).collect())
    }

    /// Sparse variant of [`reduce`](Self::reduce): input and output as
    /// `(index, value)` pairs.
    pub fn reduce_sparse(&self, v: &[(usize, u32)]) -> Result<Vec<u32>> {
        let mut dense = vec![0u32; self.dim];
        let p = self.p as u64;
        for &(i, x) in v {
            if i >= self.dim {
                return Err(dim_mismatch(self.dim, i + 1));
            }
            dense[i] = ((dense[i] as u64 + x as u64) % p) as u32;
        }
        self.reduce(&dense)
    }

    pub fn contains(&self, v: &[u32]) -> Result<bool> {
        Ok(self.reduce(v)?.iter().all(|&x| x == 0))
    }

    /// Adds `v` to the span; returns whether the rank grew.
    pub fn insert(&mut self, v: &[u32]) -> Result<bool> {
        let r = self.reduce(v)?;
        Ok(self.insert_reduced(r))
    }

    fn insert_reduced(&mut self, mut r: Vec<u32>) -> bool {
        let Some(piv) = r.iter().position(|&x| x != 0) else {
            return false;
        };
        let p = self.p as u64;
        let inv = pow_mod(r[piv] as u64, p - 2, p);
        for x in r.iter_mut() {
            *x = ((*x as u64 * inv) % p) as u32;
        }
        for row in self.rows.iter_mut() {
            let c = row[piv] as u64;
            if c == 0 {
                continue;
            }
            let f = p - c;
            for (x, &y) in row.iter_mut().zip(&r) {
                if y != 0 {
                    *x = ((*x as u64 + f * y as u64) % p) as u32;
                }
            }
        }
        self.row_of_pivot[piv] = Some(self.rows.len());
        self.pivots.push(piv);
        self.rows.push(r);
        true
    }

    /// Quotient coordinates of `v`: its reduction read off on the free columns.
    pub fn quotient_coords(&self, v: &[u32]) -> Result<Vec<u32>> {
        let r = self.reduce(v)?;
        Ok(self.free_columns().into_iter().map(|c| r[c]).collect())
    }
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

pub fn is_prime(n: u64) -> bool {
    n >= 2
        && (2..)
            .take_while(|k| k * k <= n)
            .all(|k| !n.is_multiple_of(k))
}

/// Span of `vectors` in 𝔽_p^dimension.
pub fn subspace_closure(vectors: &[Vec<u32>], dimension: usize, p: u32) -> Result<FpSubspace> {
    if !is_prime(p as u64) {
        return Err(Error::InvalidParameter(format!("{p} is not prime")));
    }
    let mut s = FpSubspace::new(p, dimension);
    for v in vectors {
        s.insert(v)?;
    }
    Ok(s)
}

/// Rank of a list of vectors over 𝔽_p.
pub fn rank_mod_p(vectors: &[Vec<u32>], dimension: usize, p: u32) -> Result<usize> {
    Ok(subspace_closure(vectors, dimension, p)?.rank())
}

/// Ambient dimension minus rank.
pub fn quotient_dim(ambient: usize, s: &FpSubspace) -> Result<usize> {
    if ambient != s.ambient_dim() {
        return Err(dim_mismatch(s.ambient_dim(), ambient));
    }
    Ok(s.quotient_dim())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn spec_examples() {
        let s = subspace_closure(&[], 3, 5).unwrap();
        assert_eq!((s.rank(), quotient_dim(3, &s).unwrap()), (0, 3));
        let s = subspace_closure(&[vec![1, 0, 0], vec![1, 1, 0]], 3, 5).unwrap();
        assert_eq!((s.rank(), quotient_dim(3, &s).unwrap()), (2, 1));
        let s = subspace_closure(&[vec![1, 0, 0], vec![2, 0, 0]], 3, 5).unwrap();
        assert_eq!(s.rank(), 1);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(subspace_closure(&[vec![1, 0]], 3, 5).is_err());
        let s = FpSubspace::new(5, 3);
        assert!(quotient_dim(4, &s).is_err());
    }

    #[test]
    fn quotient_coordinates() {
        let s = subspace_closure(&[vec![1, 1, 0]], 3, 5).unwrap();
        assert_eq!(s.free_columns(), vec![1, 2]);
        // e₁ ≡ −e₂ modulo ⟨e₁+e₂⟩
        assert_eq!(s.quotient_coords(&[1, 0, 0]).unwrap(), vec![4, 0]);
    }

    proptest! {
        #[test]
        fn closure_idempotent(vs in proptest::collection::vec(proptest::collection::vec(0u32..7, 6), 0..8)) {
            let s = subspace_closure(&vs, 6, 7).unwrap();
            let again = subspace_closure(&s.basis(), 6, 7).unwrap();
            prop_assert_eq!(&s, &again);
            for v in &vs {
                prop_assert!(s.contains(v).unwrap());
            }
            for row in s.basis() {
                prop_assert!(vs.is_empty() || !row.iter().all(|&x| x == 0));
            }
        }
    }
}
