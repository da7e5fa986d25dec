use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::IntMatrix;

/// `A = U·D·V` with `U`, `V` unimodular and `D` in Smith normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub invariant_factors: Vec<BigInt>,
}

impl SmithDecomposition {
    /// Number of zero diagonal entries, i.e. the free rank of the cokernel
    /// for a square input.
    pub fn nullity(&self) -> usize {
        self.d.rows().min(self.d.cols()) - self.invariant_factors.len()
    }
}

struct Work {
    d: IntMatrix,
    u: IntMatrix,
    v: IntMatrix,
}

impl Work {
    // D <- E·D with E = Id + q·e_{dst,src}; U <- U·E⁻¹.
    fn add_row(&mut self, dst: usize, src: usize, q: &BigInt) {
        for c in 0..self.d.cols() {
            let t = self.d.get(src, c) * q;
            *self.d.get_mut(dst, c) += t;
        }
        for r in 0..self.u.rows() {
            let t = self.u.get(r, dst) * q;
            *self.u.get_mut(r, src) -= t;
        }
    }

    // D <- D·F with F = Id + q·e_{src,dst}; V <- F⁻¹·V.
    fn add_col(&mut self, dst: usize, src: usize, q: &BigInt) {
        for r in 0..self.d.rows() {
            let t = self.d.get(r, src) * q;
            *self.d.get_mut(r, dst) += t;
        }
        for c in 0..self.v.cols() {
            let t = self.v.get(dst, c) * q;
            *self.v.get_mut(src, c) -= t;
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.d.cols() {
            let a = self.d.get(i, c).clone();
            let b = self.d.get(j, c).clone();
            self.d.set(i, c, b);
            self.d.set(j, c, a);
        }
        for r in 0..self.u.rows() {
            let a = self.u.get(r, i).clone();
            let b = self.u.get(r, j).clone();
            self.u.set(r, i, b);
            self.u.set(r, j, a);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.d.rows() {
            let a = self.d.get(r, i).clone();
            let b = self.d.get(r, j).clone();
            self.d.set(r, i, b);
            self.d.set(r, j, a);
        }
        for c in 0..self.v.cols() {
            let a = self.v.get(i, c).clone();
            let b = self.v.get(j, c).clone();
            self.v.set(i, c, b);
            self.v.set(j, c, a);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for c in 0..self.d.cols() {
            let x = -self.d.get(i, c).clone();
            self.d.set(i, c, x);
        }
        for r in 0..self.u.rows() {
            let x = -self.u.get(r, i).clone();
            self.u.set(r, i, x);
        }
    }
}

/// Smith normal form with transformation matrices. The pivot is always the
/// smallest nonzero entry (in absolute value) of the remaining block.
pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let (rows, cols) = (a.rows(), a.cols());
    let mut w = Work {
        d: a.clone(),
        u: IntMatrix::identity(rows),
        v: IntMatrix::identity(cols),
    };
    let mut factors = Vec::new();
    for t in 0..rows.min(cols) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for r in t..rows {
                for c in t..cols {
                    let x = w.d.get(r, c);
                    if x.is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(br, bc)| x.abs() < w.d.get(br, bc).abs()) {
                        best = Some((r, c));
                    }
                }
            }
            let Some((pr, pc)) = best else {
                return finish(w, factors);
            };
            w.swap_rows(t, pr);
            w.swap_cols(t, pc);
            let pivot = w.d.get(t, t).clone();
            let mut clean = true;
            for r in t + 1..rows {
                let q = w.d.get(r, t).div_floor(&pivot);
                if !q.is_zero() {
                    w.add_row(r, t, &-q);
                }
                clean &= w.d.get(r, t).is_zero();
            }
            for c in t + 1..cols {
                let q = w.d.get(t, c).div_floor(&pivot);
                if !q.is_zero() {
                    w.add_col(c, t, &-q);
                }
                clean &= w.d.get(t, c).is_zero();
            }
            if !clean {
                continue;
            }
            // Divisibility: fold an offending row into the pivot row and retry.
            let offender = (t + 1..rows)
                .find(|&r| (t + 1..cols).any(|c| !w.d.get(r, c).is_multiple_of(&pivot)));
            match offender {
                Some(r) => w.add_row(t, r, &BigInt::one()),
                None => break,
            }
        }
        if w.d.get(t, t).is_negative() {
            w.negate_row(t);
        }
        factors.push(w.d.get(t, t).clone());
    }
    finish(w, factors)
}

fn finish(w: Work, invariant_factors: Vec<BigInt>) -> SmithDecomposition {
    SmithDecomposition {
        u: w.u,
        d: w.d,
        v: w.v,
        invariant_factors,
    }
}
