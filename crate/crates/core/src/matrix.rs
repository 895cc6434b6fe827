//! Exact sparse matrices with rank, kernel-basis and solve kernels.
//!
//! Elimination is sparse row-reduction with a fill-minimizing pivot choice;
//! over the rationals every row is rescaled to a primitive integer vector
//! after each update, which keeps entries small through the elimination.

use crate::field::{El, Field};
use num::{BigInt, BigRational, One, Signed, Zero};
use std::collections::BTreeMap;

#[derive(Debug, Clone)]
pub struct SparseMat {
    pub nrows: usize,
    pub ncols: usize,
    pub field: Field,
    /// Row-major sparse storage; no explicit zeros.
    rows: Vec<BTreeMap<usize, El>>,
}

impl SparseMat {
    pub fn new(field: Field, nrows: usize, ncols: usize) -> Self {
        SparseMat {
            nrows,
            ncols,
            field,
            rows: vec![BTreeMap::new(); nrows],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Self::new(field.clone(), n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn set(&mut self, r: usize, c: usize, v: El) {
        assert!(r < self.nrows && c < self.ncols, "index out of range");
        if self.field.is_zero(&v) {
            self.rows[r].remove(&c);
        } else {
            self.rows[r].insert(c, v);
        }
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: El) {
        let cur = self.get(r, c);
        let s = self.field.add(&cur, &v);
        self.set(r, c, s);
    }

    pub fn get(&self, r: usize, c: usize) -> El {
        self.rows[r]
            .get(&c)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    pub fn row_iter(&self, r: usize) -> impl Iterator<Item = (&usize, &El)> {
        self.rows[r].iter()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.is_empty())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::new(self.field.clone(), self.ncols, self.nrows);
        for (r, row) in self.rows.iter().enumerate() {
            for (&c, v) in row {
                t.set(c, r, v.clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows, "dimension mismatch");
        let f = self.field.clone();
        let mut out = Self::new(f.clone(), self.nrows, other.ncols);
        for (r, row) in self.rows.iter().enumerate() {
            let mut acc: BTreeMap<usize, El> = BTreeMap::new();
            for (&k, a) in row {
                for (&c, b) in &other.rows[k] {
                    let t = f.mul(a, b);
                    match acc.entry(c) {
                        std::collections::btree_map::Entry::Vacant(v) => {
                            v.insert(t);
                        }
                        std::collections::btree_map::Entry::Occupied(mut o) => {
                            let s = f.add(o.get(), &t);
                            if f.is_zero(&s) {
                                o.remove();
                            } else {
                                o.insert(s);
                            }
                        }
                    }
                }
            }
            out.rows[r] = acc;
        }
        out
    }

    pub fn apply(&self, v: &[El]) -> Vec<El> {
        assert_eq!(v.len(), self.ncols);
        let f = &self.field;
        self.rows
            .iter()
            .map(|row| {
                let mut s = f.zero();
                for (&c, a) in row {
                    s = f.add(&s, &f.mul(a, &v[c]));
                }
                s
            })
            .collect()
    }

    /// Rescale a rational row to a primitive integer vector.
    fn normalize_row(field: &Field, row: &mut BTreeMap<usize, El>) {
        if !matches!(field, Field::Rationals) || row.is_empty() {
            return;
        }
        let mut den = BigInt::one();
        for v in row.values() {
            if let El::Q(r) = v {
                den = num::integer::lcm(den, r.denom().clone());
            }
        }
        let mut gcd = BigInt::zero();
        for v in row.values() {
            if let El::Q(r) = v {
                let n = (r * BigRational::from(den.clone())).to_integer();
                gcd = num::integer::gcd(gcd, n);
            }
        }
        if gcd.is_zero() {
            return;
        }
        let scale = BigRational::new(den, gcd.abs());
        if scale.is_one() {
            return;
        }
        for v in row.values_mut() {
            if let El::Q(r) = v {
                *v = El::Q(&*r * &scale);
            }
        }
    }

    /// In-place reduced row echelon form. Returns the pivot (row, col)
    /// pairs in column order. Pivot columns are processed left to right;
    /// among candidate rows the sparsest is chosen.
    fn rref(&mut self) -> Vec<(usize, usize)> {
        let f = self.field.clone();
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut pivot_row_used = vec![false; self.nrows];
        for col in 0..self.ncols {
            // candidate rows: unused, nonzero in col
            let mut best: Option<(usize, usize)> = None; // (nnz, row)
            for r in 0..self.nrows {
                if pivot_row_used[r] {
                    continue;
                }
                if self.rows[r].contains_key(&col) {
                    let n = self.rows[r].len();
                    if best.map_or(true, |(bn, _)| n < bn) {
                        best = Some((n, r));
                    }
                }
            }
            let Some((_, pr)) = best else { continue };
            pivot_row_used[pr] = true;
            pivots.push((pr, col));
            // scale pivot row to make pivot 1 (skipped over Q where rows
            // stay primitive; the pivot value is divided out on use)
            let pv = self.rows[pr].get(&col).unwrap().clone();
            let pinv = f.inv(&pv).expect("pivot invertible");
            // eliminate from every other row containing col
            let prow = self.rows[pr].clone();
            for r in 0..self.nrows {
                if r == pr {
                    continue;
                }
                let Some(v) = self.rows[r].get(&col).cloned() else {
                    continue;
                };
                let factor = f.mul(&v, &pinv);
                // row_r -= factor * prow
                for (&c, a) in &prow {
                    let t = f.mul(&factor, a);
                    let cur = self.rows[r].get(&c).cloned().unwrap_or_else(|| f.zero());
                    let s = f.sub(&cur, &t);
                    if f.is_zero(&s) {
                        self.rows[r].remove(&c);
                    } else {
                        self.rows[r].insert(c, s);
                    }
                }
                Self::normalize_row(&f, &mut self.rows[r]);
            }
        }
        pivots
    }

    /// Exact rank.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Basis of the right kernel, returned as the columns of a matrix K
    /// with `self * K = 0` and `K.ncols = self.ncols - rank`.
    pub fn kernel_basis(&self) -> SparseMat {
        let f = self.field.clone();
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
        let mut col_pivot_row: BTreeMap<usize, usize> = BTreeMap::new();
        for &(r, c) in &pivots {
            col_pivot_row.insert(c, r);
        }
        let free_cols: Vec<usize> = (0..self.ncols)
            .filter(|c| !pivot_cols.contains(c))
            .collect();
        let mut k = SparseMat::new(f.clone(), self.ncols, free_cols.len());
        for (kc, &fc) in free_cols.iter().enumerate() {
            k.set(fc, kc, f.one());
            for (&pc, &pr) in &col_pivot_row {
                let a = m.rows[pr].get(&fc).cloned();
                if let Some(a) = a {
                    let pv = m.rows[pr].get(&pc).unwrap();
                    let x = f.neg(&f.div(&a, pv).unwrap());
                    k.set(pc, kc, x);
                }
            }
        }
        k
    }

    /// Solve `self * x = b` for a single right-hand side. Returns `None`
    /// if inconsistent. If the kernel is nontrivial an arbitrary solution
    /// is returned (free variables set to zero).
    pub fn solve(&self, b: &[El]) -> Option<Vec<El>> {
        assert_eq!(b.len(), self.nrows);
        let f = self.field.clone();
        let mut aug = SparseMat::new(f.clone(), self.nrows, self.ncols + 1);
        for (r, row) in self.rows.iter().enumerate() {
            for (&c, v) in row {
                aug.rows[r].insert(c, v.clone());
            }
            if !f.is_zero(&b[r]) {
                aug.rows[r].insert(self.ncols, b[r].clone());
            }
        }
        let pivots = aug.rref();
        if pivots.iter().any(|&(_, c)| c == self.ncols) {
            return None; // inconsistent
        }
        let mut x = vec![f.zero(); self.ncols];
        for &(r, c) in &pivots {
            let pv = aug.rows[r].get(&c).unwrap().clone();
            let rhs = aug.rows[r]
                .get(&self.ncols)
                .cloned()
                .unwrap_or_else(|| f.zero());
            // other non-pivot entries in this row correspond to free
            // variables, all set to zero
            x[c] = f.div(&rhs, &pv).unwrap();
        }
        Some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qmat(field: &Field, rows: &[&[i64]]) -> SparseMat {
        let mut m = SparseMat::new(field.clone(), rows.len(), rows[0].len());
        for (r, row) in rows.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                m.set(r, c, field.from_i64(v));
            }
        }
        m
    }

    #[test]
    fn rank_identity_and_zero() {
        let f = Field::rationals();
        assert_eq!(SparseMat::identity(f.clone(), 2).rank(), 2);
        assert_eq!(SparseMat::new(f.clone(), 3, 5).rank(), 0);
        // all-ones 3x3 has rank 1
        let ones = qmat(&f, &[&[1, 1, 1], &[1, 1, 1], &[1, 1, 1]]);
        assert_eq!(ones.rank(), 1);
    }

    #[test]
    fn kernel_of_identity_and_zero() {
        let f = Field::rationals();
        let k = SparseMat::identity(f.clone(), 4).kernel_basis();
        assert_eq!(k.ncols, 0);
        let k = SparseMat::new(f.clone(), 2, 3).kernel_basis();
        assert_eq!(k.ncols, 3);
    }

    #[test]
    fn kernel_annihilated_exactly() {
        let f = Field::rationals();
        let m = qmat(&f, &[&[1, 1, 0]]);
        let k = m.kernel_basis();
        assert_eq!(k.ncols, 2);
        assert!(m.mul(&k).is_zero());
        // columns independent: stacked kernel matrix has full column rank
        assert_eq!(k.rank(), 2);
    }

    #[test]
    fn rank_mod_p_matches() {
        let q = Field::rationals();
        let fp = Field::prime(10007).unwrap();
        let rows: Vec<Vec<i64>> = vec![
            vec![2, 4, 6, 1],
            vec![1, 2, 3, 0],
            vec![0, 0, 0, 1],
            vec![3, 6, 9, 2],
        ];
        let rr: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
        let a = qmat(&q, &rr);
        let b = qmat(&fp, &rr);
        assert_eq!(a.rank(), b.rank());
        assert_eq!(a.rank(), 2);
    }

    #[test]
    fn solve_simple() {
        let f = Field::rationals();
        let m = qmat(&f, &[&[2, 0], &[0, 4]]);
        let x = m.solve(&[f.from_i64(6), f.from_i64(8)]).unwrap();
        assert_eq!(x, vec![f.from_i64(3), f.from_i64(2)]);
        // inconsistent
        let m2 = qmat(&f, &[&[1, 1], &[1, 1]]);
        assert!(m2.solve(&[f.from_i64(0), f.from_i64(1)]).is_none());
    }

    #[test]
    fn rank_over_extension_field() {
        let f = Field::extension(3, vec![1, 0, 1]).unwrap();
        let w = crate::field::El::E(vec![0, 1]);
        let mut m = SparseMat::new(f.clone(), 2, 2);
        m.set(0, 0, w.clone());
        m.set(0, 1, f.one());
        m.set(1, 0, f.from_i64(-1));
        m.set(1, 1, w.clone()); // second row = w * first row
        assert_eq!(m.rank(), 1);
    }
}
