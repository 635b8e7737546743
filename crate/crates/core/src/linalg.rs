//! Exact integer linear algebra: fraction-free row echelon form, rank and null spaces.
//!
//! Rows are inserted one at a time and eliminated with Bareiss steps
//! (`row <- (p*row - f*b) / p_prev`, where `p_prev` is the pivot of the
//! previous basis row). Every division is exact, so entries stay the size of
//! minors of the input and no gcds are needed. Insertion order fully
//! determines the result.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::rational::{clear_denominators, remove_content, Rational};

#[derive(Clone, Debug)]
pub struct Echelon {
    ncols: usize,
    /// (pivot column, row) in insertion order; each row is zero before its
    /// pivot and at the pivots of rows inserted before it.
    rows: Vec<(usize, Vec<BigInt>)>,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon {
            ncols,
            rows: Vec::new(),
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ncols
    }

    /// Reduces `row` against the basis; returns the residual (zero iff `row`
    /// lies in the span). The residual is a scalar multiple of the rational
    /// residual.
    pub fn reduce(&self, mut row: Vec<BigInt>) -> Vec<BigInt> {
        assert_eq!(row.len(), self.ncols, "row length");
        let mut prev = BigInt::one();
        for (pc, b) in &self.rows {
            let f = row[*pc].clone();
            let p = &b[*pc];
            for (x, y) in row.iter_mut().zip(b.iter()) {
                let xz = x.is_zero();
                if xz && (f.is_zero() || y.is_zero()) {
                    continue;
                }
                let mut v = if xz { BigInt::zero() } else { &*x * p };
                if !f.is_zero() && !y.is_zero() {
                    v -= &f * y;
                }
                if !prev.is_one() {
                    v /= &prev;
                }
                *x = v;
            }
            prev = p.clone();
        }
        row
    }

    /// Inserts a row; returns `true` when the rank grew.
    pub fn insert(&mut self, row: Vec<BigInt>) -> bool {
        if self.is_full() {
            return false;
        }
        let r = self.reduce(row);
        match r.iter().position(|x| !x.is_zero()) {
            Some(pc) => {
                self.rows.push((pc, r));
                true
            }
            None => false,
        }
    }

    pub fn insert_rational(&mut self, row: &[Rational]) -> bool {
        self.insert(clear_denominators(row))
    }

    pub fn pivots(&self) -> Vec<usize> {
        let mut p: Vec<usize> = self.rows.iter().map(|(c, _)| *c).collect();
        p.sort_unstable();
        p
    }

    pub fn free_columns(&self) -> Vec<usize> {
        let pivots = self.pivots();
        (0..self.ncols)
            .filter(|c| pivots.binary_search(c).is_err())
            .collect()
    }

    /// The null vector that is nonzero in free column `free` and zero in
    /// every other free column, scaled to a primitive integer vector.
    pub fn null_vector(&self, free: usize) -> Vec<BigInt> {
        debug_assert!(self.free_columns().contains(&free));
        // The last pivot is the determinant of the pivot block, so by Cramer's
        // rule the solution scaled by it is integral and each division below
        // is exact. Row k only involves pivots of rows inserted after it.
        let mut v: Vec<BigInt> = vec![BigInt::zero(); self.ncols];
        v[free] = self.rows.last().map_or_else(BigInt::one, |(pc, r)| r[*pc].clone());
        for (pc, row) in self.rows.iter().rev() {
            let s = dot(row, &v);
            v[*pc] = -(s / &row[*pc]);
        }
        remove_content(&mut v);
        v
    }

    pub fn null_space(&self) -> Vec<Vec<BigInt>> {
        self.free_columns()
            .into_iter()
            .map(|f| self.null_vector(f))
            .collect()
    }
}

/// Rank of an integer matrix given by rows.
pub fn rank(rows: &[Vec<BigInt>], ncols: usize) -> usize {
    let mut e = Echelon::new(ncols);
    for r in rows {
        e.insert(r.clone());
        if e.is_full() {
            break;
        }
    }
    e.rank()
}

pub fn rank_rational(rows: &[Vec<Rational>], ncols: usize) -> usize {
    let mut e = Echelon::new(ncols);
    for r in rows {
        e.insert_rational(r);
        if e.is_full() {
            break;
        }
    }
    e.rank()
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .map(|(x, y)| x * y)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect()
    }

    #[test]
    fn small_ranks() {
        assert_eq!(rank(&m(&[&[1, 2], &[2, 4]]), 2), 1);
        assert_eq!(rank(&m(&[&[1, 2], &[2, 5]]), 2), 2);
        assert_eq!(rank(&m(&[&[0, 0, 0]]), 3), 0);
        assert_eq!(rank(&m(&[]), 3), 0);
        assert_eq!(rank(&m(&[&[1, 0, 1], &[0, 1, 1], &[1, 1, 2]]), 3), 2);
    }

    #[test]
    fn null_space_annihilates() {
        let a = m(&[&[1, 2, 3, 4], &[2, 4, 7, 1]]);
        let mut e = Echelon::new(4);
        for r in &a {
            e.insert(r.clone());
        }
        let ns = e.null_space();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for r in &a {
                assert!(dot(r, v).is_zero());
            }
            assert!(v.iter().any(|x| !x.is_zero()));
        }
    }

    // Independent oracle: plain Gaussian elimination over the rationals.
    fn naive_rank(rows: &[Vec<BigInt>], ncols: usize) -> usize {
        let mut a: Vec<Vec<Rational>> = rows
            .iter()
            .map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect())
            .collect();
        let mut rank = 0;
        for c in 0..ncols {
            let Some(p) = (rank..a.len()).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(rank, p);
            for i in 0..a.len() {
                if i != rank && !a[i][c].is_zero() {
                    let f = &a[i][c] / &a[rank][c];
                    for j in 0..ncols {
                        let t = &f * &a[rank][j];
                        a[i][j] -= t;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    proptest! {
        #[test]
        fn rank_matches_naive_elimination(
            rows in prop::collection::vec(prop::collection::vec(-3i64..=3, 5), 0..8)
        ) {
            let a: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
            prop_assert_eq!(rank(&a, 5), naive_rank(&a, 5));
        }

        #[test]
        fn rank_nullity(rows in prop::collection::vec(prop::collection::vec(-4i64..=4, 6), 0..7)) {
            let a: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
            let mut e = Echelon::new(6);
            for r in &a { e.insert(r.clone()); }
            let ns = e.null_space();
            prop_assert_eq!(ns.len() + e.rank(), 6);
            for v in &ns {
                for r in &a { prop_assert!(dot(r, v).is_zero()); }
            }
        }
    }
}
