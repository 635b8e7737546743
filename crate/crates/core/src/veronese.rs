//! Veronese lifting and Hilbert functions of finite point sets.
//!
//! For a finite `E ⊂ R^d`, the value of the Hilbert function of the ideal of
//! `{(1 : p) : p ∈ E}` at degree `ℓ` equals the rank of the matrix with rows
//! `(1, v_ℓ(p))`, i.e. one more than the affine dimension of the lifted cloud.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use crate::bounds::binomial_usize;
use crate::error::{check_dim, Error, Result};
use crate::linalg::Echelon;
use crate::poly::{Monomial, Point, PointSet};
use crate::rational::Rational;

/// Number of trailing rank-neutral points per batch used for the saturation flag.
pub const SATURATION_BATCH: usize = 4;

/// All exponent vectors with `1 <= |a| <= ℓ`, in graded-lex order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VeroneseBasis {
    dim: usize,
    degree: u32,
    monomials: Vec<Monomial>,
}

impl VeroneseBasis {
    pub fn new(dim: usize, degree: u32) -> Self {
        let mut monomials = Vec::new();
        for k in 1..=degree {
            let mut cur = vec![0u32; dim];
            push_compositions(k, 0, &mut cur, &mut monomials);
        }
        VeroneseBasis {
            dim,
            degree,
            monomials,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }
}

// Exponent vectors of total degree `rest` in positions `i..`, lex-descending.
fn push_compositions(rest: u32, i: usize, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
    let d = cur.len();
    if d == 0 {
        return;
    }
    if i == d - 1 {
        cur[i] = rest;
        out.push(Monomial::new(cur.clone()));
        cur[i] = 0;
        return;
    }
    for e in (0..=rest).rev() {
        cur[i] = e;
        push_compositions(rest - e, i + 1, cur, out);
    }
    cur[i] = 0;
}

/// `v_ℓ(p)`: all nonconstant monomials of degree at most `ℓ` evaluated at `p`.
pub fn veronese_lift(p: &Point, degree: u32) -> Vec<Rational> {
    let basis = VeroneseBasis::new(p.dim(), degree);
    lift_with(&basis, p)
}

pub fn lift_with(basis: &VeroneseBasis, p: &Point) -> Vec<Rational> {
    let powers = power_table(p.coords(), basis.degree());
    basis
        .monomials()
        .iter()
        .map(|m| {
            let mut acc = Rational::one();
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    acc *= &powers[i][e as usize];
                }
            }
            acc
        })
        .collect()
}

fn power_table<T: Clone + One + for<'a> std::ops::Mul<&'a T, Output = T>>(
    xs: &[T],
    degree: u32,
) -> Vec<Vec<T>> {
    xs.iter()
        .map(|x| {
            let mut v = vec![T::one()];
            for k in 1..=degree as usize {
                let next = v[k - 1].clone() * x;
                v.push(next);
            }
            v
        })
        .collect()
}

/// `(1, v_ℓ(p))` scaled by `q^ℓ`, where `q` is the common denominator of `p`.
/// The result is an integer vector with the same direction.
pub fn homogeneous_lift(basis: &VeroneseBasis, p: &Point) -> Vec<BigInt> {
    let q = p
        .coords()
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = p
        .coords()
        .iter()
        .map(|x| x.numer() * (&q / x.denom()))
        .collect();
    let ell = basis.degree() as usize;
    let ip = power_table(&ints, basis.degree());
    let qp = power_table(std::slice::from_ref(&q), basis.degree())
        .pop()
        .unwrap();
    let mut row = Vec::with_capacity(basis.len() + 1);
    row.push(qp[ell].clone());
    for m in basis.monomials() {
        let deg = m.degree() as usize;
        let mut acc = qp[ell - deg].clone();
        for (i, &e) in m.exponents().iter().enumerate() {
            if e > 0 {
                acc *= &ip[i][e as usize];
            }
        }
        row.push(acc);
    }
    row
}

/// Value of the Hilbert function of a point set at one degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertEstimate {
    pub degree: u32,
    pub value: usize,
    /// Number of points fed to the rank computation.
    pub rank_source: usize,
    /// The rank stopped growing at least two batches before the data ran out
    /// (or it hit the number of monomials).
    pub saturated: bool,
}

impl HilbertEstimate {
    /// Affine dimension of the lifted cloud.
    pub fn capacity(&self) -> usize {
        self.value.saturating_sub(1)
    }
}

/// Incremental rank of lifted points, tracking where the rank last grew.
pub(crate) struct LiftedRank {
    basis: VeroneseBasis,
    echelon: Echelon,
    seen: usize,
    last_growth: usize,
}

impl LiftedRank {
    pub(crate) fn new(dim: usize, degree: u32) -> Self {
        let basis = VeroneseBasis::new(dim, degree);
        let echelon = Echelon::new(basis.len() + 1);
        LiftedRank {
            basis,
            echelon,
            seen: 0,
            last_growth: 0,
        }
    }

    pub(crate) fn push(&mut self, p: &Point) {
        self.seen += 1;
        if self.echelon.is_full() {
            return;
        }
        if self.echelon.insert(homogeneous_lift(&self.basis, p)) {
            self.last_growth = self.seen;
        }
    }

    pub(crate) fn rank(&self) -> usize {
        self.echelon.rank()
    }

    pub(crate) fn is_full(&self) -> bool {
        self.echelon.is_full()
    }

    pub(crate) fn seen(&self) -> usize {
        self.seen
    }

    pub(crate) fn estimate(&self) -> HilbertEstimate {
        HilbertEstimate {
            degree: self.basis.degree(),
            value: self.rank(),
            rank_source: self.seen,
            saturated: self.is_full() || self.seen >= self.last_growth + 2 * SATURATION_BATCH,
        }
    }
}

/// Hilbert function of the point set `E` at degree `ℓ` via exact rank.
pub fn hilbert_from_points(points: &PointSet, degree: u32) -> Result<HilbertEstimate> {
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let mut lr = LiftedRank::new(points.dim(), degree);
    for p in points {
        lr.push(p);
    }
    Ok(lr.estimate())
}

/// Affine dimension of `v_ℓ(E)`, computed only up to `cap` (early exit).
pub fn lifted_capacity(points: &[&Point], dim: usize, degree: u32, cap: usize) -> Result<usize> {
    let mut lr = LiftedRank::new(dim, degree);
    for p in points {
        check_dim(dim, p.dim())?;
        lr.push(p);
        if lr.rank() > cap {
            break;
        }
    }
    Ok(lr.rank().saturating_sub(1).min(cap))
}

/// Number of monomials of degree at most `ℓ` in `d` variables.
pub fn monomial_count(dim: usize, degree: u32) -> usize {
    binomial_usize(degree as usize + dim, dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn basis_order_and_size() {
        let b = VeroneseBasis::new(2, 2);
        let exps: Vec<Vec<u32>> = b.monomials().iter().map(|m| m.exponents().to_vec()).collect();
        assert_eq!(exps, vec![vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]);
        for d in 1..5 {
            for l in 1..6 {
                assert_eq!(VeroneseBasis::new(d, l).len(), monomial_count(d, l) - 1);
            }
        }
        // The basis is sorted in the canonical monomial order.
        let b = VeroneseBasis::new(3, 4);
        assert!(b.monomials().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn lift_examples() {
        let v = veronese_lift(&Point::from_ints(&[2, 3]), 2);
        assert_eq!(v, vec![int(2), int(3), int(4), int(6), int(9)]);
        assert_eq!(veronese_lift(&Point::from_ints(&[2]), 3), vec![int(2), int(4), int(8)]);
        assert!(veronese_lift(&Point::from_ints(&[0, 0, 0]), 3)
            .iter()
            .all(|x| *x == int(0)));
    }

    #[test]
    fn homogeneous_lift_is_positive_multiple() {
        let p = Point::new(vec![frac(1, 2), frac(-2, 3)]);
        let basis = VeroneseBasis::new(2, 3);
        let h = homogeneous_lift(&basis, &p);
        let mut expected = vec![int(1)];
        expected.extend(lift_with(&basis, &p));
        let scale = Rational::from_integer(h[0].clone());
        assert!(scale > int(0));
        for (a, b) in h.iter().zip(&expected) {
            assert_eq!(Rational::from_integer(a.clone()), b * &scale);
        }
    }

    #[test]
    fn hilbert_examples() {
        let e = PointSet::parse("0 0\n1 0\n0 1\n", None).unwrap();
        assert_eq!(hilbert_from_points(&e, 1).unwrap().value, 3);

        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let pts: Vec<Point> = (0..20)
            .map(|_| {
                let t = frac(rng.gen_range(-50..=50), rng.gen_range(1..8));
                Point::new(vec![t.clone(), &t * &t])
            })
            .collect();
        let parabola = PointSet::new(2, pts).unwrap();
        let h = hilbert_from_points(&parabola, 2).unwrap();
        assert_eq!(h.value, 5);
        assert!(h.saturated);

        for l in 1..5 {
            let single = PointSet::parse("3 -7/2\n", None).unwrap();
            assert_eq!(hilbert_from_points(&single, l).unwrap().value, 1);
        }
        assert!(matches!(
            hilbert_from_points(&PointSet::empty(2), 1),
            Err(Error::EmptyPointSet)
        ));
    }

    fn random_set(rng: &mut ChaCha8Rng, d: usize, n: usize) -> PointSet {
        let pts = (0..n)
            .map(|_| Point::new((0..d).map(|_| frac(rng.gen_range(-9..=9), rng.gen_range(1..4))).collect()))
            .collect();
        PointSet::new(d, pts).unwrap()
    }

    proptest! {
        #[test]
        fn hilbert_bounds_and_monotonicity(seed in any::<u64>(), d in 1usize..4, n in 1usize..13, l in 1u32..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let e = random_set(&mut rng, d, n);
            let extra = random_set(&mut rng, d, 3);
            let h = hilbert_from_points(&e, l).unwrap();
            prop_assert!(h.value <= n.min(monomial_count(d, l)));
            prop_assert!(h.value <= hilbert_from_points(&e, l + 1).unwrap().value);
            prop_assert!(h.value <= hilbert_from_points(&e.union(&extra).unwrap(), l).unwrap().value);
        }

        #[test]
        fn rank_agrees_with_rational_oracle(seed in any::<u64>(), d in 1usize..4, n in 1usize..13, l in 1u32..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let e = random_set(&mut rng, d, n);
            let rows: Vec<Vec<Rational>> = e.iter().map(|p| {
                let mut r = vec![int(1)];
                r.extend(veronese_lift(p, l));
                r
            }).collect();
            let oracle = naive_rank(rows);
            prop_assert_eq!(hilbert_from_points(&e, l).unwrap().value, oracle);
        }
    }

    // Gaussian elimination over Q, no integer tricks.
    fn naive_rank(mut a: Vec<Vec<Rational>>) -> usize {
        use num_traits::Zero;
        let ncols = a.first().map_or(0, Vec::len);
        let mut rank = 0;
        for c in 0..ncols {
            let Some(p) = (rank..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
            a.swap(rank, p);
            for i in rank + 1..a.len() {
                let f = &a[i][c] / &a[rank][c];
                for j in c..ncols {
                    let t = &f * &a[rank][j];
                    a[i][j] -= t;
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn generic_points_fill_the_monomial_space() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (d, l) in [(2usize, 2u32), (2, 3), (3, 2)] {
            let n = monomial_count(d, l) + 2;
            let e = random_set(&mut rng, d, n);
            assert_eq!(hilbert_from_points(&e, l).unwrap().value, monomial_count(d, l));
        }
    }
}
