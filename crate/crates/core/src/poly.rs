//! Sparse multivariate polynomials and point sets over the rationals.
//!
//! Monomials are kept in graded lexicographic order (total degree first, then
//! lexicographic with `x1 > x2 > ...`), which fixes the canonical serialization.
//!
//! Text formats:
//! - polynomial: one term per line, `<coeff> <e1> ... <ed>`; `#` starts a comment.
//!   Files holding several polynomials separate them with a line `---`.
//! - points: one point per line, `d` whitespace-separated rationals or decimals.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{check_dim, Error, Result};
use crate::rational::{format_rational, parse_rational, Rational};

/// Exponent vector `(a1, ..., ad)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(dim: usize) -> Self {
        Monomial(vec![0; dim])
    }

    pub fn var(dim: usize, i: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `p^a` for a point of matching dimension.
    pub fn eval(&self, p: &Point) -> Rational {
        let mut acc = Rational::one();
        for (x, &e) in p.coords().iter().zip(&self.0) {
            if e > 0 {
                acc *= num_traits::pow(x.clone(), e as usize);
            }
        }
        acc
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Exact sign of a rational quantity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(r: &Rational) -> Sign {
        if r.is_zero() {
            Sign::Zero
        } else if r.is_positive() {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    pub fn from_i8(v: i8) -> Sign {
        match v.signum() {
            -1 => Sign::Negative,
            0 => Sign::Zero,
            _ => Sign::Positive,
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_i8(self.as_i8() * rhs.as_i8())
    }
}

/// Sparse polynomial in `dim` variables with nonzero rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    dim: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        Polynomial {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        let mut p = Polynomial::zero(dim);
        p.add_term(Monomial::one(dim), c);
        p
    }

    pub fn one(dim: usize) -> Self {
        Polynomial::constant(dim, Rational::one())
    }

    /// The coordinate function `x_{i+1}`.
    pub fn var(dim: usize, i: usize) -> Self {
        let mut p = Polynomial::zero(dim);
        p.add_term(Monomial::var(dim, i), Rational::one());
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, merging repeats.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, Rational)>,
    {
        let mut p = Polynomial::zero(dim);
        for (e, c) in terms {
            check_dim(dim, e.len())?;
            p.add_term(Monomial(e), c);
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial> {
        check_dim(self.dim, other.dim)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, s: &Rational) -> Polynomial {
        if s.is_zero() {
            return Polynomial::zero(self.dim);
        }
        Polynomial {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c * s))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial> {
        check_dim(self.dim, other.dim)?;
        let mut out = Polynomial::zero(self.dim);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    /// Exact value at `p`.
    pub fn evaluate(&self, p: &Point) -> Result<Rational> {
        check_dim(self.dim, p.dim())?;
        let max_exp = self
            .terms
            .keys()
            .flat_map(|m| m.0.iter().copied())
            .max()
            .unwrap_or(0) as usize;
        // powers[i][k] = x_i^k
        let powers: Vec<Vec<Rational>> = p
            .coords()
            .iter()
            .map(|x| {
                let mut v = Vec::with_capacity(max_exp + 1);
                v.push(Rational::one());
                for k in 1..=max_exp {
                    let next = &v[k - 1] * x;
                    v.push(next);
                }
                v
            })
            .collect();
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t *= &powers[i][e as usize];
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn sign_at(&self, p: &Point) -> Result<Sign> {
        Ok(Sign::of(&self.evaluate(p)?))
    }

    /// Serializes in the one-term-per-line text format (graded-lex order).
    /// The zero polynomial is written as a single `0` term so it survives
    /// inside polynomial lists.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        if self.terms.is_empty() {
            s.push('0');
            for _ in 0..self.dim {
                s.push_str(" 0");
            }
            s.push('\n');
            return s;
        }
        for (m, c) in &self.terms {
            s.push_str(&format_rational(c));
            for e in &m.0 {
                s.push(' ');
                s.push_str(&e.to_string());
            }
            s.push('\n');
        }
        s
    }

    /// Parses one polynomial. An empty body is the zero polynomial and needs
    /// `dim` to be known.
    pub fn parse(text: &str, dim: Option<usize>) -> Result<Polynomial> {
        parse_poly_lines(text.lines().enumerate().map(|(i, l)| (i + 1, l)), dim)
    }
}

fn parse_poly_lines<'a, I>(lines: I, dim: Option<usize>) -> Result<Polynomial>
where
    I: IntoIterator<Item = (usize, &'a str)>,
{
    let mut dim = dim;
    let mut terms = Vec::new();
    for (lineno, raw) in lines {
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let coeff = fields.next().unwrap();
        let coeff = parse_rational(coeff)
            .ok_or_else(|| Error::parse(lineno, format!("bad coefficient `{coeff}`")))?;
        let exps = fields
            .map(|f| {
                f.parse::<u32>()
                    .map_err(|_| Error::parse(lineno, format!("bad exponent `{f}`")))
            })
            .collect::<Result<Vec<u32>>>()?;
        match dim {
            None => dim = Some(exps.len()),
            Some(d) if d != exps.len() => {
                return Err(Error::parse(
                    lineno,
                    format!("expected {d} exponents, found {}", exps.len()),
                ))
            }
            _ => {}
        }
        terms.push((exps, coeff));
    }
    let dim = dim.ok_or_else(|| Error::parse(0, "empty polynomial with unknown dimension"))?;
    Polynomial::from_terms(dim, terms)
}

/// Parses a file holding several polynomials separated by `---` lines.
pub fn parse_polynomial_list(text: &str, dim: Option<usize>) -> Result<Vec<Polynomial>> {
    let mut out = Vec::new();
    let mut block: Vec<(usize, &str)> = Vec::new();
    let mut dim = dim;
    let mut flush = |block: &mut Vec<(usize, &str)>, dim: &mut Option<usize>| -> Result<()> {
        if block.iter().any(|(_, l)| !strip_comment(l).is_empty()) {
            let p = parse_poly_lines(block.drain(..), *dim)?;
            *dim = Some(p.dim());
            out.push(p);
        }
        block.clear();
        Ok(())
    };
    for (i, line) in text.lines().enumerate() {
        if line.trim() == "---" {
            flush(&mut block, &mut dim)?;
        } else {
            block.push((i + 1, line));
        }
    }
    flush(&mut block, &mut dim)?;
    Ok(out)
}

pub fn polynomial_list_to_text(polys: &[Polynomial]) -> String {
    polys
        .iter()
        .map(Polynomial::to_text)
        .collect::<Vec<_>>()
        .join("---\n")
}

fn strip_comment(line: &str) -> &str {
    let line = line.trim();
    if line.starts_with('#') {
        ""
    } else {
        line
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Highest degree first reads naturally.
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let mono: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        format!("x{}", i + 1)
                    } else {
                        format!("x{}^{}", i + 1, e)
                    }
                })
                .collect();
            if mono.is_empty() {
                write!(f, "{}", format_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{}*{}", format_rational(&mag), mono.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Exact product of a list of polynomials; the empty product is `1`.
pub fn product(dim: usize, fs: &[Polynomial]) -> Result<Polynomial> {
    let mut acc = Polynomial::one(dim);
    for f in fs {
        acc = acc.mul(f)?;
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point(Vec<Rational>);

impl Point {
    pub fn new(coords: Vec<Rational>) -> Self {
        Point(coords)
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        Point(coords.iter().map(|&c| crate::rational::int(c)).collect())
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(crate::rational::rational_to_f64).collect()
    }
}

/// Ordered list of points sharing a dimension. Duplicates are allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    dim: usize,
    points: Vec<Point>,
    labels: Option<Vec<String>>,
}

impl PointSet {
    pub fn new(dim: usize, points: Vec<Point>) -> Result<Self> {
        for p in &points {
            check_dim(dim, p.dim())?;
        }
        Ok(PointSet {
            dim,
            points,
            labels: None,
        })
    }

    pub fn empty(dim: usize) -> Self {
        PointSet {
            dim,
            points: Vec::new(),
            labels: None,
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.points.len() {
            return Err(Error::precondition(format!(
                "{} labels for {} points",
                labels.len(),
                self.points.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn push(&mut self, p: Point) -> Result<()> {
        check_dim(self.dim, p.dim())?;
        self.points.push(p);
        if let Some(l) = &mut self.labels {
            l.push(String::new());
        }
        Ok(())
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point> {
        self.points.iter()
    }

    /// Number of points that repeat an earlier point.
    pub fn duplicate_count(&self) -> usize {
        let mut sorted: Vec<&Point> = self.points.iter().collect();
        sorted.sort();
        sorted.windows(2).filter(|w| w[0] == w[1]).count()
    }

    pub fn union(&self, other: &PointSet) -> Result<PointSet> {
        check_dim(self.dim, other.dim)?;
        let mut points = self.points.clone();
        points.extend(other.points.iter().cloned());
        PointSet::new(self.dim, points)
    }

    pub fn parse(text: &str, dim: Option<usize>) -> Result<PointSet> {
        let mut dim = dim;
        let mut points = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let coords = line
                .split_whitespace()
                .map(|f| {
                    parse_rational(f)
                        .ok_or_else(|| Error::parse(i + 1, format!("bad coordinate `{f}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            match dim {
                None => dim = Some(coords.len()),
                Some(d) if d != coords.len() => {
                    return Err(Error::parse(
                        i + 1,
                        format!("expected {d} coordinates, found {}", coords.len()),
                    ))
                }
                _ => {}
            }
            points.push(Point(coords));
        }
        let dim = dim.ok_or_else(|| Error::parse(0, "no points and unknown dimension"))?;
        PointSet::new(dim, points)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for p in &self.points {
            let line: Vec<String> = p.0.iter().map(format_rational).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }
}

impl<'a> IntoIterator for &'a PointSet {
    type Item = &'a Point;
    type IntoIter = std::slice::Iter<'a, Point>;
    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn x(d: usize, i: usize) -> Polynomial {
        Polynomial::var(d, i)
    }

    fn c(d: usize, v: Rational) -> Polynomial {
        Polynomial::constant(d, v)
    }

    #[test]
    fn evaluate_examples() {
        // x1^2 + x2 at (2, 3)
        let f = x(2, 0).mul(&x(2, 0)).unwrap().add(&x(2, 1)).unwrap();
        assert_eq!(f.evaluate(&Point::from_ints(&[2, 3])).unwrap(), int(7));
        assert_eq!(
            Polynomial::zero(2)
                .evaluate(&Point::from_ints(&[5, -9]))
                .unwrap(),
            int(0)
        );
        // x1*x2 - 1 at (1/2, 2)
        let g = x(2, 0).mul(&x(2, 1)).unwrap().sub(&Polynomial::one(2)).unwrap();
        let p = Point::new(vec![frac(1, 2), int(2)]);
        assert_eq!(g.evaluate(&p).unwrap(), int(0));
    }

    #[test]
    fn evaluate_dimension_mismatch() {
        let f = x(2, 0);
        assert!(matches!(
            f.evaluate(&Point::from_ints(&[1])),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn sign_examples() {
        let f = x(1, 0).sub(&c(1, frac(1, 2))).unwrap();
        assert_eq!(f.sign_at(&Point::new(vec![frac(1, 2)])).unwrap(), Sign::Zero);
        assert_eq!(f.sign_at(&Point::from_ints(&[1])).unwrap(), Sign::Positive);
        assert_eq!(f.sign_at(&Point::from_ints(&[0])).unwrap(), Sign::Negative);
    }

    #[test]
    fn product_examples() {
        let a = x(1, 0);
        let b = x(1, 0).add(&Polynomial::one(1)).unwrap();
        let p = product(1, &[a.clone(), b]).unwrap();
        let expected = Polynomial::parse("1 2\n1 1\n", None).unwrap();
        assert_eq!(p, expected);

        assert_eq!(product(3, &[]).unwrap(), Polynomial::one(3));

        let m = x(1, 0).sub(&Polynomial::one(1)).unwrap();
        let pl = x(1, 0).add(&Polynomial::one(1)).unwrap();
        let q = product(1, &[m, pl]).unwrap();
        assert_eq!(q, Polynomial::parse("1 2\n-1 0\n", None).unwrap());
        assert_eq!(q.degree(), Some(2));
        assert!(product(2, &[a]).is_err());
    }

    #[test]
    fn zero_degree_is_sentinel() {
        assert_eq!(Polynomial::zero(3).degree(), None);
        assert_eq!(Polynomial::one(3).degree(), Some(0));
        let f = x(2, 0).sub(&x(2, 0)).unwrap();
        assert!(f.is_zero());
    }

    #[test]
    fn grlex_order_and_text() {
        let f = Polynomial::parse("# comment\n1 0 2\n1 1 1\n1 2 0\n1 0 1\n1 1 0\n3/6 0 0\n", None)
            .unwrap();
        assert_eq!(f.to_text(), "1/2 0 0\n1 1 0\n1 0 1\n1 2 0\n1 1 1\n1 0 2\n");
        assert_eq!(f.to_string(), "x2^2 + x1*x2 + x1^2 + x2 + x1 + 1/2");
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            Polynomial::parse("1 0\n1 0 0\n", None),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(Polynomial::parse("x 1\n", None).is_err());
        assert!(Polynomial::parse("", None).is_err());
        assert!(Polynomial::parse("", Some(2)).unwrap().is_zero());
    }

    #[test]
    fn polynomial_lists() {
        let text = "1 1 0\n---\n# second\n1 0 1\n-1 0 0\n";
        let ps = parse_polynomial_list(text, None).unwrap();
        assert_eq!(ps.len(), 2);
        assert_eq!(parse_polynomial_list(&polynomial_list_to_text(&ps), None).unwrap(), ps);
    }

    #[test]
    fn point_parsing_is_exact() {
        let ps = PointSet::parse("0.5 -1/3\n# skip\n\n2 1e1\n", None).unwrap();
        assert_eq!(ps.len(), 2);
        assert_eq!(ps.points()[0], Point::new(vec![frac(1, 2), frac(-1, 3)]));
        assert_eq!(ps.points()[1], Point::from_ints(&[2, 10]));
        assert!(PointSet::parse("1 2\n3\n", None).is_err());
        let dup = PointSet::parse("1 1\n1 1\n2 2\n", None).unwrap();
        assert_eq!(dup.duplicate_count(), 1);
    }

    fn random_poly(rng: &mut ChaCha8Rng, dim: usize) -> Polynomial {
        let n = rng.gen_range(0..5);
        let terms = (0..n)
            .map(|_| {
                let e = (0..dim).map(|_| rng.gen_range(0..3)).collect();
                (e, frac(rng.gen_range(-9..=9), rng.gen_range(1..5)))
            })
            .collect::<Vec<_>>();
        Polynomial::from_terms(dim, terms).unwrap()
    }

    fn random_point(rng: &mut ChaCha8Rng, dim: usize) -> Point {
        Point::new(
            (0..dim)
                .map(|_| frac(rng.gen_range(-5..=5), rng.gen_range(1..4)))
                .collect(),
        )
    }

    proptest! {
        #[test]
        fn evaluation_is_a_ring_homomorphism(seed in any::<u64>(), dim in 1usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = random_poly(&mut rng, dim);
            let g = random_poly(&mut rng, dim);
            let p = random_point(&mut rng, dim);
            let fp = f.evaluate(&p).unwrap();
            let gp = g.evaluate(&p).unwrap();
            prop_assert_eq!(f.mul(&g).unwrap().evaluate(&p).unwrap(), &fp * &gp);
            prop_assert_eq!(f.add(&g).unwrap().evaluate(&p).unwrap(), fp + gp);
        }

        #[test]
        fn sign_of_product_is_product_of_signs(seed in any::<u64>(), dim in 1usize..4, k in 0usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let fs: Vec<Polynomial> = (0..k).map(|_| random_poly(&mut rng, dim)).collect();
            let p = random_point(&mut rng, dim);
            let prod = product(dim, &fs).unwrap();
            let expected = fs.iter().fold(Sign::Positive, |s, f| s * f.sign_at(&p).unwrap());
            prop_assert_eq!(prod.sign_at(&p).unwrap(), expected);
            if fs.iter().all(|f| !f.is_zero()) {
                let total: u32 = fs.iter().map(|f| f.degree().unwrap()).sum();
                prop_assert_eq!(prod.degree(), Some(total));
            }
        }

        #[test]
        fn text_round_trip_is_idempotent(seed in any::<u64>(), dim in 1usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = random_poly(&mut rng, dim);
            let once = Polynomial::parse(&f.to_text(), Some(dim)).unwrap();
            let twice = Polynomial::parse(&once.to_text(), Some(dim)).unwrap();
            prop_assert_eq!(&once, &f);
            prop_assert_eq!(once, twice);
        }
    }
}
