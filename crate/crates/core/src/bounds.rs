//! Closed-form bounds on Hilbert functions, degrees and Betti numbers.
//!
//! Constants that are only known to exist (the `c(d)` factors) are caller
//! supplied; nothing here pretends to know them.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// `n choose i`, taken to be 0 unless `0 <= i <= n`.
pub fn binomial(n: i64, i: i64) -> BigUint {
    if i < 0 || n < 0 || i > n {
        return BigUint::zero();
    }
    let k = i.min(n - i) as u64;
    let n = n as u64;
    let mut acc = BigUint::one();
    for j in 0..k {
        acc *= n - j;
        acc /= j + 1;
    }
    acc
}

/// Machine-sized binomial for shapes and counts; panics on overflow.
pub fn binomial_usize(n: usize, i: usize) -> usize {
    let b = binomial(n as i64, i as i64);
    usize::try_from(b).expect("binomial coefficient overflows usize")
}

/// Upper bound `deg(X) * C(ℓ+e, e)` on the Hilbert function of an
/// irreducible variety of dimension `e`.
pub fn chardin_upper(deg: u64, e: u64, ell: u64) -> BigUint {
    BigUint::from(deg) * binomial((ell + e) as i64, e as i64)
}

/// Smallest degree at which [`chardin_philippon_lower`] applies.
pub fn chardin_philippon_threshold(delta: u64, d: u64, e: u64) -> i64 {
    (d as i64 - e as i64) * (delta as i64 - 1) + 1
}

/// Lower bound `deg(X) * C(ℓ - (d-e)(δ-1) + e, e)`, valid for
/// `ℓ >= (d-e)(δ-1) + 1`.
pub fn chardin_philippon_lower(deg: u64, delta: u64, d: u64, e: u64, ell: u64) -> Result<BigUint> {
    if delta == 0 || e > d {
        return Err(Error::precondition("need delta >= 1 and e <= d"));
    }
    let threshold = chardin_philippon_threshold(delta, d, e);
    if (ell as i64) < threshold {
        return Err(Error::precondition(format!(
            "degree {ell} below validity threshold {threshold}"
        )));
    }
    let shift = (d - e) as i64 * (delta as i64 - 1);
    Ok(BigUint::from(deg) * binomial(ell as i64 - shift + e as i64, e as i64))
}

/// Piecewise lower bound on the Hilbert function of a codimension-2 variety:
///
/// - `c (ℓ+1)^d + 1` for `ℓ <= δ1 - 1`
/// - `c δ1 (ℓ+1)^(d-1) + 1` for `δ1 <= ℓ <= δ2 - 1`
/// - `c δ1 δ2 (ℓ+1)^(d-2) + 1` for `ℓ >= δ2`
pub fn prop2_lower(d: u32, delta1: u64, delta2: u64, ell: u64, c: &Rational) -> Result<Rational> {
    if delta1 < 1 || delta1 > delta2 {
        return Err(Error::precondition(format!(
            "need 1 <= delta1 <= delta2, got delta1={delta1}, delta2={delta2}"
        )));
    }
    if ell < 1 {
        return Err(Error::precondition("need ell >= 1"));
    }
    if d < 2 {
        return Err(Error::precondition("need d >= 2"));
    }
    if *c <= Rational::zero() {
        return Err(Error::precondition("constant c must be positive"));
    }
    let base = BigUint::from(ell + 1);
    let (factor, exp) = if ell < delta1 {
        (BigUint::one(), d)
    } else if ell < delta2 {
        (BigUint::from(delta1), d - 1)
    } else {
        (BigUint::from(delta1) * delta2, d - 2)
    };
    let v = factor * num_traits::pow(base, exp as usize);
    Ok(c * Rational::from_integer(v.into()) + Rational::one())
}

/// `d(d-1) deg(X)`: coprime `f1, f2` in the ideal of a codimension-2 variety
/// can be found with `deg f1 * deg f2` at most this.
pub fn coprime_pair_bound(d: u64, deg: u64) -> BigUint {
    BigUint::from(d) * d.saturating_sub(1) * deg
}

/// `deg f1 ... deg fe * deg(g)^(d-e)` with the leading constant normalized to 1.
pub fn betti_bound(degs_f: &[u64], deg_g: u64, d: u64) -> Result<BigUint> {
    let e = degs_f.len() as u64;
    if e > d {
        return Err(Error::precondition(format!(
            "{e} equations exceed ambient dimension {d}"
        )));
    }
    if degs_f.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::precondition("degrees of f must be nondecreasing"));
    }
    if let Some(&last) = degs_f.last() {
        if deg_g < last {
            return Err(Error::precondition("deg(g) must be at least every deg(f_i)"));
        }
    }
    let prod = degs_f
        .iter()
        .fold(BigUint::one(), |acc, &x| acc * BigUint::from(x));
    Ok(prod * num_traits::pow(BigUint::from(deg_g), (d - e) as usize))
}

/// Declared numerical invariants of an irreducible variety `X ⊂ C^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarietyInvariants {
    /// Ambient dimension `d`.
    pub ambient: u64,
    /// `dim X`.
    pub dim: u64,
    pub degree: u64,
    /// Minimal degree of a hypersurface containing `X`.
    pub delta1: u64,
    /// Minimal degree at which `X` is set-theoretically locally defined.
    pub delta2: u64,
}

impl VarietyInvariants {
    pub fn codim(&self) -> u64 {
        self.ambient.saturating_sub(self.dim)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InequalityCheck {
    pub name: &'static str,
    pub statement: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InequalityReport {
    pub checks: Vec<InequalityCheck>,
}

impl InequalityReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &InequalityCheck> {
        self.checks.iter().filter(|c| !c.holds)
    }
}

/// Consistency checks among declared `(d, e, deg, δ1, δ2)`.
pub fn degree_inequalities(inv: &VarietyInvariants) -> InequalityReport {
    let VarietyInvariants {
        ambient: d,
        dim: e,
        degree,
        delta1,
        delta2,
    } = *inv;
    let mut checks = Vec::new();
    let mut push = |name, statement: String, holds| {
        checks.push(InequalityCheck {
            name,
            statement,
            holds,
        })
    };
    push(
        "codimension",
        format!("d - e = {} in {{0, 1, 2}}", d as i64 - e as i64),
        e <= d && d - e <= 2,
    );
    push("delta1_positive", format!("delta1 = {delta1} >= 1"), delta1 >= 1);
    push(
        "delta_order",
        format!("delta1 = {delta1} <= delta2 = {delta2}"),
        delta1 <= delta2,
    );
    push(
        "degree_lower",
        format!("delta2 = {delta2} <= deg = {degree}"),
        delta2 <= degree,
    );
    let codim = d.saturating_sub(e) as u32;
    let cap = num_traits::pow(BigUint::from(delta2), codim as usize);
    push(
        "degree_upper",
        format!("deg = {degree} <= delta2^(d-e) = {cap}"),
        BigUint::from(degree) <= cap,
    );
    if e + 2 == d {
        push(
            "codim2_degree",
            format!("deg = {degree} <= delta1*delta2 = {}", delta1 * delta2),
            degree <= delta1 * delta2,
        );
    }
    InequalityReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn n(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), n(10));
        assert_eq!(binomial(3, 5), n(0));
        assert_eq!(binomial(4, 0), n(1));
        assert_eq!(binomial(-1, 0), n(0));
        assert_eq!(binomial(4, -1), n(0));
        assert_eq!(binomial(100, 4), n(3921225));
        for a in 0..12 {
            for b in 1..a {
                assert_eq!(binomial(a, b), binomial(a - 1, b - 1) + binomial(a - 1, b));
            }
        }
    }

    #[test]
    fn chardin_examples() {
        assert_eq!(chardin_upper(1, 1, 3), n(4));
        assert_eq!(chardin_upper(2, 1, 3), n(8));
        assert_eq!(chardin_upper(5, 0, 7), n(5));
    }

    #[test]
    fn chardin_philippon_examples() {
        assert_eq!(chardin_philippon_lower(1, 1, 2, 1, 3).unwrap(), n(4));
        // conic in the plane at degree 4: 2 * C(4 - 1 + 1, 1)
        assert_eq!(chardin_philippon_lower(2, 2, 2, 1, 4).unwrap(), n(8));
        assert_eq!(chardin_philippon_lower(3, 3, 3, 1, 5).unwrap(), n(6));
        assert!(chardin_philippon_lower(2, 2, 2, 1, 1).is_err());
        assert!(chardin_philippon_lower(3, 3, 3, 1, 4).is_err());
    }

    #[test]
    fn prop2_examples() {
        assert_eq!(prop2_lower(4, 2, 3, 1, &int(1)).unwrap(), int(17));
        assert_eq!(prop2_lower(4, 2, 3, 2, &int(1)).unwrap(), int(55));
        assert_eq!(prop2_lower(4, 2, 3, 10, &int(1)).unwrap(), int(727));
        assert!(prop2_lower(4, 3, 2, 5, &int(1)).is_err());
        assert!(prop2_lower(4, 0, 2, 5, &int(1)).is_err());
    }

    #[test]
    fn coprime_and_betti_examples() {
        assert_eq!(coprime_pair_bound(4, 1), n(12));
        assert_eq!(coprime_pair_bound(3, 2), n(12));
        assert_eq!(coprime_pair_bound(2, 1), n(2));
        assert_eq!(betti_bound(&[], 5, 4).unwrap(), n(625));
        assert_eq!(betti_bound(&[2, 3], 7, 4).unwrap(), n(294));
        assert_eq!(betti_bound(&[1], 1, 2).unwrap(), n(1));
        assert!(betti_bound(&[3, 2], 7, 4).is_err());
        assert!(betti_bound(&[2, 8], 7, 4).is_err());
        assert!(betti_bound(&[1, 1, 1], 2, 2).is_err());
    }

    #[test]
    fn inequality_examples() {
        let plane = VarietyInvariants {
            ambient: 4,
            dim: 2,
            degree: 1,
            delta1: 1,
            delta2: 1,
        };
        assert!(degree_inequalities(&plane).all_pass());

        let bad = VarietyInvariants {
            ambient: 4,
            dim: 2,
            degree: 5,
            delta1: 2,
            delta2: 2,
        };
        let r = degree_inequalities(&bad);
        assert!(!r.all_pass());
        assert!(r.failures().any(|c| c.name == "degree_upper"));

        let curve = VarietyInvariants {
            ambient: 3,
            dim: 1,
            degree: 4,
            delta1: 2,
            delta2: 2,
        };
        assert!(degree_inequalities(&curve).all_pass());

        let deep = VarietyInvariants {
            ambient: 5,
            dim: 1,
            degree: 1,
            delta1: 1,
            delta2: 1,
        };
        assert!(degree_inequalities(&deep)
            .failures()
            .any(|c| c.name == "codimension"));
    }
}
