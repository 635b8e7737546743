//! Stage-degree schedules for iterated bisection.
//!
//! Stage `i` bisects up to `2^i` sets at once, so it needs a degree whose
//! Veronese capacity reaches `2^i`. In the whole space that is a plain
//! capacity count; on a variety the degrees follow a three-regime rule
//! depending on how the stage degree compares with `δ1` and `δ2`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};

use crate::bounds::binomial;
use crate::error::{Error, Result};
use crate::rational::{int, rational_to_f64, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    /// Degree below `δ1`: the variety imposes no condition yet.
    Full,
    /// `δ1 <= degree < δ2`: only the hypersurface through the variety matters.
    Hypersurface,
    /// `degree >= δ2`: the full codimension is felt.
    Codim2,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Full => "full",
            Regime::Hypersurface => "hypersurface",
            Regime::Codim2 => "codim2",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScheduleEntry {
    pub stage: u32,
    /// Number of sets the stage must bisect, `2^stage`.
    pub target: u64,
    pub degree: u32,
    pub regime: Regime,
    /// Set when the closed-form degree violated its regime range and was moved
    /// back inside it.
    pub clamped: bool,
}

/// Greedy whole-space schedule: stage `i` gets the least degree whose capacity
/// `C(deg + d, d) - 1` is at least `2^i`; stops before the degree sum exceeds
/// `budget`.
pub fn schedule_full_space(d: usize, budget: u32) -> Vec<ScheduleEntry> {
    let mut out = Vec::new();
    let mut used = 0u32;
    for stage in 0..63u32 {
        let target = 1u64 << stage;
        let mut degree = 1u32;
        while binomial(degree as i64 + d as i64, d as i64) - 1u32 < target.into() {
            degree += 1;
        }
        if used + degree > budget {
            break;
        }
        used += degree;
        out.push(ScheduleEntry {
            stage,
            target,
            degree,
            regime: Regime::Full,
            clamped: false,
        });
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct VarietySchedule {
    /// `ℓ/(2d) - 2δ2`, the largest admissible stage degree.
    pub eta: Rational,
    /// Argument of `s0 = log2(c1 δ1^d)`; regime 1 holds while `2^i` is below it.
    pub s0_arg: Rational,
    /// Argument of `s1 = log2(c1 δ1 δ2^(d-1))`; regime 2 holds while `2^i` is below it.
    pub s1_arg: Rational,
    /// Last stage index (may be negative, meaning no stage).
    pub t: i64,
    pub entries: Vec<ScheduleEntry>,
}

impl VarietySchedule {
    pub fn s0(&self) -> f64 {
        log2(&self.s0_arg)
    }

    pub fn s1(&self) -> f64 {
        log2(&self.s1_arg)
    }

    pub fn degree_sum(&self) -> u64 {
        self.entries.iter().map(|e| e.degree as u64).sum()
    }
}

fn log2(x: &Rational) -> f64 {
    if !x.is_positive() {
        return f64::NEG_INFINITY;
    }
    let nb = x.numer().bits() as i64;
    let db = x.denom().bits() as i64;
    let shift = nb - db;
    // x = 2^shift * y with y in (1/2, 2)
    let y = if shift >= 0 {
        x / Rational::from_integer(BigInt::one() << shift as usize)
    } else {
        x * Rational::from_integer(BigInt::one() << (-shift) as usize)
    };
    shift as f64 + rational_to_f64(&y).log2()
}

/// Largest integer `t` with `2^t <= x`, for `x > 0`.
pub(crate) fn floor_log2(x: &Rational) -> i64 {
    debug_assert!(x.is_positive());
    let mut t = x.numer().bits() as i64 - x.denom().bits() as i64;
    while pow2(t) > *x {
        t -= 1;
    }
    while pow2(t + 1) <= *x {
        t += 1;
    }
    t
}

fn pow2(t: i64) -> Rational {
    if t >= 0 {
        Rational::from_integer(BigInt::one() << t as usize)
    } else {
        Rational::new(BigInt::one(), BigInt::one() << (-t) as usize)
    }
}

/// Largest integer `n >= 0` with `n^k <= x` (`x >= 0`, `k >= 1`).
pub(crate) fn floor_root(x: &Rational, k: u32) -> u64 {
    if !x.is_positive() {
        return 0;
    }
    let approx = rational_to_f64(x).powf(1.0 / k as f64);
    let mut n = if approx.is_finite() { approx.floor().max(0.0) as u64 } else { 0 };
    let pow = |n: u64| Rational::from_integer(num_traits::pow(BigInt::from(n), k as usize));
    while n > 0 && pow(n) > *x {
        n -= 1;
    }
    while pow(n + 1) <= *x {
        n += 1;
    }
    n
}

/// Three-regime schedule on a codimension-2 variety in `R^d`.
pub fn schedule_variety(
    d: u32,
    delta1: u64,
    delta2: u64,
    ell: u64,
    c1: &Rational,
) -> Result<VarietySchedule> {
    schedule_for_codim(d, 2, delta1, delta2, ell, c1)
}

/// Schedule for a variety of codimension `codim ∈ {0, 1, 2}`. Lower
/// codimensions keep only the first `codim + 1` regimes; the last one used
/// runs up to `η`.
pub fn schedule_for_codim(
    d: u32,
    codim: u32,
    delta1: u64,
    delta2: u64,
    ell: u64,
    c1: &Rational,
) -> Result<VarietySchedule> {
    if codim > 2 {
        return Err(Error::precondition(format!(
            "codimension {codim} is not supported"
        )));
    }
    if d <= codim {
        return Err(Error::precondition(format!(
            "a positive-dimensional variety is required (d = {d}, codimension {codim})"
        )));
    }
    if delta1 < 1 || delta1 > delta2 {
        return Err(Error::precondition(format!(
            "need 1 <= delta1 <= delta2, got delta1={delta1}, delta2={delta2}"
        )));
    }
    let cap = Rational::new(BigInt::one(), BigInt::one() << d as usize);
    if !c1.is_positive() || *c1 > cap {
        return Err(Error::precondition(format!(
            "c1 must lie in (0, 2^-{d}]"
        )));
    }
    if ell < 6 * d as u64 * delta2 {
        return Err(Error::precondition(format!(
            "degree {ell} below 6 d delta2 = {}",
            6 * d as u64 * delta2
        )));
    }
    let dd = d as usize;
    let r1 = int(delta1 as i64);
    let r2 = int(delta2 as i64);
    let eta = Rational::new(BigInt::from(ell), BigInt::from(2 * d)) - int(2) * &r2;
    let s0_arg = c1 * num_traits::pow(r1.clone(), dd);
    let s1_arg = c1 * &r1 * num_traits::pow(r2.clone(), dd - 1);
    let last_arg = match codim {
        0 => c1 * num_traits::pow(eta.clone(), dd),
        1 => c1 * &r1 * num_traits::pow(eta.clone(), dd - 1),
        _ => c1 * &r1 * &r2 * num_traits::pow(eta.clone(), dd - 2),
    };
    let t = if last_arg.is_positive() {
        floor_log2(&last_arg)
    } else {
        -1
    };
    let mut entries = Vec::new();
    for stage in 0..=t.clamp(-1, 62) {
        if stage < 0 {
            break;
        }
        let stage = stage as u32;
        let target_r = pow2(stage as i64);
        let regime = if codim == 0 || target_r < s0_arg {
            Regime::Full
        } else if codim == 1 || target_r < s1_arg {
            Regime::Hypersurface
        } else {
            Regime::Codim2
        };
        let raw = match regime {
            Regime::Full => floor_root(&(&target_r / c1), d),
            Regime::Hypersurface => floor_root(&(&target_r / (c1 * &r1)), d - 1),
            Regime::Codim2 => floor_root(&(&target_r / (c1 * &r1 * &r2)), d - 2),
        };
        let (lo, hi) = regime_range(regime, codim, delta1, delta2, &eta);
        let degree = raw.clamp(lo, hi.max(lo));
        entries.push(ScheduleEntry {
            stage,
            target: 1u64 << stage,
            degree: degree as u32,
            regime,
            clamped: degree != raw,
        });
    }
    Ok(VarietySchedule {
        eta,
        s0_arg,
        s1_arg,
        t,
        entries,
    })
}

/// Degree range `[lo, hi]` of `regime` on a variety of codimension `codim`.
/// The highest regime in use runs up to `⌊η⌋`.
pub fn regime_range(regime: Regime, codim: u32, delta1: u64, delta2: u64, eta: &Rational) -> (u64, u64) {
    let eta_floor = if eta.is_positive() {
        eta.floor().to_integer().to_u64().unwrap_or(u64::MAX)
    } else {
        0
    };
    let top = match codim {
        0 => Regime::Full,
        1 => Regime::Hypersurface,
        _ => Regime::Codim2,
    };
    let lo = match regime {
        Regime::Full => 1,
        Regime::Hypersurface => delta1,
        Regime::Codim2 => delta2,
    };
    let hi = if regime == top {
        eta_floor
    } else {
        match regime {
            Regime::Full => delta1.saturating_sub(1),
            _ => delta2.saturating_sub(1),
        }
    };
    (lo, hi)
}

/// True when `entry` lies in its regime's degree range or carries the clamp flag.
pub fn entry_consistent(entry: &ScheduleEntry, codim: u32, delta1: u64, delta2: u64, eta: &Rational) -> bool {
    let (lo, hi) = regime_range(entry.regime, codim, delta1, delta2, eta);
    entry.clamped || (lo..=hi).contains(&(entry.degree as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;
    use proptest::prelude::*;

    fn degrees(entries: &[ScheduleEntry]) -> Vec<u32> {
        entries.iter().map(|e| e.degree).collect()
    }

    fn capacity(d: u64, degree: u64) -> u64 {
        // C(degree + d, d) - 1 by the product formula
        let mut c = 1u64;
        for j in 1..=d {
            c = c * (degree + j) / j;
        }
        c - 1
    }

    #[test]
    fn full_space_examples() {
        assert_eq!(degrees(&schedule_full_space(2, 1)), vec![1]);
        assert_eq!(degrees(&schedule_full_space(2, 4)), vec![1, 1, 2]);
        assert_eq!(degrees(&schedule_full_space(1, 3)), vec![1, 2]);
        assert!(schedule_full_space(3, 0).is_empty());
    }

    #[test]
    fn variety_example_empty_schedule() {
        let s = schedule_variety(4, 1, 1, 24, &frac(1, 16)).unwrap();
        assert_eq!(s.eta, int(1));
        assert_eq!(s.s0(), -4.0);
        assert_eq!(s.s1(), -4.0);
        assert_eq!(s.t, -4);
        assert!(s.entries.is_empty());
    }

    #[test]
    fn variety_example_plane() {
        let s = schedule_variety(4, 1, 1, 96, &frac(1, 16)).unwrap();
        assert_eq!(s.eta, int(10));
        assert_eq!(s.t, 2);
        assert_eq!(degrees(&s.entries), vec![4, 5, 8]);
        assert!(s.entries.iter().all(|e| e.regime == Regime::Codim2 && !e.clamped));
    }

    #[test]
    fn variety_example_three_regimes() {
        let c1 = frac(1, 16);
        let s = schedule_variety(4, 2, 3, 100, &c1).unwrap();
        assert_eq!(s.eta, frac(13, 2));
        assert_eq!(s.t, 3);
        assert_eq!(s.s0(), 0.0);
        assert!((s.s1() - (54.0f64 / 16.0).log2()).abs() < 1e-12);
        // Stage degrees straight from the closed forms.
        let expected: Vec<u32> = (0..=3)
            .map(|i| {
                let target = 2f64.powi(i) * 16.0;
                if target < 2f64.powi(4) {
                    (target).powf(0.25).floor() as u32
                } else if target < 2.0 * 27.0 {
                    (target / 2.0).cbrt().floor() as u32
                } else {
                    (target / 6.0).sqrt().floor() as u32
                }
            })
            .collect();
        assert_eq!(degrees(&s.entries), expected);
        assert_eq!(expected, vec![2, 2, 3, 4]);
    }

    #[test]
    fn variety_preconditions() {
        assert!(schedule_variety(4, 1, 1, 23, &frac(1, 16)).is_err());
        assert!(schedule_variety(4, 2, 1, 96, &frac(1, 16)).is_err());
        assert!(schedule_variety(4, 1, 1, 96, &frac(1, 8)).is_err());
        assert!(schedule_variety(4, 1, 1, 96, &int(0)).is_err());
    }

    #[test]
    fn lower_codimension_uses_fewer_regimes() {
        let s = schedule_for_codim(3, 1, 2, 2, 72, &frac(1, 8)).unwrap();
        assert!(s.entries.iter().all(|e| e.regime != Regime::Codim2));
        let s = schedule_for_codim(3, 0, 1, 1, 36, &frac(1, 8)).unwrap();
        assert!(s.entries.iter().all(|e| e.regime == Regime::Full));
        assert!(schedule_for_codim(3, 3, 1, 1, 36, &frac(1, 8)).is_err());
    }

    proptest! {
        #[test]
        fn full_space_is_greedy_and_within_budget(d in 1usize..5, budget in 0u32..40) {
            let s = schedule_full_space(d, budget);
            let used: u32 = s.iter().map(|e| e.degree).sum();
            prop_assert!(used <= budget);
            for (i, e) in s.iter().enumerate() {
                prop_assert_eq!(e.stage as usize, i);
                prop_assert_eq!(e.target, 1u64 << i);
                prop_assert!(capacity(d as u64, e.degree as u64) >= e.target);
                prop_assert!(e.degree == 1 || capacity(d as u64, e.degree as u64 - 1) < e.target);
            }
            // the next stage would not fit
            let next = 1u64 << s.len();
            let mut deg = 1u64;
            while capacity(d as u64, deg) < next {
                deg += 1;
            }
            prop_assert!(u64::from(used) + deg > u64::from(budget));
        }

        #[test]
        fn variety_entries_respect_their_regime(
            d in 3u32..7,
            delta1 in 1u64..5,
            extra in 0u64..4,
            slack in 0u64..300,
        ) {
            let delta2 = delta1 + extra;
            let ell = 6 * u64::from(d) * delta2 + slack;
            let c1 = Rational::new(BigInt::one(), BigInt::one() << d as usize);
            let s = schedule_variety(d, delta1, delta2, ell, &c1).unwrap();
            prop_assert_eq!(s.entries.len() as i64, (s.t + 1).max(0));
            for e in &s.entries {
                prop_assert!(entry_consistent(e, 2, delta1, delta2, &s.eta));
                prop_assert_eq!(e.target, 1u64 << e.stage);
            }
        }
    }
}
