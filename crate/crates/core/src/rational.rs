//! Exact rational helpers: parsing, integer scaling and lossy float views.

use num_bigint::{BigInt, Sign as BigSign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `p/q`, an integer, or a decimal with optional exponent (`-1.25e-3`).
/// Decimals are converted exactly.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (ipart, fpart) = body.split_once('.').unwrap_or((body, ""));
    if ipart.is_empty() && fpart.is_empty() {
        return None;
    }
    if !ipart.chars().chain(fpart.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{ipart}{fpart}");
    let mut num: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().ok()?
    };
    if neg {
        num = -num;
    }
    let scale = exp - fpart.len() as i32;
    let ten = BigInt::from(10);
    let r = if scale >= 0 {
        Rational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Some(r)
}

/// Canonical text form: integer or `p/q`.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Multiplies a rational vector by the positive lcm of its denominators,
/// returning the resulting integer vector. Signs of linear forms are preserved.
pub fn clear_denominators(v: &[Rational]) -> Vec<BigInt> {
    let l = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    v.iter()
        .map(|x| x.numer() * (&l / x.denom()))
        .collect()
}

/// Divides an integer vector by the gcd of its entries (no-op for the zero vector).
pub fn remove_content(v: &mut [BigInt]) {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            *x = &*x / &g;
        }
    }
}

pub fn bigint_to_f64(x: &BigInt) -> f64 {
    match x.to_f64() {
        Some(f) if f.is_finite() => f,
        _ => {
            if x.sign() == BigSign::Minus {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        }
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    ratio_to_f64(r.numer(), r.denom())
}

/// `n / d` as a float without forming the reduced fraction.
pub fn ratio_to_f64(n: &BigInt, d: &BigInt) -> f64 {
    let nb = n.bits() as i64;
    let db = d.bits() as i64;
    if nb < 1000 && db < 1000 {
        return bigint_to_f64(n) / bigint_to_f64(d);
    }
    // Shift both to ~64 significant bits to stay inside f64 range.
    let ns = (nb - 64).max(0);
    let ds = (db - 64).max(0);
    let nf = bigint_to_f64(&(n >> ns as usize));
    let df = bigint_to_f64(&(d >> ds as usize));
    nf / df * 2f64.powi((ns - ds) as i32)
}

/// Float view of an integer vector, rescaled so the largest entry has magnitude ~1.
/// Only the direction is preserved.
pub fn direction_to_f64(v: &[BigInt]) -> Vec<f64> {
    let max_bits = v.iter().map(|x| x.bits()).max().unwrap_or(0) as i64;
    let shift = (max_bits - 62).max(0) as usize;
    let scaled: Vec<f64> = v.iter().map(|x| bigint_to_f64(&(x >> shift))).collect();
    // Arithmetic shift rounds toward -inf; tiny negative entries become -1, which is harmless
    // for a heuristic float view.
    let m = scaled.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if m > 0.0 {
        scaled.iter().map(|x| x / m).collect()
    } else {
        scaled
    }
}

/// Nearest rational with denominator `2^bits` (ties away from zero).
pub fn f64_to_rational(x: f64, bits: u32) -> Rational {
    let scale = (1u64 << bits) as f64;
    let n = (x * scale).round();
    let n = BigInt::from(n as i64);
    Rational::new(n, BigInt::from(1u64 << bits))
}

pub fn abs_bits(r: &Rational) -> u64 {
    r.numer().abs().bits() + r.denom().bits()
}
