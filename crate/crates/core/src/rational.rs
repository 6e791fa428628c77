//! Helpers over [`Rational`]: literal parsing, exact powers and roots,
//! dyadic construction and mediants.
//!
//! Canonical text is `p/q` with `/q` omitted when `q = 1`, which is what the
//! `Display` impl of [`Rational`] already produces.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Pow, Signed, Zero};

use crate::Rational;

/// `n / d` from machine integers. Panics when `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `p`, `p/q`, optionally signed with `-`, `+` or U+2212.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let t = text.trim();
    let (negative, body) = if let Some(rest) = t.strip_prefix('-') {
        (true, rest)
    } else if let Some(rest) = t.strip_prefix('\u{2212}') {
        (true, rest)
    } else if let Some(rest) = t.strip_prefix('+') {
        (false, rest)
    } else {
        (false, t)
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (body, "1"),
    };
    if !is_digits(num) || !is_digits(den) {
        return None;
    }
    let n: BigInt = num.parse().ok()?;
    let d: BigInt = den.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    let q = Rational::new(n, d);
    Some(if negative { -q } else { q })
}

fn is_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

/// Compares by cross-multiplication.
///
/// `Ord` on `BigRational` walks both continued fractions recursively, which
/// for two close numbers with long expansions is slow and can exhaust the
/// stack. Use this for values that may be deep refinements.
pub fn cmp(a: &Rational, b: &Rational) -> Ordering {
    if a.denom() == b.denom() {
        return a.numer().cmp(b.numer());
    }
    match (a.numer().sign(), b.numer().sign()) {
        (x, y) if x != y => return sign_rank(x).cmp(&sign_rank(y)),
        _ => {}
    }
    (a.numer() * b.denom()).cmp(&(b.numer() * a.denom()))
}

fn sign_rank(s: num_bigint::Sign) -> i8 {
    match s {
        num_bigint::Sign::Minus => -1,
        num_bigint::Sign::NoSign => 0,
        num_bigint::Sign::Plus => 1,
    }
}

/// `q^n` for a non-negative exponent.
pub fn pow(q: &Rational, n: u32) -> Rational {
    Rational::new_raw(q.numer().pow(n), q.denom().pow(n))
}

/// `m / 2^k`.
pub fn dyadic(m: BigInt, k: u64) -> Rational {
    reduce(m, BigInt::one() << k)
}

/// The exact positive `n`-th root of `q > 0` when `q` is an `n`-th power of a rational.
pub fn exact_nth_root(q: &Rational, n: u32) -> Option<Rational> {
    if !q.is_positive() || n == 0 {
        return None;
    }
    let num_root = q.numer().nth_root(n);
    let den_root = q.denom().nth_root(n);
    if (&num_root).pow(n) == *q.numer() && (&den_root).pow(n) == *q.denom() {
        Some(Rational::new(num_root, den_root))
    } else {
        None
    }
}

/// `(a + c) / (b + d)` for `a/b` and `c/d` given as raw numerator/denominator pairs.
pub fn mediant(left: (&BigInt, &BigInt), right: (&BigInt, &BigInt)) -> (BigInt, BigInt) {
    (left.0 + right.0, left.1 + right.1)
}

pub fn midpoint(a: &Rational, b: &Rational) -> Rational {
    let (p, q, r, s) = (a.numer(), a.denom(), b.numer(), b.denom());
    if q == s {
        reduce(p + r, q << 1)
    } else {
        reduce(p * s + r * q, (q * s) << 1)
    }
}

/// `n / d` in lowest terms, skipping the gcd when `d` is a power of two.
fn reduce(n: BigInt, d: BigInt) -> Rational {
    let tz = d.trailing_zeros().unwrap_or(0);
    if d.bits() != tz + 1 {
        return Rational::new(n, d);
    }
    let shift = n.trailing_zeros().map_or(tz, |z| z.min(tz));
    Rational::new_raw(n >> shift, d >> shift)
}

/// Sign of `q` as -1, 0 or 1.
pub fn signum(q: &Rational) -> i8 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

/// `10^k` as a rational.
pub fn pow10(k: u32) -> Rational {
    Rational::from_integer(BigInt::from(10u32).pow(k))
}

/// `2^-k`.
pub fn half_pow(k: u64) -> Rational {
    dyadic(BigInt::one(), k)
}
