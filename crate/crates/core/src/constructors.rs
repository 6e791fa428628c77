//! Concrete oracles: rationals, positive n-th roots, sign-bracketed zeros,
//! limits of Cauchy sequences with a modulus, and least upper bounds.
//!
//! User-supplied rules ([`SignFunction`], [`CauchySpec`], [`UpperBoundTest`])
//! must be pure and deterministic; oracles may call them from several threads.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{OracleError, Result};
use crate::oracle::{oracle_from_fonsi_labeled, FonsiSource, Hint, Memo, Oracle, Sequential};
use crate::rational::{cmp, dyadic, exact_nth_root, half_pow, midpoint, pow};
use crate::{RInterval, Rational};

/// `{x : x = q}`.
pub fn rational_oracle(q: Rational) -> Oracle {
    rooted(q.to_string(), q)
}

/// The positive `n`-th root of `q > 0`.
///
/// A positive-endpoint interval `a:b` is Yes exactly when `aⁿ ≤ q ≤ bⁿ`. The
/// number is positive, so a non-positive endpoint always lies below it.
/// Level `k` is the dyadic interval of width `2⁻ᵏ` found by `k` midpoint
/// bisections of the integer bracket `⌊q^(1/n)⌋ : ⌊q^(1/n)⌋ + 1`.
pub fn nth_root_oracle(n: u32, q: Rational) -> Result<Oracle> {
    if n == 0 {
        return Err(OracleError::UnsupportedDomain("root index must be at least 1".into()));
    }
    if !q.is_positive() {
        return Err(OracleError::UnsupportedDomain(format!(
            "n-th root oracles need a positive radicand, got {q}"
        )));
    }
    let label = if n == 2 { format!("sqrt({q})") } else { format!("root({n}, {q})") };
    if let Some(r) = exact_nth_root(&q, n) {
        return Ok(rooted(label, r));
    }
    let radicand = q.clone();
    let refiner = Memo::new(move |k: u64| -> Result<RInterval> {
        // ⌊q^(1/n) · 2^k⌋ = ⌊ ⌊q · 2^(nk)⌋^(1/n) ⌋
        let scaled: BigInt = (radicand.numer() << (k * u64::from(n))) / radicand.denom();
        let a = scaled.nth_root(n);
        Ok(RInterval::new(dyadic(a.clone(), k), dyadic(a + BigInt::one(), k)))
    });
    Ok(Oracle::builder(label, refiner)
        .locator(move |c: &Rational| {
            if !c.is_positive() {
                Hint::Exact(Ordering::Greater)
            } else {
                Hint::Exact(cmp(&q, &pow(c, n)))
            }
        })
        .build())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(q: &Rational) -> Sign {
        if q.is_zero() {
            Sign::Zero
        } else if q.is_positive() {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }
}

/// Exact sign of a function at rational points.
#[derive(Clone)]
pub struct SignFunction {
    pub eval_sign: Arc<dyn Fn(&Rational) -> Sign + Send + Sync>,
    pub description: String,
}

impl SignFunction {
    pub fn new(
        description: impl Into<String>,
        eval_sign: impl Fn(&Rational) -> Sign + Send + Sync + 'static,
    ) -> Self {
        SignFunction { eval_sign: Arc::new(eval_sign), description: description.into() }
    }

    /// Polynomial with coefficients listed from the constant term up.
    pub fn polynomial(coeffs: Vec<Rational>) -> Self {
        let description = poly_text(&coeffs);
        SignFunction::new(description, move |x| Sign::of(&horner(&coeffs, x)))
    }

    pub fn sign(&self, x: &Rational) -> Sign {
        (self.eval_sign)(x)
    }
}

impl fmt::Debug for SignFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SignFunction").field("description", &self.description).finish()
    }
}

pub(crate) fn horner(coeffs: &[Rational], x: &Rational) -> Rational {
    coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

pub(crate) fn poly_text(coeffs: &[Rational]) -> String {
    let terms: Vec<String> = coeffs.iter().map(ToString::to_string).collect();
    format!("poly[{}]", terms.join(", "))
}

/// The zero of `f` bracketed by `a` and `b`.
///
/// `f` must change sign exactly once between `a` and `b`. Inside the bracket
/// an interval `x:y` is Yes exactly when `sign f(x) · sign f(y) ≤ 0`; level `k`
/// is the `k`-th midpoint bisection of the bracket. A zero sign at a probed
/// rational becomes the oracle's root.
pub fn ivt_oracle(f: SignFunction, a: Rational, b: Rational) -> Result<Oracle> {
    let bracket = RInterval::new(a, b);
    let (lo, hi) = (bracket.lo().clone(), bracket.hi().clone());
    let label = format!("zero of {} on {}", f.description, bracket);
    let (s_lo, s_hi) = (f.sign(&lo), f.sign(&hi));
    if s_lo == Sign::Zero {
        return Ok(rooted(label, lo));
    }
    if s_hi == Sign::Zero {
        return Ok(rooted(label, hi));
    }
    if s_lo == s_hi {
        return Err(OracleError::InvalidBracket { lo, hi });
    }

    let step_f = f.clone();
    let refiner = Sequential::new(bracket.clone(), move |prev: &RInterval, _k| {
        let mid = prev.midpoint();
        let s = step_f.sign(&mid);
        Ok(if s == Sign::Zero {
            RInterval::singleton(mid)
        } else if s == s_lo {
            RInterval::new(mid, prev.hi().clone())
        } else {
            RInterval::new(prev.lo().clone(), mid)
        })
    });
    Ok(Oracle::builder(label, refiner)
        .locator(move |c: &Rational| {
            if cmp(c, &lo) != Ordering::Greater {
                return Hint::Exact(Ordering::Greater);
            }
            if cmp(c, &hi) != Ordering::Less {
                return Hint::Exact(Ordering::Less);
            }
            match f.sign(c) {
                Sign::Zero => Hint::Exact(Ordering::Equal),
                s if s == s_lo => Hint::Exact(Ordering::Greater),
                _ => Hint::Exact(Ordering::Less),
            }
        })
        .build())
}

fn rooted(label: String, r: Rational) -> Oracle {
    let point = RInterval::singleton(r.clone());
    let target = r.clone();
    Oracle::builder(label, move |_k: u64| Ok(point.clone()))
        .root(r)
        .locator(move |c: &Rational| Hint::Exact(cmp(&target, c)))
        .build()
}

type TermFn = dyn Fn(u64) -> Rational + Send + Sync;
type ModulusFn = dyn Fn(&Rational) -> u64 + Send + Sync;

/// A Cauchy sequence with a modulus of convergence.
#[derive(Clone)]
pub struct CauchySpec {
    pub term: Arc<TermFn>,
    /// For `ε > 0`, an index `N` such that all terms from `N` on are within `ε`
    /// of each other. Must be monotone in `ε`.
    pub modulus: Arc<ModulusFn>,
    /// The limit, when it is a known rational.
    pub known_limit: Option<Rational>,
}

impl CauchySpec {
    pub fn new(
        term: impl Fn(u64) -> Rational + Send + Sync + 'static,
        modulus: impl Fn(&Rational) -> u64 + Send + Sync + 'static,
    ) -> Self {
        CauchySpec { term: Arc::new(term), modulus: Arc::new(modulus), known_limit: None }
    }

    pub fn with_limit(mut self, limit: Rational) -> Self {
        self.known_limit = Some(limit);
        self
    }

    /// The enclosure `term(N(ε)) ± ε` at `ε = 2⁻ʲ`.
    pub fn enclosure(&self, j: u64) -> RInterval {
        let eps = half_pow(j);
        let t = (self.term)((self.modulus)(&eps));
        RInterval::new(&t - &eps, &t + &eps)
    }
}

/// The limit of a Cauchy sequence: Yes intervals are those containing a tail.
pub fn cauchy_oracle(spec: CauchySpec) -> Result<Oracle> {
    let enclosures = spec.clone();
    let mut src = FonsiSource::new(move |j| Ok(enclosures.enclosure(j)));
    if let Some(limit) = spec.known_limit {
        src = src.with_root(limit);
    }
    oracle_from_fonsi_labeled(src, "cauchy limit")
}

/// A set given by its upper bounds: `is_ub(u)` says whether `u` bounds the set.
#[derive(Clone)]
pub struct UpperBoundTest {
    pub is_ub: Arc<dyn Fn(&Rational) -> bool + Send + Sync>,
    /// A point known to be at most the least upper bound.
    pub seed_member: Rational,
    /// A known upper bound.
    pub seed_bound: Rational,
}

impl UpperBoundTest {
    pub fn new(
        is_ub: impl Fn(&Rational) -> bool + Send + Sync + 'static,
        seed_member: Rational,
        seed_bound: Rational,
    ) -> Self {
        UpperBoundTest { is_ub: Arc::new(is_ub), seed_member, seed_bound }
    }
}

/// The least upper bound of the set described by `t`.
///
/// `a:b` is Yes when `b` is an upper bound and `a` is not. Level `k` bisects
/// `seed_member:seed_bound` `k` times, keeping a non-bound on the left and a
/// bound on the right, so the lub lies in `(lo, hi]` of every level. A singleton
/// query at the lub stays `Exhausted` unless the lub is the seed member.
pub fn lub_oracle(t: UpperBoundTest) -> Result<Oracle> {
    let is_ub = Arc::clone(&t.is_ub);
    if !is_ub(&t.seed_bound) {
        return Err(OracleError::InvalidBounds(format!(
            "seed bound {} is not an upper bound",
            t.seed_bound
        )));
    }
    if t.seed_member > t.seed_bound {
        return Err(OracleError::InvalidBounds(format!(
            "seed member {} exceeds seed bound {}",
            t.seed_member, t.seed_bound
        )));
    }
    if is_ub(&t.seed_member) {
        // a member that bounds the set is its maximum
        return Ok(rooted("least upper bound".into(), t.seed_member));
    }
    let step_ub = Arc::clone(&is_ub);
    let refiner = Sequential::new(
        RInterval::new(t.seed_member, t.seed_bound),
        move |prev: &RInterval, _k| {
            let mid = midpoint(prev.lo(), prev.hi());
            Ok(if step_ub(&mid) {
                RInterval::new(prev.lo().clone(), mid)
            } else {
                RInterval::new(mid, prev.hi().clone())
            })
        },
    );
    Ok(Oracle::builder("least upper bound", refiner)
        .locator(move |c: &Rational| {
            if is_ub(c) {
                Hint::AtMost
            } else {
                Hint::Exact(Ordering::Greater)
            }
        })
        .build())
}
