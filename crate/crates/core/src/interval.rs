//! Inclusive intervals `a:b` and their exact interval arithmetic.
//!
//! Construction is order-free: `Interval::new(2, 1)` is `1:2`. A singleton
//! `a:a` is an ordinary interval. There are no open or half-open intervals.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Neg;
use std::str::FromStr;

use num_traits::Num;

use crate::error::{OracleError, Result};
use crate::rational::parse_rational;
use crate::{RInterval, Rational};

/// An exact ordered field: every operation the interval kernels need,
/// without any rounding.
pub trait Scalar: Clone + PartialOrd + Num + Neg<Output = Self> {
    /// The total order the kernels compare with.
    fn order(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).expect("scalars are totally ordered")
    }
}

macro_rules! plain_scalar {
    ($($t:ty),*) => { $(impl Scalar for $t {})* };
}

plain_scalar!(i8, i16, i32, i64, i128, isize, num_bigint::BigInt);
plain_scalar!(num_rational::Ratio<i32>, num_rational::Ratio<i64>, num_rational::Ratio<i128>);

impl Scalar for Rational {
    // the default order recurses once per continued fraction term it shares
    fn order(&self, other: &Self) -> Ordering {
        crate::rational::cmp(self, other)
    }
}

fn lt<T: Scalar>(a: &T, b: &T) -> bool {
    a.order(b) == Ordering::Less
}

fn le<T: Scalar>(a: &T, b: &T) -> bool {
    a.order(b) != Ordering::Greater
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval<T> {
    lo: T,
    hi: T,
}

/// How one interval sits relative to another, from the first one's point of view.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Subset,
    Superset,
    Equal,
    OverlapOnly,
    Disjoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Neg,
    Mul,
    Recip,
}

fn min_of<T: Scalar>(a: T, b: T) -> T {
    if lt(&b, &a) {
        b
    } else {
        a
    }
}

fn max_of<T: Scalar>(a: T, b: T) -> T {
    if lt(&a, &b) {
        b
    } else {
        a
    }
}

impl<T: Scalar> Interval<T> {
    pub fn new(x: T, y: T) -> Self {
        if lt(&y, &x) {
            Interval { lo: y, hi: x }
        } else {
            Interval { lo: x, hi: y }
        }
    }

    pub fn singleton(x: T) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn lo(&self) -> &T {
        &self.lo
    }

    pub fn hi(&self) -> &T {
        &self.hi
    }

    pub fn into_bounds(self) -> (T, T) {
        (self.lo, self.hi)
    }

    pub fn width(&self) -> T {
        self.hi.clone() - self.lo.clone()
    }

    pub fn is_singleton(&self) -> bool {
        self.lo.order(&self.hi) == Ordering::Equal
    }

    pub fn midpoint(&self) -> T {
        (self.lo.clone() + self.hi.clone()) / (T::one() + T::one())
    }

    pub fn contains(&self, q: &T) -> bool {
        le(&self.lo, q) && le(q, &self.hi)
    }

    /// `q` lies strictly between the endpoints.
    pub fn contains_interior(&self, q: &T) -> bool {
        lt(&self.lo, q) && lt(q, &self.hi)
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        le(&other.lo, &self.lo) && le(&self.hi, &other.hi)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        lt(&self.hi, &other.lo) || lt(&other.hi, &self.lo)
    }

    pub fn relate(&self, other: &Self) -> Relation {
        if self.is_disjoint(other) {
            return Relation::Disjoint;
        }
        match (self.is_subset_of(other), other.is_subset_of(self)) {
            (true, true) => Relation::Equal,
            (true, false) => Relation::Subset,
            (false, true) => Relation::Superset,
            (false, false) => Relation::OverlapOnly,
        }
    }

    pub fn intersection(&self, other: &Self) -> Option<Self> {
        if self.is_disjoint(other) {
            None
        } else {
            Some(Interval {
                lo: max_of(self.lo.clone(), other.lo.clone()),
                hi: min_of(self.hi.clone(), other.hi.clone()),
            })
        }
    }

    /// Smallest interval containing both.
    pub fn hull(&self, other: &Self) -> Self {
        Interval {
            lo: min_of(self.lo.clone(), other.lo.clone()),
            hi: max_of(self.hi.clone(), other.hi.clone()),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Interval {
            lo: self.lo.clone() + other.lo.clone(),
            hi: self.hi.clone() + other.hi.clone(),
        }
    }

    pub fn neg(&self) -> Self {
        Interval {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let products = [
            self.lo.clone() * other.lo.clone(),
            self.lo.clone() * other.hi.clone(),
            self.hi.clone() * other.lo.clone(),
            self.hi.clone() * other.hi.clone(),
        ];
        let mut lo = products[0].clone();
        let mut hi = products[0].clone();
        for p in &products[1..] {
            if lt(p, &lo) {
                lo = p.clone();
            }
            if lt(&hi, p) {
                hi = p.clone();
            }
        }
        Interval { lo, hi }
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&T::zero())
    }

    pub fn abs(&self) -> Self {
        let zero = T::zero();
        if le(&zero, &self.lo) {
            self.clone()
        } else if le(&self.hi, &zero) {
            self.neg()
        } else {
            Interval {
                lo: zero,
                hi: max_of(-self.lo.clone(), self.hi.clone()),
            }
        }
    }

    /// Largest absolute value of any member.
    pub fn magnitude(&self) -> T {
        self.abs().hi
    }
}

impl<T: Scalar> Interval<T> {
    /// `1/I`, defined only when `0 ∉ I`.
    pub fn recip(&self) -> std::result::Result<Self, ZeroInInterval<T>> {
        if self.contains_zero() {
            return Err(ZeroInInterval(self.clone()));
        }
        Ok(Interval {
            lo: T::one() / self.hi.clone(),
            hi: T::one() / self.lo.clone(),
        })
    }
}

/// Error of [`Interval::recip`] for a zero-straddling interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroInInterval<T>(pub Interval<T>);

impl RInterval {
    /// Dispatches one interval-arithmetic kernel. `Add` and `Mul` need `other`.
    pub fn arith(op: ArithOp, first: &RInterval, other: Option<&RInterval>) -> Result<RInterval> {
        match op {
            ArithOp::Add => Ok(first.add(other.ok_or(OracleError::MissingOperand("Add"))?)),
            ArithOp::Mul => Ok(first.mul(other.ok_or(OracleError::MissingOperand("Mul"))?)),
            ArithOp::Neg => Ok(first.neg()),
            ArithOp::Recip => first
                .recip()
                .map_err(|ZeroInInterval(i)| OracleError::ZeroInDenominator(i)),
        }
    }
}

impl<T: fmt::Display> fmt::Display for Interval<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("expected an interval of the form LO:HI with rational endpoints, got {0:?}")]
pub struct ParseIntervalError(pub String);

impl FromStr for RInterval {
    type Err = ParseIntervalError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let err = || ParseIntervalError(s.to_string());
        let (a, b) = s.split_once(':').ok_or_else(err)?;
        let lo: Rational = parse_rational(a).ok_or_else(err)?;
        let hi: Rational = parse_rational(b).ok_or_else(err)?;
        Ok(Interval::new(lo, hi))
    }
}
