//! Arithmetic and ordering on oracles.
//!
//! A derived oracle's level `k` is the interval-arithmetic image of its
//! operands' level-`k` intervals, so it is nested whenever they are. When all
//! operands have known roots the result is the rational oracle of the exact
//! result instead.

use std::cmp::Ordering;
use std::fmt;

use crate::constructors::rational_oracle;
use crate::error::{OracleError, Result};
use crate::oracle::{Budget, Memo, Oracle, Position, QueryResult};
use crate::rational::cmp;
use crate::{RInterval, Rational};

/// Levels inspected when checking that a reciprocal's witness is a Yes interval.
pub const WITNESS_BUDGET: Budget = Budget::new(1024);

fn unary(label: String, x: &Oracle, f: impl Fn(&RInterval) -> Result<RInterval> + Send + Sync + 'static) -> Oracle {
    let x = x.clone();
    Oracle::builder(label, Memo::new(move |k| f(&x.level(k)?))).build()
}

fn binary(
    label: String,
    x: &Oracle,
    y: &Oracle,
    f: impl Fn(&RInterval, &RInterval) -> RInterval + Send + Sync + 'static,
) -> Oracle {
    let (x, y) = (x.clone(), y.clone());
    Oracle::builder(label, Memo::new(move |k| Ok(f(&x.level(k)?, &y.level(k)?)))).build()
}

pub fn o_neg(x: &Oracle) -> Oracle {
    if let Some(r) = x.root() {
        return rational_oracle(-r);
    }
    unary(format!("-({x})"), x, |i| Ok(i.neg()))
}

pub fn o_add(x: &Oracle, y: &Oracle) -> Oracle {
    if let (Some(a), Some(b)) = (x.root(), y.root()) {
        return rational_oracle(a + b);
    }
    binary(format!("({x} + {y})"), x, y, |i, j| i.add(j))
}

pub fn o_sub(x: &Oracle, y: &Oracle) -> Oracle {
    if let (Some(a), Some(b)) = (x.root(), y.root()) {
        return rational_oracle(a - b);
    }
    binary(format!("({x} - {y})"), x, y, |i, j| i.sub(j))
}

pub fn o_mul(x: &Oracle, y: &Oracle) -> Oracle {
    if let (Some(a), Some(b)) = (x.root(), y.root()) {
        return rational_oracle(a * b);
    }
    binary(format!("({x} * {y})"), x, y, |i, j| i.mul(j))
}

pub fn o_abs(x: &Oracle) -> Oracle {
    if let Some(r) = x.root() {
        return rational_oracle(num_traits::Signed::abs(&r));
    }
    unary(format!("|{x}|"), x, |i| Ok(i.abs()))
}

/// `1/x`, given a Yes interval of `x` that excludes zero.
///
/// Level `k` is the reciprocal of `x`'s level `k` clipped to the witness.
pub fn o_recip(x: &Oracle, witness: &RInterval) -> Result<Oracle> {
    let invalid = |reason: String| OracleError::ZeroWitnessInvalid { witness: witness.clone(), reason };
    if witness.contains_zero() {
        return Err(invalid("the witness contains zero".into()));
    }
    match x.decide(witness, WITNESS_BUDGET)? {
        QueryResult::Yes => {}
        QueryResult::No => return Err(invalid(format!("not a Yes interval of {x}"))),
        QueryResult::Exhausted => {
            return Err(invalid(format!(
                "could not confirm it as a Yes interval of {x} within {} levels",
                WITNESS_BUDGET.steps
            )))
        }
    }
    if let Some(r) = x.root() {
        return Ok(rational_oracle(Rational::from_integer(1.into()) / r));
    }
    let w = witness.clone();
    Ok(unary(format!("recip({x})"), x, move |i| {
        let clipped = i.intersection(&w).ok_or_else(|| OracleError::ZeroWitnessInvalid {
            witness: w.clone(),
            reason: format!("refinement {i} left the witness"),
        })?;
        RInterval::arith(crate::ArithOp::Recip, &clipped, None)
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CompareResult {
    Less,
    Greater,
    /// Both roots are known and equal.
    EqualKnown,
    /// No disjoint pair of Yes intervals was found within the budget.
    Undecided,
}

impl fmt::Display for CompareResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CompareResult::Less => "Less",
            CompareResult::Greater => "Greater",
            CompareResult::EqualKnown => "EqualKnown",
            CompareResult::Undecided => "Undecided",
        })
    }
}

fn against_root(y: &Oracle, r: &Rational, flip: bool) -> Result<Option<CompareResult>> {
    // budget zero: only roots and exact locators answer
    let pos = y.locate(r, Budget::ZERO)?;
    let (less, greater) = if flip {
        (CompareResult::Less, CompareResult::Greater)
    } else {
        (CompareResult::Greater, CompareResult::Less)
    };
    Ok(match pos {
        // y < r
        Position::Less => Some(less),
        Position::Greater => Some(greater),
        Position::Equal => Some(CompareResult::EqualKnown),
        Position::Exhausted => None,
    })
}

/// Orders `x` against `y` by searching for disjoint Yes intervals.
pub fn compare(x: &Oracle, y: &Oracle, budget: Budget) -> Result<CompareResult> {
    if let Some(decided) = compare_roots(x, y)? {
        return Ok(decided);
    }
    for k in budget.schedule() {
        let (i, j) = (x.level(k)?, y.level(k)?);
        if cmp(i.hi(), j.lo()) == Ordering::Less {
            return Ok(CompareResult::Less);
        }
        if cmp(j.hi(), i.lo()) == Ordering::Less {
            return Ok(CompareResult::Greater);
        }
        if let Some(decided) = compare_roots(x, y)? {
            return Ok(decided);
        }
    }
    Ok(CompareResult::Undecided)
}

fn compare_roots(x: &Oracle, y: &Oracle) -> Result<Option<CompareResult>> {
    match (x.root(), y.root()) {
        (Some(a), Some(b)) => Ok(Some(match cmp(&a, &b) {
            Ordering::Less => CompareResult::Less,
            Ordering::Equal => CompareResult::EqualKnown,
            Ordering::Greater => CompareResult::Greater,
        })),
        // x = a; y against a
        (Some(a), None) => against_root(y, &a, false),
        (None, Some(b)) => against_root(x, &b, true),
        (None, None) => Ok(None),
    }
    .map(|r| match r {
        // a locator hit only means equality when both roots are now known
        Some(CompareResult::EqualKnown) if x.root().is_none() || y.root().is_none() => None,
        other => other,
    })
}
