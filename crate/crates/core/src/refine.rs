//! Refinement algorithms on top of `decide`/`locate`: midpoint bisection,
//! Stern–Brocot (mediant) descent producing continued fractions and best
//! rational approximations, and certified decimal output.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{OracleError, Result};
use crate::oracle::{Budget, Oracle, Position, QueryResult};
use crate::rational::{int, pow10};
use crate::{RInterval, Rational};

/// One midpoint bisection of the Yes interval `interval`.
///
/// Returns the Yes piece among `lo:mid`, `mid:mid` and `mid:hi`, preferring the
/// singleton when it is Yes.
pub fn bisect_step(o: &Oracle, interval: &RInterval, budget: Budget) -> Result<RInterval> {
    if interval.is_singleton() {
        return Err(OracleError::UnsupportedDomain(format!(
            "cannot bisect the singleton {interval}"
        )));
    }
    let mid = interval.midpoint();
    let point = RInterval::singleton(mid.clone());
    let left = RInterval::new(interval.lo().clone(), mid.clone());
    let right = RInterval::new(mid, interval.hi().clone());
    let answers = [
        (o.decide(&point, budget)?, point),
        (o.decide(&left, budget)?, left),
    ];
    for (answer, piece) in &answers {
        if *answer == QueryResult::Yes {
            return Ok(piece.clone());
        }
    }
    let right_answer = o.decide(&right, budget)?;
    if right_answer == QueryResult::Yes {
        return Ok(right);
    }
    if answers.iter().all(|(a, _)| *a == QueryResult::No) && right_answer == QueryResult::No {
        return Err(OracleError::SeparationViolated(format!(
            "no piece of {interval} split at its midpoint is a Yes interval of {o}"
        )));
    }
    Err(OracleError::BudgetExhausted { spent: budget.steps })
}

/// A continued fraction `[a0; a1, a2, …]` with its convergents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CFExpansion {
    pub terms: Vec<BigInt>,
    pub convergents: Vec<Rational>,
    /// The number was found to be exactly the last convergent.
    pub exact_terminated: bool,
    /// Mediants compared against the number.
    pub steps: u64,
}

impl CFExpansion {
    fn from_terms(terms: Vec<BigInt>, exact_terminated: bool, steps: u64) -> Self {
        let convergents = convergents(&terms);
        CFExpansion { terms, convergents, exact_terminated, steps }
    }
}

/// Convergents `p_k/q_k` of `[a0; a1, …]` by `p_k = a_k p_{k-1} + p_{k-2}`.
pub fn convergents(terms: &[BigInt]) -> Vec<Rational> {
    let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    terms
        .iter()
        .map(|a| {
            let p2 = a * &p1 + &p0;
            let q2 = a * &q1 + &q0;
            (p0, q0) = (std::mem::replace(&mut p1, p2.clone()), std::mem::replace(&mut q1, q2.clone()));
            Rational::new(p2, q2)
        })
        .collect()
}

/// Text form `a0; a1 a2 a3`.
impl fmt::Display for CFExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut it = self.terms.iter();
        if let Some(a0) = it.next() {
            write!(f, "{a0}")?;
            let rest: Vec<String> = it.map(ToString::to_string).collect();
            if !rest.is_empty() {
                write!(f, "; {}", rest.join(" "))?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Turn {
    Left,
    Right,
}

/// Lazily produces continued-fraction terms by Stern–Brocot descent.
struct TermStream<'a> {
    oracle: &'a Oracle,
    budget: Budget,
    state: Option<Descent>,
    finished: bool,
    exact: bool,
    steps: u64,
}

struct Descent {
    left: (BigInt, BigInt),
    right: (BigInt, BigInt),
    turn: Turn,
    run: u64,
    first_run: bool,
}

impl<'a> TermStream<'a> {
    fn new(oracle: &'a Oracle, budget: Budget) -> Self {
        TermStream { oracle, budget, state: None, finished: false, exact: false, steps: 0 }
    }

    fn locate(&self, c: &Rational) -> Result<Position> {
        match self.oracle.locate(c, self.budget)? {
            Position::Exhausted => Err(OracleError::BudgetExhausted { spent: self.budget.steps }),
            p => Ok(p),
        }
    }

    /// Integer part by a linear sweep from the floor of a width-1 enclosure.
    fn integer_part(&mut self) -> Result<BigInt> {
        let start = self
            .oracle
            .refine(&int(1), self.budget)?
            .ok_or(OracleError::BudgetExhausted { spent: self.budget.steps })?;
        let mut n = start.lo().floor().to_integer();
        loop {
            match self.locate(&Rational::from_integer(n.clone()))? {
                Position::Equal => {
                    self.finish(true);
                    return Ok(n);
                }
                Position::Less => n -= 1,
                Position::Greater => {
                    let up = &n + BigInt::one();
                    match self.locate(&Rational::from_integer(up.clone()))? {
                        Position::Less => break,
                        Position::Equal => {
                            self.finish(true);
                            return Ok(up);
                        }
                        _ => n = up,
                    }
                }
                Position::Exhausted => unreachable!("locate maps exhaustion to an error"),
            }
        }
        self.state = Some(Descent {
            left: (n.clone(), BigInt::one()),
            right: (&n + BigInt::one(), BigInt::one()),
            turn: Turn::Left,
            run: 0,
            first_run: true,
        });
        Ok(n)
    }

    fn finish(&mut self, exact: bool) {
        self.finished = true;
        self.exact = exact;
    }

    fn next_term(&mut self) -> Result<Option<BigInt>> {
        if self.finished {
            return Ok(None);
        }
        if self.state.is_none() {
            return self.integer_part().map(Some);
        }
        loop {
            let d = self.state.as_ref().expect("descent started");
            let m = (&d.left.0 + &d.right.0, &d.left.1 + &d.right.1);
            let mediant = Rational::new(m.0.clone(), m.1.clone());
            self.steps += 1;
            let position = self.locate(&mediant)?;
            let d = self.state.as_mut().expect("descent started");
            let turn = match position {
                Position::Equal => {
                    let term = d.run + if d.first_run { 2 } else { 1 };
                    self.finish(true);
                    return Ok(Some(BigInt::from(term)));
                }
                Position::Less => Turn::Left,
                Position::Greater => Turn::Right,
                Position::Exhausted => unreachable!("locate maps exhaustion to an error"),
            };
            match turn {
                Turn::Left => d.right = m,
                Turn::Right => d.left = m,
            }
            if turn == d.turn {
                d.run += 1;
                continue;
            }
            let term = d.run + u64::from(d.first_run);
            d.turn = turn;
            d.run = 1;
            d.first_run = false;
            return Ok(Some(BigInt::from(term)));
        }
    }
}

/// The first `max_terms` continued-fraction terms of `o` (fewer if the
/// number turns out to be rational).
pub fn mediant_expand(o: &Oracle, max_terms: usize, budget: Budget) -> Result<CFExpansion> {
    let mut stream = TermStream::new(o, budget);
    let mut terms = Vec::with_capacity(max_terms);
    while terms.len() < max_terms {
        match stream.next_term()? {
            Some(t) => terms.push(t),
            None => break,
        }
    }
    let exact = stream.exact && stream.finished;
    Ok(CFExpansion::from_terms(terms, exact, stream.steps))
}

/// The rational with denominator at most `max_denominator` closest to `o`.
///
/// Ties go to the smaller denominator, then the smaller numerator.
pub fn best_approx(o: &Oracle, max_denominator: u64, budget: Budget) -> Result<Rational> {
    if max_denominator == 0 {
        return Err(OracleError::UnsupportedDomain("max_denominator must be at least 1".into()));
    }
    let bound = BigInt::from(max_denominator);
    let mut stream = TermStream::new(o, budget);
    let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    let a = loop {
        let Some(a) = stream.next_term()? else {
            // the number is p1/q1 itself
            return Ok(Rational::new(p1, q1));
        };
        let q2 = &a * &q1 + &q0;
        if q2 > bound {
            break a;
        }
        let p2 = &a * &p1 + &p0;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    };
    debug_assert!(a.is_positive());
    let k = (&bound - &q0) / &q1;
    let semi = Rational::new(&p0 + &k * &p1, &q0 + &k * &q1);
    let conv = Rational::new(p1, q1);
    let mid = (&semi + &conv) / int(2);
    let (lower, upper) = if semi < conv { (semi, conv) } else { (conv, semi) };
    Ok(match o.locate(&mid, budget)? {
        Position::Less => lower,
        Position::Greater => upper,
        Position::Equal => {
            if (lower.denom(), lower.numer()) <= (upper.denom(), upper.numer()) {
                lower
            } else {
                upper
            }
        }
        Position::Exhausted => return Err(OracleError::BudgetExhausted { spent: budget.steps }),
    })
}

/// A decimal approximation with a certified error bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecimalEnclosure {
    /// `d.ddd…d ± 1e-N`.
    pub text: String,
    /// The Yes interval the digits were read from.
    pub enclosure: RInterval,
    /// The printed digits are the number's complete decimal expansion.
    pub exact: bool,
}

impl fmt::Display for DecimalEnclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

fn format_scaled(value: &BigInt, negative: bool, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let (whole, frac) = value.abs().div_rem(&scale);
    let sign = if negative { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{whole}")
    } else {
        format!("{sign}{whole}.{frac:0>width$}", width = digits as usize)
    }
}

/// `digits` decimal places of `o`, truncated toward zero, with the bound
/// `± 1e-digits`.
///
/// Refines to width `10^-(digits+2)` and further while the enclosure straddles
/// a digit boundary; reports [`OracleError::BudgetExhausted`] if it still does
/// when the budget runs out.
pub fn to_decimal(o: &Oracle, digits: u32, budget: Budget) -> Result<DecimalEnclosure> {
    let scale = pow10(digits);
    let mut width = Rational::one() / pow10(digits + 2);
    let mut previous: Option<RInterval> = None;
    loop {
        let enclosure = o
            .refine(&width, budget)?
            .ok_or(OracleError::BudgetExhausted { spent: budget.steps })?;
        if previous.as_ref() == Some(&enclosure) {
            return Err(OracleError::BudgetExhausted { spent: budget.steps });
        }
        let (lo, hi) = (enclosure.lo() * &scale, enclosure.hi() * &scale);
        let read = if !lo.is_negative() {
            let (a, b) = (lo.floor(), hi.floor());
            (a == b).then(|| (a.to_integer(), false))
        } else if !hi.is_positive() {
            let (a, b) = (lo.ceil(), hi.ceil());
            (a == b).then(|| (a.to_integer(), !hi.is_zero()))
        } else {
            None
        };
        if let Some((value, negative)) = read {
            let exact = enclosure.is_singleton() && lo.is_integer();
            let text = format!("{} \u{b1} 1e-{digits}", format_scaled(&value, negative, digits));
            return Ok(DecimalEnclosure { text, enclosure, exact });
        }
        previous = Some(enclosure);
        width /= int(16);
    }
}
