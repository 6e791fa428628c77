//! The oracle abstraction.
//!
//! An [`Oracle`] is driven by a [`Refiner`]: a deterministic sequence of Yes
//! intervals, each nested in the previous one, whose widths tend to zero.
//! `decide`, `refine` and `locate` are derived from it, with two shortcuts:
//! a known root answers every query exactly, and an exact locator (available
//! for rationals, n-th roots and sign-bracketed zeros) compares the number
//! against any rational without refining.
//!
//! A [`Budget`] of `n` steps lets a query look at refinement levels `0..n`.
//! Because levels are nested, the answer a query gives is the answer of the
//! deepest level it may inspect, so raising the budget can turn `Exhausted`
//! into `Yes` or `No` but never flips a definitive answer.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{OracleError, Result};
use crate::{RInterval, Rational};

/// Maximum number of refinement levels one query may inspect.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Budget {
    pub steps: u64,
}

impl Budget {
    pub const ZERO: Budget = Budget { steps: 0 };

    pub const fn new(steps: u64) -> Self {
        Budget { steps }
    }

    /// Levels probed by a query: `0, 1, 2, 4, 8, …` and finally `steps - 1`.
    pub fn schedule(self) -> impl Iterator<Item = u64> {
        let last = self.steps.checked_sub(1);
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let last = last?;
            let current = next?;
            if current >= last {
                next = None;
                return Some(last);
            }
            next = Some(if current == 0 { 1 } else { current.saturating_mul(2) });
            Some(current)
        })
    }
}

impl From<u64> for Budget {
    fn from(steps: u64) -> Self {
        Budget { steps }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QueryResult {
    Yes,
    No,
    Exhausted,
}

impl QueryResult {
    pub fn is_definitive(self) -> bool {
        !matches!(self, QueryResult::Exhausted)
    }

    pub fn from_bool(yes: bool) -> Self {
        if yes {
            QueryResult::Yes
        } else {
            QueryResult::No
        }
    }
}

impl fmt::Display for QueryResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QueryResult::Yes => "Yes",
            QueryResult::No => "No",
            QueryResult::Exhausted => "Exhausted",
        })
    }
}

/// Position of an oracle's number relative to a rational `c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Position {
    /// The number is below `c`.
    Less,
    /// The number is `c`, which is therefore its root.
    Equal,
    /// The number is above `c`.
    Greater,
    Exhausted,
}

impl From<Ordering> for Position {
    fn from(o: Ordering) -> Self {
        match o {
            Ordering::Less => Position::Less,
            Ordering::Equal => Position::Equal,
            Ordering::Greater => Position::Greater,
        }
    }
}

/// Answer of a locator, comparing the number against a rational `c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Hint {
    Exact(Ordering),
    /// The number is `≤ c`, but whether it equals `c` is unknown.
    AtMost,
    Unknown,
}

/// The operational core of an oracle: nested Yes intervals shrinking to the number.
///
/// Implementations must be deterministic. `level(k + 1)` must be a subset of
/// `level(k)`, and widths must tend to zero.
pub trait Refiner: Send + Sync {
    fn level(&self, level: u64) -> Result<RInterval>;
}

impl<F> Refiner for F
where
    F: Fn(u64) -> Result<RInterval> + Send + Sync,
{
    fn level(&self, level: u64) -> Result<RInterval> {
        self(level)
    }
}

/// Memoizes a refiner whose levels can be computed independently.
pub(crate) struct Memo<R> {
    inner: R,
    cache: Mutex<HashMap<u64, RInterval>>,
}

impl<R: Refiner> Memo<R> {
    pub(crate) fn new(inner: R) -> Self {
        Memo { inner, cache: Mutex::new(HashMap::new()) }
    }
}

impl<R: Refiner> Refiner for Memo<R> {
    fn level(&self, level: u64) -> Result<RInterval> {
        if let Some(hit) = self.cache.lock().expect("refiner cache poisoned").get(&level) {
            return Ok(hit.clone());
        }
        let interval = self.inner.level(level)?;
        self.cache
            .lock()
            .expect("refiner cache poisoned")
            .insert(level, interval.clone());
        Ok(interval)
    }
}

type StepFn = dyn Fn(&RInterval, u64) -> Result<RInterval> + Send + Sync;

/// A refiner where level `k` is computed from level `k - 1`.
pub(crate) struct Sequential {
    levels: Mutex<Vec<RInterval>>,
    step: Box<StepFn>,
}

impl Sequential {
    /// `step(previous, k)` produces level `k` from level `k - 1`.
    pub(crate) fn new(
        initial: RInterval,
        step: impl Fn(&RInterval, u64) -> Result<RInterval> + Send + Sync + 'static,
    ) -> Self {
        Sequential { levels: Mutex::new(vec![initial]), step: Box::new(step) }
    }
}

impl Refiner for Sequential {
    fn level(&self, level: u64) -> Result<RInterval> {
        let mut levels = self.levels.lock().expect("refiner cache poisoned");
        while (levels.len() as u64) <= level {
            let k = levels.len() as u64;
            let previous = levels.last().expect("initial level present");
            let next = if previous.is_singleton() {
                previous.clone()
            } else {
                (self.step)(previous, k)?
            };
            levels.push(next);
        }
        Ok(levels[level as usize].clone())
    }
}

type LocatorFn = dyn Fn(&Rational) -> Hint + Send + Sync;
type RuleFn = dyn Fn(&RInterval, Budget) -> QueryResult + Send + Sync;

struct Inner {
    label: String,
    refiner: Box<dyn Refiner>,
    root: OnceLock<Rational>,
    locator: Option<Box<LocatorFn>>,
    rule: Option<Box<RuleFn>>,
}

/// A real number. Cloning is cheap; clones share refinement caches.
#[derive(Clone)]
pub struct Oracle(Arc<Inner>);

pub struct OracleBuilder {
    label: String,
    refiner: Box<dyn Refiner>,
    root: Option<Rational>,
    locator: Option<Box<LocatorFn>>,
    rule: Option<Box<RuleFn>>,
}

impl OracleBuilder {
    pub fn root(mut self, root: Rational) -> Self {
        self.root = Some(root);
        self
    }

    /// An exact or partial comparator of the number against any rational.
    pub fn locator(mut self, f: impl Fn(&Rational) -> Hint + Send + Sync + 'static) -> Self {
        self.locator = Some(Box::new(f));
        self
    }

    /// Replaces the derived decision procedure with an explicit rule.
    ///
    /// The rule is trusted as given; use it for rules under test.
    pub fn rule(
        mut self,
        f: impl Fn(&RInterval, Budget) -> QueryResult + Send + Sync + 'static,
    ) -> Self {
        self.rule = Some(Box::new(f));
        self
    }

    pub fn build(self) -> Oracle {
        let root = OnceLock::new();
        if let Some(r) = self.root {
            let _ = root.set(r);
        }
        Oracle(Arc::new(Inner {
            label: self.label,
            refiner: self.refiner,
            root,
            locator: self.locator,
            rule: self.rule,
        }))
    }
}

impl Oracle {
    pub fn builder(label: impl Into<String>, refiner: impl Refiner + 'static) -> OracleBuilder {
        OracleBuilder {
            label: label.into(),
            refiner: Box::new(refiner),
            root: None,
            locator: None,
            rule: None,
        }
    }

    pub fn label(&self) -> &str {
        &self.0.label
    }

    /// The root when it is known: given at construction, or discovered by a
    /// locator hit or a singleton refinement. `None` means "no root known",
    /// not "irrational".
    pub fn root(&self) -> Option<Rational> {
        self.0.root.get().cloned()
    }

    pub fn is_rooted(&self) -> Option<Rational> {
        self.root()
    }

    fn record_root(&self, q: &Rational) {
        if self.0.rule.is_none() {
            let _ = self.0.root.set(q.clone());
        }
    }

    /// The Yes interval at refinement level `k`.
    pub fn level(&self, k: u64) -> Result<RInterval> {
        let interval = self.0.refiner.level(k)?;
        if interval.is_singleton() {
            self.record_root(interval.lo());
        }
        Ok(interval)
    }

    fn hint(&self, c: &Rational) -> Hint {
        match &self.0.locator {
            Some(locator) => {
                let h = locator(c);
                if h == Hint::Exact(Ordering::Equal) {
                    self.record_root(c);
                }
                h
            }
            None => Hint::Unknown,
        }
    }

    /// Does the number lie in `interval`?
    pub fn decide(&self, interval: &RInterval, budget: Budget) -> Result<QueryResult> {
        if let Some(rule) = &self.0.rule {
            return Ok(rule(interval, budget));
        }
        if let Some(root) = self.root() {
            return Ok(QueryResult::from_bool(interval.contains(&root)));
        }
        if self.0.locator.is_some() {
            let below = self.hint(interval.lo());
            let above = self.hint(interval.hi());
            if below == Hint::Exact(Ordering::Less) || above == Hint::Exact(Ordering::Greater) {
                return Ok(QueryResult::No);
            }
            let at_least_lo = matches!(below, Hint::Exact(Ordering::Greater | Ordering::Equal));
            let at_most_hi = matches!(above, Hint::Exact(Ordering::Less | Ordering::Equal) | Hint::AtMost);
            if at_least_lo && at_most_hi {
                return Ok(QueryResult::Yes);
            }
            if let Some(root) = self.root() {
                return Ok(QueryResult::from_bool(interval.contains(&root)));
            }
        }
        for k in budget.schedule() {
            let level = self.level(k)?;
            if level.is_subset_of(interval) {
                return Ok(QueryResult::Yes);
            }
            if level.is_disjoint(interval) {
                return Ok(QueryResult::No);
            }
        }
        Ok(QueryResult::Exhausted)
    }

    /// A Yes interval of width at most `width` (the shallowest level that
    /// qualifies), or `None` when the budget runs out first.
    pub fn refine(&self, width: &Rational, budget: Budget) -> Result<Option<RInterval>> {
        if budget.steps == 0 {
            return Ok(None);
        }
        if let Some(root) = self.root() {
            return Ok(Some(RInterval::singleton(root)));
        }
        let mut below: Option<u64> = None;
        for k in budget.schedule() {
            let level = self.level(k)?;
            if level.width() <= *width {
                // binary search for the shallowest qualifying level in (below, k]
                let (mut lo, mut hi, mut best) = (below.map_or(0, |b| b + 1), k, level);
                while lo < hi {
                    let mid = lo + (hi - lo) / 2;
                    let candidate = self.level(mid)?;
                    if candidate.width() <= *width {
                        hi = mid;
                        best = candidate;
                    } else {
                        lo = mid + 1;
                    }
                }
                return Ok(Some(best));
            }
            below = Some(k);
        }
        Ok(None)
    }

    /// Position of the number relative to `c`.
    pub fn locate(&self, c: &Rational, budget: Budget) -> Result<Position> {
        if self.0.rule.is_none() {
            if let Some(root) = self.root() {
                return Ok(crate::rational::cmp(&root, c).into());
            }
            match self.hint(c) {
                Hint::Exact(o) => return Ok(o.into()),
                Hint::AtMost | Hint::Unknown => {}
            }
        }
        for k in budget.schedule() {
            let level = self.level(k)?;
            if crate::rational::cmp(c, level.lo()) == Ordering::Less {
                return Ok(Position::Greater);
            }
            if crate::rational::cmp(c, level.hi()) == Ordering::Greater {
                return Ok(Position::Less);
            }
            if level.is_singleton() {
                return Ok(Position::Equal);
            }
        }
        Ok(Position::Exhausted)
    }

    /// This oracle's refinement levels as a fonsi.
    pub fn as_fonsi(&self) -> FonsiSource {
        let me = self.clone();
        FonsiSource::new(move |k| me.level(k))
    }
}

impl fmt::Debug for Oracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Oracle")
            .field("label", &self.0.label)
            .field("root", &self.0.root.get())
            .finish_non_exhaustive()
    }
}

impl fmt::Display for Oracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.label)
    }
}

type EnumeratorFn = dyn Fn(u64) -> Result<RInterval> + Send + Sync;

/// A family of pairwise-intersecting intervals with members of arbitrarily
/// small width, enumerated by index.
#[derive(Clone)]
pub struct FonsiSource {
    pub enumerator: Arc<EnumeratorFn>,
    /// A rational known to lie in every member; supplies the singleton that
    /// no finite intersection may reach.
    pub claimed_root: Option<Rational>,
}

impl FonsiSource {
    pub fn new(enumerator: impl Fn(u64) -> Result<RInterval> + Send + Sync + 'static) -> Self {
        FonsiSource { enumerator: Arc::new(enumerator), claimed_root: None }
    }

    pub fn with_root(mut self, root: Rational) -> Self {
        self.claimed_root = Some(root);
        self
    }
}

/// The oracle whose Yes intervals are those containing a finite intersection
/// of the family's members (plus the claimed root's singleton, if any).
///
/// Level `k` is the running intersection of members `0..=k`. The first two
/// members are pulled eagerly so that an obviously disjoint pair fails here;
/// later disjoint pairs surface as [`OracleError::InvalidFonsi`] from queries.
pub fn oracle_from_fonsi(src: FonsiSource) -> Result<Oracle> {
    oracle_from_fonsi_labeled(src, "fonsi")
}

pub(crate) fn oracle_from_fonsi_labeled(src: FonsiSource, label: &str) -> Result<Oracle> {
    let first = (src.enumerator)(0)?;
    let claimed = src.claimed_root.clone();
    if let Some(r) = &claimed {
        if !first.contains(r) {
            return Err(OracleError::InvalidFonsi(format!(
                "claimed root {r} is outside member 0 = {first}"
            )));
        }
    }
    let enumerator = Arc::clone(&src.enumerator);
    let step = move |previous: &RInterval, k: u64| -> Result<RInterval> {
        let member = enumerator(k)?;
        let next = previous.intersection(&member).ok_or_else(|| {
            OracleError::InvalidFonsi(format!(
                "member {k} = {member} is disjoint from the intersection of earlier members {previous}"
            ))
        })?;
        if let Some(r) = &claimed {
            if !next.contains(r) {
                return Err(OracleError::InvalidFonsi(format!(
                    "claimed root {r} is outside member {k} = {member}"
                )));
            }
        }
        Ok(next)
    };
    let refiner = Sequential::new(first, step);
    refiner.level(1)?;
    let mut builder = Oracle::builder(label, refiner);
    if let Some(r) = src.claimed_root {
        builder = builder.root(r);
    }
    Ok(builder.build())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::{nth_root_oracle, rational_oracle};
    use crate::rational::{int, rat};
    use crate::Interval;

    fn iv(a: Rational, b: Rational) -> RInterval {
        Interval::new(a, b)
    }

    const AMPLE: Budget = Budget::new(10_000);

    #[test]
    fn schedule_covers_the_last_level() {
        assert_eq!(Budget::new(0).schedule().count(), 0);
        assert_eq!(Budget::new(1).schedule().collect::<Vec<_>>(), vec![0]);
        assert_eq!(Budget::new(2).schedule().collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(Budget::new(6).schedule().collect::<Vec<_>>(), vec![0, 1, 2, 4, 5]);
        assert_eq!(Budget::new(9).schedule().collect::<Vec<_>>(), vec![0, 1, 2, 4, 8]);
    }

    #[test]
    fn decide_examples() {
        let half = rational_oracle(rat(1, 2));
        assert_eq!(half.decide(&iv(int(0), int(1)), Budget::ZERO), Ok(QueryResult::Yes));
        assert_eq!(half.decide(&iv(int(2), int(3)), Budget::ZERO), Ok(QueryResult::No));
        let sqrt2 = nth_root_oracle(2, int(2)).unwrap();
        let s = RInterval::singleton(rat(3, 2));
        assert_eq!(sqrt2.decide(&s, Budget::ZERO), Ok(QueryResult::No));
    }

    #[test]
    fn refine_examples() {
        let sqrt2 = nth_root_oracle(2, int(2)).unwrap();
        assert_eq!(sqrt2.refine(&rat(1, 4), AMPLE), Ok(Some(iv(rat(5, 4), rat(3, 2)))));
        let third = rational_oracle(rat(1, 3));
        assert_eq!(third.refine(&rat(1, 1000), AMPLE), Ok(Some(RInterval::singleton(rat(1, 3)))));
        assert_eq!(sqrt2.refine(&rat(1, 1_000_000), Budget::ZERO), Ok(None));
        assert_eq!(third.refine(&rat(1, 1_000_000), Budget::ZERO), Ok(None));
    }

    #[test]
    fn locate_examples() {
        let sqrt2 = nth_root_oracle(2, int(2)).unwrap();
        assert_eq!(sqrt2.locate(&int(1), AMPLE), Ok(Position::Greater));
        assert_eq!(sqrt2.locate(&rat(3, 2), AMPLE), Ok(Position::Less));
        let half = rational_oracle(rat(1, 2));
        assert_eq!(half.locate(&rat(1, 2), Budget::ZERO), Ok(Position::Equal));
    }

    #[test]
    fn is_rooted_examples() {
        assert_eq!(rational_oracle(rat(5, 7)).is_rooted(), Some(rat(5, 7)));
        assert_eq!(nth_root_oracle(2, int(2)).unwrap().is_rooted(), None);
        assert_eq!(nth_root_oracle(2, rat(9, 4)).unwrap().is_rooted(), Some(rat(3, 2)));
    }

    fn shrinking(center: Rational) -> impl Fn(u64) -> Result<RInterval> + Send + Sync {
        move |n| {
            let r = rat(1, n as i64 + 1);
            Ok(iv(&center - &r, &center + &r))
        }
    }

    #[test]
    fn fonsi_with_claimed_root_answers_the_singleton() {
        let o = oracle_from_fonsi(FonsiSource::new(shrinking(int(2))).with_root(int(2))).unwrap();
        assert_eq!(o.decide(&RInterval::singleton(int(2)), AMPLE), Ok(QueryResult::Yes));
        let bare = oracle_from_fonsi(FonsiSource::new(shrinking(int(2)))).unwrap();
        assert_eq!(bare.decide(&RInterval::singleton(int(2)), AMPLE), Ok(QueryResult::Exhausted));
    }

    #[test]
    fn fonsi_first_pull_decides_a_wide_query() {
        let src = FonsiSource::new(|n| Ok(iv(int(1), int(1) + rat(1, n as i64 + 1))));
        let o = oracle_from_fonsi(src).unwrap();
        assert_eq!(o.decide(&iv(int(0), int(3)), Budget::new(1)), Ok(QueryResult::Yes));
    }

    #[test]
    fn disjoint_fonsi_members_are_rejected() {
        let src = FonsiSource::new(|n| Ok(if n == 0 { iv(int(0), int(1)) } else { iv(int(2), int(3)) }));
        assert!(matches!(oracle_from_fonsi(src), Err(OracleError::InvalidFonsi(_))));

        // a later disjoint member surfaces from queries
        let late = FonsiSource::new(|n| {
            Ok(if n < 5 { iv(int(0), int(1) + rat(1, n as i64 + 1)) } else { iv(int(7), int(8)) })
        });
        let o = oracle_from_fonsi(late).unwrap();
        assert!(matches!(o.refine(&rat(1, 100), AMPLE), Err(OracleError::InvalidFonsi(_))));
    }

    #[test]
    fn wrong_claimed_root_is_rejected() {
        let src = FonsiSource::new(shrinking(int(2))).with_root(int(5));
        assert!(matches!(oracle_from_fonsi(src), Err(OracleError::InvalidFonsi(_))));
    }

    #[test]
    fn fonsi_round_trip_is_a_fixed_point() {
        let sqrt2 = nth_root_oracle(2, int(2)).unwrap();
        let again = oracle_from_fonsi(sqrt2.as_fonsi()).unwrap();
        let queries = [
            iv(int(1), int(2)),
            iv(rat(7, 5), rat(3, 2)),
            iv(rat(141, 100), rat(1415, 1000)),
            iv(rat(1414214, 1_000_000), int(2)),
            iv(int(0), rat(14142, 10000)),
            RInterval::singleton(rat(99, 70)),
        ];
        for q in &queries {
            let a = sqrt2.decide(q, Budget::new(200)).unwrap();
            let b = again.decide(q, Budget::new(200)).unwrap();
            if b.is_definitive() {
                assert_eq!(a, b, "{q}");
            }
        }
    }

    #[test]
    fn concurrent_queries_agree() {
        let o = oracle_from_fonsi(FonsiSource::new(shrinking(rat(1, 3)))).unwrap();
        let expected = o.decide(&iv(rat(33, 100), rat(34, 100)), Budget::new(500)).unwrap();
        let handles: Vec<_> = (0..8)
            .map(|_| {
                let o = o.clone();
                std::thread::spawn(move || {
                    o.decide(&iv(rat(33, 100), rat(34, 100)), Budget::new(500)).unwrap()
                })
            })
            .collect();
        for h in handles {
            assert_eq!(h.join().unwrap(), expected);
        }
        assert_eq!(expected, QueryResult::Yes);
    }
}
