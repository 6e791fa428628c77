//! Falsification-oriented checks of the oracle properties.
//!
//! Every property is tested on seeded pseudo-random rational intervals drawn
//! from a denominator-bounded grid around the oracle's first refined
//! interval, mixed with endpoints of its finer refinements so that intervals
//! touching the number are well represented. `Passed` means no counterexample
//! was found; it is never a proof.
//!
//! Universal properties are falsified by a single definitive violation.
//! Existential ones (Existence, Two Point Separation, Narrowing) are falsified
//! only when every candidate interval answered a definitive No.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::oracle::{Budget, Oracle, QueryResult};
use crate::rational::half_pow;
use crate::{RInterval, Rational};

/// Largest denominator of sampled grid points.
const MAX_DENOMINATOR: i64 = 64;
/// Deepest refinement level whose endpoints seed samples.
const MAX_SAMPLE_LEVEL: u64 = 40;
/// Narrowing tries lengths `1, 1/2, …` down to `2^-(MAX_NARROWING - 1)`.
const MAX_NARROWING: u64 = 48;
/// Random probes per length before Narrowing gives up on a length.
const NARROWING_PROBES: usize = 8;
/// Points per window width before rounding to the denominator grid.
const GRID_STEPS: i64 = 4096;
/// Yes intervals kept for the Intersection check.
const POOL: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Property {
    Consistency,
    Existence,
    Closed,
    Rooted,
    Separation,
    TwoPointSeparation,
    Disjointness,
    Narrowing,
    Intersection,
}

impl Property {
    pub const ALL: [Property; 9] = [
        Property::Consistency,
        Property::Existence,
        Property::Closed,
        Property::Rooted,
        Property::Separation,
        Property::TwoPointSeparation,
        Property::Disjointness,
        Property::Narrowing,
        Property::Intersection,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Consistency => "CONSISTENCY",
            Property::Existence => "EXISTENCE",
            Property::Closed => "CLOSED",
            Property::Rooted => "ROOTED",
            Property::Separation => "SEPARATION",
            Property::TwoPointSeparation => "TWO_POINT_SEPARATION",
            Property::Disjointness => "DISJOINTNESS",
            Property::Narrowing => "NARROWING",
            Property::Intersection => "INTERSECTION",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Passed,
    Falsified,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Passed => "Passed",
            Verdict::Falsified => "Falsified",
            Verdict::Inconclusive => "Inconclusive",
        })
    }
}

/// The queries behind a Falsified verdict, with the answers they got.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub note: String,
    pub queries: Vec<(RInterval, QueryResult)>,
    pub budget: Budget,
}

impl Counterexample {
    /// Re-asks every query; true when all answers are reproduced.
    pub fn replay(&self, o: &Oracle) -> bool {
        self.queries.iter().all(|(i, r)| ask(o, i, self.budget) == *r)
    }
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}:", self.note)?;
        for (i, r) in &self.queries {
            write!(f, " {i}={r}")?;
        }
        write!(f, " @budget {}]", self.budget.steps)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    pub property: Property,
    pub verdict: Verdict,
    pub counterexample: Option<Counterexample>,
    pub samples_run: u64,
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.property, self.verdict, self.samples_run)?;
        if let Some(c) = &self.counterexample {
            write!(f, " {c}")?;
        }
        Ok(())
    }
}

/// Runs the nine property checks in [`Property::ALL`] order.
///
/// Deterministic given the arguments. A query that fails with an error is
/// treated like an Exhausted answer: it cannot be judged.
pub fn check_axioms(o: &Oracle, sampler_seed: u64, samples: u64, b: Budget) -> Vec<AxiomReport> {
    let samples = samples.max(1);
    Property::ALL
        .iter()
        .enumerate()
        .map(|(n, &p)| {
            // one stream per property, so reports do not depend on each other
            let mut s = Sampler::new(o, sampler_seed.wrapping_add(n as u64), b);
            let mut t = Tally::new(p, b);
            match p {
                Property::Consistency => consistency(o, &mut s, samples, &mut t),
                Property::Existence => existence(o, &mut s, samples, &mut t),
                Property::Closed => closed(o, &mut t),
                Property::Rooted => rooted(o, &mut s, samples, &mut t),
                Property::Separation => separation(o, &mut s, samples, &mut t),
                Property::TwoPointSeparation => two_point(o, &mut s, samples, &mut t),
                Property::Disjointness => disjointness(o, &mut s, samples, &mut t),
                Property::Narrowing => narrowing(o, &mut s, samples, &mut t),
                Property::Intersection => intersection(o, &mut s, samples, &mut t),
            }
            t.report()
        })
        .collect()
}

fn ask(o: &Oracle, i: &RInterval, b: Budget) -> QueryResult {
    o.decide(i, b).unwrap_or(QueryResult::Exhausted)
}

fn refined(o: &Oracle, width: &Rational, b: Budget) -> Option<RInterval> {
    o.refine(width, b).ok().flatten()
}

struct Tally {
    property: Property,
    budget: Budget,
    run: u64,
    judged: u64,
    vacuous: bool,
    counterexample: Option<Counterexample>,
}

impl Tally {
    fn new(property: Property, budget: Budget) -> Self {
        Tally { property, budget, run: 0, judged: 0, vacuous: false, counterexample: None }
    }

    fn judged(&mut self) {
        self.run += 1;
        self.judged += 1;
    }

    fn unjudged(&mut self) {
        self.run += 1;
    }

    fn falsify(&mut self, note: impl Into<String>, queries: Vec<(RInterval, QueryResult)>) {
        self.judged();
        self.counterexample = Some(Counterexample { note: note.into(), queries, budget: self.budget });
    }

    fn report(self) -> AxiomReport {
        let verdict = if self.counterexample.is_some() {
            Verdict::Falsified
        } else if self.judged > 0 || self.vacuous {
            Verdict::Passed
        } else {
            Verdict::Inconclusive
        };
        AxiomReport { property: self.property, verdict, counterexample: self.counterexample, samples_run: self.run }
    }
}

struct Sampler<'a> {
    o: &'a Oracle,
    rng: ChaCha8Rng,
    budget: Budget,
    lo: Rational,
    hi: Rational,
    root: Option<Rational>,
}

impl<'a> Sampler<'a> {
    fn new(o: &'a Oracle, seed: u64, budget: Budget) -> Self {
        let centre = refined(o, &Rational::one(), budget)
            .or_else(|| o.level(0).ok())
            .unwrap_or_else(|| RInterval::new(-Rational::one(), Rational::one()));
        let span = centre.width().max(Rational::one());
        let two = Rational::from_integer(2.into());
        Sampler {
            o,
            rng: ChaCha8Rng::seed_from_u64(seed),
            budget,
            lo: centre.lo() - &span * &two,
            hi: centre.hi() + &span * &two,
            root: o.root(),
        }
    }

    /// The sampling window, which contains the first refined interval.
    fn window(&self) -> RInterval {
        RInterval::new(self.lo.clone(), self.hi.clone())
    }

    /// `⌊x·d⌋/d` for `x` on a 4096-step grid across the window and a random `d`.
    fn grid_point(&mut self) -> Rational {
        let d = BigInt::from(self.rng.gen_range(1..=MAX_DENOMINATOR));
        let t = self.rng.gen_range(0..=GRID_STEPS);
        // x = (lo.n·hi.d·steps + (hi.n·lo.d − lo.n·hi.d)·t) / (lo.d·hi.d·steps), in integers
        let (a, b, c, e) = (self.lo.numer(), self.lo.denom(), self.hi.numer(), self.hi.denom());
        let start = a * e;
        let num = &start * GRID_STEPS + (c * b - start) * t;
        let den = b * e * GRID_STEPS;
        Rational::new((num * &d).div_floor(&den), d)
    }

    fn near_point(&mut self) -> Rational {
        let deepest = MAX_SAMPLE_LEVEL.min(self.budget.steps.saturating_sub(1));
        let k = self.rng.gen_range(0..=deepest);
        let Ok(level) = self.o.level(k) else {
            return self.grid_point();
        };
        let base = match self.rng.gen_range(0..3) {
            0 => level.lo().clone(),
            1 => level.hi().clone(),
            _ => level.midpoint(),
        };
        let nudge = half_pow(k + self.rng.gen_range(0..4));
        match self.rng.gen_range(0..3) {
            0 => base - nudge,
            1 => base + nudge,
            _ => base,
        }
    }

    fn point(&mut self) -> Rational {
        match self.rng.gen_range(0..8) {
            0..=3 => self.grid_point(),
            4..=6 => self.near_point(),
            _ => self.root.clone().unwrap_or_else(|| self.near_point()),
        }
    }

    fn interval(&mut self) -> RInterval {
        RInterval::new(self.point(), self.point())
    }

    /// A rational strictly inside a non-singleton interval.
    fn interior(&mut self, i: &RInterval) -> Rational {
        if self.rng.gen_bool(0.5) {
            return i.midpoint();
        }
        let t = Rational::new(self.rng.gen_range(1..64i64).into(), 64.into());
        i.lo() + i.width() * t
    }

    fn nonnegative(&mut self) -> Rational {
        match self.rng.gen_range(0..4) {
            0 => Rational::zero(),
            _ => Rational::new(self.rng.gen_range(1..=128i64).into(), self.rng.gen_range(1..=MAX_DENOMINATOR).into()),
        }
    }

    fn positive(&mut self) -> Rational {
        Rational::new(self.rng.gen_range(1..=128i64).into(), self.rng.gen_range(1..=MAX_DENOMINATOR).into())
    }
}

fn consistency(o: &Oracle, s: &mut Sampler, samples: u64, t: &mut Tally) {
    for _ in 0..samples {
        let j = s.interval();
        let rj = ask(o, &j, t.budget);
        if rj != QueryResult::Yes {
            t.unjudged();
            continue;
        }
        let i = RInterval::new(j.lo() - s.nonnegative(), j.hi() + s.nonnegative());
        match ask(o, &i, t.budget) {
            QueryResult::Yes => t.judged(),
            QueryResult::No => {
                return t.falsify("superset of a Yes interval is No", vec![(j, rj), (i, QueryResult::No)]);
            }
            QueryResult::Exhausted => t.unjudged(),
        }
    }
}

fn existence(o: &Oracle, s: &mut Sampler, samples: u64, t: &mut Tally) {
    let mut noes = Vec::new();
    let mut candidates: Vec<RInterval> = refined(o, &Rational::one(), t.budget).into_iter().collect();
    candidates.push(s.window());
    let mut exhausted = candidates.len() < 2;
    while (candidates.len() as u64) < samples + 2 {
        let i = s.interval();
        candidates.push(i);
    }
    for i in candidates.into_iter().take(samples as usize + 2) {
        t.run += 1;
        match ask(o, &i, t.budget) {
            QueryResult::Yes => {
                t.judged += 1;
                return;
            }
            QueryResult::No => noes.push((i, QueryResult::No)),
            QueryResult::Exhausted => exhausted = true,
        }
    }
    if !exhausted {
        t.falsify("no probe is a Yes interval", noes);
    }
}

fn closed(o: &Oracle, t: &mut Tally) {
    let Some(r) = o.root() else {
        t.vacuous = true;
        return;
    };
    let singleton = RInterval::singleton(r);
    match ask(o, &singleton, t.budget) {
        QueryResult::Yes => t.judged(),
        QueryResult::No => t.falsify("the root singleton is No", vec![(singleton, QueryResult::No)]),
        QueryResult::Exhausted => t.unjudged(),
    }
}

fn rooted(o: &Oracle, s: &mut Sampler, samples: u64, t: &mut Tally) {
    let mut seen: Option<RInterval> = None;
    for _ in 0..samples {
        let p = RInterval::singleton(s.point());
        match ask(o, &p, t.budget) {
            QueryResult::Yes => match &seen {
                Some(q) if q != &p => {
                    let q = q.clone();
                    return t.falsify("two Yes singletons", vec![(q, QueryResult::Yes), (p, QueryResult::Yes)]);
                }
                _ => {
                    seen = Some(p);
                    t.judged();
                }
            },
            QueryResult::No => t.judged(),
            QueryResult::Exhausted => t.unjudged(),
        }
    }
}

fn separation(o: &Oracle, s: &mut Sampler, samples: u64, t: &mut Tally) {
    use QueryResult::*;
    for _ in 0..samples {
        let i = s.interval();
        if i.is_singleton() || ask(o, &i, t.budget) != Yes {
            t.unjudged();
            continue;
        }
        let c = s.interior(&i);
        let pieces = [
            RInterval::new(i.lo().clone(), c.clone()),
            RInterval::singleton(c.clone()),
            RInterval::new(c, i.hi().clone()),
        ];
        let answers: Vec<QueryResult> = pieces.iter().map(|p| ask(o, p, t.budget)).collect();
        let yes = answers.iter().filter(|&&a| a == Yes).count();
        let no = answers.iter().filter(|&&a| a == No).count();
        let violated = match answers[1] {
            // all three must be Yes
            Yes => no > 0,
            // exactly one half is Yes
            No => yes > 1 || no == 3,
            // the singleton is undecided: two Yes halves still force it to be Yes
            Exhausted => no == 2,
        };
        if violated {
            let mut queries = vec![(i, Yes)];
            queries.extend(pieces.into_iter().zip(answers));
            return t.falsify("split of a Yes interval", queries);
        }
        if answers.iter().all(|a| a.is_definitive()) {
            t.judged();
        } else {
            t.unjudged();
        }
    }
}

fn two_point(o: &Oracle, s: &mut Sampler, samples: u64, t: &mut Tally) {
    for _ in 0..samples {
        let (p, q) = (s.point(), s.point());
        if p == q {
            t.unjudged();
            continue;
        }
        let (p, q) = if p < q { (p, q) } else { (q, p) };
        let m = (&p + &q) / Rational::from_integer(2.into());
        // the two halves of the window each exclude one point; a narrow
        // refinement excludes at least one
        let mut candidates = vec![
            RInterval::new(s.lo.clone().min(p.clone()), m.clone()),
            RInterval::new(m, s.hi.clone().max(q.clone())),
        ];
        let w = (&q - &p) / Rational::from_integer(2.into());
        let narrow = refined(o, &w, t.budget);
        let mut exhausted = narrow.is_none();
        candidates.extend(narrow);
        let mut noes = Vec::new();
        let mut found = false;
        for c in candidates {
            match ask(o, &c, t.budget) {
                QueryResult::Yes if !(c.contains(&p) && c.contains(&q)) => {
                    found = true;
                    break;
                }
                QueryResult::No => noes.push((c, QueryResult::No)),
                _ => exhausted = true,
            }
        }
        if found {
            t.judged();
        } else if exhausted {
            t.unjudged();
        } else {
            let note = format!("no Yes interval excludes {p} or {q}");
            return t.falsify(note, noes);
        }
    }
}

fn disjointness(o: &Oracle, s: &mut Sampler, samples: u64, t: &mut Tally) {
    for _ in 0..samples {
        let i = s.interval();
        let gap = s.positive() / Rational::from_integer(64.into());
        let len = s.nonnegative();
        let j = if s.rng.gen_bool(0.5) {
            let start = i.hi() + gap;
            RInterval::new(start.clone(), start + len)
        } else {
            let end = i.lo() - gap;
            RInterval::new(end.clone() - len, end)
        };
        let (ri, rj) = (ask(o, &i, t.budget), ask(o, &j, t.budget));
        if ri == QueryResult::Yes && rj == QueryResult::Yes {
            return t.falsify("disjoint Yes intervals", vec![(i, ri), (j, rj)]);
        }
        if ri == QueryResult::No || rj == QueryResult::No {
            t.judged();
        } else {
            t.unjudged();
        }
    }
}

fn narrowing(o: &Oracle, s: &mut Sampler, samples: u64, t: &mut Tally) {
    for n in 0..samples.min(MAX_NARROWING) {
        let length = half_pow(n);
        let mut noes = Vec::new();
        let mut exhausted = false;
        let mut found = false;
        let mut candidates: Vec<RInterval> = Vec::new();
        match refined(o, &length, t.budget) {
            Some(i) => candidates.push(i),
            None => exhausted = true,
        }
        for _ in 0..NARROWING_PROBES {
            let start = s.point();
            let width = &length * Rational::new(s.rng.gen_range(0..=8i64).into(), 8.into());
            candidates.push(RInterval::new(start.clone(), start + width));
        }
        for c in candidates {
            if c.width() > length {
                continue;
            }
            match ask(o, &c, t.budget) {
                QueryResult::Yes => {
                    found = true;
                    break;
                }
                QueryResult::No => noes.push((c, QueryResult::No)),
                QueryResult::Exhausted => exhausted = true,
            }
        }
        if found {
            t.judged();
        } else if exhausted {
            t.unjudged();
        } else {
            return t.falsify(format!("no Yes interval of length at most {length}"), noes);
        }
    }
}

fn intersection(o: &Oracle, s: &mut Sampler, samples: u64, t: &mut Tally) {
    let mut pool: Vec<RInterval> = Vec::new();
    for n in 0..samples {
        let i = if n % 2 == 0 {
            let w = half_pow(n / 2 % MAX_NARROWING);
            match refined(o, &w, t.budget) {
                Some(i) => i,
                None => {
                    t.unjudged();
                    continue;
                }
            }
        } else {
            s.interval()
        };
        match ask(o, &i, t.budget) {
            QueryResult::Yes => {}
            _ => {
                t.unjudged();
                continue;
            }
        }
        if let Some(j) = pool.iter().find(|j| j.is_disjoint(&i)) {
            let j = j.clone();
            return t.falsify("disjoint Yes intervals", vec![(j, QueryResult::Yes), (i, QueryResult::Yes)]);
        }
        t.judged();
        if pool.len() < POOL {
            pool.push(i);
        } else {
            let slot = s.rng.gen_range(0..POOL);
            pool[slot] = i;
        }
    }
}

/// A deliberately invalid oracle: Yes exactly for intervals of width at least 1.
///
/// Useful for checking that the harness catches violations.
pub fn width_rule_oracle() -> Oracle {
    let refiner = |k: u64| -> crate::Result<RInterval> {
        let h = half_pow(k + 1);
        Ok(RInterval::new(-h.clone(), h))
    };
    Oracle::builder("width-rule", refiner)
        .rule(|i, _| QueryResult::from_bool(i.width() >= Rational::one()))
        .build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::{nth_root_oracle, rational_oracle};
    use crate::rational::{int, rat};

    fn verdicts(r: &[AxiomReport]) -> Vec<(Property, Verdict)> {
        r.iter().map(|a| (a.property, a.verdict)).collect()
    }

    #[test]
    fn rational_passes_everything() {
        let r = check_axioms(&rational_oracle(rat(1, 2)), 7, 500, Budget::new(256));
        for a in &r {
            assert_eq!(a.verdict, Verdict::Passed, "{a}");
        }
        assert_eq!(r.len(), 9);
    }

    #[test]
    fn square_root_passes_with_vacuous_closed() {
        let o = nth_root_oracle(2, int(2)).unwrap();
        let r = check_axioms(&o, 7, 500, Budget::new(256));
        for a in &r {
            assert_eq!(a.verdict, Verdict::Passed, "{a}");
        }
        assert_eq!(r[2].samples_run, 0);
    }

    #[test]
    fn width_rule_is_caught() {
        let o = width_rule_oracle();
        let r = check_axioms(&o, 7, 500, Budget::new(256));
        let get = |p: Property| r.iter().find(|a| a.property == p).unwrap();
        let n = get(Property::Narrowing);
        assert_eq!(n.verdict, Verdict::Falsified);
        assert!(n.counterexample.as_ref().unwrap().note.ends_with("at most 1/2"), "{n}");
        for p in [Property::Separation, Property::Disjointness, Property::Intersection] {
            assert_eq!(get(p).verdict, Verdict::Falsified, "{}", get(p));
        }
        // no singleton has width 1, so no two of them can be Yes
        assert_eq!(get(Property::Rooted).verdict, Verdict::Passed);
        for a in &r {
            if let Some(c) = &a.counterexample {
                assert!(c.replay(&o), "{a}");
            }
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let o = nth_root_oracle(3, int(2)).unwrap();
        let a = check_axioms(&o, 11, 200, Budget::new(128));
        let b = check_axioms(&nth_root_oracle(3, int(2)).unwrap(), 11, 200, Budget::new(128));
        assert_eq!(a, b);
        let w = check_axioms(&width_rule_oracle(), 3, 100, Budget::new(64));
        assert_eq!(w, check_axioms(&width_rule_oracle(), 3, 100, Budget::new(64)));
        assert_ne!(verdicts(&w), verdicts(&a));
    }

    #[test]
    fn exhausted_answers_are_inconclusive() {
        let o = Oracle::builder("silent", |_k: u64| Ok(RInterval::new(int(0), int(1))))
            .rule(|_, _| QueryResult::Exhausted)
            .build();
        for a in check_axioms(&o, 1, 50, Budget::new(16)) {
            let expected = if a.property == Property::Closed { Verdict::Passed } else { Verdict::Inconclusive };
            assert_eq!(a.verdict, expected, "{a}");
        }
    }

    #[test]
    fn report_line_format() {
        let r = check_axioms(&rational_oracle(int(3)), 1, 10, Budget::new(8));
        assert_eq!(r[2].to_string(), "CLOSED Passed 1");
        let w = check_axioms(&width_rule_oracle(), 7, 50, Budget::new(8));
        let line = w.iter().find(|a| a.property == Property::Narrowing).unwrap().to_string();
        assert!(line.starts_with("NARROWING Falsified 2 [no Yes interval of length at most 1/2:"), "{line}");
        assert!(line.ends_with("@budget 8]"));
    }
}
