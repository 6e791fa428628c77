//! Function oracles: rules on rectangles `(base, wall)` that say Yes when the
//! image of the base lies inside the wall, and the application `f(α) = β`
//! they induce on oracles.
//!
//! A [`FunctionOracle`] is given by an interval extension (a sound, monotone
//! enclosure of the image of each base) and a modulus relating wall width to
//! base width. Extensions supplied by callers must be pure and satisfy both
//! properties; the built-in ones are polynomials and the reciprocal.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::constructors::{horner, poly_text, rational_oracle};
use crate::error::{OracleError, Result};
use crate::oracle::{Budget, Memo, Oracle, QueryResult};
use crate::rational::half_pow;
use crate::{RInterval, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rectangle {
    pub base: RInterval,
    pub wall: RInterval,
}

impl Rectangle {
    pub fn new(base: RInterval, wall: RInterval) -> Self {
        Rectangle { base, wall }
    }
}

impl fmt::Display for Rectangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} x {}", self.base, self.wall)
    }
}

type ExtensionFn = dyn Fn(&RInterval) -> RInterval + Send + Sync;
type ModulusFn = dyn Fn(&Rational, &RInterval) -> Rational + Send + Sync;

/// Pieces of the base a single `rect_decide` may track before giving up.
const MAX_PIECES: usize = 1 << 12;

#[derive(Clone)]
pub struct FunctionOracle {
    label: String,
    extension: Arc<ExtensionFn>,
    modulus: Arc<ModulusFn>,
    domain: Option<RInterval>,
}

impl FunctionOracle {
    /// `extension(B)` must contain the image of `B` and grow with `B`;
    /// `modulus(w, D)` must give a base width that keeps walls of bases inside
    /// `D` no wider than `w`.
    pub fn new(
        label: impl Into<String>,
        extension: impl Fn(&RInterval) -> RInterval + Send + Sync + 'static,
        modulus: impl Fn(&Rational, &RInterval) -> Rational + Send + Sync + 'static,
    ) -> Self {
        FunctionOracle {
            label: label.into(),
            extension: Arc::new(extension),
            modulus: Arc::new(modulus),
            domain: None,
        }
    }

    /// Restricts the function to bases inside `domain`.
    pub fn with_domain(mut self, domain: RInterval) -> Self {
        self.domain = Some(domain);
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain(&self) -> Option<&RInterval> {
        self.domain.as_ref()
    }

    pub fn extension(&self, base: &RInterval) -> Result<RInterval> {
        if let Some(d) = &self.domain {
            if !base.is_subset_of(d) {
                return Err(OracleError::DomainEscape { interval: base.clone(), domain: d.clone() });
            }
        }
        Ok((self.extension)(base))
    }

    /// Base width that keeps walls within `working_domain` at most `width` wide.
    pub fn modulus(&self, width: &Rational, working_domain: &RInterval) -> Rational {
        (self.modulus)(width, working_domain)
    }

    pub fn rect_decide(&self, r: &Rectangle, budget: Budget) -> Result<QueryResult> {
        rect_decide(self, r, budget)
    }
}

impl fmt::Debug for FunctionOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionOracle")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

/// Does the image of `r.base` lie in `r.wall`?
///
/// Each round bisects the pieces of the base whose enclosure still sticks out
/// of the wall. Yes once every piece's enclosure fits; No as soon as the exact
/// image of a piece endpoint falls outside the wall.
pub fn rect_decide(f: &FunctionOracle, r: &Rectangle, budget: Budget) -> Result<QueryResult> {
    let mut pieces = vec![r.base.clone()];
    for _ in 0..budget.steps {
        let mut next = Vec::new();
        for piece in &pieces {
            for t in [piece.lo(), piece.hi()] {
                if f.extension(&RInterval::singleton(t.clone()))?.is_disjoint(&r.wall) {
                    return Ok(QueryResult::No);
                }
            }
            if f.extension(piece)?.is_subset_of(&r.wall) {
                continue;
            }
            if piece.is_singleton() {
                next.push(piece.clone());
            } else {
                let mid = piece.midpoint();
                next.push(RInterval::new(piece.lo().clone(), mid.clone()));
                next.push(RInterval::new(mid, piece.hi().clone()));
            }
        }
        if next.is_empty() {
            return Ok(QueryResult::Yes);
        }
        if next.len() > MAX_PIECES {
            break;
        }
        pieces = next;
    }
    Ok(QueryResult::Exhausted)
}

/// `f(x)`: the oracle whose Yes intervals are the walls of Yes rectangles
/// whose base contains `x`.
///
/// Level `k` is the wall over the shallowest level of `x` narrow enough, per
/// the modulus, for a wall of width `2⁻ᵏ`. A rooted `x` whose image is exact
/// gives a rooted result.
pub fn apply(f: &FunctionOracle, x: &Oracle) -> Result<Oracle> {
    let label = format!("{}({x})", f.label);
    if let Some(r) = x.root() {
        let image = f.extension(&RInterval::singleton(r))?;
        if image.is_singleton() {
            return Ok(rational_oracle(image.lo().clone()));
        }
    }
    let working = match f.domain() {
        Some(d) => d.clone(),
        None => x.level(0)?,
    };
    let (f, x) = (f.clone(), x.clone());
    let refiner = Memo::new(move |k: u64| -> Result<RInterval> {
        let base_width = f.modulus(&half_pow(k), &working);
        let level = shallowest_within(&x, &base_width)?;
        let base = level.intersection(&working).ok_or_else(|| OracleError::DomainEscape {
            interval: level.clone(),
            domain: working.clone(),
        })?;
        f.extension(&base)
    });
    Ok(Oracle::builder(label, refiner).build())
}

/// The shallowest level of `x` with width at most `width`; unbounded search.
fn shallowest_within(x: &Oracle, width: &Rational) -> Result<RInterval> {
    match x.refine(width, Budget::new(u64::MAX))? {
        Some(i) => Ok(i),
        None => unreachable!("an unbounded refinement always answers"),
    }
}

/// Polynomial `Σ cᵢ xⁱ` (coefficients from the constant term up), extended to
/// intervals by Horner's scheme.
///
/// On a domain of magnitude `R` the extension's wall is at most
/// `Σ i·|cᵢ|·R^(i-1)` times as wide as its base, which gives the modulus.
pub fn poly_extension(coeffs: Vec<Rational>) -> FunctionOracle {
    let label = poly_text(&coeffs);
    let ext_coeffs = coeffs.clone();
    let extension = move |base: &RInterval| -> RInterval {
        if base.is_singleton() {
            return RInterval::singleton(horner(&ext_coeffs, base.lo()));
        }
        let mut acc = RInterval::singleton(Rational::zero());
        for c in ext_coeffs.iter().rev() {
            acc = acc.mul(base).add(&RInterval::singleton(c.clone()));
        }
        acc
    };
    let modulus = move |width: &Rational, domain: &RInterval| -> Rational {
        let radius = domain.magnitude();
        let mut slope = Rational::zero();
        let mut power = Rational::one();
        for (i, c) in coeffs.iter().enumerate().skip(1) {
            slope += c.abs() * Rational::from_integer(i.into()) * &power;
            power *= &radius;
        }
        if slope.is_zero() {
            domain.width() + Rational::one()
        } else {
            width / slope
        }
    };
    FunctionOracle::new(label, extension, modulus)
}

/// `1/x` on a domain excluding zero.
pub fn recip_extension(domain: RInterval) -> Result<FunctionOracle> {
    if domain.contains_zero() {
        return Err(OracleError::ZeroInDenominator(domain));
    }
    let nearest = domain.abs().lo().clone();
    let extension = |base: &RInterval| -> RInterval {
        base.recip().expect("bases are inside a zero-free domain")
    };
    // |1/a - 1/b| = |a - b| / |ab| ≤ |a - b| / m²
    let modulus = move |width: &Rational, _: &RInterval| width * &nearest * &nearest;
    Ok(FunctionOracle::new("recip", extension, modulus).with_domain(domain))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinators::{compare, o_mul, o_recip, CompareResult};
    use crate::constructors::nth_root_oracle;
    use crate::rational::{int, pow10, rat};
    use crate::refine::to_decimal;
    use crate::Interval;
    use proptest::prelude::*;

    fn iv(a: Rational, b: Rational) -> RInterval {
        Interval::new(a, b)
    }

    fn square() -> FunctionOracle {
        poly_extension(vec![int(0), int(0), int(1)])
    }

    fn sqrt2() -> Oracle {
        nth_root_oracle(2, int(2)).unwrap()
    }

    const B: Budget = Budget::new(64);

    #[test]
    fn rect_examples() {
        let f = square();
        assert_eq!(f.rect_decide(&Rectangle::new(iv(int(1), int(2)), iv(int(1), int(4))), B), Ok(QueryResult::Yes));
        assert_eq!(f.rect_decide(&Rectangle::new(iv(int(1), int(2)), iv(int(1), int(3))), B), Ok(QueryResult::No));
        let origin = RInterval::singleton(int(0));
        assert_eq!(f.rect_decide(&Rectangle::new(origin.clone(), origin), B), Ok(QueryResult::Yes));
    }

    #[test]
    fn rect_subdivision_beats_overestimation() {
        // Horner gives x·x on [-1,2] as [-2,4]; the image is [0,4]
        let f = square();
        let r = Rectangle::new(iv(int(-1), int(2)), iv(rat(-1, 10), int(4)));
        assert_eq!(f.extension(&r.base).unwrap(), iv(int(-2), int(4)));
        assert_eq!(f.rect_decide(&r, B), Ok(QueryResult::Yes));
        // with the exact image as wall, the piece around 0 never fits
        let tight = Rectangle::new(iv(int(-1), int(2)), iv(int(0), int(4)));
        assert_eq!(f.rect_decide(&tight, Budget::new(8)), Ok(QueryResult::Exhausted));
        assert_eq!(f.rect_decide(&tight, Budget::ZERO), Ok(QueryResult::Exhausted));
    }

    #[test]
    fn poly_extension_examples() {
        let p = poly_extension(vec![int(-2), int(0), int(1)]);
        assert_eq!(p.extension(&iv(int(1), int(2))), Ok(iv(int(-1), int(2))));
        let c = poly_extension(vec![int(5)]);
        assert_eq!(c.extension(&iv(int(-9), rat(1, 3))), Ok(RInterval::singleton(int(5))));
        let id = poly_extension(vec![int(0), int(1)]);
        assert_eq!(id.extension(&iv(rat(-1, 2), rat(7, 3))), Ok(iv(rat(-1, 2), rat(7, 3))));
        let zero = poly_extension(vec![]);
        assert_eq!(zero.extension(&iv(int(1), int(2))), Ok(RInterval::singleton(int(0))));
    }

    #[test]
    fn poly_modulus_bounds_wall_width() {
        let p = poly_extension(vec![int(1), int(-3), int(0), int(2)]);
        let domain = iv(int(-2), int(3));
        for k in 0..20u64 {
            let w = half_pow(k);
            let bw = p.modulus(&w, &domain);
            let base = iv(rat(1, 7), rat(1, 7) + &bw);
            assert!(p.extension(&base).unwrap().width() <= w);
        }
    }

    #[test]
    fn apply_examples() {
        let w = Rational::one() / pow10(10);
        let y = apply(&square(), &sqrt2()).unwrap();
        let e = y.refine(&w, Budget::new(10_000)).unwrap().unwrap();
        assert!(e.contains(&int(2)));
        assert!(e.width() <= w);

        let nine = apply(&square(), &rational_oracle(int(3))).unwrap();
        assert_eq!(nine.root(), Some(int(9)));
    }

    #[test]
    fn apply_reciprocal_matches_o_recip() {
        let f = recip_extension(iv(int(1), int(2))).unwrap();
        let via_apply = apply(&f, &sqrt2()).unwrap();
        let via_recip = o_recip(&sqrt2(), &iv(int(1), int(2))).unwrap();
        assert_eq!(compare(&via_apply, &via_recip, Budget::new(200)), Ok(CompareResult::Undecided));
        let a = to_decimal(&via_apply, 20, Budget::new(10_000)).unwrap();
        let b = to_decimal(&via_recip, 20, Budget::new(10_000)).unwrap();
        assert_eq!(a.text, b.text);
        assert_eq!(a.text, "0.70710678118654752440 \u{b1} 1e-20");
    }

    #[test]
    fn apply_outside_the_domain_escapes() {
        let f = recip_extension(iv(int(2), int(3))).unwrap();
        let y = apply(&f, &sqrt2()).unwrap();
        assert!(matches!(y.level(6), Err(OracleError::DomainEscape { .. })));
        assert!(matches!(recip_extension(iv(int(-1), int(1))), Err(OracleError::ZeroInDenominator(_))));
        assert!(matches!(
            f.rect_decide(&Rectangle::new(iv(int(1), int(2)), iv(int(0), int(1))), B),
            Err(OracleError::DomainEscape { .. })
        ));
    }

    #[test]
    fn apply_and_product_agree_on_squares() {
        let w = Rational::one() / pow10(20);
        let budget = Budget::new(10_000);
        let a = apply(&square(), &sqrt2()).unwrap().refine(&w, budget).unwrap().unwrap();
        let b = o_mul(&sqrt2(), &sqrt2()).refine(&w, budget).unwrap().unwrap();
        assert!(a.contains(&int(2)) && b.contains(&int(2)));
        assert!(a.intersection(&b).is_some());
    }

    fn coeffs() -> impl Strategy<Value = Vec<Rational>> {
        prop::collection::vec((-20i64..20, 1i64..6).prop_map(|(n, d)| rat(n, d)), 0..6)
    }

    fn interval() -> impl Strategy<Value = RInterval> {
        ((-40i64..40, 1i64..8), (-40i64..40, 1i64..8))
            .prop_map(|((a, b), (c, d))| Interval::new(rat(a, b), rat(c, d)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn poly_extension_is_sound(cs in coeffs(), base in interval(), t in 0i64..=32) {
            let p = poly_extension(cs.clone());
            let x = base.lo() + base.width() * rat(t, 32);
            let value = horner(&cs, &x);
            prop_assert!(p.extension(&base).unwrap().contains(&value));
        }

        #[test]
        fn poly_extension_is_monotone(cs in coeffs(), base in interval(), s in 0i64..=16, t in 0i64..=16) {
            let p = poly_extension(cs);
            let (a, b) = (base.lo() + base.width() * rat(s, 16), base.lo() + base.width() * rat(t, 16));
            let inner = Interval::new(a, b);
            prop_assert!(p.extension(&inner).unwrap().is_subset_of(&p.extension(&base).unwrap()));
        }

        #[test]
        fn apply_to_a_rational_is_exact(cs in coeffs(), n in -30i64..30, d in 1i64..9) {
            let r = rat(n, d);
            let y = apply(&poly_extension(cs.clone()), &rational_oracle(r.clone())).unwrap();
            prop_assert_eq!(y.root(), Some(horner(&cs, &r)));
        }

        #[test]
        fn rect_yes_survives_shrinking_base_and_growing_wall(
            cs in coeffs(), base in interval(), wall in interval(), s in 0i64..=8, t in 0i64..=8, grow in 0i64..5,
        ) {
            let p = poly_extension(cs);
            let r = Rectangle::new(base.clone(), wall.clone());
            if p.rect_decide(&r, Budget::new(10)).unwrap() == QueryResult::Yes {
                let inner = Interval::new(base.lo() + base.width() * rat(s, 8), base.lo() + base.width() * rat(t, 8));
                let outer = Interval::new(wall.lo() - rat(grow, 3), wall.hi() + rat(grow, 7));
                let again = p.rect_decide(&Rectangle::new(inner, outer), Budget::new(10)).unwrap();
                prop_assert_ne!(again, QueryResult::No);
            }
        }
    }
}
