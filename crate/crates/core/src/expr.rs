//! Expression language for the command line.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor (("*" | "/") factor)*
//! factor := "-" factor | atom
//! atom   := RATIONAL | "(" expr ")"
//!         | "sqrt" "(" RATIONAL ")"
//!         | "root" "(" INT "," RATIONAL ")"
//!         | "polyzero" "(" RATIONAL {"," RATIONAL} ";" RATIONAL "," RATIONAL ")"
//!         | "recip" "(" expr ";" RATIONAL ":" RATIONAL ")"
//! RATIONAL := INT ["/" INT]
//! ```
//!
//! Arguments of the named atoms may carry a sign. Both `-` and `−` (U+2212)
//! are accepted as minus. Dividing by a literal is exact multiplication by its
//! reciprocal; dividing by anything else is rejected, since it needs a
//! witness interval excluding zero (use `recip`).

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::combinators::{o_add, o_mul, o_neg, o_recip, o_sub};
use crate::constructors::{horner, ivt_oracle, nth_root_oracle, rational_oracle, Sign, SignFunction};
use crate::error::Result;
use crate::oracle::Oracle;
use crate::{RInterval, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Lit(Rational),
    Root { n: u32, radicand: Rational },
    /// The zero of `Σ coeffs[i]·xⁱ` bracketed by `a` and `b`.
    PolyZero { coeffs: Vec<Rational>, a: Rational, b: Rational },
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Recip { arg: Box<Expr>, lo: Rational, hi: Rational },
}

impl Expr {
    pub fn to_oracle(&self) -> Result<Oracle> {
        Ok(match self {
            Expr::Lit(q) => rational_oracle(q.clone()),
            Expr::Root { n, radicand } => nth_root_oracle(*n, radicand.clone())?,
            Expr::PolyZero { coeffs, a, b } => {
                ivt_oracle(SignFunction::polynomial(coeffs.clone()), a.clone(), b.clone())?
            }
            Expr::Neg(x) => o_neg(&x.to_oracle()?),
            Expr::Add(x, y) => o_add(&x.to_oracle()?, &y.to_oracle()?),
            Expr::Sub(x, y) => o_sub(&x.to_oracle()?, &y.to_oracle()?),
            Expr::Mul(x, y) => o_mul(&x.to_oracle()?, &y.to_oracle()?),
            Expr::Recip { arg, lo, hi } => {
                o_recip(&arg.to_oracle()?, &RInterval::new(lo.clone(), hi.clone()))?
            }
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Lit(q) if q.is_negative() => 0,
            _ => 4,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            f.write_str("(")?;
            self.write_at(f, 0)?;
            return f.write_str(")");
        }
        match self {
            Expr::Lit(q) if q.is_negative() => write!(f, "-{}", -q),
            Expr::Lit(q) => write!(f, "{q}"),
            Expr::Root { n: 2, radicand } => write!(f, "sqrt({radicand})"),
            Expr::Root { n, radicand } => write!(f, "root({n}, {radicand})"),
            Expr::PolyZero { coeffs, a, b } => {
                let cs: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
                write!(f, "polyzero({}; {a}, {b})", cs.join(", "))
            }
            Expr::Neg(x) => {
                f.write_str("-")?;
                x.write_at(f, 3)
            }
            Expr::Add(x, y) => binary(f, x, " + ", y, 1),
            Expr::Sub(x, y) => binary(f, x, " - ", y, 1),
            Expr::Mul(x, y) => binary(f, x, " * ", y, 2),
            Expr::Recip { arg, lo, hi } => {
                f.write_str("recip(")?;
                arg.write_at(f, 0)?;
                write!(f, "; {lo}:{hi})")
            }
        }
    }
}

fn binary(f: &mut fmt::Formatter<'_>, x: &Expr, op: &str, y: &Expr, prec: u8) -> fmt::Result {
    x.write_at(f, prec)?;
    f.write_str(op)?;
    y.write_at(f, prec + 1)
}

/// Prints with the fewest parentheses that parse back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at position {position}: expected {}, found {found}", .expected.join(" or "))]
    Syntax { position: usize, expected: Vec<&'static str>, found: String },
    #[error("error at position {position}: {message}")]
    Semantic { position: usize, message: String },
}

impl ParseError {
    /// Character offset into the input.
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { position, .. } | ParseError::Semantic { position, .. } => *position,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Open,
    Close,
    Comma,
    Semi,
    Colon,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "'{n}'"),
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Plus => f.write_str("'+'"),
            Tok::Minus => f.write_str("'-'"),
            Tok::Star => f.write_str("'*'"),
            Tok::Slash => f.write_str("'/'"),
            Tok::Open => f.write_str("'('"),
            Tok::Close => f.write_str("')'"),
            Tok::Comma => f.write_str("','"),
            Tok::Semi => f.write_str("';'"),
            Tok::Colon => f.write_str("':'"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> std::result::Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        i += 1;
        let tok = match c {
            c if c.is_whitespace() => continue,
            '+' => Tok::Plus,
            '-' | '\u{2212}' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '(' => Tok::Open,
            ')' => Tok::Close,
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            ':' => Tok::Colon,
            c if c.is_ascii_digit() => {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                Tok::Int(digits.parse().expect("ascii digits"))
            }
            c if c.is_ascii_alphabetic() => {
                while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                Tok::Ident(chars[start..i].iter().collect())
            }
            other => {
                return Err(ParseError::Syntax {
                    position: start,
                    expected: vec!["a number", "an operator", "a function name"],
                    found: format!("'{other}'"),
                })
            }
        };
        out.push((start, tok));
    }
    out.push((chars.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
}

type PResult<T> = std::result::Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn peek_at(&self, ahead: usize) -> &Tok {
        &self.toks[(self.at + ahead).min(self.toks.len() - 1)].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, expected: Vec<&'static str>) -> PResult<T> {
        Err(ParseError::Syntax { position: self.pos(), expected, found: self.peek().to_string() })
    }

    fn semantic<T>(position: usize, message: impl Into<String>) -> PResult<T> {
        Err(ParseError::Semantic { position, message: message.into() })
    }

    fn expect(&mut self, tok: Tok, name: &'static str) -> PResult<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.fail(vec![name])
        }
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut left = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    left = Expr::Add(Box::new(left), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    left = Expr::Sub(Box::new(left), Box::new(self.term()?));
                }
                _ => return Ok(left),
            }
        }
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut left = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    left = Expr::Mul(Box::new(left), Box::new(self.factor()?));
                }
                Tok::Slash => {
                    self.bump();
                    let position = self.pos();
                    let divisor = self.factor()?;
                    left = Expr::Mul(Box::new(left), Box::new(literal_reciprocal(divisor, position)?));
                }
                _ => return Ok(left),
            }
        }
    }

    fn factor(&mut self) -> PResult<Expr> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> PResult<Expr> {
        let position = self.pos();
        match self.peek().clone() {
            Tok::Int(_) => Ok(Expr::Lit(self.rational()?)),
            Tok::Open => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::Close, "')'")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                self.expect(Tok::Open, "'('")?;
                let e = match name.as_str() {
                    "sqrt" => {
                        let radicand = self.radicand()?;
                        Expr::Root { n: 2, radicand }
                    }
                    "root" => {
                        let at = self.pos();
                        let n = self.signed()?;
                        if !n.is_integer() {
                            return self.fail(vec!["an integer root index"]);
                        }
                        let n = match u32::try_from(n.to_integer()) {
                            Ok(n) if n > 0 => n,
                            _ => return Self::semantic(at, "the root index must be a positive integer"),
                        };
                        self.expect(Tok::Comma, "','")?;
                        let radicand = self.radicand()?;
                        Expr::Root { n, radicand }
                    }
                    "polyzero" => self.polyzero(position)?,
                    "recip" => {
                        let arg = self.expr()?;
                        if *self.peek() == Tok::Close {
                            return Self::semantic(self.pos(), "recip needs a witness interval: recip(expr; lo:hi)");
                        }
                        self.expect(Tok::Semi, "';'")?;
                        let lo = self.signed()?;
                        self.expect(Tok::Colon, "':'")?;
                        let hi = self.signed()?;
                        Expr::Recip { arg: Box::new(arg), lo, hi }
                    }
                    _ => {
                        return Err(ParseError::Syntax {
                            position,
                            expected: vec!["sqrt", "root", "polyzero", "recip"],
                            found: format!("'{name}'"),
                        })
                    }
                };
                self.expect(Tok::Close, "')'")?;
                Ok(e)
            }
            _ => self.fail(vec!["a number", "'('", "'-'", "a function name"]),
        }
    }

    fn polyzero(&mut self, position: usize) -> PResult<Expr> {
        let mut coeffs = vec![self.signed()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            coeffs.push(self.signed()?);
        }
        self.expect(Tok::Semi, "';'")?;
        let a = self.signed()?;
        self.expect(Tok::Comma, "','")?;
        let b = self.signed()?;
        let (sa, sb) = (Sign::of(&horner(&coeffs, &a)), Sign::of(&horner(&coeffs, &b)));
        if sa == sb && sa != Sign::Zero {
            return Self::semantic(position, format!("the polynomial has the same strict sign at {a} and {b}"));
        }
        Ok(Expr::PolyZero { coeffs, a, b })
    }

    fn radicand(&mut self) -> PResult<Rational> {
        let at = self.pos();
        let q = self.signed()?;
        if !q.is_positive() {
            return Self::semantic(at, format!("the radicand {q} must be positive"));
        }
        Ok(q)
    }

    fn signed(&mut self) -> PResult<Rational> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(-self.rational()?);
        }
        if *self.peek() == Tok::Plus {
            self.bump();
        }
        self.rational()
    }

    /// `INT ["/" INT]`.
    fn rational(&mut self) -> PResult<Rational> {
        let Tok::Int(p) = self.peek().clone() else {
            return self.fail(vec!["a number"]);
        };
        self.bump();
        if *self.peek() == Tok::Slash {
            if let Tok::Int(q) = self.peek_at(1).clone() {
                self.bump();
                let at = self.pos();
                self.bump();
                if q.is_zero() {
                    return Self::semantic(at, "division by zero");
                }
                return Ok(Rational::new(p, q));
            }
        }
        Ok(Rational::from_integer(p))
    }
}

/// `1/d` for a literal or negated literal divisor.
fn literal_reciprocal(divisor: Expr, position: usize) -> PResult<Expr> {
    match divisor {
        Expr::Lit(q) if q.is_zero() => Parser::semantic(position, "division by zero"),
        Expr::Lit(q) => Ok(Expr::Lit(Rational::one() / q)),
        Expr::Neg(inner) => Ok(Expr::Neg(Box::new(literal_reciprocal(*inner, position)?))),
        _ => Parser::semantic(
            position,
            "division is only by rational literals; use recip(expr; lo:hi) with a witness interval excluding zero",
        ),
    }
}

pub fn parse_expr(text: &str) -> std::result::Result<Expr, ParseError> {
    let mut p = Parser { toks: lex(text)?, at: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.fail(vec!["an operator", "end of input"]);
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::{to_decimal, Budget};
    use proptest::prelude::*;

    fn lit(q: Rational) -> Box<Expr> {
        Box::new(Expr::Lit(q))
    }

    fn root(n: u32, q: Rational) -> Box<Expr> {
        Box::new(Expr::Root { n, radicand: q })
    }

    #[test]
    fn examples() {
        assert_eq!(parse_expr("sqrt(2) + 1"), Ok(Expr::Add(root(2, int(2)), lit(int(1)))));
        assert_eq!(
            parse_expr("root(3, 5/2) * (1 - 1/3)"),
            Ok(Expr::Mul(root(3, rat(5, 2)), Box::new(Expr::Sub(lit(int(1)), lit(rat(1, 3))))))
        );
        assert!(matches!(parse_expr("sqrt(-1)"), Err(ParseError::Semantic { .. })));
    }

    #[test]
    fn precedence_and_associativity() {
        let e = parse_expr("1 - 2 - 3 * 4").unwrap();
        assert_eq!(e.to_string(), "1 - 2 - 3 * 4");
        assert_eq!(
            e,
            Expr::Sub(
                Box::new(Expr::Sub(lit(int(1)), lit(int(2)))),
                Box::new(Expr::Mul(lit(int(3)), lit(int(4))))
            )
        );
        assert_eq!(parse_expr("--2"), Ok(Expr::Neg(Box::new(Expr::Neg(lit(int(2)))))));
        assert_eq!(parse_expr("1 - (2 - 3)").unwrap().to_string(), "1 - (2 - 3)");
        assert_eq!(parse_expr("\u{2212}sqrt(2)"), Ok(Expr::Neg(root(2, int(2)))));
    }

    #[test]
    fn division() {
        assert_eq!(parse_expr("sqrt(2) / 2"), Ok(Expr::Mul(root(2, int(2)), lit(rat(1, 2)))));
        assert_eq!(parse_expr("1/2/3"), Ok(Expr::Mul(lit(rat(1, 2)), lit(rat(1, 3)))));
        assert_eq!(
            parse_expr("sqrt(2) / -4/3"),
            Ok(Expr::Mul(root(2, int(2)), Box::new(Expr::Neg(lit(rat(3, 4))))))
        );
        let e = parse_expr("1 / sqrt(2)").unwrap_err();
        assert!(e.to_string().contains("recip"), "{e}");
        assert!(matches!(parse_expr("2/0"), Err(ParseError::Semantic { .. })));
        assert!(matches!(parse_expr("sqrt(2)/(1-1)"), Err(ParseError::Semantic { .. })));
    }

    #[test]
    fn named_atoms() {
        assert_eq!(
            parse_expr("polyzero(-1, -1, 1; 1, 2)"),
            Ok(Expr::PolyZero { coeffs: vec![int(-1), int(-1), int(1)], a: int(1), b: int(2) })
        );
        assert_eq!(
            parse_expr("recip(sqrt(2); 1:2)"),
            Ok(Expr::Recip { arg: root(2, int(2)), lo: int(1), hi: int(2) })
        );
        assert_eq!(parse_expr("root(5, 7/3)"), Ok(*root(5, rat(7, 3))));
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_expr("root(0, 2)"), Err(ParseError::Semantic { .. })));
        assert!(matches!(parse_expr("root(-2, 2)"), Err(ParseError::Semantic { .. })));
        assert!(matches!(parse_expr("root(2, 0)"), Err(ParseError::Semantic { .. })));
        assert!(matches!(parse_expr("recip(sqrt(2))"), Err(ParseError::Semantic { .. })));
        assert!(matches!(parse_expr("polyzero(-2, 0, 1; 2, 3)"), Err(ParseError::Semantic { .. })));
        assert_eq!(
            parse_expr("1 + "),
            Err(ParseError::Syntax {
                position: 4,
                expected: vec!["a number", "'('", "'-'", "a function name"],
                found: "end of input".into()
            })
        );
        assert_eq!(parse_expr("sqrt(2) 3").unwrap_err().position(), 8);
        assert_eq!(parse_expr("cos(1)").unwrap_err().position(), 0);
        assert_eq!(parse_expr("1 $ 2").unwrap_err().position(), 2);
        assert!(matches!(parse_expr("(1 + 2"), Err(ParseError::Syntax { position: 6, .. })));
    }

    #[test]
    fn evaluation() {
        let b = Budget::new(10_000);
        let show = |s: &str| to_decimal(&parse_expr(s).unwrap().to_oracle().unwrap(), 10, b).unwrap().text;
        assert_eq!(show("sqrt(2)+1"), "2.4142135623 \u{b1} 1e-10");
        assert_eq!(show("polyzero(-1, -1, 1; 1, 2)"), "1.6180339887 \u{b1} 1e-10");
        assert_eq!(show("recip(sqrt(2); 1:2) * 2"), "1.4142135623 \u{b1} 1e-10");
        assert_eq!(show("1/3 - 1/3"), "0.0000000000 \u{b1} 1e-10");
        assert!(parse_expr("recip(sqrt(2); 2:3)").unwrap().to_oracle().is_err());
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (0i64..50, 1i64..9).prop_map(|(n, d)| rat(n, d))
    }

    fn signed_rational() -> impl Strategy<Value = Rational> {
        (-50i64..50, 1i64..9).prop_map(|(n, d)| rat(n, d))
    }

    /// Grammar-generated source text.
    pub(crate) fn source() -> impl Strategy<Value = String> {
        let leaf = prop_oneof![
            small_rational().prop_map(|q| q.to_string()),
            (1i64..50, 1i64..9).prop_map(|(n, d)| format!("sqrt({})", rat(n, d))),
            (1u32..6, 1i64..50).prop_map(|(n, q)| format!("root({n}, {q})")),
            Just("polyzero(-1, -1, 1; 1, 2)".to_string()),
            (signed_rational(), signed_rational())
                .prop_map(|(a, b)| format!("polyzero({}, 1; -3000, 3000)", -(a * b))),
        ];
        leaf.prop_recursive(5, 48, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone(), prop::sample::select(vec!["+", "-", "*"]))
                    .prop_map(|(a, b, op)| format!("{a} {op} {b}")),
                inner.clone().prop_map(|a| format!("({a})")),
                inner.clone().prop_map(|a| format!("-{a}")),
                (inner.clone(), 1i64..20).prop_map(|(a, d)| format!("{a} / {d}")),
                inner.prop_map(|a| format!("recip({a}; 1:2)")),
            ]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn printing_round_trips(text in source()) {
            let e = parse_expr(&text).unwrap();
            let printed = e.to_string();
            prop_assert_eq!(parse_expr(&printed).unwrap(), e, "{} printed as {}", text, printed);
        }
    }
}
