//! Text syntax for observables.
//!
//! ```text
//! expr  := ['+'|'-'] term (('+'|'-') term)*
//! term  := power (['*'] power)*
//! power := atom ['^' integer]
//! atom  := number ['/' number] | q<k> | p<k> | '(' expr ')' | ':' wick ':'
//! ```
//!
//! Numbers are exact (`0.25` is `1/4`). A juxtaposition such as `3 q1^2 p2`
//! is a product. `:q1^2 p1:` is a Wick monomial and is only accepted in
//! chaos expressions, where a plain product means the pointwise product.

use std::fmt;

use cuntzq_core::white_noise::ChaosPoly;
use cuntzq_core::{MultiIndex, Polynomial, Rational};
use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Exponents above this are rejected rather than expanded.
const MAX_EXPONENT: u32 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Var(char, usize),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Colon,
    Comma,
    End,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn err<T>(line: usize, column: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        column,
        message: message.into(),
    })
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, column);
        if c == '\n' {
            i += 1;
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            column += 1;
            continue;
        }
        let simple = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ':' => Some(Tok::Colon),
            ',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push(Spanned { tok, line: l0, column: c0 });
            i += 1;
            column += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let lit: String = chars[start..i].iter().collect();
            column += i - start;
            let value = decimal(&lit).ok_or_else(|| ParseError {
                line: l0,
                column: c0,
                message: format!("malformed number '{lit}'"),
            })?;
            out.push(Spanned {
                tok: Tok::Num(value),
                line: l0,
                column: c0,
            });
            continue;
        }
        if c == 'q' || c == 'p' {
            let start = i + 1;
            let mut j = start;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            if j == start {
                return err(l0, c0, format!("expected an index after '{c}'"));
            }
            let digits: String = chars[start..j].iter().collect();
            let idx: usize = digits
                .parse()
                .map_err(|_| ParseError {
                    line: l0,
                    column: c0,
                    message: format!("index '{digits}' is too large"),
                })?;
            if idx == 0 {
                return err(l0, c0, "variable indices start at 1");
            }
            column += j - i;
            i = j;
            out.push(Spanned {
                tok: Tok::Var(c, idx),
                line: l0,
                column: c0,
            });
            continue;
        }
        return err(l0, c0, format!("unexpected character '{c}'"));
    }
    out.push(Spanned {
        tok: Tok::End,
        line,
        column,
    });
    Ok(out)
}

fn decimal(lit: &str) -> Option<Rational> {
    let (whole, frac) = match lit.split_once('.') {
        Some((w, f)) => (w, f),
        None => (lit, ""),
    };
    if (whole.is_empty() && frac.is_empty()) || frac.contains('.') {
        return None;
    }
    let digits = format!("{whole}{frac}");
    let numer: BigInt = digits.parse().ok()?;
    let denom = num_traits::pow(BigInt::from(10), frac.len());
    Some(Rational::new(numer, denom))
}

/// Element operations the parser needs.
trait Algebra {
    type Elem: Clone;
    fn constant(&self, c: Rational) -> Self::Elem;
    fn var(&self, sym: char, idx: usize) -> Result<Self::Elem, String>;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn scale(&self, a: &Self::Elem, c: &Rational) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem, String>;
    fn wick(&self, exps: Vec<(char, usize, u32)>) -> Result<Self::Elem, String>;
}

fn var_slot(dim: usize, sym: char, idx: usize, what: &str) -> Result<usize, String> {
    if idx > dim {
        return Err(format!("{sym}{idx} is out of range: the {what} has {dim} mode(s)"));
    }
    Ok(if sym == 'q' { idx - 1 } else { dim + idx - 1 })
}

struct PolyAlgebra(usize);

impl Algebra for PolyAlgebra {
    type Elem = Polynomial;

    fn constant(&self, c: Rational) -> Polynomial {
        Polynomial::constant(self.0, c)
    }

    fn var(&self, sym: char, idx: usize) -> Result<Polynomial, String> {
        var_slot(self.0, sym, idx, "phase space")?;
        Ok(if sym == 'q' {
            Polynomial::q(self.0, idx)
        } else {
            Polynomial::p(self.0, idx)
        })
    }

    fn add(&self, a: &Polynomial, b: &Polynomial) -> Polynomial {
        a.checked_add(b).expect("same dimension")
    }

    fn scale(&self, a: &Polynomial, c: &Rational) -> Polynomial {
        a.scaled(c)
    }

    fn mul(&self, a: &Polynomial, b: &Polynomial) -> Result<Polynomial, String> {
        a.checked_mul(b).map_err(|e| e.to_string())
    }

    fn wick(&self, _: Vec<(char, usize, u32)>) -> Result<Polynomial, String> {
        Err("Wick monomials are only allowed in chaos expressions".into())
    }
}

struct ChaosAlgebra(usize);

impl Algebra for ChaosAlgebra {
    type Elem = ChaosPoly;

    fn constant(&self, c: Rational) -> ChaosPoly {
        ChaosPoly::constant(self.0, c)
    }

    fn var(&self, sym: char, idx: usize) -> Result<ChaosPoly, String> {
        Ok(ChaosPoly::coordinate(self.0, var_slot(self.0, sym, idx, "white-noise truncation")?))
    }

    fn add(&self, a: &ChaosPoly, b: &ChaosPoly) -> ChaosPoly {
        a.checked_add(b).expect("same mode count")
    }

    fn scale(&self, a: &ChaosPoly, c: &Rational) -> ChaosPoly {
        a.scaled(c)
    }

    fn mul(&self, a: &ChaosPoly, b: &ChaosPoly) -> Result<ChaosPoly, String> {
        a.pointwise_product(b, u32::MAX).map_err(|e| e.to_string())
    }

    fn wick(&self, exps: Vec<(char, usize, u32)>) -> Result<ChaosPoly, String> {
        let mut alpha = vec![0u32; 2 * self.0];
        for (sym, idx, e) in exps {
            alpha[var_slot(self.0, sym, idx, "white-noise truncation")?] += e;
        }
        Ok(ChaosPoly::wick_monomial(self.0, MultiIndex::from_exponents(alpha), Rational::one()))
    }
}

struct Parser<'a, A: Algebra> {
    toks: Vec<Spanned>,
    pos: usize,
    alg: &'a A,
}

impl<A: Algebra> Parser<'_, A> {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, at: &Spanned, message: impl Into<String>) -> Result<T, ParseError> {
        err(at.line, at.column, message)
    }

    fn expr(&mut self) -> Result<A::Elem, ParseError> {
        let mut sign = Rational::one();
        match self.peek().tok {
            Tok::Minus => {
                self.bump();
                sign = -sign;
            }
            Tok::Plus => {
                self.bump();
            }
            _ => {}
        }
        let mut acc = self.alg.scale(&self.term()?, &sign);
        loop {
            let s = match self.peek().tok {
                Tok::Plus => Rational::one(),
                Tok::Minus => -Rational::one(),
                _ => return Ok(acc),
            };
            self.bump();
            let t = self.term()?;
            acc = self.alg.add(&acc, &self.alg.scale(&t, &s));
        }
    }

    fn starts_atom(tok: &Tok) -> bool {
        matches!(tok, Tok::Num(_) | Tok::Var(..) | Tok::LParen | Tok::Colon)
    }

    fn term(&mut self) -> Result<A::Elem, ParseError> {
        let mut acc = self.power()?;
        loop {
            let at = self.peek().clone();
            if at.tok == Tok::Star {
                self.bump();
            } else if !Self::starts_atom(&at.tok) {
                return Ok(acc);
            }
            let rhs = self.power()?;
            acc = self.alg.mul(&acc, &rhs).or_else(|m| self.fail(&at, m))?;
        }
    }

    fn exponent(&mut self) -> Result<Option<u32>, ParseError> {
        if self.peek().tok != Tok::Caret {
            return Ok(None);
        }
        self.bump();
        let at = self.bump();
        match &at.tok {
            Tok::Num(v) if v.is_integer() => match u32::try_from(v.to_integer()) {
                Ok(e) if e <= MAX_EXPONENT => Ok(Some(e)),
                _ => self.fail(&at, format!("exponent must be an integer between 0 and {MAX_EXPONENT}")),
            },
            _ => self.fail(&at, "expected a non-negative integer exponent"),
        }
    }

    fn power(&mut self) -> Result<A::Elem, ParseError> {
        let start = self.peek().clone();
        let base = self.atom()?;
        let Some(e) = self.exponent()? else {
            return Ok(base);
        };
        let mut acc = self.alg.constant(Rational::one());
        for _ in 0..e {
            acc = self.alg.mul(&acc, &base).or_else(|m| self.fail(&start, m))?;
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<A::Elem, ParseError> {
        let at = self.bump();
        match at.tok.clone() {
            Tok::Num(v) => {
                if self.peek().tok != Tok::Slash {
                    return Ok(self.alg.constant(v));
                }
                self.bump();
                let d = self.bump();
                match d.tok {
                    Tok::Num(w) if !w.is_zero() => Ok(self.alg.constant(v / w)),
                    Tok::Num(_) => self.fail(&d, "division by zero"),
                    _ => self.fail(&d, "expected a number after '/'"),
                }
            }
            Tok::Var(sym, idx) => self.alg.var(sym, idx).or_else(|m| self.fail(&at, m)),
            Tok::LParen => {
                let inner = self.expr()?;
                let close = self.bump();
                if close.tok != Tok::RParen {
                    return self.fail(&close, "expected ')'");
                }
                Ok(inner)
            }
            Tok::Colon => {
                let mut exps = Vec::new();
                loop {
                    let t = self.bump();
                    match t.tok {
                        Tok::Var(sym, idx) => {
                            let e = self.exponent()?.unwrap_or(1);
                            exps.push((sym, idx, e));
                        }
                        Tok::Star if !exps.is_empty() => {}
                        Tok::Colon if !exps.is_empty() => break,
                        _ => return self.fail(&t, "expected a variable inside ':...:'"),
                    }
                }
                self.alg.wick(exps).or_else(|m| self.fail(&at, m))
            }
            Tok::End => self.fail(&at, "unexpected end of expression"),
            _ => self.fail(&at, "expected a number, variable, '(' or ':'"),
        }
    }
}

fn parse_with<A: Algebra>(text: &str, alg: &A) -> Result<A::Elem, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        alg,
    };
    let value = p.expr()?;
    let rest = p.peek().clone();
    if rest.tok != Tok::End {
        return p.fail(&rest, "unexpected trailing input");
    }
    Ok(value)
}

/// A polynomial on `R^{2n}` in the variables `q1..qn, p1..pn`.
pub fn parse_polynomial(text: &str, n: usize) -> Result<Polynomial, ParseError> {
    parse_with(text, &PolyAlgebra(n))
}

/// A chaos expression over `K` modes.
pub fn parse_chaos(text: &str, modes: usize) -> Result<ChaosPoly, ParseError> {
    parse_with(text, &ChaosAlgebra(modes))
}

/// A comma-separated list of exact numbers such as `1, 1/2, 0.25`.
pub fn parse_rational_list(text: &str) -> Result<Vec<Rational>, ParseError> {
    let toks = lex(text)?;
    let mut out = Vec::new();
    let mut i = 0;
    loop {
        let mut sign = Rational::one();
        if toks[i].tok == Tok::Minus {
            sign = -sign;
            i += 1;
        }
        let Tok::Num(v) = toks[i].tok.clone() else {
            return err(toks[i].line, toks[i].column, "expected a number");
        };
        i += 1;
        let mut value = v;
        if toks[i].tok == Tok::Slash {
            match &toks[i + 1].tok {
                Tok::Num(w) if !w.is_zero() => value /= w,
                _ => return err(toks[i + 1].line, toks[i + 1].column, "expected a non-zero denominator"),
            }
            i += 2;
        }
        out.push(sign * value);
        match toks[i].tok {
            Tok::Comma => i += 1,
            Tok::End => return Ok(out),
            _ => return err(toks[i].line, toks[i].column, "expected ',' between values"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use cuntzq_core::scalar::{int, rat};

    #[test]
    fn polynomials() {
        let f = parse_polynomial("3/2 q1^2 p2 - q1*p1 + 0.25", 2).unwrap();
        let expected = Polynomial::q(2, 1)
            .pow(2)
            .checked_mul(&Polynomial::p(2, 2))
            .unwrap()
            .scaled(&rat(3, 2))
            .checked_sub(&Polynomial::q(2, 1).checked_mul(&Polynomial::p(2, 1)).unwrap())
            .unwrap()
            .checked_add(&Polynomial::constant(2, rat(1, 4)))
            .unwrap();
        assert_eq!(f, expected);
        assert_eq!(parse_polynomial("-(q1 + p1)^2", 1).unwrap(), parse_polynomial("-q1^2 - 2 q1 p1 - p1^2", 1).unwrap());
        assert_eq!(parse_polynomial("1", 1).unwrap(), Polynomial::one(1));
        // round trip through Display
        assert_eq!(parse_polynomial(&f.to_string(), 2).unwrap(), f);
    }

    #[test]
    fn chaos() {
        let x = parse_chaos("q1 q1", 2).unwrap();
        assert_eq!(x, parse_chaos(":q1^2: + 1", 2).unwrap());
        let w = parse_chaos("2 :q1 p2^2:", 2).unwrap();
        assert_eq!(w.coeff(&MultiIndex::from_exponents(vec![1, 0, 0, 2])), int(2));
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_polynomial("q1 +\n  q3", 2).unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        assert!(e.message.contains("out of range"));
        let e = parse_polynomial("q1 + # ", 1).unwrap_err();
        assert_eq!((e.line, e.column), (1, 6));
        assert_eq!(parse_polynomial("(q1", 1).unwrap_err().column, 4);
        assert_eq!(parse_polynomial("q1^x", 1).unwrap_err().column, 4);
        assert_eq!(parse_polynomial("q0", 1).unwrap_err().column, 1);
        assert_eq!(parse_polynomial(":q1:", 1).unwrap_err().column, 1);
        assert_eq!(parse_polynomial("1/0", 1).unwrap_err().column, 3);
        assert_eq!(parse_polynomial("", 1).unwrap_err().message, "unexpected end of expression");
        assert_eq!(parse_polynomial("q1 )", 1).unwrap_err().column, 4);
    }

    #[test]
    fn rational_lists() {
        assert_eq!(parse_rational_list("1, 1/2,-0.25").unwrap(), vec![int(1), rat(1, 2), rat(-1, 4)]);
        let e = parse_rational_list("1, , 2").unwrap_err();
        assert_eq!((e.line, e.column), (1, 4));
    }
}
