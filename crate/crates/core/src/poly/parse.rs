//! Text grammar for polynomials and derivations.
//!
//! ```text
//! poly   ::= [sign] term (sign term)*
//! term   ::= rational ["*" factor ("*" factor)*] | factor ("*" factor)*
//! factor ::= "x" index ["^" exponent]
//! rational ::= integer ["/" positive-integer]
//! ```
//!
//! Whitespace is ignored and parentheses are rejected. Derivations use the same
//! grammar with one extra factor `d<i>` (the partial `∂_i`) required exactly
//! once in every term, e.g. `x2*d1 - 3/2*x1^2*d2`.

use super::{MultiIndex, Poly};
use crate::error::{Error, Result};
use crate::poly::Derivation;
use crate::rational::Rational;

pub fn parse_poly(text: &str, dim: usize) -> Result<Poly> {
    let terms = Parser::new(text, dim, false).parse()?;
    Ok(Poly::from_terms(dim, terms.into_iter().map(|t| (t.exp, t.coeff))))
}

pub fn parse_derivation(text: &str, dim: usize) -> Result<Derivation> {
    if text.trim() == "0" && dim > 0 {
        return Ok(Derivation::zero(dim));
    }
    let terms = Parser::new(text, dim, true).parse()?;
    let mut comps: Vec<Vec<(MultiIndex, Rational)>> = vec![Vec::new(); dim];
    for t in terms {
        let slot = t.partial.expect("derivation terms always carry a partial");
        comps[slot].push((t.exp, t.coeff));
    }
    Ok(Derivation::new(
        comps.into_iter().map(|c| Poly::from_terms(dim, c)).collect(),
    ))
}

struct Term {
    coeff: Rational,
    exp: MultiIndex,
    partial: Option<usize>,
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    dim: usize,
    derivation: bool,
    text: &'a str,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, dim: usize, derivation: bool) -> Self {
        let chars = text.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
        Parser { chars, pos: 0, dim, derivation, text }
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map(|(i, _)| *i).unwrap_or(self.text.len())
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|(_, c)| *c)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        self.pos += 1;
        c
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.offset(), message: message.into() })
    }

    fn parse(mut self) -> Result<Vec<Term>> {
        if self.dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if self.chars.is_empty() {
            return self.err("empty expression");
        }
        let mut terms = Vec::new();
        let mut negative = match self.peek() {
            Some('+') => {
                self.bump();
                false
            }
            Some('-') | Some('−') => {
                self.bump();
                true
            }
            _ => false,
        };
        loop {
            let mut term = self.term()?;
            if negative {
                term.coeff = -term.coeff;
            }
            terms.push(term);
            match self.peek() {
                None => break,
                Some('+') => negative = false,
                Some('-') | Some('−') => negative = true,
                Some(c) => return self.err(format!("unexpected `{c}`")),
            }
            self.bump();
        }
        Ok(terms)
    }

    fn term(&mut self) -> Result<Term> {
        let mut term = Term { coeff: Rational::ONE, exp: MultiIndex::zero(self.dim), partial: None };
        let mut need_factor = true;
        if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            term.coeff = self.rational()?;
            if self.peek() == Some('*') {
                self.bump();
            } else {
                need_factor = false;
            }
        }
        if need_factor {
            loop {
                self.factor(&mut term)?;
                if self.peek() == Some('*') {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        if self.derivation && term.partial.is_none() {
            return self.err("derivation term needs a partial factor `d<i>`");
        }
        Ok(term)
    }

    fn factor(&mut self, term: &mut Term) -> Result<()> {
        let start = self.offset();
        match self.bump() {
            Some('x') => {
                let index = self.index()?;
                let var = self.check_index(index)?;
                let mut e = 1u16;
                if self.peek() == Some('^') {
                    self.bump();
                    let n = self.integer()?;
                    e = u16::try_from(n).or_else(|_| self.err("exponent too large"))?;
                }
                let slot = &mut term.exp.entries_mut()[var];
                *slot = slot.checked_add(e).map_or_else(|| self.err("exponent too large"), Ok)?;
                Ok(())
            }
            Some('d') if self.derivation => {
                let index = self.index()?;
                let var = self.check_index(index)?;
                if term.partial.is_some() {
                    return Err(Error::Syntax { pos: start, message: "more than one partial factor in a term".into() });
                }
                term.partial = Some(var);
                Ok(())
            }
            Some('(') | Some(')') => Err(Error::Syntax { pos: start, message: "parentheses are not supported".into() }),
            Some(c) => Err(Error::Syntax { pos: start, message: format!("expected a factor, found `{c}`") }),
            None => Err(Error::Syntax { pos: start, message: "expected a factor, found end of input".into() }),
        }
    }

    fn check_index(&self, index: u64) -> Result<usize> {
        if index == 0 || index as usize > self.dim {
            return Err(Error::VariableOutOfRange { index: index as usize, dim: self.dim });
        }
        Ok(index as usize - 1)
    }

    fn index(&mut self) -> Result<u64> {
        if !matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            return self.err("expected a variable index");
        }
        self.integer()
    }

    fn digits(&mut self) -> Result<String> {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        if s.is_empty() {
            return self.err("expected digits");
        }
        Ok(s)
    }

    fn integer(&mut self) -> Result<u64> {
        let s = self.digits()?;
        s.parse::<u64>().or_else(|_| self.err("integer too large"))
    }

    fn rational(&mut self) -> Result<Rational> {
        let num = self.digits()?;
        let lit = if self.peek() == Some('/') {
            self.bump();
            let den = self.digits()?;
            if den.bytes().all(|b| b == b'0') {
                return self.err("zero denominator");
            }
            format!("{num}/{den}")
        } else {
            num
        };
        lit.parse::<Rational>().or_else(|e| self.err(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp(e: &[u16]) -> MultiIndex {
        MultiIndex::from_slice(e)
    }

    #[test]
    fn zero_literal() {
        assert_eq!(parse_poly("0", 1).unwrap(), Poly::zero(1));
    }

    #[test]
    fn grammar_reading() {
        let p = parse_poly("3/2*x1^2*x2 - x2", 2).unwrap();
        assert_eq!(
            p.terms(),
            &[(exp(&[2, 1]), Rational::new(3, 2)), (exp(&[0, 1]), Rational::from_int(-1))]
        );
    }

    #[test]
    fn parentheses_rejected() {
        match parse_poly("(x1-1)*(x1+1)", 1) {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 0),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn errors_report_position_and_range() {
        assert!(matches!(parse_poly("x1 + x3", 2), Err(Error::VariableOutOfRange { index: 3, dim: 2 })));
        assert!(matches!(parse_poly("x0", 2), Err(Error::VariableOutOfRange { index: 0, .. })));
        assert!(matches!(parse_poly("x1 +", 1), Err(Error::Syntax { pos: 4, .. })));
        assert!(matches!(parse_poly("2/0*x1", 1), Err(Error::Syntax { .. })));
        assert!(matches!(parse_poly("x1 ** x1", 1), Err(Error::Syntax { .. })));
        assert!(matches!(parse_poly("", 1), Err(Error::Syntax { .. })));
        assert!(matches!(parse_poly("y1", 1), Err(Error::Syntax { pos: 0, .. })));
    }

    #[test]
    fn whitespace_and_repeats() {
        let a = parse_poly(" x1 * x1 +  2 x1", 1);
        assert!(a.is_err(), "implicit multiplication is not in the grammar");
        let b = parse_poly(" x1 * x1 + 2 * x1 - 1/3", 1).unwrap();
        assert_eq!(b.to_string(), "x1^2 + 2*x1 - 1/3");
        assert_eq!(parse_poly("x1 - x1", 1).unwrap(), Poly::zero(1));
        assert_eq!(parse_poly("-x1", 1).unwrap().to_string(), "-x1");
    }

    #[test]
    fn derivations() {
        let e = parse_derivation("x2*d1 + d2", 2).unwrap();
        assert_eq!(e.coeff(0), &parse_poly("x2", 2).unwrap());
        assert_eq!(e.coeff(1), &Poly::one(2));
        assert_eq!(e.to_string(), "x2*d1 + d2");
        assert!(parse_derivation("x1", 1).is_err());
        assert!(parse_derivation("d1*d1", 1).is_err());
        assert!(parse_derivation("d3", 2).is_err());
        assert_eq!(parse_derivation("0*d1", 1).unwrap(), Derivation::zero(1));
    }
}
