//! Reader for the polynomial text grammar.
//!
//! ```text
//! poly   := sign? term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := int ('/' int)? | ident ('^' int)?
//! ident  := [A-Za-z][A-Za-z0-9_]*
//! ```
//!
//! Whitespace is ignored between tokens.

use num_bigint::BigInt;

use crate::context::Ctx;
use crate::error::{Error, Result};
use crate::monomial::Monomial;
use crate::polynomial::Polynomial;

pub(crate) struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    pub(crate) fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    pub(crate) fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    pub(crate) fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    pub(crate) fn error(&self, message: impl Into<String>) -> Error {
        Error::Syntax { position: self.pos, message: message.into() }
    }

    pub(crate) fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    pub(crate) fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let len = rest.bytes().take_while(u8::is_ascii_digit).count();
        if len == 0 {
            return Err(self.error("expected an integer"));
        }
        self.pos += len;
        Ok(rest[..len].parse().expect("digits parse"))
    }

    pub(crate) fn small_integer(&mut self) -> Result<u32> {
        let start = self.pos;
        let v = self.integer()?;
        u32::try_from(v).map_err(|_| Error::Syntax {
            position: start,
            message: "exponent too large".into(),
        })
    }

    pub(crate) fn identifier(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let mut chars = rest.char_indices();
        match chars.next() {
            Some((_, c)) if c.is_ascii_alphabetic() => {}
            _ => return Err(self.error("expected an identifier")),
        }
        let len = chars
            .find(|(_, c)| !(c.is_ascii_alphanumeric() || *c == '_'))
            .map(|(i, _)| i)
            .unwrap_or(rest.len());
        self.pos += len;
        Ok(&rest[..len])
    }
}

/// Parses `text` into a canonical polynomial over `ctx`.
pub fn parse_polynomial(text: &str, ctx: &Ctx) -> Result<Polynomial> {
    let mut cur = Cursor::new(text);
    let p = parse_sum(&mut cur, ctx)?;
    if !cur.at_end() {
        return Err(cur.error("unexpected trailing input"));
    }
    Ok(p)
}

fn parse_sum(cur: &mut Cursor<'_>, ctx: &Ctx) -> Result<Polynomial> {
    let mut negative = if cur.eat('-') {
        true
    } else {
        cur.eat('+');
        false
    };
    let mut terms = Vec::new();
    loop {
        let (m, c) = parse_term(cur, ctx)?;
        terms.push((m, if negative { -c } else { c }));
        if cur.eat('+') {
            negative = false;
        } else if cur.eat('-') {
            negative = true;
        } else {
            break;
        }
    }
    Ok(Polynomial::from_terms(ctx, terms))
}

fn parse_term(
    cur: &mut Cursor<'_>,
    ctx: &Ctx,
) -> Result<(Monomial, crate::field::Scalar)> {
    let field = ctx.field();
    let mut coeff = field.one();
    let mut exps = vec![0u32; ctx.len()];
    loop {
        match cur.peek() {
            Some(c) if c.is_ascii_digit() => {
                let num = cur.integer()?;
                let value = if cur.eat('/') {
                    let den = cur.integer()?;
                    field.from_ratio(&num, &den)?
                } else {
                    field.from_bigint(&num)
                };
                coeff = &coeff * &value;
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let name = cur.identifier()?;
                let idx = ctx
                    .index_of(name)
                    .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
                let e = if cur.eat('^') { cur.small_integer()? } else { 1 };
                exps[idx] += e;
            }
            _ => return Err(cur.error("expected a number or a variable")),
        }
        if !cur.eat('*') {
            break;
        }
    }
    Ok((Monomial::new(exps), coeff))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::VarContext;
    use crate::field::Field;

    #[test]
    fn reads_rational_coefficients() {
        let c = VarContext::new(&["x1", "x2"], Field::Rationals).unwrap();
        let p = parse_polynomial("x1 + 3/2*x2^2", &c).unwrap();
        assert_eq!(p.num_terms(), 2);
        assert_eq!(
            p.coefficient(&Monomial::new(vec![0, 2])),
            Field::Rationals
                .from_ratio(&BigInt::from(3), &BigInt::from(2))
                .unwrap()
        );
        assert_eq!(p.coefficient(&Monomial::new(vec![1, 0])), Field::Rationals.one());
    }

    #[test]
    fn errors_are_reported() {
        let c = VarContext::new(&["x1"], Field::Prime(5)).unwrap();
        assert!(matches!(
            parse_polynomial("1/5*x1", &c),
            Err(Error::NonInvertibleDenominator(_))
        ));
        assert_eq!(
            parse_polynomial("x1 + y", &c),
            Err(Error::UnknownVariable("y".into()))
        );
        assert!(matches!(
            parse_polynomial("x1 + * 2", &c),
            Err(Error::Syntax { position: 5, .. })
        ));
        assert!(matches!(parse_polynomial("", &c), Err(Error::Syntax { .. })));
        assert!(matches!(parse_polynomial("x1 x1", &c), Err(Error::Syntax { .. })));
    }

    #[test]
    fn gf_coefficients_reduce() {
        let c = VarContext::new(&["x"], Field::Prime(5)).unwrap();
        let p = parse_polynomial("x - x^5 + 1/2", &c).unwrap();
        assert_eq!(p.to_string(), "4*x^5 + x + 3");
    }
}
