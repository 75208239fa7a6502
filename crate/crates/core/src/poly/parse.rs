//! Recursive-descent parser for the polynomial grammar:
//!
//! ```text
//! expr     := ('+'|'-')? term (('+'|'-') term)*
//! term     := factor ('*' factor)*
//! factor   := base ('^' nonneg-int)?
//! base     := rational | var | '(' expr ')'
//! rational := int ('/' posint)?
//! var      := ('x' | 's') posint
//! ```
//!
//! Whitespace is insignificant. The result is fully expanded.

use alloc::string::{String, ToString};

use num_bigint::BigInt;
use num_traits::Zero;

use super::{MultiIndex, Polynomial, Rational};
use crate::error::{Error, Result};

/// Parses `text` as a polynomial in `nvars` variables.
pub fn parse(text: &str, nvars: usize) -> Result<Polynomial> {
    if nvars == 0 {
        return Err(Error::InvalidArgument("nvars must be positive".into()));
    }
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        nvars,
    };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    nvars: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn syntax(&self, message: &str) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut negate_first = false;
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                negate_first = true;
            }
            Some(b'+') => self.pos += 1,
            _ => {}
        }
        let mut acc = self.term()?;
        if negate_first {
            acc = -acc;
        }
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = &acc + &t;
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = &acc - &t;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let f = self.factor()?;
            acc = &acc * &f;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial> {
        let base = self.base()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.exponent()?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<u32> {
        self.skip_ws();
        let start = self.pos;
        let digits = self.digits();
        if digits.is_empty() {
            return Err(Error::BadExponent { offset: start });
        }
        if matches!(self.src.get(self.pos), Some(b'.') | Some(b'/')) {
            return Err(Error::BadExponent { offset: start });
        }
        digits
            .parse::<u32>()
            .map_err(|_| Error::BadExponent { offset: start })
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        // ASCII digits only, so this is valid UTF-8.
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn base(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.syntax("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let num: BigInt = self.digits().parse().map_err(|_| self.syntax("bad integer"))?;
                let mut value = Rational::from_integer(num);
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    self.skip_ws();
                    let at = self.pos;
                    let d = self.digits();
                    if d.is_empty() {
                        return Err(self.syntax("expected denominator"));
                    }
                    let den: BigInt = d.parse().map_err(|_| self.syntax("bad integer"))?;
                    if den.is_zero() {
                        return Err(Error::Syntax {
                            offset: at,
                            message: "zero denominator".into(),
                        });
                    }
                    value /= Rational::from_integer(den);
                }
                Ok(Polynomial::constant(self.nvars, value))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = core::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
                let unknown = || Error::UnknownVariable {
                    offset: start,
                    name: name.to_string(),
                };
                let (head, tail) = name.split_at(1);
                if !(head == "x" || head == "s")
                    || tail.is_empty()
                    || !tail.bytes().all(|b| b.is_ascii_digit())
                    || tail.starts_with('0')
                {
                    return Err(unknown());
                }
                let idx: usize = tail.parse().map_err(|_| unknown())?;
                if idx == 0 || idx > self.nvars {
                    return Err(unknown());
                }
                Ok(Polynomial::monomial(
                    MultiIndex::unit(self.nvars, idx - 1, 1),
                    Rational::from_integer(1.into()),
                ))
            }
            Some(_) => Err(self.syntax("expected a number, variable, or '('")),
            None => Err(self.syntax("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::int;
    use alloc::vec;

    #[test]
    fn expands_binomial_power() {
        let p = parse("(x1+x2)^4 - 8*x1^2*x2^2", 2).unwrap();
        let want = [
            (vec![4, 0], 1),
            (vec![3, 1], 4),
            (vec![2, 2], -2),
            (vec![1, 3], 4),
            (vec![0, 4], 1),
        ];
        assert_eq!(p.num_terms(), 5);
        for (e, c) in want {
            assert_eq!(p.coefficient(&MultiIndex::new(e)), int(c));
        }
    }

    #[test]
    fn zero_and_binomial() {
        assert!(parse("0", 3).unwrap().is_zero());
        let p = parse("(x1+x2)^2", 2).unwrap();
        assert_eq!(p.coefficient(&MultiIndex::new(vec![1, 1])), int(2));
    }

    #[test]
    fn rationals_and_s_variables() {
        let p = parse(" 3/6 * s1 + s2 ", 2).unwrap();
        assert_eq!(p.serialize(), "1/2*x1 + x2");
        assert_eq!(parse("-x1 + 2", 1).unwrap().serialize(), "-x1 + 2");
    }

    #[test]
    fn errors_carry_offsets() {
        assert_eq!(
            parse("x1 + x3", 2),
            Err(Error::UnknownVariable {
                offset: 5,
                name: "x3".into()
            })
        );
        assert!(matches!(parse("y1", 2), Err(Error::UnknownVariable { offset: 0, .. })));
        assert_eq!(parse("x1^-2", 1), Err(Error::BadExponent { offset: 3 }));
        assert_eq!(parse("x1^2.5", 1), Err(Error::BadExponent { offset: 3 }));
        assert!(matches!(parse("(x1+x2", 2), Err(Error::Syntax { offset: 6, .. })));
        assert!(matches!(parse("x1 x2", 2), Err(Error::Syntax { offset: 3, .. })));
        assert!(matches!(parse("1/0", 1), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse("", 1), Err(Error::Syntax { offset: 0, .. })));
    }
}
