//! Recursive-descent parser for the polynomial text grammar:
//!
//! ```text
//! expr     := ['+'|'-'] term (('+'|'-') term)*
//! term     := factor ('*' factor)*
//! factor   := base ('^' uint)?
//! base     := rational | 'i' | identifier | '(' expr ')'
//! rational := int ('/' uint)?
//! ```
//!
//! A leading sign on an expression is accepted so that entries such as `-x`
//! can be written directly.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{AlgebraError, Field, Polynomial, Scalar, VarUniverse};

const MAX_EXPONENT: u32 = 1000;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    universe: &'a Arc<VarUniverse>,
    field: Field,
}

pub fn parse_polynomial(text: &str, universe: &Arc<VarUniverse>, field: Field) -> Result<Polynomial, AlgebraError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, universe, field };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(out)
}

impl<'a> Parser<'a> {
    fn error(&self, msg: &str) -> AlgebraError {
        AlgebraError::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Polynomial, AlgebraError> {
        let negate = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        let first = self.term()?;
        let mut acc = if negate { -&first } else { first };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, AlgebraError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial, AlgebraError> {
        let base = self.base()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            let digits = self.digits();
            if digits.is_empty() {
                return Err(self.error("expected exponent"));
            }
            let e: u32 = digits
                .parse()
                .ok()
                .filter(|&e| e <= MAX_EXPONENT)
                .ok_or(AlgebraError::Parse { pos: start, msg: "exponent too large".into() })?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn base(&mut self) -> Result<Polynomial, AlgebraError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let num: BigInt = self.digits().parse().expect("digit run");
                let mut value = BigRational::from_integer(num);
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    self.skip_ws();
                    let start = self.pos;
                    let den = self.digits();
                    if den.is_empty() {
                        return Err(self.error("expected denominator"));
                    }
                    let den: BigInt = den.parse().expect("digit run");
                    if den.is_zero() {
                        return Err(AlgebraError::Parse { pos: start, msg: "zero denominator".into() });
                    }
                    value /= BigRational::from_integer(den);
                }
                Ok(Polynomial::constant(self.universe, Scalar::real(value)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                if name == "i" {
                    if self.field == Field::Rational {
                        return Err(AlgebraError::Parse {
                            pos: start,
                            msg: "imaginary unit in a rational-field expression".into(),
                        });
                    }
                    return Ok(Polynomial::constant(self.universe, Scalar::i()));
                }
                Polynomial::var_named(self.universe, name)
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uni() -> Arc<VarUniverse> {
        VarUniverse::new(["x", "y"], ["X", "Y"]).unwrap()
    }

    #[test]
    fn simple_sum() {
        let u = uni();
        let p = parse_polynomial("x^2 + x*y", &u, Field::Rational).unwrap();
        assert_eq!(p.num_terms(), 2);
        assert_eq!(p.to_string(), "x^2 + x*y");
    }

    #[test]
    fn eigen_bouquet_product_expands() {
        let u = uni();
        let p = parse_polynomial("(y*Y + x*X)*(y*X - x*Y)", &u, Field::Rational).unwrap();
        let q = parse_polynomial("x*y*X^2 + (y^2 - x^2)*X*Y - x*y*Y^2", &u, Field::Rational).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn gaussian_coefficient() {
        let u = uni();
        let p = parse_polynomial("3/2*i*x", &u, Field::Gaussian).unwrap();
        let (m, c) = p.leading_term().unwrap();
        assert_eq!(m.exponents(), &[1, 0, 0, 0]);
        assert!(c.re().is_zero());
        assert_eq!(c.im(), &BigRational::new(3.into(), 2.into()));
        assert_eq!(p.to_string(), "3/2*i*x");
        assert!(parse_polynomial("3/2*i*x", &u, Field::Rational).is_err());
    }

    #[test]
    fn errors_carry_positions() {
        let u = uni();
        match parse_polynomial("x + * y", &u, Field::Rational) {
            Err(AlgebraError::Parse { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_polynomial("x + z", &u, Field::Rational),
            Err(AlgebraError::UnknownVariable(n)) if n == "z"
        ));
        assert!(parse_polynomial("(x + y", &u, Field::Rational).is_err());
        assert!(parse_polynomial("1/0", &u, Field::Rational).is_err());
    }

    #[test]
    fn complex_coefficient_round_trip() {
        let u = uni();
        let p = parse_polynomial("(1/2 - 3*i)*x*Y - i + 2", &u, Field::Gaussian).unwrap();
        let q = parse_polynomial(&p.to_string(), &u, Field::Gaussian).unwrap();
        assert_eq!(p, q);
    }
}
