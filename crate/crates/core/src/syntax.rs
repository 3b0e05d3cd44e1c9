//! Text syntax for polynomials and derivations.
//!
//! `x1^(3)*x4 - 2*x5` is a polynomial: `xk` is the k-th variable, `^(e)` a
//! divided power (even variables only), integers are read mod p. Products are
//! real products in the algebra, so `x3*x3` is `0` and `x1*x1` is `2*x1^(2)`.
//! A derivation is a sum of terms `f*dk` or `dk`, e.g. `x1*d1 + 2*d3`.
//! Printing uses `Display` on `Poly` and `SuperDerivation`, which this parser accepts.

use crate::error::{Error, Result};
use crate::superalg::{Poly, Shape};
use crate::witt::SuperDerivation;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    shape: &'a Shape,
}

impl<'a> Parser<'a> {
    fn new(shape: &'a Shape, src: &'a str) -> Self {
        Parser {
            src: src.as_bytes(),
            pos: 0,
            shape,
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
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

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn number(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        text.parse().or_else(|_| self.err("number too large"))
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    /// `[sign] term (sign term)*`.
    fn sum<T>(&mut self, mut term: impl FnMut(&mut Self) -> Result<T>, mut add: impl FnMut(T, u32)) -> Result<()> {
        let field = *self.shape.field();
        let mut sign = if self.eat(b'-') {
            field.neg(1)
        } else {
            self.eat(b'+');
            1
        };
        loop {
            let t = term(self)?;
            add(t, sign);
            sign = if self.eat(b'+') {
                1
            } else if self.eat(b'-') {
                field.neg(1)
            } else {
                return Ok(());
            };
        }
    }

    fn poly_expr(&mut self) -> Result<Poly> {
        let field = *self.shape.field();
        let mut out = Poly::zero();
        self.sum(|p| p.poly_term(), |t, s| out.add_scaled(&t, s, &field))?;
        Ok(out)
    }

    fn poly_term(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            let save = self.pos;
            self.pos += 1;
            if self.peek() == Some(b'd') {
                self.pos = save;
                break;
            }
            let f = self.factor()?;
            acc = self.shape.mul(&acc, &f)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.poly_expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let v = self.number()?;
                Ok(self.shape.constant((v % self.shape.p() as u64) as u32))
            }
            Some(b'x') => {
                self.pos += 1;
                let at = self.pos;
                let i = self.number()? as usize;
                if i == 0 || i > self.shape.num_vars() {
                    self.pos = at;
                    return self.err(format!("variable x{i} out of range 1..={}", self.shape.num_vars()));
                }
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    self.expect(b'(')?;
                    let e = self.number()?;
                    self.expect(b')')?;
                    if i > self.shape.n() {
                        return self.err(format!("x{i} is odd and has no divided powers"));
                    }
                    if e > self.shape.bounds()[i - 1] as u64 {
                        return self.err(format!("x{i}^({e}) exceeds the truncation"));
                    }
                    return self.shape.divided_power(i, e as u32);
                }
                self.shape.var(i)
            }
            Some(_) => self.err("unexpected character"),
            None => self.err("unexpected end of input"),
        }
    }

    fn direction(&mut self) -> Result<usize> {
        self.expect(b'd')?;
        let at = self.pos;
        let r = self.number()? as usize;
        if self.shape.check_direction(r).is_err() {
            self.pos = at;
            return self.err(format!("direction d{r} out of range"));
        }
        Ok(r)
    }

    fn deriv_term(&mut self) -> Result<(Poly, usize)> {
        if self.peek() == Some(b'd') {
            return Ok((self.shape.one(), self.direction()?));
        }
        let coeff = self.poly_term()?;
        self.expect(b'*')?;
        Ok((coeff, self.direction()?))
    }
}

pub fn parse_poly(shape: &Shape, src: &str) -> Result<Poly> {
    let mut p = Parser::new(shape, src);
    let out = p.poly_expr()?;
    if !p.at_end() {
        return p.err("trailing input");
    }
    Ok(out)
}

pub fn parse_derivation(shape: &Shape, src: &str) -> Result<SuperDerivation> {
    if src.trim() == "0" {
        return Ok(SuperDerivation::zero());
    }
    let mut p = Parser::new(shape, src);
    let mut out = SuperDerivation::zero();
    let mut terms = Vec::new();
    p.sum(|p| p.deriv_term(), |t, s| terms.push((t, s)))?;
    if !p.at_end() {
        return p.err("trailing input");
    }
    for ((f, r), s) in terms {
        out.add_term(r, &f, s, shape);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn shape(n: usize, p: u32) -> Shape {
        Shape::contact_default(n, p).unwrap()
    }

    #[test]
    fn basic_polynomials() {
        let s = shape(2, 3);
        let f = parse_poly(&s, "x1^(2)*x4*x5").unwrap();
        assert_eq!(f.to_string(), "x1^(2)*x4*x5");
        assert_eq!(parse_poly(&s, "1").unwrap(), s.one());
        assert_eq!(parse_poly(&s, "0").unwrap(), Poly::zero());
        assert_eq!(parse_poly(&s, "x1*x1").unwrap().to_string(), "2*x1^(2)");
        assert!(parse_poly(&s, "x3*x3").unwrap().is_zero());
        assert_eq!(parse_poly(&s, "x4*x3").unwrap().to_string(), "2*x3*x4");
        assert_eq!(parse_poly(&s, "-x1 + 4*x2").unwrap().to_string(), "x2 + 2*x1");
        assert_eq!(parse_poly(&s, "2*(x1 + x2)").unwrap(), parse_poly(&s, "2*x1+2*x2").unwrap());
    }

    #[test]
    fn rejected_input() {
        let s = shape(1, 3);
        for bad in ["x4", "x0", "x2^(2)", "x1^(3)", "x1 +", "y1", "x1 x2", "(x1", "d1"] {
            assert!(matches!(parse_poly(&s, bad), Err(Error::Parse { .. })), "{bad}");
        }
    }

    #[test]
    fn derivations() {
        let s = shape(1, 3);
        let d = parse_derivation(&s, "x1*d1 + 2*d3").unwrap();
        assert_eq!(d.to_string(), "x1*d1 + 2*d3");
        let d = parse_derivation(&s, "d2 - x1^(2)*x3*d2").unwrap();
        assert_eq!(parse_derivation(&s, &d.to_string()).unwrap(), d);
        assert!(parse_derivation(&s, "x1*d4").is_err());
        assert!(parse_derivation(&s, "x1").is_err());
    }

    fn poly_strategy(s: Shape) -> impl Strategy<Value = Poly> {
        let basis = s.full_basis();
        let p = s.p();
        prop::collection::vec((0..basis.len(), 1..p), 0..6).prop_map(move |terms| {
            let mut f = Poly::zero();
            for (i, c) in terms {
                f.add_term(basis[i].clone(), c, s.field());
            }
            f
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(f in poly_strategy(shape(2, 3))) {
            let s = shape(2, 3);
            prop_assert_eq!(parse_poly(&s, &f.to_string()).unwrap(), f);
        }

        #[test]
        fn derivation_round_trip(f in poly_strategy(shape(1, 5)), g in poly_strategy(shape(1, 5)), r in 1usize..=3) {
            let s = shape(1, 5);
            let mut d = SuperDerivation::term(f, r);
            d.add_term(1, &g, 1, &s);
            prop_assert_eq!(parse_derivation(&s, &d.to_string()).unwrap(), d);
        }
    }
}
