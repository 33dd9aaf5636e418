//! Text form for Laurent polynomials.
//!
//! Grammar: terms sorted by descending exponent, joined by ` + ` / ` - `;
//! each term is `c*v^e` with `c*` omitted when |c| = 1, `^e` omitted when
//! e = 1, and the variable part omitted when e = 0. Example:
//! `-v^4 + v^3 + 2*v^-1 - 3`.

use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::poly::LaurentPoly;
use super::RingError;

pub fn render(p: &LaurentPoly, default_var: &str) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let var = p.var().unwrap_or(default_var);
    let mut out = String::new();
    let mut terms: Vec<(i64, BigInt)> = p.terms().map(|(e, c)| (e, c.clone())).collect();
    terms.sort_by(|a, b| b.0.cmp(&a.0));
    for (i, (e, c)) in terms.iter().enumerate() {
        let neg = c.is_negative();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mag = c.abs();
        if *e == 0 {
            out.push_str(&mag.to_string());
        } else {
            if !mag.is_one() {
                out.push_str(&mag.to_string());
                out.push('*');
            }
            out.push_str(var);
            if *e != 1 {
                out.push('^');
                out.push_str(&e.to_string());
            }
        }
    }
    out
}

/// Parse the grammar above. The variable may be any identifier; the first
/// one seen binds the polynomial's symbol and later ones must match.
pub fn parse(input: &str) -> Result<LaurentPoly, RingError> {
    let mut p = Parser { s: input.as_bytes(), i: 0 };
    p.skip_ws();
    if p.done() {
        return Err(p.err("empty input"));
    }
    let mut acc = LaurentPoly::zero();
    let mut sign: i64 = 1;
    if p.eat(b'-') {
        sign = -1;
    } else {
        let _ = p.eat(b'+');
    }
    loop {
        p.skip_ws();
        let term = p.term(sign)?;
        acc = acc.checked_add(&term)?;
        p.skip_ws();
        if p.done() {
            return Ok(acc);
        }
        if p.eat(b'+') {
            sign = 1;
        } else if p.eat(b'-') {
            sign = -1;
        } else {
            return Err(p.err("expected `+` or `-` between terms"));
        }
    }
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
}

impl<'a> Parser<'a> {
    fn done(&self) -> bool {
        self.i >= self.s.len()
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.i).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ') | Some(b'\t')) {
            self.i += 1;
        }
    }

    fn err(&self, msg: &str) -> RingError {
        RingError::Parse { at: self.i, msg: msg.to_string() }
    }

    fn integer(&mut self) -> Result<BigInt, RingError> {
        let neg = self.eat(b'-');
        let start = self.i;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.i += 1;
        }
        if self.i == start {
            return Err(self.err("expected digits"));
        }
        let digits = std::str::from_utf8(&self.s[start..self.i]).unwrap();
        let mut n: BigInt = digits.parse().map_err(|_| self.err("bad integer"))?;
        if neg {
            n = -n;
        }
        Ok(n)
    }

    fn ident(&mut self) -> Option<String> {
        let start = self.i;
        if !matches!(self.peek(), Some(c) if c.is_ascii_alphabetic() || c == b'_') {
            return None;
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
            self.i += 1;
        }
        Some(std::str::from_utf8(&self.s[start..self.i]).unwrap().to_string())
    }

    /// One term after its leading sign has been consumed.
    fn term(&mut self, sign: i64) -> Result<LaurentPoly, RingError> {
        let mut coeff = BigInt::from(sign);
        let mut saw_coeff = false;
        if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            coeff *= self.integer()?;
            saw_coeff = true;
            self.skip_ws();
            if self.eat(b'*') {
                self.skip_ws();
            }
        }
        match self.ident() {
            Some(var) => {
                let exp = if self.eat(b'^') { exp_i64(self.integer()?)? } else { 1 };
                Ok(LaurentPoly::monomial(&var, coeff, exp))
            }
            None => {
                if saw_coeff {
                    Ok(LaurentPoly::constant(coeff))
                } else {
                    Err(self.err("expected a coefficient or variable"))
                }
            }
        }
    }
}

fn exp_i64(n: BigInt) -> Result<i64, RingError> {
    use num_traits::ToPrimitive;
    n.to_i64().ok_or(RingError::Parse { at: 0, msg: "exponent out of range".to_string() })
}
