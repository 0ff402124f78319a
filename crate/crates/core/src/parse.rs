//! Text syntax for polynomials, rational functions, differential forms and
//! divisors.
//!
//! ```text
//! poly     = ['+'|'-'] term (('+'|'-') term)*
//! term     = factor (['*'] factor)*
//! factor   = (uint | var | '(' poly ')') ['^' uint]
//! rational = poly ['/' factor]
//! form     = ['-'] summand (('+'|'-') summand)*
//! summand  = ['(' rational ')'] 'd'var ('^' 'd'var)*
//! divisor  = entry (',' entry)*      entry = poly ':' uint | 'H' ':' int
//! ```
//!
//! Integer coefficients are reduced mod `p`. Variables must belong to the
//! declared list; positions in errors are byte offsets into the input.

use thiserror::Error;

use crate::field::Field;
use crate::forms::DiffForm;
use crate::poly::{Poly, RationalFn};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("at position {pos}: expected {expected}, found {found}")]
    Unexpected {
        pos: usize,
        expected: String,
        found: String,
    },
    #[error("at position {pos}: unknown variable '{name}'")]
    UnknownVariable { pos: usize, name: String },
    #[error("at position {pos}: denominator is zero")]
    ZeroDenominator { pos: usize },
    #[error("at position {pos}: summand has degree {got}, expected {expected}")]
    DegreeMismatch {
        pos: usize,
        expected: usize,
        got: usize,
    },
    #[error("at position {pos}: number '{text}' is out of range")]
    BadNumber { pos: usize, text: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Num(String),
    Ident(String),
    Sym(char),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(s) => format!("number '{}'", s),
            Tok::Ident(s) => format!("'{}'", s),
            Tok::Sym(c) => format!("'{}'", c),
            Tok::End => "end of input".to_string(),
        }
    }
}

fn lex(text: &str, offset: usize) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            out.push((offset + start, Tok::Num(text[start..i].to_string())));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((offset + start, Tok::Ident(text[start..i].to_string())));
        } else if "+-*^/()".contains(c) {
            out.push((offset + i, Tok::Sym(c)));
            i += 1;
        } else {
            let ch = text[i..].chars().next().unwrap();
            return Err(ParseError::Unexpected {
                pos: offset + i,
                expected: "a number, variable or operator".into(),
                found: format!("'{}'", ch),
            });
        }
    }
    out.push((offset + text.len(), Tok::End));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    field: &'a Field,
    vars: &'a [String],
}

impl<'a> Parser<'a> {
    fn new(text: &str, offset: usize, field: &'a Field, vars: &'a [String]) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(text, offset)?,
            at: 0,
            field,
            vars,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
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

    fn unexpected(&self, expected: &str) -> ParseError {
        ParseError::Unexpected {
            pos: self.pos(),
            expected: expected.to_string(),
            found: self.peek().describe(),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("'{}'", c)))
        }
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    fn nvars(&self) -> usize {
        self.vars.len()
    }

    fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    fn uint(&mut self) -> Result<u64, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Num(s) => s.parse().map_err(|_| ParseError::BadNumber { pos, text: s }),
            other => Err(ParseError::Unexpected {
                pos,
                expected: "an unsigned integer".into(),
                found: other.describe(),
            }),
        }
    }

    fn number_mod_p(&self, digits: &str) -> i64 {
        let p = self.field.p() as u64;
        digits
            .bytes()
            .fold(0u64, |acc, d| (acc * 10 + (d - b'0') as u64) % p) as i64
    }

    fn starts_factor(&self) -> bool {
        match self.peek() {
            Tok::Num(_) | Tok::Sym('(') => true,
            Tok::Ident(name) => self.var_index(name).is_some(),
            _ => false,
        }
    }

    fn poly(&mut self) -> Result<Poly, ParseError> {
        let mut negate = false;
        if self.eat('-') {
            negate = true;
        } else {
            self.eat('+');
        }
        let mut acc = self.term()?;
        if negate {
            acc = -acc;
        }
        loop {
            if self.eat('+') {
                acc = acc + self.term()?;
            } else if self.eat('-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.factor()?;
        loop {
            // '*' is optional between factors
            if self.eat('*') || self.starts_factor() {
                acc = acc * self.factor()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Poly, ParseError> {
        let pos = self.pos();
        let base = match self.bump() {
            Tok::Num(s) => {
                let c = self.field.from_int(self.number_mod_p(&s));
                Poly::constant(&c, self.nvars())
            }
            Tok::Ident(name) => match self.var_index(&name) {
                Some(i) => Poly::var(self.field, self.nvars(), i),
                None => return Err(ParseError::UnknownVariable { pos, name }),
            },
            Tok::Sym('(') => {
                let inner = self.poly()?;
                self.expect(')')?;
                inner
            }
            other => {
                return Err(ParseError::Unexpected {
                    pos,
                    expected: "a number, variable or '('".into(),
                    found: other.describe(),
                })
            }
        };
        if self.eat('^') {
            let n = self.uint()?;
            return Ok(base.pow(n));
        }
        Ok(base)
    }

    fn rational(&mut self) -> Result<RationalFn, ParseError> {
        let num = self.poly()?;
        if *self.peek() == Tok::Sym('/') {
            self.bump();
            let pos = self.pos();
            let den = self.factor()?;
            return RationalFn::new(num, den).map_err(|_| ParseError::ZeroDenominator { pos });
        }
        Ok(RationalFn::from_poly(num))
    }

    /// `d<var>`; returns the variable index.
    fn differential(&mut self) -> Result<usize, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(name) if name.starts_with('d') => match self.var_index(&name[1..]) {
                Some(i) => {
                    self.bump();
                    Ok(i)
                }
                None => Err(ParseError::UnknownVariable {
                    pos: pos + 1,
                    name: name[1..].to_string(),
                }),
            },
            _ => Err(self.unexpected("a differential 'd<var>'")),
        }
    }

    fn summand(&mut self) -> Result<(RationalFn, Vec<usize>, usize), ParseError> {
        let pos = self.pos();
        let coeff = if self.eat('(') {
            let r = self.rational()?;
            self.expect(')')?;
            r
        } else {
            RationalFn::from_poly(Poly::one(self.field, self.nvars()))
        };
        let mut idx = vec![self.differential()?];
        while self.eat('^') {
            idx.push(self.differential()?);
        }
        Ok((coeff, idx, pos))
    }

    fn form(&mut self) -> Result<DiffForm, ParseError> {
        let mut negate = self.eat('-');
        let mut out: Option<DiffForm> = None;
        loop {
            let (coeff, idx, pos) = self.summand()?;
            let coeff = if negate { coeff.neg() } else { coeff };
            let form = out.get_or_insert_with(|| {
                DiffForm::zero(self.field, self.vars.len(), idx.len()).expect("degree checked below")
            });
            if idx.len() != form.degree() {
                return Err(ParseError::DegreeMismatch {
                    pos,
                    expected: form.degree(),
                    got: idx.len(),
                });
            }
            form.add_term(coeff, &idx)
                .expect("indices come from the variable list");
            if self.eat('+') {
                negate = false;
            } else if self.eat('-') {
                negate = true;
            } else {
                return Ok(out.unwrap());
            }
        }
    }
}

pub fn parse_poly(text: &str, field: &Field, vars: &[String]) -> Result<Poly, ParseError> {
    let mut p = Parser::new(text, 0, field, vars)?;
    let out = p.poly()?;
    p.expect_end()?;
    Ok(out)
}

pub fn parse_rational(text: &str, field: &Field, vars: &[String]) -> Result<RationalFn, ParseError> {
    let mut p = Parser::new(text, 0, field, vars)?;
    let out = p.rational()?;
    p.expect_end()?;
    Ok(out)
}

/// Parses a differential form such as `(X/(X^3+Y^3+Z^3+1)) dX^dY^dZ`.
pub fn parse_form(text: &str, field: &Field, vars: &[String]) -> Result<DiffForm, ParseError> {
    let mut p = Parser::new(text, 0, field, vars)?;
    let out = p.form()?;
    p.expect_end()?;
    Ok(out)
}

/// A parsed divisor: hypersurfaces with multiplicities and the hyperplane
/// multiplicity `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorText {
    pub hypersurfaces: Vec<(Poly, u32)>,
    pub k: i64,
}

/// Parses `poly:mult[,poly:mult...][,H:k]`. The empty string is the zero divisor.
pub fn parse_divisor(text: &str, field: &Field, vars: &[String]) -> Result<DivisorText, ParseError> {
    let mut out = DivisorText {
        hypersurfaces: Vec::new(),
        k: 0,
    };
    if text.trim().is_empty() {
        return Ok(out);
    }
    let mut offset = 0;
    for entry in text.split(',') {
        let start = offset;
        offset += entry.len() + 1;
        let Some((lhs, rhs)) = entry.rsplit_once(':') else {
            return Err(ParseError::Unexpected {
                pos: start + entry.len(),
                expected: "':' followed by a multiplicity".into(),
                found: "end of entry".into(),
            });
        };
        let rhs_pos = start + lhs.len() + 1;
        let mult_text = rhs.trim();
        if lhs.trim() == "H" {
            out.k += mult_text.parse::<i64>().map_err(|_| ParseError::BadNumber {
                pos: rhs_pos,
                text: mult_text.to_string(),
            })?;
            continue;
        }
        let mult = mult_text.parse::<u32>().map_err(|_| ParseError::BadNumber {
            pos: rhs_pos,
            text: mult_text.to_string(),
        })?;
        let mut p = Parser::new(lhs, start, field, vars)?;
        let f = p.poly()?;
        p.expect_end()?;
        out.hypersurfaces.push((f, mult));
    }
    Ok(out)
}

/// Parses a univariate polynomial in any single variable into integer
/// coefficients, low degree first.
pub fn parse_univariate(text: &str, p: u64) -> Result<Vec<i64>, ParseError> {
    let field = Field::prime(p).map_err(|_| ParseError::BadNumber {
        pos: 0,
        text: p.to_string(),
    })?;
    let mut var: Option<String> = None;
    for (pos, tok) in lex(text, 0)? {
        if let Tok::Ident(name) = tok {
            match &var {
                None => var = Some(name),
                Some(v) if *v == name => {}
                Some(_) => return Err(ParseError::UnknownVariable { pos, name }),
            }
        }
    }
    let vars = vec![var.unwrap_or_else(|| "t".to_string())];
    let f = parse_poly(text, &field, &vars)?;
    let deg = f.total_degree().finite().unwrap_or(0) as usize;
    let mut out = vec![0i64; deg + 1];
    for (m, c) in f.terms() {
        out[m.exps()[0] as usize] = c.as_prime().unwrap_or(0) as i64;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::TopForm;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn polynomials() {
        let f2 = Field::prime(2).unwrap();
        let vars = names(&["x", "y", "z", "w"]);
        let f = parse_poly("x^3+y^3+z^3+w^3", &f2, &vars).unwrap();
        assert_eq!(f.display_with(&vars).to_string(), "x^3 + y^3 + z^3 + w^3");
        let f5 = Field::prime(5).unwrap();
        let g = parse_poly("-3*x^2*y + 7 x - (x+1)^2", &f5, &vars).unwrap();
        assert_eq!(g.display_with(&vars).to_string(), "2*x^2*y + 4*x^2 + 4");
        assert_eq!(parse_poly("12345678901234567890123", &f5, &vars).unwrap(), Poly::constant(&f5.from_int(3), 4));
    }

    #[test]
    fn errors_name_the_token() {
        let f2 = Field::prime(2).unwrap();
        let vars = names(&["x", "y"]);
        let err = parse_poly("x + q", &f2, &vars).unwrap_err();
        assert_eq!(
            err,
            ParseError::UnknownVariable {
                pos: 4,
                name: "q".into()
            }
        );
        let err = parse_poly("x + ", &f2, &vars).unwrap_err();
        assert!(err.to_string().contains("position 4"), "{}", err);
        let err = parse_poly("x ^ y", &f2, &vars).unwrap_err();
        assert!(err.to_string().contains("unsigned integer"), "{}", err);
        assert!(matches!(
            parse_rational("x/(y-y)", &f2, &vars),
            Err(ParseError::ZeroDenominator { pos: 2 })
        ));
        assert!(parse_poly("x # y", &f2, &vars).is_err());
    }

    #[test]
    fn fermat_form() {
        let f2 = Field::prime(2).unwrap();
        let vars = names(&["X", "Y", "Z"]);
        let w = parse_form("(X/(X^3+Y^3+Z^3+1)) dX^dY^dZ", &f2, &vars).unwrap();
        let top = TopForm::try_from(&w).unwrap();
        assert_eq!(top.coeff().num(), &Poly::var(&f2, 3, 0));
        assert_eq!(
            top.coeff().den().display_with(&vars).to_string(),
            "X^3 + Y^3 + Z^3 + 1"
        );
    }

    #[test]
    fn forms_with_signs_and_orders() {
        let f3 = Field::prime(3).unwrap();
        let vars = names(&["x", "y"]);
        let a = parse_form("(x) dy^dx", &f3, &vars).unwrap();
        let b = parse_form("-(x) dx^dy", &f3, &vars).unwrap();
        assert_eq!(a, b);
        let c = parse_form("dx + (y^2) dy", &f3, &vars).unwrap();
        assert_eq!(c.degree(), 1);
        assert!(matches!(
            parse_form("dx + dx^dy", &f3, &vars),
            Err(ParseError::DegreeMismatch { pos: 5, expected: 1, got: 2 })
        ));
        assert!(matches!(
            parse_form("(x) dq", &f3, &vars),
            Err(ParseError::UnknownVariable { pos: 5, .. })
        ));
    }

    #[test]
    fn divisors() {
        let f2 = Field::prime(2).unwrap();
        let vars = names(&["x", "y", "z", "w"]);
        let d = parse_divisor("x^3+y^3+z^3+w^3:1,H:2", &f2, &vars).unwrap();
        assert_eq!(d.hypersurfaces.len(), 1);
        assert_eq!(d.k, 2);
        assert_eq!(parse_divisor("", &f2, &vars).unwrap().k, 0);
        assert_eq!(parse_divisor("H:-3", &f2, &vars).unwrap().k, -3);
        let err = parse_divisor("x:1,y", &f2, &vars).unwrap_err();
        assert!(matches!(err, ParseError::Unexpected { pos: 5, .. }), "{:?}", err);
        let err = parse_divisor("x:1,y+q:2", &f2, &vars).unwrap_err();
        assert_eq!(
            err,
            ParseError::UnknownVariable {
                pos: 6,
                name: "q".into()
            }
        );
        assert!(matches!(
            parse_divisor("x:-1", &f2, &vars),
            Err(ParseError::BadNumber { pos: 2, .. })
        ));
    }

    #[test]
    fn univariate_modulus() {
        assert_eq!(parse_univariate("x^2+1", 3).unwrap(), vec![1, 0, 1]);
        assert_eq!(parse_univariate("t^3 + t + 1", 2).unwrap(), vec![1, 1, 0, 1]);
        assert!(parse_univariate("x^2 + y", 3).is_err());
    }
}
