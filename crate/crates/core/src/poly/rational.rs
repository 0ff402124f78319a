use std::fmt;

use super::{Poly, PolyError};
use crate::field::Scalar;

/// Quotient `num / den` of polynomials, kept unreduced.
///
/// Equality is decided by cross-multiplication, so `x/x == 1/1`.
#[derive(Clone)]
pub struct RationalFn {
    num: Poly,
    den: Poly,
}

impl RationalFn {
    pub fn new(num: Poly, den: Poly) -> Result<Self, PolyError> {
        num.check_context(&den)?;
        if den.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        Ok(RationalFn { num, den })
    }

    pub fn from_poly(num: Poly) -> Self {
        let den = Poly::one(num.field(), num.nvars());
        RationalFn { num, den }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// The polynomial this function equals when the denominator is a
    /// non-zero constant.
    pub fn as_poly(&self) -> Option<Poly> {
        let c = self.den.as_constant()?;
        let inv = c.inv().ok()?;
        Some(self.num.scale(&inv))
    }

    pub fn try_add(&self, other: &RationalFn) -> Result<RationalFn, PolyError> {
        self.num.check_context(&other.num)?;
        if self.den == other.den {
            return Ok(RationalFn {
                num: &self.num + &other.num,
                den: self.den.clone(),
            });
        }
        Ok(RationalFn {
            num: &(&self.num * &other.den) + &(&other.num * &self.den),
            den: &self.den * &other.den,
        })
    }

    pub fn try_mul(&self, other: &RationalFn) -> Result<RationalFn, PolyError> {
        self.num.check_context(&other.num)?;
        Ok(RationalFn {
            num: &self.num * &other.num,
            den: &self.den * &other.den,
        })
    }

    pub fn try_div(&self, other: &RationalFn) -> Result<RationalFn, PolyError> {
        self.num.check_context(&other.num)?;
        if other.num.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        Ok(RationalFn {
            num: &self.num * &other.den,
            den: &self.den * &other.num,
        })
    }

    pub fn neg(&self) -> RationalFn {
        RationalFn {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn try_sub(&self, other: &RationalFn) -> Result<RationalFn, PolyError> {
        self.try_add(&other.neg())
    }

    pub fn scale(&self, c: &Scalar) -> RationalFn {
        RationalFn {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn pow(&self, n: u64) -> RationalFn {
        RationalFn {
            num: self.num.pow(n),
            den: self.den.pow(n),
        }
    }

    /// Multiplies numerator by `poly`.
    pub fn mul_poly(&self, poly: &Poly) -> RationalFn {
        RationalFn {
            num: &self.num * poly,
            den: self.den.clone(),
        }
    }

    /// Multiplies denominator by `poly` (which must be non-zero).
    pub fn div_poly(&self, poly: &Poly) -> Result<RationalFn, PolyError> {
        RationalFn::new(self.num.clone(), &self.den * poly)
    }

    /// Rewrites `self` with denominator `target`, returning the new
    /// numerator, or `NotDivisible` when `self * target` is not a polynomial.
    pub fn numerator_over(&self, target: &Poly) -> Result<Poly, PolyError> {
        if &self.den == target {
            return Ok(self.num.clone());
        }
        (&self.num * target).div_exact(&self.den)
    }

    pub fn display_with<'a>(&'a self, names: &'a [String]) -> RationalDisplay<'a> {
        RationalDisplay { r: self, names }
    }
}

impl PartialEq for RationalFn {
    fn eq(&self, other: &Self) -> bool {
        self.num.nvars() == other.num.nvars()
            && self.num.field() == other.num.field()
            && &self.num * &other.den == &other.num * &self.den
    }
}

impl Eq for RationalFn {}

impl fmt::Debug for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFn({})", self.display_with(&[]))
    }
}

pub struct RationalDisplay<'a> {
    r: &'a RationalFn,
    names: &'a [String],
}

impl fmt::Display for RationalDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.r.den.as_constant().is_some_and(|c| c.is_one()) {
            write!(f, "{}", self.r.num.display_with(self.names))
        } else {
            write!(
                f,
                "({})/({})",
                self.r.num.display_with(self.names),
                self.r.den.display_with(self.names)
            )
        }
    }
}
