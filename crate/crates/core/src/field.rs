//! Prime fields `F_p` and their extensions `F_{p^s}`.
//!
//! A [`Field`] is a cheap, shareable handle on an immutable [`FieldSpec`].
//! Elements are [`Scalar`]s: coordinate vectors with respect to the power
//! basis `1, t, ..., t^{s-1}` of `F_p[t] / (modulus)`.
//!
//! Besides ordinary arithmetic the module provides the Frobenius
//! automorphism `a -> a^{p^e}` and its inverse, which the trace map needs to
//! act on scalar coefficients.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use smallvec::SmallVec;
use thiserror::Error;

/// Largest admissible characteristic (exclusive). Residue products fit in `u64`.
pub const MAX_CHAR: u32 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("characteristic {0} is not a prime")]
    NotPrime(u64),
    #[error("characteristic {0} exceeds the supported bound 2^16")]
    CharTooLarge(u64),
    #[error("modulus must be monic of degree at least 2, got degree {0}")]
    BadModulusDegree(usize),
    #[error("modulus is not monic")]
    ModulusNotMonic,
    #[error("modulus is not irreducible over F_{0}")]
    NotIrreducible(u32),
    #[error("extension degree {expected} does not match modulus degree {got}")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("expected {expected} coordinates, got {got}")]
    WrongLength { expected: usize, got: usize },
}

/// Description of `F_{p^s}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    p: u32,
    s: usize,
    /// Monic modulus, coefficients from low to high degree; empty when `s == 1`.
    modulus: Vec<u32>,
}

impl FieldSpec {
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn modulus(&self) -> Option<&[u32]> {
        if self.s == 1 {
            None
        } else {
            Some(&self.modulus)
        }
    }
}

/// Shared handle on a [`FieldSpec`].
#[derive(Clone)]
pub struct Field(Arc<FieldSpec>);

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.s == 1 {
            write!(f, "F_{}", self.0.p)
        } else {
            write!(f, "F_{}^{}[{:?}]", self.0.p, self.0.s, self.0.modulus)
        }
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl Eq for Field {}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn check_char(p: u64) -> Result<u32, FieldError> {
    if p >= MAX_CHAR as u64 {
        return Err(FieldError::CharTooLarge(p));
    }
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    Ok(p as u32)
}

impl Field {
    /// The prime field `F_p`.
    pub fn prime(p: u64) -> Result<Self, FieldError> {
        let p = check_char(p)?;
        Ok(Field(Arc::new(FieldSpec {
            p,
            s: 1,
            modulus: Vec::new(),
        })))
    }

    /// `F_p[t] / (modulus)`; `modulus` lists coefficients from low to high
    /// degree (as integers, reduced mod `p`) and must be monic and
    /// irreducible.
    pub fn extension(p: u64, modulus: &[i64]) -> Result<Self, FieldError> {
        let p = check_char(p)?;
        let mut m: Vec<u32> = modulus.iter().map(|&c| reduce_i64(c, p)).collect();
        upoly::trim(&mut m);
        if m.len() < 3 {
            return Err(FieldError::BadModulusDegree(m.len().saturating_sub(1)));
        }
        if *m.last().unwrap() != 1 {
            return Err(FieldError::ModulusNotMonic);
        }
        if !upoly::is_irreducible(&m, p) {
            return Err(FieldError::NotIrreducible(p));
        }
        let s = m.len() - 1;
        Ok(Field(Arc::new(FieldSpec { p, s, modulus: m })))
    }

    /// Builds `F_{p^s}`, requiring a modulus exactly when `s > 1`.
    pub fn with_degree(p: u64, s: usize, modulus: Option<&[i64]>) -> Result<Self, FieldError> {
        match (s, modulus) {
            (1, None) => Field::prime(p),
            (_, Some(m)) => {
                let f = Field::extension(p, m)?;
                if f.s() != s {
                    return Err(FieldError::DegreeMismatch {
                        expected: s,
                        got: f.s(),
                    });
                }
                Ok(f)
            }
            (_, None) => Err(FieldError::BadModulusDegree(0)),
        }
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.0
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }

    pub fn s(&self) -> usize {
        self.0.s
    }

    /// `p^s`, if it fits in a `u64`.
    pub fn order(&self) -> Option<u64> {
        (self.0.p as u64).checked_pow(self.0.s as u32)
    }

    pub fn zero(&self) -> Scalar {
        Scalar {
            field: self.clone(),
            coeffs: SmallVec::from_elem(0, self.0.s),
        }
    }

    pub fn one(&self) -> Scalar {
        self.from_int(1)
    }

    /// Image of an integer under `Z -> F_p -> F_{p^s}`.
    pub fn from_int(&self, n: i64) -> Scalar {
        let mut c = self.zero();
        c.coeffs[0] = reduce_i64(n, self.0.p);
        c
    }

    /// Element with the given power-basis coordinates.
    pub fn from_coeffs(&self, coeffs: &[i64]) -> Result<Scalar, FieldError> {
        if coeffs.len() != self.0.s {
            return Err(FieldError::WrongLength {
                expected: self.0.s,
                got: coeffs.len(),
            });
        }
        Ok(Scalar {
            field: self.clone(),
            coeffs: coeffs.iter().map(|&c| reduce_i64(c, self.0.p)).collect(),
        })
    }

    /// The class of `t` in `F_p[t] / (modulus)`; `0` when `s == 1`.
    pub fn generator(&self) -> Scalar {
        let mut c = self.zero();
        if self.0.s > 1 {
            c.coeffs[1] = 1;
        }
        c
    }

    /// Enumerates every element, in lexicographic order of coordinates.
    pub fn elements(&self) -> impl Iterator<Item = Scalar> + '_ {
        let q = self.order().expect("field too large to enumerate");
        let p = self.0.p as u64;
        (0..q).map(move |mut idx| {
            let mut c = self.zero();
            for slot in c.coeffs.iter_mut() {
                *slot = (idx % p) as u32;
                idx /= p;
            }
            c
        })
    }

    /// Element drawn uniformly at random.
    pub fn random<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Scalar {
        let mut c = self.zero();
        for slot in c.coeffs.iter_mut() {
            *slot = rng.gen_range(0..self.0.p);
        }
        c
    }
}

fn reduce_i64(n: i64, p: u32) -> u32 {
    n.rem_euclid(p as i64) as u32
}

/// An element of `F_{p^s}`.
#[derive(Clone)]
pub struct Scalar {
    field: Field,
    coeffs: SmallVec<[u32; 4]>,
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && self.field == other.field
    }
}

impl Eq for Scalar {}

impl std::hash::Hash for Scalar {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Checked binary arithmetic.
pub fn scalar_arith(a: &Scalar, b: &Scalar, op: ArithOp) -> Result<Scalar, FieldError> {
    if a.field != b.field {
        return Err(FieldError::FieldMismatch);
    }
    Ok(match op {
        ArithOp::Add => a.add_unchecked(b),
        ArithOp::Sub => a.sub_unchecked(b),
        ArithOp::Mul => a.mul_unchecked(b),
        ArithOp::Div => a.mul_unchecked(&b.inv()?),
    })
}

impl Scalar {
    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Power-basis coordinates, each in `[0, p)`.
    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    /// Returns the residue when the element lies in the prime field.
    pub fn as_prime(&self) -> Option<u32> {
        if self.coeffs[1..].iter().all(|&c| c == 0) {
            Some(self.coeffs[0])
        } else {
            None
        }
    }

    fn p(&self) -> u64 {
        self.field.0.p as u64
    }

    fn add_unchecked(&self, other: &Scalar) -> Scalar {
        let p = self.p();
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| ((a as u64 + b as u64) % p) as u32)
            .collect();
        Scalar {
            field: self.field.clone(),
            coeffs,
        }
    }

    fn sub_unchecked(&self, other: &Scalar) -> Scalar {
        let p = self.p();
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| ((a as u64 + p - b as u64) % p) as u32)
            .collect();
        Scalar {
            field: self.field.clone(),
            coeffs,
        }
    }

    fn mul_unchecked(&self, other: &Scalar) -> Scalar {
        let p = self.p();
        let spec = &self.field.0;
        if spec.s == 1 {
            let v = (self.coeffs[0] as u64 * other.coeffs[0] as u64) % p;
            return Scalar {
                field: self.field.clone(),
                coeffs: SmallVec::from_elem(v as u32, 1),
            };
        }
        let prod = upoly::mul(&self.coeffs, &other.coeffs, spec.p);
        let red = upoly::rem(&prod, &spec.modulus, spec.p);
        let mut coeffs: SmallVec<[u32; 4]> = SmallVec::from_elem(0, spec.s);
        coeffs[..red.len()].copy_from_slice(&red);
        Scalar {
            field: self.field.clone(),
            coeffs,
        }
    }

    pub fn neg(&self) -> Scalar {
        let p = self.p();
        Scalar {
            field: self.field.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|&a| ((p - a as u64) % p) as u32)
                .collect(),
        }
    }

    /// Multiplicative inverse.
    pub fn inv(&self) -> Result<Scalar, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let spec = &self.field.0;
        if spec.s == 1 {
            let v = upoly::inv_mod(self.coeffs[0], spec.p);
            return Ok(Scalar {
                field: self.field.clone(),
                coeffs: SmallVec::from_elem(v, 1),
            });
        }
        let mut a: Vec<u32> = self.coeffs.to_vec();
        upoly::trim(&mut a);
        let inv = upoly::inv_mod_poly(&a, &spec.modulus, spec.p);
        let mut coeffs: SmallVec<[u32; 4]> = SmallVec::from_elem(0, spec.s);
        coeffs[..inv.len()].copy_from_slice(&inv);
        Ok(Scalar {
            field: self.field.clone(),
            coeffs,
        })
    }

    /// `self^n` by square-and-multiply.
    pub fn pow(&self, mut n: u64) -> Scalar {
        let mut base = self.clone();
        let mut acc = self.field.one();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        acc
    }

    /// `self^{p^e}`.
    pub fn frobenius(&self, e: u32) -> Scalar {
        let s = self.field.0.s as u32;
        if s == 1 {
            return self.clone();
        }
        let mut out = self.clone();
        // the Frobenius has order s on F_{p^s}
        for _ in 0..(e % s) {
            out = out.pow(self.p());
        }
        out
    }

    /// The unique `b` with `b^{p^e} == self`.
    pub fn inverse_frobenius(&self, e: u32) -> Scalar {
        let s = self.field.0.s as u32;
        // phi^{-e} = phi^{s - (e mod s)}
        self.frobenius((s - e % s) % s)
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.as_prime() {
            return write!(f, "{}", r);
        }
        let mut first = true;
        write!(f, "(")?;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match (i, c) {
                (0, _) => write!(f, "{}", c)?,
                (1, 1) => write!(f, "t")?,
                (1, _) => write!(f, "{}*t", c)?,
                (_, 1) => write!(f, "t^{}", i)?,
                _ => write!(f, "{}*t^{}", c, i)?,
            }
        }
        write!(f, ")")
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $op:expr) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            /// Panics when the operands live in different fields.
            fn $method(self, rhs: &Scalar) -> Scalar {
                scalar_arith(self, rhs, $op).expect("scalar arithmetic")
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, ArithOp::Add);
forward_binop!(Sub, sub, ArithOp::Sub);
forward_binop!(Mul, mul, ArithOp::Mul);
forward_binop!(Div, div, ArithOp::Div);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(self)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(&self)
    }
}

/// Dense univariate polynomials over `F_p`, low degree first, no trailing zeros.
mod upoly {
    pub fn trim(a: &mut Vec<u32>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn inv_mod(a: u32, p: u32) -> u32 {
        let (mut base, mut e, mut acc) = (a as u64, p as u64 - 2, 1u64);
        let p = p as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        acc as u32
    }

    pub fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let p = p as u64;
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x as u64 * y as u64) % p;
            }
        }
        let mut out: Vec<u32> = out.into_iter().map(|c| c as u32).collect();
        trim(&mut out);
        out
    }

    pub fn sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let n = a.len().max(b.len());
        let mut out: Vec<u32> = (0..n)
            .map(|i| {
                let x = *a.get(i).unwrap_or(&0) as u64;
                let y = *b.get(i).unwrap_or(&0) as u64;
                ((x + p as u64 - y) % p as u64) as u32
            })
            .collect();
        trim(&mut out);
        out
    }

    /// Quotient and remainder of `a` by a non-zero `b`.
    pub fn divrem(a: &[u32], b: &[u32], p: u32) -> (Vec<u32>, Vec<u32>) {
        let mut r = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        let lead_inv = inv_mod(b[db], p) as u64;
        let pp = p as u64;
        if r.len() < b.len() {
            return (Vec::new(), r);
        }
        let mut q = vec![0u32; r.len() - db];
        while r.len() >= b.len() {
            let shift = r.len() - b.len();
            let c = (*r.last().unwrap() as u64 * lead_inv) % pp;
            q[shift] = c as u32;
            for (j, &bj) in b.iter().enumerate() {
                let v = (r[shift + j] as u64 + pp - (c * bj as u64) % pp) % pp;
                r[shift + j] = v as u32;
            }
            trim(&mut r);
        }
        trim(&mut q);
        (q, r)
    }

    pub fn rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        divrem(a, b, p).1
    }

    pub fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    /// Inverse of `a` modulo the irreducible `m`, by the extended Euclidean algorithm.
    pub fn inv_mod_poly(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let (mut r0, mut r1) = (m.to_vec(), a.to_vec());
        let (mut s0, mut s1): (Vec<u32>, Vec<u32>) = (Vec::new(), vec![1]);
        while !r1.is_empty() {
            let (q, r) = divrem(&r0, &r1, p);
            let s2 = sub(&s0, &mul(&q, &s1, p), p);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
        }
        // r0 is a non-zero constant
        let c = inv_mod(r0[0], p);
        let mut out = mul(&s0, &[c], p);
        out = rem(&out, m, p);
        out
    }

    /// `gcd(x^{p^i} - x, m) == 1` for `1 <= i <= deg(m) / 2`.
    pub fn is_irreducible(m: &[u32], p: u32) -> bool {
        let deg = m.len() - 1;
        let x = rem(&[0, 1], m, p);
        let mut power = x.clone();
        for _ in 1..=deg / 2 {
            // power <- power^p mod m
            let mut acc = vec![1u32];
            let mut base = power.clone();
            let mut e = p;
            while e > 0 {
                if e & 1 == 1 {
                    acc = rem(&mul(&acc, &base, p), m, p);
                }
                base = rem(&mul(&base, &base, p), m, p);
                e >>= 1;
            }
            power = acc;
            let g = gcd(m, &sub(&power, &x, p), p);
            if g.len() != 1 {
                return false;
            }
        }
        true
    }
}
