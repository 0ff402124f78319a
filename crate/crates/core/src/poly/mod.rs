//! Sparse multivariate polynomials over `F_{p^s}`.
//!
//! Besides ring arithmetic this module implements the two operations the
//! trace map is built on: extracting `p^e`-th roots and decomposing a
//! polynomial along the basis `{x^r : 0 <= r_j < p^e}` of `R` over `R^{p^e}`.

mod monomial;
mod rational;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;
use thiserror::Error;

use crate::field::{Field, Scalar};

pub use monomial::{Monomial, MonomialDisplay};
pub use rational::RationalFn;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("polynomials live in different rings ({left} vs {right})")]
    ContextMismatch { left: String, right: String },
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("variable index {index} out of range for {nvars} variables")]
    VarOutOfRange { index: usize, nvars: usize },
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("polynomial division is not exact")]
    NotDivisible,
}

/// Total degree, with `-inf` for the zero polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(u64),
}

impl Degree {
    pub fn finite(self) -> Option<u64> {
        match self {
            Degree::NegInfinity => None,
            Degree::Finite(d) => Some(d),
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{}", d),
        }
    }
}

#[derive(Clone)]
pub struct Poly {
    field: Field,
    nvars: usize,
    terms: BTreeMap<Monomial, Scalar>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.nvars == other.nvars && self.field == other.field && self.terms == other.terms
    }
}

impl Eq for Poly {}

impl std::hash::Hash for Poly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.nvars.hash(state);
        for (m, c) in &self.terms {
            m.hash(state);
            c.hash(state);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Sub,
    Mul,
}

/// Checked ring operation.
pub fn poly_arith(f: &Poly, g: &Poly, op: PolyOp) -> Result<Poly, PolyError> {
    f.check_context(g)?;
    Ok(match op {
        PolyOp::Add => f.add_unchecked(g, false),
        PolyOp::Sub => f.add_unchecked(g, true),
        PolyOp::Mul => f.mul_unchecked(g),
    })
}

fn q_of(field: &Field, e: u32) -> u64 {
    (field.p() as u64)
        .checked_pow(e)
        .expect("p^e overflows u64")
}

impl Poly {
    pub fn zero(field: &Field, nvars: usize) -> Self {
        Poly {
            field: field.clone(),
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(field: &Field, nvars: usize) -> Self {
        Poly::constant(&field.one(), nvars)
    }

    pub fn constant(c: &Scalar, nvars: usize) -> Self {
        Poly::term(c.clone(), Monomial::one(nvars))
    }

    pub fn var(field: &Field, nvars: usize, index: usize) -> Self {
        Poly::term(field.one(), Monomial::var(nvars, index))
    }

    pub fn term(coeff: Scalar, mono: Monomial) -> Self {
        let mut p = Poly::zero(coeff.field(), mono.nvars());
        p.add_term(mono, coeff);
        p
    }

    pub fn from_terms(
        field: &Field,
        nvars: usize,
        terms: impl IntoIterator<Item = (Monomial, Scalar)>,
    ) -> Self {
        let mut p = Poly::zero(field, nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// Adds `coeff * mono` in place, pruning a cancelled coefficient.
    pub fn add_term(&mut self, mono: Monomial, coeff: Scalar) {
        debug_assert_eq!(mono.nvars(), self.nvars);
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(mono) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + &coeff;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in increasing monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, mono: &Monomial) -> Scalar {
        self.terms
            .get(mono)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().next_back()
    }

    /// `Some(c)` when the polynomial is the constant `c` (including `0`).
    pub fn as_constant(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(self.field.zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    fn context_name(&self) -> String {
        format!("{:?}[{} vars]", self.field, self.nvars)
    }

    fn check_context(&self, other: &Poly) -> Result<(), PolyError> {
        if self.nvars != other.nvars || self.field != other.field {
            return Err(PolyError::ContextMismatch {
                left: self.context_name(),
                right: other.context_name(),
            });
        }
        Ok(())
    }

    fn add_unchecked(&self, other: &Poly, negate: bool) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            let c = if negate { c.neg() } else { c.clone() };
            out.add_term(m.clone(), c);
        }
        out
    }

    fn mul_unchecked(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(&self.field, self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.field, self.nvars);
        }
        Poly {
            field: self.field.clone(),
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, mono: &Monomial) -> Poly {
        Poly {
            field: self.field.clone(),
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.mul(mono), a.clone()))
                .collect(),
        }
    }

    /// `self^n`.
    ///
    /// Writes `n = sum_i d_i p^i` in base `p` and multiplies the factors
    /// `(self^{d_i})^{p^i}`; the outer powers are Frobenius powers, which
    /// only rescale exponents and so stay as sparse as `self^{d_i}`.
    pub fn pow(&self, mut n: u64) -> Poly {
        let p = self.field.p() as u64;
        let mut acc = Poly::one(&self.field, self.nvars);
        let mut i = 0u32;
        while n > 0 {
            let digit = n % p;
            if digit > 0 {
                let factor = self.pow_naive(digit).frobenius_power(i);
                acc = acc.mul_unchecked(&factor);
            }
            n /= p;
            i += 1;
        }
        acc
    }

    /// `self^n` by square-and-multiply.
    pub fn pow_naive(&self, mut n: u64) -> Poly {
        let mut acc = Poly::one(&self.field, self.nvars);
        let mut base = self.clone();
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

    /// `self^{p^e}`, using that the `p^e`-th power map is a ring
    /// homomorphism: coefficients go through the Frobenius and exponents
    /// are multiplied by `p^e`.
    pub fn frobenius_power(&self, e: u32) -> Poly {
        let q = q_of(&self.field, e) as u32;
        Poly {
            field: self.field.clone(),
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.scale(q), c.frobenius(e)))
                .collect(),
        }
    }

    pub fn total_degree(&self) -> Degree {
        self.leading_term()
            .map_or(Degree::NegInfinity, |(m, _)| Degree::Finite(m.degree()))
    }

    /// The zero polynomial counts as homogeneous.
    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    /// Formal partial derivative with respect to variable `index`.
    pub fn derivative(&self, index: usize) -> Poly {
        let mut out = Poly::zero(&self.field, self.nvars);
        for (m, c) in &self.terms {
            let a = m.exps()[index];
            if a == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm.exps_mut()[index] -= 1;
            out.add_term(dm, c * &self.field.from_int(a as i64));
        }
        out
    }

    /// Sets variable `chart` to 1 and drops it. Requires a homogeneous input.
    pub fn dehomogenize(&self, chart: usize) -> Result<Poly, PolyError> {
        if chart >= self.nvars {
            return Err(PolyError::VarOutOfRange {
                index: chart,
                nvars: self.nvars,
            });
        }
        if !self.is_homogeneous() {
            return Err(PolyError::NotHomogeneous);
        }
        Ok(Poly::from_terms(
            &self.field,
            self.nvars - 1,
            self.terms
                .iter()
                .map(|(m, c)| (m.remove_var(chart), c.clone())),
        ))
    }

    /// The `g` with `g^{p^e} == self`, or `None` when some exponent is not
    /// divisible by `p^e`.
    pub fn pe_th_root(&self, e: u32) -> Option<Poly> {
        let q = q_of(&self.field, e);
        let mut out = Poly::zero(&self.field, self.nvars);
        for (m, c) in &self.terms {
            if m.exps().iter().any(|&a| !(a as u64).is_multiple_of(q)) {
                return None;
            }
            let root: Vec<u32> = m.exps().iter().map(|&a| (a as u64 / q) as u32).collect();
            out.terms
                .insert(Monomial::from_exps(&root), c.inverse_frobenius(e));
        }
        Some(out)
    }

    /// The component `g_r` of `self = sum_r g_r^{p^e} x^r` at one residue
    /// `r` (entries in `[0, p^e)`).
    pub fn frobenius_component(&self, e: u32, residue: &Monomial) -> Poly {
        let q = q_of(&self.field, e);
        let mut out = Poly::zero(&self.field, self.nvars);
        for (m, c) in &self.terms {
            let matches = m
                .exps()
                .iter()
                .zip(residue.exps())
                .all(|(&a, &r)| a as u64 % q == r as u64);
            if !matches {
                continue;
            }
            let root: Vec<u32> = m
                .exps()
                .iter()
                .zip(residue.exps())
                .map(|(&a, &r)| ((a - r) as u64 / q) as u32)
                .collect();
            out.terms
                .insert(Monomial::from_exps(&root), c.inverse_frobenius(e));
        }
        out
    }

    /// Writes `self = sum_r g_r^{p^e} * x^r` over residues `r` with entries in
    /// `[0, p^e)`. Only residues that actually occur are returned.
    pub fn frobenius_decompose(&self, e: u32) -> BTreeMap<Monomial, Poly> {
        let q = q_of(&self.field, e);
        let mut buckets: BTreeMap<Monomial, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let r: Vec<u32> = m.exps().iter().map(|&a| (a as u64 % q) as u32).collect();
            let r = Monomial::from_exps(&r);
            let shifted = m.div(&r).expect("residue divides its monomial");
            buckets
                .entry(r)
                .or_insert_with(|| Poly::zero(&self.field, self.nvars))
                .add_term(shifted, c.clone());
        }
        buckets
            .into_iter()
            .map(|(r, bucket)| {
                let g = bucket
                    .pe_th_root(e)
                    .expect("bucket exponents are multiples of p^e");
                (r, g)
            })
            .collect()
    }

    /// Exact quotient `self / divisor`.
    ///
    /// A single polynomial is a Gröbner basis of the ideal it generates, so
    /// the division algorithm decides divisibility: at every step the
    /// leading term of the running remainder must be divisible by the
    /// divisor's leading term.
    pub fn div_exact(&self, divisor: &Poly) -> Result<Poly, PolyError> {
        self.check_context(divisor)?;
        let (lm, lc) = divisor.leading_term().ok_or(PolyError::DivisionByZero)?;
        let lc_inv = lc.inv().expect("leading coefficient is non-zero");
        let mut rem = self.clone();
        let mut quot = Poly::zero(&self.field, self.nvars);
        while let Some((m, c)) = rem.leading_term() {
            let shift = m.div(lm).ok_or(PolyError::NotDivisible)?;
            let coeff = c * &lc_inv;
            let step = divisor.mul_monomial(&shift).scale(&coeff);
            quot.add_term(shift, coeff);
            rem = rem.add_unchecked(&step, true);
        }
        Ok(quot)
    }

    /// Random polynomial with up to `nterms` terms of degree at most `max_deg`.
    pub fn random<R: Rng + ?Sized>(
        field: &Field,
        nvars: usize,
        max_deg: u32,
        nterms: usize,
        rng: &mut R,
    ) -> Poly {
        let mut out = Poly::zero(field, nvars);
        for _ in 0..nterms {
            let deg = rng.gen_range(0..=max_deg);
            let mut exps = vec![0u32; nvars];
            if nvars > 0 {
                for _ in 0..deg {
                    exps[rng.gen_range(0..nvars)] += 1;
                }
            }
            out.add_term(Monomial::from_exps(&exps), field.random(rng));
        }
        out
    }

    pub fn display_with<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a Poly,
    names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.poly.terms.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let mono = m.display_with(self.names);
            match (m.is_one(), c.is_one()) {
                (true, _) => write!(f, "{}", c)?,
                (false, true) => write!(f, "{}", mono)?,
                (false, false) => write!(f, "{}*{}", c, mono)?,
            }
        }
        Ok(())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(&[]))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({})", self)
    }
}

macro_rules! forward_poly_op {
    ($tr:ident, $method:ident, $op:expr) => {
        impl $tr<&Poly> for &Poly {
            type Output = Poly;
            /// Panics on mismatched rings; use [`poly_arith`] for a checked version.
            fn $method(self, rhs: &Poly) -> Poly {
                poly_arith(self, rhs, $op).expect("polynomial arithmetic")
            }
        }
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly {
                (&self).$method(rhs)
            }
        }
    };
}

forward_poly_op!(Add, add, PolyOp::Add);
forward_poly_op!(Sub, sub, PolyOp::Sub);
forward_poly_op!(Mul, mul, PolyOp::Mul);

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::zero(&self.field, self.nvars).add_unchecked(self, true)
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn vars(field: &Field, n: usize) -> Vec<Poly> {
        (0..n).map(|i| Poly::var(field, n, i)).collect()
    }

    #[test]
    fn freshmans_dream() {
        let f2 = Field::prime(2).unwrap();
        let v = vars(&f2, 2);
        let s = &v[0] + &v[1];
        assert_eq!(&s * &s, &(&v[0] * &v[0]) + &(&v[1] * &v[1]));
    }

    #[test]
    fn fermat_square() {
        let f2 = Field::prime(2).unwrap();
        let v = vars(&f2, 3);
        let one = Poly::one(&f2, 3);
        let f = &(&(&v[0].pow(3) + &v[1].pow(3)) + &v[2].pow(3)) + &one;
        let expected = &(&(&v[0].pow(6) + &v[1].pow(6)) + &v[2].pow(6)) + &one;
        assert_eq!(&f * &f, expected);
        assert_eq!(&f + &Poly::zero(&f2, 3), f);
        assert_eq!(f.frobenius_power(1), expected);
    }

    #[test]
    fn digit_pow_matches_repeated_multiplication() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for p in [2u64, 3, 5] {
            let field = Field::prime(p).unwrap();
            for _ in 0..10 {
                let f = Poly::random(&field, 2, 2, 3, &mut rng);
                let n = rng.gen_range(0..30u64);
                let naive = (0..n).fold(Poly::one(&field, 2), |acc, _| &acc * &f);
                assert_eq!(f.pow(n), naive);
                assert_eq!(f.pow_naive(n), naive);
            }
        }
    }

    #[test]
    fn degrees() {
        let f2 = Field::prime(2).unwrap();
        let v = vars(&f2, 4);
        let cubic = v.iter().map(|x| x.pow(3)).fold(Poly::zero(&f2, 4), |a, b| a + b);
        assert_eq!(cubic.total_degree(), Degree::Finite(3));
        assert_eq!(Poly::zero(&f2, 4).total_degree(), Degree::NegInfinity);
        assert_eq!(Poly::one(&f2, 4).total_degree(), Degree::Finite(0));
        assert!(Degree::NegInfinity < Degree::Finite(0));
    }

    #[test]
    fn dehomogenize_fermat() {
        let f2 = Field::prime(2).unwrap();
        let v = vars(&f2, 4);
        let cubic = v.iter().map(|x| x.pow(3)).fold(Poly::zero(&f2, 4), |a, b| a + b);
        let d = cubic.dehomogenize(3).unwrap();
        let w = vars(&f2, 3);
        let expected = w.iter().map(|x| x.pow(3)).fold(Poly::one(&f2, 3), |a, b| a + b);
        assert_eq!(d, expected);
        assert_eq!(v[3].pow(5).dehomogenize(3).unwrap(), Poly::one(&f2, 3));
        assert_eq!(v[0].dehomogenize(3).unwrap(), w[0]);
        assert_eq!(
            (&v[0] + &Poly::one(&f2, 4)).dehomogenize(3).unwrap_err(),
            PolyError::NotHomogeneous
        );
    }

    #[test]
    fn pth_roots() {
        let f2 = Field::prime(2).unwrap();
        let v = vars(&f2, 2);
        let f = &v[0].pow(2) * &v[1].pow(4);
        assert_eq!(f.pe_th_root(1).unwrap(), &v[0] * &v[1].pow(2));
        assert!(v[0].pow(3).pe_th_root(1).is_none());

        let f9 = Field::extension(3, &[1, 0, 1]).unwrap();
        let t = f9.generator();
        let x = Poly::var(&f9, 1, 0);
        let f = x.pow(3).scale(&(&t + &t));
        assert_eq!(f.pe_th_root(1).unwrap(), x.scale(&t));
    }

    #[test]
    fn decompose_fermat_numerator() {
        let f2 = Field::prime(2).unwrap();
        let v = vars(&f2, 3);
        let (x, y, z) = (&v[0], &v[1], &v[2]);
        let f = x.pow(4) + x * &y.pow(3) + x * &z.pow(3) + x.clone();
        let buckets = f.frobenius_decompose(1);
        let m = |a: &[u32]| Monomial::from_exps(a);
        assert_eq!(buckets.len(), 4);
        assert_eq!(buckets[&m(&[0, 0, 0])], x.pow(2));
        assert_eq!(buckets[&m(&[1, 1, 0])], y.clone());
        assert_eq!(buckets[&m(&[1, 0, 1])], z.clone());
        assert_eq!(buckets[&m(&[1, 0, 0])], Poly::one(&f2, 3));
        assert!(!buckets.contains_key(&m(&[1, 1, 1])));
        assert!(f.frobenius_component(1, &m(&[1, 1, 1])).is_zero());
    }

    #[test]
    fn exact_division() {
        let f3 = Field::prime(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let a = Poly::random(&f3, 3, 4, 5, &mut rng);
            let b = Poly::random(&f3, 3, 3, 4, &mut rng);
            if b.is_zero() {
                continue;
            }
            assert_eq!((&a * &b).div_exact(&b).unwrap(), a);
        }
        let v = vars(&f3, 2);
        assert_eq!(
            (&v[0] + &Poly::one(&f3, 2)).div_exact(&v[1]).unwrap_err(),
            PolyError::NotDivisible
        );
        assert_eq!(
            v[0].div_exact(&Poly::zero(&f3, 2)).unwrap_err(),
            PolyError::DivisionByZero
        );
    }

    #[test]
    fn mismatched_rings() {
        let f2 = Field::prime(2).unwrap();
        let f3 = Field::prime(3).unwrap();
        assert!(matches!(
            poly_arith(&Poly::one(&f2, 2), &Poly::one(&f2, 3), PolyOp::Add),
            Err(PolyError::ContextMismatch { .. })
        ));
        assert!(poly_arith(&Poly::one(&f2, 2), &Poly::one(&f3, 2), PolyOp::Mul).is_err());
    }

    #[test]
    fn derivative_in_char_p() {
        let f3 = Field::prime(3).unwrap();
        let x = Poly::var(&f3, 1, 0);
        assert!(x.pow(3).derivative(0).is_zero());
        assert_eq!(x.pow(4).derivative(0), x.pow(3));
    }
}
