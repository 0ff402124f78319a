//! Differential forms on the affine chart `Spec k[x_1, ..., x_n]`.
//!
//! A form of degree `i` is stored as a map from strictly increasing index
//! sets `J = (j_1 < ... < j_i)` to coefficients, meaning
//! `sum_J c_J dx_{j_1} ^ ... ^ dx_{j_i}`. Indices are 0-based.
//!
//! Sign convention: `dx_j ^ dx_J = (-1)^{#{k in J : k < j}} dx_{J + j}`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::field::{Field, Scalar};
use crate::linalg::Matrix;
use crate::poly::{Monomial, Poly, PolyError, RationalFn};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("differential index {index} out of range for {nvars} variables")]
    IndexOutOfRange { index: usize, nvars: usize },
    #[error("form degree {degree} exceeds the number of variables {nvars}")]
    DegreeOutOfRange { degree: usize, nvars: usize },
    #[error("coefficient on {0} is not a polynomial")]
    RationalCoefficient(String),
    #[error("forms of degree {left} and {right} cannot be combined")]
    DegreeMismatch { left: usize, right: usize },
    #[error("cannot differentiate a top-degree form")]
    TopDegree,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Sorts `indices`, returning the sign of the sorting permutation, or
/// `None` if an index repeats.
pub(crate) fn sort_with_sign(indices: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut v = indices.to_vec();
    let mut negative = false;
    // insertion sort, counting transpositions
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            negative = !negative;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, negative))
}

#[derive(Clone)]
pub struct DiffForm {
    field: Field,
    nvars: usize,
    degree: usize,
    coeffs: BTreeMap<Vec<usize>, RationalFn>,
}

impl DiffForm {
    pub fn zero(field: &Field, nvars: usize, degree: usize) -> Result<Self, FormError> {
        if degree > nvars {
            return Err(FormError::DegreeOutOfRange { degree, nvars });
        }
        Ok(DiffForm {
            field: field.clone(),
            nvars,
            degree,
            coeffs: BTreeMap::new(),
        })
    }

    /// `coeff * dx_{indices[0]} ^ dx_{indices[1]} ^ ...`, with indices in
    /// any order.
    pub fn term(coeff: RationalFn, indices: &[usize]) -> Result<Self, FormError> {
        let field = coeff.num().field().clone();
        let nvars = coeff.nvars();
        let mut out = DiffForm::zero(&field, nvars, indices.len())?;
        out.add_term(coeff, indices)?;
        Ok(out)
    }

    pub fn poly_term(coeff: Poly, indices: &[usize]) -> Result<Self, FormError> {
        DiffForm::term(RationalFn::from_poly(coeff), indices)
    }

    /// Adds `coeff * dx_indices` in place.
    pub fn add_term(&mut self, coeff: RationalFn, indices: &[usize]) -> Result<(), FormError> {
        if indices.len() != self.degree {
            return Err(FormError::DegreeMismatch {
                left: self.degree,
                right: indices.len(),
            });
        }
        if let Some(&index) = indices.iter().find(|&&i| i >= self.nvars) {
            return Err(FormError::IndexOutOfRange {
                index,
                nvars: self.nvars,
            });
        }
        let Some((sorted, negative)) = sort_with_sign(indices) else {
            return Ok(());
        };
        let coeff = if negative { coeff.neg() } else { coeff };
        let sum = match self.coeffs.remove(&sorted) {
            Some(old) => old.try_add(&coeff)?,
            None => coeff,
        };
        if !sum.is_zero() {
            self.coeffs.insert(sorted, sum);
        }
        Ok(())
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &RationalFn)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, indices: &[usize]) -> Option<&RationalFn> {
        self.coeffs.get(indices)
    }

    pub fn is_polynomial(&self) -> bool {
        self.coeffs.values().all(|c| c.as_poly().is_some())
    }

    /// Coefficients as polynomials, or the first index set whose coefficient
    /// is not one.
    pub fn poly_terms(&self) -> Result<Vec<(Vec<usize>, Poly)>, FormError> {
        self.coeffs
            .iter()
            .map(|(j, c)| {
                c.as_poly()
                    .map(|p| (j.clone(), p))
                    .ok_or_else(|| FormError::RationalCoefficient(format!("{:?}", j)))
            })
            .collect()
    }

    pub fn try_add(&self, other: &DiffForm) -> Result<DiffForm, FormError> {
        if self.degree != other.degree {
            return Err(FormError::DegreeMismatch {
                left: self.degree,
                right: other.degree,
            });
        }
        let mut out = self.clone();
        for (j, c) in &other.coeffs {
            out.add_term(c.clone(), j)?;
        }
        Ok(out)
    }

    pub fn neg(&self) -> DiffForm {
        DiffForm {
            coeffs: self
                .coeffs
                .iter()
                .map(|(j, c)| (j.clone(), c.neg()))
                .collect(),
            ..self.clone()
        }
    }

    pub fn try_sub(&self, other: &DiffForm) -> Result<DiffForm, FormError> {
        self.try_add(&other.neg())
    }

    pub fn mul_poly(&self, f: &Poly) -> DiffForm {
        let mut out = DiffForm {
            coeffs: BTreeMap::new(),
            ..self.clone()
        };
        for (j, c) in &self.coeffs {
            let c = c.mul_poly(f);
            if !c.is_zero() {
                out.coeffs.insert(j.clone(), c);
            }
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> DiffForm {
        let mut out = DiffForm {
            coeffs: BTreeMap::new(),
            ..self.clone()
        };
        if c.is_zero() {
            return out;
        }
        for (j, r) in &self.coeffs {
            out.coeffs.insert(j.clone(), r.scale(c));
        }
        out
    }

    /// `d(f dx_J) = sum_j (df/dx_j) dx_j ^ dx_J`. Coefficients must be
    /// polynomials.
    pub fn exterior_derivative(&self) -> Result<DiffForm, FormError> {
        if self.degree >= self.nvars {
            return Err(FormError::TopDegree);
        }
        let mut out = DiffForm::zero(&self.field, self.nvars, self.degree + 1)?;
        for (j_set, f) in self.poly_terms()? {
            for j in 0..self.nvars {
                if j_set.contains(&j) {
                    continue;
                }
                let df = f.derivative(j);
                if df.is_zero() {
                    continue;
                }
                let mut idx = Vec::with_capacity(j_set.len() + 1);
                idx.push(j);
                idx.extend_from_slice(&j_set);
                out.add_term(RationalFn::from_poly(df), &idx)?;
            }
        }
        Ok(out)
    }

    /// Whether `self == d(eta)` for an `(i-1)`-form `eta` with polynomial
    /// coefficients of degree at most `dbound + 1`, decided by a linear
    /// solve over the monomial basis of such `eta`.
    pub fn is_exact_bounded(&self, dbound: u64) -> Result<bool, FormError> {
        Ok(self.exact_preimage(dbound)?.is_some())
    }

    /// Some `eta` with `d(eta) == self` and coefficient degrees at most
    /// `dbound + 1`, if one exists.
    pub fn exact_preimage(&self, dbound: u64) -> Result<Option<DiffForm>, FormError> {
        let target = self.poly_terms()?;
        if self.degree == 0 {
            return Ok(target.is_empty().then(|| self.clone()));
        }
        let mut system = LinearSystem::new(&self.field);
        let mut unknowns = Vec::new();
        for k_set in index_subsets(self.nvars, self.degree - 1) {
            for m in Monomial::up_to_degree(self.nvars, dbound as i64 + 1) {
                let eta = DiffForm::poly_term(
                    Poly::term(self.field.one(), m.clone()),
                    &k_set,
                )?;
                system.push_column(&eta.exterior_derivative()?.poly_terms()?);
                unknowns.push((k_set.clone(), m));
            }
        }
        let Some(x) = system.solve(&target) else {
            return Ok(None);
        };
        let mut eta = DiffForm::zero(&self.field, self.nvars, self.degree - 1)?;
        for ((k_set, m), c) in unknowns.into_iter().zip(x) {
            if !c.is_zero() {
                eta.add_term(RationalFn::from_poly(Poly::term(c, m)), &k_set)?;
            }
        }
        Ok(Some(eta))
    }

    /// Random form with polynomial coefficients.
    pub fn random_poly<R: Rng + ?Sized>(
        field: &Field,
        nvars: usize,
        degree: usize,
        max_deg: u32,
        nterms: usize,
        rng: &mut R,
    ) -> Result<DiffForm, FormError> {
        let mut out = DiffForm::zero(field, nvars, degree)?;
        for j_set in index_subsets(nvars, degree) {
            let f = Poly::random(field, nvars, max_deg, nterms, rng);
            out.add_term(RationalFn::from_poly(f), &j_set)?;
        }
        Ok(out)
    }

    pub fn display_with<'a>(&'a self, names: &'a [String]) -> FormDisplay<'a> {
        FormDisplay { form: self, names }
    }
}

impl PartialEq for DiffForm {
    fn eq(&self, other: &Self) -> bool {
        self.nvars == other.nvars
            && self.degree == other.degree
            && self.field == other.field
            && self.coeffs.len() == other.coeffs.len()
            && self
                .coeffs
                .iter()
                .all(|(j, c)| other.coeffs.get(j) == Some(c))
    }
}

impl Eq for DiffForm {}

impl fmt::Debug for DiffForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiffForm({})", self.display_with(&[]))
    }
}

pub struct FormDisplay<'a> {
    form: &'a DiffForm,
    names: &'a [String],
}

impl fmt::Display for FormDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.form.is_zero() {
            return write!(f, "0");
        }
        for (k, (j_set, c)) in self.form.coeffs.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})", c.display_with(self.names))?;
            for (pos, &j) in j_set.iter().enumerate() {
                let sep = if pos == 0 { " " } else { "^" };
                match self.names.get(j) {
                    Some(name) => write!(f, "{}d{}", sep, name)?,
                    None => write!(f, "{}dx{}", sep, j + 1)?,
                }
            }
        }
        Ok(())
    }
}

/// All strictly increasing `k`-subsets of `0..n`, lexicographically.
pub fn index_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

/// Columns indexed by unknowns, rows by `(index set, monomial)` coordinates
/// discovered on the fly.
pub(crate) struct LinearSystem {
    field: Field,
    rows: HashMap<(Vec<usize>, Monomial), usize>,
    columns: Vec<Vec<(usize, Scalar)>>,
}

impl LinearSystem {
    pub(crate) fn new(field: &Field) -> Self {
        LinearSystem {
            field: field.clone(),
            rows: HashMap::new(),
            columns: Vec::new(),
        }
    }

    fn coords(&mut self, terms: &[(Vec<usize>, Poly)]) -> Vec<(usize, Scalar)> {
        let mut out = Vec::new();
        for (j, p) in terms {
            for (m, c) in p.terms() {
                let next = self.rows.len();
                let row = *self.rows.entry((j.clone(), m.clone())).or_insert(next);
                out.push((row, c.clone()));
            }
        }
        out
    }

    pub(crate) fn push_column(&mut self, terms: &[(Vec<usize>, Poly)]) {
        let col = self.coords(terms);
        self.columns.push(col);
    }

    pub(crate) fn solve(&mut self, rhs: &[(Vec<usize>, Poly)]) -> Option<Vec<Scalar>> {
        let rhs = self.coords(rhs);
        let nrows = self.rows.len();
        let mut m = Matrix::zeros(&self.field, nrows, self.columns.len());
        for (j, col) in self.columns.iter().enumerate() {
            for (i, c) in col {
                m.set(*i, j, c.clone());
            }
        }
        let mut b = vec![self.field.zero(); nrows];
        for (i, c) in rhs {
            b[i] = c;
        }
        m.solve(&b)
    }
}

/// A form of top degree `n`: `f dx_1 ^ ... ^ dx_n`.
#[derive(Clone, PartialEq, Eq)]
pub struct TopForm {
    coeff: RationalFn,
}

impl TopForm {
    pub fn new(coeff: RationalFn) -> Self {
        TopForm { coeff }
    }

    pub fn from_poly(f: Poly) -> Self {
        TopForm::new(RationalFn::from_poly(f))
    }

    pub fn coeff(&self) -> &RationalFn {
        &self.coeff
    }

    pub fn nvars(&self) -> usize {
        self.coeff.nvars()
    }

    pub fn to_form(&self) -> DiffForm {
        let all: Vec<usize> = (0..self.nvars()).collect();
        DiffForm::term(self.coeff.clone(), &all).expect("top index set is valid")
    }

    pub fn display_with<'a>(&'a self, names: &'a [String]) -> TopFormDisplay<'a> {
        TopFormDisplay { form: self, names }
    }
}

impl TryFrom<&DiffForm> for TopForm {
    type Error = FormError;

    fn try_from(form: &DiffForm) -> Result<Self, FormError> {
        if form.degree != form.nvars {
            return Err(FormError::DegreeMismatch {
                left: form.degree,
                right: form.nvars,
            });
        }
        let all: Vec<usize> = (0..form.nvars).collect();
        let coeff = match form.coeffs.get(&all) {
            Some(c) => c.clone(),
            None => RationalFn::from_poly(Poly::zero(&form.field, form.nvars)),
        };
        Ok(TopForm { coeff })
    }
}

impl fmt::Debug for TopForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TopForm({})", self.display_with(&[]))
    }
}

pub struct TopFormDisplay<'a> {
    form: &'a TopForm,
    names: &'a [String],
}

impl fmt::Display for TopFormDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coeff = &self.form.coeff;
        if coeff.is_zero() {
            return write!(f, "0");
        }
        let is_one = coeff
            .as_poly()
            .and_then(|p| p.as_constant())
            .is_some_and(|c| c.is_one());
        if !is_one {
            write!(f, "({}) ", coeff.display_with(self.names))?;
        }
        for j in 0..self.form.nvars() {
            if j > 0 {
                write!(f, "^")?;
            }
            match self.names.get(j) {
                Some(name) => write!(f, "d{}", name)?,
                None => write!(f, "dx{}", j + 1)?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn product_rule() {
        let f2 = Field::prime(2).unwrap();
        let x = Poly::var(&f2, 2, 0);
        let y = Poly::var(&f2, 2, 1);
        let w = DiffForm::poly_term(&x * &y, &[]).unwrap();
        let dw = w.exterior_derivative().unwrap();
        let expected = DiffForm::poly_term(y.clone(), &[0])
            .unwrap()
            .try_add(&DiffForm::poly_term(x.clone(), &[1]).unwrap())
            .unwrap();
        assert_eq!(dw, expected);
    }

    #[test]
    fn derivative_of_pth_power_vanishes() {
        let f3 = Field::prime(3).unwrap();
        let x = Poly::var(&f3, 1, 0);
        let w = DiffForm::poly_term(x.pow(3), &[]).unwrap();
        assert!(w.exterior_derivative().unwrap().is_zero());
    }

    #[test]
    fn wedge_sign_convention() {
        let f5 = Field::prime(5).unwrap();
        let one = Poly::one(&f5, 3);
        // dx_2 ^ dx_0 ^ dx_1 = dx_0 ^ dx_1 ^ dx_2 (two transpositions)
        let a = DiffForm::poly_term(one.clone(), &[2, 0, 1]).unwrap();
        let b = DiffForm::poly_term(one.clone(), &[0, 1, 2]).unwrap();
        assert_eq!(a, b);
        let c = DiffForm::poly_term(one.clone(), &[1, 0]).unwrap();
        assert_eq!(c, DiffForm::poly_term(-&one, &[0, 1]).unwrap());
        assert!(DiffForm::poly_term(one.clone(), &[1, 1]).unwrap().is_zero());
        // d(x_1 dx_0) = dx_1 ^ dx_0 = -dx_0 ^ dx_1
        let x1 = Poly::var(&f5, 3, 1);
        let d = DiffForm::poly_term(x1, &[0]).unwrap().exterior_derivative().unwrap();
        assert_eq!(d, DiffForm::poly_term(-&one, &[0, 1]).unwrap());
    }

    #[test]
    fn rejects_rational_and_out_of_range() {
        let f2 = Field::prime(2).unwrap();
        let x = Poly::var(&f2, 2, 0);
        let r = RationalFn::new(Poly::one(&f2, 2), x.clone()).unwrap();
        let w = DiffForm::term(r, &[1]).unwrap();
        assert!(matches!(
            w.exterior_derivative(),
            Err(FormError::RationalCoefficient(_))
        ));
        assert!(matches!(
            DiffForm::poly_term(x.clone(), &[2]),
            Err(FormError::IndexOutOfRange { index: 2, nvars: 2 })
        ));
        assert!(matches!(
            DiffForm::poly_term(x, &[0, 1]).unwrap().exterior_derivative(),
            Err(FormError::TopDegree)
        ));
    }

    #[test]
    fn x_dx_is_not_exact_in_char_2() {
        let f2 = Field::prime(2).unwrap();
        let x = Poly::var(&f2, 1, 0);
        let w = DiffForm::poly_term(x.clone(), &[0]).unwrap();
        for bound in 1..6 {
            assert!(!w.is_exact_bounded(bound).unwrap());
        }
        assert!(DiffForm::zero(&f2, 1, 1).unwrap().is_exact_bounded(0).unwrap());
        // x^2 dx = d(x^3 / 3) is exact in char 2
        let w2 = DiffForm::poly_term(x.pow(2), &[0]).unwrap();
        assert!(w2.is_exact_bounded(2).unwrap());
    }

    #[test]
    fn d_squared_and_exactness_of_boundaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for p in [2u64, 3, 5] {
            let field = Field::prime(p).unwrap();
            for n in 2..=4usize {
                for i in 0..=n - 2 {
                    let eta = DiffForm::random_poly(&field, n, i, 3, 3, &mut rng).unwrap();
                    let d1 = eta.exterior_derivative().unwrap();
                    assert!(d1.exterior_derivative().unwrap().is_zero());
                    if n <= 3 {
                        assert!(d1.is_exact_bounded(2).unwrap(), "{:?}", eta);
                        let pre = d1.exact_preimage(2).unwrap().unwrap();
                        assert_eq!(pre.exterior_derivative().unwrap(), d1);
                    }
                }
            }
        }
    }

    #[test]
    fn leibniz_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for p in [2u64, 3, 5] {
            let field = Field::prime(p).unwrap();
            for _ in 0..20 {
                let n = 3;
                let f = Poly::random(&field, n, 3, 3, &mut rng);
                let g = Poly::random(&field, n, 3, 3, &mut rng);
                let j = [1usize];
                let lhs = DiffForm::poly_term(&f * &g, &j).unwrap().exterior_derivative().unwrap();
                let dg = DiffForm::poly_term(g.clone(), &j).unwrap().exterior_derivative().unwrap();
                let df = DiffForm::poly_term(f.clone(), &j).unwrap().exterior_derivative().unwrap();
                let rhs = dg.mul_poly(&f).try_add(&df.mul_poly(&g)).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn additivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let field = Field::prime(3).unwrap();
        for _ in 0..30 {
            let a = DiffForm::random_poly(&field, 3, 1, 3, 3, &mut rng).unwrap();
            let b = DiffForm::random_poly(&field, 3, 1, 3, 3, &mut rng).unwrap();
            let lhs = a.try_add(&b).unwrap().exterior_derivative().unwrap();
            let rhs = a
                .exterior_derivative()
                .unwrap()
                .try_add(&b.exterior_derivative().unwrap())
                .unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}
