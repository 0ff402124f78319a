//! Section spaces of twisted canonical sheaves on `P^n` and the matrices of
//! the trace map between them.
//!
//! For `D = sum_j a_j V(f_j) + k H` the global sections of
//! `omega_{P^n}(D)` are modelled on the affine chart where the chart
//! variable is non-zero as
//!
//! ```text
//! { h / prod_j f_j^{a_j} dx_1 ^ ... ^ dx_n  :  deg h <= sum_j a_j deg f_j + k - (n + 1) }
//! ```
//!
//! with the `f_j` dehomogenized. The bound comes from
//! `omega_{P^n} = O(-(n + 1))`; a negative bound is the zero space.
//!
//! The trace `Tr^e_E(D): omega(E + p^e D) -> omega(E + D)` is `p^{-e}`-linear:
//! its matrix has as column `b` the coordinates of `Tr^e(basis_b)` and acts
//! on a coordinate vector `c` as `M * phi^{-e}(c)`.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cartier::trace_rational_top;
use crate::field::{Field, Scalar};
use crate::forms::TopForm;
use crate::linalg::Matrix;
use crate::poly::{Monomial, Poly, PolyError, RationalFn};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProjectiveError {
    #[error("hypersurface {index} is not homogeneous")]
    NotHomogeneous { index: usize },
    #[error("hypersurface {index} is the zero polynomial")]
    ZeroHypersurface { index: usize },
    #[error("hypersurface {index} has {got} variables, expected {expected}")]
    WrongArity {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("chart variable {chart} out of range for P^{n}")]
    ChartOutOfRange { chart: usize, n: usize },
    #[error("hypersurface {index} ({poly}) does not meet the chart {chart}")]
    ChartComplement {
        index: usize,
        poly: String,
        chart: usize,
    },
    #[error("divisors live on different spaces")]
    Mismatch,
    #[error("the twisting divisor E must be effective (k = {k})")]
    NotEffective { k: i64 },
    #[error("trace of basis element {basis} does not lie in the target space: {reason}")]
    NotInTarget { basis: String, reason: String },
    #[error("cannot compose: inner target and outer source differ")]
    ComposeMismatch,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// `D = sum_j a_j V(f_j) + k H` on `P^n`, with each `f_j` homogeneous in
/// `n + 1` variables. Equal hypersurfaces are merged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorSpec {
    field: Field,
    n: usize,
    hypersurfaces: Vec<(Poly, u32)>,
    k: i64,
}

impl DivisorSpec {
    pub fn new(
        field: &Field,
        n: usize,
        hypersurfaces: Vec<(Poly, u32)>,
        k: i64,
    ) -> Result<Self, ProjectiveError> {
        let mut out = DivisorSpec::hyperplanes(field, n, k);
        for (index, (f, a)) in hypersurfaces.into_iter().enumerate() {
            if f.nvars() != n + 1 {
                return Err(ProjectiveError::WrongArity {
                    index,
                    expected: n + 1,
                    got: f.nvars(),
                });
            }
            if f.field() != field {
                return Err(ProjectiveError::Mismatch);
            }
            if f.is_zero() {
                return Err(ProjectiveError::ZeroHypersurface { index });
            }
            if !f.is_homogeneous() {
                return Err(ProjectiveError::NotHomogeneous { index });
            }
            out.push(f, a);
        }
        Ok(out)
    }

    /// `k H`.
    pub fn hyperplanes(field: &Field, n: usize, k: i64) -> Self {
        DivisorSpec {
            field: field.clone(),
            n,
            hypersurfaces: Vec::new(),
            k,
        }
    }

    fn push(&mut self, f: Poly, a: u32) {
        if a == 0 {
            return;
        }
        match self.hypersurfaces.iter_mut().find(|(g, _)| *g == f) {
            Some((_, b)) => *b += a,
            None => self.hypersurfaces.push((f, a)),
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    pub fn hypersurfaces(&self) -> &[(Poly, u32)] {
        &self.hypersurfaces
    }

    /// `sum_j a_j deg f_j + k`.
    pub fn degree(&self) -> i64 {
        self.hypersurfaces
            .iter()
            .map(|(f, a)| *a as i64 * f.total_degree().finite().unwrap_or(0) as i64)
            .sum::<i64>()
            + self.k
    }

    pub fn is_effective(&self) -> bool {
        self.k >= 0
    }

    pub fn try_add(&self, other: &DivisorSpec) -> Result<DivisorSpec, ProjectiveError> {
        if self.n != other.n || self.field != other.field {
            return Err(ProjectiveError::Mismatch);
        }
        let mut out = self.clone();
        out.k += other.k;
        for (f, a) in &other.hypersurfaces {
            out.push(f.clone(), *a);
        }
        Ok(out)
    }

    pub fn scale(&self, m: u32) -> DivisorSpec {
        let mut out = DivisorSpec::hyperplanes(&self.field, self.n, self.k * m as i64);
        for (f, a) in &self.hypersurfaces {
            out.push(f.clone(), a * m);
        }
        out
    }

    /// `prod_j f_j^{a_j}` dehomogenized at `chart`.
    pub fn chart_denominator(&self, chart: usize) -> Result<Poly, ProjectiveError> {
        if chart > self.n {
            return Err(ProjectiveError::ChartOutOfRange { chart, n: self.n });
        }
        let mut den = Poly::one(&self.field, self.n);
        for (index, (f, a)) in self.hypersurfaces.iter().enumerate() {
            let local = f.dehomogenize(chart)?;
            if local.as_constant().is_some() {
                return Err(ProjectiveError::ChartComplement {
                    index,
                    poly: f.to_string(),
                    chart,
                });
            }
            den = &den * &local.pow(*a as u64);
        }
        Ok(den)
    }

    pub fn display_with(&self, names: &[String]) -> String {
        let mut parts: Vec<String> = self
            .hypersurfaces
            .iter()
            .map(|(f, a)| format!("{}:{}", f.display_with(names), a))
            .collect();
        if self.k != 0 || parts.is_empty() {
            parts.push(format!("H:{}", self.k));
        }
        parts.join(",")
    }
}

/// `E + p^e D`.
pub fn pe_twist(
    divisor: &DivisorSpec,
    e_part: &DivisorSpec,
    e: u32,
) -> Result<DivisorSpec, ProjectiveError> {
    if !e_part.is_effective() {
        return Err(ProjectiveError::NotEffective { k: e_part.k });
    }
    let q = divisor.field.p().pow(e);
    e_part.try_add(&divisor.scale(q))
}

/// Monomial model of `H^0(P^n, omega(D))` on one chart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionSpace {
    divisor: DivisorSpec,
    chart: usize,
    den: Poly,
    bound: i64,
    basis: Vec<Monomial>,
}

pub fn section_space(divisor: &DivisorSpec, chart: usize) -> Result<SectionSpace, ProjectiveError> {
    let den = divisor.chart_denominator(chart)?;
    let bound = divisor.degree() - (divisor.n as i64 + 1);
    Ok(SectionSpace {
        divisor: divisor.clone(),
        chart,
        den,
        bound,
        basis: Monomial::up_to_degree(divisor.n, bound),
    })
}

impl SectionSpace {
    pub fn divisor(&self) -> &DivisorSpec {
        &self.divisor
    }

    pub fn chart(&self) -> usize {
        self.chart
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// The basis form `basis[i] / den dx`.
    pub fn basis_form(&self, i: usize) -> TopForm {
        let num = Poly::term(self.divisor.field.one(), self.basis[i].clone());
        TopForm::new(RationalFn::new(num, self.den.clone()).expect("denominator is non-zero"))
    }

    /// Coordinates of `num / den dx` in the basis, if it lies in the space.
    pub fn coordinates(&self, num: &Poly) -> Option<Vec<Scalar>> {
        let mut out = vec![self.divisor.field.zero(); self.dim()];
        for (m, c) in num.terms() {
            if (m.degree() as i64) > self.bound {
                return None;
            }
            let i = self.basis.iter().position(|b| b == m)?;
            out[i] = c.clone();
        }
        Some(out)
    }
}

/// A `p^{-e}`-linear map between section spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemilinearMap {
    src: SectionSpace,
    tgt: SectionSpace,
    e: u32,
    matrix: Matrix,
}

impl SemilinearMap {
    pub fn src(&self) -> &SectionSpace {
        &self.src
    }

    pub fn tgt(&self) -> &SectionSpace {
        &self.tgt
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// `M * phi^{-e}(c)`.
    pub fn apply(&self, coords: &[Scalar]) -> Vec<Scalar> {
        let rooted: Vec<Scalar> = coords.iter().map(|c| c.inverse_frobenius(self.e)).collect();
        self.matrix.mul_vec(&rooted)
    }

    /// `outer ∘ inner`, with matrix `M_outer * phi^{-e_outer}(M_inner)`.
    pub fn compose(outer: &SemilinearMap, inner: &SemilinearMap) -> Result<SemilinearMap, ProjectiveError> {
        if inner.tgt.basis != outer.src.basis || inner.tgt.den != outer.src.den {
            return Err(ProjectiveError::ComposeMismatch);
        }
        let twisted = inner.matrix.map(|c| c.inverse_frobenius(outer.e));
        Ok(SemilinearMap {
            src: inner.src.clone(),
            tgt: outer.tgt.clone(),
            e: outer.e + inner.e,
            matrix: outer.matrix.mul(&twisted),
        })
    }
}

/// Matrix of `Tr^e_E(D): H^0(omega(E + p^e D)) -> H^0(omega(E + D))` on `chart`.
pub fn trace_matrix(
    e_part: &DivisorSpec,
    divisor: &DivisorSpec,
    e: u32,
    chart: usize,
) -> Result<SemilinearMap, ProjectiveError> {
    let src = section_space(&pe_twist(divisor, e_part, e)?, chart)?;
    let tgt = section_space(&e_part.try_add(divisor)?, chart)?;
    let g_e = e_part.chart_denominator(chart)?;
    let g_d = divisor.chart_denominator(chart)?;
    let field = divisor.field().clone();

    // A source form h / (g_E g_D^q) equals (1/g_D)^q * h/g_E, so by
    // semilinearity its trace is Tr(h/g_E) / g_D.
    let column = |m: &Monomial| -> Result<Vec<Scalar>, ProjectiveError> {
        let h = Poly::term(field.one(), m.clone());
        let form = TopForm::new(RationalFn::new(h, g_e.clone())?);
        let traced = trace_rational_top(&form, e).coeff().div_poly(&g_d)?;
        let not_in_target = |reason: String| ProjectiveError::NotInTarget {
            basis: format!("{} / ({})", m, src.den),
            reason,
        };
        let num = traced
            .numerator_over(&tgt.den)
            .map_err(|err| not_in_target(err.to_string()))?;
        tgt.coordinates(&num).ok_or_else(|| {
            not_in_target(format!(
                "numerator {} exceeds degree bound {}",
                num, tgt.bound
            ))
        })
    };
    let columns = src
        .basis
        .par_iter()
        .map(column)
        .collect::<Result<Vec<_>, _>>()?;
    let matrix = Matrix::from_columns(&field, tgt.dim(), columns);
    Ok(SemilinearMap { src, tgt, e, matrix })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub rank: usize,
    pub surjective: bool,
    pub zero: bool,
}

/// Rank, surjectivity and vanishing of a semilinear map. Since
/// `phi^{-e}` is a bijection of `F_q^m`, the image of `c -> M phi^{-e}(c)`
/// is the column span of `M`, so the ordinary rank applies.
pub fn map_verdict(map: &SemilinearMap) -> Verdict {
    let rank = map.matrix.rank();
    Verdict {
        rank,
        surjective: rank == map.tgt.dim(),
        zero: map.matrix.is_zero(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HypersurfaceJson {
    pub poly: String,
    pub mult: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct DivisorJson {
    pub hypersurfaces: Vec<HypersurfaceJson>,
    pub k: i64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SectionSpaceJson {
    pub divisor: DivisorJson,
    pub den: String,
    pub bound: i64,
    pub dim: usize,
    pub basis: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SemilinearMapJson {
    pub p: u32,
    pub s: usize,
    pub e: u32,
    pub chart: String,
    pub src: SectionSpaceJson,
    pub tgt: SectionSpaceJson,
    pub matrix: Vec<Vec<Vec<u32>>>,
    pub verdict: Verdict,
}

impl DivisorJson {
    pub fn new(d: &DivisorSpec, names: &[String]) -> Self {
        DivisorJson {
            hypersurfaces: d
                .hypersurfaces
                .iter()
                .map(|(f, a)| HypersurfaceJson {
                    poly: f.display_with(names).to_string(),
                    mult: *a,
                })
                .collect(),
            k: d.k,
        }
    }
}

/// Chart variable names: `names` with the chart variable removed.
pub fn chart_names(names: &[String], chart: usize) -> Vec<String> {
    names
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != chart)
        .map(|(_, n)| n.clone())
        .collect()
}

impl SectionSpaceJson {
    /// `names` are the homogeneous variable names.
    pub fn new(space: &SectionSpace, names: &[String]) -> Self {
        let local = chart_names(names, space.chart);
        SectionSpaceJson {
            divisor: DivisorJson::new(&space.divisor, names),
            den: space.den.display_with(&local).to_string(),
            bound: space.bound,
            dim: space.dim(),
            basis: space
                .basis
                .iter()
                .map(|m| m.display_with(&local).to_string())
                .collect(),
        }
    }
}

impl SemilinearMapJson {
    pub fn new(map: &SemilinearMap, names: &[String]) -> Self {
        let m = &map.matrix;
        SemilinearMapJson {
            p: m.field().p(),
            s: m.field().s(),
            e: map.e,
            chart: names
                .get(map.src.chart)
                .cloned()
                .unwrap_or_else(|| format!("x{}", map.src.chart + 1)),
            src: SectionSpaceJson::new(&map.src, names),
            tgt: SectionSpaceJson::new(&map.tgt, names),
            matrix: (0..m.rows())
                .map(|i| m.row(i).iter().map(|c| c.coeffs().to_vec()).collect())
                .collect(),
            verdict: map_verdict(map),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fermat(field: &Field) -> Poly {
        (0..4)
            .map(|i| Poly::var(field, 4, i).pow(3))
            .fold(Poly::zero(field, 4), |a, b| a + b)
    }

    #[test]
    fn fermat_section_space() {
        let f2 = Field::prime(2).unwrap();
        let x = DivisorSpec::new(&f2, 3, vec![(fermat(&f2), 1)], 0).unwrap();
        let d = x.try_add(&DivisorSpec::hyperplanes(&f2, 3, 2)).unwrap();
        let space = section_space(&d, 3).unwrap();
        assert_eq!(space.bound(), 1);
        assert_eq!(space.dim(), 4);
        let names: Vec<String> = ["X", "Y", "Z"].iter().map(|s| s.to_string()).collect();
        assert_eq!(space.den().display_with(&names).to_string(), "X^3 + Y^3 + Z^3 + 1");
    }

    #[test]
    fn vanishing_spaces() {
        let f2 = Field::prime(2).unwrap();
        // omega(-K - X) = omega(4H - X): bound = 4 - 3 - 4 = -3; modelled by kH
        let d = DivisorSpec::hyperplanes(&f2, 3, 1);
        let space = section_space(&d, 3).unwrap();
        assert_eq!(space.bound(), -3);
        assert_eq!(space.dim(), 0);
        let p2 = section_space(&DivisorSpec::hyperplanes(&f2, 2, 3), 2).unwrap();
        assert_eq!((p2.bound(), p2.dim()), (0, 1));
    }

    #[test]
    fn twists() {
        let f2 = Field::prime(2).unwrap();
        let x = DivisorSpec::new(&f2, 3, vec![(fermat(&f2), 1)], 0).unwrap();
        let h = DivisorSpec::hyperplanes(&f2, 3, 1);
        let twisted = pe_twist(&h, &x, 1).unwrap();
        assert_eq!(twisted.k(), 2);
        assert_eq!(twisted.hypersurfaces()[0].1, 1);
        let zero = DivisorSpec::hyperplanes(&f2, 3, 0);
        assert_eq!(pe_twist(&zero, &zero, 1).unwrap(), zero);
        let xh = x.try_add(&h).unwrap();
        let doubled = pe_twist(&xh, &zero, 1).unwrap();
        assert_eq!((doubled.hypersurfaces()[0].1, doubled.k()), (2, 2));
        assert!(matches!(
            pe_twist(&h, &DivisorSpec::hyperplanes(&f2, 3, -1), 1),
            Err(ProjectiveError::NotEffective { k: -1 })
        ));
    }

    #[test]
    fn chart_errors() {
        let f2 = Field::prime(2).unwrap();
        let w3 = Poly::var(&f2, 4, 3).pow(3);
        let d = DivisorSpec::new(&f2, 3, vec![(w3, 1)], 0).unwrap();
        assert!(matches!(
            section_space(&d, 3),
            Err(ProjectiveError::ChartComplement { index: 0, .. })
        ));
        assert!(section_space(&d, 0).is_ok());
        assert!(matches!(
            section_space(&d, 4),
            Err(ProjectiveError::ChartOutOfRange { chart: 4, n: 3 })
        ));
        let bad = Poly::var(&f2, 4, 0) + Poly::one(&f2, 4);
        assert!(matches!(
            DivisorSpec::new(&f2, 3, vec![(bad, 1)], 0),
            Err(ProjectiveError::NotHomogeneous { index: 0 })
        ));
    }

    #[test]
    fn fermat_trace_matrix_is_zero() {
        let f2 = Field::prime(2).unwrap();
        let x = DivisorSpec::new(&f2, 3, vec![(fermat(&f2), 1)], 0).unwrap();
        let h = DivisorSpec::hyperplanes(&f2, 3, 1);
        let t = trace_matrix(&x, &h, 1, 3).unwrap();
        assert_eq!((t.matrix().rows(), t.matrix().cols()), (1, 4));
        assert_eq!(
            map_verdict(&t),
            Verdict {
                rank: 0,
                surjective: false,
                zero: true
            }
        );
    }

    #[test]
    fn p2_is_surjective() {
        let f2 = Field::prime(2).unwrap();
        let zero = DivisorSpec::hyperplanes(&f2, 2, 0);
        let t = trace_matrix(&zero, &DivisorSpec::hyperplanes(&f2, 2, 3), 1, 2).unwrap();
        // omega(6H) = O(3) on P^2 has dimension C(5, 2) = 10
        assert_eq!((t.matrix().rows(), t.matrix().cols()), (1, 10));
        assert_eq!(
            map_verdict(&t),
            Verdict {
                rank: 1,
                surjective: true,
                zero: false
            }
        );
    }

    #[test]
    fn empty_target_is_vacuously_surjective() {
        let f3 = Field::prime(3).unwrap();
        let zero = DivisorSpec::hyperplanes(&f3, 2, 0);
        let t = trace_matrix(&zero, &DivisorSpec::hyperplanes(&f3, 2, 2), 1, 2).unwrap();
        assert_eq!(t.tgt().dim(), 0);
        assert_eq!(t.matrix().rows(), 0);
        let v = map_verdict(&t);
        assert!(v.surjective && v.zero && v.rank == 0);
    }
}
