//! F-splitting checks.
//!
//! For a hypersurface cone `k[x_0..x_n]/(f)` Fedder's criterion says the
//! cone is F-split iff `f^{p-1}` is not in `(x_0^p, ..., x_n^p)`, i.e. iff
//! some monomial of `f^{p-1}` has every exponent at most `p - 1`. For
//! projective space the splitting is checked directly: the trace on global
//! sections of `omega(kH)` must be surjective.

use serde::Serialize;
use thiserror::Error;

use crate::field::{Field, FieldError, Scalar};
use crate::poly::{Monomial, Poly};
use crate::projective::{map_verdict, trace_matrix, DivisorSpec, ProjectiveError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FsplitError {
    #[error("the zero polynomial does not define a hypersurface")]
    ZeroPolynomial,
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("omega({k}H) on P^{n} has no sections (need k >= n + 1)")]
    EmptyTarget { n: usize, k: i64 },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Projective(#[from] ProjectiveError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FsplitVerdict {
    pub split: bool,
    /// A monomial of `f^{p-1}` with all exponents `<= p - 1`, and its coefficient.
    pub witness: Option<(Monomial, Scalar)>,
}

fn admissible(m: &Monomial, p: u32) -> bool {
    m.exps().iter().all(|&a| a < p)
}

/// Fedder's criterion for the cone over `V(f)`.
pub fn fedder_hypersurface(f: &Poly) -> Result<FsplitVerdict, FsplitError> {
    if f.is_zero() {
        return Err(FsplitError::ZeroPolynomial);
    }
    if !f.is_homogeneous() {
        return Err(FsplitError::NotHomogeneous);
    }
    let p = f.field().p();
    let mut power = Poly::one(f.field(), f.nvars());
    for _ in 1..p {
        power = &power * f;
    }
    let witness = power
        .terms()
        .rev()
        .find(|(m, _)| admissible(m, p))
        .map(|(m, c)| (m.clone(), c.clone()));
    Ok(FsplitVerdict {
        split: witness.is_some(),
        witness,
    })
}

/// Re-derives the verdict from an independently computed `f^{p-1}`
/// (square-and-multiply) and checks the witness against it.
pub fn verify_certificate(f: &Poly, verdict: &FsplitVerdict) -> bool {
    let p = f.field().p();
    let power = f.pow_naive(p as u64 - 1);
    match &verdict.witness {
        Some((m, c)) => verdict.split && admissible(m, p) && !c.is_zero() && power.coeff(m) == *c,
        None => !verdict.split && power.terms().all(|(m, _)| !admissible(m, p)),
    }
}

/// Whether `Tr^e: H^0(omega(p^e k H)) -> H^0(omega(k H))` on `P^n` over
/// `F_p` is surjective.
pub fn pn_trace_surjectivity(n: usize, k: i64, p: u64, e: u32) -> Result<bool, FsplitError> {
    if k < n as i64 + 1 {
        return Err(FsplitError::EmptyTarget { n, k });
    }
    let field = Field::prime(p)?;
    let zero = DivisorSpec::hyperplanes(&field, n, 0);
    let d = DivisorSpec::hyperplanes(&field, n, k);
    let map = trace_matrix(&zero, &d, e, n)?;
    Ok(map_verdict(&map).surjective)
}

#[derive(Debug, Clone, Serialize)]
pub struct FsplitJson {
    pub split: bool,
    pub witness: Option<String>,
    pub coefficient: Option<Vec<u32>>,
}

impl FsplitJson {
    pub fn new(v: &FsplitVerdict, names: &[String]) -> Self {
        FsplitJson {
            split: v.split,
            witness: v
                .witness
                .as_ref()
                .map(|(m, _)| m.display_with(names).to_string()),
            coefficient: v.witness.as_ref().map(|(_, c)| c.coeffs().to_vec()),
        }
    }
}
