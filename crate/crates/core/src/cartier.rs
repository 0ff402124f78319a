//! The trace map of the `e`-th Frobenius on top forms of `k[x_1, ..., x_n]`
//! and the inverse Cartier operator.
//!
//! With `q = p^e`, every polynomial decomposes uniquely as
//! `f = sum_r g_r^q x^r` over residues `0 <= r_j < q`. The trace sends
//! `f dx` to `g_{(q-1, ..., q-1)} dx`: the monomial `x^{q-1} dx` maps to
//! `dx`, every other residue maps to zero, and the map is `q^{-1}`-linear,
//! `Tr(u^q w) = u Tr(w)`.
//!
//! A rational form `h/g dx` is traced by rewriting it as
//! `h g^{q-1} / g^q dx`, so that `Tr(h/g dx) = Tr(h g^{q-1} dx) / g`.

use crate::forms::{DiffForm, FormError, TopForm};
use crate::poly::{Monomial, Poly, RationalFn};

/// Output of [`trace`]: the traced form together with the exponent used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceResult {
    pub value: TopForm,
    pub e: u32,
}

fn q_minus_one_residue(f: &Poly, e: u32) -> Monomial {
    let q = (f.field().p() as u64).pow(e);
    Monomial::from_exps(&vec![(q - 1) as u32; f.nvars()])
}

/// `Tr^e(f dx_1 ^ ... ^ dx_n) = g dx_1 ^ ... ^ dx_n`; returns `g`.
pub fn trace_poly_top(f: &Poly, e: u32) -> Poly {
    assert!(e > 0, "Frobenius exponent must be positive");
    f.frobenius_component(e, &q_minus_one_residue(f, e))
}

/// Trace of a rational top form `h/g dx`, returned as `Tr(h g^{q-1} dx) / g`.
pub fn trace_rational_top(form: &TopForm, e: u32) -> TopForm {
    assert!(e > 0, "Frobenius exponent must be positive");
    let h = form.coeff().num();
    let g = form.coeff().den();
    let q = (h.field().p() as u64).pow(e);
    let cleared = if g.as_constant().is_some_and(|c| c.is_one()) {
        h.clone()
    } else {
        h * &g.pow(q - 1)
    };
    let num = trace_poly_top(&cleared, e);
    TopForm::new(RationalFn::new(num, g.clone()).expect("denominator is non-zero"))
}

/// `Tr^e` computed as `e` successive applications of `Tr^1`.
pub fn trace_iterated(form: &TopForm, e: u32) -> TopForm {
    assert!(e > 0, "Frobenius exponent must be positive");
    let mut cur = form.clone();
    for _ in 0..e {
        cur = trace_rational_top(&cur, 1);
    }
    cur
}

pub fn trace(form: &TopForm, e: u32) -> TraceResult {
    TraceResult {
        value: trace_rational_top(form, e),
        e,
    }
}

/// The representative `f^p * prod_{j in J} x_j^{p-1} dx_J` of
/// `C^{-1}(f dx_J)`, extended additively. It is always a closed form.
pub fn inverse_cartier(form: &DiffForm) -> Result<DiffForm, FormError> {
    let p = form.field().p();
    let n = form.nvars();
    let mut out = DiffForm::zero(form.field(), n, form.degree())?;
    for (j_set, f) in form.poly_terms()? {
        let mut exps = vec![0u32; n];
        for &j in &j_set {
            exps[j] = p - 1;
        }
        let c = f.frobenius_power(1).mul_monomial(&Monomial::from_exps(&exps));
        out.add_term(RationalFn::from_poly(c), &j_set)?;
    }
    Ok(out)
}
