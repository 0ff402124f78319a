//! Algebraic invariants of fields, polynomials, rational functions and forms.

use frobtrace::field::Field;
use frobtrace::forms::DiffForm;
use frobtrace::poly::{Monomial, Poly, RationalFn};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn field(i: usize) -> Field {
    match i {
        0 => Field::prime(2).unwrap(),
        1 => Field::prime(3).unwrap(),
        2 => Field::prime(5).unwrap(),
        3 => Field::extension(2, &[1, 1, 1]).unwrap(),
        4 => Field::extension(3, &[1, 0, 1]).unwrap(),
        5 => Field::extension(2, &[1, 1, 0, 1]).unwrap(),
        _ => Field::extension(3, &[2, 0, 0, 2, 1]).unwrap(),
    }
}

const PRIMES_ONLY: usize = 3;
const ALL_FIELDS: usize = 7;

type Terms = Vec<(Vec<u32>, Vec<i64>)>;

fn build(f: &Field, nvars: usize, terms: &[(Vec<u32>, Vec<i64>)]) -> Poly {
    let mut out = Poly::zero(f, nvars);
    for (exps, coeffs) in terms {
        let c = f.from_coeffs(&coeffs[..f.s()]).unwrap();
        out.add_term(Monomial::from_exps(&exps[..nvars]), c);
    }
    out
}

/// Raises the last exponent of every term so all terms have degree `deg`.
fn homogenize(terms: &mut Terms, nvars: usize, deg: u32) {
    for (exps, _) in terms.iter_mut() {
        let rest: u32 = exps[..nvars - 1].iter().sum();
        exps[nvars - 1] = deg - rest;
    }
}

fn terms(max_exp: u32, max_terms: usize) -> impl Strategy<Value = Terms> {
    prop::collection::vec(
        (prop::collection::vec(0..=max_exp, 4), prop::collection::vec(-5i64..5, 4)),
        0..=max_terms,
    )
}

/// `k` polynomials over one field in one ring.
fn polys(
    k: usize,
    fields: usize,
    max_vars: usize,
    max_exp: u32,
    max_terms: usize,
    homogeneous: bool,
) -> impl Strategy<Value = (Field, usize, Vec<Poly>)> {
    (0..fields, 1..=max_vars, prop::collection::vec(terms(max_exp, max_terms), k)).prop_map(
        move |(fi, nvars, mut ts)| {
            let f = field(fi);
            if homogeneous {
                let deg = 4 * max_exp;
                for t in ts.iter_mut() {
                    homogenize(t, nvars, deg);
                }
            }
            let ps = ts.iter().map(|t| build(&f, nvars, t)).collect();
            (f, nvars, ps)
        },
    )
}

fn nonzero(p: &Poly) -> Poly {
    if p.is_zero() {
        Poly::one(p.field(), p.nvars())
    } else {
        p.clone()
    }
}

fn poly_in(fields: usize, max_vars: usize, max_exp: u32, max_terms: usize) -> impl Strategy<Value = (Field, usize, Poly)> {
    polys(1, fields, max_vars, max_exp, max_terms, false).prop_map(|(f, n, mut ps)| (f, n, ps.pop().unwrap()))
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 128,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn frobenius_is_a_ring_homomorphism(fi in 0..ALL_FIELDS, a in prop::collection::vec(0i64..3, 4),
                                        b in prop::collection::vec(0i64..3, 4), e in 0u32..8) {
        let f = field(fi);
        let a = f.from_coeffs(&a[..f.s()]).unwrap();
        let b = f.from_coeffs(&b[..f.s()]).unwrap();
        prop_assert_eq!((&a + &b).frobenius(e), &a.frobenius(e) + &b.frobenius(e));
        prop_assert_eq!((&a * &b).frobenius(e), &a.frobenius(e) * &b.frobenius(e));
        prop_assert_eq!(a.frobenius(e).inverse_frobenius(e), a.clone());
        if f.s() == 1 {
            prop_assert_eq!(a.frobenius(e), a);
        }
    }

    #[test]
    fn decomposition_reassembles((f, nvars, p) in poly_in(PRIMES_ONLY, 4, 20, 8), e in 1u32..=3) {
        let q = (f.p() as u64).pow(e);
        let buckets = p.frobenius_decompose(e);
        let mut sum = Poly::zero(&f, nvars);
        for (r, g) in &buckets {
            prop_assert!(r.exps().iter().all(|&a| (a as u64) < q));
            prop_assert!(!g.is_zero());
            // the residue occurs in p
            prop_assert!(p.terms().any(|(m, _)| m.exps().iter().zip(r.exps()).all(|(&a, &b)| a as u64 % q == b as u64)));
            sum = sum + g.frobenius_power(e).mul_monomial(r);
        }
        prop_assert_eq!(sum, p);
    }

    #[test]
    fn pe_th_root_inverts_frobenius_power((_f, _n, p) in poly_in(ALL_FIELDS, 3, 6, 6), e in 1u32..=3) {
        prop_assert_eq!(p.frobenius_power(e).pe_th_root(e), Some(p.clone()));
        prop_assert_eq!(p.pow(p.field().p() as u64), p.frobenius_power(1));
    }

    #[test]
    fn pow_agrees_with_naive((_f, _n, p) in poly_in(ALL_FIELDS, 3, 3, 3), k in 0u64..12) {
        prop_assert_eq!(p.pow(k), p.pow_naive(k));
    }

    #[test]
    fn dehomogenize_is_a_ring_homomorphism((_f, nvars, ps) in polys(2, ALL_FIELDS, 4, 3, 5, true), chart in 0usize..4) {
        let chart = chart % nvars;
        let (a, b) = (&ps[0], &ps[1]);
        let prod = (a * b).dehomogenize(chart).unwrap();
        let sum = (a + b).dehomogenize(chart).unwrap();
        let da = a.dehomogenize(chart).unwrap();
        let db = b.dehomogenize(chart).unwrap();
        prop_assert_eq!(prod, &da * &db);
        prop_assert_eq!(sum, &da + &db);
    }

    #[test]
    fn division_recovers_factors((_f, _n, ps) in polys(2, ALL_FIELDS, 3, 3, 4, false)) {
        let (a, b) = (&ps[0], nonzero(&ps[1]));
        let prod = a * &b;
        prop_assert_eq!(&prod.div_exact(&b).unwrap(), a);
    }

    #[test]
    fn rational_equality_is_an_equivalence((_f, _n, ps) in polys(4, ALL_FIELDS, 2, 3, 3, false)) {
        let a = ps[0].clone();
        let b = nonzero(&ps[1]);
        let u = nonzero(&ps[2]);
        let v = nonzero(&ps[3]);
        let r1 = RationalFn::new(a.clone(), b.clone()).unwrap();
        let r2 = RationalFn::new(&a * &u, &b * &u).unwrap();
        let r3 = RationalFn::new(&(&a * &u) * &v, &(&b * &u) * &v).unwrap();
        prop_assert_eq!(&r1, &r1);
        prop_assert_eq!(r1 == r2, r2 == r1);
        prop_assert!(r1 == r2 && r2 == r3 && r1 == r3);
    }
}

#[test]
fn frobenius_bijective_exhaustively() {
    for fi in 0..ALL_FIELDS {
        let f = field(fi);
        let all: Vec<_> = f.elements().collect();
        for e in 0..=8 {
            let mut images: Vec<Vec<u32>> = all.iter().map(|a| a.frobenius(e).coeffs().to_vec()).collect();
            images.sort();
            images.dedup();
            assert_eq!(images.len(), all.len(), "F_{} e={}", all.len(), e);
            for a in &all {
                assert_eq!(&a.inverse_frobenius(e).frobenius(e), a);
            }
        }
    }
}

#[test]
fn d_squared_is_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for fi in 0..PRIMES_ONLY {
        let f = field(fi);
        for n in 2..=4 {
            for i in 0..=n - 2 {
                for _ in 0..6 {
                    let w = DiffForm::random_poly(&f, n, i, 6, 4, &mut rng).unwrap();
                    let dd = w.exterior_derivative().unwrap().exterior_derivative().unwrap();
                    assert!(dd.is_zero(), "{:?}", w);
                }
            }
        }
    }
}

#[test]
fn exact_forms_are_detected() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for fi in 0..PRIMES_ONLY {
        let f = field(fi);
        for n in 1..=3 {
            for i in 0..n {
                let eta = DiffForm::random_poly(&f, n, i, 4, 3, &mut rng).unwrap();
                let d_eta = eta.exterior_derivative().unwrap();
                assert!(d_eta.is_exact_bounded(3).unwrap(), "{:?}", eta);
                let pre = d_eta.exact_preimage(3).unwrap().unwrap();
                assert_eq!(pre.exterior_derivative().unwrap(), d_eta);
            }
        }
    }
}

#[test]
fn leibniz_and_additivity() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for fi in 0..PRIMES_ONLY {
        let f = field(fi);
        for n in 1..=3 {
            for i in 0..n {
                let w1 = DiffForm::random_poly(&f, n, i, 5, 3, &mut rng).unwrap();
                let w2 = DiffForm::random_poly(&f, n, i, 5, 3, &mut rng).unwrap();
                let d_sum = w1.try_add(&w2).unwrap().exterior_derivative().unwrap();
                let sum_d = w1
                    .exterior_derivative()
                    .unwrap()
                    .try_add(&w2.exterior_derivative().unwrap())
                    .unwrap();
                assert_eq!(d_sum, sum_d);

                // d(g w) = dg ^ w + g dw, with dg ^ w expanded as sum_j dg/dx_j dx_j ^ w
                let g = Poly::random(&f, n, 3, 3, &mut rng);
                let lhs = w1.mul_poly(&g).exterior_derivative().unwrap();
                let mut rhs = w1.exterior_derivative().unwrap().mul_poly(&g);
                let zero_form = DiffForm::poly_term(g.clone(), &[]).unwrap();
                let dg = zero_form.exterior_derivative().unwrap();
                for (j_set, c) in dg.poly_terms().unwrap() {
                    let j = j_set[0];
                    for (k_set, w) in w1.poly_terms().unwrap() {
                        if k_set.contains(&j) {
                            continue;
                        }
                        let mut idx = vec![j];
                        idx.extend(k_set);
                        let term = DiffForm::poly_term(&c * &w, &idx).unwrap();
                        rhs = rhs.try_add(&term).unwrap();
                    }
                }
                assert_eq!(lhs, rhs);
            }
        }
    }
}
