//! Seeded randomized property suites.
//!
//! Every suite draws its inputs from a `ChaCha8Rng` seeded by the caller, so
//! a `(suite, cases, seed)` triple always produces the same report.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cartier::{inverse_cartier, trace_iterated, trace_poly_top, trace_rational_top};
use crate::field::Field;
use crate::forms::{index_subsets, DiffForm, LinearSystem, TopForm};
use crate::fsplit::{fedder_hypersurface, verify_certificate};
use crate::poly::{Monomial, Poly, RationalFn};
use crate::projective::{map_verdict, trace_matrix, DivisorSpec, SemilinearMap};

pub const SUITES: [&str; 7] = [
    "semilinearity",
    "composition",
    "kernel-exact",
    "cartier-roundtrip",
    "oracle",
    "fedder-cert",
    "chart-independence",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub property: String,
    pub cases: usize,
    pub passed: usize,
    pub failures: usize,
    pub first_counterexample: Option<String>,
}

impl PropertyReport {
    fn new(property: &str) -> Self {
        PropertyReport {
            property: property.to_string(),
            cases: 0,
            passed: 0,
            failures: 0,
            first_counterexample: None,
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if ok {
            self.passed += 1;
        } else {
            self.failures += 1;
            if self.first_counterexample.is_none() {
                self.first_counterexample = Some(describe());
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub properties: Vec<PropertyReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(|p| p.failures == 0)
    }

    pub fn cases(&self) -> usize {
        self.properties.iter().map(|p| p.cases).sum()
    }
}

/// Runs a named suite, or every suite for `"all"`. Returns `None` for an
/// unknown name.
pub fn run(suite: &str, cases: usize, seed: u64) -> Option<Vec<SuiteReport>> {
    if suite == "all" {
        return Some(
            SUITES
                .iter()
                .map(|s| run_one(s, cases, seed).expect("listed suite"))
                .collect(),
        );
    }
    run_one(suite, cases, seed).map(|r| vec![r])
}

fn run_one(suite: &str, cases: usize, seed: u64) -> Option<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let properties = match suite {
        "semilinearity" => semilinearity(cases, &mut rng),
        "composition" => composition(cases, &mut rng),
        "kernel-exact" => kernel_exact(cases, &mut rng),
        "cartier-roundtrip" => cartier_roundtrip(cases, &mut rng),
        "oracle" => oracle(cases, &mut rng),
        "fedder-cert" => fedder_cert(cases, &mut rng),
        "chart-independence" => chart_independence(cases, &mut rng),
        _ => return None,
    };
    Some(SuiteReport {
        suite: suite.to_string(),
        seed,
        properties,
    })
}

fn fields() -> Vec<Field> {
    vec![
        Field::prime(2).unwrap(),
        Field::prime(3).unwrap(),
        Field::prime(5).unwrap(),
        Field::extension(2, &[1, 1, 1]).unwrap(),
        Field::extension(3, &[1, 0, 1]).unwrap(),
    ]
}

fn ord(field: &Field) -> u64 {
    field.order().expect("small field")
}

fn names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{}", i)).collect()
}

fn nonzero_poly(field: &Field, n: usize, max_deg: u32, nterms: usize, rng: &mut ChaCha8Rng) -> Poly {
    loop {
        let f = Poly::random(field, n, max_deg, rng.gen_range(1..=nterms), rng);
        if !f.is_zero() {
            return f;
        }
    }
}

fn random_top(field: &Field, n: usize, rng: &mut ChaCha8Rng) -> TopForm {
    let h = Poly::random(field, n, 4, 4, rng);
    let g = nonzero_poly(field, n, 2, 2, rng);
    TopForm::new(RationalFn::new(h, g).unwrap())
}

/// Exponents kept small enough that `g^{q-1}` stays cheap.
fn max_e(field: &Field) -> u32 {
    match ord(field) {
        2 | 3 => 2,
        _ => 1,
    }
}

fn show_top(w: &TopForm) -> String {
    w.display_with(&names(w.nvars())).to_string()
}

fn show_rat(u: &RationalFn) -> String {
    u.display_with(&names(u.nvars())).to_string()
}

fn semilinearity(cases: usize, rng: &mut ChaCha8Rng) -> Vec<PropertyReport> {
    let fields = fields();
    let mut semi = PropertyReport::new("trace(u^q w) = u trace(w)");
    let mut additive = PropertyReport::new("trace(w1 + w2) = trace(w1) + trace(w2)");
    let mut repr = PropertyReport::new("equal rational functions have equal traces");
    for _ in 0..cases {
        let field = fields.choose(rng).unwrap().clone();
        let n = rng.gen_range(1..=3);
        let e = rng.gen_range(1..=max_e(&field));
        let q = (field.p() as u64).pow(e);
        let w = random_top(&field, n, rng);
        let u = RationalFn::new(
            nonzero_poly(&field, n, 2, 2, rng),
            nonzero_poly(&field, n, 2, 2, rng),
        )
        .unwrap();

        let lhs = trace_rational_top(&TopForm::new(w.coeff().try_mul(&u.pow(q)).unwrap()), e);
        let rhs = trace_rational_top(&w, e).coeff().try_mul(&u).unwrap();
        semi.record(*lhs.coeff() == rhs, || {
            format!("p^s={} e={} w={} u={}", ord(&field), e, show_top(&w), show_rat(&u))
        });

        let w2 = random_top(&field, n, rng);
        let sum = TopForm::new(w.coeff().try_add(w2.coeff()).unwrap());
        let lhs = trace_rational_top(&sum, e);
        let rhs = trace_rational_top(&w, e)
            .coeff()
            .try_add(trace_rational_top(&w2, e).coeff())
            .unwrap();
        additive.record(*lhs.coeff() == rhs, || {
            format!("p^s={} e={} w1={} w2={}", ord(&field), e, show_top(&w), show_top(&w2))
        });

        let v = nonzero_poly(&field, n, 1, 2, rng);
        let same = RationalFn::new(w.coeff().num() * &v, w.coeff().den() * &v).unwrap();
        let lhs = trace_rational_top(&TopForm::new(same.clone()), e);
        let rhs = trace_rational_top(&w, e);
        repr.record(lhs == rhs, || {
            format!("p^s={} e={} w={} w'={}", ord(&field), e, show_top(&w), show_rat(&same))
        });
    }
    vec![semi, additive, repr]
}

/// `Tr^e(D)` factored as `Tr^{e-1}(D) ∘ Tr^1(p^{e-1} D)`.
fn matrix_composition_holds(e_part: &DivisorSpec, d: &DivisorSpec, e: u32, chart: usize) -> bool {
    let direct = trace_matrix(e_part, d, e, chart).unwrap();
    let q = d.field().p().pow(e - 1);
    let inner = trace_matrix(e_part, &d.scale(q), 1, chart).unwrap();
    let outer = trace_matrix(e_part, d, e - 1, chart).unwrap();
    let composed = SemilinearMap::compose(&outer, &inner).unwrap();
    composed == direct
}

fn random_homogeneous(field: &Field, nvars: usize, deg: u32, rng: &mut ChaCha8Rng) -> Poly {
    let monos = Monomial::of_degree(nvars, deg);
    loop {
        let mut f = Poly::zero(field, nvars);
        for _ in 0..rng.gen_range(1..=3) {
            f.add_term(monos.choose(rng).unwrap().clone(), field.random(rng));
        }
        if !f.is_zero() {
            return f;
        }
    }
}

/// A small effective divisor on `P^n` whose hypersurface is not a power of
/// any coordinate, so that every chart is usable.
fn random_divisor(field: &Field, n: usize, max_k: i64, rng: &mut ChaCha8Rng) -> DivisorSpec {
    let k = rng.gen_range(0..=max_k);
    if rng.gen_bool(0.5) {
        return DivisorSpec::hyperplanes(field, n, k);
    }
    loop {
        let f = random_homogeneous(field, n + 1, rng.gen_range(1..=2), rng);
        let pure_power = f.num_terms() == 1 && f.terms().next().unwrap().0.exps().iter().filter(|&&a| a > 0).count() == 1;
        if !pure_power {
            return DivisorSpec::new(field, n, vec![(f, 1)], k).unwrap();
        }
    }
}

fn composition(cases: usize, rng: &mut ChaCha8Rng) -> Vec<PropertyReport> {
    let fields = fields();
    let mut iterated = PropertyReport::new("trace_iterated(w, e) = trace(w, e)");
    for _ in 0..cases {
        let field = fields.choose(rng).unwrap().clone();
        let n = rng.gen_range(1..=3);
        let e = rng.gen_range(1..=max_e(&field) + 1);
        let w = random_top(&field, n, rng);
        iterated.record(trace_iterated(&w, e) == trace_rational_top(&w, e), || {
            format!("p^s={} e={} w={}", ord(&field), e, show_top(&w))
        });
    }

    let mut matrix = PropertyReport::new("Tr^e(D) = Tr^{e-1}(D) o Tr^1(p^{e-1} D)");
    let primes = [Field::prime(2).unwrap(), Field::prime(3).unwrap()];
    for _ in 0..cases.div_ceil(10) {
        let field = primes.choose(rng).unwrap().clone();
        let n = rng.gen_range(1..=2);
        let e_part = random_divisor(&field, n, 1, rng);
        let d = DivisorSpec::hyperplanes(&field, n, rng.gen_range(n as i64 + 1..=n as i64 + 2));
        let names = names(n + 1);
        matrix.record(matrix_composition_holds(&e_part, &d, 2, n), || {
            format!(
                "p={} n={} E={} D={} e=2",
                field.p(),
                n,
                e_part.display_with(&names),
                d.display_with(&names)
            )
        });
    }
    vec![iterated, matrix]
}

fn kernel_exact(cases: usize, rng: &mut ChaCha8Rng) -> Vec<PropertyReport> {
    let fields = fields();
    let mut rep = PropertyReport::new("trace(d eta) = 0");
    for _ in 0..cases {
        let field = fields.choose(rng).unwrap().clone();
        let n = rng.gen_range(1..=3);
        let eta = DiffForm::random_poly(&field, n, n - 1, 8, 4, rng).unwrap();
        let top = TopForm::try_from(&eta.exterior_derivative().unwrap()).unwrap();
        let traced = trace_poly_top(&top.coeff().as_poly().unwrap(), 1);
        rep.record(traced.is_zero(), || {
            format!("p^s={} eta={}", ord(&field), eta.display_with(&names(n)))
        });
    }
    vec![rep]
}

fn cartier_roundtrip(cases: usize, rng: &mut ChaCha8Rng) -> Vec<PropertyReport> {
    let fields = fields();
    let mut round = PropertyReport::new("trace(C^{-1}(w)) = w");
    let mut closed = PropertyReport::new("d(C^{-1}(w)) = 0");
    for _ in 0..cases {
        let field = fields.choose(rng).unwrap().clone();
        let n = rng.gen_range(1..=3);
        let f = Poly::random(&field, n, 5, 4, rng);
        let w = DiffForm::poly_term(f.clone(), &(0..n).collect::<Vec<_>>()).unwrap();
        let c = TopForm::try_from(&inverse_cartier(&w).unwrap()).unwrap();
        let back = trace_poly_top(&c.coeff().as_poly().unwrap(), 1);
        round.record(back == f, || {
            format!("p^s={} w={}", ord(&field), w.display_with(&names(n)))
        });

        let i = rng.gen_range(0..n);
        let form = DiffForm::random_poly(&field, n, i, 5, 3, rng).unwrap();
        let dc = inverse_cartier(&form).unwrap().exterior_derivative().unwrap();
        closed.record(dc.is_zero(), || {
            format!("p^s={} w={}", ord(&field), form.display_with(&names(n)))
        });
    }
    vec![round, closed]
}

/// Solves `f dx = d(eta) + C^{-1}(tau dx)` by linear algebra over monomial
/// bases, without reference to the residue decomposition. Returns `eta` and
/// `tau`, or `None` if the bounded system has no solution.
pub fn oracle_decompose(f: &Poly) -> Option<(DiffForm, Poly)> {
    let field = f.field();
    let n = f.nvars();
    let p = field.p() as i64;
    let top: Vec<usize> = (0..n).collect();
    let deg = f.total_degree().finite().unwrap_or(0) as i64;
    let mut system = LinearSystem::new(field);
    let mut eta_unknowns = Vec::new();
    for k_set in index_subsets(n, n - 1) {
        for m in Monomial::up_to_degree(n, deg + 1) {
            let eta = DiffForm::poly_term(Poly::term(field.one(), m.clone()), &k_set).unwrap();
            system.push_column(&eta.exterior_derivative().unwrap().poly_terms().unwrap());
            eta_unknowns.push((k_set.clone(), m));
        }
    }
    // C^{-1}(t x^m dx) has degree p|m| + n(p-1)
    let tau_basis = Monomial::up_to_degree(n, (deg - n as i64 * (p - 1)).div_euclid(p));
    for m in &tau_basis {
        let w = DiffForm::poly_term(Poly::term(field.one(), m.clone()), &top).unwrap();
        system.push_column(&inverse_cartier(&w).unwrap().poly_terms().unwrap());
    }
    let x = system.solve(&[(top.clone(), f.clone())])?;
    let (x_eta, x_tau) = x.split_at(eta_unknowns.len());
    let mut eta = DiffForm::zero(field, n, n - 1).unwrap();
    for ((k_set, m), c) in eta_unknowns.into_iter().zip(x_eta) {
        if !c.is_zero() {
            eta.add_term(RationalFn::from_poly(Poly::term(c.clone(), m)), &k_set)
                .unwrap();
        }
    }
    // the unknown multiplies C^{-1}(x^m dx), which is p-linear in the coefficient
    let mut tau = Poly::zero(field, n);
    for (m, c) in tau_basis.into_iter().zip(x_tau) {
        tau.add_term(m, c.inverse_frobenius(1));
    }
    Some((eta, tau))
}

/// One oracle comparison; `Err` carries a description of the mismatch.
pub fn oracle_case(f: &Poly) -> Result<(), String> {
    let n = f.nvars();
    let show = || f.display_with(&names(n)).to_string();
    let (eta, tau) = oracle_decompose(f).ok_or_else(|| format!("no decomposition for {}", show()))?;
    let recombined = eta
        .exterior_derivative()
        .and_then(|d| d.try_add(&inverse_cartier(&DiffForm::poly_term(tau.clone(), &(0..n).collect::<Vec<_>>())?)?))
        .map_err(|err| err.to_string())?;
    if recombined != DiffForm::poly_term(f.clone(), &(0..n).collect::<Vec<_>>()).unwrap() {
        return Err(format!("decomposition of {} does not recombine", show()));
    }
    let traced = trace_poly_top(f, 1);
    if traced != tau {
        return Err(format!(
            "w={} oracle tau={} trace={}",
            show(),
            tau.display_with(&names(n)),
            traced.display_with(&names(n))
        ));
    }
    Ok(())
}

fn oracle(cases: usize, rng: &mut ChaCha8Rng) -> Vec<PropertyReport> {
    let f2 = Field::prime(2).unwrap();
    let mut main = PropertyReport::new("oracle tau = trace (p=2, n=2, deg <= 6)");
    for _ in 0..cases {
        let f = Poly::random(&f2, 2, 6, 8, rng);
        let result = oracle_case(&f);
        main.record(result.is_ok(), || result.unwrap_err());
    }
    let others = [
        Field::prime(3).unwrap(),
        Field::prime(5).unwrap(),
        Field::extension(2, &[1, 1, 1]).unwrap(),
    ];
    let mut wider = PropertyReport::new("oracle tau = trace (other fields, n <= 2)");
    for _ in 0..cases.div_ceil(5) {
        let field = others.choose(rng).unwrap();
        let n = rng.gen_range(1..=2);
        let f = Poly::random(field, n, 10, 6, rng);
        let result = oracle_case(&f);
        wider.record(result.is_ok(), || result.unwrap_err());
    }
    vec![main, wider]
}

fn fedder_cert(cases: usize, rng: &mut ChaCha8Rng) -> Vec<PropertyReport> {
    let primes: Vec<Field> = [2u64, 3, 5, 7].iter().map(|&p| Field::prime(p).unwrap()).collect();
    let mut cert = PropertyReport::new("Fedder verdict certificate verifies");
    let mut tamper = PropertyReport::new("flipped verdict is rejected");
    for _ in 0..cases {
        let field = primes.choose(rng).unwrap().clone();
        let nvars = rng.gen_range(2..=4);
        let f = random_homogeneous(&field, nvars, rng.gen_range(1..=3), rng);
        let show = || format!("p={} f={}", field.p(), f.display_with(&names(nvars)));
        let verdict = fedder_hypersurface(&f).unwrap();
        cert.record(verify_certificate(&f, &verdict), show);
        let mut flipped = verdict.clone();
        flipped.split = !flipped.split;
        tamper.record(!verify_certificate(&f, &flipped), show);
    }
    vec![cert, tamper]
}

fn chart_independence(cases: usize, rng: &mut ChaCha8Rng) -> Vec<PropertyReport> {
    let primes = [Field::prime(2).unwrap(), Field::prime(3).unwrap()];
    let mut rep = PropertyReport::new("verdict agrees on two charts");
    for _ in 0..cases.div_ceil(4) {
        let field = primes.choose(rng).unwrap().clone();
        let n = rng.gen_range(1..=2);
        // the H part of E is the hyperplane at infinity of the chart, so it is
        // a different divisor on each chart; only D may move in its class
        let e_part = random_divisor(&field, n, 0, rng);
        let d = random_divisor(&field, n, 3, rng);
        let c1 = rng.gen_range(0..=n);
        let c2 = (c1 + rng.gen_range(1..=n)) % (n + 1);
        let v1 = map_verdict(&trace_matrix(&e_part, &d, 1, c1).unwrap());
        let v2 = map_verdict(&trace_matrix(&e_part, &d, 1, c2).unwrap());
        let names = names(n + 1);
        rep.record(v1 == v2, || {
            format!(
                "p={} E={} D={} charts {} and {}",
                field.p(),
                e_part.display_with(&names),
                d.display_with(&names),
                c1,
                c2
            )
        });
    }
    vec![rep]
}
