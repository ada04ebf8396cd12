use std::collections::BTreeMap;

use proptest::prelude::*;
use rug::{Complex, Float, Rational};
use symkern::{
    differentiate, evaluate, evaluate_tracked, is_identically_zero, parse, simplify, substitute, EvalPoint, Expr, Kind,
    ZeroTestConfig, ZeroVerdict,
};

fn corpus() -> Vec<Expr> {
    include_str!("data/corpus.txt")
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| parse(l).unwrap_or_else(|e| panic!("{l}: {e}")))
        .collect()
}

fn base_point(precision: u32) -> (BTreeMap<String, Rational>, EvalPoint) {
    let cfg = ZeroTestConfig::default();
    let names = ["x".to_string(), "y".to_string()];
    let sp = cfg.sample_point(&names, 0);
    let ep = sp.to_eval_point(precision);
    (sp.coords, ep)
}

fn abs(c: &Complex) -> Float {
    Float::with_val(c.prec().0, c.abs_ref())
}

fn central_difference(e: &Expr, s: &str, coords: &BTreeMap<String, Rational>, h: &Rational) -> Complex {
    let at = |delta: Rational| {
        let mut p = EvalPoint::new(256).unwrap();
        for (k, v) in coords {
            let v = if k == s { Rational::from(v + &delta) } else { v.clone() };
            p.set_rational(k, &v);
        }
        evaluate(e, &p).unwrap()
    };
    let plus = at(h.clone());
    let minus = at(Rational::from(-h));
    let diff = Complex::with_val(256, &plus - &minus);
    diff / Complex::with_val(256, Rational::from(2 * h))
}

#[test]
fn derivatives_match_central_differences() {
    let (coords, point) = base_point(256);
    let h = Rational::from((1, 1u64 << 40));
    let h2 = Rational::from((1, 1u64 << 41));
    let tol = Float::with_val(256, 1) >> 60u32;
    let exact_floor = Float::with_val(256, 1) >> 200u32;
    for e in corpus() {
        for s in ["x", "y"] {
            let d = evaluate(&differentiate(&e, s), &point).unwrap();
            let scale = Float::with_val(256, abs(&d).max(&Float::with_val(256, 1)));
            let err1 = abs(&Complex::with_val(256, &central_difference(&e, s, &coords, &h) - &d));
            let err2 = abs(&Complex::with_val(256, &central_difference(&e, s, &coords, &h2) - &d));
            assert!(err1 <= Float::with_val(256, &tol * &scale), "d/d{s} {e}: error {err1}");
            if err1 > Float::with_val(256, &exact_floor * &scale) {
                let ratio = Float::with_val(64, &err1 / &err2).to_f64();
                assert!((3.0..=5.0).contains(&ratio), "d/d{s} {e}: halving ratio {ratio}");
            }
        }
    }
}

#[test]
fn evaluation_is_stable_under_doubled_precision() {
    let (_, p1) = base_point(256);
    let (_, p2) = base_point(512);
    for e in corpus() {
        let a = evaluate_tracked(&e, &p1).unwrap();
        let b = evaluate(&e, &p2).unwrap();
        let delta = abs(&Complex::with_val(512, &b - &a.value));
        let bound = Float::with_val(512, 1.0 + a.max_magnitude) >> 128u32;
        assert!(delta <= bound, "{e}: precision drift {delta}");
    }
}

#[test]
fn simplify_preserves_value() {
    let cfg = ZeroTestConfig::default();
    for e in corpus() {
        let s = simplify(&e);
        assert!(is_identically_zero(&(&e - &s), &cfg).unwrap().is_zero(), "{e} vs {s}");
    }
}

#[test]
fn identity_substitution_is_a_no_op() {
    for e in corpus() {
        for s in ["x", "y"] {
            let mut m = BTreeMap::new();
            m.insert(s.to_string(), Expr::sym(s));
            assert_eq!(substitute(&e, &m), e);
        }
    }
}

#[test]
fn corpus_round_trips_through_the_grammar() {
    for e in corpus() {
        assert_eq!(parse(&e.to_string()).unwrap(), e, "{e}");
    }
}

/// `0^(-r)` is representable but the grammar rejects a literal division by zero.
fn has_zero_reciprocal(e: &Expr) -> bool {
    match e.kind() {
        Kind::Pow(b, x) => (b.is_zero() && x.cmp0() == std::cmp::Ordering::Less) || has_zero_reciprocal(b),
        Kind::Add(ts) | Kind::Mul(ts) => ts.iter().any(has_zero_reciprocal),
        Kind::Exp(x) | Kind::Log(x) | Kind::Atanh(x) => has_zero_reciprocal(x),
        _ => false,
    }
}

fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        prop::sample::select(vec!["x", "y", "z"]).prop_map(Expr::sym),
        (-6i64..=6).prop_map(Expr::int),
        (-6i64..=6, 1i64..=5).prop_map(|(n, d)| Expr::ratio(n, d)),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::add_all),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::mul_all),
            (inner.clone(), -3i64..=3, 1i64..=3).prop_map(|(b, n, d)| {
                if b.is_zero() {
                    b
                } else {
                    Expr::pow(b, Rational::from((n, d)))
                }
            }),
            inner.clone().prop_map(Expr::exp),
            inner.clone().prop_map(Expr::log),
            inner.clone().prop_map(Expr::atanh),
            inner.prop_map(|e| -e),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn render_parse_round_trip(e in arb_expr()) {
        prop_assume!(!has_zero_reciprocal(&e));
        let text = e.to_string();
        let back = parse(&text).map_err(|err| TestCaseError::fail(format!("{text}: {err}")))?;
        prop_assert_eq!(back, e, "rendered as {}", text);
    }

    #[test]
    fn nonzero_polynomials_get_reproducible_witnesses(
        coeffs in prop::collection::btree_map((0u32..=8, 0u32..=8), -5i64..=5, 1..12)
    ) {
        let terms: Vec<Expr> = coeffs
            .iter()
            .filter(|((i, j), c)| i + j <= 8 && **c != 0)
            .map(|((i, j), c)| Expr::mul_all([
                Expr::int(*c),
                Expr::powi(Expr::sym("x"), i64::from(*i)),
                Expr::powi(Expr::sym("y"), i64::from(*j)),
            ]))
            .collect();
        prop_assume!(!terms.is_empty());
        let poly = Expr::add_all(terms);
        prop_assume!(!poly.is_zero());
        let cfg = ZeroTestConfig::default();
        let first = is_identically_zero(&poly, &cfg).unwrap();
        let ZeroVerdict::NonZero(w) = first.clone() else {
            return Err(TestCaseError::fail(format!("{poly} judged zero")));
        };
        prop_assert_eq!(is_identically_zero(&poly, &cfg).unwrap(), first);
        // the witness value is the exact polynomial value at the rational point
        let mut exact = Rational::new();
        let x = w.point.coords.get("x").cloned().unwrap_or_default();
        let y = w.point.coords.get("y").cloned().unwrap_or_default();
        for ((i, j), c) in &coeffs {
            if i + j <= 8 {
                exact += Rational::from(*c) * x.clone().pow(*i) * y.clone().pow(*j);
            }
        }
        prop_assert!(exact != 0);
    }
}

use rug::ops::Pow;
