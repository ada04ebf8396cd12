use biham_core::fixtures::Example;
use biham_core::geometry::Coords;
use biham_core::hydro::BihamiltonianStructure;
use biham_core::pipeline::{run_transform, with_identity_transform};
use biham_core::reciprocal::{
    closedness_certificate, composition_check, general_reciprocal_flow, new_dependent_variables,
    pavlov_transformed_hamiltonian, verify_potential, LinearReciprocalTransform, PotentialRole, SourceDensities,
};
use biham_core::{CoreError, Status};
use symkern::{is_identically_zero, parse, Expr, Rational, SymMatrix, ZeroTestConfig};

fn m(rows: &[&[&str]]) -> SymMatrix {
    SymMatrix::from_rows(rows.iter().map(|r| r.iter().map(|s| parse(s).unwrap()).collect()).collect()).unwrap()
}

fn p(s: &str) -> Expr {
    parse(s).unwrap()
}

fn lr(a: i64, b: i64, pp: i64, q: i64) -> LinearReciprocalTransform {
    LinearReciprocalTransform::new(a.into(), b.into(), pp.into(), q.into()).unwrap()
}

fn zero(e: &Expr, cfg: &ZeroTestConfig) -> bool {
    is_identically_zero(e, cfg).unwrap().is_zero()
}

fn toda(cfg: &ZeroTestConfig) -> BihamiltonianStructure {
    BihamiltonianStructure::new(
        Coords::new(["w", "u"]).unwrap(),
        m(&[&["0", "1"], &["1", "0"]]),
        m(&[&["2*exp(u)", "w"], &["w", "2"]]),
        cfg,
    )
    .unwrap()
}

#[test]
fn new_variables_for_both_examples() {
    let cfg = ZeroTestConfig::default();
    let kdv = BihamiltonianStructure::new(Coords::new(["u"]).unwrap(), m(&[&["1"]]), m(&[&["u"]]), &cfg).unwrap();
    let (vc, checks) =
        new_dependent_variables(&kdv, &p("u^5/5"), &lr(0, 1, -1, 0), Coords::new(["v"]).unwrap(), None, &cfg).unwrap();
    assert!(checks.iter().all(|c| c.passed()));
    assert!(zero(&(&vc.v[0] - &p("u^4")), &cfg));

    let t = toda(&cfg);
    let h = p("exp(u) + w^2/2");
    let (vc, checks) =
        new_dependent_variables(&t, &h, &lr(0, 1, -1, 0), Coords::new(["wbar", "ubar"]).unwrap(), None, &cfg).unwrap();
    assert!(checks.iter().all(|c| c.passed()));
    assert!(zero(&(&vc.v[0] - &p("exp(u)")), &cfg));
    assert!(zero(&(&vc.v[1] - &p("w")), &cfg));

    let (vc, _) =
        new_dependent_variables(&t, &h, &lr(1, 0, 0, 1), Coords::new(["a", "b"]).unwrap(), None, &cfg).unwrap();
    assert_eq!(vc.v, vec![p("w"), p("u")]);
}

#[test]
fn singular_jacobian_is_an_error() {
    let cfg = ZeroTestConfig::default();
    let kdv = BihamiltonianStructure::new(Coords::new(["u"]).unwrap(), m(&[&["1"]]), m(&[&["u"]]), &cfg).unwrap();
    // V = 1 makes Q = I - V vanish
    let r = new_dependent_variables(&kdv, &p("u^2/2"), &lr(0, 1, 1, 1), Coords::new(["v"]).unwrap(), None, &cfg);
    assert!(matches!(r, Err(CoreError::Matrix(_))), "{r:?}");
}

#[test]
fn general_flow_with_variable_coefficients() {
    let cfg = ZeroTestConfig::default();
    let u = Coords::new(["u"]).unwrap();
    let v = m(&[&["2*u"]]);
    let out = general_reciprocal_flow(&v, &p("u"), &p("u^2"), &p("u^2"), &p("4*u^3/3"), &u, &cfg).unwrap();
    assert!(zero(&(out.get(0, 0) - &p("-3/(2*u)")), &cfg));
    let same = general_reciprocal_flow(&v, &p("1"), &p("0"), &p("0"), &p("1"), &u, &cfg).unwrap();
    assert!(zero(&(same.get(0, 0) - v.get(0, 0)), &cfg));
    let bad = general_reciprocal_flow(&v, &p("u"), &p("u^3"), &p("u^2"), &p("4*u^3/3"), &u, &cfg);
    assert!(matches!(bad, Err(CoreError::Precondition(_))));
}

#[test]
fn composition_with_inverse_restores_flow() {
    let cfg = ZeroTestConfig::default();
    let v = m(&[&["0", "exp(u)"], &["1", "0"]]);
    let t =
        LinearReciprocalTransform::new(Rational::from((2, 3)), 1.into(), (-1).into(), Rational::from((1, 2))).unwrap();
    assert!(composition_check(&v, &t, &cfg).unwrap().passed());
    assert!(composition_check(&v, &lr(0, 1, -1, 0), &cfg).unwrap().passed());
}

#[test]
fn closedness() {
    let cfg = ZeroTestConfig::default();
    let toda = Coords::new(["w", "u"]).unwrap();
    let w = m(&[&["0", "1"], &["exp(-u)", "0"]]);
    assert!(closedness_certificate("c", &p("exp(u)*w + w^3/6"), &w, &toda, &cfg).unwrap().passed());
    let kdv = Coords::new(["u"]).unwrap();
    assert!(closedness_certificate("c", &p("u^3/3"), &m(&[&["u^(-1)/2"]]), &kdv, &cfg).unwrap().passed());
    let xy = Coords::new(["u1", "u2"]).unwrap();
    let c = closedness_certificate("c", &p("u1*u2^2"), &m(&[&["0", "1"], &["1", "0"]]), &xy, &cfg).unwrap();
    assert_eq!(c.status, Status::Fail);
    assert!(c.witness.is_some());
}

#[test]
fn pavlov_hamiltonians() {
    let cfg = ZeroTestConfig::default();
    let kdv = BihamiltonianStructure::new(Coords::new(["u"]).unwrap(), m(&[&["1"]]), m(&[&["u"]]), &cfg).unwrap();
    let h = p("u^4/4");
    let t = lr(0, 1, -1, 0);
    let (vc, _) = new_dependent_variables(&kdv, &h, &t, Coords::new(["v"]).unwrap(), None, &cfg).unwrap();
    let (hbar, check) = pavlov_transformed_hamiltonian(&kdv, &h, &t, &vc, &cfg).unwrap();
    assert!(check.passed());
    assert!(zero(&(hbar - p("-3*u^4/4")), &cfg));

    let id = LinearReciprocalTransform::identity();
    let (vc, _) = new_dependent_variables(&kdv, &h, &id, Coords::new(["v"]).unwrap(), None, &cfg).unwrap();
    let (hbar, check) = pavlov_transformed_hamiltonian(&kdv, &h, &id, &vc, &cfg).unwrap();
    assert!(check.passed());
    assert_eq!(hbar, h);
}

#[test]
fn wrong_potential_fails() {
    let cfg = Example::toda().unwrap().configure(&ZeroTestConfig::default());
    let t = toda(&cfg);
    let h = p("exp(u) + w^2/2");
    let tr = lr(0, 1, -1, 0);
    let (vc, _) = new_dependent_variables(&t, &h, &tr, Coords::new(["wbar", "ubar"]).unwrap(), None, &cfg).unwrap();
    let src = SourceDensities { h, f: p("w"), h0: t.h0(), f0: None };
    let good = p("-wbar*log(wbar) + wbar - ubar^2/2");
    let c = verify_potential("hbar", PotentialRole::Hbar, &good, &vc, &tr, &src, None, &cfg).unwrap();
    assert!(c.passed());
    let bad = good + p("wbar^3");
    let c = verify_potential("hbar", PotentialRole::Hbar, &bad, &vc, &tr, &src, None, &cfg).unwrap();
    assert_eq!(c.status, Status::Fail);
    assert!(c.witness.is_some());
    let fbar = p("ubar");
    let c = verify_potential("fbar", PotentialRole::Fbar, &fbar, &vc, &tr, &src, None, &cfg).unwrap();
    assert_eq!(c.status, Status::Skipped);
    assert!(verify_potential("x", PotentialRole::Hbar, &p("w"), &vc, &tr, &src, None, &cfg).is_err());
}

#[test]
fn identity_transformation_is_a_fixed_point() {
    let cfg = ZeroTestConfig::default();
    for ex in [Example::kdv(2, 1).unwrap(), Example::toda().unwrap()] {
        let cfg = ex.configure(&cfg);
        let def = with_identity_transform(&ex.definition).unwrap();
        let out = run_transform(&def, &cfg).unwrap().unwrap();
        let failing: Vec<_> = out.report.checks.iter().filter(|c| c.status == Status::Fail).collect();
        assert!(failing.is_empty(), "{failing:?}");
        let coords: Vec<Expr> = def.coords.symbols();
        assert_eq!(out.vc.v, coords);
        assert_eq!(out.flows.s_flow, out.check.v);
        assert_eq!(out.flows.t1_flows, out.check.commuting);
        assert_eq!(out.pulled.gbar, def.g);
        assert_eq!(out.pulled.christoffel, out.check.structure.christoffel);
        assert_eq!(out.hbar, def.h);
    }
}
