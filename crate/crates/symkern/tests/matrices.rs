use symkern::{is_identically_zero, parse, MatrixError, SymMatrix, ZeroTestConfig};

fn m(rows: &[&[&str]]) -> SymMatrix {
    SymMatrix::from_rows(rows.iter().map(|r| r.iter().map(|s| parse(s).unwrap()).collect()).collect()).unwrap()
}

fn corpus() -> Vec<SymMatrix> {
    vec![
        m(&[&["3*u^2"]]),
        m(&[&["exp(x)"]]),
        m(&[&["0", "exp(u)"], &["1", "0"]]),
        m(&[&["2*exp(u)", "w"], &["w", "2"]]),
        m(&[&["0", "1"], &["1", "0"]]),
        m(&[&["exp(u)", "exp(u)*w"], &["w", "exp(u)"]]),
        m(&[&["x", "y"], &["y", "x + 1"]]),
        m(&[&["1", "x", "x^2"], &["0", "1", "y"], &["y", "0", "1"]]),
        m(&[&["sqrt(x)", "log(y)", "0"], &["1", "x", "y"], &["0", "exp(x)", "2"]]),
        m(&[&["1", "x", "0", "0"], &["0", "1", "y", "0"], &["0", "0", "1", "x*y"], &["y", "0", "0", "1"]]),
        m(&[&["x", "0", "0", "1"], &["0", "y", "1", "0"], &["0", "1", "x", "0"], &["1", "0", "0", "y"]]),
        m(&[&["1/(1 - x^2)", "0"], &["0", "1"]]),
    ]
}

#[test]
fn product_with_inverse_is_identity() {
    let cfg = ZeroTestConfig::default();
    for a in corpus() {
        let inv = a.inverse(&cfg).unwrap_or_else(|e| panic!("{a}: {e}"));
        let prod = a.mul(&inv).unwrap();
        let eye = SymMatrix::identity(a.rows()).unwrap();
        let diff = prod.sub(&eye).unwrap();
        for (k, e) in diff.entries().iter().enumerate() {
            assert!(is_identically_zero(e, &cfg).unwrap().is_zero(), "{a}: entry {k} of A*inv(A) - I is {e}");
        }
    }
}

#[test]
fn adjugate_gives_det_times_identity() {
    let cfg = ZeroTestConfig::default();
    for a in corpus() {
        let det = a.det().unwrap();
        let prod = a.mul(&a.adjugate().unwrap()).unwrap();
        let target = SymMatrix::identity(a.rows()).unwrap().scale(&det);
        for e in prod.sub(&target).unwrap().entries() {
            assert!(is_identically_zero(e, &cfg).unwrap().is_zero());
        }
    }
}

#[test]
fn determinant_examples() {
    assert_eq!(m(&[&["2*exp(u)", "w"], &["w", "2"]]).det().unwrap(), parse("4*exp(u) - w^2").unwrap());
    assert_eq!(m(&[&["0", "exp(u)"], &["1", "0"]]).det().unwrap(), parse("-exp(u)").unwrap());
}

#[test]
fn structurally_singular_but_symbolic() {
    let cfg = ZeroTestConfig::default();
    let a = m(&[&["exp(u)", "exp(u)*w"], &["1", "w"]]);
    assert!(matches!(a.inverse(&cfg), Err(MatrixError::Singular { .. })));
}
