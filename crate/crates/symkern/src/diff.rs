//! Differentiation, substitution and derivative tensors.

use std::collections::{BTreeMap, HashMap};

use rug::Rational;

use crate::expr::{Expr, Kind};
use crate::matrix::SymMatrix;

/// Exact partial derivative of `e` with respect to the symbol `s`.
pub fn differentiate(e: &Expr, s: &str) -> Expr {
    let mut memo = HashMap::new();
    diff_rec(e, s, &mut memo)
}

fn diff_rec(e: &Expr, s: &str, memo: &mut HashMap<usize, Expr>) -> Expr {
    if !e.contains_symbol(s) {
        return Expr::zero();
    }
    if let Some(d) = memo.get(&e.node_id()) {
        return d.clone();
    }
    let d = match e.kind() {
        Kind::Num(_) => Expr::zero(),
        Kind::Sym(name) => {
            if &**name == s {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Kind::Add(ts) => Expr::add_all(ts.iter().map(|t| diff_rec(t, s, memo))),
        Kind::Mul(fs) => {
            let mut terms = Vec::new();
            for (i, f) in fs.iter().enumerate() {
                let df = diff_rec(f, s, memo);
                if df.is_zero() {
                    continue;
                }
                let mut parts: Vec<Expr> = Vec::with_capacity(fs.len());
                parts.push(df);
                parts.extend(fs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, g)| g.clone()));
                terms.push(Expr::mul_all(parts));
            }
            Expr::add_all(terms)
        }
        Kind::Pow(b, r) => {
            let db = diff_rec(b, s, memo);
            Expr::mul_all([Expr::num(r.clone()), Expr::pow(b.clone(), Rational::from(r - 1u32)), db])
        }
        Kind::Exp(x) => diff_rec(x, s, memo) * e.clone(),
        Kind::Log(x) => diff_rec(x, s, memo) / x.clone(),
        Kind::Atanh(x) => {
            let dx = diff_rec(x, s, memo);
            dx / (Expr::one() - Expr::powi(x.clone(), 2))
        }
    };
    memo.insert(e.node_id(), d.clone());
    d
}

/// Simultaneous substitution of symbols, followed by normalization.
pub fn substitute(e: &Expr, m: &BTreeMap<String, Expr>) -> Expr {
    if m.is_empty() {
        return e.clone();
    }
    let mut memo = HashMap::new();
    subst_rec(e, m, &mut memo)
}

fn subst_rec(e: &Expr, m: &BTreeMap<String, Expr>, memo: &mut HashMap<usize, Expr>) -> Expr {
    if e.is_constant() {
        return e.clone();
    }
    if let Some(d) = memo.get(&e.node_id()) {
        return d.clone();
    }
    let out = match e.kind() {
        Kind::Num(_) => e.clone(),
        Kind::Sym(name) => m.get(&**name).cloned().unwrap_or_else(|| e.clone()),
        Kind::Add(ts) => Expr::add_all(ts.iter().map(|t| subst_rec(t, m, memo))),
        Kind::Mul(fs) => Expr::mul_all(fs.iter().map(|f| subst_rec(f, m, memo))),
        Kind::Pow(b, r) => Expr::pow(subst_rec(b, m, memo), r.clone()),
        Kind::Exp(x) => Expr::exp(subst_rec(x, m, memo)),
        Kind::Log(x) => Expr::log(subst_rec(x, m, memo)),
        Kind::Atanh(x) => Expr::atanh(subst_rec(x, m, memo)),
    };
    memo.insert(e.node_id(), out.clone());
    out
}

/// Gradient and Hessian of `e` in the given coordinates.
///
/// The Hessian is filled from the upper triangle, so it is symmetric by construction.
pub fn derivative_tensors(e: &Expr, coords: &[String]) -> (Vec<Expr>, SymMatrix) {
    let n = coords.len();
    let grad: Vec<Expr> = coords.iter().map(|c| differentiate(e, c)).collect();
    let mut hess = vec![Expr::zero(); n * n];
    for i in 0..n {
        for j in i..n {
            let d = differentiate(&grad[i], &coords[j]);
            hess[i * n + j] = d.clone();
            hess[j * n + i] = d;
        }
    }
    (grad, SymMatrix::new(n, n, hess).expect("coordinate count within matrix limits"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn basic_rules() {
        assert_eq!(differentiate(&p("u^3"), "u"), p("3*u^2"));
        assert_eq!(differentiate(&p("e^u + w^2/2"), "u"), p("exp(u)"));
        assert_eq!(differentiate(&p("log(u)"), "u"), p("1/u"));
        assert_eq!(differentiate(&p("ArcTanh(u/3)"), "u"), p("(1/3)/(1 - u^2/9)"));
        assert!(differentiate(&p("exp(w)"), "u").is_zero());
    }

    #[test]
    fn substitution() {
        let mut m = BTreeMap::new();
        m.insert("u".to_string(), p("v^(1/2)"));
        assert_eq!(substitute(&p("u^2"), &m), p("v"));
        let mut m = BTreeMap::new();
        m.insert("u".to_string(), p("log(wbar)"));
        assert_eq!(substitute(&p("exp(u)"), &m), p("wbar"));
        assert_eq!(substitute(&p("u"), &BTreeMap::new()), p("u"));
    }

    #[test]
    fn hessians() {
        let coords = vec!["w".to_string(), "u".to_string()];
        let (_, h) = derivative_tensors(&p("e^u + w^2/2"), &coords);
        assert_eq!(h.get(0, 0), &p("1"));
        assert_eq!(h.get(1, 1), &p("exp(u)"));
        assert!(h.get(0, 1).is_zero());
        let (_, h0) = derivative_tensors(&p("w*u"), &coords);
        assert_eq!(h0.get(0, 1), &p("1"));
        assert!(h0.get(0, 0).is_zero());
    }
}
