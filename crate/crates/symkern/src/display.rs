//! Rendering in the input grammar, so that `parse(e.to_string())` gives `e` back.

use std::cmp::Ordering;
use std::fmt::{self, Write};

use rug::Rational;

use crate::expr::{Expr, Kind};

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        render(self, &mut s);
        f.write_str(&s)
    }
}

fn render(e: &Expr, out: &mut String) {
    match e.kind() {
        Kind::Num(r) => render_rational(r, out),
        Kind::Sym(s) => out.push_str(s),
        Kind::Add(ts) => {
            for (i, t) in ts.iter().enumerate() {
                let (c, _) = t.split_coeff();
                if c.cmp0() == Ordering::Less {
                    out.push_str(if i == 0 { "-" } else { " - " });
                    render_term(&(-t.clone()), out);
                } else {
                    if i > 0 {
                        out.push_str(" + ");
                    }
                    render_term(t, out);
                }
            }
        }
        Kind::Mul(_) | Kind::Pow(..) => render_product(e, out),
        Kind::Exp(x) => call("exp", x, out),
        Kind::Log(x) => call("log", x, out),
        Kind::Atanh(x) => call("ArcTanh", x, out),
    }
}

/// A term inside a sum; only a nested sum needs parentheses.
fn render_term(t: &Expr, out: &mut String) {
    if let Kind::Add(_) = t.kind() {
        out.push('(');
        render(t, out);
        out.push(')');
    } else {
        render(t, out);
    }
}

fn call(name: &str, x: &Expr, out: &mut String) {
    out.push_str(name);
    out.push('(');
    render(x, out);
    out.push(')');
}

fn render_rational(r: &Rational, out: &mut String) {
    if r.denom() == &1 {
        write!(out, "{}", r.numer()).unwrap();
    } else {
        write!(out, "{}/{}", r.numer(), r.denom()).unwrap();
    }
}

/// Renders `c · Π num / Π den`, moving negative powers below the fraction bar.
fn render_product(e: &Expr, out: &mut String) {
    let (c, rest) = e.split_coeff();
    let mut num: Vec<Expr> = Vec::new();
    let mut den: Vec<Expr> = Vec::new();
    for f in rest.factors() {
        match f.kind() {
            Kind::Pow(b, x) if x.cmp0() == Ordering::Less => den.push(Expr::pow(b.clone(), Rational::from(-x))),
            _ => num.push(f),
        }
    }
    if c.cmp0() == Ordering::Less {
        out.push('-');
    }
    let cn = c.numer().clone().abs();
    let cd = c.denom().clone();
    let mut first = true;
    if cn != 1 || num.is_empty() {
        write!(out, "{cn}").unwrap();
        first = false;
    }
    for f in &num {
        if !first {
            out.push('*');
        }
        first = false;
        render_factor(f, out);
    }
    let den_count = den.len() + usize::from(cd != 1);
    if den_count == 0 {
        return;
    }
    out.push('/');
    if den_count > 1 {
        out.push('(');
    }
    let mut first = true;
    if cd != 1 {
        write!(out, "{cd}").unwrap();
        first = false;
    }
    for f in &den {
        if !first {
            out.push('*');
        }
        first = false;
        render_factor(f, out);
    }
    if den_count > 1 {
        out.push(')');
    }
}

/// A factor inside a product: sums need parentheses, everything else binds tighter.
fn render_factor(f: &Expr, out: &mut String) {
    match f.kind() {
        Kind::Add(_) => {
            out.push('(');
            render(f, out);
            out.push(')');
        }
        Kind::Pow(b, x) => render_power(b, x, out),
        _ => render(f, out),
    }
}

fn render_power(b: &Expr, x: &Rational, out: &mut String) {
    if *x == Rational::from((1, 2)) {
        call("sqrt", b, out);
        return;
    }
    let atomic = match b.kind() {
        Kind::Sym(_) | Kind::Exp(_) | Kind::Log(_) | Kind::Atanh(_) => true,
        Kind::Num(r) => r.denom() == &1 && r.cmp0() != Ordering::Less,
        Kind::Pow(_, y) => *y == Rational::from((1, 2)),
        _ => false,
    };
    if atomic {
        render(b, out);
    } else {
        out.push('(');
        render(b, out);
        out.push(')');
    }
    out.push('^');
    if x.denom() == &1 && x.cmp0() == Ordering::Greater {
        write!(out, "{}", x.numer()).unwrap();
    } else {
        out.push('(');
        render_rational(x, out);
        out.push(')');
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_fractions_and_signs() {
        let u = Expr::sym("u");
        let w = Expr::sym("w");
        assert_eq!((Expr::powi(w.clone(), 2) / Expr::int(2)).to_string(), "w^2/2");
        assert_eq!((-u.clone()).to_string(), "-u");
        assert_eq!((Expr::ratio(-3, 4) * Expr::powi(u.clone(), 2)).to_string(), "-3*u^2/4");
        assert_eq!(Expr::recip(u.clone()).to_string(), "1/u");
        assert_eq!(Expr::pow(u.clone(), Rational::from((-2, 3))).to_string(), "1/u^(2/3)");
        assert_eq!((Expr::exp(u.clone()) - w.clone()).to_string(), "exp(u) - w");
        assert_eq!(Expr::sqrt(&u - &w).to_string(), "sqrt(u - w)");
        let z = Expr::sym("z");
        assert_eq!((u.clone() - (u.clone() + z.clone())).to_string(), "-z");
        assert_eq!((w.clone() - Expr::from_kind(Kind::Add(vec![u.clone(), z.clone()]))).to_string(), "w - z - u");
        assert_eq!((u.clone() * (w.clone() - z.clone())).to_string(), "u*(w - z)");
    }
}
