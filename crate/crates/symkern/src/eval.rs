//! Arbitrary-precision complex evaluation with principal branches.

use std::collections::{BTreeMap, HashMap};

use rug::ops::Pow;
use rug::{Complex, Float, Rational};
use thiserror::Error;

use crate::expr::{Expr, Kind};

/// Extra working bits carried during evaluation and dropped from the result.
const GUARD_BITS: u32 = 32;

/// Smallest precision accepted for an evaluation point.
pub const MIN_PRECISION: u32 = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("symbol '{0}' has no value at the evaluation point")]
    Unassigned(String),
    #[error("singular evaluation ({reason}) at subterm {subterm}")]
    Singular { reason: &'static str, subterm: String },
    #[error("precision {0} is below the minimum of 64 bits")]
    PrecisionTooLow(u32),
}

/// Assignment of complex values to symbols, at a fixed precision.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalPoint {
    precision: u32,
    values: BTreeMap<String, Complex>,
}

impl EvalPoint {
    pub fn new(precision: u32) -> Result<Self, EvalError> {
        if precision < MIN_PRECISION {
            return Err(EvalError::PrecisionTooLow(precision));
        }
        Ok(EvalPoint { precision, values: BTreeMap::new() })
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn set(&mut self, name: &str, value: Complex) {
        self.values.insert(name.to_string(), value);
    }

    pub fn set_rational(&mut self, name: &str, value: &Rational) {
        let v = Complex::with_val(self.precision + GUARD_BITS, value);
        self.values.insert(name.to_string(), v);
    }

    pub fn get(&self, name: &str) -> Option<&Complex> {
        self.values.get(name)
    }

    pub fn values(&self) -> &BTreeMap<String, Complex> {
        &self.values
    }
}

/// Value of an expression together with the largest intermediate magnitude.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub value: Complex,
    pub max_magnitude: f64,
}

/// Evaluates `e` at `p`, returning a value rounded to `p.precision()` bits.
pub fn evaluate(e: &Expr, p: &EvalPoint) -> Result<Complex, EvalError> {
    evaluate_tracked(e, p).map(|ev| ev.value)
}

/// Like [`evaluate`], also reporting the largest magnitude met on the way.
pub fn evaluate_tracked(e: &Expr, p: &EvalPoint) -> Result<Evaluation, EvalError> {
    let mut ev = Evaluator { prec: p.precision + GUARD_BITS, point: p, memo: HashMap::new(), max_mag: 0.0 };
    let v = ev.eval(e)?;
    Ok(Evaluation { value: Complex::with_val(p.precision, &v), max_magnitude: ev.max_mag })
}

struct Evaluator<'a> {
    prec: u32,
    point: &'a EvalPoint,
    memo: HashMap<usize, Complex>,
    max_mag: f64,
}

fn is_zero(c: &Complex) -> bool {
    c.real().is_zero() && c.imag().is_zero()
}

fn magnitude(c: &Complex) -> f64 {
    c.real().to_f64().abs().max(c.imag().to_f64().abs())
}

fn excerpt(e: &Expr) -> String {
    let s = e.to_string();
    if s.len() <= 160 {
        s
    } else {
        let mut cut = 160;
        while !s.is_char_boundary(cut) {
            cut -= 1;
        }
        format!("{}...", &s[..cut])
    }
}

impl Evaluator<'_> {
    fn singular(&self, reason: &'static str, e: &Expr) -> EvalError {
        EvalError::Singular { reason, subterm: excerpt(e) }
    }

    fn eval(&mut self, e: &Expr) -> Result<Complex, EvalError> {
        if let Some(v) = self.memo.get(&e.node_id()) {
            return Ok(v.clone());
        }
        let prec = self.prec;
        let v = match e.kind() {
            Kind::Num(r) => Complex::with_val(prec, r),
            Kind::Sym(s) => {
                let v = self.point.get(s).ok_or_else(|| EvalError::Unassigned(s.to_string()))?;
                Complex::with_val(prec, v)
            }
            Kind::Add(ts) => {
                let mut acc = Complex::new(prec);
                for t in ts {
                    acc += self.eval(t)?;
                }
                acc
            }
            Kind::Mul(fs) => {
                let mut acc = Complex::with_val(prec, 1);
                for f in fs {
                    acc *= self.eval(f)?;
                }
                acc
            }
            Kind::Pow(b, r) => {
                let bv = self.eval(b)?;
                if is_zero(&bv) {
                    if r.cmp0() == std::cmp::Ordering::Greater {
                        Complex::new(prec)
                    } else {
                        return Err(self.singular("negative power of zero", e));
                    }
                } else if r.denom() == &1 {
                    bv.pow(r.numer())
                } else if *r == Rational::from((1, 2)) {
                    bv.sqrt()
                } else {
                    let x = Float::with_val(prec, r);
                    bv.pow(&x)
                }
            }
            Kind::Exp(x) => self.eval(x)?.exp(),
            Kind::Log(x) => {
                let xv = self.eval(x)?;
                if is_zero(&xv) {
                    return Err(self.singular("logarithm of zero", e));
                }
                xv.ln()
            }
            Kind::Atanh(x) => {
                let xv = self.eval(x)?;
                if xv.imag().is_zero() && (*xv.real() == 1 || *xv.real() == -1) {
                    return Err(self.singular("arctanh at a branch point", e));
                }
                xv.atanh()
            }
        };
        if !(v.real().is_finite() && v.imag().is_finite()) {
            return Err(self.singular("non-finite value", e));
        }
        self.max_mag = self.max_mag.max(magnitude(&v));
        self.memo.insert(e.node_id(), v.clone());
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    fn at(pairs: &[(&str, (i64, i64))]) -> EvalPoint {
        let mut p = EvalPoint::new(256).unwrap();
        for (k, (n, d)) in pairs {
            p.set_rational(k, &Rational::from((*n, *d)));
        }
        p
    }

    #[test]
    fn exact_values() {
        let v = evaluate(&parse("u^2").unwrap(), &at(&[("u", (3, 2))])).unwrap();
        assert_eq!(v, Complex::with_val(256, Rational::from((9, 4))));
        let v = evaluate(&parse("exp(log(u))").unwrap(), &at(&[("u", (7, 5))])).unwrap();
        let err = Complex::with_val(256, &v - Complex::with_val(256, Rational::from((7, 5))));
        assert!(magnitude(&err) < 1e-70);
    }

    #[test]
    fn arctanh_principal_branch() {
        let v = evaluate(&parse("ArcTanh(x)").unwrap(), &at(&[("x", (2, 1))])).unwrap();
        assert!(!v.imag().is_zero());
        // ½·log((1+x)/(1−x)) evaluated directly
        let x = Complex::with_val(256, 2);
        let one = Complex::with_val(256, 1);
        let q = Complex::with_val(256, &one + &x) / Complex::with_val(256, &one - &x);
        let oracle = q.ln() / 2u32;
        assert!((v.real().to_f64() - oracle.real().to_f64()).abs() < 1e-15);
        assert!((v.imag().to_f64().abs() - oracle.imag().to_f64().abs()).abs() < 1e-15);
    }

    #[test]
    fn singularities_are_reported() {
        let p = at(&[("u", (0, 1))]);
        for src in ["log(u)", "1/u", "u^(-1/2)", "ArcTanh(u + 1)"] {
            let err = evaluate(&parse(src).unwrap(), &p).unwrap_err();
            assert!(matches!(err, EvalError::Singular { .. }), "{src}: {err}");
        }
        assert!(matches!(evaluate(&parse("w").unwrap(), &p), Err(EvalError::Unassigned(_))));
    }
}
