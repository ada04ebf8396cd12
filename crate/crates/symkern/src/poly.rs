//! Polynomial manipulation: full distribution, coefficient extraction in one
//! symbol, and rational-function normalization.
//!
//! [`simplify`] views an expression as a quotient of sparse Laurent
//! polynomials over its atoms (symbols, `exp`, `log`, `ArcTanh` and
//! fractional powers), cancels monomial content and exact polynomial
//! factors, and rebuilds a normalized expression.

use std::collections::{BTreeMap, HashMap};

use rug::Rational;
use thiserror::Error;

use crate::expr::{Expr, Kind};

/// Upper bound on reduction steps in a single exact division.
const MAX_DIVISION_STEPS: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("'{symbol}' occurs non-polynomially in the factor {factor}")]
    NotPolynomial { symbol: String, factor: String },
}

// ----- distribution ----------------------------------------------------------------

/// Distributes products over sums and multiplies out positive integer powers of sums.
///
/// Function arguments are left untouched. Inside a product, positive powers
/// of sums are multiplied out only after the remaining factors have been
/// distributed, so that a factor `Δ²` first cancels against `Δ⁻²` terms.
pub fn expand(e: &Expr) -> Expr {
    let mut memo = HashMap::new();
    expand_rec(e, &mut memo)
}

fn is_positive_sum_power(f: &Expr) -> bool {
    matches!(f.kind(), Kind::Pow(b, r) if matches!(b.kind(), Kind::Add(_)) && r.denom() == &1 && r.cmp0() == std::cmp::Ordering::Greater)
}

fn needs_multiply(f: &Expr) -> bool {
    matches!(f.kind(), Kind::Add(_)) || is_positive_sum_power(f)
}

fn expand_rec(e: &Expr, memo: &mut HashMap<usize, Expr>) -> Expr {
    if let Some(x) = memo.get(&e.node_id()) {
        return x.clone();
    }
    let out = match e.kind() {
        Kind::Num(_) | Kind::Sym(_) | Kind::Exp(_) | Kind::Log(_) | Kind::Atanh(_) => e.clone(),
        Kind::Add(ts) => Expr::add_all(ts.iter().map(|t| expand_rec(t, memo))),
        Kind::Pow(b, r) => {
            let base = expand_rec(b, memo);
            let p = Expr::pow(base, r.clone());
            if is_positive_sum_power(&p) {
                multiply_out(vec![p])
            } else {
                p
            }
        }
        Kind::Mul(fs) => {
            let mut plain = Vec::with_capacity(fs.len());
            let mut sums: Vec<Vec<Expr>> = Vec::new();
            for f in fs {
                if let Kind::Pow(b, r) = f.kind() {
                    if matches!(b.kind(), Kind::Add(_)) && r.denom() == &1 && r.cmp0() == std::cmp::Ordering::Greater {
                        plain.push(Expr::pow(expand_rec(b, memo), r.clone()));
                        continue;
                    }
                }
                let g = expand_rec(f, memo);
                match g.kind() {
                    Kind::Add(ts) => sums.push(ts.clone()),
                    _ => plain.push(g),
                }
            }
            let mut terms = vec![Expr::mul_all(plain)];
            for s in sums {
                let mut next = Vec::with_capacity(terms.len() * s.len());
                for a in &terms {
                    for t in &s {
                        next.push(a * t);
                    }
                }
                terms = Expr::add_all(next).terms();
            }
            Expr::add_all(terms.into_iter().map(|t| {
                if t.factors().iter().any(needs_multiply) {
                    multiply_out(t.factors())
                } else {
                    t
                }
            }))
        }
    };
    memo.insert(e.node_id(), out.clone());
    out
}

/// Multiplies out a list of already expanded factors, repeating until no
/// positive power of a sum remains.
fn multiply_out(factors: Vec<Expr>) -> Expr {
    let mut acc: Vec<Expr> = vec![Expr::one()];
    for f in factors {
        let (base_terms, reps) = match f.kind() {
            Kind::Pow(b, r) if is_positive_sum_power(&f) => (b.terms(), r.numer().to_u32().unwrap_or(1)),
            Kind::Add(ts) => (ts.clone(), 1),
            _ => (vec![f.clone()], 1),
        };
        for _ in 0..reps {
            let mut next = Vec::with_capacity(acc.len() * base_terms.len());
            for a in &acc {
                for t in &base_terms {
                    next.push(a * t);
                }
            }
            acc = Expr::add_all(next).terms();
        }
    }
    Expr::add_all(acc.into_iter().map(|t| {
        if t.factors().iter().any(needs_multiply) {
            multiply_out(t.factors())
        } else {
            t
        }
    }))
}

/// Coefficients of `e` as a polynomial in `symbol`, lowest degree first.
///
/// The result is empty when `e` expands to zero.
pub fn collect_powers(e: &Expr, symbol: &str) -> Result<Vec<Expr>, PolyError> {
    let expanded = expand(e);
    let mut buckets: BTreeMap<usize, Vec<Expr>> = BTreeMap::new();
    for t in expanded.terms() {
        let mut degree = 0usize;
        let mut rest = Vec::new();
        for f in t.factors() {
            if !f.contains_symbol(symbol) {
                rest.push(f);
                continue;
            }
            match f.kind() {
                Kind::Sym(_) => degree += 1,
                Kind::Pow(b, r)
                    if b.as_sym() == Some(symbol) && r.denom() == &1 && r.cmp0() == std::cmp::Ordering::Greater =>
                {
                    degree += r.numer().to_u32().unwrap_or(0) as usize;
                }
                _ => return Err(PolyError::NotPolynomial { symbol: symbol.to_string(), factor: f.to_string() }),
            }
        }
        buckets.entry(degree).or_default().push(Expr::mul_all(rest));
    }
    let Some((&top, _)) = buckets.iter().next_back() else {
        return Ok(Vec::new());
    };
    let mut out = vec![Expr::zero(); top + 1];
    for (d, ts) in buckets {
        out[d] = Expr::add_all(ts);
    }
    while out.last().is_some_and(Expr::is_zero) {
        out.pop();
    }
    Ok(out)
}

// ----- sparse Laurent polynomials --------------------------------------------------

type Mono = Vec<i32>;

#[derive(Debug, Clone, PartialEq, Eq)]
struct Poly {
    terms: BTreeMap<Mono, Rational>,
}

impl Poly {
    fn zero() -> Poly {
        Poly { terms: BTreeMap::new() }
    }

    fn constant(c: Rational, nvars: usize) -> Poly {
        let mut p = Poly::zero();
        if c.cmp0() != std::cmp::Ordering::Equal {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    fn monomial(m: Mono, c: Rational) -> Poly {
        let mut p = Poly::zero();
        p.terms.insert(m, c);
        p
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn single_term(&self) -> Option<(&Mono, &Rational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    fn is_one(&self) -> bool {
        matches!(self.single_term(), Some((m, c)) if *c == 1 && m.iter().all(|&e| e == 0))
    }

    fn add_assign_scaled(&mut self, other: &Poly, scale: &Rational, shift: Option<&Mono>) {
        for (m, c) in &other.terms {
            let key = match shift {
                Some(s) => m.iter().zip(s).map(|(a, b)| a + b).collect(),
                None => m.clone(),
            };
            let v = Rational::from(c * scale);
            match self.terms.entry(key) {
                std::collections::btree_map::Entry::Vacant(slot) => {
                    slot.insert(v);
                }
                std::collections::btree_map::Entry::Occupied(mut slot) => {
                    *slot.get_mut() += v;
                    if slot.get().cmp0() == std::cmp::Ordering::Equal {
                        slot.remove();
                    }
                }
            }
        }
    }

    fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_assign_scaled(other, &Rational::from(1), None);
        out
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            out.add_assign_scaled(other, c, Some(m));
        }
        out
    }

    fn scale(&self, s: &Rational) -> Poly {
        let mut out = Poly::zero();
        out.add_assign_scaled(self, s, None);
        out
    }

    fn shift(&self, s: &Mono) -> Poly {
        let mut out = Poly::zero();
        out.add_assign_scaled(self, &Rational::from(1), Some(s));
        out
    }

    fn pow(&self, n: u32, nvars: usize) -> Poly {
        let mut out = Poly::constant(Rational::from(1), nvars);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    fn min_exponents(&self, nvars: usize) -> Mono {
        let mut m = vec![i32::MAX; nvars];
        for k in self.terms.keys() {
            for (a, b) in m.iter_mut().zip(k) {
                *a = (*a).min(*b);
            }
        }
        m.iter().map(|&x| if x == i32::MAX { 0 } else { x }).collect()
    }

    /// Exact quotient `self / d` for polynomials with nonnegative exponents.
    fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (lm, lc) = d.terms.iter().next_back()?;
        let mut r = self.clone();
        let mut q = Poly::zero();
        let mut steps = 0;
        while let Some((rm, rc)) = r.terms.iter().next_back() {
            steps += 1;
            if steps > MAX_DIVISION_STEPS {
                return None;
            }
            let s: Mono = rm.iter().zip(lm).map(|(a, b)| a - b).collect();
            if s.iter().any(|&x| x < 0) {
                return None;
            }
            let c = Rational::from(rc / lc);
            q.add_assign_scaled(&Poly::monomial(s.clone(), c.clone()), &Rational::from(1), None);
            r.add_assign_scaled(d, &(-c), Some(&s));
        }
        Some(q)
    }
}

/// A quotient of Laurent polynomials with a non-monomial (or unit) denominator.
#[derive(Debug, Clone)]
struct RatFun {
    num: Poly,
    den: Poly,
}

impl RatFun {
    fn from_poly(p: Poly, nvars: usize) -> RatFun {
        RatFun { num: p, den: Poly::constant(Rational::from(1), nvars) }
    }

    fn absorb_monomial_den(mut self, nvars: usize) -> RatFun {
        if let Some((m, c)) = self.den.single_term() {
            let inv: Mono = m.iter().map(|x| -x).collect();
            let s = Rational::from(c.recip_ref());
            self.num = self.num.shift(&inv).scale(&s);
            self.den = Poly::constant(Rational::from(1), nvars);
        }
        self
    }

    fn add(&self, o: &RatFun, nvars: usize) -> RatFun {
        if self.den == o.den {
            return RatFun { num: self.num.add(&o.num), den: self.den.clone() }.absorb_monomial_den(nvars);
        }
        if self.den.is_one() {
            return RatFun { num: self.num.mul(&o.den).add(&o.num), den: o.den.clone() };
        }
        if o.den.is_one() {
            return RatFun { num: o.num.mul(&self.den).add(&self.num), den: self.den.clone() };
        }
        RatFun { num: self.num.mul(&o.den).add(&o.num.mul(&self.den)), den: self.den.mul(&o.den) }
    }

    fn mul(&self, o: &RatFun, nvars: usize) -> RatFun {
        RatFun { num: self.num.mul(&o.num), den: self.den.mul(&o.den) }.absorb_monomial_den(nvars)
    }

    fn recip(&self, nvars: usize) -> Option<RatFun> {
        if self.num.is_zero() {
            return None;
        }
        Some(RatFun { num: self.den.clone(), den: self.num.clone() }.absorb_monomial_den(nvars))
    }

    fn powi(&self, n: i64, nvars: usize) -> Option<RatFun> {
        let base = if n < 0 { self.recip(nvars)? } else { self.clone() };
        let k = n.unsigned_abs() as u32;
        Some(RatFun { num: base.num.pow(k, nvars), den: base.den.pow(k, nvars) }.absorb_monomial_den(nvars))
    }

    /// Cancels monomial content and exact polynomial factors; makes the denominator monic.
    fn reduce(self, nvars: usize) -> RatFun {
        let mut r = self.absorb_monomial_den(nvars);
        if r.num.is_zero() {
            return RatFun::from_poly(Poly::zero(), nvars);
        }
        if r.den.is_one() {
            return r;
        }
        let dshift: Mono = r.den.min_exponents(nvars).iter().map(|x| -x).collect();
        r.den = r.den.shift(&dshift);
        r.num = r.num.shift(&dshift);
        let nshift: Mono = r.num.min_exponents(nvars).iter().map(|x| -x.min(&0)).collect();
        let shifted_num = r.num.shift(&nshift);
        let back: Mono = nshift.iter().map(|x| -x).collect();
        if let Some(q) = shifted_num.div_exact(&r.den) {
            return RatFun::from_poly(q.shift(&back), nvars);
        }
        if let Some(q) = r.den.div_exact(&shifted_num) {
            let inner = RatFun { num: Poly::constant(Rational::from(1), nvars), den: q };
            let mut out = inner.absorb_monomial_den(nvars);
            out.num = out.num.shift(&back);
            return out.normalize_leading(nvars);
        }
        r.normalize_leading(nvars)
    }

    fn normalize_leading(mut self, nvars: usize) -> RatFun {
        if let Some((_, lc)) = self.den.terms.iter().next_back() {
            if *lc != 1 {
                let s = Rational::from(lc.recip_ref());
                self.num = self.num.scale(&s);
                self.den = self.den.scale(&s);
            }
        }
        self.absorb_monomial_den(nvars)
    }
}

/// Atom table: each base `b` is represented by the variable `b^(1/D)`.
struct Atoms {
    bases: Vec<(Expr, i64)>,
    index: HashMap<Expr, usize>,
}

/// Splits an atomic factor into base and exponent, or `None` for sums and constants.
fn atom_parts(e: &Expr) -> Option<(Expr, Rational)> {
    match e.kind() {
        Kind::Sym(_) | Kind::Exp(_) | Kind::Log(_) | Kind::Atanh(_) => Some((e.clone(), Rational::from(1))),
        Kind::Pow(b, r) => {
            if matches!(b.kind(), Kind::Add(_)) && r.denom() == &1 {
                None
            } else {
                Some((b.clone(), r.clone()))
            }
        }
        _ => None,
    }
}

fn scan_atoms(e: &Expr, table: &mut BTreeMap<Expr, i64>) {
    match e.kind() {
        Kind::Num(_) => {}
        Kind::Add(ts) | Kind::Mul(ts) => ts.iter().for_each(|t| scan_atoms(t, table)),
        Kind::Pow(b, r) if matches!(b.kind(), Kind::Add(_)) && r.denom() == &1 => scan_atoms(b, table),
        _ => {
            let (b, r) = atom_parts(e).expect("atomic factor");
            let d = r.denom().to_i64().unwrap_or(1);
            let slot = table.entry(b).or_insert(1);
            *slot = lcm(*slot, d);
        }
    }
}

fn lcm(a: i64, b: i64) -> i64 {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

impl Atoms {
    fn nvars(&self) -> usize {
        self.bases.len()
    }

    fn to_ratfun(&self, e: &Expr) -> Option<RatFun> {
        let n = self.nvars();
        Some(match e.kind() {
            Kind::Num(c) => RatFun::from_poly(Poly::constant(c.clone(), n), n),
            Kind::Add(ts) => {
                let mut acc = RatFun::from_poly(Poly::zero(), n);
                for t in ts {
                    acc = acc.add(&self.to_ratfun(t)?, n);
                }
                acc
            }
            Kind::Mul(fs) => {
                let mut acc = RatFun::from_poly(Poly::constant(Rational::from(1), n), n);
                for f in fs {
                    acc = acc.mul(&self.to_ratfun(f)?, n);
                }
                acc
            }
            Kind::Pow(b, r) if matches!(b.kind(), Kind::Add(_)) && r.denom() == &1 => {
                self.to_ratfun(b)?.powi(r.numer().to_i64()?, n)?
            }
            _ => {
                let (b, r) = atom_parts(e)?;
                let i = *self.index.get(&b)?;
                let k = Rational::from(&r * self.bases[i].1);
                let mut m = vec![0i32; n];
                m[i] = k.numer().to_i32()?;
                RatFun::from_poly(Poly::monomial(m, Rational::from(1)), n)
            }
        })
    }

    fn poly_to_expr(&self, p: &Poly) -> Expr {
        Expr::add_all(p.terms.iter().map(|(m, c)| {
            let mut fs = vec![Expr::num(c.clone())];
            for (i, &k) in m.iter().enumerate() {
                if k != 0 {
                    let (b, d) = &self.bases[i];
                    fs.push(Expr::pow(b.clone(), Rational::from((i64::from(k), *d))));
                }
            }
            Expr::mul_all(fs)
        }))
    }
}

/// Simplifies function arguments and fractional-power bases recursively.
fn simplify_inner(e: &Expr, memo: &mut HashMap<usize, Expr>) -> Expr {
    if e.is_constant() && e.as_num().is_some() {
        return e.clone();
    }
    if let Some(x) = memo.get(&e.node_id()) {
        return x.clone();
    }
    let out = match e.kind() {
        Kind::Num(_) | Kind::Sym(_) => e.clone(),
        Kind::Add(ts) => Expr::add_all(ts.iter().map(|t| simplify_inner(t, memo))),
        Kind::Mul(fs) => Expr::mul_all(fs.iter().map(|f| simplify_inner(f, memo))),
        Kind::Pow(b, r) => {
            if matches!(b.kind(), Kind::Add(_)) && r.denom() == &1 {
                Expr::pow(simplify_inner(b, memo), r.clone())
            } else {
                Expr::pow(together_with(b, memo), r.clone())
            }
        }
        Kind::Exp(x) => Expr::exp(together_with(x, memo)),
        Kind::Log(x) => Expr::log(together_with(x, memo)),
        Kind::Atanh(x) => Expr::atanh(together_with(x, memo)),
    };
    memo.insert(e.node_id(), out.clone());
    out
}

fn together_with(e: &Expr, memo: &mut HashMap<usize, Expr>) -> Expr {
    let inner = simplify_inner(e, memo);
    let mut table = BTreeMap::new();
    scan_atoms(&inner, &mut table);
    let bases: Vec<(Expr, i64)> = table.into_iter().collect();
    let index = bases.iter().enumerate().map(|(i, (b, _))| (b.clone(), i)).collect();
    let atoms = Atoms { bases, index };
    let n = atoms.nvars();
    let Some(rf) = atoms.to_ratfun(&inner) else {
        return inner;
    };
    let rf = rf.reduce(n);
    let num = atoms.poly_to_expr(&rf.num);
    if rf.den.is_one() {
        return num;
    }
    let den = atoms.poly_to_expr(&rf.den);
    Expr::mul_all([num, Expr::recip(den)])
}

/// Rational-function normal form: a single (possibly polynomial) fraction
/// with cancelled monomial content and a monic denominator.
pub fn simplify(e: &Expr) -> Expr {
    let mut memo = HashMap::new();
    together_with(e, &mut memo)
}
