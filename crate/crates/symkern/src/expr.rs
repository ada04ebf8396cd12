//! Immutable expression trees with normalization on construction.
//!
//! Every [`Expr`] is built through the smart constructors in this module, so
//! the following always hold:
//!
//! * rational constants are in lowest terms with a positive denominator;
//! * sums and products are flattened, have at least two operands and are
//!   sorted by a deterministic total order;
//! * like terms in sums and like bases in products are merged;
//! * `exp(a)·exp(b)` is merged to `exp(a + b)` and `exp(c·log x)` becomes `x^c`.
//!
//! Rewrites are restricted to those that hold for principal branches over the
//! complex numbers (for instance `(x^a)^n = x^(a·n)` only for integer `n`).

use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use rug::ops::Pow;
use rug::{Integer, Rational};

/// Largest integer exponent folded exactly on rational constants.
const MAX_FOLD_EXPONENT: u32 = 4096;

/// The shape of an expression node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Kind {
    Num(Rational),
    Sym(Arc<str>),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Expr, Rational),
    Exp(Expr),
    Log(Expr),
    Atanh(Expr),
}

impl Kind {
    fn rank(&self) -> u8 {
        match self {
            Kind::Num(_) => 0,
            Kind::Sym(_) => 1,
            Kind::Pow(..) => 2,
            Kind::Exp(_) => 3,
            Kind::Log(_) => 4,
            Kind::Atanh(_) => 5,
            Kind::Mul(_) => 6,
            Kind::Add(_) => 7,
        }
    }
}

#[derive(Debug)]
struct Node {
    kind: Kind,
    hash: u64,
    size: u32,
    // one bit per symbol-name hash; a clear bit proves the symbol is absent
    sym_mask: u64,
}

/// An immutable, cheaply clonable expression.
#[derive(Clone)]
pub struct Expr(Arc<Node>);

fn symbol_bit(name: &str) -> u64 {
    let mut h = DefaultHasher::new();
    name.hash(&mut h);
    1u64 << (h.finish() % 64)
}

impl Expr {
    pub(crate) fn from_kind(kind: Kind) -> Expr {
        let mut h = DefaultHasher::new();
        let (size, mask) = match &kind {
            Kind::Num(r) => {
                0u8.hash(&mut h);
                r.hash(&mut h);
                (1u32, 0u64)
            }
            Kind::Sym(s) => {
                1u8.hash(&mut h);
                s.hash(&mut h);
                (1, symbol_bit(s))
            }
            Kind::Add(ts) | Kind::Mul(ts) => {
                kind.rank().hash(&mut h);
                let mut size = 1u32;
                let mut mask = 0u64;
                for t in ts {
                    t.0.hash.hash(&mut h);
                    size = size.saturating_add(t.0.size);
                    mask |= t.0.sym_mask;
                }
                (size, mask)
            }
            Kind::Pow(b, e) => {
                2u8.hash(&mut h);
                b.0.hash.hash(&mut h);
                e.hash(&mut h);
                (b.0.size.saturating_add(1), b.0.sym_mask)
            }
            Kind::Exp(x) | Kind::Log(x) | Kind::Atanh(x) => {
                kind.rank().hash(&mut h);
                x.0.hash.hash(&mut h);
                (x.0.size.saturating_add(1), x.0.sym_mask)
            }
        };
        Expr(Arc::new(Node { kind, hash: h.finish(), size, sym_mask: mask }))
    }

    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    /// Number of nodes in the tree (shared subtrees counted once per use).
    pub fn size(&self) -> u32 {
        self.0.size
    }

    pub(crate) fn node_id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn num(r: Rational) -> Expr {
        Expr::from_kind(Kind::Num(r))
    }

    pub fn int(n: i64) -> Expr {
        Expr::num(Rational::from(n))
    }

    pub fn ratio(n: i64, d: i64) -> Expr {
        Expr::num(Rational::from((n, d)))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn sym(name: &str) -> Expr {
        Expr::from_kind(Kind::Sym(Arc::from(name)))
    }

    pub fn as_num(&self) -> Option<&Rational> {
        match self.kind() {
            Kind::Num(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_sym(&self) -> Option<&str> {
        match self.kind() {
            Kind::Sym(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind(), Kind::Num(r) if r.cmp0() == Ordering::Equal)
    }

    pub fn is_one(&self) -> bool {
        matches!(self.kind(), Kind::Num(r) if *r == 1)
    }

    /// True when the expression contains no symbols at all.
    pub fn is_constant(&self) -> bool {
        self.0.sym_mask == 0
    }

    /// Whether `name` occurs in the expression.
    pub fn contains_symbol(&self, name: &str) -> bool {
        let bit = symbol_bit(name);
        self.contains_symbol_bit(name, bit)
    }

    fn contains_symbol_bit(&self, name: &str, bit: u64) -> bool {
        if self.0.sym_mask & bit == 0 {
            return false;
        }
        match self.kind() {
            Kind::Num(_) => false,
            Kind::Sym(s) => &**s == name,
            Kind::Add(ts) | Kind::Mul(ts) => ts.iter().any(|t| t.contains_symbol_bit(name, bit)),
            Kind::Pow(b, _) => b.contains_symbol_bit(name, bit),
            Kind::Exp(x) | Kind::Log(x) | Kind::Atanh(x) => x.contains_symbol_bit(name, bit),
        }
    }

    pub fn free_symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut seen = std::collections::HashSet::new();
        self.collect_symbols(&mut out, &mut seen);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<String>, seen: &mut std::collections::HashSet<usize>) {
        if self.is_constant() || !seen.insert(self.node_id()) {
            return;
        }
        match self.kind() {
            Kind::Num(_) => {}
            Kind::Sym(s) => {
                out.insert(s.to_string());
            }
            Kind::Add(ts) | Kind::Mul(ts) => ts.iter().for_each(|t| t.collect_symbols(out, seen)),
            Kind::Pow(b, _) => b.collect_symbols(out, seen),
            Kind::Exp(x) | Kind::Log(x) | Kind::Atanh(x) => x.collect_symbols(out, seen),
        }
    }

    // ----- smart constructors -------------------------------------------------

    /// Normalized n-ary sum.
    pub fn add_all<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        let mut constant = Rational::new();
        let mut coeffs: BTreeMap<Expr, Rational> = BTreeMap::new();
        for t in terms {
            add_term(t, &mut constant, &mut coeffs);
        }
        let mut out = Vec::with_capacity(coeffs.len() + 1);
        if constant.cmp0() != Ordering::Equal {
            out.push(Expr::num(constant));
        }
        for (rest, c) in coeffs {
            if c.cmp0() != Ordering::Equal {
                out.push(scaled(rest, c));
            }
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => {
                out.sort();
                Expr::from_kind(Kind::Add(out))
            }
        }
    }

    /// Normalized n-ary product.
    pub fn mul_all<I: IntoIterator<Item = Expr>>(factors: I) -> Expr {
        let mut coeff = Rational::from(1);
        let mut powers: BTreeMap<Expr, Rational> = BTreeMap::new();
        let mut exp_args: Vec<Expr> = Vec::new();
        for f in factors {
            mul_factor(f, &mut coeff, &mut powers, &mut exp_args);
        }
        if coeff.cmp0() == Ordering::Equal {
            return Expr::zero();
        }
        let mut out: Vec<Expr> = Vec::with_capacity(powers.len() + 1);
        let mut pending: Vec<Expr> = Vec::new();
        for (base, e) in powers {
            if e.cmp0() == Ordering::Equal {
                continue;
            }
            let f = Expr::pow(base, e);
            match f.kind() {
                Kind::Num(c) => coeff *= c,
                Kind::Mul(_) | Kind::Exp(_) | Kind::Add(_) if false => unreachable!(),
                Kind::Mul(_) | Kind::Exp(_) => pending.push(f),
                _ => out.push(f),
            }
        }
        if !exp_args.is_empty() {
            let arg = Expr::add_all(exp_args);
            let f = Expr::exp(arg);
            match f.kind() {
                Kind::Num(c) => coeff *= c,
                Kind::Exp(_) => out.push(f),
                _ => pending.push(f),
            }
        }
        if !pending.is_empty() {
            let mut all = out;
            all.extend(pending);
            all.push(Expr::num(coeff));
            return Expr::mul_all(all);
        }
        if coeff.cmp0() == Ordering::Equal {
            return Expr::zero();
        }
        if out.is_empty() {
            return Expr::num(coeff);
        }
        if coeff == 1 && out.len() == 1 {
            return out.pop().unwrap();
        }
        if out.len() == 1 {
            if let Kind::Add(ts) = out[0].kind() {
                return Expr::add_all(ts.iter().map(|t| Expr::mul_all([Expr::num(coeff.clone()), t.clone()])));
            }
        }
        out.sort();
        if coeff != 1 {
            out.insert(0, Expr::num(coeff));
        }
        Expr::from_kind(Kind::Mul(out))
    }

    /// `base^e` for an exact rational exponent.
    pub fn pow(base: Expr, e: Rational) -> Expr {
        if e.cmp0() == Ordering::Equal {
            return Expr::one();
        }
        if e == 1 {
            return base;
        }
        let integer = e.denom() == &1;
        match base.kind() {
            Kind::Num(c) => {
                if let Some(v) = fold_num_pow(c, &e) {
                    return Expr::num(v);
                }
            }
            Kind::Pow(inner, f) if integer => {
                return Expr::pow(inner.clone(), Rational::from(f * &e));
            }
            Kind::Mul(fs) => {
                if integer {
                    return Expr::mul_all(fs.iter().map(|f| Expr::pow(f.clone(), e.clone())));
                }
                if let Kind::Num(c) = fs[0].kind() {
                    if c.cmp0() == Ordering::Greater {
                        let rest =
                            if fs.len() == 2 { fs[1].clone() } else { Expr::from_kind(Kind::Mul(fs[1..].to_vec())) };
                        return Expr::mul_all([
                            Expr::pow(fs[0].clone(), e.clone()),
                            Expr::from_kind(Kind::Pow(rest, e)),
                        ]);
                    }
                }
            }
            Kind::Exp(x) if integer => {
                return Expr::exp(Expr::mul_all([Expr::num(e), x.clone()]));
            }
            _ => {}
        }
        Expr::from_kind(Kind::Pow(base, e))
    }

    pub fn powi(base: Expr, n: i64) -> Expr {
        Expr::pow(base, Rational::from(n))
    }

    pub fn sqrt(x: Expr) -> Expr {
        Expr::pow(x, Rational::from((1, 2)))
    }

    pub fn recip(x: Expr) -> Expr {
        Expr::powi(x, -1)
    }

    pub fn exp(x: Expr) -> Expr {
        if x.is_zero() {
            return Expr::one();
        }
        if let Some((base, c)) = as_scaled_log(&x) {
            return Expr::pow(base, c);
        }
        if let Kind::Add(ts) = x.kind() {
            let mut logs = Vec::new();
            let mut rest = Vec::new();
            for t in ts {
                match as_scaled_log(t) {
                    Some((b, c)) => logs.push(Expr::pow(b, c)),
                    None => rest.push(t.clone()),
                }
            }
            if !logs.is_empty() {
                logs.push(Expr::exp(Expr::add_all(rest)));
                return Expr::mul_all(logs);
            }
        }
        Expr::from_kind(Kind::Exp(x))
    }

    pub fn log(x: Expr) -> Expr {
        if x.is_one() {
            return Expr::zero();
        }
        Expr::from_kind(Kind::Log(x))
    }

    pub fn atanh(x: Expr) -> Expr {
        if x.is_zero() {
            return Expr::zero();
        }
        Expr::from_kind(Kind::Atanh(x))
    }

    /// Splits `c·rest` into its rational coefficient and the remaining factor.
    pub fn split_coeff(&self) -> (Rational, Expr) {
        match self.kind() {
            Kind::Num(c) => (c.clone(), Expr::one()),
            Kind::Mul(fs) => match fs[0].kind() {
                Kind::Num(c) => {
                    let rest = if fs.len() == 2 { fs[1].clone() } else { Expr::from_kind(Kind::Mul(fs[1..].to_vec())) };
                    (c.clone(), rest)
                }
                _ => (Rational::from(1), self.clone()),
            },
            _ => (Rational::from(1), self.clone()),
        }
    }

    /// Terms of a sum (the expression itself when it is not a sum).
    pub fn terms(&self) -> Vec<Expr> {
        match self.kind() {
            Kind::Add(ts) => ts.clone(),
            _ if self.is_zero() => Vec::new(),
            _ => vec![self.clone()],
        }
    }

    /// Factors of a product (the expression itself when it is not a product).
    pub fn factors(&self) -> Vec<Expr> {
        match self.kind() {
            Kind::Mul(fs) => fs.clone(),
            _ => vec![self.clone()],
        }
    }
}

fn scaled(rest: Expr, c: Rational) -> Expr {
    if c == 1 {
        return rest;
    }
    match rest.kind() {
        Kind::Mul(fs) => {
            let mut v = Vec::with_capacity(fs.len() + 1);
            v.push(Expr::num(c));
            v.extend(fs.iter().cloned());
            Expr::from_kind(Kind::Mul(v))
        }
        _ => Expr::from_kind(Kind::Mul(vec![Expr::num(c), rest])),
    }
}

fn add_term(t: Expr, constant: &mut Rational, coeffs: &mut BTreeMap<Expr, Rational>) {
    match t.kind() {
        Kind::Add(ts) => {
            for s in ts {
                add_term(s.clone(), constant, coeffs);
            }
        }
        Kind::Num(c) => *constant += c,
        _ => {
            let (c, rest) = t.split_coeff();
            match rest.kind() {
                Kind::Add(ts) => {
                    for s in ts {
                        add_term(Expr::mul_all([Expr::num(c.clone()), s.clone()]), constant, coeffs);
                    }
                }
                _ => *coeffs.entry(rest).or_default() += c,
            }
        }
    }
}

fn mul_factor(f: Expr, coeff: &mut Rational, powers: &mut BTreeMap<Expr, Rational>, exp_args: &mut Vec<Expr>) {
    match f.kind() {
        Kind::Mul(fs) => {
            for g in fs {
                mul_factor(g.clone(), coeff, powers, exp_args);
            }
        }
        Kind::Num(c) => *coeff *= c,
        Kind::Exp(x) => exp_args.push(x.clone()),
        Kind::Pow(b, e) => *powers.entry(b.clone()).or_default() += e,
        _ => *powers.entry(f).or_default() += 1,
    }
}

/// Recognizes `log(x)` and `c·log(x)`.
fn as_scaled_log(x: &Expr) -> Option<(Expr, Rational)> {
    match x.kind() {
        Kind::Log(b) => Some((b.clone(), Rational::from(1))),
        Kind::Mul(fs) if fs.len() == 2 => match (fs[0].kind(), fs[1].kind()) {
            (Kind::Num(c), Kind::Log(b)) => Some((b.clone(), c.clone())),
            _ => None,
        },
        _ => None,
    }
}

/// Exact value of `c^e`, when it is rational.
fn fold_num_pow(c: &Rational, e: &Rational) -> Option<Rational> {
    if *c == 1 {
        return Some(Rational::from(1));
    }
    let zero = c.cmp0() == Ordering::Equal;
    if zero {
        return if e.cmp0() == Ordering::Greater { Some(Rational::new()) } else { None };
    }
    let p = e.numer().to_i32()?;
    let q = e.denom().to_u32()?;
    if p.unsigned_abs() > MAX_FOLD_EXPONENT {
        return None;
    }
    let base = if q == 1 {
        c.clone()
    } else {
        if c.cmp0() == Ordering::Less {
            return None;
        }
        let n = exact_root(c.numer(), q)?;
        let d = exact_root(c.denom(), q)?;
        Rational::from((n, d))
    };
    Some(Rational::from((&base).pow(p)))
}

fn exact_root(i: &Integer, q: u32) -> Option<Integer> {
    let (root, rem) = i.clone().root_rem(Integer::new(), q);
    if rem == 0 {
        Some(root)
    } else {
        None
    }
}

// ----- equality and ordering --------------------------------------------------

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.hash == other.0.hash && self.0.size == other.0.size && self.0.kind == other.0.kind)
    }
}

impl Eq for Expr {}

impl Hash for Expr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.hash.hash(state);
    }
}

impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        let (a, b) = (self.kind(), other.kind());
        a.rank().cmp(&b.rank()).then_with(|| match (a, b) {
            (Kind::Num(x), Kind::Num(y)) => x.cmp(y),
            (Kind::Sym(x), Kind::Sym(y)) => x.cmp(y),
            _ => self
                .0
                .size
                .cmp(&other.0.size)
                .then_with(|| self.0.hash.cmp(&other.0.hash))
                .then_with(|| cmp_structure(a, b)),
        })
    }
}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn cmp_structure(a: &Kind, b: &Kind) -> Ordering {
    match (a, b) {
        (Kind::Add(x), Kind::Add(y)) | (Kind::Mul(x), Kind::Mul(y)) => x.cmp(y),
        (Kind::Pow(x, e), Kind::Pow(y, f)) => x.cmp(y).then_with(|| e.cmp(f)),
        (Kind::Exp(x), Kind::Exp(y)) | (Kind::Log(x), Kind::Log(y)) | (Kind::Atanh(x), Kind::Atanh(y)) => x.cmp(y),
        _ => Ordering::Equal,
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

// ----- operators ---------------------------------------------------------------

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::add_all([self, rhs])
    }
}

impl Add for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        Expr::add_all([self.clone(), rhs.clone()])
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::add_all([self, -rhs])
    }
}

impl Sub for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        Expr::add_all([self.clone(), -rhs.clone()])
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::mul_all([self, rhs])
    }
}

impl Mul for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        Expr::mul_all([self.clone(), rhs.clone()])
    }
}

impl Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::mul_all([self, Expr::recip(rhs)])
    }
}

impl Div for &Expr {
    type Output = Expr;
    fn div(self, rhs: &Expr) -> Expr {
        Expr::mul_all([self.clone(), Expr::recip(rhs.clone())])
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::mul_all([Expr::int(-1), self])
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::mul_all([Expr::int(-1), self.clone()])
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

impl From<Rational> for Expr {
    fn from(r: Rational) -> Expr {
        Expr::num(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u() -> Expr {
        Expr::sym("u")
    }

    #[test]
    fn rationals_are_reduced() {
        let r = Expr::ratio(6, -4);
        assert_eq!(r.as_num().unwrap(), &Rational::from((-3, 2)));
        assert_eq!(r.as_num().unwrap().denom(), &2);
    }

    #[test]
    fn like_terms_collect() {
        assert_eq!(&u() + &u(), Expr::int(2) * u());
        assert!((&u() - &u()).is_zero());
    }

    #[test]
    fn sums_are_flat() {
        let w = Expr::sym("w");
        let e = Expr::add_all([u(), Expr::add_all([w.clone(), Expr::int(3)])]);
        match e.kind() {
            Kind::Add(ts) => {
                assert_eq!(ts.len(), 3);
                assert!(ts.iter().all(|t| !matches!(t.kind(), Kind::Add(_))));
            }
            _ => panic!("expected a sum"),
        }
    }

    #[test]
    fn exponent_laws_merge() {
        // u^(m+2) * u^-1 with m = 1
        let e = Expr::powi(u(), 3) * Expr::powi(u(), -1);
        assert_eq!(e, Expr::powi(u(), 2));
        let s = Expr::sqrt(u()) * Expr::sqrt(u());
        assert_eq!(s, u());
    }

    #[test]
    fn exp_log_rules() {
        assert_eq!(Expr::exp(Expr::log(u())), u());
        let e = Expr::exp(-Expr::log(u()));
        assert_eq!(e, Expr::powi(u(), -1));
        let w = Expr::sym("w");
        assert_eq!(Expr::exp(u()) * Expr::exp(w.clone()), Expr::exp(&u() + &w));
        assert_eq!(Expr::exp(u()) * Expr::exp(-u()), Expr::one());
        assert_eq!(Expr::powi(Expr::exp(u()), 2), Expr::exp(Expr::int(2) * u()));
    }

    #[test]
    fn numeric_powers_fold() {
        assert_eq!(Expr::pow(Expr::int(4), Rational::from((1, 2))), Expr::int(2));
        assert_eq!(Expr::pow(Expr::ratio(8, 27), Rational::from((2, 3))), Expr::ratio(4, 9));
        assert!(matches!(Expr::sqrt(Expr::int(2)).kind(), Kind::Pow(..)));
        assert!(matches!(Expr::powi(Expr::zero(), -1).kind(), Kind::Pow(..)));
    }

    #[test]
    fn integer_power_of_product_distributes() {
        let w = Expr::sym("w");
        let e = Expr::powi(Expr::int(2) * u() * w.clone(), 2);
        assert_eq!(e, Expr::int(4) * Expr::powi(u(), 2) * Expr::powi(w, 2));
    }

    #[test]
    fn symbol_presence() {
        let e = Expr::exp(u()) + Expr::sym("w");
        assert!(e.contains_symbol("u"));
        assert!(!e.contains_symbol("v"));
        assert_eq!(e.free_symbols().into_iter().collect::<Vec<_>>(), vec!["u", "w"]);
    }
}
