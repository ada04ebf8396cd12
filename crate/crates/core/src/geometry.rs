//! Differential geometry of contravariant metrics.
//!
//! Derivatives are taken along a [`Frame`]: either the coordinate vector
//! fields `∂/∂u^i`, or the coordinate fields `∂/∂v^i = W^m_i ∂/∂u^m` of a
//! second coordinate system `v(u)` whose inverse Jacobian is `W`. The second
//! form lets every tensor of a pulled-back metric be computed while all
//! expressions stay functions of `u`.

use std::collections::BTreeSet;

use rayon::prelude::*;
use symkern::{collect_powers, differentiate, expand, is_identically_zero, simplify, Expr, SymMatrix, ZeroTestConfig};

use crate::report::{label, zero_check, Check, Status};
use crate::{CoreError, Result};

/// Largest supported number of coordinates.
pub const MAX_COORDS: usize = 4;

/// Ordered, pairwise distinct coordinate names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coords {
    names: Vec<String>,
}

impl Coords {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Coords> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() || names.len() > MAX_COORDS {
            return Err(CoreError::Coords(format!("expected 1 to {MAX_COORDS} coordinates, got {}", names.len())));
        }
        let distinct: BTreeSet<&String> = names.iter().collect();
        if distinct.len() != names.len() {
            return Err(CoreError::Coords(format!("repeated coordinate name in {names:?}")));
        }
        Ok(Coords { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn symbols(&self) -> Vec<Expr> {
        self.names.iter().map(|s| Expr::sym(s)).collect()
    }
}

/// Vector fields along which partial derivatives are taken.
#[derive(Debug, Clone, Copy)]
pub enum Frame<'a> {
    Coordinate(&'a Coords),
    /// `∂_i = W^m_i ∂/∂u^m`.
    Pulled {
        coords: &'a Coords,
        w: &'a SymMatrix,
    },
}

impl Frame<'_> {
    pub fn dim(&self) -> usize {
        match self {
            Frame::Coordinate(c) | Frame::Pulled { coords: c, .. } => c.len(),
        }
    }

    pub fn coords(&self) -> &Coords {
        match self {
            Frame::Coordinate(c) | Frame::Pulled { coords: c, .. } => c,
        }
    }

    pub fn partial(&self, e: &Expr, i: usize) -> Expr {
        match self {
            Frame::Coordinate(c) => differentiate(e, c.name(i)),
            Frame::Pulled { coords, w } => Expr::add_all(
                (0..coords.len())
                    .filter(|&m| !w.get(m, i).is_zero())
                    .map(|m| w.get(m, i) * &differentiate(e, coords.name(m))),
            ),
        }
    }
}

/// Contravariant metric `g^{ij}` in given coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ContravariantMetric {
    coords: Coords,
    g: SymMatrix,
}

impl ContravariantMetric {
    /// Validates shape, symmetry and nondegeneracy.
    pub fn new(coords: Coords, g: SymMatrix, cfg: &ZeroTestConfig) -> Result<ContravariantMetric> {
        let n = coords.len();
        if g.shape() != (n, n) {
            return Err(CoreError::Dimension(format!("metric is {:?} for {n} coordinates", g.shape())));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let d = g.get(i, j) - g.get(j, i);
                if !is_identically_zero(&d, cfg)?.is_zero() {
                    return Err(CoreError::NotSymmetric(format!("g{} != g{}", label(&[i, j]), label(&[j, i]))));
                }
            }
        }
        let det = g.det()?;
        if is_identically_zero(&det, cfg)?.is_zero() {
            return Err(CoreError::Matrix(symkern::MatrixError::Singular { det: simplify(&det) }));
        }
        Ok(ContravariantMetric { coords, g })
    }

    pub fn coords(&self) -> &Coords {
        &self.coords
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.g
    }

    pub fn get(&self, i: usize, j: usize) -> &Expr {
        self.g.get(i, j)
    }

    pub fn is_constant(&self) -> bool {
        self.g.entries().iter().all(Expr::is_constant)
    }
}

/// Levi-Civita symbols `Γ^k_{ij}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    n: usize,
    data: Vec<Expr>,
}

impl Christoffel {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> &Expr {
        &self.data[(k * self.n + i) * self.n + j]
    }

    pub fn is_structurally_zero(&self) -> bool {
        self.data.iter().all(Expr::is_zero)
    }
}

/// Contravariant components `Γ^{ij}_k = −g^{is} Γ^j_{sk}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContraChristoffel {
    n: usize,
    data: Vec<Expr>,
}

impl ContraChristoffel {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &Expr {
        &self.data[(i * self.n + j) * self.n + k]
    }

    /// Builds from a function of `(i, j, k)`.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize, usize) -> Expr + Sync + Send) -> ContraChristoffel {
        let data = (0..n * n * n).into_par_iter().map(|idx| f(idx / (n * n), (idx / n) % n, idx % n)).collect();
        ContraChristoffel { n, data }
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr + Sync + Send) -> ContraChristoffel {
        ContraChristoffel { n: self.n, data: self.data.par_iter().map(f).collect() }
    }
}

/// Curvature `R_{ijk}^s`, stored with indices in that order.
#[derive(Debug, Clone, PartialEq)]
pub struct Curvature {
    n: usize,
    data: Vec<Expr>,
}

impl Curvature {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize, k: usize, s: usize) -> &Expr {
        let n = self.n;
        &self.data[((i * n + j) * n + k) * n + s]
    }

    /// Labelled components, in index order.
    pub fn items(&self) -> Vec<(String, Expr)> {
        let n = self.n;
        self.data
            .iter()
            .enumerate()
            .map(|(idx, e)| (label(&[idx / (n * n * n), (idx / (n * n)) % n, (idx / n) % n, idx % n]), e.clone()))
            .collect()
    }
}

fn prune(e: Expr, cfg: &ZeroTestConfig) -> Result<Expr> {
    if e.is_zero() {
        return Ok(e);
    }
    let s = simplify(&e);
    if s.is_zero() || is_identically_zero(&s, cfg)?.is_zero() {
        return Ok(Expr::zero());
    }
    Ok(s)
}

/// Covariant components `g_{ij}`, simplified.
pub fn covariant_metric(g: &SymMatrix, cfg: &ZeroTestConfig) -> Result<SymMatrix> {
    Ok(g.inverse(cfg)?.simplified())
}

/// Levi-Civita symbols of the metric `g^{ij}` in its own coordinates.
pub fn christoffel_from_metric(g: &ContravariantMetric, cfg: &ZeroTestConfig) -> Result<Christoffel> {
    christoffel_in_frame(g.matrix(), Frame::Coordinate(g.coords()), cfg)
}

/// `Γ^k_{ij} = ½ g^{ks}(∂_j g_{si} + ∂_i g_{sj} − ∂_s g_{ij})` with derivatives along `frame`.
pub fn christoffel_in_frame(g: &SymMatrix, frame: Frame<'_>, cfg: &ZeroTestConfig) -> Result<Christoffel> {
    let n = frame.dim();
    let cov = covariant_metric(g, cfg)?;
    // dg[s][i][j] = ∂_s g_{ij}
    let dg: Vec<Expr> = (0..n * n * n)
        .into_par_iter()
        .map(|idx| {
            let (s, i, j) = (idx / (n * n), (idx / n) % n, idx % n);
            let (a, b) = if i <= j { (i, j) } else { (j, i) };
            simplify(&frame.partial(cov.get(a, b), s))
        })
        .collect();
    let d = |s: usize, i: usize, j: usize| &dg[(s * n + i) * n + j];
    let half = Expr::ratio(1, 2);
    let data: Vec<Result<Expr>> = (0..n * n * n)
        .into_par_iter()
        .map(|idx| {
            let (k, i, j) = (idx / (n * n), (idx / n) % n, idx % n);
            let (i, j) = if i <= j { (i, j) } else { (j, i) };
            let terms = (0..n).filter(|&s| !g.get(k, s).is_zero()).map(|s| {
                let bracket = Expr::add_all([d(j, s, i).clone(), d(i, s, j).clone(), -d(s, i, j)]);
                Expr::mul_all([half.clone(), g.get(k, s).clone(), bracket])
            });
            prune(Expr::add_all(terms), cfg)
        })
        .collect();
    Ok(Christoffel { n, data: data.into_iter().collect::<Result<_>>()? })
}

/// `Γ^{ij}_k = −g^{is} Γ^j_{sk}`.
pub fn contravariant_christoffel(g: &SymMatrix, gamma: &Christoffel) -> ContraChristoffel {
    let n = gamma.dim();
    ContraChristoffel::from_fn(n, |i, j, k| {
        simplify(&-Expr::add_all((0..n).filter(|&s| !g.get(i, s).is_zero()).map(|s| g.get(i, s) * gamma.get(j, s, k))))
    })
}

/// `R_{ijk}^s = ∂_i Γ^s_{jk} − ∂_j Γ^s_{ik} + Γ^s_{im}Γ^m_{jk} − Γ^s_{jm}Γ^m_{ik}`.
pub fn curvature(gamma: &Christoffel, frame: Frame<'_>) -> Curvature {
    let n = gamma.dim();
    let data = (0..n * n * n * n)
        .into_par_iter()
        .map(|idx| {
            let (i, j, k, s) = (idx / (n * n * n), (idx / (n * n)) % n, (idx / n) % n, idx % n);
            if i == j {
                return Expr::zero();
            }
            let mut terms = vec![frame.partial(gamma.get(s, j, k), i), -frame.partial(gamma.get(s, i, k), j)];
            for m in 0..n {
                terms.push(gamma.get(s, i, m) * gamma.get(m, j, k));
                terms.push(-(gamma.get(s, j, m) * gamma.get(m, i, k)));
            }
            simplify(&Expr::add_all(terms))
        })
        .collect();
    Curvature { n, data }
}

/// Flatness of `g` along `frame`: every curvature component vanishes.
pub fn flatness_check(name: &str, g: &SymMatrix, frame: Frame<'_>, cfg: &ZeroTestConfig) -> Result<Check> {
    let gamma = christoffel_in_frame(g, frame, cfg)?;
    let r = curvature(&gamma, frame);
    Ok(zero_check(name, "R_{ijk}^s = 0", r.items(), cfg))
}

/// Dubrovin–Novikov flatness of a metric in its own coordinates.
pub fn is_flat(g: &ContravariantMetric, cfg: &ZeroTestConfig) -> Result<Check> {
    flatness_check("flat", g.matrix(), Frame::Coordinate(g.coords()), cfg)
}

/// `∂_k g_{ij} − g_{sj}Γ^s_{ki} − g_{is}Γ^s_{kj} = 0`.
pub fn metricity_check(g: &SymMatrix, gamma: &Christoffel, frame: Frame<'_>, cfg: &ZeroTestConfig) -> Result<Check> {
    let n = gamma.dim();
    let cov = covariant_metric(g, cfg)?;
    let mut items = Vec::new();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut terms = vec![frame.partial(cov.get(i, j), k)];
                for s in 0..n {
                    terms.push(-(cov.get(s, j) * gamma.get(s, k, i)));
                    terms.push(-(cov.get(i, s) * gamma.get(s, k, j)));
                }
                items.push((label(&[k, i, j]), Expr::add_all(terms)));
            }
        }
    }
    Ok(zero_check("metricity", "∂_k g_{ij} - g_{sj} Γ^s_{ki} - g_{is} Γ^s_{kj} = 0", items, cfg))
}

/// `R_{ijk}^s + R_{jik}^s = 0`.
pub fn antisymmetry_check(r: &Curvature, cfg: &ZeroTestConfig) -> Check {
    let n = r.dim();
    let mut items = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for s in 0..n {
                    items.push((label(&[i, j, k, s]), r.get(i, j, k, s) + r.get(j, i, k, s)));
                }
            }
        }
    }
    zero_check("curvature-antisymmetry", "R_{ijk}^s + R_{jik}^s = 0", items, cfg)
}

/// Picks a pencil parameter name that does not clash with any symbol in use.
pub fn fresh_symbol(base: &str, taken: &BTreeSet<String>) -> String {
    let mut name = base.to_string();
    while taken.contains(&name) {
        name.push('_');
    }
    name
}

/// Result of a flat-pencil verification.
#[derive(Debug, Clone)]
pub struct PencilOutcome {
    pub checks: Vec<Check>,
    /// Highest power of λ met among the curvature numerators.
    pub max_degree: usize,
    /// Highest power of λ among the individual terms of the numerators.
    pub term_degree: usize,
    pub degree_bound: usize,
    /// `det(g − λη)` as a polynomial in λ, lowest degree first.
    pub char_poly: Vec<Expr>,
    pub lambda: String,
}

/// Numerators `N^{ij}_k = Δ Γ^{ij}_k` of the contravariant Christoffel symbols of
/// `P = g − λη`, with `Δ P_{kq} = adj(P)_{kq}`:
/// `N^{ij}_k = ½Δ∂_k P^{ij} + ½ adj(P)_{kq}(P^{is}∂_s P^{jq} − P^{js}∂_s P^{iq})`.
fn pencil_numerators(p: &SymMatrix, adj: &SymMatrix, delta: &Expr, frame: Frame<'_>) -> ContraChristoffel {
    let n = frame.dim();
    let dp: Vec<Expr> = (0..n * n * n)
        .map(|idx| {
            let (s, i, j) = (idx / (n * n), (idx / n) % n, idx % n);
            expand(&frame.partial(p.get(i, j), s))
        })
        .collect();
    let d = |s: usize, i: usize, j: usize| &dp[(s * n + i) * n + j];
    let half = Expr::ratio(1, 2);
    ContraChristoffel::from_fn(n, |i, j, k| {
        let mut terms = vec![Expr::mul_all([half.clone(), delta.clone(), d(k, i, j).clone()])];
        for q in 0..n {
            if adj.get(k, q).is_zero() {
                continue;
            }
            let inner = Expr::add_all((0..n).flat_map(|s| [p.get(i, s) * d(s, j, q), -(p.get(j, s) * d(s, i, q))]));
            if inner.is_zero() {
                continue;
            }
            terms.push(Expr::mul_all([half.clone(), adj.get(k, q).clone(), inner]));
        }
        expand(&Expr::add_all(terms))
    })
}

/// Verifies that `g − λη` is flat for every λ and that its contravariant
/// Christoffel symbols do not depend on λ.
///
/// Curvature is assessed through the tensor
/// `K^{ijp}_k = g^{is}∂_sΓ^{jp}_k − g^{js}∂_sΓ^{ip}_k + (Γ^{ji}_m − Γ^{ij}_m)Γ^{mp}_k + Γ^{im}_kΓ^{jp}_m − Γ^{jm}_kΓ^{ip}_m`,
/// which vanishes exactly when the curvature does. Multiplied by `Δ² = det(g − λη)²`
/// it is a polynomial in λ, and each coefficient is zero-tested.
pub fn check_flat_pencil(
    prefix: &str,
    eta: &SymMatrix,
    g: &SymMatrix,
    frame: Frame<'_>,
    cfg: &ZeroTestConfig,
) -> Result<PencilOutcome> {
    let n = frame.dim();
    if eta.shape() != (n, n) || g.shape() != (n, n) {
        return Err(CoreError::Dimension(format!("pencil matrices must be {n}x{n}")));
    }
    if let Some(e) = eta.entries().iter().find(|e| !e.is_constant()) {
        return Err(CoreError::NotConstant { what: "η".into(), detail: e.to_string() });
    }
    let mut taken: BTreeSet<String> = frame.coords().names().iter().cloned().collect();
    for e in g.entries() {
        taken.extend(e.free_symbols());
    }
    let lambda_name = fresh_symbol("lambda", &taken);
    let lambda = Expr::sym(&lambda_name);
    let p = g.sub(&eta.scale(&lambda))?.map(expand);
    let delta = expand(&p.det()?);
    let char_poly = collect_powers(&delta, &lambda_name)?;
    let mut degenerate = true;
    for c in &char_poly {
        if !is_identically_zero(c, cfg)?.is_zero() {
            degenerate = false;
            break;
        }
    }
    if degenerate {
        return Err(CoreError::PencilDegenerate { det: delta.to_string() });
    }
    let adj = p.adjugate()?.map(expand);
    let num = pencil_numerators(&p, &adj, &delta, frame);
    let d_delta: Vec<Expr> = (0..n).map(|s| expand(&frame.partial(&delta, s))).collect();
    // Δ² ∂_s Γ^{ij}_k = Δ ∂_s N^{ij}_k − N^{ij}_k ∂_s Δ
    let d_num = |s: usize, i: usize, j: usize, k: usize| -> Expr {
        &delta * &frame.partial(num.get(i, j, k), s) - num.get(i, j, k) * &d_delta[s]
    };

    // curvature numerators
    let mut comps = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for pp in 0..n {
                for k in 0..n {
                    comps.push((i, j, pp, k));
                }
            }
        }
    }
    let numerators: Vec<Result<(String, Vec<Expr>, usize)>> = comps
        .par_iter()
        .map(|&(i, j, pp, k)| {
            let mut terms = Vec::new();
            for s in 0..n {
                if !p.get(i, s).is_zero() {
                    terms.push(p.get(i, s) * &d_num(s, j, pp, k));
                }
                if !p.get(j, s).is_zero() {
                    terms.push(-(p.get(j, s) * &d_num(s, i, pp, k)));
                }
            }
            for m in 0..n {
                terms.push((num.get(j, i, m) - num.get(i, j, m)) * num.get(m, pp, k).clone());
                terms.push(num.get(i, m, k) * num.get(j, pp, m));
                terms.push(-(num.get(j, m, k) * num.get(i, pp, m)));
            }
            let mut term_degree = 0;
            for t in &terms {
                term_degree = term_degree.max(collect_powers(&expand(t), &lambda_name)?.len().saturating_sub(1));
            }
            let coeffs = collect_powers(&expand(&Expr::add_all(terms)), &lambda_name)?;
            Ok((label(&[i, j, pp, k]), coeffs, term_degree))
        })
        .collect();
    let mut max_degree = 0;
    let mut term_degree = 0;
    let mut items = Vec::new();
    for r in numerators {
        let (lab, coeffs, t) = r?;
        max_degree = max_degree.max(coeffs.len().saturating_sub(1));
        term_degree = term_degree.max(t);
        if coeffs.is_empty() {
            items.push((format!("{lab} λ^0"), Expr::zero()));
        }
        for (d, c) in coeffs.into_iter().enumerate() {
            items.push((format!("{lab} λ^{d}"), c));
        }
    }
    let bound = 3 * n;
    let mut checks = Vec::new();
    let degree_identity = format!("deg_λ(Δ² K) ≤ {bound}");
    let degree_detail = format!("observed degree {max_degree}, {term_degree} before cancellation");
    checks.push(if max_degree.max(term_degree) <= bound {
        Check::pass(&format!("{prefix}.degree"), degree_identity, degree_detail)
    } else {
        Check::fail(&format!("{prefix}.degree"), degree_identity, degree_detail)
    });
    checks.push(zero_check(
        &format!("{prefix}.curvature"),
        "every λ-coefficient of Δ² K^{ijp}_k(g - λη) vanishes",
        items,
        cfg,
    ));

    // λ-independence of the contravariant symbols
    let gamma_g = christoffel_in_frame(g, frame, cfg)?;
    let contra_g = contravariant_christoffel(g, &gamma_g);
    let diffs: Vec<Result<Vec<(String, Expr)>>> = (0..n * n * n)
        .into_par_iter()
        .map(|idx| {
            let (i, j, k) = (idx / (n * n), (idx / n) % n, idx % n);
            let e = num.get(i, j, k) - &(&delta * contra_g.get(i, j, k));
            let mut coeffs = collect_powers(&expand(&e), &lambda_name)?;
            if coeffs.is_empty() {
                coeffs.push(Expr::zero());
            }
            Ok(coeffs.into_iter().enumerate().map(|(d, c)| (format!("{} λ^{d}", label(&[i, j, k])), c)).collect())
        })
        .collect();
    let mut items = Vec::new();
    for d in diffs {
        items.extend(d?);
    }
    checks.push(zero_check(
        &format!("{prefix}.christoffel"),
        "Δ (Γ^{ij}_k(g - λη) - Γ^{ij}_k(g)) = 0 in every power of λ",
        items,
        cfg,
    ));
    Ok(PencilOutcome { checks, max_degree, term_degree, degree_bound: bound, char_poly, lambda: lambda_name })
}

/// Candidate certificate for Dubrovin's flat-pencil criterion.
#[derive(Debug, Clone)]
pub struct DubrovinCertificate {
    pub xi: Vec<Expr>,
    pub c: SymMatrix,
}

/// Checks the four identity families of Dubrovin's criterion with `∂^i = η^{ik}∂_k`:
/// `Δ^{ijk} = ∂^i∂^jξ^k`, `g^{ij} = ∂^iξ^j + ∂^jξ^i + c^{ij}`,
/// `Δ^{ij}_sΔ^{sk}_l = Δ^{ik}_sΔ^{sj}_l` and `(g^{im}η^{jl} − η^{im}g^{jl})∂_m∂_lξ^k = 0`.
pub fn check_dubrovin_conditions(
    eta: &SymMatrix,
    g: &ContravariantMetric,
    cert: &DubrovinCertificate,
    cfg: &ZeroTestConfig,
) -> Result<Vec<Check>> {
    let coords = g.coords();
    let n = coords.len();
    if cert.xi.len() != n || cert.c.shape() != (n, n) {
        return Err(CoreError::Dimension("certificate size differs from the coordinate count".into()));
    }
    let eta_cov = eta.inverse(cfg)?;
    let gamma = christoffel_from_metric(g, cfg)?;
    let contra = contravariant_christoffel(g.matrix(), &gamma);
    let up = |e: &Expr, i: usize| -> Expr {
        Expr::add_all(
            (0..n).filter(|&k| !eta.get(i, k).is_zero()).map(|k| eta.get(i, k) * &differentiate(e, coords.name(k))),
        )
    };
    // Δ^{ijk} = η^{is} Γ^{jk}_s
    let big_delta =
        |i: usize, j: usize, k: usize| -> Expr { Expr::add_all((0..n).map(|s| eta.get(i, s) * contra.get(j, k, s))) };
    // Δ^{ij}_k = η_{ks} Δ^{sij}
    let lowered = |i: usize, j: usize, k: usize| -> Expr {
        Expr::add_all((0..n).map(|s| eta_cov.get(k, s) * &big_delta(s, i, j)))
    };
    let mut first = Vec::new();
    let mut second = Vec::new();
    let mut third = Vec::new();
    let mut fourth = Vec::new();
    for i in 0..n {
        for j in 0..n {
            second.push((
                label(&[i, j]),
                g.get(i, j) - &Expr::add_all([up(&cert.xi[j], i), up(&cert.xi[i], j), cert.c.get(i, j).clone()]),
            ));
            for k in 0..n {
                first.push((label(&[i, j, k]), big_delta(i, j, k) - up(&up(&cert.xi[k], j), i)));
                let mixed = Expr::add_all((0..n).flat_map(|m| (0..n).map(move |l| (m, l))).map(|(m, l)| {
                    let coeff = g.get(i, m) * eta.get(j, l) - eta.get(i, m) * g.get(j, l);
                    let dd = differentiate(&differentiate(&cert.xi[k], coords.name(m)), coords.name(l));
                    coeff * dd
                }));
                fourth.push((label(&[i, j, k]), mixed));
                for l in 0..n {
                    let lhs = Expr::add_all((0..n).map(|s| lowered(i, j, s) * lowered(s, k, l)));
                    let rhs = Expr::add_all((0..n).map(|s| lowered(i, k, s) * lowered(s, j, l)));
                    third.push((label(&[i, j, k, l]), lhs - rhs));
                }
            }
        }
    }
    let mut constants = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for m in 0..n {
                constants.push((label(&[i, j, m]), differentiate(cert.c.get(i, j), coords.name(m))));
            }
        }
    }
    Ok(vec![
        zero_check("dubrovin.constants", "∂_m c^{ij} = 0", constants, cfg),
        zero_check("dubrovin.delta", "Δ^{ijk} = ∂^i ∂^j ξ^k", first, cfg),
        zero_check("dubrovin.metric", "g^{ij} = ∂^i ξ^j + ∂^j ξ^i + c^{ij}", second, cfg),
        zero_check("dubrovin.quadratic", "Δ^{ij}_s Δ^{sk}_l = Δ^{ik}_s Δ^{sj}_l", third, cfg),
        zero_check("dubrovin.mixed", "(g^{im} η^{jl} - η^{im} g^{jl}) ∂_m ∂_l ξ^k = 0", fourth, cfg),
    ])
}

/// Overall status of a list of checks.
pub fn overall(checks: &[Check]) -> Status {
    Status::combine(checks.iter().map(|c| c.status))
}
