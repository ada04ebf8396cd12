//! Systems of hydrodynamic type `u_t = V(u) u_x` and their bihamiltonian
//! representations `J₁∇h = J₂∇f`.

use symkern::{collect_powers, derivative_tensors, differentiate, expand, simplify, Expr, SymMatrix, ZeroTestConfig};

use crate::geometry::{
    christoffel_from_metric, contravariant_christoffel, covariant_metric, fresh_symbol, Christoffel, ContraChristoffel,
    ContravariantMetric, Coords,
};
use crate::report::{label, matrix_items, nonzero_check, zero_check, Check};
use crate::{CoreError, Result};

/// Constant metric `η`, metric `g` and the connection data of `g`.
#[derive(Debug, Clone)]
pub struct BihamiltonianStructure {
    pub coords: Coords,
    pub eta: SymMatrix,
    pub eta_cov: SymMatrix,
    pub g: ContravariantMetric,
    pub christoffel: Christoffel,
    pub contra: ContraChristoffel,
}

impl BihamiltonianStructure {
    pub fn new(coords: Coords, eta: SymMatrix, g: SymMatrix, cfg: &ZeroTestConfig) -> Result<BihamiltonianStructure> {
        if let Some(e) = eta.entries().iter().find(|e| !e.is_constant()) {
            return Err(CoreError::NotConstant { what: "η".into(), detail: e.to_string() });
        }
        let eta_metric = ContravariantMetric::new(coords.clone(), eta.clone(), cfg)?;
        let eta_cov = covariant_metric(eta_metric.matrix(), cfg)?;
        let g = ContravariantMetric::new(coords.clone(), g, cfg)?;
        let christoffel = christoffel_from_metric(&g, cfg)?;
        let contra = contravariant_christoffel(g.matrix(), &christoffel);
        Ok(BihamiltonianStructure { coords, eta, eta_cov, g, christoffel, contra })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// `h₀ = ½ η_{ij} u^i u^j`.
    pub fn h0(&self) -> Expr {
        let u = self.coords.symbols();
        let n = self.dim();
        let mut terms = Vec::new();
        for i in 0..n {
            for j in 0..n {
                terms.push(Expr::mul_all([
                    Expr::ratio(1, 2),
                    self.eta_cov.get(i, j).clone(),
                    u[i].clone(),
                    u[j].clone(),
                ]));
            }
        }
        Expr::add_all(terms)
    }
}

/// `V^i_j = η^{ik} ∂²h/∂u^k∂u^j`.
pub fn flow_from_eta(eta: &SymMatrix, h: &Expr, coords: &Coords) -> Result<SymMatrix> {
    let (_, hess) = derivative_tensors(h, coords.names());
    Ok(eta.mul(&hess)?.simplified())
}

/// `V^i_j = g^{ik}(f_{kj} − Γ^m_{kj} f_m)`.
pub fn flow_from_g(g: &SymMatrix, gamma: &Christoffel, f: &Expr, coords: &Coords) -> Result<SymMatrix> {
    let n = coords.len();
    let (grad, hess) = derivative_tensors(f, coords.names());
    let cov_hess = SymMatrix::from_fn(n, n, |k, j| {
        let mut terms = vec![hess.get(k, j).clone()];
        terms.extend(grad.iter().enumerate().map(|(m, fm)| -(gamma.get(m, k, j) * fm)));
        Expr::add_all(terms)
    })?;
    Ok(g.mul(&cov_hess)?.simplified())
}

/// `V^i_j = g^{ik} f_{kj} + Γ^{ik}_j f_k`, the operator form of the same flow.
pub fn flow_from_operator(g: &SymMatrix, contra: &ContraChristoffel, f: &Expr, coords: &Coords) -> Result<SymMatrix> {
    let n = coords.len();
    let (grad, hess) = derivative_tensors(f, coords.names());
    let gh = g.mul(&hess)?;
    Ok(SymMatrix::from_fn(n, n, |i, j| {
        let mut terms = vec![gh.get(i, j).clone()];
        terms.extend(grad.iter().enumerate().map(|(k, fk)| contra.get(i, k, j) * fk));
        simplify(&Expr::add_all(terms))
    })?)
}

fn symmetry_items(a: &SymMatrix, v: &SymMatrix) -> Result<Vec<(String, Expr)>> {
    // A V^T − V A
    let d = a.mul(&v.transpose())?.sub(&v.mul(a)?)?;
    Ok(matrix_items(&d))
}

/// Runs the identities tied to `J₁∇h = J₂∇f = V u_x`.
pub fn check_bihamiltonian(
    b: &BihamiltonianStructure,
    h: &Expr,
    f: &Expr,
    cfg: &ZeroTestConfig,
) -> Result<(SymMatrix, Vec<Check>)> {
    let n = b.dim();
    let coords = &b.coords;
    let v = flow_from_eta(&b.eta, h, coords)?;
    let vg = flow_from_g(b.g.matrix(), &b.christoffel, f, coords)?;
    let vo = flow_from_operator(b.g.matrix(), &b.contra, f, coords)?;
    let mut checks = vec![
        zero_check(
            "flow-forms",
            "g^{ik}(f_{kj} - Γ^m_{kj} f_m) = g^{ik} f_{kj} + Γ^{ik}_j f_k",
            matrix_items(&vg.sub(&vo)?),
            cfg,
        ),
        zero_check(
            "biham-consistency",
            "η^{ik} h_{kj} = g^{ik}(f_{kj} - Γ^m_{kj} f_m)",
            matrix_items(&v.sub(&vg)?),
            cfg,
        ),
        zero_check("eta-symmetry", "η V^T = V η", symmetry_items(&b.eta, &v)?, cfg),
        zero_check("g-symmetry", "g V^T = V g", symmetry_items(b.g.matrix(), &v)?, cfg),
    ];
    let gamma = &b.christoffel;
    let mut cov = Vec::new();
    let mut contraction = Vec::new();
    let mut partials = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                // ∇_k V^i_j − ∇_j V^i_k
                let nabla = |k: usize, j: usize| -> Expr {
                    let mut terms = vec![differentiate(v.get(i, j), coords.name(k))];
                    for m in 0..n {
                        terms.push(gamma.get(i, k, m) * v.get(m, j));
                        terms.push(-(gamma.get(m, k, j) * v.get(i, m)));
                    }
                    Expr::add_all(terms)
                };
                cov.push((label(&[i, j, k]), nabla(k, j) - nabla(j, k)));
                let lhs = Expr::add_all((0..n).map(|l| gamma.get(i, j, l) * v.get(l, k)));
                let rhs = Expr::add_all((0..n).map(|l| gamma.get(i, k, l) * v.get(l, j)));
                contraction.push((label(&[i, j, k]), lhs - rhs));
                partials.push((
                    label(&[i, j, k]),
                    differentiate(v.get(i, j), coords.name(k)) - differentiate(v.get(i, k), coords.name(j)),
                ));
            }
        }
    }
    checks.push(zero_check("covariant-symmetry", "∇_k V^i_j = ∇_j V^i_k", cov, cfg));
    checks.push(zero_check("christoffel-contraction", "Γ^i_{jl} V^l_k = Γ^i_{kl} V^l_j", contraction, cfg));
    checks.push(zero_check("flow-integrability", "∂_k V^i_j = ∂_j V^i_k", partials, cfg));
    Ok((v, checks))
}

/// `A V = V A`.
pub fn check_commuting(name: &str, v: &SymMatrix, a: &SymMatrix, cfg: &ZeroTestConfig) -> Result<Check> {
    let d = a.mul(v)?.sub(&v.mul(a)?)?;
    Ok(zero_check(name, "A V = V A", matrix_items(&d), cfg))
}

/// Flat coordinates `û(u)` of `g` and the constant components `ĝ^{ij}` there.
#[derive(Debug, Clone)]
pub struct TranslationData {
    pub flat_coords: Vec<Expr>,
    pub ghat: SymMatrix,
}

/// Densities of the translation flow `u_{t₀} = u_x` in both structures.
#[derive(Debug, Clone)]
pub struct TranslationHamiltonians {
    pub h0: Expr,
    pub f0: Option<Expr>,
    pub checks: Vec<Check>,
}

/// Builds `h₀` and, when flat coordinates of `g` are supplied, `f₀ = ½ ĝ_{ij} û^i û^j`,
/// and checks that both generate the identity flow.
pub fn translation_hamiltonians(
    b: &BihamiltonianStructure,
    td: Option<&TranslationData>,
    cfg: &ZeroTestConfig,
) -> Result<TranslationHamiltonians> {
    let n = b.dim();
    let coords = &b.coords;
    let eye = SymMatrix::identity(n)?;
    let h0 = b.h0();
    let mut checks = vec![zero_check(
        "translation-h0",
        "η^{ik} ∂_k ∂_j h₀ = δ^i_j",
        matrix_items(&flow_from_eta(&b.eta, &h0, coords)?.sub(&eye)?),
        cfg,
    )];
    let Some(td) = td else {
        return Ok(TranslationHamiltonians { h0, f0: None, checks });
    };
    if td.flat_coords.len() != n || td.ghat.shape() != (n, n) {
        return Err(CoreError::Dimension("flat coordinate data does not match the system".into()));
    }
    if let Some(e) = td.ghat.entries().iter().find(|e| !e.is_constant()) {
        return Err(CoreError::NotConstant { what: "ĝ".into(), detail: e.to_string() });
    }
    let jac = SymMatrix::from_fn(n, n, |i, a| differentiate(&td.flat_coords[i], coords.name(a)))?;
    let push = jac.mul(b.g.matrix())?.mul(&jac.transpose())?;
    checks.push(zero_check(
        "translation-pushforward",
        "(∂û^i/∂u^a) g^{ab} (∂û^j/∂u^b) = ĝ^{ij}",
        matrix_items(&push.sub(&td.ghat)?),
        cfg,
    ));
    let ghat_cov = td.ghat.inverse(cfg)?;
    let mut terms = Vec::new();
    for i in 0..n {
        for j in 0..n {
            terms.push(Expr::mul_all([
                Expr::ratio(1, 2),
                ghat_cov.get(i, j).clone(),
                td.flat_coords[i].clone(),
                td.flat_coords[j].clone(),
            ]));
        }
    }
    let f0 = simplify(&Expr::add_all(terms));
    let v = flow_from_g(b.g.matrix(), &b.christoffel, &f0, coords)?;
    checks.push(zero_check(
        "translation-f0",
        "g^{ik}(∂_k ∂_j f₀ - Γ^m_{kj} ∂_m f₀) = δ^i_j",
        matrix_items(&v.sub(&eye)?),
        cfg,
    ));
    Ok(TranslationHamiltonians { h0, f0: Some(f0), checks })
}

/// `(∂a/∂u^i) V^i_j = ∂b/∂u^j`, the condition for `a_t = b_x`.
pub fn check_conservation_law(
    name: &str,
    v: &SymMatrix,
    a: &Expr,
    b: &Expr,
    coords: &Coords,
    cfg: &ZeroTestConfig,
) -> Result<Check> {
    let n = coords.len();
    let mut items = Vec::new();
    for j in 0..n {
        let lhs = Expr::add_all((0..n).map(|i| differentiate(a, coords.name(i)) * v.get(i, j).clone()));
        items.push((label(&[j]), lhs - differentiate(b, coords.name(j))));
    }
    Ok(zero_check(name, "(∂a/∂u^i) V^i_j = ∂b/∂u^j", items, cfg))
}

/// Characteristic polynomial `det(g − λη)` (lowest degree first) and its discriminant.
pub fn pencil_discriminant(b: &BihamiltonianStructure) -> Result<(Vec<Expr>, Option<Expr>)> {
    let mut taken: std::collections::BTreeSet<String> = b.coords.names().iter().cloned().collect();
    for e in b.g.matrix().entries() {
        taken.extend(e.free_symbols());
    }
    let lam = fresh_symbol("lambda", &taken);
    let p = b.g.matrix().sub(&b.eta.scale(&Expr::sym(&lam)))?;
    let coeffs = collect_powers(&expand(&p.det()?), &lam)?;
    if coeffs.len() < 2 {
        return Err(CoreError::PencilDegenerate { det: format!("{coeffs:?}") });
    }
    let deg = coeffs.len() - 1;
    if deg == 1 {
        return Ok((coeffs, None));
    }
    // Sylvester matrix of p and p'
    let dp: Vec<Expr> = (1..=deg).map(|i| Expr::int(i as i64) * coeffs[i].clone()).collect();
    let size = 2 * deg - 1;
    let mut rows = Vec::with_capacity(size);
    for r in 0..(deg - 1) {
        rows.push(
            (0..size)
                .map(|c| if c >= r && c - r <= deg { coeffs[deg - (c - r)].clone() } else { Expr::zero() })
                .collect(),
        );
    }
    for r in 0..deg {
        rows.push(
            (0..size)
                .map(|c| if c >= r && c - r < deg { dp[deg - 1 - (c - r)].clone() } else { Expr::zero() })
                .collect(),
        );
    }
    let res = SymMatrix::from_rows(rows)?.det()?;
    let sign = if (deg * (deg - 1) / 2) % 2 == 0 { Expr::one() } else { Expr::int(-1) };
    let disc = simplify(&Expr::mul_all([sign, res, Expr::recip(coeffs[deg].clone())]));
    Ok((coeffs, Some(disc)))
}

/// Pairwise distinct roots of `det(g − λη)`: the discriminant must not vanish identically.
pub fn check_semisimple(b: &BihamiltonianStructure, cfg: &ZeroTestConfig) -> Result<Check> {
    let (_, disc) = pencil_discriminant(b)?;
    Ok(match disc {
        None => Check::pass("semisimple", "disc_λ det(g - λη) ≠ 0", "single root"),
        Some(d) => {
            let mut c = nonzero_check("semisimple", "disc_λ det(g - λη) ≠ 0", &d, cfg);
            c.detail = format!("discriminant {d}; {}", c.detail);
            c
        }
    })
}
