//! The dispersionless KdV and Toda systems with the closed forms they are
//! expected to reproduce after the transformation `y = t`, `s = −x`.

use symkern::{parse, Expr, Rational, SymMatrix, ZeroTestConfig};

use crate::geometry::{Coords, DubrovinCertificate};
use crate::hydro::TranslationData;
use crate::pipeline::{run_transform, FlowDefinition, SystemDefinition, TransformDefinition, TransformOutcome};
use crate::reciprocal::{Candidates, InverseMap, LinearReciprocalTransform};
use crate::report::{label, matrix_items, zero_check, Check, Report};
use crate::{CoreError, Result};

/// A system definition together with its sampling box.
#[derive(Debug, Clone)]
pub struct Example {
    pub definition: SystemDefinition,
    pub intervals: Vec<(String, Rational, Rational)>,
    kind: Kind,
}

#[derive(Debug, Clone, Copy)]
enum Kind {
    Kdv { m: i64, k: i64 },
    Toda,
}

fn e(s: &str) -> Expr {
    parse(s).unwrap_or_else(|err| panic!("fixture expression '{s}': {err}"))
}

fn mat(rows: &[&[&str]]) -> SymMatrix {
    SymMatrix::from_rows(rows.iter().map(|r| r.iter().map(|s| e(s)).collect()).collect())
        .expect("fixture matrix is well formed")
}

fn r(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

fn q(n: i64, d: i64) -> Expr {
    Expr::ratio(n, d)
}

fn swap_time_space() -> LinearReciprocalTransform {
    LinearReciprocalTransform::new(r(0, 1), r(1, 1), r(-1, 1), r(0, 1)).expect("aq - bp = 1")
}

impl Example {
    /// `u_t = (m+1)u^m u_x` with the commuting flow `u_{t₁} = (k+1)u^k u_x`.
    pub fn kdv(m: i64, k: i64) -> Result<Example> {
        if m < 1 || k < 1 {
            return Err(CoreError::Precondition(format!("KdV fixture needs m >= 1 and k >= 1, got m = {m}, k = {k}")));
        }
        let u = Expr::sym("u");
        let v = Expr::sym("v");
        let pow = |x: &Expr, n: i64, d: i64| Expr::pow(x.clone(), r(n, d));
        let coords = Coords::new(["u"])?;
        let definition = SystemDefinition {
            name: format!("kdv(m={m}, k={k})"),
            coords,
            eta: mat(&[&["1"]]),
            g: mat(&[&["u"]]),
            h: q(1, m + 2) * pow(&u, m + 2, 1),
            f: q(2, 2 * m + 1) * pow(&u, m + 1, 1),
            flows: vec![FlowDefinition {
                h: q(1, k + 2) * pow(&u, k + 2, 1),
                f: q(2, 2 * k + 1) * pow(&u, k + 1, 1),
                candidates: Candidates {
                    hbar: Some(q(m + 1, m + k + 2) * pow(&v, k + m + 2, m + 1)),
                    fbar: Some(q(2 * (k + 1) * (m + 1), (2 * k + 1) * (m + k + 1)) * pow(&v, m + k + 1, m + 1)),
                },
            }],
            translation: Some(TranslationData { flat_coords: vec![e("2*sqrt(u)")], ghat: mat(&[&["1"]]) }),
            dubrovin: Some(DubrovinCertificate { xi: vec![e("u^2/4")], c: mat(&[&["0"]]) }),
            transform: Some(TransformDefinition {
                lr: swap_time_space(),
                v_coords: Coords::new(["v"])?,
                inverse: Some(InverseMap { u_of_v: vec![pow(&v, 1, m + 1)] }),
                candidates: Candidates {
                    hbar: Some(-(q(m + 1, m + 2) * pow(&v, m + 2, m + 1))),
                    fbar: Some(e("-2*v")),
                },
            }),
        };
        Ok(Example { definition, intervals: Vec::new(), kind: Kind::Kdv { m, k } })
    }

    /// The long wave limit `u_tt = (e^u)_xx` written for `(w, u)`.
    pub fn toda() -> Result<Example> {
        let definition = SystemDefinition {
            name: "toda".into(),
            coords: Coords::new(["w", "u"])?,
            eta: mat(&[&["0", "1"], &["1", "0"]]),
            g: mat(&[&["2*exp(u)", "w"], &["w", "2"]]),
            h: e("exp(u) + w^2/2"),
            f: e("w"),
            flows: vec![FlowDefinition {
                h: e("exp(u)*w + w^3/6"),
                f: e("(exp(u) + w^2/2)/2"),
                candidates: Candidates { hbar: Some(e("(ubar^2*wbar + wbar^2)/2")), fbar: Some(e("ubar*wbar/2")) },
            }],
            translation: None,
            dubrovin: Some(DubrovinCertificate {
                xi: vec![e("exp(u) + w^2/2"), e("w")],
                c: mat(&[&["0", "0"], &["0", "0"]]),
            }),
            transform: Some(TransformDefinition {
                lr: swap_time_space(),
                v_coords: Coords::new(["wbar", "ubar"])?,
                inverse: Some(InverseMap { u_of_v: vec![e("ubar"), e("log(wbar)")] }),
                candidates: Candidates {
                    hbar: Some(e("-wbar*log(wbar) + wbar - ubar^2/2")),
                    fbar: Some(e(
                        "-ubar*log(wbar)/2 + ubar - sqrt(-4*wbar + ubar^2)*ArcTanh(ubar/sqrt(-4*wbar + ubar^2))",
                    )),
                },
            }),
        };
        let intervals = vec![
            ("w".to_string(), r(3, 2), r(2, 1)),
            ("u".to_string(), r(-23, 10), r(-61, 50)),
            ("wbar".to_string(), r(1, 10), r(3, 10)),
            ("ubar".to_string(), r(3, 2), r(2, 1)),
        ];
        Ok(Example { definition, intervals, kind: Kind::Toda })
    }

    /// `cfg` with the sampling box of the example added.
    pub fn configure(&self, cfg: &ZeroTestConfig) -> ZeroTestConfig {
        let mut cfg = cfg.clone();
        for (s, lo, hi) in &self.intervals {
            cfg = cfg.with_interval(s, lo.clone(), hi.clone()).expect("fixture intervals are nonempty");
        }
        cfg
    }

    /// Runs the full pipeline and compares the results with the closed forms.
    pub fn run(&self, cfg: &ZeroTestConfig) -> Result<(TransformOutcome, Report)> {
        let cfg = self.configure(cfg);
        let out = run_transform(&self.definition, &cfg)?.expect("fixtures carry a transformation");
        let mut report = out.report.clone();
        report.extend(match self.kind {
            Kind::Kdv { m, k } => kdv_closed_forms(&out, m, k, &cfg)?,
            Kind::Toda => toda_closed_forms(&out, &cfg)?,
        });
        report.summarize("closed-form", "closed-form.", "closed forms of the worked example");
        Ok((out, report))
    }
}

fn compare(name: &str, identity: &str, got: &SymMatrix, want: &SymMatrix, cfg: &ZeroTestConfig) -> Result<Check> {
    Ok(zero_check(name, identity, matrix_items(&got.sub(want)?), cfg))
}

fn vector_check(name: &str, identity: &str, got: &[Expr], want: &[Expr], cfg: &ZeroTestConfig) -> Check {
    let items = got.iter().zip(want).enumerate().map(|(i, (a, b))| (label(&[i]), a - b)).collect();
    zero_check(name, identity, items, cfg)
}

fn in_v(out: &TransformOutcome, m: &SymMatrix) -> Result<SymMatrix> {
    out.vc.matrix_in_v(m).ok_or_else(|| CoreError::Precondition("closed forms need the inverse map".into()))
}

fn kdv_closed_forms(out: &TransformOutcome, m: i64, k: i64, cfg: &ZeroTestConfig) -> Result<Vec<Check>> {
    let v = Expr::sym("v");
    let u = Expr::sym("u");
    let pow = |x: &Expr, n: i64, d: i64| Expr::pow(x.clone(), r(n, d));
    let one = |x: Expr| SymMatrix::from_rows(vec![vec![x]]).expect("1x1");
    let mut checks = vec![
        compare("closed-form.flow", "V = (m+1) u^m", &out.check.v, &one(q(m + 1, 1) * pow(&u, m, 1)), cfg)?,
        vector_check("closed-form.v", "v = u^(m+1)", &out.vc.v, &[pow(&u, m + 1, 1)], cfg),
        compare(
            "closed-form.s-flow",
            "v_s = -v^(-m/(m+1)) v_y/(m+1)",
            &in_v(out, &out.flows.s_flow)?,
            &one(-(q(1, m + 1) * pow(&v, -m, m + 1))),
            cfg,
        )?,
        compare(
            "closed-form.t1-flow",
            "v_{t₁} = (k+1) v^((k-m)/(m+1)) v_y/(m+1)",
            &in_v(out, &out.flows.t1_flows[0])?,
            &one(q(k + 1, m + 1) * pow(&v, k - m, m + 1)),
            cfg,
        )?,
    ];
    let gbar = out.pulled.gbar_v.as_ref().expect("inverse map given");
    checks.push(compare("closed-form.gbar", "ḡ = v^(1/(m+1))", gbar.matrix(), &one(pow(&v, 1, m + 1)), cfg)?);
    let contra = out.pulled.contra_v.as_ref().expect("inverse map given");
    checks.push(vector_check(
        "closed-form.jbar2",
        "Γ̄^{11}_1 = v^(-m/(m+1))/(2(m+1))",
        &[contra.get(0, 0, 0).clone()],
        &[q(1, 2 * (m + 1)) * pow(&v, -m, m + 1)],
        cfg,
    ));
    let hbar = out.vc.in_v(&out.hbar).expect("inverse map given");
    checks.push(vector_check(
        "closed-form.hbar",
        "h̄ = -(m+1) v^((m+2)/(m+1))/(m+2)",
        &[hbar],
        &[-(q(m + 1, m + 2) * pow(&v, m + 2, m + 1))],
        cfg,
    ));
    Ok(checks)
}

fn toda_closed_forms(out: &TransformOutcome, cfg: &ZeroTestConfig) -> Result<Vec<Check>> {
    let mut checks = vec![
        compare("closed-form.flow", "V = [[0, exp(u)], [1, 0]]", &out.check.v, &mat(&[&["0", "exp(u)"], &["1", "0"]]), cfg)?,
        compare(
            "closed-form.t1-system",
            "A = [[exp(u), exp(u)*w], [w, exp(u)]]",
            &out.check.commuting[0],
            &mat(&[&["exp(u)", "exp(u)*w"], &["w", "exp(u)"]]),
            cfg,
        )?,
        vector_check("closed-form.v", "(wbar, ubar) = (exp(u), w)", &out.vc.v, &[e("exp(u)"), e("w")], cfg),
        compare(
            "closed-form.s-flow",
            "wbar_s = -ubar_y, ubar_s = -wbar_y/wbar",
            &in_v(out, &out.flows.s_flow)?,
            &mat(&[&["0", "-1"], &["-1/wbar", "0"]]),
            cfg,
        )?,
        compare(
            "closed-form.t1-flow",
            "wbar_{t₁} = ubar wbar_y + wbar ubar_y, ubar_{t₁} = ubar ubar_y + wbar_y",
            &in_v(out, &out.flows.t1_flows[0])?,
            &mat(&[&["ubar", "wbar"], &["1", "ubar"]]),
            cfg,
        )?,
    ];
    let gbar = out.pulled.gbar_v.as_ref().expect("inverse map given");
    checks.push(compare(
        "closed-form.gbar",
        "ḡ = [[2*wbar, ubar], [ubar, 2]]",
        gbar.matrix(),
        &mat(&[&["2*wbar", "ubar"], &["ubar", "2"]]),
        cfg,
    )?);
    // J̄₂ = [[2 wbar ∂ + wbar_y, ubar ∂], [ubar ∂ + ubar_y, 2 ∂]]
    let contra = out.pulled.contra_v.as_ref().expect("inverse map given");
    let mut got = Vec::new();
    let mut want = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            for kk in 0..2 {
                got.push(contra.get(i, j, kk).clone());
                let expected = matches!((i, j, kk), (0, 0, 0) | (1, 0, 1));
                want.push(if expected { Expr::one() } else { Expr::zero() });
            }
        }
    }
    checks.push(vector_check("closed-form.jbar2", "Γ̄^{11}_1 = Γ̄^{21}_2 = 1, other Γ̄^{ij}_k = 0", &got, &want, cfg));
    let hbar = out.vc.in_v(&out.hbar).expect("inverse map given");
    checks.push(vector_check(
        "closed-form.hbar",
        "h̄ = -wbar log(wbar) + wbar - ubar^2/2",
        &[hbar],
        &[e("-wbar*log(wbar) + wbar - ubar^2/2")],
        cfg,
    ));
    Ok(checks)
}
