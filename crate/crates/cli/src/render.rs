//! Text and JSON rendering of reports and transformed objects.

use std::fmt::Write as _;

use biham_core::geometry::ContraChristoffel;
use biham_core::pipeline::TransformOutcome;
use biham_core::{Check, Report};
use serde_json::{json, Map, Value};
use symkern::{format_complex, Expr, SymMatrix, Witness, ZeroTestConfig};

/// Significant digits of witness coordinates in JSON output.
pub const WITNESS_DIGITS: usize = 32;

pub fn seed_hex(seed: u64) -> String {
    format!("0x{seed:016x}")
}

fn witness_json(w: &Witness, precision: u32) -> Value {
    let point = w.point.to_eval_point(precision);
    let map: Map<String, Value> =
        point.values().iter().map(|(k, v)| (k.clone(), Value::String(format_complex(v, WITNESS_DIGITS)))).collect();
    Value::Object(map)
}

fn check_json(c: &Check, precision: u32) -> Value {
    let mut obj = json!({
        "name": c.name,
        "status": c.status.as_str(),
        "identity": c.identity,
        "detail": c.detail,
        "millis": c.millis,
    });
    if let Some(w) = &c.witness {
        obj["witness"] = witness_json(w, precision);
    }
    obj
}

/// Compact JSON with lexicographically sorted keys. `seed` and `precision`
/// appear only when a configuration is given.
pub fn report_json(report: &Report, cfg: Option<&ZeroTestConfig>) -> String {
    let precision = cfg.map(|c| c.precision()).unwrap_or(256);
    let mut top = json!({
        "checks": report.checks.iter().map(|c| check_json(c, precision)).collect::<Vec<_>>(),
        "status": report.status().as_str(),
    });
    if let Some(cfg) = cfg {
        top["precision"] = json!(cfg.precision());
        top["seed"] = json!(seed_hex(cfg.seed()));
    }
    top.to_string()
}

pub fn report_text(report: &Report, cfg: Option<&ZeroTestConfig>, timing: bool) -> String {
    let mut out = String::new();
    let width = report.checks.iter().map(|c| c.name.chars().count()).max().unwrap_or(0);
    for c in &report.checks {
        let _ = write!(out, "{:<14}{:<width$}  {}", format!("[{}]", c.status), c.name, c.identity);
        if timing {
            let _ = write!(out, "  ({} ms)", c.millis);
        }
        out.push('\n');
        if !c.passed() && !c.detail.is_empty() {
            let _ = writeln!(out, "{:14}{}", "", c.detail);
        }
        if let Some(w) = &c.witness {
            let _ = writeln!(out, "{:14}witness {w}", "");
        }
    }
    let passed = report.checks.iter().filter(|c| c.passed()).count();
    let _ = write!(out, "status: {} ({passed}/{} checks passed", report.status(), report.checks.len());
    if let Some(cfg) = cfg {
        let _ = write!(out, "; {} points, {} bits, seed {}", cfg.samples(), cfg.precision(), seed_hex(cfg.seed()));
    }
    out.push_str(")\n");
    out
}

/// A matrix in the nested-list syntax of definition files.
pub fn matrix(m: &SymMatrix) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|i| {
            let cells: Vec<String> = (0..m.cols()).map(|j| format!("\"{}\"", m.get(i, j))).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

fn christoffel(out: &mut String, label: &str, g: &ContraChristoffel, names: &[String]) {
    let n = g.dim();
    let mut any = false;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let e = g.get(i, j, k);
                if !e.is_zero() {
                    any = true;
                    let _ = writeln!(out, "  {label}^{{{}{}}}_{} = {e}", names[i], names[j], names[k]);
                }
            }
        }
    }
    if !any {
        let _ = writeln!(out, "  {label} = 0");
    }
}

fn line(out: &mut String, label: &str, value: impl std::fmt::Display) {
    let _ = writeln!(out, "{label:<18}{value}");
}

fn in_both(out: &mut String, label: &str, m: &SymMatrix, outcome: &TransformOutcome) {
    line(out, &format!("{label} (u)"), matrix(m));
    if let Some(mv) = outcome.vc.matrix_in_v(m) {
        line(out, &format!("{label} (v)"), matrix(&mv));
    }
}

/// The transformed objects, in `u` and, when an inverse map is known, in `v`.
pub fn transform_text(t: &TransformOutcome) -> String {
    let mut out = String::new();
    let u = t.vc.coords.names();
    let v = t.vc.v_coords.names();
    let lr = &t.lr;
    line(&mut out, "transformation", format!("dy = {} dx + {} dt, ds = {} dx + {} dt", lr.a, lr.b, lr.p, lr.q));
    for (name, e) in v.iter().zip(&t.vc.v) {
        line(&mut out, &format!("{name}(u)"), e);
    }
    if let Some(inv) = &t.vc.inverse {
        for (name, e) in u.iter().zip(&inv.u_of_v) {
            line(&mut out, &format!("{name}(v)"), e);
        }
    }
    line(&mut out, "Q", matrix(&t.vc.q));
    line(&mut out, "W", matrix(&t.vc.w));
    line(&mut out, "V", matrix(&t.check.v));
    in_both(&mut out, "s-flow", &t.flows.s_flow, t);
    in_both(&mut out, "t0-flow", &t.flows.t0_flow, t);
    for (i, m) in t.flows.t1_flows.iter().enumerate() {
        in_both(&mut out, &format!("t{}-flow", i + 1), m, t);
    }
    in_both(&mut out, "gbar", &t.pulled.gbar, t);
    out.push_str("Gammabar (u)\n");
    christoffel(&mut out, "Gammabar", &t.pulled.contra, v);
    if let Some(c) = &t.pulled.contra_v {
        out.push_str("Gammabar (v)\n");
        christoffel(&mut out, "Gammabar", c, v);
    }
    line(&mut out, "hbar (u)", &t.hbar);
    if let Some(h) = t.vc.in_v(&t.hbar) {
        line(&mut out, "hbar (v)", h);
    }
    out
}

/// JSON form of the transformed objects, keyed like [`transform_text`].
pub fn transform_json(t: &TransformOutcome) -> Value {
    let mat = |m: &SymMatrix| -> Value {
        Value::Array(
            (0..m.rows())
                .map(|i| Value::Array((0..m.cols()).map(|j| Value::String(m.get(i, j).to_string())).collect()))
                .collect(),
        )
    };
    let exprs = |es: &[Expr]| Value::Array(es.iter().map(|e| Value::String(e.to_string())).collect());
    let mut obj = json!({
        "v": exprs(&t.vc.v),
        "q": mat(&t.vc.q),
        "w": mat(&t.vc.w),
        "s_flow": mat(&t.flows.s_flow),
        "t0_flow": mat(&t.flows.t0_flow),
        "t_flows": t.flows.t1_flows.iter().map(mat).collect::<Vec<_>>(),
        "gbar": mat(&t.pulled.gbar),
        "hbar": t.hbar.to_string(),
    });
    if let Some(g) = &t.pulled.gbar_v {
        obj["gbar_v"] = mat(g.matrix());
    }
    if let Some(h) = t.vc.in_v(&t.hbar) {
        obj["hbar_v"] = Value::String(h.to_string());
    }
    obj
}

#[cfg(test)]
mod tests {
    use super::*;
    use biham_core::Status;

    #[test]
    fn empty_report() {
        assert_eq!(report_json(&Report::new(), None), r#"{"checks":[],"status":"pass"}"#);
    }

    #[test]
    fn failing_check_carries_witness() {
        let cfg = ZeroTestConfig::default();
        let e = symkern::parse("u^2 - u").unwrap();
        let c = biham_core::report::nonzero_check("x", "u^2 - u != 0", &e, &cfg);
        assert_eq!(c.status, Status::Pass);
        let c = biham_core::report::zero_check("y", "u^2 - u = 0", vec![("".into(), e)], &cfg);
        let mut r = Report::new();
        r.push(c);
        let s = report_json(&r, Some(&cfg));
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["status"], "fail");
        let w = v["checks"][0]["witness"]["u"].as_str().unwrap();
        let digits = w.split(['+', '-']).next().unwrap().chars().filter(|c| c.is_ascii_digit()).count();
        assert!(digits >= WITNESS_DIGITS - 2, "{w}");
        assert!(w.ends_with('i'));
    }

    #[test]
    fn matrix_round_trips_as_toml() {
        let m = SymMatrix::from_rows(vec![
            vec![symkern::parse("2*exp(u)").unwrap(), symkern::parse("w").unwrap()],
            vec![symkern::parse("w").unwrap(), Expr::int(2)],
        ])
        .unwrap();
        let text = format!("g = {}", matrix(&m));
        let back: toml::Table = toml::from_str(&text).unwrap();
        assert_eq!(back["g"][0][1].as_str(), Some("w"));
    }
}
