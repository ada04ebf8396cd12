use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn biham(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_biham")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    let out = biham(&all);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    });
    (out.status.code().unwrap(), v)
}

fn status_of<'a>(v: &'a Value, name: &str) -> &'a str {
    v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no check named {name}"))["status"]
        .as_str()
        .unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn toda_check_passes() {
    let (code, v) = json(&["check", path(&data("toda.toml"))]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "pass");
    for name in ["biham-consistency", "flat-pencil", "semisimple", "t1.commuting"] {
        assert_eq!(status_of(&v, name), "pass", "{name}");
    }
}

#[test]
fn perturbed_toda_exits_one() {
    let (code, v) = json(&["check", path(&data("toda_perturbed.toml"))]);
    assert_eq!(code, 1);
    assert_eq!(status_of(&v, "biham-consistency"), "fail");
    assert_eq!(status_of(&v, "flat-pencil"), "pass");
}

#[test]
fn curved_toda_fails_flat_pencil() {
    let (code, v) = json(&["check", path(&data("toda_curved.toml"))]);
    assert_eq!(code, 1);
    assert_eq!(status_of(&v, "flat-pencil"), "fail");
    assert_eq!(status_of(&v, "flat-g"), "fail");
}

#[test]
fn unbalanced_parenthesis_exits_two_with_location() {
    let file = data("unbalanced.toml");
    let out = biham(&["check", path(&file)]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains(&format!("{}:6:", file.display())), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn malformed_toml_and_missing_file_exit_two() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "[system]\ncoords = [\"u\"\neta = 1").unwrap();
    let out = biham(&["check", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = biham(&["check", "/nonexistent/system.toml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn wrong_dimension_reports_line() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    write!(f, "[system]\ncoords = [\"w\", \"u\"]\neta = [[\"0\", \"1\"], [\"1\", \"0\"]]\ng = [[\"1\"]]\nh = \"w\"\nf = \"u\"\n").unwrap();
    let out = biham(&["check", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains(":4: g must be a 2x2 matrix"), "{err}");
}

#[test]
fn kdv_transform_prints_closed_forms() {
    let out = biham(&["transform", path(&data("kdv.toml"))]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8_lossy(&out.stdout);
    let line = |label: &str| {
        text.lines().find(|l| l.starts_with(label)).unwrap_or_else(|| panic!("no {label} line")).to_string()
    };
    assert!(line("v(u)").ends_with("u^3"));
    assert!(line("s-flow (v)").ends_with("[[\"-1/(3*v^(2/3))\"]]"));
    assert!(line("hbar (v)").ends_with("-3*v^(4/3)/4"));
}

#[test]
fn toda_transform_prints_transformed_metric() {
    let (code, v) = json(&["transform", path(&data("toda.toml"))]);
    assert_eq!(code, 0);
    let t = &v["transform"];
    assert_eq!(t["gbar_v"], serde_json::json!([["2*wbar", "ubar"], ["ubar", "2"]]));
    assert_eq!(t["s_flow"], serde_json::json!([["0", "-1"], ["-exp(-u)", "0"]]));
    assert_eq!(t["t_flows"][0], serde_json::json!([["w", "exp(u)"], ["1", "w"]]));
    for name in ["theorem1", "theorem2", "theorem3", "potential.hbar", "potential.t1.f1bar"] {
        assert_eq!(status_of(&v, name), "pass", "{name}");
    }
}

#[test]
fn identity_transform_reproduces_inputs() {
    let (code, v) = json(&["transform", path(&data("kdv_identity.toml"))]);
    assert_eq!(code, 0);
    let t = &v["transform"];
    assert_eq!(t["s_flow"], serde_json::json!([["3*u^2"]]));
    assert_eq!(t["t_flows"][0], serde_json::json!([["2*u"]]));
    assert_eq!(t["gbar"], serde_json::json!([["u"]]));
    assert_eq!(t["q"], serde_json::json!([["1"]]));
    assert_eq!(t["hbar"], "u^4/4");
}

#[test]
fn wrong_candidate_fails_transform() {
    let (code, v) = json(&["transform", path(&data("toda_wrong_hbar.toml"))]);
    assert_eq!(code, 1);
    assert_eq!(status_of(&v, "potential.hbar"), "fail");
    let failing = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "potential.hbar").unwrap();
    assert!(failing["witness"]["u"].as_str().unwrap().ends_with('i'));
}

#[test]
fn singular_jacobian_exits_one_with_determinant() {
    let out = biham(&["transform", path(&data("singular.toml"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("determinant 0"));
}

#[test]
fn transform_needs_a_transform_section() {
    let out = biham(&["transform", path(&data("nonflat.toml"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn examples() {
    let (code, v) = json(&["example", "kdv", "--m", "1", "--k", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "pass");
    let (code, v) = json(&["example", "toda"]);
    assert_eq!(code, 0);
    for name in ["biham-consistency", "flat-pencil", "theorem1", "theorem2", "theorem3", "theorem2.j2-v"] {
        assert_eq!(status_of(&v, name), "pass", "{name}");
    }
    assert_eq!(biham(&["example", "kdv", "--m", "0"]).status.code(), Some(2));
}

#[test]
fn json_is_deterministic_and_seeded() {
    let file = data("nonflat.toml");
    let args = ["--format", "json", "--seed", "1f", "check", path(&file)];
    let a = biham(&args);
    let b = biham(&args);
    assert_eq!(a.status.code(), Some(1));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["seed"], "0x000000000000001f");
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["millis"] == 0));
    let other = biham(&["--format", "json", "--seed", "20", "check", path(&file)]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn flags_override_defaults() {
    let (_, v) = json(&["--precision", "128", "--samples", "8", "check", path(&data("toda.toml"))]);
    assert_eq!(v["precision"], 128);
    assert_eq!(biham(&["--seed", "zz", "check", path(&data("toda.toml"))]).status.code(), Some(2));
    assert_eq!(biham(&["--precision", "8", "check", path(&data("toda.toml"))]).status.code(), Some(2));
}
