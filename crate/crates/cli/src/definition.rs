//! Reading system definitions from TOML files.
//!
//! ```toml
//! [system]
//! coords = ["w", "u"]
//! eta = [["0", "1"], ["1", "0"]]
//! g = [["2*exp(u)", "w"], ["w", "2"]]
//! h = "exp(u) + w^2/2"
//! f = "w"
//!
//! [transform]
//! a = "0"
//! b = "1"
//! p = "-1"
//! q = "0"
//! vars = ["wbar", "ubar"]
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;
use std::path::{Path, PathBuf};

use biham_core::geometry::{Coords, DubrovinCertificate};
use biham_core::hydro::TranslationData;
use biham_core::pipeline::{FlowDefinition, SystemDefinition, TransformDefinition};
use biham_core::reciprocal::{Candidates, InverseMap, LinearReciprocalTransform};
use serde::Deserialize;
use symkern::{parse, Expr, Rational, SymMatrix};
use toml::Spanned;

/// An input problem located in the definition file.
#[derive(Debug, Clone)]
pub struct DefinitionError {
    pub file: PathBuf,
    pub line: usize,
    pub message: String,
}

impl fmt::Display for DefinitionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.file.display(), self.line, self.message)
    }
}

impl std::error::Error for DefinitionError {}

type Text = Spanned<String>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    system: RawSystem,
    #[serde(default)]
    flows: Vec<RawFlow>,
    translation: Option<RawTranslation>,
    dubrovin: Option<RawDubrovin>,
    transform: Option<RawTransform>,
    candidates: Option<RawCandidates>,
    zerotest: Option<RawZeroTest>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    name: Option<String>,
    coords: Spanned<Vec<String>>,
    eta: Spanned<Vec<Vec<Text>>>,
    g: Spanned<Vec<Vec<Text>>>,
    h: Text,
    f: Text,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFlow {
    h: Text,
    f: Text,
    hbar: Option<Text>,
    fbar: Option<Text>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTranslation {
    flat_coords: Spanned<Vec<Text>>,
    ghat: Spanned<Vec<Vec<Text>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDubrovin {
    xi: Spanned<Vec<Text>>,
    c: Spanned<Vec<Vec<Text>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTransform {
    a: Text,
    b: Text,
    p: Text,
    q: Text,
    vars: Option<Spanned<Vec<String>>>,
    inverse: Option<Spanned<Vec<Text>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCandidates {
    hbar: Option<Text>,
    fbar: Option<Text>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawZeroTest {
    precision: Option<Spanned<u32>>,
    samples: Option<Spanned<usize>>,
    seed: Option<Text>,
    #[serde(default)]
    intervals: BTreeMap<String, Spanned<Vec<Text>>>,
}

/// Zero-test settings read from the `[zerotest]` section.
#[derive(Debug, Clone, Default)]
pub struct ZeroTestOverrides {
    pub precision: Option<u32>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub intervals: Vec<(String, Rational, Rational)>,
}

/// A parsed definition file.
#[derive(Debug, Clone)]
pub struct Definition {
    pub system: SystemDefinition,
    pub zerotest: ZeroTestOverrides,
}

struct Ctx<'a> {
    file: &'a Path,
    src: &'a str,
}

impl Ctx<'_> {
    fn line_of(&self, offset: usize) -> usize {
        let end = offset.min(self.src.len());
        self.src[..end].bytes().filter(|&b| b == b'\n').count() + 1
    }

    fn err(&self, span: Range<usize>, message: impl Into<String>) -> DefinitionError {
        DefinitionError { file: self.file.to_path_buf(), line: self.line_of(span.start), message: message.into() }
    }

    fn expr(&self, t: &Text, what: &str) -> Result<Expr, DefinitionError> {
        parse(t.get_ref()).map_err(|e| self.err(t.span(), format!("{what}: {e} in \"{}\"", t.get_ref())))
    }

    fn rational(&self, t: &Text, what: &str) -> Result<Rational, DefinitionError> {
        let s = t.get_ref().trim();
        let parsed = match s.split_once('/') {
            Some((n, d)) => n
                .trim()
                .parse::<Rational>()
                .ok()
                .zip(d.trim().parse::<Rational>().ok())
                .filter(|(_, d)| *d != 0)
                .map(|(n, d)| n / d),
            None => s.parse::<Rational>().ok(),
        };
        parsed.ok_or_else(|| self.err(t.span(), format!("{what}: \"{s}\" is not a rational number")))
    }

    fn matrix(&self, m: &Spanned<Vec<Vec<Text>>>, n: usize, what: &str) -> Result<SymMatrix, DefinitionError> {
        let rows = m.get_ref();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(self.err(m.span(), format!("{what} must be a {n}x{n} matrix")));
        }
        let data = rows
            .iter()
            .enumerate()
            .map(|(i, r)| r.iter().enumerate().map(|(j, t)| self.expr(t, &format!("{what}[{i}][{j}]"))).collect())
            .collect::<Result<Vec<Vec<Expr>>, _>>()?;
        SymMatrix::from_rows(data).map_err(|e| self.err(m.span(), format!("{what}: {e}")))
    }

    fn vector(&self, v: &Spanned<Vec<Text>>, n: usize, what: &str) -> Result<Vec<Expr>, DefinitionError> {
        if v.get_ref().len() != n {
            return Err(self.err(v.span(), format!("{what} needs {n} entries, found {}", v.get_ref().len())));
        }
        v.get_ref().iter().enumerate().map(|(i, t)| self.expr(t, &format!("{what}[{i}]"))).collect()
    }

    fn optional(&self, t: &Option<Text>, what: &str) -> Result<Option<Expr>, DefinitionError> {
        t.as_ref().map(|t| self.expr(t, what)).transpose()
    }

    fn only_symbols(
        &self,
        e: &Expr,
        allowed: &[String],
        span: Range<usize>,
        what: &str,
    ) -> Result<(), DefinitionError> {
        match e.free_symbols().into_iter().find(|s| !allowed.contains(s)) {
            Some(s) => Err(self.err(span, format!("{what} uses unknown symbol '{s}'"))),
            None => Ok(()),
        }
    }

    fn constant_matrix(&self, m: &SymMatrix, span: Range<usize>, what: &str) -> Result<(), DefinitionError> {
        match m.entries().iter().find(|e| !e.is_constant()) {
            Some(e) => Err(self.err(span, format!("{what} must be constant, found {e}"))),
            None => Ok(()),
        }
    }
}

pub fn load(path: &Path) -> Result<Definition, DefinitionError> {
    let src = std::fs::read_to_string(path).map_err(|e| DefinitionError {
        file: path.to_path_buf(),
        line: 0,
        message: format!("cannot read file: {e}"),
    })?;
    parse_definition(path, &src)
}

pub fn parse_definition(path: &Path, src: &str) -> Result<Definition, DefinitionError> {
    let ctx = Ctx { file: path, src };
    let raw: RawFile = toml::from_str(src).map_err(|e| {
        let line = e.span().map(|s| ctx.line_of(s.start)).unwrap_or(0);
        DefinitionError { file: path.to_path_buf(), line, message: e.message().trim().to_string() }
    })?;

    let sys = &raw.system;
    let coords = Coords::new(sys.coords.get_ref().clone()).map_err(|e| ctx.err(sys.coords.span(), e.to_string()))?;
    let names = coords.names().to_vec();
    let n = coords.len();
    let eta = ctx.matrix(&sys.eta, n, "eta")?;
    ctx.constant_matrix(&eta, sys.eta.span(), "eta")?;
    let g = ctx.matrix(&sys.g, n, "g")?;
    for e in g.entries() {
        ctx.only_symbols(e, &names, sys.g.span(), "g")?;
    }
    let h = ctx.expr(&sys.h, "h")?;
    ctx.only_symbols(&h, &names, sys.h.span(), "h")?;
    let f = ctx.expr(&sys.f, "f")?;
    ctx.only_symbols(&f, &names, sys.f.span(), "f")?;

    let transform = raw
        .transform
        .as_ref()
        .map(|t| {
            let [a, b, p, q] = [(&t.a, "a"), (&t.b, "b"), (&t.p, "p"), (&t.q, "q")]
                .map(|(x, name)| ctx.rational(x, &format!("transform.{name}")));
            let lr = LinearReciprocalTransform::new(a?, b?, p?, q?).map_err(|e| ctx.err(t.a.span(), e.to_string()))?;
            let v_names: Vec<String> = match &t.vars {
                Some(v) => v.get_ref().clone(),
                None => names.iter().map(|s| format!("{s}bar")).collect(),
            };
            let vars_span = t.vars.as_ref().map(|v| v.span()).unwrap_or(t.a.span());
            if v_names.len() != n {
                return Err(ctx.err(vars_span, format!("transform.vars needs {n} names")));
            }
            let v_coords = Coords::new(v_names.clone()).map_err(|e| ctx.err(vars_span.clone(), e.to_string()))?;
            if let Some(s) = v_names.iter().find(|s| names.contains(s)) {
                return Err(ctx.err(vars_span, format!("new variable '{s}' clashes with a coordinate")));
            }
            let inverse = match &t.inverse {
                Some(inv) => {
                    let u_of_v = ctx.vector(inv, n, "transform.inverse")?;
                    for e in &u_of_v {
                        ctx.only_symbols(e, &v_names, inv.span(), "transform.inverse")?;
                    }
                    Some(InverseMap { u_of_v })
                }
                None => None,
            };
            let (hbar, fbar) = match &raw.candidates {
                Some(c) => (ctx.optional(&c.hbar, "candidates.hbar")?, ctx.optional(&c.fbar, "candidates.fbar")?),
                None => (None, None),
            };
            for (e, t) in [
                (&hbar, raw.candidates.as_ref().and_then(|c| c.hbar.as_ref())),
                (&fbar, raw.candidates.as_ref().and_then(|c| c.fbar.as_ref())),
            ] {
                if let (Some(e), Some(t)) = (e, t) {
                    ctx.only_symbols(e, &v_names, t.span(), "candidate")?;
                }
            }
            Ok((TransformDefinition { lr, v_coords, inverse, candidates: Candidates { hbar, fbar } }, v_names))
        })
        .transpose()?;
    if raw.candidates.is_some() && transform.is_none() {
        return Err(DefinitionError {
            file: path.to_path_buf(),
            line: 0,
            message: "[candidates] needs a [transform] section".into(),
        });
    }
    let v_names = transform.as_ref().map(|(_, v)| v.clone()).unwrap_or_default();

    let mut flows = Vec::new();
    for (i, fl) in raw.flows.iter().enumerate() {
        let what = |k: &str| format!("flows[{i}].{k}");
        let h = ctx.expr(&fl.h, &what("h"))?;
        ctx.only_symbols(&h, &names, fl.h.span(), &what("h"))?;
        let f = ctx.expr(&fl.f, &what("f"))?;
        ctx.only_symbols(&f, &names, fl.f.span(), &what("f"))?;
        let hbar = ctx.optional(&fl.hbar, &what("hbar"))?;
        let fbar = ctx.optional(&fl.fbar, &what("fbar"))?;
        for (e, t) in [(&hbar, &fl.hbar), (&fbar, &fl.fbar)] {
            if let (Some(e), Some(t)) = (e, t) {
                if transform.is_none() {
                    return Err(ctx.err(t.span(), "candidate densities need a [transform] section"));
                }
                ctx.only_symbols(e, &v_names, t.span(), "candidate")?;
            }
        }
        flows.push(FlowDefinition { h, f, candidates: Candidates { hbar, fbar } });
    }

    let translation = raw
        .translation
        .as_ref()
        .map(|t| {
            let flat_coords = ctx.vector(&t.flat_coords, n, "translation.flat_coords")?;
            let ghat = ctx.matrix(&t.ghat, n, "translation.ghat")?;
            ctx.constant_matrix(&ghat, t.ghat.span(), "translation.ghat")?;
            Ok(TranslationData { flat_coords, ghat })
        })
        .transpose()?;
    let dubrovin = raw
        .dubrovin
        .as_ref()
        .map(|d| {
            Ok(DubrovinCertificate { xi: ctx.vector(&d.xi, n, "dubrovin.xi")?, c: ctx.matrix(&d.c, n, "dubrovin.c")? })
        })
        .transpose()?;

    let mut zerotest = ZeroTestOverrides::default();
    if let Some(z) = &raw.zerotest {
        zerotest.precision = z.precision.as_ref().map(|p| *p.get_ref());
        zerotest.samples = z.samples.as_ref().map(|s| *s.get_ref());
        if let Some(seed) = &z.seed {
            zerotest.seed = Some(parse_seed(seed.get_ref()).map_err(|m| ctx.err(seed.span(), m))?);
        }
        for (sym, range) in &z.intervals {
            let [lo, hi] = range.get_ref().as_slice() else {
                return Err(ctx.err(range.span(), format!("interval for '{sym}' needs two bounds")));
            };
            let lo = ctx.rational(lo, "interval bound")?;
            let hi = ctx.rational(hi, "interval bound")?;
            if lo >= hi {
                return Err(ctx.err(range.span(), format!("empty interval for '{sym}'")));
            }
            zerotest.intervals.push((sym.clone(), lo, hi));
        }
    }

    let system = SystemDefinition {
        name: sys
            .name
            .clone()
            .unwrap_or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()),
        coords,
        eta,
        g,
        h,
        f,
        flows,
        translation,
        dubrovin,
        transform: transform.map(|(t, _)| t),
    };
    Ok(Definition { system, zerotest })
}

/// Accepts `0x`-prefixed or bare hexadecimal.
pub fn parse_seed(s: &str) -> Result<u64, String> {
    let t = s.trim();
    let digits = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")).unwrap_or(t).replace('_', "");
    u64::from_str_radix(&digits, 16).map_err(|_| format!("\"{s}\" is not a hexadecimal seed"))
}

#[cfg(test)]
mod tests {
    use super::*;

    const KDV: &str = r#"
[system]
coords = ["u"]
eta = [["1"]]
g = [["u"]]
h = "u^3/3"
f = "2*u^2/3"
"#;

    #[test]
    fn minimal_file() {
        let d = parse_definition(Path::new("kdv.toml"), KDV).unwrap();
        assert_eq!(d.system.name, "kdv");
        assert_eq!(d.system.h, parse("u^3/3").unwrap());
        assert!(d.system.transform.is_none());
    }

    #[test]
    fn bad_expression_reports_line() {
        let src = KDV.replace("\"2*u^2/3\"", "\"2*(u^2/3\"");
        let e = parse_definition(Path::new("x.toml"), &src).unwrap_err();
        assert_eq!(e.line, 7);
        assert!(e.to_string().starts_with("x.toml:7: f:"), "{e}");
    }

    #[test]
    fn toml_syntax_error_reports_line() {
        let src = format!("{KDV}\n[transform\n");
        let e = parse_definition(Path::new("x.toml"), &src).unwrap_err();
        assert_eq!(e.line, 9);
    }

    #[test]
    fn rationals_and_seeds() {
        let src = format!("{KDV}\n[transform]\na = \"0\"\nb = \"1\"\np = \"-1/2\"\nq = \"0\"\n[zerotest]\nseed = \"0xff\"\nsamples = 8\n[zerotest.intervals]\nu = [\"1\", \"3/2\"]\n");
        let d = parse_definition(Path::new("x.toml"), &src).unwrap();
        let t = d.system.transform.unwrap();
        assert_eq!(t.lr.p, Rational::from((-1, 2)));
        assert_eq!(t.v_coords.names(), ["ubar"]);
        assert_eq!(d.zerotest.seed, Some(255));
        assert_eq!(d.zerotest.samples, Some(8));
        assert_eq!(d.zerotest.intervals[0].2, Rational::from((3, 2)));
        assert_eq!(parse_seed("5EED").unwrap(), 0x5eed);
        assert!(parse_seed("xyz").is_err());
    }

    #[test]
    fn unknown_symbols_rejected() {
        let src = KDV.replace("\"u^3/3\"", "\"u^3/3 + z\"");
        let e = parse_definition(Path::new("x.toml"), &src).unwrap_err();
        assert!(e.message.contains("'z'"));
    }

    #[test]
    fn degenerate_transform_rejected() {
        let src = format!("{KDV}\n[transform]\na = \"1\"\nb = \"2\"\np = \"1/2\"\nq = \"1\"\n");
        assert!(parse_definition(Path::new("x.toml"), &src).is_err());
    }
}
