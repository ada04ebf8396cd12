//! Verdicts of individual identity checks and their aggregation.

use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use symkern::{is_identically_zero, Expr, Witness, ZeroTestConfig, ZeroTestError, ZeroVerdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
    Skipped,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
            Status::Skipped => "skipped",
        }
    }

    /// Fail dominates, then inconclusive; skipped entries do not count.
    pub fn combine<I: IntoIterator<Item = Status>>(it: I) -> Status {
        let mut out = Status::Pass;
        for s in it {
            match s {
                Status::Fail => return Status::Fail,
                Status::Inconclusive => out = Status::Inconclusive,
                Status::Pass | Status::Skipped => {}
            }
        }
        out
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of one named identity check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub status: Status,
    /// The identity checked, in the expression grammar where possible.
    pub identity: String,
    pub detail: String,
    pub witness: Option<Witness>,
    pub millis: u64,
}

impl Check {
    pub fn new(name: &str, status: Status, identity: impl Into<String>, detail: impl Into<String>) -> Check {
        Check {
            name: name.to_string(),
            status,
            identity: identity.into(),
            detail: detail.into(),
            witness: None,
            millis: 0,
        }
    }

    pub fn pass(name: &str, identity: impl Into<String>, detail: impl Into<String>) -> Check {
        Check::new(name, Status::Pass, identity, detail)
    }

    pub fn fail(name: &str, identity: impl Into<String>, detail: impl Into<String>) -> Check {
        Check::new(name, Status::Fail, identity, detail)
    }

    pub fn skipped(name: &str, identity: impl Into<String>, detail: impl Into<String>) -> Check {
        Check::new(name, Status::Skipped, identity, detail)
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    fn timed(mut self, start: Instant) -> Check {
        self.millis = start.elapsed().as_millis() as u64;
        self
    }
}

/// An ordered list of checks.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new() -> Report {
        Report::default()
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn extend<I: IntoIterator<Item = Check>>(&mut self, it: I) {
        self.checks.extend(it);
    }

    pub fn status(&self) -> Status {
        Status::combine(self.checks.iter().map(|c| c.status))
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Appends a check named `name` summarizing every check whose name starts with `prefix`.
    pub fn summarize(&mut self, name: &str, prefix: &str, identity: &str) {
        let parts: Vec<&Check> = self.checks.iter().filter(|c| c.name.starts_with(prefix)).collect();
        if parts.is_empty() {
            return;
        }
        let status = Status::combine(parts.iter().map(|c| c.status));
        let failing: Vec<&str> = parts
            .iter()
            .filter(|c| matches!(c.status, Status::Fail | Status::Inconclusive))
            .map(|c| c.name.as_str())
            .collect();
        let detail = if failing.is_empty() {
            format!("{} sub-checks", parts.len())
        } else {
            format!("not passing: {}", failing.join(", "))
        };
        let witness = parts.iter().find(|c| c.status == Status::Fail).and_then(|c| c.witness.clone());
        let millis = parts.iter().map(|c| c.millis).sum();
        self.checks.push(Check {
            name: name.to_string(),
            status,
            identity: identity.to_string(),
            detail,
            witness,
            millis,
        });
    }
}

/// Zero-tests every labelled component and reports the first failure in order.
pub fn zero_check(name: &str, identity: &str, items: Vec<(String, Expr)>, cfg: &ZeroTestConfig) -> Check {
    let start = Instant::now();
    let verdicts: Vec<Result<ZeroVerdict, ZeroTestError>> =
        items.par_iter().map(|(_, e)| is_identically_zero(e, cfg)).collect();
    let mut inconclusive = None;
    for ((label, e), v) in items.iter().zip(verdicts) {
        match v {
            Ok(ZeroVerdict::Zero { .. }) => {}
            Ok(ZeroVerdict::NonZero(w)) => {
                let mut c = Check::fail(name, identity, format!("component {label} is nonzero: {}", excerpt(e)));
                c.witness = Some(w);
                return c.timed(start);
            }
            Err(err) => {
                inconclusive.get_or_insert_with(|| format!("component {label}: {err}"));
            }
        }
    }
    if let Some(d) = inconclusive {
        return Check::new(name, Status::Inconclusive, identity, d).timed(start);
    }
    let noun = if items.len() == 1 { "component vanishes" } else { "components vanish" };
    Check::pass(name, identity, format!("{} {noun} at {} points", items.len(), cfg.samples())).timed(start)
}

/// Passes when `e` is demonstrably not identically zero.
pub fn nonzero_check(name: &str, identity: &str, e: &Expr, cfg: &ZeroTestConfig) -> Check {
    let start = Instant::now();
    match is_identically_zero(e, cfg) {
        Ok(ZeroVerdict::NonZero(w)) => Check::pass(name, identity, format!("nonzero {w}")).timed(start),
        Ok(ZeroVerdict::Zero { .. }) => {
            Check::fail(name, identity, format!("{} vanishes identically", excerpt(e))).timed(start)
        }
        Err(err) => Check::new(name, Status::Inconclusive, identity, err.to_string()).timed(start),
    }
}

pub(crate) fn excerpt(e: &Expr) -> String {
    let s = e.to_string();
    if s.len() <= 200 {
        return s;
    }
    let mut cut = 200;
    while !s.is_char_boundary(cut) {
        cut -= 1;
    }
    format!("{}...", &s[..cut])
}

/// Labels like `[0][1]` for matrix and tensor components.
pub(crate) fn label(idx: &[usize]) -> String {
    idx.iter().map(|i| format!("[{i}]")).collect()
}

/// All entries of a matrix difference as labelled items.
pub(crate) fn matrix_items(m: &symkern::SymMatrix) -> Vec<(String, Expr)> {
    let mut out = Vec::with_capacity(m.rows() * m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            out.push((label(&[i, j]), m.get(i, j).clone()));
        }
    }
    out
}
