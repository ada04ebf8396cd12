//! Probabilistic identity testing by evaluation at deterministic sample points.
//!
//! Sample coordinates are exact rationals drawn from per-symbol intervals by a
//! ChaCha stream keyed on the seed, the symbol name and the draw index, so a
//! witness can be reproduced from the configuration alone.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::{Complex, Float, Rational};
use thiserror::Error;

use crate::eval::{evaluate_tracked, EvalError, EvalPoint, MIN_PRECISION};
use crate::expr::Expr;

/// Default seed for the sample generator.
pub const DEFAULT_SEED: u64 = 0x5eed_b1a5_0000_0001;

const DRAW_RESOLUTION_BITS: u32 = 40;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("at least 4 samples are required, got {0}")]
    TooFewSamples(usize),
    #[error("precision must be at least 64 bits, got {0}")]
    PrecisionTooLow(u32),
    #[error("empty sampling interval for '{0}'")]
    EmptyInterval(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZeroTestError {
    #[error("zero test inconclusive: only {valid} of {required} sample points were usable ({last_error})")]
    Inconclusive { valid: usize, required: usize, last_error: String },
}

/// Settings for [`is_identically_zero`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroTestConfig {
    samples: usize,
    precision: u32,
    tolerance_bits: Option<u32>,
    intervals: BTreeMap<String, (Rational, Rational)>,
    seed: u64,
}

impl Default for ZeroTestConfig {
    fn default() -> Self {
        ZeroTestConfig {
            samples: 16,
            precision: 256,
            tolerance_bits: None,
            intervals: BTreeMap::new(),
            seed: DEFAULT_SEED,
        }
    }
}

impl ZeroTestConfig {
    pub fn with_samples(mut self, n: usize) -> Result<Self, ConfigError> {
        if n < 4 {
            return Err(ConfigError::TooFewSamples(n));
        }
        self.samples = n;
        Ok(self)
    }

    pub fn with_precision(mut self, bits: u32) -> Result<Self, ConfigError> {
        if bits < MIN_PRECISION {
            return Err(ConfigError::PrecisionTooLow(bits));
        }
        self.precision = bits;
        Ok(self)
    }

    /// Sets the relative tolerance to `2^-bits`.
    pub fn with_tolerance_bits(mut self, bits: u32) -> Self {
        self.tolerance_bits = Some(bits);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Restricts samples of `symbol` to the closed interval `[lo, hi]`.
    pub fn with_interval(mut self, symbol: &str, lo: Rational, hi: Rational) -> Result<Self, ConfigError> {
        if lo >= hi {
            return Err(ConfigError::EmptyInterval(symbol.to_string()));
        }
        self.intervals.insert(symbol.to_string(), (lo, hi));
        Ok(self)
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `τ = 2^-bits`; by default `bits = P/2`.
    pub fn tolerance_bits(&self) -> u32 {
        self.tolerance_bits.unwrap_or(self.precision / 2)
    }

    pub fn intervals(&self) -> &BTreeMap<String, (Rational, Rational)> {
        &self.intervals
    }

    pub fn interval(&self, symbol: &str) -> (Rational, Rational) {
        self.intervals.get(symbol).cloned().unwrap_or_else(|| (Rational::from((1, 2)), Rational::from((3, 2))))
    }

    /// The exact coordinate used for `symbol` in draw number `draw`.
    pub fn sample_coordinate(&self, symbol: &str, draw: usize) -> Rational {
        let (lo, hi) = self.interval(symbol);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(symbol_stream(symbol));
        rng.set_word_pos(draw as u128 * 16);
        let k: u64 = rng.gen_range(0..(1u64 << DRAW_RESOLUTION_BITS));
        // midpoint of the k-th cell keeps samples strictly inside the interval
        let frac = Rational::from((2 * k + 1, 1u64 << (DRAW_RESOLUTION_BITS + 1)));
        Rational::from(&hi - &lo) * frac + lo
    }

    /// Builds the sample point for `draw` covering `symbols`.
    pub fn sample_point<'a, I: IntoIterator<Item = &'a String>>(&self, symbols: I, draw: usize) -> SamplePoint {
        SamplePoint {
            draw,
            coords: symbols.into_iter().map(|s| (s.clone(), self.sample_coordinate(s, draw))).collect(),
        }
    }
}

fn symbol_stream(symbol: &str) -> u64 {
    // FNV-1a: stable across platforms and toolchains
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in symbol.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Exact rational coordinates of one sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplePoint {
    pub draw: usize,
    pub coords: BTreeMap<String, Rational>,
}

impl SamplePoint {
    pub fn to_eval_point(&self, precision: u32) -> EvalPoint {
        let mut p = EvalPoint::new(precision).expect("precision validated by the configuration");
        for (k, v) in &self.coords {
            p.set_rational(k, v);
        }
        p
    }
}

/// A point where the expression is demonstrably nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub point: SamplePoint,
    pub value: Complex,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coords: Vec<String> = self.point.coords.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "at {{{}}} value {}", coords.join(", "), format_complex(&self.value, 17))
    }
}

/// Renders `re±im·i` with `digits` significant decimal digits per part.
pub fn format_complex(c: &Complex, digits: usize) -> String {
    let re = format_float(c.real(), digits);
    let im = c.imag();
    let sign = if im.is_sign_negative() { '-' } else { '+' };
    let im_abs = Float::with_val(im.prec(), im.abs_ref());
    format!("{re}{sign}{}i", format_float(&im_abs, digits))
}

fn format_float(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    x.to_string_radix(10, Some(digits))
}

/// Outcome of a zero test.
#[derive(Debug, Clone, PartialEq)]
pub enum ZeroVerdict {
    /// Vanished (within tolerance) at every sample point.
    Zero {
        points: usize,
    },
    NonZero(Witness),
}

impl ZeroVerdict {
    pub fn is_zero(&self) -> bool {
        matches!(self, ZeroVerdict::Zero { .. })
    }
}

enum PointResult {
    Small,
    Large(Complex),
    Singular(EvalError),
}

/// Decides whether `e` is identically zero by deterministic sampling.
pub fn is_identically_zero(e: &Expr, c: &ZeroTestConfig) -> Result<ZeroVerdict, ZeroTestError> {
    if e.is_zero() {
        return Ok(ZeroVerdict::Zero { points: c.samples });
    }
    let symbols: Vec<String> = e.free_symbols().into_iter().collect();
    let tau = Float::with_val(c.precision, 1) >> c.tolerance_bits();
    let max_draws = 4 * c.samples;
    let mut valid = 0usize;
    let mut next_draw = 0usize;
    let mut last_error = String::from("no points drawn");
    while valid < c.samples && next_draw < max_draws {
        let batch: Vec<usize> = (next_draw..(next_draw + c.samples - valid).min(max_draws)).collect();
        next_draw += batch.len();
        let results: Vec<(SamplePoint, PointResult)> = batch
            .par_iter()
            .map(|&draw| {
                let sp = c.sample_point(&symbols, draw);
                let ep = sp.to_eval_point(c.precision);
                let r = match evaluate_tracked(e, &ep) {
                    Ok(ev) => {
                        let bound = Float::with_val(c.precision, 1.0 + ev.max_magnitude) * &tau;
                        let abs = Float::with_val(c.precision, ev.value.abs_ref());
                        if abs <= bound {
                            PointResult::Small
                        } else {
                            PointResult::Large(ev.value)
                        }
                    }
                    Err(err) => PointResult::Singular(err),
                };
                (sp, r)
            })
            .collect();
        for (sp, r) in results {
            match r {
                PointResult::Small => valid += 1,
                PointResult::Large(value) => return Ok(ZeroVerdict::NonZero(Witness { point: sp, value })),
                PointResult::Singular(err) => last_error = err.to_string(),
            }
        }
    }
    if valid < c.samples {
        return Err(ZeroTestError::Inconclusive { valid, required: c.samples, last_error });
    }
    Ok(ZeroVerdict::Zero { points: valid })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    fn cfg() -> ZeroTestConfig {
        ZeroTestConfig::default()
    }

    #[test]
    fn recognizes_identities() {
        assert!(is_identically_zero(&parse("exp(log(u)) - u").unwrap(), &cfg()).unwrap().is_zero());
        let e = parse("u^5 - u*u^4").unwrap();
        assert!(is_identically_zero(&e, &cfg()).unwrap().is_zero());
        let e = parse("ArcTanh(u) - log((1+u)/(1-u))/2").unwrap();
        let inside = cfg().with_interval("u", Rational::from((1, 10)), Rational::from((9, 10))).unwrap();
        assert!(is_identically_zero(&e, &inside).unwrap().is_zero());
    }

    #[test]
    fn nonzero_with_reproducible_witness() {
        // V^2 - V for V = 2u
        let e = parse("(2*u)^2 - 2*u").unwrap();
        let v = is_identically_zero(&e, &cfg()).unwrap();
        let ZeroVerdict::NonZero(w) = v else { panic!("expected a witness") };
        let again = is_identically_zero(&e, &cfg()).unwrap();
        assert_eq!(again, ZeroVerdict::NonZero(w.clone()));
        let u = &w.point.coords["u"];
        let exact: Rational = 4 * Rational::from(u * u) - Rational::from(2 * u);
        assert!((w.value.real().to_f64() - exact.to_f64()).abs() < 1e-12);
    }

    #[test]
    fn samples_stay_in_interval() {
        let c = cfg().with_interval("x", Rational::from((1, 10)), Rational::from((3, 10))).unwrap();
        for d in 0..50 {
            let x = c.sample_coordinate("x", d);
            assert!(x > Rational::from((1, 10)) && x < Rational::from((3, 10)));
            let y = c.sample_coordinate("y", d);
            assert!(y > Rational::from((1, 2)) && y < Rational::from((3, 2)));
        }
        assert_ne!(c.sample_coordinate("x", 0), c.sample_coordinate("x", 1));
    }

    #[test]
    fn singular_points_are_replaced_or_inconclusive() {
        let c = cfg().with_interval("u", Rational::from(-1), Rational::from(1)).unwrap();
        assert!(is_identically_zero(&parse("log(u) - log(u)").unwrap(), &c).unwrap().is_zero());
        let c = cfg().with_interval("u", Rational::from(1), Rational::from(2)).unwrap();
        let always_singular = Expr::recip(Expr::zero()) + parse("u").unwrap();
        assert!(matches!(is_identically_zero(&always_singular, &c), Err(ZeroTestError::Inconclusive { valid: 0, .. })));
    }

    #[test]
    fn config_validation() {
        assert!(cfg().with_samples(3).is_err());
        assert!(cfg().with_precision(32).is_err());
        assert!(cfg().with_interval("u", Rational::from(1), Rational::from(1)).is_err());
        assert_eq!(cfg().tolerance_bits(), 128);
    }
}
