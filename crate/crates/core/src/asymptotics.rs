//! Predicted leading terms `c·p` with explicit error bounds, and their
//! verification against exact counts over ranges of primes.

use serde::Serialize;

use crate::arith::{is_prime, odd_primes_in_range, ResidueClassifier};
use crate::counting::{
    count_ap_pattern, count_ap_support, count_constant_sign, count_pattern, count_support, Side,
};
use crate::format::{canonical_json, sig6};
use crate::progressions::{gamma_set, FamilySpec, NormalizedFamily};
use crate::rational::Rational;
use crate::signatures::{classify_prime, PrimeClass};
use crate::structure::{analyze, Branch, StructureReport};
use crate::{Error, Result, Sign};

/// Bounds are asserted only from this prime on; smaller primes are reported.
pub const DEFAULT_ASSERT_FLOOR: u64 = 1000;

/// Relative slack on the floating-point bound comparison.
pub const BOUND_SLACK: f64 = 1e-12;

/// What is being counted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "target", rename_all = "snake_case")]
pub enum Target {
    /// Patterns `eps` on `n + Z`, `n >= 1`.
    ShiftPattern { z: Vec<u64>, eps: Vec<Sign> },
    /// Support sets `n + Z`.
    ShiftSupport { z: Vec<u64>, side: Side },
    /// Patterns on `AP(b; s)`, i.e. on `n + Z` with `Z = ∪_j {i b_j}`; `eps`
    /// has one sign per element of `Z` in increasing order.
    ApbPattern { b: Vec<u64>, s: u64, eps: Vec<Sign> },
    ApbSupport { b: Vec<u64>, s: u64, side: Side },
    /// All-residue or all-non-residue members of an `ap` or `normalized` family.
    ConstantSign { family: FamilySpec, eps: Sign },
    /// Patterns on a single progression `{a + b(n + i) : i < s}`, `s = |eps|`.
    ApSinglePattern { a: u64, b: u64, eps: Vec<Sign> },
    ApSingleSupport { a: u64, b: u64, s: u64, side: Side },
}

impl Target {
    pub fn label(&self) -> &'static str {
        match self {
            Target::ShiftPattern { .. } => "shift_pattern",
            Target::ShiftSupport { .. } => "shift_support",
            Target::ApbPattern { .. } => "apb_pattern",
            Target::ApbSupport { .. } => "apb_support",
            Target::ConstantSign { .. } => "constant_sign",
            Target::ApSinglePattern { .. } => "ap_single_pattern",
            Target::ApSingleSupport { .. } => "ap_single_support",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ValidOn {
    AllPrimes,
    PiPlusOnly,
}

/// `c·√p` or `c·√p·ln p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "form", content = "c", rename_all = "snake_case")]
pub enum ErrorBound {
    Sqrt(Rational),
    SqrtLog(Rational),
}

impl ErrorBound {
    pub fn eval(&self, p: u64) -> f64 {
        let x = p as f64;
        match self {
            ErrorBound::Sqrt(c) => c.to_f64() * x.sqrt(),
            ErrorBound::SqrtLog(c) => c.to_f64() * x.sqrt() * x.ln(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Prediction {
    /// `c` in `count ~ c·p`.
    pub coefficient: Rational,
    pub valid_on: ValidOn,
    pub zero_on_pi_minus: bool,
    pub bound: ErrorBound,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branch: Option<Branch>,
    /// Present for constant-sign targets.
    #[serde(skip)]
    pub structure: Option<StructureReport>,
}

/// `1 / (b · 2^exp)` as an exact rational.
fn inverse_power(b: u64, exp: u64) -> Result<Rational> {
    let too_large = || Error::TooLarge(format!("coefficient 1/({b}·2^{exp}) does not fit"));
    let pow = u32::try_from(exp)
        .ok()
        .and_then(|e| 1i128.checked_shl(e))
        .filter(|&x| x > 0)
        .ok_or_else(too_large)?;
    let den = pow.checked_mul(b as i128).ok_or_else(too_large)?;
    Ok(Rational::new(1, den))
}

fn small(n: u64) -> Rational {
    Rational::integer(n as i128)
}

fn check_z(z: &[u64]) -> Result<()> {
    if z.is_empty() || z.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::UnsupportedTarget("Z must be nonempty and strictly increasing".into()));
    }
    Ok(())
}

fn check_apb(b: &[u64], s: u64) -> Result<()> {
    if b.is_empty() || s == 0 || b.contains(&0) {
        return Err(Error::UnsupportedTarget("AP(b; s) needs positive b and s >= 1".into()));
    }
    let mut sorted = b.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::UnsupportedTarget("AP(b; s) needs distinct b".into()));
    }
    Ok(())
}

fn plain(coefficient: Rational, bound: ErrorBound) -> Prediction {
    Prediction {
        coefficient,
        valid_on: ValidOn::AllPrimes,
        zero_on_pi_minus: false,
        bound,
        branch: None,
        structure: None,
    }
}

/// Leading coefficient and error bound for `target`.
pub fn predict(target: &Target) -> Result<Prediction> {
    match target {
        Target::ShiftPattern { z, eps } => {
            check_z(z)?;
            if eps.len() != z.len() {
                return Err(Error::UnsupportedTarget(format!(
                    "pattern has {} signs but Z has {} elements",
                    eps.len(),
                    z.len()
                )));
            }
            let d = z.len() as u64;
            Ok(plain(inverse_power(1, d)?, ErrorBound::Sqrt(small(2 * d))))
        }
        Target::ShiftSupport { z, .. } => {
            check_z(z)?;
            let width = 1 + z[z.len() - 1] - z[0];
            Ok(plain(inverse_power(1, width)?, ErrorBound::Sqrt(small(2 * width))))
        }
        Target::ApbPattern { b, s, eps } => {
            check_apb(b, *s)?;
            let gamma = gamma_set(b, *s).len() as u64;
            if eps.len() as u64 != gamma {
                return Err(Error::UnsupportedTarget(format!(
                    "pattern has {} signs but gamma = {gamma}",
                    eps.len()
                )));
            }
            Ok(plain(inverse_power(1, gamma)?, ErrorBound::Sqrt(small(2 * gamma))))
        }
        Target::ApbSupport { b, s, .. } => {
            check_apb(b, *s)?;
            let bmax = *b.iter().max().expect("nonempty");
            let width = 1 + bmax * (s - 1);
            Ok(plain(inverse_power(1, width)?, ErrorBound::Sqrt(small(2 * width))))
        }
        Target::ConstantSign { family, .. } => {
            let f = constant_sign_family(family)?;
            let report = analyze(&f)?;
            let coefficient = inverse_power(report.bmax, report.exponent())?;
            let oscillating = report.branch == Branch::Oscillating;
            Ok(Prediction {
                coefficient,
                valid_on: if oscillating { ValidOn::PiPlusOnly } else { ValidOn::AllPrimes },
                zero_on_pi_minus: oscillating,
                bound: ErrorBound::SqrtLog(small(1 + 2 * report.alpha)),
                branch: Some(report.branch),
                structure: Some(report),
            })
        }
        Target::ApSinglePattern { b, eps, .. } => {
            if *b == 0 || eps.is_empty() {
                return Err(Error::UnsupportedTarget("need b >= 1 and a nonempty pattern".into()));
            }
            let s = eps.len() as u64;
            Ok(plain(inverse_power(*b, s)?, ErrorBound::SqrtLog(small(1 + 2 * s))))
        }
        Target::ApSingleSupport { b, s, .. } => {
            if *b == 0 || *s == 0 {
                return Err(Error::UnsupportedTarget("need b >= 1 and s >= 1".into()));
            }
            let width = 1 + b * (s - 1);
            Ok(plain(inverse_power(*b, width)?, ErrorBound::SqrtLog(small(1 + 2 * width))))
        }
    }
}

fn constant_sign_family(family: &FamilySpec) -> Result<NormalizedFamily> {
    match family {
        FamilySpec::Shift { .. } => Err(Error::UnsupportedTarget(
            "constant-sign prediction takes an ap or normalized family; use a shift pattern".into(),
        )),
        other => other.to_normalized(),
    }
}

/// How primes are drawn from a range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    All,
    /// Every `n`-th prime, starting with the first.
    Stride(usize),
    /// The first prime at or above each of `per_decade` log-spaced points per
    /// factor of ten.
    LogUniform { per_decade: usize },
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling::LogUniform { per_decade: 200 }
    }
}

/// Odd primes of `[lo, hi]` chosen by `sampling`, ascending and distinct.
pub fn select_primes(lo: u64, hi: u64, sampling: Sampling, cap: u64) -> Result<Vec<u64>> {
    if lo < 3 {
        return Err(Error::InvalidRange { lo, hi });
    }
    match sampling {
        Sampling::All => odd_primes_in_range(lo, hi, cap),
        Sampling::Stride(n) => {
            let n = n.max(1);
            Ok(odd_primes_in_range(lo, hi, cap)?.into_iter().step_by(n).collect())
        }
        Sampling::LogUniform { per_decade } => {
            if lo > hi {
                return Err(Error::InvalidRange { lo, hi });
            }
            if hi > cap {
                return Err(Error::RangeTooLarge { lo, hi, cap });
            }
            let per_decade = per_decade.max(1) as f64;
            let steps = ((hi as f64 / lo as f64).log10() * per_decade).ceil() as u64;
            let mut out: Vec<u64> = Vec::new();
            for j in 0..=steps {
                let start = (lo as f64 * 10f64.powf(j as f64 / per_decade)).ceil() as u64;
                let start = start.max(lo).max(out.last().map_or(0, |&q| q + 1));
                let Some(q) = (start..=hi).find(|&x| x % 2 == 1 && is_prime(x)) else { break };
                out.push(q);
            }
            Ok(out)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationRow {
    pub p: u64,
    pub count: u64,
    pub predicted: f64,
    pub error: f64,
    pub bound: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pi_class: Option<PrimeClass>,
    /// Whether this row counts toward violations.
    pub asserted: bool,
}

impl VerificationRow {
    pub const CSV_HEADER: &'static str = "p,count,predicted,error,bound,pass,pi_class";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.p,
            self.count,
            sig6(self.predicted),
            sig6(self.error),
            sig6(self.bound),
            self.pass,
            self.pi_class.map_or("na", |c| c.label())
        )
    }
}

/// A target with its prediction and whatever the counter needs precomputed.
#[derive(Clone, Debug)]
pub struct Verifier {
    target: Target,
    prediction: Prediction,
    family: Option<NormalizedFamily>,
    z: Vec<u64>,
    assert_floor: u64,
}

impl Verifier {
    pub fn new(target: Target) -> Result<Verifier> {
        let prediction = predict(&target)?;
        let (family, z) = match &target {
            Target::ConstantSign { family, .. } => (Some(constant_sign_family(family)?), Vec::new()),
            Target::ShiftPattern { z, .. } | Target::ShiftSupport { z, .. } => (None, z.clone()),
            Target::ApbPattern { b, s, .. } | Target::ApbSupport { b, s, .. } => (None, gamma_set(b, *s)),
            _ => (None, Vec::new()),
        };
        Ok(Verifier {
            target,
            prediction,
            family,
            z,
            assert_floor: DEFAULT_ASSERT_FLOOR,
        })
    }

    pub fn with_assert_floor(mut self, floor: u64) -> Verifier {
        self.assert_floor = floor;
        self
    }

    pub fn target(&self) -> &Target {
        &self.target
    }

    pub fn prediction(&self) -> &Prediction {
        &self.prediction
    }

    /// The exact count at the prime of `c`.
    pub fn count(&self, c: &ResidueClassifier) -> Result<u64> {
        let record = match &self.target {
            Target::ShiftPattern { eps, .. } | Target::ApbPattern { eps, .. } => count_pattern(c, &self.z, eps)?,
            Target::ShiftSupport { side, .. } | Target::ApbSupport { side, .. } => {
                count_support(c, &self.z, *side)?
            }
            Target::ConstantSign { eps, .. } => {
                count_constant_sign(c, self.family.as_ref().expect("prepared family"), *eps)
            }
            Target::ApSinglePattern { a, b, eps } => count_ap_pattern(c, *a, *b, eps)?,
            Target::ApSingleSupport { a, b, s, side } => count_ap_support(c, *a, *b, *s, *side)?,
        };
        Ok(record.count)
    }

    pub fn class_of(&self, p: u64) -> Option<PrimeClass> {
        self.prediction.structure.as_ref().map(|r| classify_prime(r, p))
    }

    /// Counts at `p` and compares with the prediction.
    pub fn row(&self, p: u64) -> Result<VerificationRow> {
        let c = ResidueClassifier::new(p)?;
        let count = self.count(&c)?;
        let class = self.class_of(p);
        let coefficient = self.prediction.coefficient;
        let on_minus = class == Some(PrimeClass::NonPositive) && self.prediction.zero_on_pi_minus;
        let predicted = if on_minus {
            Rational::integer(0)
        } else {
            coefficient * Rational::integer(p as i128)
        };
        let diff = Rational::integer(count as i128) - predicted;
        let error = diff.to_f64().abs();
        let bound = self.prediction.bound.eval(p);
        // On Π₋ the count is exactly zero, not merely small.
        let pass = if on_minus {
            count == 0
        } else {
            error <= bound * (1.0 + BOUND_SLACK)
        };
        Ok(VerificationRow {
            p,
            count,
            predicted: predicted.to_f64(),
            error,
            bound,
            pass,
            pi_class: class,
            asserted: p >= self.assert_floor && class != Some(PrimeClass::NotAllowable),
        })
    }

    /// Rows for `primes`, in the given order.
    pub fn rows(&self, primes: &[u64]) -> Result<Vec<VerificationRow>> {
        primes.iter().map(|&p| self.row(p)).collect()
    }

    /// Summary over rows; rows are sorted by `p` first.
    pub fn report(&self, mut rows: Vec<VerificationRow>) -> VerificationReport {
        rows.sort_by_key(|r| r.p);
        let coefficient = self.prediction.coefficient.to_f64();
        let mut max_ratio: f64 = 0.0;
        let (mut violations, mut checked) = (0, 0);
        let (mut pi_plus, mut pi_minus, mut pi_minus_nonzero) = (0, 0, 0);
        for r in &rows {
            match r.pi_class {
                Some(PrimeClass::Positive) => pi_plus += 1,
                Some(PrimeClass::NonPositive) => {
                    pi_minus += 1;
                    if self.prediction.zero_on_pi_minus && r.count != 0 {
                        pi_minus_nonzero += 1;
                    }
                }
                _ => {}
            }
            if !r.asserted {
                continue;
            }
            checked += 1;
            if !r.pass {
                violations += 1;
            }
            let on_minus = r.pi_class == Some(PrimeClass::NonPositive) && self.prediction.zero_on_pi_minus;
            if !on_minus {
                let ratio = (r.count as f64 / (coefficient * r.p as f64) - 1.0).abs();
                max_ratio = max_ratio.max(ratio);
            }
        }
        VerificationReport {
            target: self.target.clone(),
            prediction: self.prediction.clone(),
            assert_floor: self.assert_floor,
            rows,
            max_ratio,
            violations,
            checked,
            pi_plus,
            pi_minus,
            pi_minus_nonzero,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub target: Target,
    pub prediction: Prediction,
    pub assert_floor: u64,
    pub rows: Vec<VerificationRow>,
    /// `max |count / (c·p) - 1|` over asserted rows where `c·p` applies.
    pub max_ratio: f64,
    /// Asserted rows failing the bound (or the exact zero on `Π₋`).
    pub violations: usize,
    pub checked: usize,
    pub pi_plus: usize,
    pub pi_minus: usize,
    /// `Π₋` rows (at any size) with a nonzero count where zero is predicted.
    pub pi_minus_nonzero: usize,
}

#[derive(Serialize)]
struct Summary<'a> {
    target: &'a Target,
    coefficient: Rational,
    valid_on: ValidOn,
    bound: ErrorBound,
    branch: Option<&'static str>,
    assert_floor: u64,
    primes: usize,
    checked: usize,
    violations: usize,
    max_ratio: serde_json::Value,
    pi_plus: usize,
    pi_minus: usize,
    pi_minus_zero_confirmed: Option<bool>,
}

impl VerificationReport {
    /// No violations and no nonzero count on `Π₋`.
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.pi_minus_nonzero == 0
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(VerificationRow::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.csv_row());
            out.push('\n');
        }
        out
    }

    pub fn summary_json(&self) -> String {
        let rounded: f64 = sig6(self.max_ratio).parse().expect("numeric");
        let max_ratio = serde_json::Number::from_f64(rounded).map_or(serde_json::Value::Null, Into::into);
        canonical_json(&Summary {
            target: &self.target,
            coefficient: self.prediction.coefficient,
            valid_on: self.prediction.valid_on,
            bound: self.prediction.bound,
            branch: self.prediction.branch.map(|b| b.label()),
            assert_floor: self.assert_floor,
            primes: self.rows.len(),
            checked: self.checked,
            violations: self.violations,
            max_ratio,
            pi_plus: self.pi_plus,
            pi_minus: self.pi_minus,
            pi_minus_zero_confirmed: self
                .prediction
                .zero_on_pi_minus
                .then_some(self.pi_minus_nonzero == 0),
        })
    }
}

/// Sequential end-to-end verification over a prime range.
pub fn verify_range(target: Target, lo: u64, hi: u64, sampling: Sampling, cap: u64) -> Result<VerificationReport> {
    let v = Verifier::new(target)?;
    let primes = select_primes(lo, hi, sampling, cap)?;
    let rows = v.rows(&primes)?;
    Ok(v.report(rows))
}

/// True iff every run of `window` consecutive rows with `p > above` contains
/// both a zero count and a count of at least `c·p/2`. Needs at least one full
/// window.
pub fn oscillation_witnessed(rows: &[VerificationRow], coefficient: Rational, above: u64, window: usize) -> bool {
    let rows: Vec<&VerificationRow> = rows.iter().filter(|r| r.p > above).collect();
    if window == 0 || rows.len() < window {
        return false;
    }
    let zero: Vec<bool> = rows.iter().map(|r| r.count == 0).collect();
    let big: Vec<bool> = rows
        .iter()
        .map(|r| 2.0 * r.count as f64 >= coefficient.to_f64() * r.p as f64)
        .collect();
    let (mut zeros, mut bigs) = (0usize, 0usize);
    for i in 0..rows.len() {
        zeros += zero[i] as usize;
        bigs += big[i] as usize;
        if i >= window {
            zeros -= zero[i - window] as usize;
            bigs -= big[i - window] as usize;
        }
        if i + 1 >= window && (zeros == 0 || bigs == 0) {
            return false;
        }
    }
    true
}
