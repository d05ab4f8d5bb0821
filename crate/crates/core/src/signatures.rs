//! Prime signatures: the values `χ_p(Π_{i ∈ I} b_i)` over `I ∈ Λ`, and the
//! resulting split of allowable primes into `Π₊` and `Π₋`.

use serde::Serialize;

use crate::arith::{odd_primes_in_range, ResidueClassifier, DEFAULT_PRIME_CAP};
use crate::structure::StructureReport;
use crate::{Error, Result, Sign};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PrimeClass {
    Positive,
    NonPositive,
    NotAllowable,
}

impl PrimeClass {
    pub fn label(self) -> &'static str {
        match self {
            PrimeClass::Positive => "pi_plus",
            PrimeClass::NonPositive => "pi_minus",
            PrimeClass::NotAllowable => "not_allowable",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SignatureReport {
    pub p: u64,
    pub allowable: bool,
    /// One value per element of `Λ`, in the report's `Λ` order. Empty when
    /// the prime is not allowable.
    pub values: Vec<i8>,
    pub class: PrimeClass,
}

/// The `(B, S)`-signature of `p`, or the `(B, S, η)`-signature when `eta` is
/// given (value for `I` is `Π_{i ∈ I} η(i) χ_p(b_i)`).
pub fn signature(p: u64, report: &StructureReport, eta: Option<&[Sign]>) -> Result<SignatureReport> {
    if report.lambda.is_empty() {
        return Err(Error::NoSignature);
    }
    if let Some(eta) = eta {
        if eta.len() != report.b.len() {
            return Err(Error::Domain(format!(
                "eta has {} signs, family has {} rows",
                eta.len(),
                report.b.len()
            )));
        }
    }
    let c = ResidueClassifier::new(p)?;
    signature_with(&c, report, eta)
}

/// As [`signature`], reusing an existing classifier.
pub fn signature_with(
    c: &ResidueClassifier,
    report: &StructureReport,
    eta: Option<&[Sign]>,
) -> Result<SignatureReport> {
    if report.lambda.is_empty() {
        return Err(Error::NoSignature);
    }
    let p = c.p();
    if report.b.iter().any(|&bi| bi % p == 0) {
        return Ok(SignatureReport {
            p,
            allowable: false,
            values: Vec::new(),
            class: PrimeClass::NotAllowable,
        });
    }
    let row_chi: Vec<i8> = report
        .b
        .iter()
        .enumerate()
        .map(|(i, &bi)| {
            let x = c.chi(bi as i128);
            match eta {
                Some(eta) => x * eta[i].value(),
                None => x,
            }
        })
        .collect();
    // χ_p is completely multiplicative, so the product's symbol is the
    // product of the symbols.
    let values: Vec<i8> = report
        .lambda
        .iter()
        .map(|set| set.iter().map(|&i| row_chi[i - 1]).product())
        .collect();
    let class = if values.iter().all(|&v| v == 1) {
        PrimeClass::Positive
    } else {
        PrimeClass::NonPositive
    };
    Ok(SignatureReport {
        p,
        allowable: true,
        values,
        class,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PrimeSplit {
    pub pi_plus: Vec<u64>,
    pub pi_minus: Vec<u64>,
    pub skipped: Vec<u64>,
}

/// Splits the odd primes of `[lo, hi]` by signature class.
pub fn classify_primes(report: &StructureReport, lo: u64, hi: u64) -> Result<PrimeSplit> {
    if report.lambda.is_empty() {
        return Err(Error::NoSignature);
    }
    let mut split = PrimeSplit::default();
    for p in odd_primes_in_range(lo, hi, DEFAULT_PRIME_CAP)? {
        match classify_prime(report, p) {
            PrimeClass::Positive => split.pi_plus.push(p),
            PrimeClass::NonPositive => split.pi_minus.push(p),
            PrimeClass::NotAllowable => split.skipped.push(p),
        }
    }
    Ok(split)
}

/// Class of a single odd prime without building a residue table. Families
/// with empty `Λ` put every allowable prime in `Π₊`.
pub fn classify_prime(report: &StructureReport, p: u64) -> PrimeClass {
    if report.b.iter().any(|&bi| bi % p == 0) {
        return PrimeClass::NotAllowable;
    }
    let row_chi: Vec<i8> = report.b.iter().map(|&bi| crate::arith::chi(p, bi as i128)).collect();
    let positive = report
        .lambda
        .iter()
        .all(|set| set.iter().map(|&i| row_chi[i - 1]).product::<i8>() == 1);
    if positive {
        PrimeClass::Positive
    } else {
        PrimeClass::NonPositive
    }
}
