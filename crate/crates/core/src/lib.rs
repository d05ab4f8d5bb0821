//! Exact counting of quadratic residue and non-residue patterns inside
//! families of arithmetic progressions, together with the structural
//! parameters that govern their asymptotics.
//!
//! The crate is organised bottom-up:
//!
//! - [`arith`]: primes, the Legendre symbol, integer predicates.
//! - [`progressions`]: family specs, normalization, overlap diagrams, defects.
//! - [`structure`]: the interaction classes of a normalized family and the
//!   exponent `e` they produce, computed two independent ways.
//! - [`signatures`]: prime signatures and the `Π₊`/`Π₋` split.
//! - [`counting`]: brute-force counters, the ground truth for everything else.
//! - [`weil`]: character sums over products of linear factors.
//! - [`asymptotics`]: predicted leading terms, error bounds, range verification.
//! - [`fixtures`]: canned admissible families with known parameters.

pub mod arith;
pub mod asymptotics;
pub mod counting;
mod error;
pub mod fixtures;
pub mod format;
pub mod progressions;
pub mod rational;
pub mod signatures;
pub mod structure;
pub mod weil;

pub use arith::{chi, is_prime, is_square, primes_in_range, ResidueClassifier, DEFAULT_PRIME_CAP};
pub use asymptotics::{Prediction, Target, VerificationReport};
pub use counting::{CountMode, CountRecord};
pub use error::{Error, Result};
pub use progressions::{FamilySpec, NormalizedFamily, OverlapDiagram};
pub use rational::Rational;
pub use signatures::{PrimeClass, SignatureReport};
pub use structure::{Branch, StructureReport};

/// A residue character value restricted to the two nonzero signs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_value(v: i8) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn negate(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }

    /// Parses `+`, `-`, `+1`, `-1`, `1`.
    pub fn parse(s: &str) -> Option<Sign> {
        match s.trim() {
            "+" | "+1" | "1" => Some(Sign::Plus),
            "-" | "-1" => Some(Sign::Minus),
            _ => None,
        }
    }

    /// Parses a compact sign word such as `+-+` or a comma list `+1,-1,+1`.
    pub fn parse_vector(s: &str) -> Option<Vec<Sign>> {
        let s = s.trim();
        if s.is_empty() {
            return None;
        }
        if s.contains(',') {
            return s.split(',').map(Sign::parse).collect();
        }
        s.chars()
            .map(|c| match c {
                '+' => Some(Sign::Plus),
                '-' => Some(Sign::Minus),
                _ => None,
            })
            .collect()
    }

    pub fn format_vector(v: &[Sign]) -> String {
        v.iter().map(|s| s.as_char()).collect()
    }
}

impl serde::Serialize for Sign {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Sign::Plus => f.write_str("+1"),
            Sign::Minus => f.write_str("-1"),
        }
    }
}
