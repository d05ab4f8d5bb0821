//! Admissible families with known overlap structure.
//!
//! Each fixture fixes a gap sequence `d` for the quotients `a_i / b_i` and
//! builds `(a, b)` with [`generate_admissible`], starting from `a_1 = b_1 = 1`.
//! Prime multipliers `t = 2, 3, 5, ...` give a non-square `b_1 b_2` and so the
//! oscillating branch; `t = 4` throughout makes every `Λ` product a square.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::asymptotics::{predict, Target};
use crate::progressions::FamilySpec;
use crate::rational::Rational;
use crate::structure::{generate_admissible, Branch};
use crate::{Error, Result, Sign};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FixtureName {
    K2,
    K3I,
    K3Ii,
    K3Iii,
    Minimal,
    Maximal,
    SquaresVariant,
    PrimesVariant,
}

impl FixtureName {
    pub const ALL: [FixtureName; 8] = [
        FixtureName::K2,
        FixtureName::K3I,
        FixtureName::K3Ii,
        FixtureName::K3Iii,
        FixtureName::Minimal,
        FixtureName::Maximal,
        FixtureName::SquaresVariant,
        FixtureName::PrimesVariant,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FixtureName::K2 => "k2",
            FixtureName::K3I => "k3_i",
            FixtureName::K3Ii => "k3_ii",
            FixtureName::K3Iii => "k3_iii",
            FixtureName::Minimal => "minimal",
            FixtureName::Maximal => "maximal",
            FixtureName::SquaresVariant => "squares_variant",
            FixtureName::PrimesVariant => "primes_variant",
        }
    }
}

impl fmt::Display for FixtureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FixtureName {
    type Err = Error;

    fn from_str(s: &str) -> Result<FixtureName> {
        FixtureName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::Domain(format!("unknown fixture `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Multipliers {
    /// `t_i` = the `i`-th prime.
    #[default]
    Primes,
    /// `t_i = 4`.
    Squares,
}

impl FromStr for Multipliers {
    type Err = Error;

    fn from_str(s: &str) -> Result<Multipliers> {
        match s {
            "primes" => Ok(Multipliers::Primes),
            "squares" => Ok(Multipliers::Squares),
            _ => Err(Error::Domain(format!("unknown multiplier kind `{s}`"))),
        }
    }
}

/// Case parameters. Which ones are required depends on the fixture:
/// `k2`, `k3_i` and the variants take `s, q`; `k3_ii`, `k3_iii` take
/// `s, q, r`; `minimal` takes `k, s`; `maximal` takes `k` (and `s = k`).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FixtureParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
    pub multipliers: Multipliers,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Expected {
    pub alpha: u64,
    pub e: u64,
    pub branch: Branch,
    /// `α - e`.
    pub exponent: u64,
    pub coefficient: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fixture {
    pub name: FixtureName,
    pub params: FixtureParams,
    pub spec: FamilySpec,
    pub expected: Expected,
}

impl Fixture {
    pub fn to_json(&self) -> String {
        crate::format::canonical_json(self)
    }

    /// A file name stem such as `k3_ii_s3_q1_r2_primes`.
    pub fn file_stem(&self) -> String {
        let mut stem = self.name.to_string();
        let p = &self.params;
        for (key, value) in [("k", p.k), ("s", p.s), ("q", p.q), ("r", p.r)] {
            if let Some(v) = value {
                stem.push_str(&format!("_{key}{v}"));
            }
        }
        stem.push_str(match p.multipliers {
            Multipliers::Primes => "_primes",
            Multipliers::Squares => "_squares",
        });
        stem
    }
}

fn first_primes(n: usize) -> Vec<u64> {
    (2u64..).filter(|&x| crate::arith::is_prime(x)).take(n).collect()
}

fn need(v: Option<u64>, name: &str, fixture: FixtureName) -> Result<u64> {
    v.ok_or_else(|| Error::Domain(format!("fixture {fixture} needs parameter {name}")))
}

fn check_overlap(g: u64, s: u64, name: &str) -> Result<()> {
    if g == 0 || g > s.saturating_sub(1) {
        return Err(Error::Domain(format!(
            "{name} = {g} must lie in [1, s-1] = [1, {}]",
            s.saturating_sub(1)
        )));
    }
    Ok(())
}

/// Builds the named fixture.
pub fn fixture(name: FixtureName, params: &FixtureParams) -> Result<Fixture> {
    let mut params = params.clone();
    let (s, d, exponent) = match name {
        FixtureName::K2 | FixtureName::SquaresVariant | FixtureName::PrimesVariant => {
            let s = need(params.s, "s", name)?;
            let q = need(params.q, "q", name)?;
            check_overlap(q, s, "q")?;
            (s, vec![q], s + q)
        }
        FixtureName::K3I => {
            let s = need(params.s, "s", name)?;
            let q = need(params.q, "q", name)?;
            check_overlap(q, s, "q")?;
            // A gap of s keeps row 3 clear of rows 1 and 2.
            (s, vec![q, s], 2 * s + q)
        }
        FixtureName::K3Ii | FixtureName::K3Iii => {
            let s = need(params.s, "s", name)?;
            let q = need(params.q, "q", name)?;
            let r = need(params.r, "r", name)?;
            check_overlap(q, s, "q")?;
            check_overlap(r, s, "r")?;
            if name == FixtureName::K3Ii && q + r < s {
                return Err(Error::Domain(format!("k3_ii needs q + r >= s, got {q} + {r} < {s}")));
            }
            if name == FixtureName::K3Iii && q + r >= s {
                return Err(Error::Domain(format!("k3_iii needs q + r < s, got {q} + {r} >= {s}")));
            }
            (s, vec![q, r], s + q + r)
        }
        FixtureName::Minimal => {
            let k = need(params.k, "k", name)?;
            let s = need(params.s, "s", name)?;
            if k < 2 || s < 2 {
                return Err(Error::Domain("minimal overlap needs k >= 2 and s >= 2".into()));
            }
            (s, vec![s - 1; (k - 1) as usize], 1 + k * (s - 1))
        }
        FixtureName::Maximal => {
            let k = need(params.k, "k", name)?;
            if k < 3 {
                return Err(Error::Domain("maximal overlap needs k >= 3".into()));
            }
            if let Some(s) = params.s {
                if s != k {
                    return Err(Error::Domain(format!("maximal overlap has s = k, got s = {s}, k = {k}")));
                }
            }
            params.s = Some(k);
            (k, vec![1; (k - 1) as usize], 2 * k - 1)
        }
    };
    params.multipliers = match name {
        FixtureName::SquaresVariant => Multipliers::Squares,
        FixtureName::PrimesVariant => Multipliers::Primes,
        _ => params.multipliers,
    };
    let t = match params.multipliers {
        Multipliers::Primes => first_primes(d.len()),
        Multipliers::Squares => vec![4; d.len()],
    };
    let spec = generate_admissible(&d, 1, 1, &t, s)?;
    let FamilySpec::Ap { a, .. } = &spec else { unreachable!("generator returns ap specs") };
    let alpha = a.len() as u64 * s;
    let e = alpha - exponent;
    let branch = match params.multipliers {
        Multipliers::Primes => Branch::Oscillating,
        Multipliers::Squares => Branch::SquareProducts,
    };
    let prediction = predict(&Target::ConstantSign { family: spec.clone(), eps: Sign::Plus })?;
    Ok(Fixture {
        name,
        params,
        spec,
        expected: Expected {
            alpha,
            e,
            branch,
            exponent,
            coefficient: prediction.coefficient,
        },
    })
}

/// The shipped fixtures with small parameters.
pub fn shipped() -> Vec<Fixture> {
    let p = |s, q, r, k| FixtureParams {
        s,
        q,
        r,
        k,
        multipliers: Multipliers::Primes,
    };
    let cases = [
        (FixtureName::K2, p(Some(3), Some(1), None, None)),
        (FixtureName::K2, p(Some(4), Some(2), None, None)),
        (FixtureName::K3I, p(Some(3), Some(2), None, None)),
        (FixtureName::K3Ii, p(Some(3), Some(1), Some(2), None)),
        (FixtureName::K3Ii, p(Some(4), Some(2), Some(3), None)),
        (FixtureName::K3Iii, p(Some(4), Some(1), Some(2), None)),
        (FixtureName::Minimal, p(Some(3), None, None, Some(4))),
        (FixtureName::Maximal, p(None, None, None, Some(3))),
        (FixtureName::Maximal, p(None, None, None, Some(4))),
        (FixtureName::SquaresVariant, p(Some(3), Some(1), None, None)),
        (FixtureName::PrimesVariant, p(Some(3), Some(2), None, None)),
    ];
    cases
        .into_iter()
        .map(|(name, params)| fixture(name, &params).expect("shipped fixture parameters are consistent"))
        .collect()
}
