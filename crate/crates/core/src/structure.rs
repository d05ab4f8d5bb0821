//! Interaction structure of a normalized family.
//!
//! Each row `i` contributes the rational set `b_i⁻¹ S_i`. A rational shared by
//! the rows in `K` (and by no other row) is an element of `T(K)`; the sets `K`
//! with `T(K)` nonempty form `𝒦_max`. The exponent
//! `e = Σ |T(K)| (|K| - 1)` and the even subsets `Λ` of those `K` decide which
//! branch of the asymptotic law applies.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::{BigInt, BigUint};
use serde::Serialize;

use crate::arith::is_square_big;
use crate::progressions::{overlap_diagram, FamilySpec, NormalizedFamily, OverlapDiagram};
use crate::rational::Rational;
use crate::{Error, Result};

/// Subsets of `[1, k]` are enumerated exhaustively; this bounds `2^k`.
pub const MAX_ROWS: usize = 16;

/// Cap on `|𝒯| = α` for the brute-force enumeration of `E`.
pub const MAX_E_POINTS: u64 = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Branch {
    /// `Λ` empty: `c ~ (b 2^α)⁻¹ p` on all primes.
    #[serde(rename = "thm61_i")]
    NoInteraction,
    /// Every `Λ` product is a square: `c ~ (b 2^(α-e))⁻¹ p` on all primes.
    #[serde(rename = "thm61_ii_b")]
    SquareProducts,
    /// Some `Λ` product is not a square: zero on `Π₋`, `(b 2^(α-e))⁻¹ p` on `Π₊`.
    #[serde(rename = "thm61_ii_c")]
    Oscillating,
}

impl Branch {
    pub fn label(self) -> &'static str {
        match self {
            Branch::NoInteraction => "thm61_i",
            Branch::SquareProducts => "thm61_ii_b",
            Branch::Oscillating => "thm61_ii_c",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KmaxEntry {
    /// 1-based row indices.
    #[serde(rename = "K")]
    pub rows: Vec<usize>,
    #[serde(rename = "T")]
    pub exclusive: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    #[serde(rename = "B")]
    pub b: Vec<u64>,
    pub kmax: Vec<KmaxEntry>,
    /// Even subsets of `𝒦_max` members, 1-based, sorted lexicographically.
    pub lambda: Vec<Vec<usize>>,
    pub alpha: u64,
    pub bmax: u64,
    pub e: u64,
    pub branch: Branch,
}

impl StructureReport {
    pub fn to_json(&self) -> String {
        crate::format::canonical_json(self)
    }

    /// `Π_{i ∈ I} b_i` for a 1-based index set.
    pub fn product(&self, set: &[usize]) -> BigUint {
        set.iter().map(|&i| BigUint::from(self.b[i - 1])).product()
    }

    /// `α - e`, the exponent of `1/2` in the leading coefficient.
    pub fn exponent(&self) -> u64 {
        self.alpha - self.e
    }
}

fn row_rationals(f: &NormalizedFamily) -> Vec<BTreeSet<Rational>> {
    f.b()
        .iter()
        .zip(f.sets())
        .map(|(&bi, si)| {
            si.iter()
                .map(|&j| Rational::new(j as i128, bi as i128))
                .collect()
        })
        .collect()
}

/// Computes `𝒦_max`, `T(K)`, `Λ`, `α`, `b`, `e` and the branch.
pub fn analyze(f: &NormalizedFamily) -> Result<StructureReport> {
    let k = f.k();
    if k > MAX_ROWS {
        return Err(Error::TooLarge(format!("k = {k} exceeds {MAX_ROWS} rows")));
    }
    let rows = row_rationals(f);

    let mut kmax = Vec::new();
    for mask in 1u32..(1 << k) {
        let members: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
        // S(K): intersection, starting from the smallest member row.
        let start = *members
            .iter()
            .min_by_key(|&&i| rows[i].len())
            .expect("nonempty mask");
        let mut common: Vec<Rational> = rows[start]
            .iter()
            .filter(|t| members.iter().all(|&i| rows[i].contains(t)))
            .copied()
            .collect();
        if common.is_empty() {
            continue;
        }
        // T(K): drop anything also present in a row outside K.
        common.retain(|t| (0..k).filter(|i| mask >> i & 1 == 0).all(|i| !rows[i].contains(t)));
        if !common.is_empty() {
            kmax.push(KmaxEntry {
                rows: members.iter().map(|i| i + 1).collect(),
                exclusive: common,
            });
        }
    }
    kmax.sort_by(|x, y| x.rows.cmp(&y.rows));

    let e = kmax
        .iter()
        .map(|entry| entry.exclusive.len() as u64 * (entry.rows.len() as u64 - 1))
        .sum();

    let mut lambda = BTreeSet::new();
    for entry in &kmax {
        lambda.extend(even_subsets(&entry.rows));
    }
    let lambda: Vec<Vec<usize>> = lambda.into_iter().collect();

    let mut report = StructureReport {
        b: f.b().to_vec(),
        kmax,
        lambda,
        alpha: f.alpha(),
        bmax: f.bmax(),
        e,
        branch: Branch::NoInteraction,
    };
    report.branch = classify_branch(&report);
    Ok(report)
}

fn classify_branch(r: &StructureReport) -> Branch {
    if r.lambda.is_empty() {
        Branch::NoInteraction
    } else if r.lambda.iter().all(|set| is_square_big(&r.product(set))) {
        Branch::SquareProducts
    } else {
        Branch::Oscillating
    }
}

/// Nonempty subsets of even size, each sorted ascending.
pub fn even_subsets(items: &[usize]) -> Vec<Vec<usize>> {
    let n = items.len();
    assert!(n < 32, "even_subsets on {n} items");
    (1u32..(1 << n))
        .filter(|m| m.count_ones() % 2 == 0)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).map(|i| items[i]).collect())
        .collect()
}

/// A point `(i, j)` of `𝒯`: 1-based row and an element of `S_i`.
pub type TPoint = (usize, u64);

/// All nonempty `T ⊆ 𝒯` in which each distinct rational `j / b_i` occurs an
/// even number of times. Exhaustive over `2^α` subsets.
pub fn enumerate_e(f: &NormalizedFamily) -> Result<Vec<Vec<TPoint>>> {
    let alpha = f.alpha();
    if alpha > MAX_E_POINTS {
        return Err(Error::TooLarge(format!(
            "|T| = {alpha} exceeds the enumeration cap {MAX_E_POINTS}"
        )));
    }
    let mut points = Vec::new();
    let mut class_of = Vec::new();
    let mut classes: BTreeMap<Rational, usize> = BTreeMap::new();
    for (i, (&bi, si)) in f.b().iter().zip(f.sets()).enumerate() {
        for &j in si {
            let value = Rational::new(j as i128, bi as i128);
            let next = classes.len();
            let id = *classes.entry(value).or_insert(next);
            points.push((i + 1, j));
            class_of.push(id);
        }
    }
    let n = points.len();
    let mut out = Vec::new();
    for mask in 1u32..(1u32 << n) {
        let mut parity = 0u32;
        for (p, &c) in class_of.iter().enumerate() {
            if mask >> p & 1 == 1 {
                parity ^= 1 << c;
            }
        }
        if parity == 0 {
            out.push((0..n).filter(|p| mask >> p & 1 == 1).map(|p| points[p]).collect());
        }
    }
    Ok(out)
}

/// An overlap diagram whose rows are labelled by 1-based family indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LabeledDiagram {
    /// Row `r` of the diagram is family index `labels[r]`.
    pub labels: Vec<usize>,
    /// The integer quotient `(a_v b_u - a_u b_v) / (b_u b_v)` for each
    /// consecutive pair of rows; these are the diagram's gaps.
    pub quotients: Vec<i128>,
    pub diagram: OverlapDiagram,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientDiagram {
    pub diagrams: Vec<LabeledDiagram>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientAnalysis {
    pub diagram: QuotientDiagram,
    pub e: u64,
    pub lambda: Vec<Vec<usize>>,
}

/// Checks distinct `b` and `a_i b_j != a_j b_i` for `i != j`.
pub fn check_admissible(a: &[u64], b: &[u64]) -> Result<()> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::NotAdmissible("a and b must have equal nonzero length".into()));
    }
    let k = a.len();
    for i in 0..k {
        if b[i] == 0 {
            return Err(Error::NotAdmissible("b entries must be positive".into()));
        }
        for j in i + 1..k {
            if b[i] == b[j] {
                return Err(Error::NotAdmissible(format!("b_{} = b_{} = {}", i + 1, j + 1, b[i])));
            }
            if a[i] as u128 * b[j] as u128 == a[j] as u128 * b[i] as u128 {
                return Err(Error::NotAdmissible(format!(
                    "a_{i1} b_{j1} = a_{j1} b_{i1}",
                    i1 = i + 1,
                    j1 = j + 1
                )));
            }
        }
    }
    Ok(())
}

/// Computes `e` from the gaps between the quotients `a_i / b_i` and `Λ` from the
/// columns of the quotient diagram.
pub fn quotient_diagram_e(spec: &FamilySpec) -> Result<QuotientAnalysis> {
    let FamilySpec::Ap { a, b, s } = spec else {
        return Err(Error::NotAdmissible(format!("expected an ap spec, got {}", spec.kind())));
    };
    let s = *s;
    check_admissible(a, b)?;
    let k = a.len();
    let q: Vec<Rational> = (0..k)
        .map(|i| Rational::new(a[i] as i128, b[i] as i128))
        .collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by_key(|&i| q[i]);

    // Maximal sets with pairwise integer differences: equal fractional parts.
    let mut by_fraction: BTreeMap<Rational, Vec<usize>> = BTreeMap::new();
    for &i in &order {
        let frac = Rational::new(q[i].numer().rem_euclid(q[i].denom()), q[i].denom());
        by_fraction.entry(frac).or_default().push(i);
    }

    let mut e = 0u64;
    let mut diagrams = Vec::new();
    for class in by_fraction.values().filter(|c| c.len() >= 2) {
        let quotients: Vec<i128> = class
            .windows(2)
            .map(|w| integer_quotient(a, b, w[0], w[1]))
            .collect::<Result<_>>()?;
        for &g in &quotients {
            if (g as u64) < s {
                e += s - g as u64;
            }
        }
        // Split into maximal runs of gaps <= s-1; each run is one block.
        let mut start = 0;
        while start < quotients.len() {
            if (quotients[start] as u64) >= s {
                start += 1;
                continue;
            }
            let mut end = start;
            while end < quotients.len() && (quotients[end] as u64) < s {
                end += 1;
            }
            let gaps: Vec<u64> = quotients[start..end].iter().map(|&g| g as u64).collect();
            diagrams.push(LabeledDiagram {
                labels: class[start..=end].iter().map(|&i| i + 1).collect(),
                quotients: quotients[start..end].to_vec(),
                diagram: overlap_diagram(&gaps, s)?,
            });
            start = end;
        }
    }

    let mut lambda = BTreeSet::new();
    for d in &diagrams {
        for column in d.diagram.shared_columns() {
            let mut rows: Vec<usize> = column.iter().map(|&r| d.labels[r - 1]).collect();
            rows.sort_unstable();
            lambda.extend(even_subsets(&rows));
        }
    }

    Ok(QuotientAnalysis {
        diagram: QuotientDiagram { diagrams },
        e,
        lambda: lambda.into_iter().collect(),
    })
}

/// `(a_v b_u - a_u b_v) / (b_u b_v)` where the division must be exact and the
/// result positive (`q_u < q_v` in the same integer-difference class).
fn integer_quotient(a: &[u64], b: &[u64], u: usize, v: usize) -> Result<i128> {
    let num = BigInt::from(a[v]) * BigInt::from(b[u]) - BigInt::from(a[u]) * BigInt::from(b[v]);
    let den = BigInt::from(b[u]) * BigInt::from(b[v]);
    let (quot, rem) = (&num / &den, &num % &den);
    if rem != BigInt::from(0) || quot <= BigInt::from(0) {
        return Err(Error::Domain(format!(
            "rows {} and {} do not differ by a positive integer",
            u + 1,
            v + 1
        )));
    }
    i128::try_from(quot).map_err(|_| Error::Overflow("computing a quotient gap".into()))
}

/// Builds `a_{i+1} = t_i (a_i + d_i b_i)`, `b_{i+1} = t_i b_i`.
///
/// Consecutive quotients then satisfy `a_{i+1}/b_{i+1} - a_i/b_i = d_i`, so the
/// quotient diagram has gap sequence `d`.
pub fn generate_admissible(d: &[u64], a1: u64, b1: u64, t: &[u64], s: u64) -> Result<FamilySpec> {
    if d.is_empty() {
        return Err(Error::Domain("need k >= 2, i.e. at least one gap d".into()));
    }
    if d.len() != t.len() {
        return Err(Error::Domain(format!(
            "d has {} entries but t has {}",
            d.len(),
            t.len()
        )));
    }
    if d.contains(&0) {
        return Err(Error::Domain("gaps d_i must be positive".into()));
    }
    if t.iter().any(|&x| x < 2) {
        return Err(Error::Domain("multipliers t_i must be >= 2".into()));
    }
    if b1 == 0 || s == 0 {
        return Err(Error::Domain("b1 and s must be positive".into()));
    }
    let overflow = || Error::Overflow("generating an admissible tuple".into());
    let mut a = vec![a1];
    let mut b = vec![b1];
    for i in 0..d.len() {
        let (ai, bi) = (a[i] as u128, b[i] as u128);
        let next_a = d[i] as u128 * bi;
        let next_a = next_a.checked_add(ai).and_then(|x| x.checked_mul(t[i] as u128));
        let next_b = bi.checked_mul(t[i] as u128);
        let (next_a, next_b) = (next_a.ok_or_else(overflow)?, next_b.ok_or_else(overflow)?);
        a.push(u64::try_from(next_a).map_err(|_| overflow())?);
        b.push(u64::try_from(next_b).map_err(|_| overflow())?);
    }
    if !generator_identity_holds(&a, &b, d) {
        return Err(Error::Domain("generated tuple failed the gap identity".into()));
    }
    let spec = FamilySpec::Ap { a, b, s };
    spec.validate()?;
    let FamilySpec::Ap { a, b, .. } = &spec else { unreachable!() };
    check_admissible(a, b)?;
    Ok(spec)
}

/// `a_i b_j - a_j b_i = (Σ_{r=j}^{i-1} d_r) b_i b_j` for all `i > j`.
pub fn generator_identity_holds(a: &[u64], b: &[u64], d: &[u64]) -> bool {
    let k = a.len();
    if b.len() != k || d.len() + 1 != k {
        return false;
    }
    for i in 0..k {
        for j in 0..i {
            let lhs = BigInt::from(a[i]) * BigInt::from(b[j]) - BigInt::from(a[j]) * BigInt::from(b[i]);
            let gap: u128 = d[j..i].iter().map(|&x| x as u128).sum();
            let rhs = BigInt::from(gap) * BigInt::from(b[i]) * BigInt::from(b[j]);
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}
