//! Families of arithmetic progressions, their normal form, and the overlap
//! diagrams used to count the points of a union of progressions.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A user-facing family description, as read from family-spec JSON.
///
/// - `shift`: all translates `n + Z`, `n >= 1`.
/// - `ap`: unions of `{a_j + b_j (n + i) : i in [0, s-1]}`.
/// - `normalized`: unions of `b_i n + S_i`, `n >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FamilySpec {
    Shift {
        #[serde(rename = "Z")]
        z: Vec<u64>,
    },
    Ap {
        a: Vec<u64>,
        b: Vec<u64>,
        s: u64,
    },
    Normalized {
        #[serde(rename = "B")]
        b: Vec<u64>,
        #[serde(rename = "S")]
        s: Vec<Vec<u64>>,
    },
}

impl FamilySpec {
    pub fn shift(z: Vec<u64>) -> Result<FamilySpec> {
        let spec = FamilySpec::Shift { z };
        spec.validate()?;
        Ok(spec)
    }

    pub fn ap(a: Vec<u64>, b: Vec<u64>, s: u64) -> Result<FamilySpec> {
        let spec = FamilySpec::Ap { a, b, s };
        spec.validate()?;
        Ok(spec)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            FamilySpec::Shift { .. } => "shift",
            FamilySpec::Ap { .. } => "ap",
            FamilySpec::Normalized { .. } => "normalized",
        }
    }

    /// Parses and validates a family-spec JSON document.
    pub fn from_json(text: &str) -> Result<FamilySpec> {
        let spec: FamilySpec = serde_json::from_str(text).map_err(|e| {
            // Tagged enums are buffered before field checks, so serde reports
            // no position for them; locate the offending key instead.
            let (line, column) = match e.line() {
                0 => locate_field(text, &e.to_string()).unwrap_or((0, 0)),
                l => (l, e.column()),
            };
            let msg = e.to_string();
            let msg = msg.split(" at line ").next().unwrap_or(&msg);
            Error::InvalidFamily(format!("line {line} column {column}: {msg}"))
        })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        crate::format::canonical_json(self)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FamilySpec::Shift { z } => {
                if z.is_empty() {
                    return Err(Error::InvalidFamily("field `Z`: must be nonempty".into()));
                }
                if z.iter().collect::<BTreeSet<_>>().len() != z.len() {
                    return Err(Error::InvalidFamily("field `Z`: elements must be distinct".into()));
                }
            }
            FamilySpec::Ap { a, b, s } => {
                if a.is_empty() || a.len() != b.len() {
                    return Err(Error::InvalidFamily(format!(
                        "fields `a`/`b`: need equal nonzero lengths, got {} and {}",
                        a.len(),
                        b.len()
                    )));
                }
                if *s == 0 {
                    return Err(Error::InvalidFamily("field `s`: must be >= 1".into()));
                }
                if b.contains(&0) {
                    return Err(Error::InvalidFamily("field `b`: entries must be positive".into()));
                }
                let pairs: BTreeSet<(u64, u64)> = a.iter().copied().zip(b.iter().copied()).collect();
                if pairs.len() != a.len() {
                    return Err(Error::InvalidFamily(
                        "fields `a`/`b`: pairs (a_i, b_i) must be distinct".into(),
                    ));
                }
            }
            FamilySpec::Normalized { b, s } => {
                NormalizedFamily::new(b.clone(), s.clone())?;
            }
        }
        Ok(())
    }

    /// The normalized form of an `ap` or `normalized` spec.
    pub fn to_normalized(&self) -> Result<NormalizedFamily> {
        match self {
            FamilySpec::Ap { a, b, s } => normalize(a, b, *s),
            FamilySpec::Normalized { b, s } => NormalizedFamily::new(b.clone(), s.clone()),
            FamilySpec::Shift { .. } => Err(Error::Domain(
                "shift families have no (B, S) normal form here; use the shift counters".into(),
            )),
        }
    }

    /// `Z` in increasing order, for shift specs.
    pub fn shift_set(&self) -> Option<Vec<u64>> {
        match self {
            FamilySpec::Shift { z } => {
                let mut z = z.clone();
                z.sort_unstable();
                Some(z)
            }
            _ => None,
        }
    }
}

/// 1-based position of the first `"name"` key quoted in a serde message.
fn locate_field(text: &str, msg: &str) -> Option<(usize, usize)> {
    let name = msg.split('`').nth(1)?;
    let offset = text.find(&format!("\"{name}\""))?;
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = offset - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    Some((line, column))
}

/// The family `{ ∪_i (b_i n + S_i) : n >= 1 }` with distinct `b_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedFamily {
    b: Vec<u64>,
    s: Vec<Vec<u64>>,
}

impl NormalizedFamily {
    /// Each `S_i` is sorted and deduplicated; `b` keeps the given order.
    pub fn new(b: Vec<u64>, s: Vec<Vec<u64>>) -> Result<NormalizedFamily> {
        if b.is_empty() {
            return Err(Error::InvalidFamily("field `B`: must be nonempty".into()));
        }
        if b.len() != s.len() {
            return Err(Error::InvalidFamily(format!(
                "fields `B`/`S`: lengths differ ({} vs {})",
                b.len(),
                s.len()
            )));
        }
        if b.contains(&0) {
            return Err(Error::InvalidFamily("field `B`: entries must be positive".into()));
        }
        if b.iter().collect::<BTreeSet<_>>().len() != b.len() {
            return Err(Error::InvalidFamily("field `B`: entries must be distinct".into()));
        }
        let mut sets = Vec::with_capacity(s.len());
        for (i, si) in s.into_iter().enumerate() {
            if si.is_empty() {
                return Err(Error::InvalidFamily(format!("field `S[{i}]`: must be nonempty")));
            }
            let set: BTreeSet<u64> = si.into_iter().collect();
            sets.push(set.into_iter().collect());
        }
        Ok(NormalizedFamily { b, s: sets })
    }

    pub fn k(&self) -> usize {
        self.b.len()
    }

    pub fn b(&self) -> &[u64] {
        &self.b
    }

    pub fn sets(&self) -> &[Vec<u64>] {
        &self.s
    }

    pub fn bmax(&self) -> u64 {
        *self.b.iter().max().expect("nonempty")
    }

    /// `Σ |S_i|`.
    pub fn alpha(&self) -> u64 {
        self.s.iter().map(|si| si.len() as u64).sum()
    }

    /// The member set for shift `n`.
    pub fn member(&self, n: u64) -> BTreeSet<u64> {
        self.b
            .iter()
            .zip(&self.s)
            .flat_map(|(&bi, si)| si.iter().map(move |&j| bi * n + j))
            .collect()
    }

    /// Largest `n` for which every row stays inside `[1, p-1]`, or `None`
    /// when not even `n = 1` fits.
    pub fn max_shift(&self, p: u64) -> Option<u64> {
        let mut r = u64::MAX;
        for (&bi, si) in self.b.iter().zip(&self.s) {
            let top = *si.last().expect("nonempty");
            if top + bi > p - 1 {
                return None;
            }
            r = r.min((p - 1 - top) / bi);
        }
        Some(r)
    }

    pub fn to_spec(&self) -> FamilySpec {
        FamilySpec::Normalized {
            b: self.b.clone(),
            s: self.s.clone(),
        }
    }
}

/// Groups an `ap` spec by equal `b` (first-appearance order) and expands each
/// group into `S_i = ∪_{a ∈ A_i} {a + b_i l : l in [0, s-1]}`.
pub fn normalize(a: &[u64], b: &[u64], s: u64) -> Result<NormalizedFamily> {
    FamilySpec::Ap {
        a: a.to_vec(),
        b: b.to_vec(),
        s,
    }
    .validate()?;
    let groups = group_by_b(a, b);
    let mut bs = Vec::with_capacity(groups.len());
    let mut sets = Vec::with_capacity(groups.len());
    for (bi, ai) in groups {
        let mut set = BTreeSet::new();
        for &aj in &ai {
            for l in 0..s {
                set.insert(aj + bi * l);
            }
        }
        bs.push(bi);
        sets.push(set.into_iter().collect());
    }
    NormalizedFamily::new(bs, sets)
}

/// `(b_i, A_i)` pairs in order of first appearance of each `b_i`.
pub(crate) fn group_by_b(a: &[u64], b: &[u64]) -> Vec<(u64, Vec<u64>)> {
    let mut groups: Vec<(u64, Vec<u64>)> = Vec::new();
    for (&aj, &bj) in a.iter().zip(b) {
        match groups.iter_mut().find(|(g, _)| *g == bj) {
            Some((_, v)) => v.push(aj),
            None => groups.push((bj, vec![aj])),
        }
    }
    groups
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GammaMode {
    Brute,
    ClosedForm,
}

/// `γ = |∪_j {i b_j : i in [0, s-1]}|`.
///
/// `ClosedForm` evaluates the inclusion-exclusion formula regrouped by the
/// minimum of each index set; it requires `k >= 2`, strictly increasing and
/// pairwise coprime `b`.
pub fn gamma(b: &[u64], s: u64, mode: GammaMode) -> Result<u64> {
    if b.is_empty() || s == 0 || b.contains(&0) {
        return Err(Error::Domain("gamma needs nonempty positive b and s >= 1".into()));
    }
    if b.iter().collect::<BTreeSet<_>>().len() != b.len() {
        return Err(Error::Domain("gamma needs distinct b".into()));
    }
    match mode {
        GammaMode::Brute => Ok(gamma_set(b, s).len() as u64),
        GammaMode::ClosedForm => gamma_closed_form(b, s),
    }
}

/// The set `∪_j {i b_j : i in [0, s-1]}` in increasing order.
pub fn gamma_set(b: &[u64], s: u64) -> Vec<u64> {
    let set: BTreeSet<u64> = b
        .iter()
        .flat_map(|&bj| (0..s).map(move |i| i * bj))
        .collect();
    set.into_iter().collect()
}

const GAMMA_MAX_K: usize = 24;

fn gamma_closed_form(b: &[u64], s: u64) -> Result<u64> {
    let k = b.len();
    if k < 2 {
        return Err(Error::Domain("closed form needs k >= 2".into()));
    }
    if k > GAMMA_MAX_K {
        return Err(Error::TooLarge(format!("closed form limited to k <= {GAMMA_MAX_K}")));
    }
    if b.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("closed form needs strictly increasing b".into()));
    }
    for i in 0..k {
        for j in i + 1..k {
            if b[i].gcd(&b[j]) != 1 {
                return Err(Error::Domain(format!(
                    "closed form needs pairwise coprime b; gcd({}, {}) > 1",
                    b[i], b[j]
                )));
            }
        }
    }
    // Indices below are 1-based to follow the regrouping over R(l, m):
    // subsets T of [2, k] with |T| = l - 1 and min T = m.
    let mut gamma: i128 = 1 + k as i128 * (s as i128 - 1);
    for l in 2..=k {
        let sign: i128 = if (l + 1) % 2 == 0 { 1 } else { -1 };
        let mut outer: i128 = 0;
        for m in 2..=(k - l + 2) {
            let mut inner: i128 = 0;
            // T = {m} ∪ (l - 2 indices from [m+1, k]).
            for rest in combinations((m + 1..=k).collect(), l - 2) {
                let mut prod = b[m - 1];
                for &i in &rest {
                    prod = prod.saturating_mul(b[i - 1]);
                }
                inner += ((s - 1) / prod) as i128;
            }
            outer += (m as i128 - 1) * inner;
        }
        gamma += sign * outer;
    }
    Ok(gamma as u64)
}

fn combinations(pool: Vec<usize>, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    fn rec(pool: &[usize], r: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..pool.len() {
            if pool.len() - i < r - cur.len() {
                break;
            }
            cur.push(pool[i]);
            rec(pool, r, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(&pool, r, 0, &mut cur, &mut out);
    out
}

/// Classes of indices whose values differ by a multiple of `modulus`, via
/// union-find. Singletons are included; classes come out sorted by value.
pub(crate) fn integer_difference_classes(values: &[u64], modulus: u64) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for j in i + 1..n {
            if values[i].abs_diff(values[j]).is_multiple_of(modulus) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        classes.entry(r).or_default().push(i);
    }
    let mut out: Vec<Vec<usize>> = classes.into_values().collect();
    for c in &mut out {
        c.sort_by_key(|&i| values[i]);
    }
    out.sort_by_key(|c| values[c[0]]);
    out
}

/// Defect and cardinality of `∪_j {a_j + b i : i in [0, s-1]}` from the gap
/// tuples of the integer-difference classes of `{a_j / b}`.
pub fn defect_and_cardinality(a: &[u64], b: u64, s: u64) -> Result<(u64, u64)> {
    if a.is_empty() {
        return Err(Error::Domain("a must be nonempty".into()));
    }
    if b == 0 || s == 0 {
        return Err(Error::Domain("b and s must be positive".into()));
    }
    if a.iter().collect::<BTreeSet<_>>().len() != a.len() {
        return Err(Error::Domain("a must have distinct elements".into()));
    }
    let mut defect = 0;
    for class in integer_difference_classes(a, b) {
        if class.len() < 2 {
            continue;
        }
        for w in class.windows(2) {
            let gap = (a[w[1]] - a[w[0]]) / b;
            if gap < s {
                defect += s - gap;
            }
        }
    }
    Ok((defect, s * a.len() as u64 - defect))
}

/// `α = Σ |S_i|`. With the originating `ap` spec, also checks
/// `α = m s - Σ Δ_i` using per-row defects.
pub fn alpha(f: &NormalizedFamily, origin: Option<&FamilySpec>) -> Result<u64> {
    let direct = f.alpha();
    if let Some(FamilySpec::Ap { a, b, s }) = origin {
        let mut via_defects = a.len() as u64 * s;
        for (bi, ai) in group_by_b(a, b) {
            let (defect, _) = defect_and_cardinality(&ai, bi, *s)?;
            via_defects -= defect;
        }
        if via_defects != direct {
            return Err(Error::Domain(format!(
                "alpha mismatch: direct {direct}, via defects {via_defects}"
            )));
        }
    }
    Ok(direct)
}

/// A block of overlapping rows: rows `first..=last` (1-based) and the gaps
/// between them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Block {
    pub first: usize,
    pub last: usize,
    pub gaps: Vec<u64>,
}

/// Rows of `s` unit-spaced points, row `i + 1` shifted `gaps[i]` to the right
/// of row `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OverlapDiagram {
    pub s: u64,
    pub gaps: Vec<u64>,
    pub blocks: Vec<Block>,
}

impl OverlapDiagram {
    pub fn rows(&self) -> usize {
        self.gaps.len() + 1
    }

    pub fn block_columns(&self, block: &Block) -> u64 {
        self.s + block.gaps.iter().sum::<u64>()
    }

    pub fn total_columns(&self) -> u64 {
        let lost: u64 = self
            .blocks
            .iter()
            .flat_map(|b| b.gaps.iter())
            .map(|&g| self.s - g)
            .sum();
        self.s * self.rows() as u64 - lost
    }

    /// Horizontal offset of each row's first point.
    pub fn row_offsets(&self) -> Vec<u64> {
        let mut offs = Vec::with_capacity(self.rows());
        let mut x = 0;
        offs.push(0);
        for &g in &self.gaps {
            x += g;
            offs.push(x);
        }
        offs
    }

    /// Columns that contain at least two points, as sets of 1-based rows.
    pub fn shared_columns(&self) -> Vec<Vec<usize>> {
        let offs = self.row_offsets();
        let mut cols: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
        for (r, &o) in offs.iter().enumerate() {
            for j in 0..self.s {
                cols.entry(o + j).or_default().push(r + 1);
            }
        }
        cols.into_values().filter(|c| c.len() >= 2).collect()
    }
}

/// Builds the diagram and splits it into blocks: maximal runs of gaps `<= s-1`.
pub fn overlap_diagram(gaps: &[u64], s: u64) -> Result<OverlapDiagram> {
    if s == 0 {
        return Err(Error::Domain("s must be >= 1".into()));
    }
    if gaps.contains(&0) {
        return Err(Error::Domain("gaps must be positive".into()));
    }
    let mut blocks = Vec::new();
    let mut i = 0;
    while i < gaps.len() {
        if gaps[i] < s {
            let start = i;
            while i < gaps.len() && gaps[i] < s {
                i += 1;
            }
            blocks.push(Block {
                first: start + 1,
                last: i + 1,
                gaps: gaps[start..i].to_vec(),
            });
        } else {
            i += 1;
        }
    }
    Ok(OverlapDiagram {
        s,
        gaps: gaps.to_vec(),
        blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn union_size(a: &[u64], b: u64, s: u64) -> u64 {
        a.iter()
            .flat_map(|&aj| (0..s).map(move |i| aj + b * i))
            .collect::<BTreeSet<_>>()
            .len() as u64
    }

    fn geometric_columns(gaps: &[u64], s: u64) -> u64 {
        let mut x = 0;
        let mut pts = BTreeSet::new();
        for r in 0..=gaps.len() {
            if r > 0 {
                x += gaps[r - 1];
            }
            for j in 0..s {
                pts.insert(x + j);
            }
        }
        pts.len() as u64
    }

    #[test]
    fn normalize_examples() {
        let f = normalize(&[0, 0], &[1, 2], 1).unwrap();
        assert_eq!(f.b(), &[1, 2]);
        assert_eq!(f.sets(), &[vec![0], vec![0]]);
        let f = normalize(&[0, 2], &[1, 1], 2).unwrap();
        assert_eq!(f.b(), &[1]);
        assert_eq!(f.sets(), &[vec![0, 1, 2, 3]]);
        let f = normalize(&[0, 1], &[2, 2], 2).unwrap();
        assert_eq!(f.b(), &[2]);
        assert_eq!(f.sets(), &[vec![0, 1, 2, 3]]);
    }

    #[test]
    fn normalize_rejects_bad_specs() {
        assert!(normalize(&[1, 1], &[2, 2], 3).is_err());
        assert!(normalize(&[1], &[0], 3).is_err());
        assert!(normalize(&[1], &[1], 0).is_err());
        assert!(normalize(&[], &[], 1).is_err());
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma(&[1], 5, GammaMode::Brute).unwrap(), 5);
        assert_eq!(gamma(&[1, 2], 3, GammaMode::Brute).unwrap(), 4);
        assert_eq!(gamma(&[1, 2], 3, GammaMode::ClosedForm).unwrap(), 4);
        assert_eq!(gamma(&[2, 3], 4, GammaMode::Brute).unwrap(), 6);
        assert_eq!(gamma(&[2, 3], 4, GammaMode::ClosedForm).unwrap(), 6);
    }

    #[test]
    fn gamma_closed_form_domain() {
        assert!(matches!(gamma(&[2, 4], 4, GammaMode::ClosedForm), Err(Error::Domain(_))));
        assert!(matches!(gamma(&[3, 2], 4, GammaMode::ClosedForm), Err(Error::Domain(_))));
        assert!(matches!(gamma(&[3], 4, GammaMode::ClosedForm), Err(Error::Domain(_))));
        assert_eq!(gamma(&[2, 4], 4, GammaMode::Brute).unwrap(), 6);
    }

    #[test]
    fn defect_examples() {
        assert_eq!(defect_and_cardinality(&[0], 3, 4).unwrap(), (0, 4));
        assert_eq!(defect_and_cardinality(&[0, 2], 1, 3).unwrap(), (1, 5));
        assert_eq!(defect_and_cardinality(&[0, 4], 2, 3).unwrap(), (1, 5));
        assert_eq!(defect_and_cardinality(&[0, 7], 1, 3).unwrap(), (0, 6));
        assert!(defect_and_cardinality(&[1, 1], 1, 3).is_err());
    }

    #[test]
    fn alpha_examples() {
        let spec = FamilySpec::ap(vec![0, 2], vec![1, 1], 2).unwrap();
        let f = spec.to_normalized().unwrap();
        assert_eq!(alpha(&f, Some(&spec)).unwrap(), 4);
        let spec = FamilySpec::ap(vec![0, 1], vec![1, 1], 2).unwrap();
        let f = spec.to_normalized().unwrap();
        assert_eq!(alpha(&f, Some(&spec)).unwrap(), 3);
        // Distinct b with no coincidences in a row: α = m s.
        let spec = FamilySpec::ap(vec![1, 6, 40], vec![1, 2, 3], 5).unwrap();
        let f = spec.to_normalized().unwrap();
        assert_eq!(alpha(&f, Some(&spec)).unwrap(), 15);
    }

    #[test]
    fn overlap_examples() {
        let d = overlap_diagram(&[3, 2, 2], 8).unwrap();
        assert_eq!(d.blocks.len(), 1);
        assert_eq!((d.blocks[0].first, d.blocks[0].last), (1, 4));
        assert_eq!(d.block_columns(&d.blocks[0]), 15);
        assert_eq!(d.total_columns(), 15);

        let d = overlap_diagram(&[8, 8], 8).unwrap();
        assert!(d.blocks.is_empty());
        assert_eq!(d.total_columns(), 24);

        let d = overlap_diagram(&[1, 5, 1], 3).unwrap();
        let supports: Vec<_> = d.blocks.iter().map(|b| (b.first, b.last)).collect();
        assert_eq!(supports, vec![(1, 2), (3, 4)]);

        let d = overlap_diagram(&[], 4).unwrap();
        assert_eq!(d.rows(), 1);
        assert!(d.blocks.is_empty());
        assert_eq!(d.total_columns(), 4);
    }

    #[test]
    fn spec_json_schema() {
        let s = FamilySpec::from_json(r#"{"kind":"ap","a":[0,0],"b":[1,2],"s":1}"#).unwrap();
        assert_eq!(s, FamilySpec::ap(vec![0, 0], vec![1, 2], 1).unwrap());
        let s = FamilySpec::from_json(r#"{"kind":"shift","Z":[0,2]}"#).unwrap();
        assert_eq!(s.shift_set(), Some(vec![0, 2]));
        let s = FamilySpec::from_json(r#"{"kind":"normalized","B":[1,2],"S":[[0],[1,0]]}"#).unwrap();
        assert_eq!(s.to_normalized().unwrap().sets(), &[vec![0], vec![0, 1]]);

        let err = FamilySpec::from_json(r#"{"kind":"ap","a":[0],"b":[1],"s":1,"Z":[1]}"#).unwrap_err();
        assert!(err.to_string().contains("unknown field"), "{err}");
        let err = FamilySpec::from_json("{\"kind\":\"ap\",\n  \"a\":[0],\"b\":[1],\"s\":1,\"sz\":2}").unwrap_err();
        assert!(err.to_string().contains("line 2 column 25"), "{err}");
        let err = FamilySpec::from_json("{\"kind\":\"ap\",\n\"a\":[0],\"b\":[1]}").unwrap_err();
        assert!(err.to_string().contains("line"), "{err}");
        assert!(FamilySpec::from_json(r#"{"kind":"shift","Z":[]}"#).is_err());
        assert!(FamilySpec::from_json(r#"{"kind":"normalized","B":[1,1],"S":[[0],[0]]}"#).is_err());

        let spec = FamilySpec::ap(vec![1, 6], vec![1, 2], 3).unwrap();
        assert_eq!(FamilySpec::from_json(&spec.to_json()).unwrap(), spec);
    }

    fn coprime_increasing() -> impl Strategy<Value = Vec<u64>> {
        proptest::collection::vec(1u64..=30, 2..=4).prop_filter_map("pairwise coprime", |mut v| {
            v.sort_unstable();
            v.dedup();
            if v.len() < 2 {
                return None;
            }
            for i in 0..v.len() {
                for j in i + 1..v.len() {
                    if v[i].gcd(&v[j]) != 1 {
                        return None;
                    }
                }
            }
            Some(v)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn defect_matches_direct_union(
            a in proptest::collection::btree_set(0u64..=100, 1..=6),
            b in 1u64..=100,
            s in 1u64..=12,
        ) {
            let a: Vec<u64> = a.into_iter().collect();
            let (defect, card) = defect_and_cardinality(&a, b, s).unwrap();
            prop_assert_eq!(card, union_size(&a, b, s));
            prop_assert_eq!(defect + card, s * a.len() as u64);
        }

        #[test]
        fn zero_defect_iff_no_short_gap(
            a in proptest::collection::btree_set(0u64..=60, 1..=6),
            b in 1u64..=6,
            s in 1u64..=8,
        ) {
            let a: Vec<u64> = a.into_iter().collect();
            let (defect, _) = defect_and_cardinality(&a, b, s).unwrap();
            let short_gap = integer_difference_classes(&a, b).iter().any(|c| {
                c.windows(2).any(|w| (a[w[1]] - a[w[0]]) / b < s)
            });
            prop_assert_eq!(defect == 0, !short_gap);
        }

        #[test]
        fn overlap_columns_match_geometry(
            gaps in proptest::collection::vec(1u64..=15, 0..=8),
            s in 1u64..=12,
        ) {
            let d = overlap_diagram(&gaps, s).unwrap();
            prop_assert_eq!(d.total_columns(), geometric_columns(&gaps, s));
            for blk in &d.blocks {
                prop_assert!(blk.gaps.iter().all(|&g| g < s));
                if blk.first > 1 { prop_assert!(gaps[blk.first - 2] >= s); }
                if blk.last <= gaps.len() { prop_assert!(gaps[blk.last - 1] >= s); }
            }
            for w in d.blocks.windows(2) {
                prop_assert!(w[0].last < w[1].first);
            }
        }

        #[test]
        fn normalize_preserves_membership(
            pairs in proptest::collection::btree_set((0u64..=20, 1u64..=5), 1..=5),
            s in 1u64..=6,
        ) {
            let (a, b): (Vec<u64>, Vec<u64>) = pairs.into_iter().unzip();
            let f = normalize(&a, &b, s).unwrap();
            for n in 1..=50u64 {
                let direct: BTreeSet<u64> = a.iter().zip(&b)
                    .flat_map(|(&aj, &bj)| (0..s).map(move |i| aj + bj * (n + i)))
                    .collect();
                prop_assert_eq!(f.member(n), direct);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn gamma_closed_form_matches_brute(b in coprime_increasing(), s in 1u64..=20) {
            prop_assert_eq!(
                gamma(&b, s, GammaMode::ClosedForm).unwrap(),
                gamma(&b, s, GammaMode::Brute).unwrap()
            );
        }

        #[test]
        fn alpha_identity_holds(
            pairs in proptest::collection::btree_set((0u64..=30, 1u64..=4), 1..=6),
            s in 1u64..=8,
        ) {
            let (a, b): (Vec<u64>, Vec<u64>) = pairs.into_iter().unzip();
            let spec = FamilySpec::ap(a, b, s).unwrap();
            let f = spec.to_normalized().unwrap();
            prop_assert!(alpha(&f, Some(&spec)).is_ok());
        }
    }
}
