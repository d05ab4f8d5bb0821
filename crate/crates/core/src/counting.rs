//! Exact brute-force counters. Every asymptotic claim in this crate is
//! checked against these.
//!
//! Shift and normalized families start at shift `n = 1`; raw `AP(a, b; s)`
//! progressions start at `n = 0`.

use std::fmt;

use serde::Serialize;

use crate::arith::{odd_primes_in_range, ResidueClassifier};
use crate::progressions::NormalizedFamily;
use crate::{Error, Result, Sign};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Residue,
    Nonresidue,
}

impl Side {
    pub fn sign(self) -> Sign {
        match self {
            Side::Residue => Sign::Plus,
            Side::Nonresidue => Sign::Minus,
        }
    }

    pub fn parse(s: &str) -> Option<Side> {
        match s {
            "residue" | "plus" | "+" | "+1" => Some(Side::Residue),
            "nonresidue" | "minus" | "-" | "-1" => Some(Side::Nonresidue),
            _ => None,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Residue => "residue",
            Side::Nonresidue => "nonresidue",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum CountMode {
    ConstantSign(Sign),
    Pattern(Vec<Sign>),
    Support(Side),
    Eta(Vec<Sign>),
}

impl CountMode {
    pub fn label(&self) -> &'static str {
        match self {
            CountMode::ConstantSign(_) => "constant_sign",
            CountMode::Pattern(_) => "pattern",
            CountMode::Support(_) => "support",
            CountMode::Eta(_) => "eta",
        }
    }

    /// The `eps_or_eta` CSV column.
    pub fn argument(&self) -> String {
        match self {
            CountMode::ConstantSign(s) => s.to_string(),
            CountMode::Pattern(v) | CountMode::Eta(v) => Sign::format_vector(v),
            CountMode::Support(side) => side.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountRecord {
    pub p: u64,
    pub mode: CountMode,
    pub count: u64,
}

impl CountRecord {
    pub const CSV_HEADER: &'static str = "p,mode,eps_or_eta,count";

    pub fn csv_row(&self) -> String {
        format!("{},{},{},{}", self.p, self.mode.label(), self.mode.argument(), self.count)
    }
}

/// Counts shifts `n` in `[1, r(p)]` whose member set satisfies `accept`, where
/// `r(p)` is the largest shift keeping every row inside `[1, p-1]`.
///
/// The largest element `max_i (b_i n + max S_i)` is strictly increasing in `n`,
/// so distinct shifts give distinct member sets and this is also the number of
/// distinct sets.
fn count_shifts(
    c: &ResidueClassifier,
    f: &NormalizedFamily,
    mut accept: impl FnMut(usize, i8) -> bool,
) -> u64 {
    let p = c.p();
    let Some(r) = f.max_shift(p) else { return 0 };
    let rows: Vec<(u64, &[u64])> = f.b().iter().copied().zip(f.sets().iter().map(|s| s.as_slice())).collect();
    let mut count = 0;
    'shift: for n in 1..=r {
        for (i, &(bi, si)) in rows.iter().enumerate() {
            let base = bi * n;
            for &j in si {
                if !accept(i, c.chi_reduced(base + j)) {
                    continue 'shift;
                }
            }
        }
        count += 1;
    }
    count
}

/// Number of member sets inside `[1, p-1]` consisting only of residues
/// (`eps = +1`) or only of non-residues (`eps = -1`).
pub fn count_constant_sign(c: &ResidueClassifier, f: &NormalizedFamily, eps: Sign) -> CountRecord {
    let want = eps.value();
    CountRecord {
        p: c.p(),
        mode: CountMode::ConstantSign(eps),
        count: count_shifts(c, f, |_, x| x == want),
    }
}

/// Member sets with `χ_p(b_i n + j) = η(i)` for every row `i`.
pub fn count_eta(c: &ResidueClassifier, f: &NormalizedFamily, eta: &[Sign]) -> Result<CountRecord> {
    if eta.len() != f.k() {
        return Err(Error::Domain(format!("eta has {} signs, family has {} rows", eta.len(), f.k())));
    }
    let want: Vec<i8> = eta.iter().map(|s| s.value()).collect();
    Ok(CountRecord {
        p: c.p(),
        mode: CountMode::Eta(eta.to_vec()),
        count: count_shifts(c, f, |i, x| x == want[i]),
    })
}

fn check_shift_set(z: &[u64]) -> Result<()> {
    if z.is_empty() {
        return Err(Error::InvalidFamily("Z must be nonempty".into()));
    }
    if z.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidFamily("Z must be strictly increasing".into()));
    }
    Ok(())
}

/// Shifts `n >= 1` with `n + Z ⊆ [1, p-1]` and `χ_p(n + z_i) = eps(i)`;
/// `z` must be strictly increasing.
pub fn count_pattern(c: &ResidueClassifier, z: &[u64], eps: &[Sign]) -> Result<CountRecord> {
    check_shift_set(z)?;
    if eps.len() != z.len() {
        return Err(Error::Domain(format!("pattern has {} signs, Z has {} elements", eps.len(), z.len())));
    }
    let p = c.p();
    let top = *z.last().expect("nonempty");
    let mut count = 0;
    if top < p - 1 {
        'shift: for n in 1..=(p - 1 - top) {
            for (zi, e) in z.iter().zip(eps) {
                if c.chi_reduced(n + zi) != e.value() {
                    continue 'shift;
                }
            }
            count += 1;
        }
    }
    Ok(CountRecord {
        p,
        mode: CountMode::Pattern(eps.to_vec()),
        count,
    })
}

/// Counts of every sign pattern on `n + Z` at once. Entry `m` is the count for
/// the pattern whose `i`-th sign is `+1` iff bit `i` of `m` is set.
pub fn pattern_histogram(c: &ResidueClassifier, z: &[u64]) -> Result<Vec<u64>> {
    check_shift_set(z)?;
    if z.len() > 20 {
        return Err(Error::TooLarge("pattern histogram limited to |Z| <= 20".into()));
    }
    let p = c.p();
    let top = *z.last().expect("nonempty");
    let mut hist = vec![0u64; 1 << z.len()];
    if top < p - 1 {
        for n in 1..=(p - 1 - top) {
            let mut m = 0usize;
            for (i, zi) in z.iter().enumerate() {
                if c.is_residue(n + zi) {
                    m |= 1 << i;
                }
            }
            hist[m] += 1;
        }
    }
    Ok(hist)
}

/// Index into [`pattern_histogram`] for a sign vector.
pub fn pattern_index(eps: &[Sign]) -> usize {
    eps.iter()
        .enumerate()
        .filter(|(_, s)| **s == Sign::Plus)
        .map(|(i, _)| 1 << i)
        .sum()
}

/// Prefix counts of `side`-class integers: `out[x]` = number in `[1, x]`.
fn side_prefix(c: &ResidueClassifier, side: Side) -> Vec<u32> {
    let p = c.p();
    let want = side.sign().value();
    let mut out = vec![0u32; p as usize];
    for x in 1..p {
        out[x as usize] = out[x as usize - 1] + (c.chi_reduced(x) == want) as u32;
    }
    out
}

/// Shifts `n` whose set `S = n + Z` equals `R(p) ∩ [min S, max S]` (or the
/// non-residue analogue).
pub fn count_support(c: &ResidueClassifier, z: &[u64], side: Side) -> Result<CountRecord> {
    check_shift_set(z)?;
    let p = c.p();
    let top = *z.last().expect("nonempty");
    let bottom = z[0];
    let want = side.sign().value();
    let prefix = side_prefix(c, side);
    let mut count = 0;
    if top < p - 1 {
        for n in 1..=(p - 1 - top) {
            let (lo, hi) = ((n + bottom) as usize, (n + top) as usize);
            if (prefix[hi] - prefix[lo - 1]) as usize != z.len() {
                continue;
            }
            if z.iter().all(|zi| c.chi_reduced(n + zi) == want) {
                count += 1;
            }
        }
    }
    Ok(CountRecord {
        p,
        mode: CountMode::Support(side),
        count,
    })
}

/// Terms `{a + b(n + i) : i in [0, s-1]}`, `n >= 0`, inside `[1, p-1]`, as
/// `(first, last)` shifts.
fn ap_shift_range(p: u64, a: u64, b: u64, s: u64) -> Option<(u64, u64)> {
    let span = b.checked_mul(s - 1)?;
    let first = if a == 0 { 1 } else { 0 };
    let lowest = a + b * first;
    if lowest + span > p - 1 {
        return None;
    }
    let last = (p - 1 - span - a) / b;
    (last >= first).then_some((first, last))
}

/// Residue patterns on `{a + b(n + i) : i in [0, s-1]}`, `n >= 0`.
pub fn count_ap_pattern(c: &ResidueClassifier, a: u64, b: u64, eps: &[Sign]) -> Result<CountRecord> {
    if b == 0 || eps.is_empty() {
        return Err(Error::Domain("need b >= 1 and a nonempty pattern".into()));
    }
    let s = eps.len() as u64;
    let mut count = 0;
    if let Some((first, last)) = ap_shift_range(c.p(), a, b, s) {
        'shift: for n in first..=last {
            for (i, e) in eps.iter().enumerate() {
                if c.chi_reduced(a + b * (n + i as u64)) != e.value() {
                    continue 'shift;
                }
            }
            count += 1;
        }
    }
    Ok(CountRecord {
        p: c.p(),
        mode: CountMode::Pattern(eps.to_vec()),
        count,
    })
}

/// Progressions `{a + b(n + i)}` of length `s` that are residue (or
/// non-residue) support sets.
pub fn count_ap_support(c: &ResidueClassifier, a: u64, b: u64, s: u64, side: Side) -> Result<CountRecord> {
    if b == 0 || s == 0 {
        return Err(Error::Domain("need b >= 1 and s >= 1".into()));
    }
    let want = side.sign().value();
    let prefix = side_prefix(c, side);
    let mut count = 0;
    if let Some((first, last)) = ap_shift_range(c.p(), a, b, s) {
        for n in first..=last {
            let lo = a + b * n;
            let hi = lo + b * (s - 1);
            if (prefix[hi as usize] - prefix[lo as usize - 1]) as u64 != s {
                continue;
            }
            if (0..s).all(|i| c.chi_reduced(lo + b * i) == want) {
                count += 1;
            }
        }
    }
    Ok(CountRecord {
        p: c.p(),
        mode: CountMode::Support(side),
        count,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StatQuery {
    /// Least `n >= 1` with `{a + b(n + i) : i < s}` realizing the pattern.
    FirstPattern(Vec<Sign>),
    /// Longest run of consecutive terms all in `R(p)` (`Plus`) or `NR(p)`.
    LongestRun(Sign),
    /// Longest run of consecutive terms forming a support set.
    LongestSupport(Side),
}

/// The statistics `n0`, `s0±`, `s1±` for `AP(a, b)` at the prime of `c`.
/// Witnesses must lie in `[1, p-1]`; the result is 0 when there is none.
pub fn statistics(c: &ResidueClassifier, a: u64, b: u64, query: &StatQuery) -> Result<u64> {
    if b == 0 {
        return Err(Error::Domain("b must be positive".into()));
    }
    let p = c.p();
    match query {
        StatQuery::FirstPattern(eps) => {
            if eps.is_empty() {
                return Err(Error::Domain("pattern must be nonempty".into()));
            }
            let s = eps.len() as u64;
            let mut n = 1;
            while a + b * (n + s - 1) < p {
                if eps
                    .iter()
                    .enumerate()
                    .all(|(i, e)| c.chi_reduced(a + b * (n + i as u64)) == e.value())
                {
                    return Ok(n);
                }
                n += 1;
            }
            Ok(0)
        }
        StatQuery::LongestRun(sign) => {
            let want = sign.value();
            let (mut best, mut run) = (0, 0);
            for x in ap_terms(p, a, b) {
                if c.chi_reduced(x) == want {
                    run += 1;
                    best = best.max(run);
                } else {
                    run = 0;
                }
            }
            Ok(best)
        }
        StatQuery::LongestSupport(side) => {
            let want = side.sign().value();
            let (mut best, mut run) = (0u64, 0u64);
            let mut prev: Option<u64> = None;
            for x in ap_terms(p, a, b) {
                if c.chi_reduced(x) != want {
                    run = 0;
                    prev = None;
                    continue;
                }
                // Extend only if every integer strictly between the previous
                // term and this one is of the other class.
                run = match prev {
                    Some(y) if (y + 1..x).all(|m| c.chi_reduced(m) != want) => run + 1,
                    _ => 1,
                };
                prev = Some(x);
                best = best.max(run);
            }
            Ok(best)
        }
    }
}

fn ap_terms(p: u64, a: u64, b: u64) -> impl Iterator<Item = u64> {
    (0..)
        .map(move |m| a + b * m)
        .take_while(move |&x| x < p)
        .filter(|&x| x >= 1)
}

/// Least odd prime `q <= prime_cap` whose longest run of `side`-class
/// consecutive terms of `AP(a, b)` has length exactly `s`.
pub fn q0_search(a: u64, b: u64, side: Side, s: u64, prime_cap: u64) -> Result<Option<u64>> {
    let query = StatQuery::LongestRun(side.sign());
    for q in odd_primes_in_range(3, prime_cap, prime_cap.max(3))? {
        let c = ResidueClassifier::new(q)?;
        if statistics(&c, a, b, &query)? == s {
            return Ok(Some(q));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::progressions::normalize;
    use proptest::prelude::*;
    use std::collections::BTreeSet;
    use Sign::{Minus, Plus};

    fn cls(p: u64) -> ResidueClassifier {
        ResidueClassifier::new(p).unwrap()
    }

    /// Enumerates member sets explicitly and deduplicates them.
    fn distinct_sets_oracle(c: &ResidueClassifier, f: &NormalizedFamily, ok: impl Fn(usize, i8) -> bool) -> (u64, u64) {
        let p = c.p();
        let mut sets = BTreeSet::new();
        let mut shifts = 0;
        for n in 1..p {
            let rows: Vec<Vec<u64>> = f.b().iter().zip(f.sets()).map(|(&bi, si)| si.iter().map(|&j| bi * n + j).collect()).collect();
            if rows.iter().flatten().any(|&x| x > p - 1) {
                continue;
            }
            if rows.iter().enumerate().all(|(i, r)| r.iter().all(|&x| ok(i, c.chi(x as i128)))) {
                shifts += 1;
                sets.insert(rows.into_iter().flatten().collect::<BTreeSet<_>>());
            }
        }
        (sets.len() as u64, shifts)
    }

    #[test]
    fn constant_sign_examples() {
        let f = normalize(&[0, 0], &[1, 2], 1).unwrap();
        assert_eq!(count_constant_sign(&cls(7), &f, Plus).count, 2);
        assert_eq!(count_constant_sign(&cls(7), &f, Minus).count, 1);
        assert_eq!(count_constant_sign(&cls(5), &f, Plus).count, 0);
        assert_eq!(count_constant_sign(&cls(5), &f, Minus).count, 0);
    }

    #[test]
    fn family_too_wide_for_prime_counts_zero() {
        let f = normalize(&[0], &[10], 3).unwrap();
        assert_eq!(count_constant_sign(&cls(7), &f, Plus).count, 0);
    }

    #[test]
    fn pattern_examples() {
        for p in [3u64, 7, 11, 101] {
            assert_eq!(count_pattern(&cls(p), &[0], &[Plus]).unwrap().count, (p - 1) / 2);
        }
        assert_eq!(count_pattern(&cls(7), &[0, 1], &[Plus, Plus]).unwrap().count, 1);
        assert_eq!(count_pattern(&cls(7), &[0, 1], &[Minus, Minus]).unwrap().count, 1);
        assert!(count_pattern(&cls(7), &[0, 1], &[Plus]).is_err());
        assert!(count_pattern(&cls(7), &[1, 0], &[Plus, Plus]).is_err());
    }

    #[test]
    fn support_examples() {
        assert_eq!(count_support(&cls(7), &[0], Side::Residue).unwrap().count, 3);
        assert_eq!(count_support(&cls(7), &[0, 2], Side::Residue).unwrap().count, 1);
        assert_eq!(count_support(&cls(7), &[0, 2], Side::Nonresidue).unwrap().count, 1);
    }

    #[test]
    fn eta_examples() {
        let f = normalize(&[0, 0], &[1, 2], 1).unwrap();
        assert_eq!(count_eta(&cls(7), &f, &[Plus, Minus]).unwrap().count, 0);
        assert_eq!(count_eta(&cls(5), &f, &[Plus, Minus]).unwrap().count, 1);
        assert!(count_eta(&cls(5), &f, &[Plus]).is_err());
    }

    #[test]
    fn statistics_examples() {
        let c = cls(7);
        assert_eq!(statistics(&c, 0, 1, &StatQuery::LongestRun(Plus)).unwrap(), 2);
        assert_eq!(statistics(&c, 0, 1, &StatQuery::LongestRun(Minus)).unwrap(), 2);
        assert_eq!(statistics(&c, 0, 1, &StatQuery::FirstPattern(vec![Plus])).unwrap(), 1);
        // {5, 6} is the only pair of consecutive non-residues mod 7.
        assert_eq!(statistics(&c, 0, 1, &StatQuery::FirstPattern(vec![Minus, Minus])).unwrap(), 5);
        assert_eq!(statistics(&c, 0, 1, &StatQuery::FirstPattern(vec![Minus; 3])).unwrap(), 0);
        // R(7) = {1,2,4}: {2,4} in AP(0,2) is a support set since 3 is a non-residue.
        assert_eq!(statistics(&c, 0, 2, &StatQuery::LongestSupport(Side::Residue)).unwrap(), 2);
    }

    #[test]
    fn q0_examples() {
        assert_eq!(q0_search(0, 1, Side::Residue, 1, 100).unwrap(), Some(3));
        assert_eq!(q0_search(0, 1, Side::Residue, 2, 100).unwrap(), Some(7));
        assert_eq!(q0_search(0, 1, Side::Nonresidue, 2, 100).unwrap(), Some(5));
        assert_eq!(q0_search(0, 1, Side::Residue, 50, 100).unwrap(), None);
    }

    #[test]
    fn ap_counters_agree_with_shift_counters_for_unit_step() {
        // AP(0, 1; s) from n >= 0 is the shift family [0, s-1] from n >= 1.
        for p in [11u64, 13, 101, 1009] {
            let c = cls(p);
            let eps = [Plus, Minus, Plus];
            assert_eq!(
                count_ap_pattern(&c, 0, 1, &eps).unwrap().count,
                count_pattern(&c, &[0, 1, 2], &eps).unwrap().count
            );
            assert_eq!(
                count_ap_support(&c, 0, 1, 3, Side::Residue).unwrap().count,
                count_support(&c, &[0, 1, 2], Side::Residue).unwrap().count
            );
        }
    }

    #[test]
    fn constant_sign_dedup_matches_explicit_sets() {
        let families = [
            normalize(&[0, 0], &[1, 2], 1).unwrap(),
            normalize(&[0, 1, 3], &[1, 1, 2], 2).unwrap(),
            NormalizedFamily::new(vec![1, 2, 3], vec![vec![0, 1], vec![0, 2], vec![3]]).unwrap(),
        ];
        for f in &families {
            for p in [3u64, 5, 7, 31, 97, 211] {
                let c = cls(p);
                for eps in [Plus, Minus] {
                    let (distinct, shifts) = distinct_sets_oracle(&c, f, |_, x| x == eps.value());
                    assert_eq!(distinct, shifts);
                    assert_eq!(count_constant_sign(&c, f, eps).count, distinct);
                }
            }
        }
    }

    fn shift_set() -> impl Strategy<Value = Vec<u64>> {
        proptest::collection::btree_set(0u64..=12, 1..=4).prop_map(|s| s.into_iter().collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn patterns_partition_the_shifts(z in shift_set(), pi in 0usize..160) {
            let primes = odd_primes_in_range(17, 1000, 1000).unwrap();
            let p = primes[pi % primes.len()];
            let c = cls(p);
            let top = *z.last().unwrap();
            let hist = pattern_histogram(&c, &z).unwrap();
            let mut total = 0;
            for m in 0..(1usize << z.len()) {
                let eps: Vec<Sign> = (0..z.len()).map(|i| if m >> i & 1 == 1 { Plus } else { Minus }).collect();
                let n = count_pattern(&c, &z, &eps).unwrap().count;
                prop_assert_eq!(hist[pattern_index(&eps)], n);
                total += n;
            }
            prop_assert_eq!(total, p - 1 - top);
        }

        #[test]
        fn support_matches_definition(z in shift_set(), pi in 0usize..50) {
            let primes = odd_primes_in_range(17, 300, 300).unwrap();
            let p = primes[pi % primes.len()];
            let c = cls(p);
            let top = *z.last().unwrap();
            for side in [Side::Residue, Side::Nonresidue] {
                let want = side.sign().value();
                let mut expect = 0;
                for n in 1..=(p - 1).saturating_sub(top) {
                    let s: BTreeSet<u64> = z.iter().map(|x| x + n).collect();
                    let span: BTreeSet<u64> = (n + z[0]..=n + top).filter(|&x| c.chi(x as i128) == want).collect();
                    if s == span { expect += 1; }
                }
                prop_assert_eq!(count_support(&c, &z, side).unwrap().count, expect);
            }
        }

        #[test]
        fn constant_eta_equals_constant_sign(
            pairs in proptest::collection::btree_set((0u64..=10, 1u64..=4), 1..=3),
            s in 1u64..=3,
            pi in 0usize..60,
            plus in any::<bool>(),
        ) {
            let (a, b): (Vec<u64>, Vec<u64>) = pairs.into_iter().unzip();
            let f = normalize(&a, &b, s).unwrap();
            let primes = odd_primes_in_range(3, 400, 400).unwrap();
            let c = cls(primes[pi % primes.len()]);
            let eps = if plus { Plus } else { Minus };
            let eta = vec![eps; f.k()];
            prop_assert_eq!(count_eta(&c, &f, &eta).unwrap().count, count_constant_sign(&c, &f, eps).count);
            let both = count_constant_sign(&c, &f, Plus).count + count_constant_sign(&c, &f, Minus).count;
            let members = f.max_shift(c.p()).unwrap_or(0);
            prop_assert!(both <= members);
        }

        #[test]
        fn run_bounds_support_run(pi in 0usize..160) {
            let primes = odd_primes_in_range(3, 1000, 1000).unwrap();
            let c = cls(primes[pi % primes.len()]);
            for (sign, side) in [(Plus, Side::Residue), (Minus, Side::Nonresidue)] {
                let s0 = statistics(&c, 0, 1, &StatQuery::LongestRun(sign)).unwrap();
                let s1 = statistics(&c, 0, 1, &StatQuery::LongestSupport(side)).unwrap();
                prop_assert!(s0 >= s1);
            }
        }
    }
}
