//! Character sums `Σ_x χ_p(Π_i (x + r_i))` over complete and initial ranges.
//!
//! Direct evaluation in `O(p·d)`. The sums here are reference values for the
//! bounds `2d√p` (complete) and `2d√p·ln p` (incomplete).

use serde::Serialize;

use crate::arith::ResidueClassifier;
use crate::format::sig6;
use crate::{Error, Result};

/// Relative slack on floating-point bound comparisons.
pub const BOUND_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CharSumResult {
    pub p: u64,
    /// The shifts reduced into `[0, p-1]`; `f(x) = Π (x + shift)`.
    pub shifts: Vec<u64>,
    /// Last summed `x`; `None` sums the complete range `[0, p-1]`.
    pub range_end: Option<u64>,
    pub value: i64,
    pub bound: f64,
    pub within_bound: bool,
}

impl CharSumResult {
    pub const CSV_HEADER: &'static str = "p,d,N,value,bound,within_bound";

    pub fn degree(&self) -> usize {
        self.shifts.len()
    }

    pub fn csv_row(&self) -> String {
        let n = match self.range_end {
            Some(n) => n.to_string(),
            None => "complete".to_string(),
        };
        format!(
            "{},{},{},{},{},{}",
            self.p,
            self.degree(),
            n,
            self.value,
            sig6(self.bound),
            self.within_bound
        )
    }
}

pub fn complete_bound(p: u64, d: usize) -> f64 {
    2.0 * d as f64 * (p as f64).sqrt()
}

pub fn incomplete_bound(p: u64, d: usize) -> f64 {
    complete_bound(p, d) * (p as f64).ln()
}

/// Evaluates `Σ_{x=0}^{N} χ_p(Π_i (x + shifts_i))`, with `N = p - 1` when
/// `range_end` is `None`.
pub fn char_sum(c: &ResidueClassifier, shifts: &[i64], range_end: Option<u64>) -> Result<CharSumResult> {
    let p = c.p();
    if shifts.is_empty() {
        return Err(Error::Domain("need at least one linear factor".into()));
    }
    let mut reduced: Vec<u64> = shifts.iter().map(|&r| (r as i128).rem_euclid(p as i128) as u64).collect();
    let mut sorted = reduced.clone();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Domain(format!("roots repeat modulo {p}")));
    }
    if let Some(n) = range_end {
        if n > p - 1 {
            return Err(Error::Domain(format!("N = {n} exceeds p - 1 = {}", p - 1)));
        }
    }
    let last = range_end.unwrap_or(p - 1);
    let mut value: i64 = 0;
    // Walk x upward, keeping each factor x + r reduced without a division.
    for _ in 0..=last {
        let mut v: i8 = 1;
        for r in reduced.iter_mut() {
            v *= c.chi_reduced(*r);
            if v == 0 {
                break;
            }
        }
        value += v as i64;
        for r in reduced.iter_mut() {
            *r += 1;
            if *r == p {
                *r = 0;
            }
        }
    }
    let d = shifts.len();
    let bound = match range_end {
        None => complete_bound(p, d),
        Some(_) => incomplete_bound(p, d),
    };
    Ok(CharSumResult {
        p,
        shifts: shifts.iter().map(|&r| (r as i128).rem_euclid(p as i128) as u64).collect(),
        range_end,
        value,
        bound,
        within_bound: (value.unsigned_abs() as f64) <= bound * (1.0 + BOUND_SLACK),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::odd_primes_in_range;
    use rand::seq::index::sample;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cls(p: u64) -> ResidueClassifier {
        ResidueClassifier::new(p).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(char_sum(&cls(7), &[0], None).unwrap().value, 0);
        assert_eq!(char_sum(&cls(7), &[0, 1], None).unwrap().value, -1);
        assert_eq!(char_sum(&cls(7), &[0], Some(3)).unwrap().value, 1);
    }

    #[test]
    fn rejects_repeated_roots_and_long_ranges() {
        assert!(char_sum(&cls(7), &[1, 8], None).is_err());
        assert!(char_sum(&cls(7), &[-1, 6], None).is_err());
        assert!(char_sum(&cls(7), &[0], Some(7)).is_err());
        assert!(char_sum(&cls(7), &[], None).is_err());
    }

    #[test]
    fn negative_shifts_reduce() {
        let a = char_sum(&cls(11), &[-1, 3], None).unwrap();
        let b = char_sum(&cls(11), &[10, 3], None).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.shifts, vec![10, 3]);
    }

    #[test]
    fn linear_complete_sum_vanishes() {
        for p in odd_primes_in_range(3, 2000, 2000).unwrap() {
            assert_eq!(char_sum(&cls(p), &[5], None).unwrap().value, 0, "p = {p}");
        }
    }

    #[test]
    fn quadratic_complete_sum_is_minus_one() {
        // Σ χ((x+a)(x+b)) = -1 for a ≠ b mod p.
        for p in odd_primes_in_range(3, 500, 500).unwrap() {
            assert_eq!(char_sum(&cls(p), &[0, 1], None).unwrap().value, -1);
        }
    }

    #[test]
    fn bounds_and_translation_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for p in odd_primes_in_range(100, 1500, 1500).unwrap() {
            let c = cls(p);
            for _ in 0..5 {
                let d = rng.gen_range(1..=6);
                let roots: Vec<i64> = sample(&mut rng, p as usize, d).into_iter().map(|x| x as i64).collect();
                let full = char_sum(&c, &roots, None).unwrap();
                assert!(full.within_bound, "{full:?}");
                let n = rng.gen_range(0..p);
                let part = char_sum(&c, &roots, Some(n)).unwrap();
                assert!(part.within_bound, "{part:?}");
                let k = rng.gen_range(1..p as i64);
                let moved: Vec<i64> = roots.iter().map(|r| r + k).collect();
                assert_eq!(char_sum(&c, &moved, None).unwrap().value, full.value);
            }
        }
    }

    #[test]
    fn csv_row_format() {
        let r = char_sum(&cls(7), &[0], Some(3)).unwrap();
        assert_eq!(CharSumResult::CSV_HEADER, "p,d,N,value,bound,within_bound");
        assert!(r.csv_row().starts_with("7,1,3,1,"));
        assert!(char_sum(&cls(7), &[0], None).unwrap().csv_row().starts_with("7,1,complete,0,"));
    }
}
