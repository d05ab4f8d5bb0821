//! Primes, the Legendre symbol and exact integer predicates.

use num_bigint::BigUint;
use num_integer::Roots;

use crate::{Error, Result};

/// Upper bound on sieve ranges unless the caller configures another.
pub const DEFAULT_PRIME_CAP: u64 = 100_000_000;

/// Primes above this size get no residue table; `chi` falls back to
/// Euler's criterion.
pub const DEFAULT_TABLE_THRESHOLD: u64 = 10_000_000;

const SEGMENT_LEN: u64 = 1 << 16;

/// An odd prime with its quadratic residue table.
///
/// Bit `i` of the table is set iff `i` is a nonzero square mod `p`. Index 0 is
/// never set.
#[derive(Clone, Debug)]
pub struct ResidueClassifier {
    p: u64,
    table: Option<Vec<u64>>,
}

impl ResidueClassifier {
    pub fn new(p: u64) -> Result<Self> {
        Self::with_threshold(p, DEFAULT_TABLE_THRESHOLD)
    }

    /// Builds the table only when `p <= threshold`.
    pub fn with_threshold(p: u64, threshold: u64) -> Result<Self> {
        if p < 3 || p.is_multiple_of(2) || !is_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        let table = (p <= threshold).then(|| build_table(p));
        Ok(ResidueClassifier { p, table })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn has_table(&self) -> bool {
        self.table.is_some()
    }

    /// Legendre symbol of `a` modulo `p`.
    pub fn chi(&self, a: i128) -> i8 {
        let r = a.rem_euclid(self.p as i128) as u64;
        self.chi_reduced(r)
    }

    /// Legendre symbol of an already reduced residue `r < p`.
    #[inline]
    pub fn chi_reduced(&self, r: u64) -> i8 {
        debug_assert!(r < self.p);
        if r == 0 {
            return 0;
        }
        match &self.table {
            Some(t) => {
                if t[(r >> 6) as usize] >> (r & 63) & 1 == 1 {
                    1
                } else {
                    -1
                }
            }
            None => euler_criterion(r, self.p),
        }
    }

    /// `true` iff `r` in `[1, p-1]` is a quadratic residue.
    #[inline]
    pub fn is_residue(&self, r: u64) -> bool {
        self.chi_reduced(r) == 1
    }

    /// `chi` as a dense `i8` vector indexed by residue; handy for sweeps.
    pub fn chi_table(&self) -> Vec<i8> {
        (0..self.p).map(|r| self.chi_reduced(r)).collect()
    }
}

fn build_table(p: u64) -> Vec<u64> {
    let mut t = vec![0u64; (p as usize >> 6) + 1];
    // (x + 1)^2 = x^2 + 2x + 1, kept reduced.
    let mut sq: u64 = 0;
    for x in 1..=(p - 1) / 2 {
        sq += 2 * x - 1;
        if sq >= p {
            sq -= p;
            if sq >= p {
                sq %= p;
            }
        }
        t[(sq >> 6) as usize] |= 1 << (sq & 63);
    }
    t
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

fn euler_criterion(r: u64, p: u64) -> i8 {
    match pow_mod(r, (p - 1) / 2, p) {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

/// One-off Legendre symbol `(a | p)` for an odd prime `p`, via Euler's criterion.
pub fn chi(p: u64, a: i128) -> i8 {
    let r = a.rem_euclid(p as i128) as u64;
    if r == 0 {
        0
    } else {
        euler_criterion(r, p)
    }
}

/// Deterministic Miller-Rabin, exact for all `u64`.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// `true` iff `n` is a perfect square. Exact integer square root.
pub fn is_square(n: u64) -> bool {
    let r = n.sqrt();
    r * r == n
}

pub fn is_square_big(n: &BigUint) -> bool {
    let r = n.sqrt();
    &(&r * &r) == n
}

/// All primes in `[lo, hi]`, ascending, with `hi` limited to [`DEFAULT_PRIME_CAP`].
pub fn primes_in_range(lo: u64, hi: u64) -> Result<Vec<u64>> {
    primes_in_range_capped(lo, hi, DEFAULT_PRIME_CAP)
}

/// Segmented sieve of Eratosthenes over `[lo, hi]`.
pub fn primes_in_range_capped(lo: u64, hi: u64, cap: u64) -> Result<Vec<u64>> {
    if lo > hi {
        return Err(Error::InvalidRange { lo, hi });
    }
    if hi > cap {
        return Err(Error::RangeTooLarge { lo, hi, cap });
    }
    let lo = lo.max(2);
    if hi < lo {
        return Ok(Vec::new());
    }
    let base = small_primes(hi.sqrt());
    let mut out = Vec::new();
    let mut seg = vec![true; SEGMENT_LEN as usize];
    let mut start = lo;
    while start <= hi {
        let end = hi.min(start + SEGMENT_LEN - 1);
        let len = (end - start + 1) as usize;
        seg[..len].fill(true);
        for &q in &base {
            let q2 = q * q;
            if q2 > end {
                break;
            }
            let first = if q2 >= start {
                q2
            } else {
                start.div_ceil(q) * q
            };
            let mut m = first;
            while m <= end {
                seg[(m - start) as usize] = false;
                m += q;
            }
        }
        out.extend(
            seg[..len]
                .iter()
                .enumerate()
                .filter(|(_, &is_p)| is_p)
                .map(|(i, _)| start + i as u64),
        );
        start = end + 1;
    }
    Ok(out)
}

/// Simple sieve for the base primes up to `n`.
fn small_primes(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Odd primes in `[lo, hi]`.
pub fn odd_primes_in_range(lo: u64, hi: u64, cap: u64) -> Result<Vec<u64>> {
    let mut v = primes_in_range_capped(lo, hi, cap)?;
    v.retain(|&p| p != 2);
    Ok(v)
}
