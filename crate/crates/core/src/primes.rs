//! Primality testing and sieving primitives.
//!
//! Everything here is deterministic: `is_prime` uses a Miller-Rabin witness
//! set that is exhaustive for 64-bit inputs, so its answers are certificates,
//! not probabilistic claims.

use crate::error::{Error, Result};

/// Largest `limit` accepted by [`sieve`]. One bit per integer, so this caps
/// the table at 128 MiB.
pub const MAX_SIEVE_LIMIT: u64 = 1 << 30;

/// Miller-Rabin witnesses sufficient for every integer below 3.3 * 10^24,
/// which covers all of u64 (Sorenson & Webster).
const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc: u64 = 1;
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

/// Deterministic primality test for any 64-bit integer.
pub fn is_prime(x: u64) -> bool {
    if x < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if x == p {
            return true;
        }
        if x % p == 0 {
            return false;
        }
    }
    // x is odd and > 37 here; write x-1 = u * 2^s with u odd.
    let s = (x - 1).trailing_zeros();
    let u = (x - 1) >> s;
    'witness: for a in WITNESSES {
        let mut v = pow_mod(a, u, x);
        if v == 1 || v == x - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            v = mul_mod(v, v, x);
            if v == x - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Bit-indexed primality table for `0..=limit`.
#[derive(Clone)]
pub struct PrimeTable {
    limit: u64,
    words: Vec<u64>,
}

impl PrimeTable {
    /// True iff `x` is prime. `x` must be `<= limit`.
    #[inline]
    pub fn is_prime(&self, x: u64) -> bool {
        assert!(x <= self.limit, "{x} exceeds table limit {}", self.limit);
        self.words[(x >> 6) as usize] >> (x & 63) & 1 == 1
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// All primes in the table, ascending.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        (2..=self.limit).filter(move |&x| self.is_prime(x))
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Sieve of Eratosthenes up to `limit` inclusive.
pub fn sieve(limit: u64) -> Result<PrimeTable> {
    if limit == 0 {
        return Err(Error::invalid("sieve limit must be positive"));
    }
    if limit > MAX_SIEVE_LIMIT {
        return Err(Error::resource(format!(
            "sieve limit {limit} exceeds budget {MAX_SIEVE_LIMIT}"
        )));
    }
    let nwords = (limit / 64 + 1) as usize;
    let mut words = vec![!0u64; nwords];
    let clear = |words: &mut [u64], x: u64| words[(x >> 6) as usize] &= !(1u64 << (x & 63));
    clear(&mut words, 0);
    if limit >= 1 {
        clear(&mut words, 1);
    }
    let mut p = 2u64;
    while p * p <= limit {
        if words[(p >> 6) as usize] >> (p & 63) & 1 == 1 {
            let mut q = p * p;
            while q <= limit {
                clear(&mut words, q);
                q += p;
            }
        }
        p += 1;
    }
    // Mask out bits beyond limit so popcounts stay honest.
    let last_bits = (limit & 63) as u32;
    if last_bits != 63 {
        let mask = (1u64 << (last_bits + 1)) - 1;
        *words.last_mut().unwrap() &= mask;
    }
    Ok(PrimeTable { limit, words })
}

/// Product of the first `k` primes. Errors when the product overflows u64
/// (first at k = 16).
pub fn primorial(k: usize) -> Result<u64> {
    let mut product: u64 = 1;
    let mut found = 0;
    let mut candidate = 2u64;
    while found < k {
        if is_prime(candidate) {
            product = product.checked_mul(candidate).ok_or_else(|| {
                Error::resource(format!("primorial({k}) overflows 64 bits"))
            })?;
            found += 1;
        }
        candidate += 1;
    }
    Ok(product)
}

/// Product of all primes `<= n`, or None on overflow.
pub fn primorial_up_to(n: u64) -> Option<u64> {
    let mut product: u64 = 1;
    for p in 2..=n {
        if is_prime(p) {
            product = product.checked_mul(p)?;
        }
    }
    Some(product)
}

/// Segmented sieve support: marks composites in arbitrary windows using a
/// fixed base-prime table. Values that survive marking are prime whenever
/// they are below `base_limit^2`; above that they are merely rough and the
/// caller re-checks with [`is_prime`].
pub struct SegmentSieve {
    base_primes: Vec<u64>,
}

impl SegmentSieve {
    /// Base primes up to `base_limit` (at least 3).
    pub fn new(base_limit: u64) -> Result<SegmentSieve> {
        let table = sieve(base_limit.max(3))?;
        Ok(SegmentSieve {
            base_primes: table.primes().collect(),
        })
    }

    /// Clears bits of `acc` at positions i where `lo + i` has a factor among
    /// the base primes (the prime itself never counts as its own factor).
    /// `acc` must hold at least `len` bits; positions past `len` are ignored.
    /// `lo + len` must not overflow.
    pub fn mark_window(&self, lo: u64, len: usize, acc: &mut [u64]) {
        self.mark_window_excluding(lo, len, 1, acc);
    }

    /// Like [`SegmentSieve::mark_window`], but base primes dividing
    /// `skip_divisors_of` are not used for marking. When sieving several
    /// windows shifted by multiples of a common difference d, the composite
    /// pattern of a prime dividing d is identical in every shift, so it only
    /// has to be marked in one of them.
    pub fn mark_window_excluding(&self, lo: u64, len: usize, skip_divisors_of: u64, acc: &mut [u64]) {
        debug_assert!(acc.len() * 64 >= len);
        let hi = lo.checked_add(len as u64).expect("window end overflows");
        for pos in 0..2u64.min(len as u64) {
            // 0 and 1 are not prime.
            if lo + pos < 2 {
                acc[(pos >> 6) as usize] &= !(1u64 << (pos & 63));
            }
        }
        for &p in &self.base_primes {
            if skip_divisors_of % p == 0 {
                continue;
            }
            // Composites in the window have a prime factor below sqrt(hi),
            // so larger base primes cannot mark anything new.
            match p.checked_mul(p) {
                Some(p2) if p2 < hi => {
                    // Start at p^2 so the prime itself survives.
                    let first = match lo.div_ceil(p).checked_mul(p) {
                        Some(m) => p2.max(m),
                        None => continue,
                    };
                    let mut q = first;
                    while q < hi {
                        let i = (q - lo) as usize;
                        if i < len {
                            acc[i >> 6] &= !(1u64 << (i & 63));
                        }
                        match q.checked_add(p) {
                            Some(next) => q = next,
                            None => break,
                        }
                    }
                }
                _ => break,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: plain trial division.
    fn trial_division(x: u64) -> bool {
        if x < 2 {
            return false;
        }
        let mut d = 2u64;
        while d * d <= x {
            if x % d == 0 {
                return false;
            }
            d += 1;
        }
        true
    }

    #[test]
    fn small_values() {
        assert!(!is_prime(0));
        assert!(!is_prime(1));
        assert!(is_prime(2));
        assert!(is_prime(3));
        assert!(!is_prime(4));
    }

    #[test]
    fn carmichael_561_is_composite() {
        // 561 = 3 * 11 * 17 fools Fermat tests; Miller-Rabin must not be fooled.
        assert_eq!(trial_division(561), false);
        assert!(!is_prime(561));
    }

    #[test]
    fn strong_pseudoprime_stress() {
        // Strong pseudoprimes to small base sets.
        assert!(!is_prime(3_215_031_751)); // spsp to bases 2,3,5,7
        assert!(!is_prime(3_474_749_660_383));
        assert!(is_prime(18_446_744_073_709_551_557)); // largest u64 prime
        assert!(!is_prime(u64::MAX)); // 3 * 5 * 17 * 257 * 641 * 65537 * 6700417
    }

    #[test]
    fn agrees_with_trial_division_to_20k() {
        for x in 0..20_000u64 {
            assert_eq!(is_prime(x), trial_division(x), "disagree at {x}");
        }
    }

    #[test]
    fn sieve_limit_10() {
        let t = sieve(10).unwrap();
        let primes: Vec<u64> = t.primes().collect();
        assert_eq!(primes, vec![2, 3, 5, 7]);
    }

    #[test]
    fn sieve_limit_100_has_25_primes() {
        let t = sieve(100).unwrap();
        assert_eq!(t.count(), (0..=100).filter(|&x| trial_division(x)).count());
        assert_eq!(t.count(), 25);
    }

    #[test]
    fn sieve_limit_1_is_empty() {
        let t = sieve(1).unwrap();
        assert_eq!(t.count(), 0);
        assert!(!t.is_prime(0));
        assert!(!t.is_prime(1));
    }

    #[test]
    fn sieve_rejects_over_budget() {
        assert!(matches!(
            sieve(MAX_SIEVE_LIMIT + 1),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn sieve_matches_is_prime_to_100k() {
        let t = sieve(100_000).unwrap();
        for x in 0..=100_000u64 {
            assert_eq!(t.is_prime(x), is_prime(x), "disagree at {x}");
        }
    }

    #[test]
    fn primorial_values() {
        assert_eq!(primorial(0).unwrap(), 1);
        assert_eq!(primorial(3).unwrap(), 30);
        assert_eq!(primorial(5).unwrap(), 2310); // 2*3*5*7*11
        assert_eq!(primorial(15).unwrap(), 614_889_782_588_491_410);
        assert!(matches!(primorial(16), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn primorial_up_to_matches() {
        assert_eq!(primorial_up_to(1), Some(1));
        assert_eq!(primorial_up_to(2), Some(2));
        assert_eq!(primorial_up_to(6), Some(30));
        assert_eq!(primorial_up_to(13), Some(30030));
    }

    #[test]
    fn segment_sieve_window_matches_table() {
        let seg = SegmentSieve::new(1 << 10).unwrap();
        let table = sieve(600_000).unwrap();
        for lo in [0u64, 1, 2, 100, 65_536, 524_287] {
            let len = 4_096usize;
            let mut acc = vec![!0u64; len.div_ceil(64)];
            seg.mark_window(lo, len, &mut acc);
            for i in 0..len {
                let x = lo + i as u64;
                let bit = acc[i >> 6] >> (i & 63) & 1 == 1;
                // Below base_limit^2 the window is exact primality.
                assert_eq!(bit, table.is_prime(x), "disagree at {x}");
            }
        }
    }

    #[test]
    fn segment_sieve_excluding_skips_divisors() {
        let seg = SegmentSieve::new(100).unwrap();
        let d = 30u64;
        let lo = 500u64;
        let len = 512usize;
        let mut acc = vec![!0u64; len.div_ceil(64)];
        seg.mark_window_excluding(lo, len, d, &mut acc);
        for i in 0..len {
            let x = lo + i as u64;
            let bit = acc[i >> 6] >> (i & 63) & 1 == 1;
            // A position must be cleared iff some base prime not dividing d
            // witnesses compositeness (factor q with q^2 <= x).
            let marked = (2..=100u64)
                .filter(|&q| trial_division(q) && d % q != 0)
                .any(|q| x % q == 0 && x >= q * q);
            assert_eq!(bit, !marked, "disagree at {x}");
        }
    }
}
