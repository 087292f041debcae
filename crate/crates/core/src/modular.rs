//! Small-integer helpers: primality, factoring and inverses modulo prime powers.

/// Deterministic trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Distinct prime factors of `n`, ascending.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// `base^exp` with overflow detection.
pub fn checked_pow(base: u64, exp: u64) -> Option<u64> {
    let exp = u32::try_from(exp).ok()?;
    base.checked_pow(exp)
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Exponent of `p` in `n`; `None` for `n = 0`.
pub fn valuation(mut n: u64, p: u64) -> Option<u32> {
    if n == 0 {
        return None;
    }
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    Some(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_small() {
        let primes: Vec<u64> = (0..40).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
        assert!(is_prime(65521));
        assert!(!is_prime(65535));
    }

    #[test]
    fn factors() {
        assert_eq!(prime_factors(255), vec![3, 5, 17]);
        assert_eq!(prime_factors(8), vec![2]);
        assert_eq!(prime_factors(1), Vec::<u64>::new());
        assert_eq!(prime_factors(65535), vec![3, 5, 17, 257]);
    }

    #[test]
    fn inverses() {
        for a in 0..27u64 {
            let inv = inv_mod(a, 27);
            if a % 3 == 0 {
                assert!(inv.is_none());
            } else {
                assert_eq!(a * inv.unwrap() % 27, 1);
            }
        }
    }

    #[test]
    fn valuations() {
        assert_eq!(valuation(12, 2), Some(2));
        assert_eq!(valuation(9, 3), Some(2));
        assert_eq!(valuation(7, 3), Some(0));
        assert_eq!(valuation(0, 3), None);
    }
}
