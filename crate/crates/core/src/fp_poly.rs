//! Dense polynomials over the prime field F_p, stored as ascending coefficient
//! vectors with no trailing zeros (the zero polynomial is empty).

use crate::modular::{inv_mod, prime_factors};

pub(crate) fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let len = a.len().max(b.len());
    let out = (0..len)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(out)
}

/// Remainder of `a` modulo `f` (f nonzero).
pub(crate) fn rem(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let mut a = trim(a.to_vec());
    let df = f.len() - 1;
    let lead_inv = inv_mod(f[df], p).expect("leading coefficient invertible mod p");
    while a.len() > df {
        let top = a.len() - 1;
        let c = a[top] * lead_inv % p;
        let shift = top - df;
        for (i, &fi) in f.iter().enumerate() {
            a[shift + i] = (a[shift + i] + p - c * fi % p) % p;
        }
        a = trim(a);
    }
    a
}

pub(crate) fn mul_mod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    rem(&prod, f, p)
}

pub(crate) fn pow_mod(base: &[u64], mut exp: u64, f: &[u64], p: u64) -> Vec<u64> {
    let mut result = rem(&[1], f, p);
    let mut b = rem(base, f, p);
    while exp > 0 {
        if exp & 1 == 1 {
            result = mul_mod(&result, &b, f, p);
        }
        b = mul_mod(&b, &b, f, p);
        exp >>= 1;
    }
    result
}

pub(crate) fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    if let Some(&lead) = a.last() {
        let inv = inv_mod(lead, p).expect("nonzero mod p");
        for c in a.iter_mut() {
            *c = *c * inv % p;
        }
    }
    a
}

/// Rabin's test: `f` of degree r is irreducible over F_p iff
/// x^(p^r) = x mod f and gcd(x^(p^(r/l)) - x, f) = 1 for every prime l | r.
pub fn is_irreducible(f: &[u64], p: u64) -> bool {
    let f = trim(f.to_vec());
    if f.len() < 2 {
        return false;
    }
    let r = (f.len() - 1) as u64;
    if r == 1 {
        return true;
    }
    let x = [0u64, 1];
    // x^(p^k) by repeated p-th powering keeps exponents small.
    let frob_power = |k: u64| {
        let mut y = rem(&x, &f, p);
        for _ in 0..k {
            y = pow_mod(&y, p, &f, p);
        }
        y
    };
    if !sub(&frob_power(r), &rem(&x, &f, p), p).is_empty() {
        return false;
    }
    for l in prime_factors(r) {
        let g = sub(&frob_power(r / l), &x, p);
        if gcd(&g, &f, p).len() != 1 {
            return false;
        }
    }
    true
}

/// `f` irreducible and the class of x has multiplicative order exactly p^r - 1.
pub fn is_primitive(f: &[u64], p: u64) -> bool {
    if !is_irreducible(f, p) {
        return false;
    }
    let f = trim(f.to_vec());
    let r = (f.len() - 1) as u32;
    let order = p.pow(r) - 1;
    let x = [0u64, 1];
    if pow_mod(&x, order, &f, p) != vec![1] {
        return false;
    }
    prime_factors(order)
        .into_iter()
        .all(|l| pow_mod(&x, order / l, &f, p) != vec![1])
}
