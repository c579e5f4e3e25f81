use super::arith::{gcd, pow_mod};
use super::factor::factor_u64;
use crate::error::{Error, Result};

fn totient_factored(modulus: u64) -> Vec<(u64, u32)> {
    let mut acc: Vec<(u64, u32)> = Vec::new();
    let mut push = |p: u64, e: u32| match acc.iter_mut().find(|(q, _)| *q == p) {
        Some((_, f)) => *f += e,
        None => acc.push((p, e)),
    };
    for (p, e) in factor_u64(modulus) {
        if e > 1 {
            push(p, e - 1);
        }
        for (r, k) in factor_u64(p - 1) {
            push(r, k);
        }
    }
    acc.sort_unstable();
    acc
}

/// Least `k >= 1` with `a^k = 1 (mod modulus)`.
pub fn multiplicative_order(a: u64, modulus: u64) -> Result<u64> {
    if modulus < 2 {
        return Err(Error::InvalidArgument(format!(
            "modulus must be at least 2, got {modulus}"
        )));
    }
    let a_red = a % modulus;
    if gcd(a_red as u128, modulus as u128) != 1 {
        return Err(Error::NotCoprime { a, modulus });
    }
    let n = modulus as u128;
    let phi = totient_factored(modulus);
    let mut k: u64 = phi.iter().map(|&(p, e)| p.pow(e)).product();
    for (p, e) in phi {
        for _ in 0..e {
            if pow_mod(a_red as u128, (k / p) as u128, n) == 1 {
                k /= p;
            } else {
                break;
            }
        }
    }
    Ok(k)
}

/// Whether `a` has order exactly `e` modulo the prime `l`.
///
/// Only the factorization of `e` is needed, never that of `l - 1`.
pub fn has_order(a: u128, e: u64, l: u128) -> bool {
    if l < 2 || e == 0 || a.is_multiple_of(l) {
        return false;
    }
    let a = a % l;
    if pow_mod(a, e as u128, l) != 1 {
        return false;
    }
    factor_u64(e)
        .iter()
        .all(|&(s, _)| pow_mod(a, (e / s) as u128, l) != 1)
}
