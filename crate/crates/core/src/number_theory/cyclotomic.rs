use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigUint;
use num_traits::One;

use super::factor::{factor_u64, factorize, FactoredInteger};
use crate::error::{Error, Result};

pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factor_u64(n) {
        let len = out.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

pub fn mobius(n: u64) -> i8 {
    let f = factor_u64(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `Phi_m(a)` as an exact integer, by the Moebius product over `d | m`.
pub fn cyclotomic_value(a: u64, m: u32) -> BigUint {
    assert!(m >= 1, "cyclotomic index starts at 1");
    let base = BigUint::from(a);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for d in divisors(m as u64) {
        let term = base.pow(d as u32) - 1u32;
        match mobius(m as u64 / d) {
            1 => num *= term,
            -1 => den *= term,
            _ => {}
        }
    }
    num / den
}

type CyclotomicCache = Mutex<HashMap<(u64, u32), Arc<FactoredInteger>>>;

fn cache() -> &'static CyclotomicCache {
    static CACHE: OnceLock<CyclotomicCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Factorization of `Phi_d(a)`, memoized process-wide.
pub fn factor_cyclotomic(a: u64, d: u32) -> Result<Arc<FactoredInteger>> {
    if a < 2 {
        return Err(Error::InvalidArgument(format!("base must exceed 1, got {a}")));
    }
    if let Some(hit) = cache().lock().expect("cache poisoned").get(&(a, d)) {
        return Ok(Arc::clone(hit));
    }
    let f = Arc::new(factorize(&cyclotomic_value(a, d))?);
    cache()
        .lock()
        .expect("cache poisoned")
        .insert((a, d), Arc::clone(&f));
    Ok(f)
}

/// `a^n - 1` factored through its cyclotomic pieces.
pub fn factor_power_minus_one(a: u64, n: u32) -> Result<FactoredInteger> {
    if n == 0 {
        return Err(Error::InvalidArgument("a^0 - 1 is zero".into()));
    }
    let mut acc = FactoredInteger::one();
    for d in divisors(n as u64) {
        acc = acc.mul(&*factor_cyclotomic(a, d as u32)?);
    }
    Ok(acc)
}

/// `a^n + 1` factored as the product of `Phi_d(a)` over `d | 2n`, `d` not
/// dividing `n`.
pub fn factor_power_plus_one(a: u64, n: u32) -> Result<FactoredInteger> {
    if a < 2 {
        return Err(Error::InvalidArgument(format!("base must exceed 1, got {a}")));
    }
    let mut acc = FactoredInteger::one();
    for d in divisors(2 * n as u64) {
        if !(n as u64).is_multiple_of(d) {
            acc = acc.mul(&*factor_cyclotomic(a, d as u32)?);
        }
    }
    Ok(acc)
}
