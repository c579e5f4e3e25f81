use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use super::arith::{self, small_primes, TRIAL_LIMIT};
use crate::error::{Error, Result};

/// An exact positive integer together with its complete prime factorization.
///
/// Factors are kept sorted by prime with exponents `>= 1`; the empty list
/// represents 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactoredInteger {
    value: BigUint,
    factors: Vec<(u128, u32)>,
}

impl FactoredInteger {
    pub fn one() -> Self {
        FactoredInteger {
            value: BigUint::one(),
            factors: Vec::new(),
        }
    }

    /// Builds from prime powers, checking primality of every base.
    pub fn from_prime_powers(mut factors: Vec<(u128, u32)>) -> Result<Self> {
        factors.retain(|&(_, e)| e > 0);
        factors.sort_unstable();
        let mut merged: Vec<(u128, u32)> = Vec::with_capacity(factors.len());
        for (p, e) in factors {
            if !arith::is_prime(p)? {
                return Err(Error::InvalidArgument(format!("{p} is not prime")));
            }
            match merged.last_mut() {
                Some((q, f)) if *q == p => *f += e,
                _ => merged.push((p, e)),
            }
        }
        Ok(Self::from_sorted(merged))
    }

    /// Builds from an already-validated sorted list of distinct primes.
    fn from_sorted(factors: Vec<(u128, u32)>) -> Self {
        let value = factors
            .iter()
            .fold(BigUint::one(), |acc, &(p, e)| acc * BigUint::from(p).pow(e));
        FactoredInteger { value, factors }
    }

    pub fn prime(p: u128) -> Self {
        Self::from_sorted(vec![(p, 1)])
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn factors(&self) -> &[(u128, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u128> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn exponent_of(&self, p: u128) -> u32 {
        self.factors
            .binary_search_by_key(&p, |&(q, _)| q)
            .map(|i| self.factors[i].1)
            .unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn to_u128(&self) -> Option<u128> {
        self.value.to_u128()
    }

    /// Product of two factored integers (exponents merged).
    pub fn mul(&self, other: &FactoredInteger) -> FactoredInteger {
        let mut out = Vec::with_capacity(self.factors.len() + other.factors.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.factors, &other.factors);
        while i < a.len() || j < b.len() {
            match (a.get(i), b.get(j)) {
                (Some(&(p, e)), Some(&(q, f))) if p == q => {
                    out.push((p, e + f));
                    i += 1;
                    j += 1;
                }
                (Some(&(p, e)), Some(&(q, _))) if p < q => {
                    out.push((p, e));
                    i += 1;
                }
                (Some(_), Some(&(q, f))) => {
                    out.push((q, f));
                    j += 1;
                }
                (Some(&pe), None) => {
                    out.push(pe);
                    i += 1;
                }
                (None, Some(&qf)) => {
                    out.push(qf);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        FactoredInteger {
            value: &self.value * &other.value,
            factors: out,
        }
    }

    pub fn pow(&self, k: u32) -> FactoredInteger {
        FactoredInteger {
            value: self.value.pow(k),
            factors: self.factors.iter().map(|&(p, e)| (p, e * k)).collect(),
        }
    }

    pub fn divides(&self, other: &FactoredInteger) -> bool {
        self.factors
            .iter()
            .all(|&(p, e)| other.exponent_of(p) >= e)
    }

    /// `self / other`, or `None` when `other` does not divide `self`.
    pub fn div_exact(&self, other: &FactoredInteger) -> Option<FactoredInteger> {
        if !other.divides(self) {
            return None;
        }
        let factors: Vec<(u128, u32)> = self
            .factors
            .iter()
            .map(|&(p, e)| (p, e - other.exponent_of(p)))
            .filter(|&(_, e)| e > 0)
            .collect();
        Some(FactoredInteger {
            value: &self.value / &other.value,
            factors,
        })
    }

    /// Recomposes the product and re-checks primality of every base.
    pub fn verify(&self) -> Result<bool> {
        let strictly_increasing = self.factors.windows(2).all(|w| w[0].0 < w[1].0);
        let exps_ok = self.factors.iter().all(|&(_, e)| e >= 1);
        let product = self
            .factors
            .iter()
            .fold(BigUint::one(), |acc, &(p, e)| acc * BigUint::from(p).pow(e));
        let mut all_prime = true;
        for &(p, _) in &self.factors {
            all_prime &= arith::is_prime(p)?;
        }
        Ok(strictly_increasing && exps_ok && all_prime && product == self.value)
    }
}

impl fmt::Display for FactoredInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, &(p, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            if e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for FactoredInteger {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("FactoredInteger", 2)?;
        s.serialize_field("value", &self.value.to_string())?;
        s.serialize_field("factorization", &self.to_string())?;
        s.end()
    }
}

/// Remainder of a little-endian base-2^64 number modulo a small divisor.
pub(crate) fn rem_small(digits: &[u64], d: u64) -> u64 {
    let d = d as u128;
    let mut r = 0u128;
    for &limb in digits.iter().rev() {
        r = ((r << 64) | limb as u128) % d;
    }
    r as u64
}

fn collect_counts(mut primes: Vec<u128>) -> Vec<(u128, u32)> {
    primes.sort_unstable();
    let mut out: Vec<(u128, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

/// Strips every prime below [`TRIAL_LIMIT`] from `n`, returning the
/// primes found (with repetition) and the remaining cofactor.
fn trial_divide_u128(mut n: u128) -> (Vec<u128>, u128) {
    let mut found = Vec::new();
    for &p in small_primes() {
        let p = p as u128;
        if p * p > n {
            break;
        }
        if n <= u64::MAX as u128 {
            let (m, q) = (n as u64, p as u64);
            if m % q == 0 {
                let mut m = m;
                while m % q == 0 {
                    m /= q;
                    found.push(p);
                }
                n = m as u128;
            }
        } else if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
                found.push(p);
            }
        }
    }
    (found, n)
}

fn factor_u128_primes(n: u128) -> Result<Vec<u128>> {
    let (mut primes, rest) = trial_divide_u128(n);
    if rest > 1 {
        let limit = TRIAL_LIMIT as u128;
        if rest < limit * limit {
            primes.push(rest);
        } else {
            arith::factor_odd_part(rest, &mut primes)?;
        }
    }
    Ok(primes)
}

/// Complete factorization of `n >= 1` that fits in 128 bits.
pub fn factorize_u128(n: u128) -> Result<FactoredInteger> {
    if n == 0 {
        return Err(Error::InvalidArgument("cannot factor 0".into()));
    }
    let factors = collect_counts(factor_u128_primes(n)?);
    Ok(FactoredInteger {
        value: BigUint::from(n),
        factors,
    })
}

/// Complete factorization of `n >= 1`.
///
/// Any `n` whose cofactor after trial division by primes below 10^6 fits in
/// 128 bits is supported; larger cofactors yield
/// [`Error::MagnitudeExceeded`] rather than a partial answer.
pub fn factorize(n: &BigUint) -> Result<FactoredInteger> {
    if n.is_zero() {
        return Err(Error::InvalidArgument("cannot factor 0".into()));
    }
    if let Some(small) = n.to_u128() {
        return factorize_u128(small);
    }
    let mut rest = n.clone();
    let mut primes = Vec::new();
    let mut digits = rest.to_u64_digits();
    for &p in small_primes() {
        if rem_small(&digits, p as u64) != 0 {
            continue;
        }
        let bp = BigUint::from(p);
        while (&rest % &bp).is_zero() {
            rest /= &bp;
            primes.push(p as u128);
        }
        digits = rest.to_u64_digits();
        if rest.is_one() {
            break;
        }
    }
    match rest.to_u128() {
        Some(1) => {}
        Some(r) => {
            let limit = TRIAL_LIMIT as u128;
            if r < limit * limit {
                primes.push(r);
            } else {
                arith::factor_odd_part(r, &mut primes)?;
            }
        }
        None => {
            return Err(Error::MagnitudeExceeded(format!(
                "cofactor of {} bits remains after trial division",
                rest.bits()
            )))
        }
    }
    Ok(FactoredInteger {
        value: n.clone(),
        factors: collect_counts(primes),
    })
}

/// Deterministic primality test for any `n` up to 128 bits.
pub fn is_prime(n: &BigUint) -> Result<bool> {
    match n.to_u128() {
        Some(v) => arith::is_prime(v),
        None => Err(Error::MagnitudeExceeded(format!(
            "primality of a {}-bit integer",
            n.bits()
        ))),
    }
}

/// Prime factorization of a `u64` as `(prime, exponent)` pairs.
pub(crate) fn factor_u64(n: u64) -> Vec<(u64, u32)> {
    factorize_u128(n as u128)
        .expect("64-bit inputs always factor")
        .factors
        .iter()
        .map(|&(p, e)| (p as u64, e))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_4095() {
        let f = factorize_u128(4095).unwrap();
        assert_eq!(f.factors(), &[(3, 2), (5, 1), (7, 1), (13, 1)]);
    }

    #[test]
    fn factor_one_is_empty() {
        let f = factorize_u128(1).unwrap();
        assert!(f.factors().is_empty());
        assert!(f.is_one());
        assert_eq!(f.to_string(), "1");
    }

    #[test]
    fn factor_zero_rejected() {
        assert!(factorize_u128(0).is_err());
    }

    #[test]
    fn factor_mersenne_27() {
        let f = factorize_u128((1 << 27) - 1).unwrap();
        assert_eq!(f.factors(), &[(7, 1), (73, 1), (262_657, 1)]);
    }

    #[test]
    fn factor_mersenne_127_prime() {
        let n = (1u128 << 127) - 1;
        let f = factorize_u128(n).unwrap();
        assert_eq!(f.factors(), &[(n, 1)]);
    }

    #[test]
    fn factor_large_semiprime() {
        // two 40-bit primes
        let p = 1_099_511_627_791u128;
        let q = 1_099_511_628_401u128;
        let f = factorize_u128(p * q).unwrap();
        assert_eq!(f.factors(), &[(p, 1), (q, 1)]);
        assert!(f.verify().unwrap());
    }

    #[test]
    fn factor_beyond_128_bits_via_trial_division() {
        // 2^130 * 3^5 * (2^61 - 1)
        let n = BigUint::from(2u32).pow(130) * 243u32 * BigUint::from((1u64 << 61) - 1);
        let f = factorize(&n).unwrap();
        assert_eq!(f.factors(), &[(2, 130), (3, 5), ((1 << 61) - 1, 1)]);
    }

    #[test]
    fn oversized_cofactor_is_an_error() {
        let m127 = BigUint::from((1u128 << 127) - 1);
        let n = &m127 * &m127;
        assert!(matches!(factorize(&n), Err(Error::MagnitudeExceeded(_))));
    }

    #[test]
    fn mul_and_div_exact() {
        let a = factorize_u128(360).unwrap();
        let b = factorize_u128(84).unwrap();
        let c = a.mul(&b);
        assert_eq!(c.to_u128(), Some(30_240));
        assert_eq!(c.div_exact(&b), Some(a.clone()));
        assert_eq!(b.div_exact(&a), None);
        assert_eq!(a.pow(2).to_u128(), Some(129_600));
    }

    #[test]
    fn from_prime_powers_rejects_composites() {
        assert!(FactoredInteger::from_prime_powers(vec![(4, 1)]).is_err());
        let f = FactoredInteger::from_prime_powers(vec![(3, 1), (2, 2), (3, 1)]).unwrap();
        assert_eq!(f.factors(), &[(2, 2), (3, 2)]);
    }

    #[test]
    fn display_form() {
        assert_eq!(factorize_u128(360).unwrap().to_string(), "2^3 * 3^2 * 5");
    }
}
