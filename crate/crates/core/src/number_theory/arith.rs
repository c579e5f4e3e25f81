//! Word-level modular arithmetic on `u128`: Montgomery multiplication,
//! deterministic primality and Pollard-Brent splitting.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Trial-division bound used throughout factorization.
pub const TRIAL_LIMIT: u32 = 1_000_000;

/// Iteration budget for a single Pollard-Brent attempt.
const RHO_BUDGET: u64 = 1 << 27;

/// Primes below [`TRIAL_LIMIT`], ascending.
pub fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let n = TRIAL_LIMIT as usize;
        let mut composite = vec![false; n];
        let mut primes = Vec::with_capacity(80_000);
        for i in 2..n {
            if !composite[i] {
                primes.push(i as u32);
                let mut j = i * i;
                while j < n {
                    composite[j] = true;
                    j += i;
                }
            }
        }
        primes
    })
}

pub fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Full 256-bit product as `(hi, lo)`.
#[inline]
fn widening_mul(a: u128, b: u128) -> (u128, u128) {
    const MASK: u128 = u64::MAX as u128;
    let (a1, a0) = (a >> 64, a & MASK);
    let (b1, b0) = (b >> 64, b & MASK);
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;
    let mid = (p00 >> 64) + (p01 & MASK) + (p10 & MASK);
    let lo = (p00 & MASK) | (mid << 64);
    let hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (hi, lo)
}

#[inline]
fn add_mod(a: u128, b: u128, n: u128) -> u128 {
    let (s, overflow) = a.overflowing_add(b);
    if overflow || s >= n {
        s.wrapping_sub(n)
    } else {
        s
    }
}

/// Montgomery context for an odd modulus `n > 1`, with `R = 2^128`.
#[derive(Debug, Clone, Copy)]
pub struct Montgomery {
    n: u128,
    n_prime: u128,
    r2: u128,
    one: u128,
}

impl Montgomery {
    pub fn new(n: u128) -> Self {
        assert!(n > 1 && n & 1 == 1, "Montgomery modulus must be odd and > 1");
        let mut inv = n;
        for _ in 0..7 {
            inv = inv.wrapping_mul(2u128.wrapping_sub(n.wrapping_mul(inv)));
        }
        let one = (u128::MAX % n + 1) % n;
        let mut r2 = one;
        for _ in 0..128 {
            r2 = add_mod(r2, r2, n);
        }
        Montgomery {
            n,
            n_prime: inv.wrapping_neg(),
            r2,
            one,
        }
    }

    #[inline]
    fn reduce(&self, hi: u128, lo: u128) -> u128 {
        let m = lo.wrapping_mul(self.n_prime);
        let (mh, _) = widening_mul(m, self.n);
        let carry = (lo != 0) as u128;
        let (t, c1) = hi.overflowing_add(mh);
        let (t, c2) = t.overflowing_add(carry);
        if c1 || c2 || t >= self.n {
            t.wrapping_sub(self.n)
        } else {
            t
        }
    }

    #[inline]
    pub fn mul(&self, a: u128, b: u128) -> u128 {
        let (hi, lo) = widening_mul(a, b);
        self.reduce(hi, lo)
    }

    #[inline]
    pub fn add(&self, a: u128, b: u128) -> u128 {
        add_mod(a, b, self.n)
    }

    pub fn to_mont(&self, a: u128) -> u128 {
        self.mul(a % self.n, self.r2)
    }

    pub fn from_mont(&self, a: u128) -> u128 {
        self.reduce(0, a)
    }

    pub fn one(&self) -> u128 {
        self.one
    }

    pub fn pow(&self, base: u128, mut exp: u128) -> u128 {
        let mut result = self.one;
        let mut b = base;
        while exp > 0 {
            if exp & 1 == 1 {
                result = self.mul(result, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        result
    }
}

/// `a * b mod n` for any `n >= 1`.
pub fn mul_mod(a: u128, b: u128, n: u128) -> u128 {
    let (a, b) = (a % n, b % n);
    if n <= u64::MAX as u128 {
        return a * b % n;
    }
    // double-and-add keeps this correct for even moduli too
    let mut result = 0u128;
    let mut x = a;
    let mut y = b;
    while y > 0 {
        if y & 1 == 1 {
            result = add_mod(result, x, n);
        }
        x = add_mod(x, x, n);
        y >>= 1;
    }
    result
}

pub fn pow_mod(base: u128, mut exp: u128, n: u128) -> u128 {
    if n == 1 {
        return 0;
    }
    if n & 1 == 1 && n > u64::MAX as u128 {
        let mont = Montgomery::new(n);
        return mont.from_mont(mont.pow(mont.to_mont(base), exp));
    }
    let mut result = 1u128;
    let mut b = base % n;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mul_mod(result, b, n);
        }
        b = mul_mod(b, b, n);
        exp >>= 1;
    }
    result
}

pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x.checked_mul(x).is_none_or(|sq| sq > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= n) {
        x += 1;
    }
    x
}

const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn strong_probable_prime_u64(n: u64, a: u64) -> bool {
    let (n128, a) = (n as u128, (a % n) as u128);
    if a == 0 {
        return true;
    }
    let d = (n - 1) >> (n - 1).trailing_zeros();
    let s = (n - 1).trailing_zeros();
    let mut x = pow_mod(a, d as u128, n128);
    if x == 1 || x == n128 - 1 {
        return true;
    }
    for _ in 1..s {
        x = x * x % n128;
        if x == n128 - 1 {
            return true;
        }
    }
    false
}

fn strong_probable_prime_mont(mont: &Montgomery, n: u128, a: u128) -> bool {
    let d = (n - 1) >> (n - 1).trailing_zeros();
    let s = (n - 1).trailing_zeros();
    let minus_one = mont.to_mont(n - 1);
    let mut x = mont.pow(mont.to_mont(a), d);
    if x == mont.one() || x == minus_one {
        return true;
    }
    for _ in 1..s {
        x = mont.mul(x, x);
        if x == minus_one {
            return true;
        }
    }
    false
}

/// Deterministic primality for 64-bit inputs (the first twelve prime bases
/// are a complete witness set below 2^64).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    MR_BASES.iter().all(|&a| strong_probable_prime_u64(n, a))
}

/// Deterministic primality on `u128`. Inputs of 64 bits or more that pass
/// the strong-pseudoprime filter are proven prime with a Pocklington
/// certificate built from a partial factorization of `n - 1`.
pub fn is_prime(n: u128) -> Result<bool> {
    if n <= u64::MAX as u128 {
        return Ok(is_prime_u64(n as u64));
    }
    if n & 1 == 0 {
        return Ok(false);
    }
    for &p in &small_primes()[..200] {
        if n.is_multiple_of(p as u128) {
            return Ok(false);
        }
    }
    let mont = Montgomery::new(n);
    if !MR_BASES
        .iter()
        .all(|&a| strong_probable_prime_mont(&mont, n, a as u128))
    {
        return Ok(false);
    }
    pocklington(n)
}

/// Pocklington-Lehmer: with `n - 1 = F * R`, `F` fully factored and
/// `F > sqrt(n)`, n is prime iff for every prime `q | F` some `a` has
/// `a^(n-1) = 1` and `gcd(a^((n-1)/q) - 1, n) = 1`.
fn pocklington(n: u128) -> Result<bool> {
    let root = isqrt(n);
    let mut rest = n - 1;
    let mut found: Vec<u128> = Vec::new();
    let mut covered: u128 = 1;

    let note = |q: u128, rest: &mut u128, covered: &mut u128, found: &mut Vec<u128>| {
        while (*rest).is_multiple_of(q) {
            *rest /= q;
            *covered = covered.saturating_mul(q);
        }
        found.push(q);
    };

    for &p in small_primes() {
        let p = p as u128;
        if covered > root {
            break;
        }
        if rest.is_multiple_of(p) {
            note(p, &mut rest, &mut covered, &mut found);
        }
        if p * p > rest {
            break;
        }
    }
    while covered <= root && rest > 1 {
        if is_prime(rest)? {
            let r = rest;
            note(r, &mut rest, &mut covered, &mut found);
            break;
        }
        let d = split(rest).ok_or(Error::PrimalityUndecided(n))?;
        let mut parts = Vec::new();
        factor_odd_part(d, &mut parts).map_err(|_| Error::PrimalityUndecided(n))?;
        parts.sort_unstable();
        parts.dedup();
        for q in parts {
            note(q, &mut rest, &mut covered, &mut found);
        }
    }
    if covered <= root {
        return Err(Error::PrimalityUndecided(n));
    }

    let mont = Montgomery::new(n);
    let one = mont.one();
    let exp = n - 1;
    'prime: for &q in &found {
        for a in 2u128..2000 {
            let am = mont.to_mont(a);
            if mont.pow(am, exp) != one {
                return Ok(false);
            }
            let t = mont.from_mont(mont.pow(am, exp / q));
            let g = gcd(if t == 0 { n - 1 } else { t - 1 }, n);
            if g == 1 {
                continue 'prime;
            }
            if g != n {
                return Ok(false);
            }
        }
        return Err(Error::PrimalityUndecided(n));
    }
    Ok(true)
}

fn brent(n: u128, c: u128, budget: u64) -> Option<u128> {
    const BATCH: u64 = 128;
    let mont = Montgomery::new(n);
    let c = mont.to_mont(c);
    let f = |x: u128| mont.add(mont.mul(x, x), c);
    let diff = |a: u128, b: u128| a.abs_diff(b);

    let mut y = mont.to_mont(2);
    let mut x = y;
    let mut ys = y;
    let mut q = mont.one();
    let mut g = 1u128;
    let mut r = 1u64;
    let mut spent = 0u64;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            let steps = BATCH.min(r - k);
            for _ in 0..steps {
                y = f(y);
                q = mont.mul(q, diff(x, y));
            }
            g = gcd(q, n);
            k += steps;
        }
        spent += 2 * r;
        if spent > budget {
            return None;
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = f(ys);
            g = gcd(diff(x, ys), n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

/// Finds a nontrivial factor of an odd composite `n`.
pub fn split(n: u128) -> Option<u128> {
    if n & 1 == 0 {
        return Some(2);
    }
    let root = isqrt(n);
    if root * root == n {
        return Some(root);
    }
    (1u128..=8).find_map(|c| brent(n, c, RHO_BUDGET))
}

/// Appends the prime factors (with repetition) of `n`, which must have no
/// prime factor below [`TRIAL_LIMIT`] other than those it is allowed to
/// rediscover via rho.
pub(crate) fn factor_odd_part(n: u128, out: &mut Vec<u128>) -> Result<()> {
    if n == 1 {
        return Ok(());
    }
    if n & 1 == 0 {
        out.push(2);
        return factor_odd_part(n / 2, out);
    }
    if is_prime(n)? {
        out.push(n);
        return Ok(());
    }
    let d = split(n).ok_or_else(|| {
        Error::MagnitudeExceeded(format!("no factor of {n} found within the rho budget"))
    })?;
    factor_odd_part(d, out)?;
    factor_odd_part(n / d, out)
}

/// Like [`factor_odd_part`] with a per-split rho budget; `None` when any
/// split runs out of budget.
pub(crate) fn try_factor(n: u128, budget: u64) -> Result<Option<Vec<u128>>> {
    let mut out = Vec::new();
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime(m)? {
            out.push(m);
            continue;
        }
        let d = if m & 1 == 0 {
            Some(2)
        } else {
            let root = isqrt(m);
            if root * root == m {
                Some(root)
            } else {
                (1u128..=4).find_map(|c| brent(m, c, budget))
            }
        };
        match d {
            Some(d) => {
                stack.push(d);
                stack.push(m / d);
            }
            None => return Ok(None),
        }
    }
    out.sort_unstable();
    Ok(Some(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn montgomery_matches_naive() {
        let n = (1u128 << 127) - 1;
        let mont = Montgomery::new(n);
        let a = 0x1234_5678_9abc_def0_1122_3344_5566_7788u128 % n;
        let b = 0xdead_beef_cafe_f00d_0102_0304_0506_0708u128 % n;
        let got = mont.from_mont(mont.mul(mont.to_mont(a), mont.to_mont(b)));
        assert_eq!(got, mul_mod(a, b, n));
    }

    #[test]
    fn montgomery_near_top_of_range() {
        let n = u128::MAX - 158; // odd
        let mont = Montgomery::new(n);
        let a = n - 1;
        let got = mont.from_mont(mont.mul(mont.to_mont(a), mont.to_mont(a)));
        assert_eq!(got, 1);
    }

    #[test]
    fn small_prime_table() {
        let ps = small_primes();
        assert_eq!(ps.len(), 78_498);
        assert_eq!(ps[0], 2);
        assert_eq!(*ps.last().unwrap(), 999_983);
    }

    #[test]
    fn primality_known_values() {
        assert!(!is_prime_u64(0));
        assert!(!is_prime_u64(1));
        assert!(is_prime_u64(2));
        assert!(is_prime_u64(524_287));
        assert!(is_prime_u64(262_657));
        assert!(!is_prime_u64(262_654));
        // strong pseudoprime to bases 2..=37 except the last one
        assert!(!is_prime_u64(3_825_123_056_546_413_051));
        assert!(is_prime_u64(18_446_744_073_709_551_557));
    }

    #[test]
    fn mersenne_127_is_certified_prime() {
        assert_eq!(is_prime((1u128 << 127) - 1), Ok(true));
        assert_eq!(is_prime((1u128 << 89) - 1), Ok(true));
        assert_eq!(is_prime((1u128 << 101) - 1), Ok(false));
    }

    #[test]
    fn split_semiprime() {
        let n = 1_000_000_007u128 * 998_244_353u128;
        let d = split(n).unwrap();
        assert!(d == 1_000_000_007 || d == 998_244_353);
    }

    #[test]
    fn isqrt_edges() {
        assert_eq!(isqrt(0), 0);
        assert_eq!(isqrt(15), 3);
        assert_eq!(isqrt(16), 4);
        assert_eq!(isqrt(u128::MAX), u64::MAX as u128);
    }
}
