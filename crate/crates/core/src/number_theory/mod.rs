//! Exact factorization, multiplicative orders and Zsigmondy primes.

mod arith;
mod cyclotomic;
mod factor;
mod order;
mod zsigmondy;

pub use arith::{gcd, is_prime_u64, isqrt, pow_mod, split, TRIAL_LIMIT};
pub use cyclotomic::{
    cyclotomic_value, divisors, factor_cyclotomic, factor_power_minus_one, factor_power_plus_one,
    mobius,
};
pub use factor::{factorize, factorize_u128, is_prime, FactoredInteger};
pub use order::{has_order, multiplicative_order};
pub use zsigmondy::{
    exception_member, expectation, prime_power, qualifying_witness, scan_window,
    zsigmondy_primes, Cell, CellError, CellWitness, Expectation, QualifyingWitness, ScanReport,
    TableId, Verdict, Verdicts, Window, WitnessKind, ZsigmondyPrime, ZsigmondyReport,
};

use num_bigint::BigUint;
use serde::Serializer;

/// Primality of a 128-bit integer.
pub fn is_prime_u128(n: u128) -> crate::Result<bool> {
    arith::is_prime(n)
}

pub(crate) fn decimal<S: Serializer>(v: &u128, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub(crate) fn decimal_big<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}
