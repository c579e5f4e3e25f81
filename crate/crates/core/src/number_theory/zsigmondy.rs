use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::arith::{self, small_primes};
use super::cyclotomic::cyclotomic_value;
use super::factor::{factor_u64, factorize, rem_small};
use super::{decimal, decimal_big};
use crate::error::{Error, Result};

const WITNESS_RHO_BUDGET: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TableId {
    FeitThm31,
    LargerThm32,
    Cor33,
    Cor34,
    Cor35,
    Cor36,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Rule {
    /// Zsigmondy primes only; `l >= t` or `l^2 | a^m - 1`.
    Zsigmondy,
    /// Every prime of `a^m - 1`; `l >= t` or `l^2 | a^m - 1` with `l^2 >= t`.
    AllPrimes,
}

impl TableId {
    pub const ALL: [TableId; 6] = [
        TableId::FeitThm31,
        TableId::LargerThm32,
        TableId::Cor33,
        TableId::Cor34,
        TableId::Cor35,
        TableId::Cor36,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TableId::FeitThm31 => "feit_thm31",
            TableId::LargerThm32 => "larger_thm32",
            TableId::Cor33 => "cor33",
            TableId::Cor34 => "cor34",
            TableId::Cor35 => "cor35",
            TableId::Cor36 => "cor36",
        }
    }

    /// The `cor*` tables range over prime-power bases only.
    pub fn prime_powers_only(self) -> bool {
        !matches!(self, TableId::FeitThm31 | TableId::LargerThm32)
    }

    fn rule(self, m: u32) -> (Rule, u64) {
        let m = m as u64;
        match self {
            TableId::FeitThm31 | TableId::Cor33 => (Rule::Zsigmondy, 2 * m + 1),
            TableId::LargerThm32 | TableId::Cor35 => (Rule::Zsigmondy, 3 * m + 1),
            TableId::Cor34 => (Rule::AllPrimes, 2 * m + 1),
            TableId::Cor36 => (Rule::AllPrimes, 3 * m),
        }
    }

    fn listed(self, base: u64, m: u32) -> bool {
        let along = |b: u64, ms: &[u32]| base == b && ms.contains(&m);
        match self {
            TableId::FeitThm31 | TableId::Cor33 => {
                along(2, &[4, 6, 10, 12, 18]) || along(3, &[4, 6]) || along(5, &[6])
            }
            TableId::LargerThm32 | TableId::Cor35 => {
                along(2, &[3, 4, 6, 8, 10, 12, 18, 20])
                    || along(3, &[4, 6])
                    || along(4, &[3, 6])
                    || along(5, &[6])
            }
            TableId::Cor34 => along(2, &[4, 6, 12]) || along(3, &[4]),
            TableId::Cor36 => {
                along(2, &[3, 4, 6, 8, 12, 20]) || along(3, &[4, 6]) || along(4, &[6])
            }
        }
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TableId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TableId::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = TableId::ALL.iter().map(|t| t.as_str()).collect();
                Error::InvalidArgument(format!(
                    "unknown table `{s}` (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}

/// How a window cell is expected to behave under a table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    /// Listed explicitly; no qualifying prime may exist.
    MustFail,
    /// Covered only by the blanket `m = 2` exclusion of a `cor*` table.
    MayFail,
    MustHold,
}

/// `a + 1 = 2^s * 3^t` with `t` in `{0, 1}`.
fn is_two_three_family(a: u64) -> bool {
    let mut b = a as u128 + 1;
    if b.is_multiple_of(3) {
        b /= 3;
    }
    b.is_power_of_two()
}

/// `(p, k)` with `n = p^k`, if `n` is a prime power.
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    match factor_u64(n).as_slice() {
        [(p, k)] => Some((*p, *k)),
        _ => None,
    }
}

fn check_inputs(base: u64, m: u32) -> Result<()> {
    if base <= 1 {
        return Err(Error::InvalidArgument(format!("base must exceed 1, got {base}")));
    }
    if m <= 1 {
        return Err(Error::InvalidArgument(format!("exponent must exceed 1, got {m}")));
    }
    Ok(())
}

pub fn expectation(table: TableId, base: u64, m: u32) -> Result<Expectation> {
    check_inputs(base, m)?;
    if table.prime_powers_only() && prime_power(base).is_none() {
        return Err(Error::NotPrimePower(base));
    }
    if table.listed(base, m) {
        return Ok(Expectation::MustFail);
    }
    if m == 2 {
        return Ok(if table.prime_powers_only() {
            Expectation::MayFail
        } else if is_two_three_family(base) {
            Expectation::MustFail
        } else {
            Expectation::MustHold
        });
    }
    Ok(Expectation::MustHold)
}

/// Membership of `(base, m)` in the exception list of `table`.
pub fn exception_member(table: TableId, base: u64, m: u32) -> Result<bool> {
    Ok(expectation(table, base, m)? != Expectation::MustHold)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    Prime,
    /// A number above the trial-division limit that could not be split
    /// within budget; every prime factor of it qualifies.
    Cofactor,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QualifyingWitness {
    #[serde(serialize_with = "decimal_big")]
    pub value: BigUint,
    pub kind: WitnessKind,
}

impl QualifyingWitness {
    fn prime(l: u128) -> Self {
        QualifyingWitness {
            value: BigUint::from(l),
            kind: WitnessKind::Prime,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<QualifyingWitness>,
}

impl From<Option<QualifyingWitness>> for Verdict {
    fn from(witness: Option<QualifyingWitness>) -> Self {
        Verdict {
            holds: witness.is_some(),
            witness,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ZsigmondyPrime {
    #[serde(serialize_with = "decimal")]
    pub prime: u128,
    pub multiplicity: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdicts {
    pub feit_large: Verdict,
    pub larger_3m1: Verdict,
    pub cor34: Verdict,
    pub cor36: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZsigmondyReport {
    pub base: u64,
    pub m: u32,
    pub zsigmondy_primes: Vec<ZsigmondyPrime>,
    pub verdicts: Verdicts,
}

/// `Phi_m(a)` with every prime of `m` removed: exactly the product of the
/// Zsigmondy prime powers of `(a, m)`.
fn zsigmondy_part(a: u64, m: u32) -> BigUint {
    let mut n = cyclotomic_value(a, m);
    for (r, _) in factor_u64(m as u64) {
        let r = BigUint::from(r);
        while (&n % &r).is_zero() {
            n /= &r;
        }
    }
    n
}

pub fn zsigmondy_primes(a: u64, m: u32) -> Result<ZsigmondyReport> {
    check_inputs(a, m)?;
    let part = factorize(&zsigmondy_part(a, m))?;
    let primes: Vec<ZsigmondyPrime> = part
        .factors()
        .iter()
        .map(|&(prime, multiplicity)| ZsigmondyPrime { prime, multiplicity })
        .collect();
    let pick = |t: u128| {
        primes
            .iter()
            .find(|z| z.prime >= t || z.multiplicity >= 2)
            .map(|z| QualifyingWitness::prime(z.prime))
    };
    let m128 = m as u128;
    let verdicts = Verdicts {
        feit_large: pick(2 * m128 + 1).into(),
        larger_3m1: pick(3 * m128 + 1).into(),
        cor34: decide(Rule::AllPrimes, 2 * m as u64 + 1, a, m)?.into(),
        cor36: decide(Rule::AllPrimes, 3 * m as u64, a, m)?.into(),
    };
    Ok(ZsigmondyReport {
        base: a,
        m,
        zsigmondy_primes: primes,
        verdicts,
    })
}

fn strip(n: &mut BigUint, l: u64) -> u32 {
    let bl = BigUint::from(l);
    let mut k = 0;
    while rem_small(&n.to_u64_digits(), l) == 0 {
        *n /= &bl;
        k += 1;
    }
    k
}

/// Smallest prime factor of `rest`, all of whose prime factors are at least
/// `from`; only primes `= 1 (mod step)` are tried.
fn smallest_factor(rest: &BigUint, from: u64, step: u64) -> Result<QualifyingWitness> {
    let digits = rest.to_u64_digits();
    let small = rest.to_u128();
    for &l in small_primes() {
        let l = l as u64;
        if l < from || l % step != 1 % step {
            continue;
        }
        if small.is_some_and(|r| (l as u128) * (l as u128) > r) {
            break;
        }
        if rem_small(&digits, l) == 0 {
            return Ok(QualifyingWitness::prime(l as u128));
        }
    }
    match small {
        Some(r) => match arith::try_factor(r, WITNESS_RHO_BUDGET)? {
            Some(ps) => Ok(QualifyingWitness::prime(ps[0])),
            None => Ok(QualifyingWitness {
                value: rest.clone(),
                kind: WitnessKind::Cofactor,
            }),
        },
        None => Ok(QualifyingWitness {
            value: rest.clone(),
            kind: WitnessKind::Cofactor,
        }),
    }
}

fn decide(rule: Rule, t: u64, a: u64, m: u32) -> Result<Option<QualifyingWitness>> {
    let (mut n, step) = match rule {
        Rule::Zsigmondy => (zsigmondy_part(a, m), m as u64),
        Rule::AllPrimes => (BigUint::from(a).pow(m) - 1u32, 1),
    };
    for &l in small_primes() {
        let l = l as u64;
        if l >= t {
            break;
        }
        if step > 1 && l % step != 1 {
            continue;
        }
        let k = strip(&mut n, l);
        if k >= 2 && (rule == Rule::Zsigmondy || l * l >= t) {
            return Ok(Some(QualifyingWitness::prime(l as u128)));
        }
    }
    if n.is_one() {
        return Ok(None);
    }
    smallest_factor(&n, t, step).map(Some)
}

/// Smallest qualifying prime of `(base, m)` under `table`, or `None` when
/// the cell has none.
pub fn qualifying_witness(
    table: TableId,
    base: u64,
    m: u32,
) -> Result<Option<QualifyingWitness>> {
    check_inputs(base, m)?;
    if table.prime_powers_only() && prime_power(base).is_none() {
        return Err(Error::NotPrimePower(base));
    }
    let (rule, t) = table.rule(m);
    decide(rule, t, base, m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Cell {
    pub base: u64,
    pub m: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellWitness {
    pub base: u64,
    pub m: u32,
    #[serde(serialize_with = "decimal_big")]
    pub prime: BigUint,
    pub kind: WitnessKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellError {
    pub base: u64,
    pub m: u32,
    pub error: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Window {
    pub base_max: u64,
    pub m_max: u32,
    pub prime_powers_only: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanReport {
    pub table: TableId,
    pub window: Window,
    /// Cells with no qualifying prime.
    pub exceptions: Vec<Cell>,
    pub witnesses: Vec<CellWitness>,
    /// Failing cells outside the exception list.
    pub unexpected: Vec<Cell>,
    /// Explicitly listed cells that nevertheless have a qualifying prime.
    pub missing: Vec<Cell>,
    pub errors: Vec<CellError>,
    pub confirmed: bool,
}

impl ScanReport {
    /// One `table base m` line per exception, sorted.
    pub fn golden_lines(&self) -> String {
        self.exceptions
            .iter()
            .map(|c| format!("{} {} {}\n", self.table, c.base, c.m))
            .collect()
    }
}

enum Outcome {
    Fails(Expectation),
    Holds(QualifyingWitness, Expectation),
    Errored(Error),
}

/// Scans every `(base, m)` with `2 <= base <= base_max`, `2 <= m <= m_max`.
///
/// The `cor*` tables always skip bases that are not prime powers. The scan is
/// confirmed when every explicitly listed cell fails and every failing cell
/// is listed (the blanket `m = 2` exclusion of the `cor*` tables counts as
/// listed).
pub fn scan_window(
    table: TableId,
    base_max: u64,
    m_max: u32,
    prime_powers_only: bool,
) -> ScanReport {
    let restrict = prime_powers_only || table.prime_powers_only();
    let cells: Vec<Cell> = (2..=base_max)
        .filter(|&b| !restrict || prime_power(b).is_some())
        .flat_map(|base| (2..=m_max).map(move |m| Cell { base, m }))
        .collect();
    let outcomes: Vec<(Cell, Outcome)> = cells
        .into_par_iter()
        .map(|c| {
            let run = || -> Result<Outcome> {
                let exp = expectation(table, c.base, c.m)?;
                Ok(match qualifying_witness(table, c.base, c.m)? {
                    Some(w) => Outcome::Holds(w, exp),
                    None => Outcome::Fails(exp),
                })
            };
            (c, run().unwrap_or_else(Outcome::Errored))
        })
        .collect();

    let mut report = ScanReport {
        table,
        window: Window {
            base_max,
            m_max,
            prime_powers_only: restrict,
        },
        exceptions: Vec::new(),
        witnesses: Vec::new(),
        unexpected: Vec::new(),
        missing: Vec::new(),
        errors: Vec::new(),
        confirmed: false,
    };
    for (c, outcome) in outcomes {
        match outcome {
            Outcome::Fails(exp) => {
                report.exceptions.push(c);
                if exp == Expectation::MustHold {
                    report.unexpected.push(c);
                }
            }
            Outcome::Holds(w, exp) => {
                if exp == Expectation::MustFail {
                    report.missing.push(c);
                }
                report.witnesses.push(CellWitness {
                    base: c.base,
                    m: c.m,
                    prime: w.value,
                    kind: w.kind,
                });
            }
            Outcome::Errored(e) => report.errors.push(CellError {
                base: c.base,
                m: c.m,
                error: e.to_string(),
            }),
        }
    }
    report.exceptions.sort_unstable();
    report.unexpected.sort_unstable();
    report.missing.sort_unstable();
    report.witnesses.sort_by_key(|w| (w.base, w.m));
    report.errors.sort_by_key(|e| (e.base, e.m));
    report.confirmed =
        report.unexpected.is_empty() && report.missing.is_empty() && report.errors.is_empty();
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn primes_of(r: &ZsigmondyReport) -> Vec<(u128, u32)> {
        r.zsigmondy_primes
            .iter()
            .map(|z| (z.prime, z.multiplicity))
            .collect()
    }

    #[test]
    fn no_zsigmondy_prime_for_2_6() {
        assert!(zsigmondy_primes(2, 6).unwrap().zsigmondy_primes.is_empty());
    }

    #[test]
    fn zsigmondy_2_12_and_2_20() {
        assert_eq!(primes_of(&zsigmondy_primes(2, 12).unwrap()), vec![(13, 1)]);
        let r = zsigmondy_primes(2, 20).unwrap();
        assert_eq!(primes_of(&r), vec![(41, 1)]);
        assert!(r.verdicts.feit_large.holds);
        assert!(!r.verdicts.larger_3m1.holds);
    }

    #[test]
    fn square_multiplicity_kept() {
        // 5^2 - 1 = 2^3 * 3, and 2 divides m
        let r = zsigmondy_primes(5, 2).unwrap();
        assert_eq!(primes_of(&r), vec![(3, 1)]);
        // 7^3 - 1 = 342 = 2 * 3^2 * 19; 19 is Zsigmondy
        let r = zsigmondy_primes(7, 3).unwrap();
        assert_eq!(primes_of(&r), vec![(19, 1)]);
        // 2^21 - 1 = 7^2 * 127 * 337; order 21 primes: 337
        let r = zsigmondy_primes(2, 21).unwrap();
        assert_eq!(primes_of(&r), vec![(337, 1)]);
        // 3^5 - 1 = 2 * 11^2
        let r = zsigmondy_primes(3, 5).unwrap();
        assert_eq!(primes_of(&r), vec![(11, 2)]);
        assert_eq!(
            r.verdicts.feit_large.witness.unwrap().value,
            BigUint::from(11u32)
        );
    }

    #[test]
    fn rejects_degenerate_inputs() {
        assert!(zsigmondy_primes(1, 5).is_err());
        assert!(zsigmondy_primes(5, 1).is_err());
        assert!(exception_member(TableId::FeitThm31, 2, 1).is_err());
    }

    #[test]
    fn table_membership() {
        use TableId::*;
        assert!(exception_member(FeitThm31, 2, 4).unwrap());
        assert!(!exception_member(FeitThm31, 2, 5).unwrap());
        assert!(exception_member(LargerThm32, 4, 3).unwrap());
        assert!(exception_member(FeitThm31, 2, 2).unwrap());
        assert!(exception_member(FeitThm31, 23, 2).unwrap());
        assert!(!exception_member(FeitThm31, 9, 2).unwrap());
        assert!(!exception_member(FeitThm31, 17, 2).unwrap());
        assert_eq!(exception_member(Cor34, 6, 3), Err(Error::NotPrimePower(6)));
        assert_eq!(expectation(Cor34, 9, 2).unwrap(), Expectation::MayFail);
        assert_eq!(expectation(Cor34, 3, 4).unwrap(), Expectation::MustFail);
    }

    #[test]
    fn two_three_family() {
        let got: Vec<u64> = (2..100).filter(|&a| is_two_three_family(a)).collect();
        assert_eq!(got, vec![2, 3, 5, 7, 11, 15, 23, 31, 47, 63, 95]);
    }

    #[test]
    fn witnesses_are_smallest() {
        use TableId::*;
        // 2^12 - 1 = 3^2 * 5 * 7 * 13; all-primes rule with t = 25: 3^2 < 25
        assert_eq!(qualifying_witness(Cor34, 2, 12).unwrap(), None);
        // 4^2 - 1 = 15, t = 5 -> 5
        let w = qualifying_witness(Cor34, 4, 2).unwrap().unwrap();
        assert_eq!(w.value, BigUint::from(5u32));
        let w = qualifying_witness(FeitThm31, 2, 20).unwrap().unwrap();
        assert_eq!(w.value, BigUint::from(41u32));
        assert_eq!(qualifying_witness(LargerThm32, 2, 20).unwrap(), None);
    }

    #[test]
    fn small_scans() {
        let r = scan_window(TableId::LargerThm32, 2, 3, false);
        assert_eq!(r.exceptions, vec![Cell { base: 2, m: 2 }, Cell { base: 2, m: 3 }]);
        let r = scan_window(TableId::Cor34, 5, 6, true);
        let got: Vec<(u64, u32)> = r.exceptions.iter().map(|c| (c.base, c.m)).collect();
        assert_eq!(got, vec![(2, 2), (2, 4), (2, 6), (3, 2), (3, 4), (5, 2)]);
        assert!(r.confirmed);
        assert_eq!(r.golden_lines().lines().next(), Some("cor34 2 2"));
    }
}
