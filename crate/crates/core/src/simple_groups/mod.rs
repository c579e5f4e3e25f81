//! Orders and outer automorphism groups of the finite simple groups.
//!
//! Lie-type groups carry a defining characteristic `p`, the exponent `f`
//! with `p^f` the size of the field of definition, and the parameter `q`
//! appearing in the order formula. For the untwisted families `q = p^f`;
//! for `2A_n`, `2D_n` and `2E6` one has `q^2 = p^f`; for `3D4`, `q^3 = p^f`;
//! for the Suzuki and Ree groups `q = p^f` with `f` odd.

mod sporadic;

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::number_theory::{
    factor_power_minus_one, factor_power_plus_one, factorize_u128, gcd, pow_mod, prime_power,
    FactoredInteger,
};

pub use sporadic::Sporadic;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Alt,
    Sporadic,
    A,
    TwistedA,
    B,
    C,
    D,
    TwistedD,
    Triality,
    E6,
    TwistedE6,
    E7,
    E8,
    F4,
    G2,
    Suzuki,
    Ree2F4,
    Tits,
    Ree2G2,
}

const FAMILY_NAMES: [(Family, &str); 19] = [
    (Family::Alt, "Alt"),
    (Family::Sporadic, "Sporadic"),
    (Family::A, "A"),
    (Family::TwistedA, "2A"),
    (Family::B, "B"),
    (Family::C, "C"),
    (Family::D, "D"),
    (Family::TwistedD, "2D"),
    (Family::Triality, "3D4"),
    (Family::E6, "E6"),
    (Family::TwistedE6, "2E6"),
    (Family::E7, "E7"),
    (Family::E8, "E8"),
    (Family::F4, "F4"),
    (Family::G2, "G2"),
    (Family::Suzuki, "2B2"),
    (Family::Ree2F4, "2F4"),
    (Family::Tits, "Tits"),
    (Family::Ree2G2, "2G2"),
];

impl Family {
    pub fn all() -> impl Iterator<Item = Family> {
        FAMILY_NAMES.iter().map(|&(f, _)| f)
    }

    pub fn name(self) -> &'static str {
        FAMILY_NAMES.iter().find(|(f, _)| *f == self).unwrap().1
    }

    /// Families indexed by a rank `n`.
    pub fn has_rank(self) -> bool {
        matches!(
            self,
            Family::A | Family::TwistedA | Family::B | Family::C | Family::D | Family::TwistedD
        )
    }

    pub fn is_lie_type(self) -> bool {
        !matches!(self, Family::Alt | Family::Sporadic | Family::Tits)
    }

    fn min_rank(self) -> u32 {
        match self {
            Family::A => 1,
            Family::TwistedA | Family::B => 2,
            Family::C => 3,
            Family::D | Family::TwistedD => 4,
            _ => 0,
        }
    }

    /// `f / e` where the field of definition is `GF(p^f)` and `q = p^e`.
    fn twist(self) -> u32 {
        match self {
            Family::TwistedA | Family::TwistedD | Family::TwistedE6 => 2,
            Family::Triality => 3,
            _ => 1,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Family {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().trim_end_matches("_n").to_ascii_lowercase();
        let key = match key.as_str() {
            "a_1" | "a1" => "a",
            "psl" => "a",
            "psu" => "2a",
            "suzuki" | "sz" => "2b2",
            "ree" => "2g2",
            "alternating" => "alt",
            other => other,
        }
        .to_string();
        FAMILY_NAMES
            .iter()
            .find(|(_, name)| name.to_ascii_lowercase() == key)
            .map(|&(f, _)| f)
            .ok_or_else(|| {
                let names: Vec<&str> = FAMILY_NAMES.iter().map(|&(_, n)| n).collect();
                Error::InvalidParameters(format!(
                    "unknown family `{s}` (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}

/// A simple group up to isomorphism type, by family and parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GroupSpec {
    pub family: Family,
    /// Lie rank, or the degree for alternating groups; 0 otherwise.
    pub n: u32,
    /// Defining characteristic; 0 for alternating and sporadic groups.
    pub p: u64,
    /// Field of definition is `GF(p^f)`.
    pub f: u32,
    /// Order-formula parameter; 0 for alternating and sporadic groups.
    pub q: u64,
    pub sporadic: Option<Sporadic>,
}

fn ipow(b: u64, e: u32) -> Result<u64> {
    b.checked_pow(e)
        .ok_or_else(|| Error::InvalidParameters(format!("{b}^{e} overflows 64 bits")))
}

impl GroupSpec {
    pub fn alt(n: u32) -> Result<Self> {
        if n < 5 {
            return Err(Error::InvalidParameters(format!(
                "alternating groups start at degree 5, got {n}"
            )));
        }
        Ok(GroupSpec {
            family: Family::Alt,
            n,
            p: 0,
            f: 0,
            q: 0,
            sporadic: None,
        })
    }

    pub fn sporadic(group: Sporadic) -> Self {
        GroupSpec {
            family: Family::Sporadic,
            n: 0,
            p: 0,
            f: 0,
            q: 0,
            sporadic: Some(group),
        }
    }

    pub fn tits() -> Self {
        GroupSpec {
            family: Family::Tits,
            n: 0,
            p: 2,
            f: 1,
            q: 2,
            sporadic: None,
        }
    }

    /// A Lie-type group from its rank and order-formula parameter `q`.
    ///
    /// The rank is ignored for families without one.
    pub fn lie(family: Family, n: u32, q: u64) -> Result<Self> {
        if !family.is_lie_type() {
            return Err(Error::InvalidParameters(format!(
                "{family} is not a Lie-type family"
            )));
        }
        let (p, e) = prime_power(q)
            .ok_or_else(|| Error::InvalidParameters(format!("q = {q} is not a prime power")))?;
        let n = if family.has_rank() {
            if n < family.min_rank() {
                return Err(Error::InvalidParameters(format!(
                    "{family}_n requires n >= {}, got {n}",
                    family.min_rank()
                )));
            }
            n
        } else {
            0
        };
        match family {
            Family::Suzuki | Family::Ree2F4 if p != 2 || e % 2 == 0 => {
                return Err(Error::InvalidParameters(format!(
                    "{family} requires q = 2^(2k+1), got {q}"
                )))
            }
            Family::Ree2G2 if p != 3 || e % 2 == 0 => {
                return Err(Error::InvalidParameters(format!(
                    "2G2 requires q = 3^(2k+1), got {q}"
                )))
            }
            Family::Ree2F4 | Family::Ree2G2 if e == 1 => {
                return Err(Error::InvalidParameters(format!(
                    "{family}({q}) needs k >= 1"
                )))
            }
            _ => {}
        }
        Ok(GroupSpec {
            family,
            n,
            p,
            f: e * family.twist(),
            q,
            sporadic: None,
        })
    }

    /// A Lie-type group from its characteristic and field exponent `f`.
    pub fn lie_from_field(family: Family, n: u32, p: u64, f: u32) -> Result<Self> {
        let t = family.twist();
        if f == 0 || !f.is_multiple_of(t) {
            return Err(Error::InvalidParameters(format!(
                "{family} needs f divisible by {t}, got {f}"
            )));
        }
        let spec = Self::lie(family, n, ipow(p, f / t)?)?;
        if spec.p != p {
            return Err(Error::InvalidParameters(format!("{p} is not prime")));
        }
        Ok(spec)
    }

    /// `e` with `q = p^e`.
    pub fn e(&self) -> u32 {
        self.f / self.family.twist().max(1)
    }

    /// Exponent `k` with `q = 2^(2k+1)` or `3^(2k+1)`.
    fn ree_k(&self) -> u32 {
        (self.f - 1) / 2
    }

    /// The divisor `d` of the order formula.
    pub fn d(&self) -> u64 {
        let q = self.q as u128;
        let n = self.n as u128;
        let g = |a: u128, b: u128| gcd(a, b) as u64;
        match self.family {
            Family::A => g(n + 1, q - 1),
            Family::TwistedA => g(n + 1, q + 1),
            Family::B | Family::C | Family::E7 => g(2, q - 1),
            Family::D => g(4, (pow_mod(q, n, 4) + 3) % 4),
            Family::TwistedD => g(4, (pow_mod(q, n, 4) + 1) % 4),
            Family::E6 => g(3, q - 1),
            Family::TwistedE6 => g(3, q + 1),
            _ => 1,
        }
    }

    /// The graph factor of `|Out(B_n(q))|`.
    pub fn g(&self) -> u64 {
        if self.family == Family::B && self.n == 2 && self.p == 2 {
            2
        } else {
            1
        }
    }

    /// Small-parameter members of the families that are not simple.
    pub fn is_simple(&self) -> bool {
        !matches!(
            (self.family, self.n, self.q),
            (Family::A, 1, 2 | 3)
                | (Family::TwistedA, 2, 2)
                | (Family::Suzuki, _, 2)
                | (Family::B, 2, 2)
                | (Family::G2, _, 2)
        )
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Alt => write!(f, "Alt({})", self.n),
            Family::Sporadic => write!(f, "{}", self.sporadic.expect("sporadic spec")),
            Family::Tits => write!(f, "2F4(2)'"),
            fam if fam.has_rank() => write!(f, "{}_{}({})", fam, self.n, self.q),
            fam => write!(f, "{}({})", fam, self.q),
        }
    }
}

/// Order and outer automorphism data for a group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupFacts {
    pub order: FactoredInteger,
    pub out_order: u64,
    pub out_abelian: bool,
    /// Upper bound on `|K/K'|` over all subgroups `K` of `Out(G)`.
    pub kk_bound: u64,
    /// Out-abelianness taken from a machine computation rather than from
    /// the structure of `Out(G)`.
    pub computer_verified: bool,
}

#[derive(Clone, Copy)]
enum Term {
    Minus(u32),
    Plus(u32),
}

fn order_terms(spec: &GroupSpec) -> (u32, Vec<Term>) {
    use Term::*;
    let n = spec.n;
    match spec.family {
        Family::A => (n * (n + 1) / 2, (2..=n + 1).map(Minus).collect()),
        Family::TwistedA => (
            n * (n + 1) / 2,
            (2..=n + 1)
                .map(|i| if i % 2 == 0 { Minus(i) } else { Plus(i) })
                .collect(),
        ),
        Family::B | Family::C => (n * n, (1..=n).map(|i| Minus(2 * i)).collect()),
        Family::D => (
            n * (n - 1),
            std::iter::once(Minus(n))
                .chain((1..n).map(|i| Minus(2 * i)))
                .collect(),
        ),
        Family::TwistedD => (
            n * (n - 1),
            std::iter::once(Plus(n))
                .chain((1..n).map(|i| Minus(2 * i)))
                .collect(),
        ),
        Family::G2 => (6, vec![Minus(6), Minus(2)]),
        Family::F4 => (24, vec![Minus(12), Minus(8), Minus(6), Minus(2)]),
        Family::E6 => (
            36,
            vec![Minus(12), Minus(9), Minus(8), Minus(6), Minus(5), Minus(2)],
        ),
        Family::TwistedE6 => (
            36,
            vec![Minus(12), Plus(9), Minus(8), Minus(6), Plus(5), Minus(2)],
        ),
        Family::E7 => (
            63,
            vec![
                Minus(18),
                Minus(14),
                Minus(12),
                Minus(10),
                Minus(8),
                Minus(6),
                Minus(2),
            ],
        ),
        Family::E8 => (
            120,
            vec![
                Minus(30),
                Minus(24),
                Minus(20),
                Minus(18),
                Minus(14),
                Minus(12),
                Minus(8),
                Minus(2),
            ],
        ),
        // q^8 + q^4 + 1 enters as (q^12 - 1) / (q^4 - 1)
        Family::Triality => (12, vec![Minus(12), Minus(6), Minus(2)]),
        Family::Suzuki => (2, vec![Plus(2), Minus(1)]),
        Family::Ree2F4 => (12, vec![Plus(6), Minus(4), Plus(3), Minus(1)]),
        Family::Ree2G2 => (3, vec![Plus(3), Minus(1)]),
        Family::Alt | Family::Sporadic | Family::Tits => (0, Vec::new()),
    }
}

fn alt_order(n: u32) -> Result<FactoredInteger> {
    let mut acc = FactoredInteger::one();
    for k in 3..=n as u128 {
        acc = acc.mul(&factorize_u128(k)?);
    }
    Ok(acc)
}

/// `|G|`, exactly factored.
pub fn group_order(spec: &GroupSpec) -> Result<FactoredInteger> {
    match spec.family {
        Family::Alt => return alt_order(spec.n),
        Family::Sporadic => {
            let s = spec
                .sporadic
                .ok_or_else(|| Error::InvalidParameters("sporadic spec without a name".into()))?;
            return FactoredInteger::from_prime_powers(s.order_factors().to_vec());
        }
        Family::Tits => {
            return FactoredInteger::from_prime_powers(vec![(2, 11), (3, 3), (5, 2), (13, 1)])
        }
        _ => {}
    }
    let (p, e) = (spec.p, spec.e());
    let (qpow, terms) = order_terms(spec);
    let mut acc = FactoredInteger::prime(p as u128).pow(qpow * e);
    for t in terms {
        let piece = match t {
            Term::Minus(k) => factor_power_minus_one(p, k * e)?,
            Term::Plus(k) => factor_power_plus_one(p, k * e)?,
        };
        acc = acc.mul(&piece);
    }
    let mut divisor = factorize_u128(spec.d() as u128)?;
    if spec.family == Family::Triality {
        divisor = divisor.mul(&factor_power_minus_one(p, 4 * e)?);
    }
    acc.div_exact(&divisor)
        .ok_or_else(|| Error::InvalidParameters(format!("divisor does not divide |{spec}|")))
}

/// `|Out(G)|` with its abelianness and the derived `|K/K'|` bound.
pub fn out_order(spec: &GroupSpec) -> Result<GroupFacts> {
    let order = group_order(spec)?;
    let f = spec.f as u64;
    let d = spec.d();
    let two_q = gcd(2, spec.q as u128 + 1) as u64; // (2, q - 1)
    let mut computer_verified = false;
    let (out, abelian) = match spec.family {
        Family::Alt => (if spec.n == 6 { 4 } else { 2 }, true),
        Family::Sporadic => (spec.sporadic.map(Sporadic::out_order).unwrap_or(1), true),
        Family::Tits => (2, true),
        Family::A if spec.n == 1 => (d * f, true),
        Family::A => (2 * f * d, d <= 2),
        Family::TwistedA => {
            computer_verified = matches!((spec.n, spec.q), (2, 8) | (3, 3));
            (d * f, d <= 2)
        }
        Family::B => (d * f * spec.g(), true),
        Family::C => (d * f, true),
        Family::D if spec.n == 4 => (two_q * two_q * f * 6, false),
        Family::D if spec.n.is_multiple_of(2) => (two_q * two_q * f * 2, spec.p == 2),
        Family::D => (d * f * 2, d <= 2),
        Family::TwistedD => (d * f, d <= 2),
        Family::Triality => (f, true),
        Family::E6 => (d * f * 2, d == 1),
        Family::TwistedE6 => (d * f, d == 1),
        Family::E7 => (d * f, true),
        Family::E8 => (f, true),
        Family::F4 => (if spec.p == 2 { 2 * f } else { f }, true),
        Family::G2 => (if spec.p == 3 { 2 * f } else { f }, true),
        Family::Suzuki | Family::Ree2F4 | Family::Ree2G2 => (2 * spec.ree_k() as u64 + 1, true),
    };
    Ok(GroupFacts {
        order,
        out_order: out,
        out_abelian: abelian,
        kk_bound: if abelian { out } else { out / 2 },
        computer_verified,
    })
}

fn prime_powers_up_to(q_max: u64) -> Vec<u64> {
    (2..=q_max).filter(|&q| prime_power(q).is_some()).collect()
}

/// Every valid spec of `family` with rank at most `n_max` and order-formula
/// parameter at most `q_max` (degree at most `n_max` for `Alt`).
pub fn enumerate_specs(family: Family, n_max: u32, q_max: u64) -> Vec<GroupSpec> {
    match family {
        Family::Alt => (5..=n_max).filter_map(|n| GroupSpec::alt(n).ok()).collect(),
        Family::Sporadic => Sporadic::all().map(GroupSpec::sporadic).collect(),
        Family::Tits => vec![GroupSpec::tits()],
        fam => {
            let ranks: Vec<u32> = if fam.has_rank() {
                (fam.min_rank()..=n_max).collect()
            } else {
                vec![0]
            };
            let mut out = Vec::new();
            for &n in &ranks {
                for q in prime_powers_up_to(q_max) {
                    if fam == Family::TwistedA && n == 2 && q == 2 {
                        continue;
                    }
                    if let Ok(spec) = GroupSpec::lie(fam, n, q) {
                        if fam == Family::Suzuki && q == 2 {
                            continue;
                        }
                        out.push(spec);
                    }
                }
            }
            out
        }
    }
}
