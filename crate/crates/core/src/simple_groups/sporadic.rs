use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sporadic {
    M11,
    M12,
    J1,
    M22,
    J2,
    M23,
    HS,
    J3,
    M24,
    McL,
    He,
    Ru,
    Suz,
    ON,
    Co3,
    Co2,
    Fi22,
    HN,
    Ly,
    Th,
    Fi23,
    Co1,
    J4,
    Fi24,
    B,
    M,
}

struct Entry {
    group: Sporadic,
    name: &'static str,
    order: &'static [(u128, u32)],
    out: u64,
}

macro_rules! entry {
    ($g:ident, $name:literal, $out:literal, [$(($p:literal, $e:literal)),+ $(,)?]) => {
        Entry { group: Sporadic::$g, name: $name, order: &[$(($p, $e)),+], out: $out }
    };
}

const TABLE: [Entry; 26] = [
    entry!(M11, "M11", 1, [(2, 4), (3, 2), (5, 1), (11, 1)]),
    entry!(M12, "M12", 2, [(2, 6), (3, 3), (5, 1), (11, 1)]),
    entry!(J1, "J1", 1, [(2, 3), (3, 1), (5, 1), (7, 1), (11, 1), (19, 1)]),
    entry!(M22, "M22", 2, [(2, 7), (3, 2), (5, 1), (7, 1), (11, 1)]),
    entry!(J2, "J2", 2, [(2, 7), (3, 3), (5, 2), (7, 1)]),
    entry!(M23, "M23", 1, [(2, 7), (3, 2), (5, 1), (7, 1), (11, 1), (23, 1)]),
    entry!(HS, "HS", 2, [(2, 9), (3, 2), (5, 3), (7, 1), (11, 1)]),
    entry!(J3, "J3", 2, [(2, 7), (3, 5), (5, 1), (17, 1), (19, 1)]),
    entry!(M24, "M24", 1, [(2, 10), (3, 3), (5, 1), (7, 1), (11, 1), (23, 1)]),
    entry!(McL, "McL", 2, [(2, 7), (3, 6), (5, 3), (7, 1), (11, 1)]),
    entry!(He, "He", 2, [(2, 10), (3, 3), (5, 2), (7, 3), (17, 1)]),
    entry!(Ru, "Ru", 1, [(2, 14), (3, 3), (5, 3), (7, 1), (13, 1), (29, 1)]),
    entry!(Suz, "Suz", 2, [(2, 13), (3, 7), (5, 2), (7, 1), (11, 1), (13, 1)]),
    entry!(ON, "O'N", 2, [(2, 9), (3, 4), (5, 1), (7, 3), (11, 1), (19, 1), (31, 1)]),
    entry!(Co3, "Co3", 1, [(2, 10), (3, 7), (5, 3), (7, 1), (11, 1), (23, 1)]),
    entry!(Co2, "Co2", 1, [(2, 18), (3, 6), (5, 3), (7, 1), (11, 1), (23, 1)]),
    entry!(Fi22, "Fi22", 2, [(2, 17), (3, 9), (5, 2), (7, 1), (11, 1), (13, 1)]),
    entry!(HN, "HN", 2, [(2, 14), (3, 6), (5, 6), (7, 1), (11, 1), (19, 1)]),
    entry!(Ly, "Ly", 1, [(2, 8), (3, 7), (5, 6), (7, 1), (11, 1), (31, 1), (37, 1), (67, 1)]),
    entry!(Th, "Th", 1, [(2, 15), (3, 10), (5, 3), (7, 2), (13, 1), (19, 1), (31, 1)]),
    entry!(
        Fi23,
        "Fi23",
        1,
        [(2, 18), (3, 13), (5, 2), (7, 1), (11, 1), (13, 1), (17, 1), (23, 1)]
    ),
    entry!(
        Co1,
        "Co1",
        1,
        [(2, 21), (3, 9), (5, 4), (7, 2), (11, 1), (13, 1), (23, 1)]
    ),
    entry!(
        J4,
        "J4",
        1,
        [(2, 21), (3, 3), (5, 1), (7, 1), (11, 3), (23, 1), (29, 1), (31, 1), (37, 1), (43, 1)]
    ),
    entry!(
        Fi24,
        "Fi24'",
        2,
        [(2, 21), (3, 16), (5, 2), (7, 3), (11, 1), (13, 1), (17, 1), (23, 1), (29, 1)]
    ),
    entry!(
        B,
        "B",
        1,
        [
            (2, 41), (3, 13), (5, 6), (7, 2), (11, 1), (13, 1), (17, 1), (19, 1), (23, 1),
            (31, 1), (47, 1)
        ]
    ),
    entry!(
        M,
        "M",
        1,
        [
            (2, 46), (3, 20), (5, 9), (7, 6), (11, 2), (13, 3), (17, 1), (19, 1), (23, 1),
            (29, 1), (31, 1), (41, 1), (47, 1), (59, 1), (71, 1)
        ]
    ),
];

impl Sporadic {
    pub fn all() -> impl Iterator<Item = Sporadic> {
        TABLE.iter().map(|e| e.group)
    }

    fn entry(self) -> &'static Entry {
        &TABLE[self as usize]
    }

    pub fn name(self) -> &'static str {
        self.entry().name
    }

    pub fn order_factors(self) -> &'static [(u128, u32)] {
        self.entry().order
    }

    pub fn out_order(self) -> u64 {
        self.entry().out
    }
}

impl fmt::Display for Sporadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Sporadic {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl FromStr for Sporadic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = |x: &str| x.replace(['\'', '_', ' '], "").to_ascii_lowercase();
        let key = norm(s);
        TABLE
            .iter()
            .find(|e| norm(e.name) == key)
            .map(|e| e.group)
            .ok_or_else(|| Error::InvalidParameters(format!("unknown sporadic group `{s}`")))
    }
}
