use std::str::FromStr;

use crate::error::{Error, Result};
use crate::simple_groups::{Family, GroupSpec};

const SUBCASES: &str = include_str!("../../data/subcases.txt");
const FACTORIZATIONS: &str = include_str!("../../data/printed_factorizations.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankField {
    Any,
    Exact(u32),
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldParam {
    Exact(u64),
    AnyPrime,
    OddPrime,
    OddPrimeSquare,
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrintedOut {
    Exact(u64),
    AtMost(u64),
    Unstated,
}

impl PrintedOut {
    pub fn agrees(self, actual: u64) -> bool {
        match self {
            PrintedOut::Exact(v) => v == actual,
            PrintedOut::AtMost(v) => actual <= v,
            PrintedOut::Unstated => true,
        }
    }
}

impl std::fmt::Display for PrintedOut {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PrintedOut::Exact(v) => write!(f, "={v}"),
            PrintedOut::AtMost(v) => write!(f, "<={v}"),
            PrintedOut::Unstated => write!(f, "-"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubcaseEntry {
    pub id: String,
    pub family: Family,
    pub n: RankField,
    pub q: FieldParam,
    pub printed_out: PrintedOut,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expression {
    PowerMinusOne(u64, u32),
    PowerPlusOne(u64, u32),
    Order(GroupSpec),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrintedFactorization {
    pub case: String,
    pub expression_text: String,
    pub expression: Expression,
    pub printed: Vec<u64>,
}

fn bad(line: &str, what: &str) -> Error {
    Error::InvalidArgument(format!("malformed data line `{line}`: {what}"))
}

fn data_lines(src: &str) -> impl Iterator<Item = &str> {
    src.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

fn parse_subcase(line: &str) -> Result<SubcaseEntry> {
    let t: Vec<&str> = line.split_whitespace().collect();
    let [id, family, n, q, out] = t[..] else {
        return Err(bad(line, "expected five fields"));
    };
    let family = Family::from_str(family)?;
    let n = match n {
        "*" => RankField::Any,
        "-" => RankField::NotApplicable,
        v => RankField::Exact(v.parse().map_err(|_| bad(line, "rank"))?),
    };
    let q = match q {
        "p" => FieldParam::AnyPrime,
        "p_odd" => FieldParam::OddPrime,
        "p^2_odd" => FieldParam::OddPrimeSquare,
        "-" => FieldParam::NotApplicable,
        v => FieldParam::Exact(v.parse().map_err(|_| bad(line, "q"))?),
    };
    let printed_out = if out == "-" {
        PrintedOut::Unstated
    } else if let Some(v) = out.strip_prefix("<=") {
        PrintedOut::AtMost(v.parse().map_err(|_| bad(line, "bound"))?)
    } else if let Some(v) = out.strip_prefix('=') {
        PrintedOut::Exact(v.parse().map_err(|_| bad(line, "value"))?)
    } else {
        return Err(bad(line, "printed |Out|"));
    };
    Ok(SubcaseEntry {
        id: id.to_string(),
        family,
        n,
        q,
        printed_out,
    })
}

/// Parses `A_1(4)`, `2A_3(9)`, `G2(8)` or `Alt(6)`.
pub fn parse_spec(text: &str) -> Result<GroupSpec> {
    let err = || Error::InvalidParameters(format!("cannot parse group `{text}`"));
    let (head, arg) = text
        .strip_suffix(')')
        .and_then(|s| s.split_once('('))
        .ok_or_else(err)?;
    let arg: u64 = arg.parse().map_err(|_| err())?;
    if head == "Alt" {
        return GroupSpec::alt(arg as u32);
    }
    let (fam, n) = match head.split_once('_') {
        Some((fam, n)) => (fam, n.parse().map_err(|_| err())?),
        None => (head, 0),
    };
    GroupSpec::lie(Family::from_str(fam)?, n, arg)
}

fn parse_expression(text: &str, line: &str) -> Result<Expression> {
    if let Some(inner) = text.strip_prefix('|').and_then(|s| s.strip_suffix('|')) {
        return Ok(Expression::Order(parse_spec(inner)?));
    }
    let (base, rest) = text.split_once('^').ok_or_else(|| bad(line, "expression"))?;
    let base: u64 = base.parse().map_err(|_| bad(line, "base"))?;
    let (exp, plus) = if let Some(e) = rest.strip_suffix("-1") {
        (e, false)
    } else if let Some(e) = rest.strip_suffix("+1") {
        (e, true)
    } else {
        return Err(bad(line, "expected a^k-1 or a^k+1"));
    };
    let exp: u32 = exp.parse().map_err(|_| bad(line, "exponent"))?;
    Ok(if plus {
        Expression::PowerPlusOne(base, exp)
    } else {
        Expression::PowerMinusOne(base, exp)
    })
}

fn parse_factorization(line: &str) -> Result<PrintedFactorization> {
    let t: Vec<&str> = line.split_whitespace().collect();
    let [case, expr, printed] = t[..] else {
        return Err(bad(line, "expected three fields"));
    };
    let printed = printed
        .split('*')
        .map(|x| x.parse::<u64>().map_err(|_| bad(line, "printed factor")))
        .collect::<Result<Vec<_>>>()?;
    Ok(PrintedFactorization {
        case: case.to_string(),
        expression_text: expr.to_string(),
        expression: parse_expression(expr, line)?,
        printed,
    })
}

pub fn subcases() -> Vec<SubcaseEntry> {
    data_lines(SUBCASES)
        .map(|l| parse_subcase(l).expect("embedded subcase table is well formed"))
        .collect()
}

pub fn printed_factorizations() -> Vec<PrintedFactorization> {
    data_lines(FACTORIZATIONS)
        .map(|l| parse_factorization(l).expect("embedded factorization table is well formed"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_parse() {
        assert!(subcases().len() > 100);
        assert!(printed_factorizations().len() > 200);
    }

    #[test]
    fn spec_strings() {
        assert_eq!(parse_spec("A_1(4)").unwrap().to_string(), "A_1(4)");
        assert_eq!(parse_spec("2A_3(3)").unwrap().f, 2);
        assert_eq!(parse_spec("G2(8)").unwrap().to_string(), "G2(8)");
        assert!(parse_spec("A_1(6)").is_err());
        assert!(parse_spec("nonsense").is_err());
    }

    #[test]
    fn printed_bounds() {
        assert!(PrintedOut::AtMost(8).agrees(8));
        assert!(!PrintedOut::Exact(4).agrees(12));
        assert!(PrintedOut::Unstated.agrees(7));
    }
}
