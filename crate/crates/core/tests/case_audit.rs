use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use orbitbound::case_audit::*;
use orbitbound::simple_groups::{Family, GroupSpec};

fn mr_prime(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    let bases = [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
    for &b in &bases {
        if n == b as u128 {
            return true;
        }
        if n.is_multiple_of(b as u128) {
            return false;
        }
    }
    let nb = BigUint::from(n);
    let nm1 = &nb - 1u32;
    let s = nm1.trailing_zeros().unwrap();
    let d = &nm1 >> s;
    'outer: for &b in &bases {
        let mut x = BigUint::from(b).modpow(&d, &nb);
        if x.is_one() || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % &nb;
            if x == nm1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn order_mod(p: u64, l: u128) -> u64 {
    let (p, l) = (BigUint::from(p), BigUint::from(l));
    let mut x = &p % &l;
    let mut k = 1;
    while !x.is_one() {
        x = (&x * &p) % &l;
        k += 1;
    }
    k
}

/// Re-derives every claim of a certificate without trusting its flags.
fn check_certificate(c: &CaseCertificate) {
    let order = c.order.value();
    let out = c.out_order as u128;
    for w in [&c.witness1, &c.witness2] {
        assert!(mr_prime(w.prime), "{}: {} not prime", c.group, w.prime);
        let expect = match w.kind {
            WitnessKind::Prime => w.prime,
            WitnessKind::PrimeSquare => w.prime * w.prime,
        };
        assert_eq!(w.order, expect);
        assert!((order % BigUint::from(w.order)).is_zero(), "{}: {} does not divide", c.group, w.order);
        assert!(w.order * w.order >= 4 * out, "{}", c.group);
        assert!(w.order >= c.kk_bound as u128, "{}", c.group);
        if let WitnessSource::Zsigmondy { exponent } = w.source {
            assert_eq!(order_mod(c.spec.p, w.prime), exponent, "{}", c.group);
        }
    }
    assert_ne!(c.witness1.prime, c.witness2.prime, "{}", c.group);
    assert!(c.valid && c.checks.all(), "{}", c.group);
}

#[test]
fn witness_examples() {
    let a = find_witnesses(&GroupSpec::lie(Family::A, 1, 64).unwrap()).unwrap();
    assert_eq!((a.witness1.order, a.witness2.order, a.out_order), (13, 7, 6));
    check_certificate(&a);

    let b = find_witnesses(&GroupSpec::lie(Family::B, 2, 8).unwrap()).unwrap();
    assert_eq!((b.witness1.order, b.witness2.order), (13, 7));
    assert!(b.out_order <= 6);
    check_certificate(&b);

    let alt6 = find_witnesses(&GroupSpec::alt(6).unwrap()).unwrap();
    assert_eq!((alt6.witness1.order, alt6.witness2.order, alt6.out_order), (4, 9, 4));
    assert_eq!(alt6.witness1.kind, WitnessKind::PrimeSquare);
    assert_eq!(alt6.witness2.kind, WitnessKind::PrimeSquare);
    check_certificate(&alt6);
}

#[test]
fn a2_2_certified() {
    let c = find_witnesses(&GroupSpec::lie(Family::A, 2, 2).unwrap()).unwrap();
    assert_eq!(c.witness1.order, 7);
    assert_eq!(c.witness1.source, WitnessSource::Zsigmondy { exponent: 3 });
    check_certificate(&c);
}

#[test]
fn degenerate_specs_rejected() {
    for (f, n, q) in [(Family::A, 1, 2), (Family::A, 1, 3), (Family::TwistedA, 2, 2)] {
        assert!(find_witnesses(&GroupSpec::lie(f, n, q).unwrap()).is_err());
    }
}

#[test]
fn sporadic_grid() {
    let r = audit_grid(&[Family::Sporadic], 0, 0);
    assert_eq!(r.certificates.len(), 26);
    for c in &r.certificates {
        let pair = (c.witness1.order, c.witness2.order);
        assert!(pair == (4, 3) || pair == (4, 9), "{}: {pair:?}", c.group);
        check_certificate(c);
    }
}

#[test]
fn grid_certificates_independently_valid() {
    let r = audit_grid(&[], 6, 64);
    assert!(r.no_witness.is_empty() && r.errors.is_empty());
    assert!(r.all_valid());
    for c in &r.certificates {
        check_certificate(c);
    }
    let families: BTreeSet<Family> = r.summary.iter().map(|s| s.family).collect();
    assert_eq!(families.len(), Family::all().count());
    let total: usize = r.summary.iter().map(|s| s.certified).sum();
    assert_eq!(total, r.certificates.len());
}

#[test]
fn every_simple_subcase_certified() {
    let r = audit_grid(&[], 10, 512);
    assert!(r.all_valid());
    let ids: BTreeSet<&str> = r.subcases.iter().map(|s| s.case.as_str()).collect();
    assert_eq!(ids.len(), subcases().len());
    for s in &r.subcases {
        assert_eq!(s.certified, s.simple, "{} {}", s.case, s.group);
    }
    let out_bad: BTreeSet<(&str, &str, u64)> = r
        .subcases
        .iter()
        .filter(|s| s.out_agrees == Some(false))
        .map(|s| (s.case.as_str(), s.group.as_str(), s.computed_out.unwrap()))
        .collect();
    let expect: BTreeSet<_> =
        [("an.26", "A_5(16)", 24), ("an.42", "A_5(4)", 12), ("2an.28", "2A_20(2)", 6)].into();
    assert_eq!(out_bad, expect);
}

fn oracle_value(e: &Expression) -> BigUint {
    match e {
        Expression::PowerMinusOne(a, k) => BigUint::from(*a).pow(*k) - 1u32,
        Expression::PowerPlusOne(a, k) => BigUint::from(*a).pow(*k) + 1u32,
        Expression::Order(spec) => match spec.to_string().as_str() {
            "Alt(6)" => BigUint::from(360u32),
            "A_1(4)" => BigUint::from(60u32),
            other => panic!("no oracle for |{other}|"),
        },
    }
}

#[test]
fn printed_factorization_mismatches() {
    let table = printed_factorization_table();
    let expect: BTreeSet<String> = table
        .iter()
        .filter(|e| {
            let product = e.printed.iter().fold(BigUint::one(), |a, &x| a * x);
            product != oracle_value(&e.expression)
        })
        .map(|e| e.case.clone())
        .collect();
    let found = verify_printed_factorizations();
    let got: BTreeSet<String> = found.iter().map(|d| d.case.clone()).collect();
    assert_eq!(got, expect);
    assert_eq!(
        got,
        ["an.18", "an.19", "d4even.2"].map(String::from).into_iter().collect()
    );

    let m27 = found.iter().find(|d| d.expression == "2^27-1").unwrap();
    assert_eq!(m27.printed, "7*73*262654");
    assert!(m27.recomputed.primes().any(|p| p == 262657));
    let m18 = found.iter().find(|d| d.case == "d4even.2").unwrap();
    assert_eq!(m18.printed, "7*7*19*73");
    assert_eq!(m18.recomputed.factors(), &[(3, 3), (7, 1), (19, 1), (73, 1)]);

    let all = printed_factorizations();
    assert_eq!(all.len(), table.len());
    let ok = all.iter().find(|c| c.expression == "2^12-1").unwrap();
    assert!(ok.matches);
}

#[test]
fn product_bound_examples() {
    assert!(check_product_bound(6, 3));
    assert!(check_product_bound(1, 1));
    let b = product_bound(54, 2).unwrap();
    assert_eq!(b.lhs, BigUint::from(108u32));
    assert_eq!(b.rhs, BigUint::from(216u32));
    assert!(b.holds && !b.squared);
    for out in 1..50u64 {
        for m in 1..12u32 {
            let b = product_bound(out, m).unwrap();
            assert!(b.holds);
            assert_eq!(&b.rhs, &(&b.lhs * if b.squared { 4u32 } else { 2u32 }));
        }
    }
}
