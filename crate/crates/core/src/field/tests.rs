use proptest::prelude::*;

use super::*;

fn gf16() -> FieldCtx {
    FieldCtx::new(2, 4, ModulusSpec::Coeffs(vec![1, 1, 0, 0, 1]), 1).unwrap()
}

// Bitwise carry-less product reduced by the modulus code, written out
// independently of the table construction.
fn clmul_reduce(a: u32, b: u32, modulus: u32, m: u32) -> u32 {
    let mut wide = 0u64;
    for i in 0..32 {
        if b >> i & 1 == 1 {
            wide ^= (a as u64) << i;
        }
    }
    for bit in (m..64).rev() {
        if wide >> bit & 1 == 1 {
            wide ^= (modulus as u64) << (bit - m);
        }
    }
    wide as u32
}

#[test]
fn textbook_gf16() {
    let f = gf16();
    assert_eq!(f.order(), 16);
    assert_eq!(f.q(), 2);
    assert_eq!(f.m(), 4);
    assert_eq!(f.modulus_code(), 0x13);
}

#[test]
fn reducible_modulus_rejected() {
    let err = FieldCtx::new(2, 4, ModulusSpec::Coeffs(vec![1, 0, 1, 0, 1]), 1).unwrap_err();
    assert_eq!(err, FieldError::RejectReducible { p: 2 });
}

#[test]
fn construction_errors() {
    assert!(matches!(
        FieldCtx::new(2, 21, ModulusSpec::Auto, 1),
        Err(FieldError::RejectTooLarge { .. })
    ));
    assert!(matches!(
        FieldCtx::new(2, 4, ModulusSpec::Auto, 3),
        Err(FieldError::RejectBadSubfield { m_abs: 4, sub_exp: 3 })
    ));
    assert!(matches!(FieldCtx::new(4, 2, ModulusSpec::Auto, 1), Err(FieldError::NotPrime(4))));
    assert!(matches!(
        FieldCtx::new(2, 4, ModulusSpec::Coeffs(vec![1, 1, 1]), 1),
        Err(FieldError::BadModulus(_))
    ));
    assert!(matches!(
        FieldCtx::with_cap(2, 8, ModulusSpec::Auto, 1, 128),
        Err(FieldError::RejectTooLarge { order: 256, cap: 128 })
    ));
}

#[test]
fn auto_modulus_is_first_irreducible_in_lex_order() {
    let f = FieldCtx::new(2, 4, ModulusSpec::Auto, 2).unwrap();
    assert_eq!(f.modulus(), &[1, 1, 0, 0, 1]);
    assert_eq!(f.q(), 4);
    assert_eq!(f.m(), 2);
    // enumerate by code and keep the first passing a direct root-free check
    // plus the known list of degree-4 irreducibles {0x13, 0x19, 0x1f}
    let first = (0x10u32..0x20).find(|c| [0x13, 0x19, 0x1f].contains(c)).unwrap();
    assert_eq!(f.modulus_code(), first as u64);
    assert_eq!(smallest_irreducible(2, 8), vec![1, 1, 0, 1, 1, 0, 0, 0, 1]);
    assert_eq!(smallest_irreducible(3, 2), vec![1, 0, 1]);
}

#[test]
fn inverse_and_basis_root() {
    let f = gf16();
    for x in 1..16 {
        assert_eq!(f.mul(x, f.inv(x).unwrap()), 1);
    }
    assert_eq!(f.inv(0), None);
    let alpha = f.basis_root();
    assert_eq!(alpha, 2);
    assert_eq!(f.pow(alpha, 4), 3); // alpha + 1
    let mut acc = 1;
    let mut first_identity = None;
    for k in 1..=15 {
        acc = f.mul(acc, alpha);
        if acc == 1 {
            first_identity = Some(k);
            break;
        }
    }
    assert_eq!(first_identity, Some(15));
}

#[test]
fn table_multiplication_matches_clmul() {
    for (m, code) in [(4u32, 0x13u32), (8, 0x11b), (10, 0x409)] {
        let f = FieldCtx::new(2, m, ModulusSpec::from_code(2, code as u64), 1).unwrap();
        for a in 0..f.order() {
            for b in (0..f.order()).step_by(if m > 8 { 7 } else { 1 }) {
                assert_eq!(f.mul(a, b), clmul_reduce(a, b, code, m), "a={a} b={b}");
            }
        }
    }
}

#[test]
fn frobenius_examples() {
    let f = gf16();
    let alpha = f.basis_root();
    for x in f.elements() {
        assert_eq!(f.frob(x, 0), x);
        assert_eq!(f.frob(x, 4), x);
    }
    assert_eq!(f.frob(alpha, 1), 4);
    let g = FieldCtx::new(2, 4, ModulusSpec::Auto, 2).unwrap();
    for x in g.elements() {
        assert_eq!(g.frob(x, 1), g.pow(x, 4));
        assert_eq!(g.frob(x, 2), x);
    }
}

#[test]
fn trace_examples() {
    let f = gf16();
    assert_eq!(f.trace(1), 0);
    let a = f.basis_root();
    let a2 = f.mul(a, a);
    let a4 = f.mul(a2, a2);
    let a8 = f.mul(a4, a4);
    assert_eq!(f.trace(a), a ^ a2 ^ a4 ^ a8);
    for x in f.elements() {
        let t = f.trace(x);
        assert_eq!(f.pow(t, f.q() as u64), t);
    }
}

fn desk_fields() -> Vec<FieldCtx> {
    let mut out = Vec::new();
    for (p, m, s) in [
        (2, 1, 1),
        (2, 2, 1),
        (2, 3, 1),
        (2, 4, 1),
        (2, 4, 2),
        (2, 6, 2),
        (2, 6, 3),
        (2, 8, 4),
        (2, 10, 1),
        (3, 1, 1),
        (3, 2, 1),
        (3, 4, 2),
        (3, 6, 1),
        (5, 2, 1),
        (5, 3, 1),
        (7, 2, 1),
        (31, 2, 1),
    ] {
        out.push(FieldCtx::new(p, m, ModulusSpec::Auto, s).unwrap());
    }
    out
}

#[test]
fn trace_linearity_and_image() {
    for f in desk_fields() {
        let sub = f.subfield_elements();
        assert_eq!(sub.len() as u32, f.q());
        let mut image: Vec<u32> = f.elements().map(|x| f.trace(x)).collect();
        image.sort_unstable();
        image.dedup();
        assert_eq!(image, sub, "trace image of {}", f.spec());
        let step = (f.order() / 64).max(1) as usize;
        for x in f.elements().step_by(step) {
            for y in f.elements() {
                assert_eq!(f.trace(f.add(x, y)), f.add(f.trace(x), f.trace(y)));
            }
            for &c in &sub {
                assert_eq!(f.trace(f.mul(c, x)), f.mul(c, f.trace(x)));
            }
        }
    }
}

#[test]
fn frobenius_is_an_automorphism() {
    for f in desk_fields().into_iter().filter(|f| f.order() <= 1 << 8) {
        for k in 0..f.m() as u64 {
            for x in f.elements() {
                for y in f.elements() {
                    assert_eq!(f.frob(f.add(x, y), k), f.add(f.frob(x, k), f.frob(y, k)));
                    assert_eq!(f.frob(f.mul(x, y), k), f.mul(f.frob(x, k), f.frob(y, k)));
                }
            }
        }
    }
    let big = FieldCtx::new(2, 12, ModulusSpec::Auto, 1).unwrap();
    for x in big.elements() {
        for y in big.elements() {
            assert_eq!(big.frob(big.mul(x, y), 1), big.mul(big.frob(x, 1), big.frob(y, 1)));
            assert_eq!(big.frob(big.add(x, y), 1), big.add(big.frob(x, 1), big.frob(y, 1)));
        }
    }
}

#[test]
fn tagged_elements_reject_mixing() {
    let f = gf16();
    let g = gf16();
    let x = f.elem(3).unwrap();
    let y = g.elem(5).unwrap();
    assert_eq!(f.add_elems(x, y), Err(FieldError::FieldMismatch));
    assert_eq!(f.inv_elem(f.zero()), Err(FieldError::DivisionByZero));
    assert!(f.elem(16).is_err());
    let prod = f.mul_elems(x, f.inv_elem(x).unwrap()).unwrap();
    assert_eq!(prod, f.one());
    assert_eq!(f.pow_elem(x, -1).unwrap(), f.inv_elem(x).unwrap());
    assert_eq!(f.frobenius(x, 1).unwrap().repr(), f.mul(3, 3));
    assert_eq!(f.trace_elem(x).unwrap().repr(), f.trace(3));
    assert_eq!(f.sub_elems(x, x).unwrap(), f.zero());
}

#[test]
fn field_spec_strings() {
    let s: FieldSpec = "2^4/13".parse().unwrap();
    assert_eq!(s.modulus, ModulusSpec::Coeffs(vec![1, 1, 0, 0, 1]));
    assert_eq!(s.q, None);
    assert_eq!(s.to_string(), "2^4/13");
    let s: FieldSpec = "2^4/13/q=4".parse().unwrap();
    assert_eq!(s.build().unwrap().m(), 2);
    let s: FieldSpec = "2^4/auto/q=2^2".parse().unwrap();
    assert_eq!(s.build().unwrap().spec().to_string(), "2^4/13/q=4");
    let s: FieldSpec = "3^2/auto".parse().unwrap();
    assert_eq!(s.build().unwrap().modulus(), &[1, 0, 1]);
    for bad in ["", "2", "2^4", "2^x/13", "2^4/zz", "2^4/13/r=2", "2^4/13/q=4/x"] {
        assert!(bad.parse::<FieldSpec>().is_err(), "{bad}");
    }
    assert!(matches!(
        "2^4/13/q=8".parse::<FieldSpec>().unwrap().build(),
        Err(FieldError::RejectBadSubfield { .. })
    ));
    assert!(matches!(
        "2^4/13/q=6".parse::<FieldSpec>().unwrap().build(),
        Err(FieldError::Parse { .. })
    ));
    let json = serde_json::to_string(&"2^4/13/q=4".parse::<FieldSpec>().unwrap()).unwrap();
    assert_eq!(json, "\"2^4/13/q=4\"");
}

#[test]
fn exhaustive_axioms_small_fields() {
    for f in desk_fields().into_iter().filter(|f| f.order() <= 64) {
        for a in f.elements() {
            assert_eq!(f.add(a, f.neg(a)), 0);
            assert_eq!(f.add(a, 0), a);
            assert_eq!(f.mul(a, 1), a);
            for b in f.elements() {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                for c in f.elements() {
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
                    assert_eq!(f.add(a, f.add(b, c)), f.add(f.add(a, b), c));
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn axioms_hold_on_random_triples(idx in 0usize..17, a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        thread_local!(static FIELDS: Vec<FieldCtx> = desk_fields());
        FIELDS.with(|fields| {
            let f = &fields[idx];
            let (a, b, c) = (a % f.order(), b % f.order(), c % f.order());
            prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            prop_assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
            prop_assert_eq!(f.sub(f.add(a, b), b), a);
            if a != 0 {
                prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                prop_assert_eq!(f.pow(a, (f.order() - 1) as u64), 1);
            }
            prop_assert_eq!(f.pow(a, f.order() as u64), a);
            Ok(())
        })?;
    }
}
