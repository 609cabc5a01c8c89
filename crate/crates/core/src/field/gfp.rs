//! Dense polynomials over the prime field GF(p), little-endian coefficient
//! vectors. Only what field construction needs: products, remainders, gcd.

pub(crate) type Poly = Vec<u32>;

pub(crate) fn trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub(crate) fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(a % p != 0);
    pow_mod(a, p - 2, p)
}

pub(crate) fn pow_mod(mut base: u32, mut e: u32, p: u32) -> u32 {
    let p = p as u64;
    let mut acc = 1u64 % p;
    let mut b = base as u64 % p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    base = acc as u32;
    base
}

pub(crate) fn sub(a: &[u32], b: &[u32], p: u32) -> Poly {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(out)
}

pub(crate) fn mul(a: &[u32], b: &[u32], p: u32) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    trim(out.into_iter().map(|c| c as u32).collect())
}

/// Remainder of `a` modulo a nonzero `f`.
pub(crate) fn rem(a: &[u32], f: &[u32], p: u32) -> Poly {
    let f = trim(f.to_vec());
    let mut r = trim(a.to_vec());
    let df = f.len() - 1;
    let lead_inv = inv_mod(*f.last().unwrap(), p);
    while r.len() > df && !r.is_empty() {
        let shift = r.len() - 1 - df;
        let c = (*r.last().unwrap() as u64 * lead_inv as u64 % p as u64) as u32;
        for (k, &fk) in f.iter().enumerate() {
            let t = (c as u64 * fk as u64 % p as u64) as u32;
            r[shift + k] = (r[shift + k] + p - t) % p;
        }
        r = trim(r);
    }
    r
}

pub(crate) fn mul_mod(a: &[u32], b: &[u32], f: &[u32], p: u32) -> Poly {
    rem(&mul(a, b, p), f, p)
}

pub(crate) fn pow_poly_mod(base: &[u32], mut e: u64, f: &[u32], p: u32) -> Poly {
    let mut acc: Poly = rem(&[1], f, p);
    let mut b = rem(base, f, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(&acc, &b, f, p);
        }
        b = mul_mod(&b, &b, f, p);
        e >>= 1;
    }
    acc
}

pub(crate) fn gcd(a: &[u32], b: &[u32], p: u32) -> Poly {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Ben-Or style test: `f` of degree `m` is irreducible iff it shares no factor
/// with `x^{p^d} - x` for every `1 <= d <= m/2`.
pub(crate) fn is_irreducible(f: &[u32], p: u32) -> bool {
    let f = trim(f.to_vec());
    if f.len() < 2 {
        return false;
    }
    let m = f.len() - 1;
    if m == 1 {
        return true;
    }
    let x: Poly = vec![0, 1];
    let mut xp = rem(&x, &f, p);
    for _ in 1..=m / 2 {
        xp = pow_poly_mod(&xp, p as u64, &f, p);
        let diff = sub(&xp, &x, p);
        let g = gcd(&f, &diff, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}
