//! Finite fields GF(p^m) backed by log/antilog tables.
//!
//! Elements are packed as integers: the coefficient vector of the polynomial
//! basis written as little-endian base-`p` digits. For `p = 2` this is the
//! usual bit pattern and addition is XOR.
//!
//! A context also designates a subfield GF(q), `q = p^s`, which fixes the
//! meaning of Frobenius powers `x^{q^k}` and of the relative trace
//! `Tr_{q^m/q}` used by the linearized and trace-based constructions.

mod gfp;
mod spec;

use std::sync::atomic::{AtomicU32, Ordering};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numtheory::{self, Factorization};

pub use spec::{FieldSpec, ModulusSpec};

/// Largest field order the toolkit will construct.
pub const MAX_ORDER: u64 = 1 << 20;

/// [`MAX_ORDER`], lowered by the `NCYCLE_MAX_ORDER` environment variable when
/// it holds a smaller number. Larger or unparsable values are ignored.
pub fn effective_cap() -> u64 {
    std::env::var("NCYCLE_MAX_ORDER")
        .ok()
        .and_then(|v| v.trim().parse::<u64>().ok())
        .map_or(MAX_ORDER, |v| v.min(MAX_ORDER))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    NotPrime(u32),
    #[error("extension degree must be positive")]
    ZeroDegree,
    #[error("modulus is reducible over GF({p})")]
    RejectReducible { p: u32 },
    #[error("field order {order} exceeds the cap {cap}")]
    RejectTooLarge { order: u64, cap: u64 },
    #[error("subfield exponent {sub_exp} does not divide extension degree {m_abs}")]
    RejectBadSubfield { m_abs: u32, sub_exp: u32 },
    #[error("malformed modulus: {0}")]
    BadModulus(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("elements belong to different fields")]
    FieldMismatch,
    #[error("encoding {repr} is out of range for a field of order {order}")]
    OutOfRange { repr: u64, order: u32 },
    #[error("invalid field spec {spec:?}: {reason}")]
    Parse { spec: String, reason: String },
}

/// Identity of a constructed field; two contexts never share one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldId(u32);

static NEXT_FIELD_ID: AtomicU32 = AtomicU32::new(1);

/// A field element tagged with the field that owns it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Elem {
    repr: u32,
    field: FieldId,
}

impl Elem {
    pub fn repr(self) -> u32 {
        self.repr
    }

    pub fn field(self) -> FieldId {
        self.field
    }
}

/// Immutable description of GF(p^m) together with its lookup tables.
#[derive(Debug)]
pub struct FieldCtx {
    id: FieldId,
    p: u32,
    m_abs: u32,
    sub_exp: u32,
    modulus: Vec<u32>,
    order: u32,
    q: u32,
    // antilog: exp[k] = g^k for 0 <= k < 2(order-1), so products need no reduction
    exp: Vec<u32>,
    log: Vec<u32>,
    // q^k mod (order - 1) for k in 0..m
    frob_mult: Vec<u64>,
    trace: Vec<u32>,
}

impl FieldCtx {
    /// Builds GF(p^m_abs) with the given (or automatically chosen) modulus and
    /// designated subfield GF(p^sub_exp).
    pub fn new(
        p: u32,
        m_abs: u32,
        modulus: ModulusSpec,
        sub_exp: u32,
    ) -> Result<Self, FieldError> {
        Self::with_cap(p, m_abs, modulus, sub_exp, MAX_ORDER)
    }

    /// Like [`FieldCtx::new`] with a tighter order cap. Caps above
    /// [`MAX_ORDER`] are clamped.
    pub fn with_cap(
        p: u32,
        m_abs: u32,
        modulus: ModulusSpec,
        sub_exp: u32,
        cap: u64,
    ) -> Result<Self, FieldError> {
        if !numtheory::is_prime(p as u64) {
            return Err(FieldError::NotPrime(p));
        }
        if m_abs == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let cap = cap.min(MAX_ORDER);
        let order = (p as u64).checked_pow(m_abs).unwrap_or(u64::MAX);
        if order > cap {
            return Err(FieldError::RejectTooLarge { order, cap });
        }
        if sub_exp == 0 || m_abs % sub_exp != 0 {
            return Err(FieldError::RejectBadSubfield { m_abs, sub_exp });
        }
        let modulus = match modulus {
            ModulusSpec::Auto => smallest_irreducible(p, m_abs),
            ModulusSpec::Coeffs(c) => {
                let c = gfp::trim(c);
                if c.len() != m_abs as usize + 1 {
                    return Err(FieldError::BadModulus(format!(
                        "expected degree {m_abs}, got degree {}",
                        c.len() as i64 - 1
                    )));
                }
                if c.iter().any(|&d| d >= p) {
                    return Err(FieldError::BadModulus(format!(
                        "coefficient out of range for GF({p})"
                    )));
                }
                if c[m_abs as usize] != 1 {
                    return Err(FieldError::BadModulus("modulus is not monic".into()));
                }
                if !gfp::is_irreducible(&c, p) {
                    return Err(FieldError::RejectReducible { p });
                }
                c
            }
        };
        Ok(Self::build(p, m_abs, modulus, sub_exp, order as u32))
    }

    fn build(p: u32, m_abs: u32, modulus: Vec<u32>, sub_exp: u32, order: u32) -> Self {
        let id = FieldId(NEXT_FIELD_ID.fetch_add(1, Ordering::Relaxed));
        let q = p.pow(sub_exp);
        let m = m_abs / sub_exp;
        let n = order - 1;

        let slow = SlowArith { p, m_abs, modulus: &modulus };
        let gen = slow.find_generator(order);

        let mut exp = vec![0u32; 2 * n as usize];
        let mut log = vec![u32::MAX; order as usize];
        let mut cur = 1u32;
        for k in 0..n {
            exp[k as usize] = cur;
            log[cur as usize] = k;
            cur = slow.mul(cur, gen);
        }
        for k in n..2 * n {
            exp[k as usize] = exp[(k - n) as usize];
        }

        let mut frob_mult = Vec::with_capacity(m as usize);
        let mut acc = 1u64 % n.max(1) as u64;
        for _ in 0..m {
            frob_mult.push(acc);
            acc = acc * q as u64 % n.max(1) as u64;
        }

        let mut ctx = FieldCtx {
            id,
            p,
            m_abs,
            sub_exp,
            modulus,
            order,
            q,
            exp,
            log,
            frob_mult,
            trace: Vec::new(),
        };
        ctx.trace = (0..order)
            .map(|x| (0..m).fold(0, |s, i| ctx.add(s, ctx.frob(x, i as u64))))
            .collect();
        ctx
    }

    pub fn id(&self) -> FieldId {
        self.id
    }

    /// Characteristic.
    pub fn p(&self) -> u32 {
        self.p
    }

    /// Degree over the prime field.
    pub fn m_abs(&self) -> u32 {
        self.m_abs
    }

    pub fn sub_exp(&self) -> u32 {
        self.sub_exp
    }

    /// Size of the designated subfield, `p^sub_exp`.
    pub fn q(&self) -> u32 {
        self.q
    }

    /// Degree over the designated subfield, `m_abs / sub_exp`.
    pub fn m(&self) -> u32 {
        self.m_abs / self.sub_exp
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Modulus coefficients, constant term first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// The modulus packed as an integer (bit pattern when `p = 2`).
    pub fn modulus_code(&self) -> u64 {
        self.modulus
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * self.p as u64 + c as u64)
    }

    /// Canonical field-spec string for this context.
    pub fn spec(&self) -> FieldSpec {
        FieldSpec {
            p: self.p,
            m_abs: self.m_abs,
            modulus: ModulusSpec::Coeffs(self.modulus.clone()),
            q: if self.sub_exp == 1 { None } else { Some(self.q) },
        }
    }

    pub fn is_char2(&self) -> bool {
        self.p == 2
    }

    /// Encoding of the root of the modulus (the polynomial `x`).
    pub fn basis_root(&self) -> u32 {
        if self.m_abs > 1 {
            self.p
        } else {
            // x = -c0 in GF(p)[x]/(x + c0)
            (self.p - self.modulus[0]) % self.p
        }
    }

    pub fn elements(&self) -> std::ops::Range<u32> {
        0..self.order
    }

    // ---- raw arithmetic on encodings -------------------------------------

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a, b);
        let (mut out, mut place) = (0u32, 1u32);
        while a > 0 || b > 0 {
            let d = (a % self.p + b % self.p) % self.p;
            out += d * place;
            place *= self.p;
            a /= self.p;
            b /= self.p;
        }
        out
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if self.p == 2 {
            return a;
        }
        let (mut a, mut out, mut place) = (a, 0u32, 1u32);
        while a > 0 {
            let d = (self.p - a % self.p) % self.p;
            out += d * place;
            place *= self.p;
            a /= self.p;
        }
        out
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    #[inline]
    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let n = self.order - 1;
        Some(self.exp[((n - self.log[a as usize]) % n) as usize])
    }

    pub fn div(&self, a: u32, b: u32) -> Option<u32> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    /// `a^e` for a nonnegative exponent, with `0^0 = 1`.
    #[inline]
    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let n = (self.order - 1) as u64;
        let k = (self.log[a as usize] as u64 * (e % n)) % n;
        self.exp[k as usize]
    }

    /// `a^e` for a signed exponent; `None` for a negative power of zero.
    pub fn pow_signed(&self, a: u32, e: i64) -> Option<u32> {
        if e >= 0 {
            return Some(self.pow(a, e as u64));
        }
        let n = (self.order - 1) as i64;
        self.inv(a).map(|ai| self.pow(ai, e.unsigned_abs() % n as u64))
    }

    /// Frobenius power `x^{q^k}` relative to the designated subfield.
    #[inline]
    pub fn frob(&self, x: u32, k: u64) -> u32 {
        if x == 0 {
            return 0;
        }
        let mult = self.frob_mult[(k % self.m() as u64) as usize];
        let n = (self.order - 1) as u64;
        self.exp[((self.log[x as usize] as u64 * mult) % n) as usize]
    }

    /// Relative trace `Tr_{q^m/q}(x) = x + x^q + ... + x^{q^{m-1}}`.
    #[inline]
    pub fn trace(&self, x: u32) -> u32 {
        self.trace[x as usize]
    }

    /// Absolute trace to the prime field.
    pub fn abs_trace(&self, x: u32) -> u32 {
        if self.sub_exp == 1 {
            return self.trace(x);
        }
        (0..self.m_abs).fold(0, |s, i| self.add(s, self.pow(x, (self.p as u64).pow(i))))
    }

    /// Whether `x` lies in the designated subfield GF(q).
    pub fn in_subfield(&self, x: u32) -> bool {
        self.frob(x, 1) == x
    }

    /// Whether `x` lies in GF(p^d); `d` must divide `m_abs`.
    pub fn in_subfield_of_degree(&self, x: u32, d: u32) -> bool {
        debug_assert!(self.m_abs % d == 0);
        self.pow(x, (self.p as u64).pow(d)) == x
    }

    /// Encodings of GF(q) inside this field, ascending.
    pub fn subfield_elements(&self) -> Vec<u32> {
        self.elements().filter(|&x| self.in_subfield(x)).collect()
    }

    /// Integer `k` viewed in the prime field.
    pub fn from_int(&self, k: i64) -> u32 {
        k.rem_euclid(self.p as i64) as u32
    }

    // ---- tagged elements ----------------------------------------------------

    pub fn elem(&self, repr: u32) -> Result<Elem, FieldError> {
        if repr >= self.order {
            return Err(FieldError::OutOfRange { repr: repr as u64, order: self.order });
        }
        Ok(Elem { repr, field: self.id })
    }

    pub fn zero(&self) -> Elem {
        Elem { repr: 0, field: self.id }
    }

    pub fn one(&self) -> Elem {
        Elem { repr: 1, field: self.id }
    }

    fn own(&self, x: Elem) -> Result<u32, FieldError> {
        if x.field != self.id {
            return Err(FieldError::FieldMismatch);
        }
        Ok(x.repr)
    }

    fn wrap(&self, repr: u32) -> Elem {
        Elem { repr, field: self.id }
    }

    pub fn add_elems(&self, x: Elem, y: Elem) -> Result<Elem, FieldError> {
        Ok(self.wrap(self.add(self.own(x)?, self.own(y)?)))
    }

    pub fn sub_elems(&self, x: Elem, y: Elem) -> Result<Elem, FieldError> {
        Ok(self.wrap(self.sub(self.own(x)?, self.own(y)?)))
    }

    pub fn mul_elems(&self, x: Elem, y: Elem) -> Result<Elem, FieldError> {
        Ok(self.wrap(self.mul(self.own(x)?, self.own(y)?)))
    }

    pub fn inv_elem(&self, x: Elem) -> Result<Elem, FieldError> {
        self.inv(self.own(x)?)
            .map(|r| self.wrap(r))
            .ok_or(FieldError::DivisionByZero)
    }

    pub fn pow_elem(&self, x: Elem, e: i64) -> Result<Elem, FieldError> {
        self.pow_signed(self.own(x)?, e)
            .map(|r| self.wrap(r))
            .ok_or(FieldError::DivisionByZero)
    }

    pub fn frobenius(&self, x: Elem, k: u64) -> Result<Elem, FieldError> {
        Ok(self.wrap(self.frob(self.own(x)?, k)))
    }

    pub fn trace_elem(&self, x: Elem) -> Result<Elem, FieldError> {
        Ok(self.wrap(self.trace(self.own(x)?)))
    }
}

/// Multiplication straight from the polynomial representation; only used to
/// seed the tables.
struct SlowArith<'a> {
    p: u32,
    m_abs: u32,
    modulus: &'a [u32],
}

impl SlowArith<'_> {
    fn decode(&self, mut x: u32) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.m_abs as usize);
        while x > 0 {
            out.push(x % self.p);
            x /= self.p;
        }
        out
    }

    fn encode(&self, c: &[u32]) -> u32 {
        c.iter().rev().fold(0, |acc, &d| acc * self.p + d)
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            let m = self.m_abs;
            let red = self.encode(self.modulus);
            let (mut a, mut b, mut acc) = (a as u64, b as u64, 0u64);
            while b > 0 {
                if b & 1 == 1 {
                    acc ^= a;
                }
                b >>= 1;
                a <<= 1;
                if a >> m & 1 == 1 {
                    a ^= red as u64;
                }
            }
            return acc as u32;
        }
        let prod = gfp::mul_mod(&self.decode(a), &self.decode(b), self.modulus, self.p);
        self.encode(&prod)
    }

    fn pow(&self, a: u32, mut e: u64) -> u32 {
        let (mut acc, mut b) = (1u32, a);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }

    fn find_generator(&self, order: u32) -> u32 {
        let n = (order - 1) as u64;
        if n == 1 {
            return 1;
        }
        let primes: Vec<u64> = Factorization::of(n).primes().collect();
        let root = if self.m_abs > 1 { self.p } else { 2 };
        std::iter::once(root)
            .chain(2..order)
            .find(|&g| primes.iter().all(|&r| self.pow(g, n / r) != 1))
            .expect("multiplicative group of a finite field is cyclic")
    }
}

/// Lexicographically smallest monic irreducible of degree `m` over GF(p),
/// ordering candidates by their packed integer code.
pub fn smallest_irreducible(p: u32, m: u32) -> Vec<u32> {
    let lead = (p as u64).pow(m);
    (lead..2 * lead)
        .map(|code| {
            let mut c = Vec::with_capacity(m as usize + 1);
            let mut v = code;
            for _ in 0..=m {
                c.push((v % p as u64) as u32);
                v /= p as u64;
            }
            c
        })
        .find(|c| gfp::is_irreducible(c, p))
        .expect("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests;
