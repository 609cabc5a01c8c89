//! Monomials `x^d`: n-cycle tests through `d^n ≡ 1 (mod q^m - 1)`, the
//! counting formula `n^t`, and audits of the Kasami and Gold exponent claims.

use serde::Serialize;
use thiserror::Error;

use crate::field::FieldCtx;
use crate::numtheory::{self, gcd, pow_mod, Factorization};

pub type ModulusFactorization = Factorization;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MonoError {
    #[error("counting formula needs GF(2^m) over GF(2)")]
    NotBinary,
    #[error("Gold exponent needs gcd(k, m) = 1, got k={k}, m={m}")]
    NotCoprime { k: u32, m: u32 },
    #[error("exponent parameter must be positive")]
    ZeroParameter,
}

/// `d^n ≡ 1 (mod modulus)`.
pub fn is_ncycle_exponent(d: u64, modulus: u64, n: u64) -> bool {
    n >= 1 && pow_mod(d, n, modulus) == 1 % modulus
}

/// Whether `x^d` is an n-cycle permutation of the field.
pub fn is_ncycle_monomial(d: u64, ctx: &FieldCtx, n: u64) -> bool {
    is_ncycle_exponent(d, ctx.order() as u64 - 1, n)
}

/// Least `n` with `x^d` an n-cycle, or `None` when `x^d` does not permute.
pub fn monomial_cycle_order(d: u64, ctx: &FieldCtx) -> Option<u64> {
    let modulus = ctx.order() as u64 - 1;
    if modulus == 1 {
        // GF(2): x^d is the identity for every d >= 1
        return (d >= 1).then_some(1);
    }
    numtheory::multiplicative_order(d % modulus, modulus)
}

/// Residues `d mod modulus` with `d^n ≡ 1`.
pub fn ncycle_exponents(modulus: u64, n: u64) -> Vec<u64> {
    (0..modulus).filter(|&d| is_ncycle_exponent(d, modulus, n)).collect()
}

/// Formula count against direct enumeration for GF(2^m).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountAudit {
    pub m: u32,
    pub n: u64,
    pub factorization: ModulusFactorization,
    /// Number of prime factors `p_i` with `n | p_i - 1`, or `p_i = n` and
    /// `α_i >= 2`.
    pub t: u32,
    pub formula: u64,
    pub exhaustive: u64,
    pub matches: bool,
}

/// Counts monomial n-cycles of GF(2^m) both ways. Pure integer arithmetic, so
/// `m` may exceed the field-construction cap.
pub fn count_ncycle_monomials_for(m: u32, n: u64) -> CountAudit {
    let modulus = (1u64 << m) - 1;
    let factorization = Factorization::of(modulus);
    let t = factorization
        .factors
        .iter()
        .filter(|&&(p, alpha)| (p - 1) % n == 0 || (p == n && alpha >= 2))
        .count() as u32;
    let formula = n.pow(t);
    let exhaustive = ncycle_exponents(modulus, n).len() as u64;
    CountAudit { m, n, factorization, t, formula, exhaustive, matches: formula == exhaustive }
}

pub fn count_ncycle_monomials(ctx: &FieldCtx, n: u64) -> Result<CountAudit, MonoError> {
    if ctx.p() != 2 || ctx.q() != 2 {
        return Err(MonoError::NotBinary);
    }
    Ok(count_ncycle_monomials_for(ctx.m_abs(), n))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MersenneCheck {
    pub m: u32,
    pub n: u64,
    /// `1` if `n ∤ 2^m - 2`, else `n`.
    pub remark_count: u64,
    pub exhaustive: u64,
    pub agree: bool,
}

/// For prime `2^m - 1`, compares the closed-form count with enumeration.
/// `None` when `2^m - 1` is not prime.
pub fn mersenne_check(m: u32, n: u64) -> Option<MersenneCheck> {
    let modulus = (1u64 << m) - 1;
    if !numtheory::is_prime(modulus) {
        return None;
    }
    let remark_count = if (modulus - 1) % n == 0 { n } else { 1 };
    let exhaustive = ncycle_exponents(modulus, n).len() as u64;
    Some(MersenneCheck { m, n, remark_count, exhaustive, agree: remark_count == exhaustive })
}

/// Stated criterion for a power-function family against plain
/// modular arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditVerdict {
    pub family: &'static str,
    pub m: u32,
    pub k: u32,
    pub n: u64,
    /// Exponent reduced modulo `2^m - 1`.
    pub d: u64,
    /// Whether the criterion's hypotheses hold (e.g. even `m` for Kasami).
    pub applicable: bool,
    pub criterion: bool,
    /// `d^n ≡ 1 (mod 2^m - 1)`.
    pub oracle: bool,
    pub agree: bool,
    /// Multiplicative order of `d` when `x^d` permutes the field.
    pub min_cycle_order: Option<u64>,
}

fn min_order(d: u64, modulus: u64) -> Option<u64> {
    if modulus == 1 {
        return Some(1);
    }
    numtheory::multiplicative_order(d, modulus)
}

/// Kasami exponent `2^{2k} - 2^k + 1`; the stated criterion is `m | k`
/// (for even `m`).
pub fn kasami_audit(k: u32, m: u32, n: u64) -> Result<AuditVerdict, MonoError> {
    if k == 0 || m == 0 {
        return Err(MonoError::ZeroParameter);
    }
    let modulus = (1u64 << m) - 1;
    let d = (pow_mod(2, 2 * k as u64, modulus) + modulus - pow_mod(2, k as u64, modulus) + 1)
        % modulus;
    let criterion = k % m == 0;
    let oracle = is_ncycle_exponent(d, modulus, n);
    Ok(AuditVerdict {
        family: "kasami",
        m,
        k,
        n,
        d,
        applicable: m % 2 == 0,
        criterion,
        oracle,
        agree: criterion == oracle,
        min_cycle_order: min_order(d, modulus),
    })
}

/// Gold exponent `2^k + 1` with `gcd(k, m) = 1`; the stated criterion is
/// `m = 1`.
pub fn gold_audit(k: u32, m: u32, n: u64) -> Result<AuditVerdict, MonoError> {
    if k == 0 || m == 0 {
        return Err(MonoError::ZeroParameter);
    }
    if gcd(k as u64, m as u64) != 1 {
        return Err(MonoError::NotCoprime { k, m });
    }
    let modulus = (1u64 << m) - 1;
    let d = (pow_mod(2, k as u64, modulus) + 1) % modulus;
    let criterion = m == 1;
    let oracle = is_ncycle_exponent(d, modulus, n);
    Ok(AuditVerdict {
        family: "gold",
        m,
        k,
        n,
        d,
        applicable: true,
        criterion,
        oracle,
        agree: criterion == oracle,
        min_cycle_order: min_order(d, modulus),
    })
}
