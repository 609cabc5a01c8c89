//! Linear binomials `F(x) = a x^{2^i} + b x^{2^j}` over GF(2^m): the
//! triple-cycle case analysis and an exhaustive search against the table
//! oracle.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::field::{FieldCtx, FieldSpec};
use crate::funcspace::FuncTable;
use crate::numtheory::gcd;

/// Largest field order the exhaustive search accepts.
pub const SEARCH_MAX_ORDER: u32 = 1 << 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BinomError {
    #[error("coefficients must be nonzero")]
    ZeroCoefficient,
    #[error("exponent indices must differ and lie below m={m}")]
    BadIndices { m: u32 },
    #[error("binomial analysis needs GF(2^m) over GF(2)")]
    NotBinary,
    #[error("field of order {order} exceeds the search cap {cap}")]
    RejectTooLarge { order: u32, cap: u32 },
}

/// `a x^{2^i} + b x^{2^j}`, stored with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BinomialSpec {
    pub a: u32,
    pub b: u32,
    pub i: u32,
    pub j: u32,
}

impl BinomialSpec {
    /// Swaps `(a, i)` with `(b, j)` when `i > j`.
    pub fn new(ctx: &FieldCtx, a: u32, b: u32, i: u32, j: u32) -> Result<Self, BinomError> {
        if a == 0 || b == 0 {
            return Err(BinomError::ZeroCoefficient);
        }
        let m = ctx.m_abs();
        if i == j || i >= m || j >= m {
            return Err(BinomError::BadIndices { m });
        }
        Ok(if i < j { BinomialSpec { a, b, i, j } } else { BinomialSpec { a: b, b: a, i: j, j: i } })
    }

    pub fn eval(&self, ctx: &FieldCtx, x: u32) -> u32 {
        ctx.add(
            ctx.mul(self.a, ctx.frob(x, self.i as u64)),
            ctx.mul(self.b, ctx.frob(x, self.j as u64)),
        )
    }

    pub fn to_table(&self, ctx: &FieldCtx) -> FuncTable {
        FuncTable::from_fn(ctx, |x| self.eval(ctx, x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TheoremCase {
    Coprime6Never,
    MEq3k,
    TwoMEq3k,
    MEq2k,
    NoCase,
}

/// How block conditions such as `3i = 2k` compare indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IndexMode {
    /// Integer equality.
    Exact,
    /// Congruence modulo `m`.
    Congruence,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TripleVerdict {
    pub spec: BinomialSpec,
    pub index_mode: IndexMode,
    pub theorem_case: TheoremCase,
    pub theorem_says_triple: bool,
    /// Which condition block fired, and under which labelling.
    pub matched_subcondition: Option<String>,
    /// Cycle order of the table divides 3.
    pub oracle_is_triple: bool,
    /// Cycle order of the table is exactly 3.
    pub strict_order3: bool,
    pub agree: bool,
}

fn idx_eq(mode: IndexMode, lhs: u32, rhs: u32, m: u32) -> bool {
    match mode {
        IndexMode::Exact => lhs == rhs,
        IndexMode::Congruence => lhs % m == rhs % m,
    }
}

/// `x^{2^e + 1}`.
fn pow2e1(ctx: &FieldCtx, x: u32, e: u32) -> u32 {
    ctx.mul(ctx.frob(x, e as u64), x)
}

/// Condition blocks for one labelling `F = A x^{2^I} + B x^{2^J}`.
fn fire(
    ctx: &FieldCtx,
    (a, i, b, j): (u32, u32, u32, u32),
    mode: IndexMode,
) -> Option<(TheoremCase, &'static str)> {
    let m = ctx.m_abs();
    let sq = |x: u32| ctx.mul(x, x);
    let ab = ctx.mul(a, b);
    if m % 3 == 0 {
        for (case, k) in [(TheoremCase::MEq3k, m / 3), (TheoremCase::TwoMEq3k, 2 * m / 3)] {
            if j != (i + k) % m {
                continue;
            }
            if i == 0 && ctx.add(sq(a), sq(b)) == 1 && ctx.mul(sq(a), b) == 0 {
                return Some((case, "i=0: a^2+b^2=1, a^2 b=0"));
            }
            let ai = ctx.frob(a, i as u64);
            let bi = ctx.frob(b, i as u64);
            let mixed = ctx.mul(ctx.mul(ai, bi), ctx.add(ai, bi));
            if idx_eq(mode, 3 * i, 2 * k, m)
                && pow2e1(ctx, a, 2 * k) == pow2e1(ctx, b, 2 * k)
                && a == mixed
                && ctx.add(sq(a), ab) == 1
            {
                return Some((case, "3i=2k: a^(2^2k+1)=b^(2^2k+1), a=a'b'(a'+b'), a^2+ab=1"));
            }
            if idx_eq(mode, 3 * i, k, m)
                && pow2e1(ctx, a, k) == pow2e1(ctx, b, k)
                && b == mixed
                && ctx.add(sq(b), ab) == 1
            {
                return Some((case, "3i=k: a^(2^k+1)=b^(2^k+1), b=a'b'(a'+b'), b^2+ab=1"));
            }
        }
    }
    if m % 2 == 0 {
        let k = m / 2;
        if i == (j + k) % m {
            let small = ctx.in_subfield_of_degree(a, k) && ctx.in_subfield_of_degree(b, k);
            if i == 0 && small && ctx.add(sq(a), ab) == 1 && ctx.add(ab, ctx.pow(b, 3)) == 0 {
                return Some((TheoremCase::MEq2k, "i=0: a,b in GF(2^k), a^2+ab=1, ab+b^3=0"));
            }
            if j == 0 && small && ctx.add(ab, sq(b)) == 1 {
                return Some((TheoremCase::MEq2k, "j=0: a,b in GF(2^k), ab+b^2=1"));
            }
        }
    }
    None
}

fn require_binary(ctx: &FieldCtx) -> Result<(), BinomError> {
    if ctx.p() == 2 && ctx.q() == 2 {
        Ok(())
    } else {
        Err(BinomError::NotBinary)
    }
}

/// Case and fired block of the theorem for a normalized spec. Both
/// labellings `(a, i, b, j)` and `(b, j, a, i)` are tried, so the answer does
/// not depend on which term is written first.
pub fn theorem_verdict(
    ctx: &FieldCtx,
    spec: &BinomialSpec,
    mode: IndexMode,
) -> (TheoremCase, Option<String>) {
    if gcd(ctx.m_abs() as u64, 6) == 1 {
        return (TheoremCase::Coprime6Never, None);
    }
    let stored = (spec.a, spec.i, spec.b, spec.j);
    let swapped = (spec.b, spec.j, spec.a, spec.i);
    match fire(ctx, stored, mode) {
        Some((case, what)) => (case, Some(what.to_string())),
        None => match fire(ctx, swapped, mode) {
            Some((case, what)) => (case, Some(format!("{what} (terms swapped)"))),
            None => (TheoremCase::NoCase, None),
        },
    }
}

/// Theorem case analysis against the cycle order of the table.
pub fn classify_binomial(
    ctx: &FieldCtx,
    spec: &BinomialSpec,
    mode: IndexMode,
) -> Result<TripleVerdict, BinomError> {
    require_binary(ctx)?;
    let spec = BinomialSpec::new(ctx, spec.a, spec.b, spec.i, spec.j)?;
    let (theorem_case, matched) = theorem_verdict(ctx, &spec, mode);
    let theorem_says_triple = matched.is_some();
    let table = spec.to_table(ctx);
    let oracle_is_triple = ctx.elements().all(|x| table.apply(table.apply(table.apply(x))) == x);
    Ok(TripleVerdict {
        spec,
        index_mode: mode,
        theorem_case,
        theorem_says_triple,
        matched_subcondition: matched,
        oracle_is_triple,
        strict_order3: oracle_is_triple && !table.is_identity(),
        agree: theorem_says_triple == oracle_is_triple,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchReport {
    pub field: FieldSpec,
    pub index_mode: IndexMode,
    pub instances: u64,
    pub oracle_true: Vec<BinomialSpec>,
    pub theorem_true: Vec<BinomialSpec>,
    pub sym_diff: Vec<BinomialSpec>,
    pub strict_order3_count: u64,
    /// Theorem-true count under the other index mode.
    pub other_mode_theorem_true: u64,
}

/// All normalized `(a, b, i, j)` with `a, b ≠ 0`, `i < j < m`.
pub fn search_triple_binomials(
    ctx: &FieldCtx,
    mode: IndexMode,
) -> Result<SearchReport, BinomError> {
    require_binary(ctx)?;
    if ctx.order() > SEARCH_MAX_ORDER {
        return Err(BinomError::RejectTooLarge { order: ctx.order(), cap: SEARCH_MAX_ORDER });
    }
    let m = ctx.m_abs();
    let pairs: Vec<(u32, u32)> =
        (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
    let other = match mode {
        IndexMode::Exact => IndexMode::Congruence,
        IndexMode::Congruence => IndexMode::Exact,
    };
    let per_pair: Vec<(Vec<TripleVerdict>, u64)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let mut hits = Vec::new();
            let mut other_true = 0;
            for a in 1..ctx.order() {
                for b in 1..ctx.order() {
                    let spec = BinomialSpec { a, b, i, j };
                    let v = classify_binomial(ctx, &spec, mode).expect("valid spec");
                    other_true += theorem_verdict(ctx, &spec, other).1.is_some() as u64;
                    if v.theorem_says_triple || v.oracle_is_triple {
                        hits.push(v);
                    }
                }
            }
            (hits, other_true)
        })
        .collect();
    let mut report = SearchReport {
        field: ctx.spec(),
        index_mode: mode,
        instances: pairs.len() as u64 * (ctx.order() as u64 - 1).pow(2),
        oracle_true: Vec::new(),
        theorem_true: Vec::new(),
        sym_diff: Vec::new(),
        strict_order3_count: 0,
        other_mode_theorem_true: 0,
    };
    for (hits, other_true) in per_pair {
        report.other_mode_theorem_true += other_true;
        for v in hits {
            if v.oracle_is_triple {
                report.oracle_true.push(v.spec);
            }
            if v.theorem_says_triple {
                report.theorem_true.push(v.spec);
            }
            if !v.agree {
                report.sym_diff.push(v.spec);
            }
            report.strict_order3_count += v.strict_order3 as u64;
        }
    }
    Ok(report)
}

/// `a x^{2^k} + b x` for `m = 2k`, `a, b ∈ GF(2^k)^*`, `b^2 = ab + 1`.
pub fn corollary_family(ctx: &FieldCtx) -> Vec<BinomialSpec> {
    let m = ctx.m_abs();
    if m % 2 != 0 {
        return Vec::new();
    }
    let k = m / 2;
    let small: Vec<u32> = (1..ctx.order()).filter(|&x| ctx.in_subfield_of_degree(x, k)).collect();
    let mut out = Vec::new();
    for &a in &small {
        for &b in &small {
            if ctx.mul(b, b) == ctx.add(ctx.mul(a, b), 1) {
                out.push(BinomialSpec::new(ctx, a, b, k, 0).expect("valid"));
            }
        }
    }
    out
}
