//! Maps `F(x) = L(x) + γ h(Tr(x))` with `Tr` the relative trace to the
//! designated subfield GF(q), and the induced map `F̄ = L + Tr(γ) h` on GF(q).

use std::collections::HashMap;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::field::FieldCtx;
use crate::funcspace::{CycleOrder, FuncTable, PolyFn};
use crate::linearized::{lin_compose, LinPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TraceError {
    #[error("gamma must be nonzero")]
    ZeroGamma,
    #[error("gamma={0} is not in the subfield")]
    GammaNotInSubfield(u32),
    #[error("h has a coefficient outside the subfield")]
    HNotOverSubfield,
    #[error("Tr(F(x)) != F̄(Tr(x)) at x={x}")]
    CommutingFailure { x: u32 },
    #[error("L is not an n-cycle for n={n}")]
    PreconditionLNotNCycle { n: u64 },
    #[error("L is not an involution")]
    PreconditionLNotInvolution,
    #[error("objects belong to different fields")]
    FieldMismatch,
}

/// Upper limit of the criterion sum over `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BoundMode {
    /// `i = 0..=n-1`, matching the expansion of `F^{(n)}`.
    NMinus1,
    /// `i = 0..=m-1`, with `m` the degree over GF(q).
    MMinus1,
}

fn check_h(ctx: &FieldCtx, l: &LinPoly, h: &PolyFn, gamma: u32) -> Result<(), TraceError> {
    if l.field() != ctx.id() || h.field() != ctx.id() {
        return Err(TraceError::FieldMismatch);
    }
    if gamma == 0 {
        return Err(TraceError::ZeroGamma);
    }
    if !h.coeffs().iter().all(|&c| ctx.in_subfield(c)) {
        return Err(TraceError::HNotOverSubfield);
    }
    Ok(())
}

fn build_f(ctx: &FieldCtx, l: &LinPoly, h: &PolyFn, gamma: u32) -> FuncTable {
    let hs: HashMap<u32, u32> =
        ctx.subfield_elements().into_iter().map(|y| (y, h.eval(ctx, y))).collect();
    FuncTable::from_fn(ctx, |x| ctx.add(l.eval(ctx, x), ctx.mul(gamma, hs[&ctx.trace(x)])))
}

#[derive(Debug, Clone)]
pub struct TraceConstruction {
    pub l: LinPoly,
    pub h: PolyFn,
    pub gamma: u32,
    pub f_table: FuncTable,
    /// `F̄` on the subfield elements, keyed by encoding.
    pub fbar: HashMap<u32, u32>,
}

/// Builds `F` and `F̄`; rejects the construction when `Tr ∘ F ≠ F̄ ∘ Tr`.
pub fn build_trace_construction(
    ctx: &FieldCtx,
    l: &LinPoly,
    h: &PolyFn,
    gamma: u32,
) -> Result<TraceConstruction, TraceError> {
    check_h(ctx, l, h, gamma)?;
    if !ctx.in_subfield(gamma) {
        return Err(TraceError::GammaNotInSubfield(gamma));
    }
    let tr_gamma = ctx.trace(gamma);
    let fbar: HashMap<u32, u32> = ctx
        .subfield_elements()
        .into_iter()
        .map(|y| (y, ctx.add(l.eval(ctx, y), ctx.mul(tr_gamma, h.eval(ctx, y)))))
        .collect();
    let f_table = build_f(ctx, l, h, gamma);
    if let Some(x) = ctx
        .elements()
        .find(|&x| Some(&ctx.trace(f_table.apply(x))) != fbar.get(&ctx.trace(x)))
    {
        return Err(TraceError::CommutingFailure { x });
    }
    Ok(TraceConstruction { l: l.clone(), h: h.clone(), gamma, f_table, fbar })
}

impl TraceConstruction {
    pub fn fbar_is_permutation(&self) -> bool {
        let mut image: Vec<u32> = self.fbar.values().copied().collect();
        image.sort_unstable();
        image.dedup();
        image.len() == self.fbar.len()
    }

    /// `F̄^{(k)}(y)`, negative `k` through the inverse; `None` when `F̄`
    /// has no inverse.
    fn fbar_iter(&self, y: u32, k: i64) -> Option<u32> {
        let mut y = y;
        if k >= 0 {
            for _ in 0..k {
                y = self.fbar[&y];
            }
            return Some(y);
        }
        if !self.fbar_is_permutation() {
            return None;
        }
        let inv: HashMap<u32, u32> = self.fbar.iter().map(|(&a, &b)| (b, a)).collect();
        for _ in 0..-k {
            y = inv[&y];
        }
        Some(y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EqA1Verdict {
    pub mode: BoundMode,
    /// `None` when the sum needs `F̄^{-1}` and `F̄` does not permute GF(q).
    pub sum_vanishes: Option<bool>,
    pub is_ncycle: bool,
}

impl EqA1Verdict {
    pub fn agree(&self) -> Option<bool> {
        self.sum_vanishes.map(|s| s == self.is_ncycle)
    }
}

/// `Σ_i L^i(h(F̄^{(n-1-i)}(y))) = 0` on the trace image, against `F^{(n)} = id`.
pub fn check_eq_a1(
    ctx: &FieldCtx,
    tc: &TraceConstruction,
    n: u64,
    mode: BoundMode,
) -> Result<EqA1Verdict, TraceError> {
    let l_table = tc.l.to_table(ctx);
    if n == 0 || !l_table.is_ncycle(n) {
        return Err(TraceError::PreconditionLNotNCycle { n });
    }
    let top = match mode {
        BoundMode::NMinus1 => n - 1,
        BoundMode::MMinus1 => ctx.m() as u64 - 1,
    };
    let mut sum_vanishes = Some(true);
    for y in ctx.subfield_elements() {
        let mut total = 0;
        for i in 0..=top {
            let Some(z) = tc.fbar_iter(y, n as i64 - 1 - i as i64) else {
                sum_vanishes = None;
                break;
            };
            let mut v = tc.h.eval(ctx, z);
            for _ in 0..i {
                v = l_table.apply(v);
            }
            total = ctx.add(total, v);
        }
        if sum_vanishes.is_none() {
            break;
        }
        if total != 0 {
            sum_vanishes = Some(false);
        }
    }
    Ok(EqA1Verdict { mode, sum_vanishes, is_ncycle: tc.f_table.is_ncycle(n) })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct P1Verdict {
    /// `Tr(L2(x)) = 0` for every `x`.
    pub tr_kernel_ok: bool,
    /// Cycle order of `L1`, `None` if `L1` does not permute.
    pub l1_order: Option<CycleOrder>,
    /// Cycle order of `F = L1 + γ L2(Tr(x))`, `None` if `F` does not permute.
    pub order: Option<CycleOrder>,
}

impl P1Verdict {
    pub fn hypothesis(&self) -> bool {
        self.tr_kernel_ok && self.l1_order.is_some()
    }

    /// `F` permutes and its order divides that of `L1`.
    pub fn conclusion(&self) -> bool {
        match (&self.order, &self.l1_order) {
            (Some(f), Some(l)) => {
                l.as_biguint() % f.as_biguint() == num_bigint::BigUint::from(0u32)
            }
            _ => false,
        }
    }

    pub fn counterexample(&self) -> bool {
        self.hypothesis() && !self.conclusion()
    }
}

/// `F = L1 + γ L2(Tr(x))` with the trace-kernel hypothesis on `L2`.
pub fn build_p1(
    ctx: &FieldCtx,
    l1: &LinPoly,
    l2: &LinPoly,
    gamma: u32,
) -> Result<(FuncTable, P1Verdict), TraceError> {
    if l1.field() != ctx.id() || l2.field() != ctx.id() {
        return Err(TraceError::FieldMismatch);
    }
    if gamma == 0 {
        return Err(TraceError::ZeroGamma);
    }
    let tr_kernel_ok = ctx.elements().all(|x| ctx.trace(l2.eval(ctx, x)) == 0);
    let f = FuncTable::from_fn(ctx, |x| {
        ctx.add(l1.eval(ctx, x), ctx.mul(gamma, l2.eval(ctx, ctx.trace(x))))
    });
    let verdict = P1Verdict {
        tr_kernel_ok,
        l1_order: l1.to_table(ctx).cycle_order().ok(),
        order: f.cycle_order().ok(),
    };
    Ok((f, verdict))
}

/// `L2 = N^q - N`, whose trace vanishes identically.
pub fn trace_kernel_linearized(ctx: &FieldCtx, n: &LinPoly) -> LinPoly {
    let frob = lin_compose(ctx, &LinPoly::frobenius(ctx, 1), n).expect("same field");
    let a = frob.coeffs().iter().zip(n.coeffs()).map(|(&x, &y)| ctx.sub(x, y)).collect();
    LinPoly::new(ctx, a).expect("valid coefficients")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct C1Verdict {
    /// `h` vanishes on the trace image.
    pub kernel_ok: bool,
    pub commutes: bool,
    pub is_involution: bool,
}

impl C1Verdict {
    pub fn counterexample(&self) -> bool {
        self.kernel_ok && !self.is_involution
    }
}

/// Involution criterion for `F = L + γ h(Tr(x))` with `L` an involution.
pub fn check_c1_involution(
    ctx: &FieldCtx,
    l: &LinPoly,
    h: &PolyFn,
    gamma: u32,
) -> Result<C1Verdict, TraceError> {
    check_h(ctx, l, h, gamma)?;
    if !l.to_table(ctx).is_ncycle(2) {
        return Err(TraceError::PreconditionLNotInvolution);
    }
    let kernel_ok = ctx.subfield_elements().into_iter().all(|y| h.eval(ctx, y) == 0);
    let commutes = ctx.in_subfield(gamma) && build_trace_construction(ctx, l, h, gamma).is_ok();
    let f = build_f(ctx, l, h, gamma);
    Ok(C1Verdict { kernel_ok, commutes, is_involution: f.is_ncycle(2) })
}

/// Random polynomial over the subfield with at most `terms` nonzero terms of
/// degree below `q`.
pub fn random_subfield_poly(ctx: &FieldCtx, rng: &mut impl Rng, terms: usize) -> PolyFn {
    let sub = ctx.subfield_elements();
    let q = ctx.q() as u64;
    let picks: Vec<(u64, u32)> = (0..terms)
        .map(|_| (rng.gen_range(0..q), sub[rng.gen_range(0..sub.len())]))
        .collect();
    PolyFn::from_terms(ctx, &picks)
}
