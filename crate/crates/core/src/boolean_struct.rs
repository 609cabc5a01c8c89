//! Boolean functions on GF(2^m) and constructions `G(x) + γ f(x)`: linear
//! structures, the permutation and inverse criteria, the n-cycle criterion for
//! `G + γf`, and the quadruple/quintuple conditions for `x^d + γ f(x)`.

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::field::{FieldCtx, FieldId};
use crate::funcspace::{FuncError, FuncTable};
use crate::linearized::LinPoly;
use crate::numtheory::pow_mod;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoolError {
    #[error("Boolean functions need a characteristic-2 field")]
    NotChar2,
    #[error("value {value} at {x} is not in {{0, 1}}")]
    NotBoolean { x: u32, value: u32 },
    #[error("expected {expected} bits, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("functions belong to different fields")]
    FieldMismatch,
    #[error("map is not a permutation")]
    NotPermutation,
    #[error("gamma must be nonzero")]
    ZeroGamma,
    #[error("G is not an n-cycle for n={n}")]
    PreconditionGNotNCycle { n: u64 },
    #[error("f is not G-invariant (f(G(x)) != f(x) at x={x})")]
    PreconditionFNotGInvariant { x: u32 },
    #[error("d={d} does not satisfy d^{n} = 1 mod 2^m - 1")]
    PreconditionDNotCycle { d: u64, n: u64 },
    #[error("f(x^d) != f(x) at x={x}")]
    PreconditionFNotDInvariant { x: u32 },
    #[error("bad hex bit table: {0}")]
    BadHex(String),
}

impl From<FuncError> for BoolError {
    fn from(e: FuncError) -> Self {
        match e {
            FuncError::NotPermutation => BoolError::NotPermutation,
            FuncError::WrongLength { expected, got } => BoolError::WrongLength { expected, got },
            _ => BoolError::FieldMismatch,
        }
    }
}

fn require_char2(ctx: &FieldCtx) -> Result<(), BoolError> {
    if ctx.p() == 2 {
        Ok(())
    } else {
        Err(BoolError::NotChar2)
    }
}

/// `f: GF(2^m) -> {0, 1}`, stored as one bit per element encoding.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BoolFn {
    field: FieldId,
    bits: Vec<bool>,
}

/// Preimage of 1 under a Boolean function, in increasing encoding order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SupportSet {
    pub members: Vec<u32>,
}

impl BoolFn {
    pub fn from_bits(ctx: &FieldCtx, bits: Vec<bool>) -> Result<Self, BoolError> {
        require_char2(ctx)?;
        if bits.len() != ctx.order() as usize {
            return Err(BoolError::WrongLength { expected: ctx.order() as usize, got: bits.len() });
        }
        Ok(BoolFn { field: ctx.id(), bits })
    }

    pub fn from_fn(ctx: &FieldCtx, mut f: impl FnMut(u32) -> bool) -> Result<Self, BoolError> {
        Self::from_bits(ctx, ctx.elements().map(&mut f).collect())
    }

    /// Accepts a field-valued table whose values satisfy `v^2 = v`.
    pub fn from_table(ctx: &FieldCtx, table: &FuncTable) -> Result<Self, BoolError> {
        if table.field() != ctx.id() {
            return Err(BoolError::FieldMismatch);
        }
        require_char2(ctx)?;
        for (x, &v) in table.values().iter().enumerate() {
            if ctx.mul(v, v) != v {
                return Err(BoolError::NotBoolean { x: x as u32, value: v });
            }
        }
        Self::from_fn(ctx, |x| table.apply(x) == 1)
    }

    pub fn zero(ctx: &FieldCtx) -> Result<Self, BoolError> {
        Self::from_fn(ctx, |_| false)
    }

    pub fn one(ctx: &FieldCtx) -> Result<Self, BoolError> {
        Self::from_fn(ctx, |_| true)
    }

    /// `Tr(λx)`, absolute trace to GF(2).
    pub fn trace_lambda(ctx: &FieldCtx, lambda: u32) -> Result<Self, BoolError> {
        Self::from_fn(ctx, |x| ctx.abs_trace(ctx.mul(lambda, x)) == 1)
    }

    /// `Tr(λx)·Tr(μx)`.
    pub fn trace_product(ctx: &FieldCtx, lambda: u32, mu: u32) -> Result<Self, BoolError> {
        Self::from_fn(ctx, |x| {
            ctx.abs_trace(ctx.mul(lambda, x)) == 1 && ctx.abs_trace(ctx.mul(mu, x)) == 1
        })
    }

    pub fn indicator(ctx: &FieldCtx, points: &[u32]) -> Result<Self, BoolError> {
        Self::from_fn(ctx, |x| points.contains(&x))
    }

    pub fn field(&self) -> FieldId {
        self.field
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, x: u32) -> bool {
        self.bits[x as usize]
    }

    /// Value as a field element, `0` or `1`.
    pub fn value(&self, x: u32) -> u32 {
        self.bits[x as usize] as u32
    }

    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn support(&self) -> SupportSet {
        SupportSet {
            members: (0..self.bits.len() as u32).filter(|&x| self.get(x)).collect(),
        }
    }

    pub fn xor(&self, other: &BoolFn) -> Result<BoolFn, BoolError> {
        if self.field != other.field {
            return Err(BoolError::FieldMismatch);
        }
        let bits = self.bits.iter().zip(&other.bits).map(|(a, b)| a ^ b).collect();
        Ok(BoolFn { field: self.field, bits })
    }

    /// `f ∘ g`.
    pub fn compose(&self, g: &FuncTable) -> Result<BoolFn, BoolError> {
        if self.field != g.field() {
            return Err(BoolError::FieldMismatch);
        }
        let bits = g.values().iter().map(|&y| self.bits[y as usize]).collect();
        Ok(BoolFn { field: self.field, bits })
    }

    pub fn to_table(&self, ctx: &FieldCtx) -> FuncTable {
        FuncTable::from_fn(ctx, |x| self.value(x))
    }

    /// Bytes little-endian by element encoding, two hex digits per byte.
    pub fn to_hex(&self) -> String {
        self.bits
            .chunks(8)
            .map(|c| {
                let byte = c.iter().enumerate().fold(0u8, |b, (i, &v)| b | (v as u8) << i);
                format!("{byte:02x}")
            })
            .collect()
    }

    pub fn from_hex(ctx: &FieldCtx, hex: &str) -> Result<Self, BoolError> {
        let order = ctx.order() as usize;
        let want = order.div_ceil(8) * 2;
        if !hex.is_ascii() || hex.len() != want {
            return Err(BoolError::BadHex(format!("expected {want} hex digits, got {}", hex.len())));
        }
        let mut bits = Vec::with_capacity(order);
        for k in 0..want / 2 {
            let byte = u8::from_str_radix(&hex[2 * k..2 * k + 2], 16)
                .map_err(|e| BoolError::BadHex(e.to_string()))?;
            for i in 0..8 {
                if bits.len() < order {
                    bits.push(byte >> i & 1 == 1);
                } else if byte >> i & 1 == 1 {
                    return Err(BoolError::BadHex("bits set beyond the field order".into()));
                }
            }
        }
        Self::from_bits(ctx, bits)
    }
}

impl Serialize for BoolFn {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

/// Hex form without a field attached; bind it with [`BoolFn::from_hex`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoolFnHex(pub String);

impl<'de> Deserialize<'de> for BoolFnHex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d).map(BoolFnHex)
    }
}

/// Nonzero `γ` with `f(x) + f(x + γ) = b` for every `x`.
pub fn linear_structures(ctx: &FieldCtx, f: &BoolFn, b: bool) -> Vec<u32> {
    (1..ctx.order()).filter(|&g| is_linear_structure(ctx, f, g, b)).collect()
}

pub fn is_linear_structure(ctx: &FieldCtx, f: &BoolFn, gamma: u32, b: bool) -> bool {
    ctx.elements().all(|x| (f.get(x) ^ f.get(ctx.add(x, gamma))) == b)
}

/// `x ↦ G(x) + γ f(x)`.
pub fn g_plus_gamma_f(ctx: &FieldCtx, g: &FuncTable, f: &BoolFn, gamma: u32) -> FuncTable {
    FuncTable::from_fn(ctx, |x| {
        if f.get(x) {
            ctx.add(g.apply(x), gamma)
        } else {
            g.apply(x)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PpVerdict {
    /// `γ` is a 0-linear structure of `f ∘ G^{-1}`.
    pub criterion: bool,
    /// `G + γf` permutes the field, by table.
    pub is_permutation: bool,
}

impl PpVerdict {
    pub fn agree(&self) -> bool {
        self.criterion == self.is_permutation
    }
}

/// Permutation criterion for `G + γf`.
pub fn check_pp_l2(
    ctx: &FieldCtx,
    g: &FuncTable,
    f: &BoolFn,
    gamma: u32,
) -> Result<PpVerdict, BoolError> {
    require_char2(ctx)?;
    if gamma == 0 {
        return Err(BoolError::ZeroGamma);
    }
    let g_inv = g.inverse()?;
    let criterion = is_linear_structure(ctx, &f.compose(&g_inv)?, gamma, false);
    let is_permutation = g_plus_gamma_f(ctx, g, f, gamma).is_permutation();
    Ok(PpVerdict { criterion, is_permutation })
}

/// `S^{-1} = G^{-1}(x + γ f(G^{-1}(x)))` for `S = G + γf`.
pub fn inverse_l3(
    ctx: &FieldCtx,
    g: &FuncTable,
    f: &BoolFn,
    gamma: u32,
) -> Result<FuncTable, BoolError> {
    require_char2(ctx)?;
    if !g_plus_gamma_f(ctx, g, f, gamma).is_permutation() {
        return Err(BoolError::NotPermutation);
    }
    let g_inv = g.inverse()?;
    Ok(FuncTable::from_fn(ctx, |x| {
        let y = g_inv.apply(x);
        let inner = if f.get(y) { ctx.add(x, gamma) } else { x };
        g_inv.apply(inner)
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct T4Verdict {
    pub cond1: bool,
    pub cond2: bool,
    pub is_ncycle: bool,
    /// `G(x + γ) = G(x) + γ` for every `x`.
    pub translation_commutes: bool,
}

impl T4Verdict {
    pub fn agree(&self) -> bool {
        (self.cond1 && self.cond2) == self.is_ncycle
    }

    /// The translation-commuting hypothesis holds yet `F` is an n-cycle.
    pub fn remark_counterexample(&self) -> bool {
        self.translation_commutes && self.is_ncycle
    }
}

/// n-cycle criterion for `F = G + γf` with `G` an n-cycle and `f ∘ G = f`.
pub fn check_t4(
    ctx: &FieldCtx,
    g: &FuncTable,
    f: &BoolFn,
    gamma: u32,
    n: u64,
) -> Result<T4Verdict, BoolError> {
    require_char2(ctx)?;
    if gamma == 0 {
        return Err(BoolError::ZeroGamma);
    }
    if f.field() != g.field() {
        return Err(BoolError::FieldMismatch);
    }
    if n == 0 || !g.is_ncycle(n) {
        return Err(BoolError::PreconditionGNotNCycle { n });
    }
    if let Some(x) = ctx.elements().find(|&x| f.get(g.apply(x)) != f.get(x)) {
        return Err(BoolError::PreconditionFNotGInvariant { x });
    }
    let cond1 = is_linear_structure(ctx, f, gamma, false);
    let g_pow = g.iterate(n - 1);
    let cond2 = ctx.elements().filter(|&x| f.get(x)).all(|x| {
        let mut y = x;
        for _ in 0..n - 1 {
            y = ctx.add(g.apply(y), gamma);
        }
        g_pow.apply(ctx.add(x, gamma)) == y
    });
    let is_ncycle = g_plus_gamma_f(ctx, g, f, gamma).is_ncycle(n);
    let translation_commutes =
        ctx.elements().all(|x| g.apply(ctx.add(x, gamma)) == ctx.add(g.apply(x), gamma));
    Ok(T4Verdict { cond1, cond2, is_ncycle, translation_commutes })
}

/// `c^e` for a possibly huge exponent.
fn pow_big(ctx: &FieldCtx, c: u32, e: u128) -> u32 {
    if e == 0 {
        return 1;
    }
    if c == 0 {
        return 0;
    }
    ctx.pow(c, (e % (ctx.order() as u128 - 1)) as u64)
}

/// `Σ_{0<j<n} r^j`, by the geometric-series closed form.
pub fn geometric_sum(ctx: &FieldCtx, r: u32, n: u128) -> u32 {
    if n <= 1 {
        return 0;
    }
    if r == 1 {
        return ctx.from_int(((n - 1) % 2) as i64);
    }
    let num = ctx.sub(pow_big(ctx, r, n), r);
    ctx.div(num, ctx.sub(r, 1)).expect("r != 1")
}

/// Precomputed powers of `γ` and its inverse for the condition sums.
struct SumCtx<'a> {
    ctx: &'a FieldCtx,
    gamma: u32,
    gamma_inv: u32,
    d: u128,
}

impl SumCtx<'_> {
    fn g(&self, e: u128) -> u32 {
        pow_big(self.ctx, self.gamma, e)
    }

    /// `Σ_{0<j<n} γ^{-j} y^j`.
    fn scaled(&self, y: u32, n: u128) -> u32 {
        geometric_sum(self.ctx, self.ctx.mul(y, self.gamma_inv), n)
    }

    fn mul(&self, terms: &[u32]) -> u32 {
        terms.iter().fold(1, |acc, &t| self.ctx.mul(acc, t))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CycleCondVerdict {
    pub cond1: bool,
    /// `Σ_{i<n} γ^{d^i} = 0`.
    pub cond2a: bool,
    /// Polynomial identity, as function equality over the whole field.
    pub cond2b: bool,
    /// Polynomial identity restricted to the support of `f`.
    pub cond2b_on_support: bool,
    /// `(x^d + γf)^{(n)}` is the identity.
    pub oracle: bool,
}

impl CycleCondVerdict {
    pub fn stated(&self) -> bool {
        self.cond1 && self.cond2a && self.cond2b
    }

    pub fn agree(&self) -> bool {
        self.stated() == self.oracle
    }
}

pub(crate) fn check_power_preconditions(
    ctx: &FieldCtx,
    d: u64,
    gamma: u32,
    f: &BoolFn,
    n: u64,
) -> Result<(), BoolError> {
    require_char2(ctx)?;
    if gamma == 0 {
        return Err(BoolError::ZeroGamma);
    }
    let modulus = ctx.order() as u64 - 1;
    if d == 0 || pow_mod(d, n, modulus) != 1 % modulus {
        return Err(BoolError::PreconditionDNotCycle { d, n });
    }
    match ctx.elements().find(|&x| f.get(ctx.pow(x, d)) != f.get(x)) {
        Some(x) => Err(BoolError::PreconditionFNotDInvariant { x }),
        None => Ok(()),
    }
}

pub(crate) fn power_verdict(
    ctx: &FieldCtx,
    d: u64,
    gamma: u32,
    f: &BoolFn,
    n: u64,
    diff: &[u32],
) -> CycleCondVerdict {
    let cond1 = is_linear_structure(ctx, f, gamma, false);
    let mut head = 0;
    let mut e = 1u128;
    for _ in 0..n {
        head = ctx.add(head, pow_big(ctx, gamma, e));
        e *= d as u128;
    }
    let cond2b = diff.iter().all(|&v| v == 0);
    let cond2b_on_support = ctx.elements().filter(|&x| f.get(x)).all(|x| diff[x as usize] == 0);
    let g = FuncTable::from_fn(ctx, |x| ctx.pow(x, d));
    let oracle = g_plus_gamma_f(ctx, &g, f, gamma).is_ncycle(n);
    CycleCondVerdict { cond1, cond2a: head == 0, cond2b, cond2b_on_support, oracle }
}

/// Quadruple conditions for `x^d + γ f(x)`.
pub fn check_c2_quadruple(
    ctx: &FieldCtx,
    d: u64,
    gamma: u32,
    f: &BoolFn,
) -> Result<CycleCondVerdict, BoolError> {
    check_power_preconditions(ctx, d, gamma, f, 4)?;
    let diff = c2_identity_diff(ctx, d, gamma);
    Ok(power_verdict(ctx, d, gamma, f, 4, &diff))
}

/// Left side minus right side of the quadruple identity at every `x`.
pub fn c2_identity_diff(ctx: &FieldCtx, d: u64, gamma: u32) -> Vec<u32> {
    let s = SumCtx { ctx, gamma, gamma_inv: ctx.inv(gamma).unwrap(), d: d as u128 };
    let (d1, d2, d3) = (s.d, s.d * s.d, s.d * s.d * s.d);
    // sums with no x factor
    let t3 = s.mul(&[s.g(d1), geometric_sum(ctx, s.g(d1 - 1), d1)]);
    ctx.elements().map(|x| {
        let xd = pow_big(ctx, x, d1);
        let xd2 = pow_big(ctx, x, d2);
        let t1 = s.mul(&[s.g(d2), s.scaled(xd, d2)]);
        let t2 = geometric_sum(ctx, ctx.mul(s.g(d1), xd2), d1);
        let t4 = s.mul(&[t3, s.scaled(xd, d2)]);
        let rhs = s.mul(&[s.g(d3), s.scaled(x, d3)]);
        [t1, t2, t3, t4].iter().fold(rhs, |acc, &t| ctx.add(acc, t))
    })
    .collect()
}

/// Quintuple conditions for `x^d + γ f(x)`.
pub fn check_c3_quintuple(
    ctx: &FieldCtx,
    d: u64,
    gamma: u32,
    f: &BoolFn,
) -> Result<CycleCondVerdict, BoolError> {
    check_power_preconditions(ctx, d, gamma, f, 5)?;
    let diff = c3_identity_diff(ctx, d, gamma);
    Ok(power_verdict(ctx, d, gamma, f, 5, &diff))
}

/// Left side minus right side of the quintuple identity at every `x`.
pub fn c3_identity_diff(ctx: &FieldCtx, d: u64, gamma: u32) -> Vec<u32> {
    let s = SumCtx { ctx, gamma, gamma_inv: ctx.inv(gamma).unwrap(), d: d as u128 };
    let (d1, d2, d3, d4) = (s.d, s.d * s.d, s.d.pow(3), s.d.pow(4));
    let inv_d = geometric_sum(ctx, s.gamma_inv, d1);
    let inv_d2 = geometric_sum(ctx, s.gamma_inv, d2);
    let s3 = s.mul(&[s.g(d2), geometric_sum(ctx, s.g(d1 - 1), d2)]);
    let s5 = s.mul(&[s.g(d1), geometric_sum(ctx, s.g(d2 - 1), d1)]);
    let s6 = s.mul(&[s.g(d1), geometric_sum(ctx, s.g(d1 - 1), d1)]);
    let s9 = s.mul(&[s.g(d2 + d1), inv_d, geometric_sum(ctx, s.g(d1 - 1), d2)]);
    ctx.elements().map(|x| {
        let xd = pow_big(ctx, x, d1);
        let xd2 = pow_big(ctx, x, d2);
        let xd3 = pow_big(ctx, x, d3);
        let l = s.scaled(xd, d3);
        let k = s.scaled(xd2, d2);
        let terms = [
            s.mul(&[s.g(d3), l]),
            s.mul(&[s.g(d2), k]),
            s3,
            s.mul(&[s.g(d1), s.scaled(xd3, d1)]),
            s5,
            s6,
            s.mul(&[s.g(d3 + d1), inv_d, l]),
            s.mul(&[s.g(d2 + d1), inv_d, k]),
            s9,
            s.mul(&[s.g(d3 + d2), inv_d2, l]),
            s.mul(&[s.g(d3 + d2 + d1), inv_d, inv_d2, l]),
        ];
        let rhs = s.mul(&[s.g(d4), s.scaled(x, d4)]);
        terms.iter().fold(rhs, |acc, &t| ctx.add(acc, t))
    })
    .collect()
}

/// Labelled Boolean function for audit pools.
#[derive(Debug, Clone, Serialize)]
pub struct PoolFn {
    pub label: String,
    pub f: BoolFn,
}

/// `0`, `1`, sampled `Tr(λx)`, `Tr(λx)Tr(μx)` and point indicators.
pub fn boolean_pool(ctx: &FieldCtx, rng: &mut impl Rng, samples: usize) -> Vec<PoolFn> {
    let mut out = vec![
        PoolFn { label: "0".into(), f: BoolFn::zero(ctx).unwrap() },
        PoolFn { label: "1".into(), f: BoolFn::one(ctx).unwrap() },
    ];
    let order = ctx.order();
    let lambdas: Vec<u32> = if order as usize <= samples + 1 {
        (1..order).collect()
    } else {
        (0..samples).map(|_| rng.gen_range(1..order)).collect()
    };
    for &l in &lambdas {
        out.push(PoolFn { label: format!("Tr({l}x)"), f: BoolFn::trace_lambda(ctx, l).unwrap() });
    }
    for _ in 0..samples {
        let (l, m) = (rng.gen_range(1..order), rng.gen_range(1..order));
        out.push(PoolFn {
            label: format!("Tr({l}x)Tr({m}x)"),
            f: BoolFn::trace_product(ctx, l, m).unwrap(),
        });
    }
    for _ in 0..samples.min(order as usize) {
        let p = rng.gen_range(0..order);
        out.push(PoolFn { label: format!("1[x={p}]"), f: BoolFn::indicator(ctx, &[p]).unwrap() });
    }
    out
}

/// Indicators of unions of `G`-orbits, invariant under `G` by construction.
pub fn orbit_pool(
    ctx: &FieldCtx,
    g: &FuncTable,
    rng: &mut impl Rng,
    samples: usize,
) -> Vec<PoolFn> {
    let mut orbit_of = vec![usize::MAX; ctx.order() as usize];
    let mut orbits = 0;
    for x in ctx.elements() {
        if orbit_of[x as usize] != usize::MAX {
            continue;
        }
        let mut y = x;
        while orbit_of[y as usize] == usize::MAX {
            orbit_of[y as usize] = orbits;
            y = g.apply(y);
        }
        orbits += 1;
    }
    (0..samples)
        .map(|_| {
            let chosen: Vec<bool> = (0..orbits).map(|_| rng.gen_bool(0.5)).collect();
            let f = BoolFn::from_fn(ctx, |x| chosen[orbit_of[x as usize]]).unwrap();
            PoolFn { label: format!("orbits:{}", f.to_hex()), f }
        })
        .collect()
}

/// Labelled permutation for audit pools.
#[derive(Debug, Clone)]
pub struct PoolMap {
    pub label: String,
    pub table: FuncTable,
}

/// Permutations whose n-th iterate is the identity: `x`, monomials `x^d`
/// with `d^n ≡ 1`, and sampled linearized n-cycles.
pub fn ncycle_pool(ctx: &FieldCtx, n: u64, rng: &mut impl Rng, samples: usize) -> Vec<PoolMap> {
    let modulus = ctx.order() as u64 - 1;
    let mut out = vec![PoolMap { label: "x".into(), table: FuncTable::identity(ctx) }];
    for d in 2..=modulus {
        if out.len() > samples {
            break;
        }
        if pow_mod(d, n, modulus) == 1 % modulus && d % modulus != 1 % modulus {
            out.push(PoolMap {
                label: format!("x^{d}"),
                table: FuncTable::from_fn(ctx, |x| ctx.pow(x, d)),
            });
        }
    }
    let mut found = 0;
    for _ in 0..samples * 200 {
        if found >= samples {
            break;
        }
        let l = LinPoly::random(ctx, rng);
        let table = l.to_table(ctx);
        if !table.is_identity() && table.is_ncycle(n) {
            out.push(PoolMap { label: format!("L{:?}", l.coeffs()), table });
            found += 1;
        }
    }
    out
}
