//! Maps on a finite field, as reduced polynomials and as full value tables.
//!
//! The value table is the brute-force oracle used throughout the crate:
//! composition, permutation tests, cycle orders and inverses are all direct
//! O(order) computations on tables.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::field::{FieldCtx, FieldId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FuncError {
    #[error("map is not a permutation")]
    NotPermutation,
    #[error("maps belong to different fields")]
    FieldMismatch,
    #[error("expected {expected} values, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("value {value} is not an element of a field of order {order}")]
    OutOfRange { value: u32, order: u32 },
}

fn check_values(ctx: &FieldCtx, values: &[u32]) -> Result<(), FuncError> {
    match values.iter().find(|&&v| v >= ctx.order()) {
        Some(&value) => Err(FuncError::OutOfRange { value, order: ctx.order() }),
        None => Ok(()),
    }
}

/// A polynomial function in canonical form: reduced modulo `x^order - x`,
/// trailing zero coefficients trimmed. `coeffs[e]` multiplies `x^e`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolyFn {
    field: FieldId,
    coeffs: Vec<u32>,
}

/// Exponent of the reduced monomial equal to `x^e` as a function.
pub fn reduce_exponent(e: u64, order: u32) -> u64 {
    if e == 0 {
        0
    } else {
        (e - 1) % (order as u64 - 1) + 1
    }
}

impl PolyFn {
    pub fn new(ctx: &FieldCtx, coeffs: Vec<u32>) -> Result<Self, FuncError> {
        check_values(ctx, &coeffs)?;
        let terms: Vec<(u64, u32)> =
            coeffs.into_iter().enumerate().map(|(e, c)| (e as u64, c)).collect();
        Ok(Self::from_terms(ctx, &terms))
    }

    /// Sum of `coeff * x^exp` terms; exponents may exceed the field order.
    /// Coefficients must be valid encodings.
    pub fn from_terms(ctx: &FieldCtx, terms: &[(u64, u32)]) -> Self {
        let mut coeffs: Vec<u32> = Vec::new();
        for &(e, c) in terms {
            debug_assert!(c < ctx.order());
            let r = reduce_exponent(e, ctx.order()) as usize;
            if coeffs.len() <= r {
                coeffs.resize(r + 1, 0);
            }
            coeffs[r] = ctx.add(coeffs[r], c);
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        PolyFn { field: ctx.id(), coeffs }
    }

    pub fn zero(ctx: &FieldCtx) -> Self {
        PolyFn { field: ctx.id(), coeffs: Vec::new() }
    }

    pub fn identity(ctx: &FieldCtx) -> Self {
        Self::from_terms(ctx, &[(1, 1)])
    }

    pub fn constant(ctx: &FieldCtx, c: u32) -> Self {
        Self::from_terms(ctx, &[(0, c)])
    }

    pub fn monomial(ctx: &FieldCtx, d: u64) -> Self {
        Self::from_terms(ctx, &[(d, 1)])
    }

    pub fn field(&self) -> FieldId {
        self.field
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    /// Degree of the reduced form; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, ctx: &FieldCtx, x: u32) -> u32 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .fold(0, |acc, (e, &c)| ctx.add(acc, ctx.mul(c, ctx.pow(x, e as u64))))
    }

    /// Evaluates at every element; `out[x] = f(x)`.
    pub fn to_table(&self, ctx: &FieldCtx) -> FuncTable {
        assert_eq!(self.field, ctx.id(), "polynomial used with a foreign field");
        if self.coeffs.len() <= 8 {
            // Horner is cheapest for short dense polynomials
            let out = ctx
                .elements()
                .map(|x| self.coeffs.iter().rev().fold(0, |acc, &c| ctx.add(ctx.mul(acc, x), c)))
                .collect();
            return FuncTable { field: ctx.id(), out };
        }
        let out = ctx.elements().map(|x| self.eval(ctx, x)).collect();
        FuncTable { field: ctx.id(), out }
    }
}

impl Serialize for PolyFn {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.coeffs.serialize(s)
    }
}

/// Full value table of a map on the field: `out[enc(x)] = image of x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FuncTable {
    field: FieldId,
    out: Vec<u32>,
}

/// Least common multiple of the cycle lengths of a permutation. It can be
/// far larger than the field order, hence arbitrary precision.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CycleOrder(BigUint);

impl CycleOrder {
    pub fn as_biguint(&self) -> &BigUint {
        &self.0
    }

    pub fn to_u64(&self) -> Option<u64> {
        u64::try_from(&self.0).ok()
    }

    /// Whether `f^(n)` is the identity.
    pub fn divides(&self, n: u64) -> bool {
        n > 0 && (BigUint::from(n) % &self.0) == BigUint::from(0u32)
    }
}

impl fmt::Display for CycleOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Serialize for CycleOrder {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.to_u64() {
            Some(v) => s.serialize_u64(v),
            None => s.collect_str(&self.0),
        }
    }
}

impl FuncTable {
    pub fn from_values(ctx: &FieldCtx, out: Vec<u32>) -> Result<Self, FuncError> {
        if out.len() != ctx.order() as usize {
            return Err(FuncError::WrongLength { expected: ctx.order() as usize, got: out.len() });
        }
        check_values(ctx, &out)?;
        Ok(FuncTable { field: ctx.id(), out })
    }

    pub fn from_fn(ctx: &FieldCtx, f: impl FnMut(u32) -> u32) -> Self {
        let out = ctx.elements().map(f).collect::<Vec<_>>();
        debug_assert!(out.iter().all(|&v| v < ctx.order()));
        FuncTable { field: ctx.id(), out }
    }

    pub fn identity(ctx: &FieldCtx) -> Self {
        Self::from_fn(ctx, |x| x)
    }

    pub fn field(&self) -> FieldId {
        self.field
    }

    pub fn values(&self) -> &[u32] {
        &self.out
    }

    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        self.out[x as usize]
    }

    pub fn len(&self) -> usize {
        self.out.len()
    }

    pub fn is_empty(&self) -> bool {
        self.out.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.out.iter().enumerate().all(|(i, &v)| v as usize == i)
    }

    pub fn image_size(&self) -> usize {
        let mut seen = vec![false; self.out.len()];
        self.out.iter().filter(|&&v| !std::mem::replace(&mut seen[v as usize], true)).count()
    }

    pub fn is_permutation(&self) -> bool {
        self.image_size() == self.out.len()
    }

    /// `self ∘ inner`, i.e. `x ↦ self(inner(x))`.
    pub fn compose(&self, inner: &FuncTable) -> Result<FuncTable, FuncError> {
        if self.field != inner.field {
            return Err(FuncError::FieldMismatch);
        }
        let out = inner.out.iter().map(|&y| self.out[y as usize]).collect();
        Ok(FuncTable { field: self.field, out })
    }

    /// `n`-fold self-composition; `iterate(0)` is the identity.
    pub fn iterate(&self, n: u64) -> FuncTable {
        let mut out: Vec<u32> = (0..self.out.len() as u32).collect();
        for _ in 0..n {
            for v in out.iter_mut() {
                *v = self.out[*v as usize];
            }
        }
        FuncTable { field: self.field, out }
    }

    /// Lengths of the disjoint cycles, in order of their least element.
    pub fn cycle_lengths(&self) -> Result<Vec<u64>, FuncError> {
        if !self.is_permutation() {
            return Err(FuncError::NotPermutation);
        }
        let mut seen = vec![false; self.out.len()];
        let mut lengths = Vec::new();
        for start in 0..self.out.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0u64;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.out[x] as usize;
                len += 1;
            }
            lengths.push(len);
        }
        Ok(lengths)
    }

    /// Least `n >= 1` with `f^(n) = I`, as the lcm of the cycle lengths.
    pub fn cycle_order(&self) -> Result<CycleOrder, FuncError> {
        let mut lengths = self.cycle_lengths()?;
        lengths.sort_unstable();
        lengths.dedup();
        let order = lengths
            .into_iter()
            .fold(BigUint::from(1u32), |acc, l| acc.lcm(&BigUint::from(l)));
        Ok(CycleOrder(order))
    }

    /// Whether the map is a permutation with `f^(n) = I`.
    pub fn is_ncycle(&self, n: u64) -> bool {
        self.cycle_lengths()
            .map(|ls| n > 0 && ls.iter().all(|&l| n % l == 0))
            .unwrap_or(false)
    }

    pub fn inverse(&self) -> Result<FuncTable, FuncError> {
        if !self.is_permutation() {
            return Err(FuncError::NotPermutation);
        }
        let mut inv = vec![0u32; self.out.len()];
        for (x, &y) in self.out.iter().enumerate() {
            inv[y as usize] = x as u32;
        }
        Ok(FuncTable { field: self.field, out: inv })
    }

    /// The unique reduced polynomial agreeing with the table everywhere,
    /// from the Lagrange form `f(x) = Σ_c f(c) (1 - (x - c)^{Q-1})`:
    /// `a_0 = f(0)`, `a_k = -Σ_{c≠0} f(c) c^{-k}` for `0 < k < Q-1`, and
    /// `a_{Q-1} = -Σ_c f(c)`.
    pub fn interpolate(&self, ctx: &FieldCtx) -> PolyFn {
        assert_eq!(self.field, ctx.id(), "table used with a foreign field");
        let order = ctx.order() as usize;
        let n = order - 1;
        let mut acc = vec![0u32; order];
        acc[0] = self.out[0];
        if n >= 2 {
            for c in 1..ctx.order() {
                let fc = self.out[c as usize];
                if fc == 0 {
                    continue;
                }
                let cinv = ctx.inv(c).unwrap();
                let mut term = fc;
                for slot in acc.iter_mut().take(n).skip(1) {
                    term = ctx.mul(term, cinv);
                    *slot = ctx.add(*slot, term);
                }
            }
            for slot in acc.iter_mut().take(n).skip(1) {
                *slot = ctx.neg(*slot);
            }
        }
        let total = self.out.iter().fold(0, |s, &v| ctx.add(s, v));
        acc[n] = ctx.neg(total);
        while acc.last() == Some(&0) {
            acc.pop();
        }
        PolyFn { field: ctx.id(), coeffs: acc }
    }
}

impl Serialize for FuncTable {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.out.serialize(s)
    }
}
