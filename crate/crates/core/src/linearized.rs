//! q-linearized polynomials `L(x) = Σ a_i x^{q^i}` over GF(q^m).
//!
//! Composition of linearized polynomials is the twisted convolution
//! `(L1 ∘ L2)_k = Σ_{i+j ≡ k (mod m)} a_i b_j^{q^i}`, exponents folded by
//! `x^{q^m} = x`. Bijectivity and the compositional inverse come from the
//! Dickson matrix `D_L[i][j] = a_{(j-i) mod m}^{q^i}`: `L` permutes the field
//! iff `det D_L != 0`, and then `L^{-1} = det^{-1} Σ ā_i x^{q^i}` where `ā_i`
//! is the `(i, 0)` cofactor.

use rand::Rng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::field::{FieldCtx, FieldId};
use crate::funcspace::{FuncTable, PolyFn};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinError {
    #[error("linearized polynomial is not a permutation (Dickson determinant is zero)")]
    NotPermutation,
    #[error("expected {expected} coefficients, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("polynomials belong to different fields")]
    FieldMismatch,
    #[error("coefficient {value} is not an element of a field of order {order}")]
    OutOfRange { value: u32, order: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinPoly {
    field: FieldId,
    a: Vec<u32>,
}

impl LinPoly {
    pub fn new(ctx: &FieldCtx, a: Vec<u32>) -> Result<Self, LinError> {
        let m = ctx.m() as usize;
        if a.len() != m {
            return Err(LinError::WrongLength { expected: m, got: a.len() });
        }
        if let Some(&value) = a.iter().find(|&&v| v >= ctx.order()) {
            return Err(LinError::OutOfRange { value, order: ctx.order() });
        }
        Ok(LinPoly { field: ctx.id(), a })
    }

    /// `Σ c x^{q^k}` over the given `(k, c)` terms, `k` taken mod `m`.
    pub fn from_terms(ctx: &FieldCtx, terms: &[(u32, u32)]) -> Self {
        let m = ctx.m();
        let mut a = vec![0u32; m as usize];
        for &(k, c) in terms {
            let slot = &mut a[(k % m) as usize];
            *slot = ctx.add(*slot, c);
        }
        LinPoly { field: ctx.id(), a }
    }

    pub fn identity(ctx: &FieldCtx) -> Self {
        Self::from_terms(ctx, &[(0, 1)])
    }

    /// `x^{q^k}`.
    pub fn frobenius(ctx: &FieldCtx, k: u32) -> Self {
        Self::from_terms(ctx, &[(k, 1)])
    }

    pub fn scalar(ctx: &FieldCtx, c: u32) -> Self {
        Self::from_terms(ctx, &[(0, c)])
    }

    pub fn random(ctx: &FieldCtx, rng: &mut impl Rng) -> Self {
        let a = (0..ctx.m()).map(|_| rng.gen_range(0..ctx.order())).collect();
        LinPoly { field: ctx.id(), a }
    }

    /// Enumerates every linearized polynomial over the field in
    /// lexicographic coefficient order (`order^m` of them).
    pub fn all(ctx: &FieldCtx) -> impl Iterator<Item = LinPoly> + '_ {
        let m = ctx.m();
        let total = (ctx.order() as u64).pow(m);
        (0..total).map(move |mut code| {
            let a = (0..m)
                .map(|_| {
                    let d = (code % ctx.order() as u64) as u32;
                    code /= ctx.order() as u64;
                    d
                })
                .collect();
            LinPoly { field: ctx.id(), a }
        })
    }

    pub fn field(&self) -> FieldId {
        self.field
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.a
    }

    pub fn m(&self) -> usize {
        self.a.len()
    }

    /// Number of nonzero coefficients.
    pub fn weight(&self) -> usize {
        self.a.iter().filter(|&&c| c != 0).count()
    }

    pub fn eval(&self, ctx: &FieldCtx, x: u32) -> u32 {
        self.a
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .fold(0, |acc, (i, &c)| ctx.add(acc, ctx.mul(c, ctx.frob(x, i as u64))))
    }

    pub fn to_table(&self, ctx: &FieldCtx) -> FuncTable {
        assert_eq!(self.field, ctx.id(), "linearized polynomial used with a foreign field");
        FuncTable::from_fn(ctx, |x| self.eval(ctx, x))
    }

    /// The same map as an ordinary polynomial `Σ a_i x^{q^i}`.
    pub fn to_polyfn(&self, ctx: &FieldCtx) -> PolyFn {
        let terms: Vec<(u64, u32)> = self
            .a
            .iter()
            .enumerate()
            .map(|(i, &c)| ((ctx.q() as u64).pow(i as u32), c))
            .collect();
        PolyFn::from_terms(ctx, &terms)
    }
}

impl Serialize for LinPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.a.serialize(s)
    }
}

/// How the Dickson matrix is laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DicksonConvention {
    /// `D[i][j] = a_{(j-i) mod m}^{q^i}`: row `i` is the coefficient vector
    /// cyclically shifted right by `i`, raised to `q^i`.
    RowFrobenius,
    /// Transpose of [`DicksonConvention::RowFrobenius`].
    Transposed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DicksonMat {
    pub entries: Vec<Vec<u32>>,
    pub det: u32,
    /// `cof0[i]` is the signed `(i, 0)` cofactor.
    pub cof0: Vec<u32>,
    pub convention: DicksonConvention,
}

pub fn dickson_matrix(ctx: &FieldCtx, l: &LinPoly) -> DicksonMat {
    dickson_matrix_with(ctx, l, DicksonConvention::RowFrobenius)
}

pub fn dickson_matrix_with(ctx: &FieldCtx, l: &LinPoly, convention: DicksonConvention) -> DicksonMat {
    let m = l.m();
    let mut entries = vec![vec![0u32; m]; m];
    for (i, row) in entries.iter_mut().enumerate() {
        for (j, e) in row.iter_mut().enumerate() {
            *e = ctx.frob(l.a[(j + m - i) % m], i as u64);
        }
    }
    if convention == DicksonConvention::Transposed {
        entries = transpose(&entries);
    }
    let det = determinant(ctx, &entries);
    let cof0 = (0..m)
        .map(|i| {
            let minor = determinant(ctx, &minor(&entries, i, 0));
            if i % 2 == 1 {
                ctx.neg(minor)
            } else {
                minor
            }
        })
        .collect();
    DicksonMat { entries, det, cof0, convention }
}

fn transpose(a: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let m = a.len();
    (0..m).map(|j| (0..m).map(|i| a[i][j]).collect()).collect()
}

fn minor(a: &[Vec<u32>], row: usize, col: usize) -> Vec<Vec<u32>> {
    a.iter()
        .enumerate()
        .filter(|&(i, _)| i != row)
        .map(|(_, r)| {
            r.iter()
                .enumerate()
                .filter(|&(j, _)| j != col)
                .map(|(_, &v)| v)
                .collect()
        })
        .collect()
}

/// Determinant by Gaussian elimination with row pivoting. The empty matrix
/// has determinant 1.
pub fn determinant(ctx: &FieldCtx, a: &[Vec<u32>]) -> u32 {
    let n = a.len();
    let mut a: Vec<Vec<u32>> = a.to_vec();
    let mut det = 1u32;
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| a[r][col] != 0) else {
            return 0;
        };
        if piv != col {
            a.swap(piv, col);
            det = ctx.neg(det);
        }
        let pv = a[col][col];
        det = ctx.mul(det, pv);
        let pinv = ctx.inv(pv).unwrap();
        for r in col + 1..n {
            if a[r][col] == 0 {
                continue;
            }
            let factor = ctx.mul(a[r][col], pinv);
            for c in col..n {
                let t = ctx.mul(factor, a[col][c]);
                a[r][c] = ctx.sub(a[r][c], t);
            }
        }
    }
    det
}

/// Compositional inverse from the Dickson cofactors.
pub fn inverse_linearized(ctx: &FieldCtx, l: &LinPoly) -> Result<LinPoly, LinError> {
    inverse_linearized_with(ctx, l, DicksonConvention::RowFrobenius)
}

pub fn inverse_linearized_with(
    ctx: &FieldCtx,
    l: &LinPoly,
    convention: DicksonConvention,
) -> Result<LinPoly, LinError> {
    let d = dickson_matrix_with(ctx, l, convention);
    let det_inv = ctx.inv(d.det).ok_or(LinError::NotPermutation)?;
    let a = d.cof0.iter().map(|&c| ctx.mul(det_inv, c)).collect();
    Ok(LinPoly { field: l.field, a })
}

/// Outcome of the Dickson-convention self-test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConventionCheck {
    pub chosen: Option<DicksonConvention>,
    pub instances: usize,
    pub row_frobenius_failures: usize,
    pub transposed_failures: usize,
}

/// Checks both layouts on `samples` random polynomials (a mix of
/// permutations and non-permutations): `det != 0` must match the table
/// permutation test, and the cofactor inverse must compose to the identity.
/// The first layout with no failures is chosen.
pub fn check_convention(ctx: &FieldCtx, samples: usize, seed: u64) -> ConventionCheck {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut fails = [0usize; 2];
    let conventions = [DicksonConvention::RowFrobenius, DicksonConvention::Transposed];
    for _ in 0..samples {
        let l = LinPoly::random(ctx, &mut rng);
        let table = l.to_table(ctx);
        let is_perm = table.is_permutation();
        for (slot, &conv) in fails.iter_mut().zip(&conventions) {
            let ok = match inverse_linearized_with(ctx, &l, conv) {
                Ok(inv) => is_perm && table.compose(&inv.to_table(ctx)).unwrap().is_identity(),
                Err(_) => !is_perm,
            };
            if !ok {
                *slot += 1;
            }
        }
    }
    let chosen = conventions.iter().zip(fails).find(|(_, f)| *f == 0).map(|(c, _)| *c);
    ConventionCheck {
        chosen,
        instances: samples,
        row_frobenius_failures: fails[0],
        transposed_failures: fails[1],
    }
}

/// `outer ∘ inner` as a linearized polynomial.
pub fn lin_compose(ctx: &FieldCtx, outer: &LinPoly, inner: &LinPoly) -> Result<LinPoly, LinError> {
    if outer.field != inner.field || outer.field != ctx.id() {
        return Err(LinError::FieldMismatch);
    }
    let m = outer.m();
    let mut c = vec![0u32; m];
    for (i, &ai) in outer.a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in inner.a.iter().enumerate() {
            let k = (i + j) % m;
            c[k] = ctx.add(c[k], ctx.mul(ai, ctx.frob(bj, i as u64)));
        }
    }
    Ok(LinPoly { field: outer.field, a: c })
}

/// `n`-fold composition of `l` with itself; `n = 0` gives `x`. Built by
/// repeatedly composing the running power with `l`, coefficient by
/// coefficient.
pub fn lin_power(ctx: &FieldCtx, l: &LinPoly, n: u64) -> LinPoly {
    let mut acc = LinPoly::identity(ctx);
    for _ in 0..n {
        acc = lin_compose(ctx, &acc, l).expect("same field");
    }
    acc
}

/// Which reading of the coefficient recursion to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionMode {
    /// Wrapped indices `a_{(k-i) mod m}` throughout (the actual composition).
    Convolution,
    /// Second partial sum indexed `a_{m+1-i}` exactly as printed in the
    /// published recursion. Kept for auditing; it is not a composition.
    AsStated,
}

/// One step of the recursion as printed: `c'_k = Σ_{i<=k} c_i a_{k-i}^{q^i}
/// + Σ_{i>k} c_i a_{(m+1-i) mod m}^{q^i}`.
fn as_stated_step(ctx: &FieldCtx, c: &[u32], a: &[u32]) -> Vec<u32> {
    let m = a.len();
    (0..m)
        .map(|k| {
            let head = (0..=k).fold(0, |s, i| ctx.add(s, ctx.mul(c[i], ctx.frob(a[k - i], i as u64))));
            (k + 1..m).fold(head, |s, i| {
                ctx.add(s, ctx.mul(c[i], ctx.frob(a[(m + 1 - i) % m], i as u64)))
            })
        })
        .collect()
}

/// Coefficients of `L^{n-1}` under the chosen reading of the recursion.
pub fn power_coefficients(ctx: &FieldCtx, l: &LinPoly, n_minus_1: u64, mode: CriterionMode) -> Vec<u32> {
    match mode {
        CriterionMode::Convolution => lin_power(ctx, l, n_minus_1).a,
        CriterionMode::AsStated => {
            if n_minus_1 == 0 {
                return LinPoly::identity(ctx).a;
            }
            let mut c = l.a.clone();
            for _ in 1..n_minus_1 {
                c = as_stated_step(ctx, &c, &l.a);
            }
            c
        }
    }
}

/// Coefficient criterion for `L` to be an n-cycle: `det D_L != 0` and
/// `ā_k = det(D_L) · c_k` for every `k`, where `c` are the coefficients of
/// `L^{n-1}`.
pub fn is_ncycle_linearized(ctx: &FieldCtx, l: &LinPoly, n: u64, mode: CriterionMode) -> bool {
    if n == 0 {
        return false;
    }
    let d = dickson_matrix(ctx, l);
    if d.det == 0 {
        return false;
    }
    let c = power_coefficients(ctx, l, n - 1, mode);
    c.iter().zip(&d.cof0).all(|(&ck, &cof)| ctx.mul(d.det, ck) == cof)
}

#[cfg(test)]
mod tests;
