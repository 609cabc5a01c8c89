//! Claim audits: each run compares a stated criterion with the table oracle
//! over a deterministic instance grid and collects disagreements as
//! self-contained JSON exemplars that [`replay_exemplar`] can re-check.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::binomial::{self, BinomialSpec, IndexMode};
use crate::boolean_struct::{
    self, boolean_pool, check_t4, is_linear_structure, ncycle_pool, orbit_pool, BoolFn,
};
use crate::field::{FieldCtx, FieldError, FieldSpec, ModulusSpec};
use crate::funcspace::{FuncTable, PolyFn};
use crate::linearized::{
    check_convention, inverse_linearized_with, is_ncycle_linearized, CriterionMode,
    DicksonConvention, LinPoly,
};
use crate::monomial;
use crate::numtheory::pow_mod;
use crate::trace_construct::{
    build_p1, build_trace_construction, check_c1_involution, check_eq_a1, random_subfield_poly,
    trace_kernel_linearized, BoundMode, TraceError,
};

pub const DEFAULT_SEED: u64 = 0x5eed;

/// Exemplars kept per report; the disagreement count is always complete.
pub const MAX_EXEMPLARS: usize = 64;

#[derive(Debug, Error)]
pub enum AuditError {
    #[error("unknown claim `{0}`")]
    UnknownClaim(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("claim {claim} does not apply to {field}: {reason}")]
    NotApplicable { claim: &'static str, field: String, reason: String },
    #[error("malformed exemplar: {0}")]
    BadExemplar(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Claim {
    #[serde(rename = "thm-t1")]
    ThmT1,
    #[serde(rename = "prop-p11")]
    PropP11,
    #[serde(rename = "thm-t2")]
    ThmT2,
    #[serde(rename = "lemma-l1")]
    LemmaL1,
    #[serde(rename = "count-prop")]
    CountProp,
    #[serde(rename = "mersenne-remark")]
    MersenneRemark,
    #[serde(rename = "kasami")]
    Kasami,
    #[serde(rename = "gold")]
    Gold,
    #[serde(rename = "cor-t3")]
    CorT3,
    #[serde(rename = "prop-p1")]
    PropP1,
    #[serde(rename = "thm-t4")]
    ThmT4,
    #[serde(rename = "prop-c1")]
    PropC1,
    #[serde(rename = "prop-c2")]
    PropC2,
    #[serde(rename = "prop-c3")]
    PropC3,
    #[serde(rename = "thm-t5")]
    ThmT5,
}

impl Claim {
    pub const ALL: [Claim; 15] = [
        Claim::ThmT1,
        Claim::PropP11,
        Claim::ThmT2,
        Claim::LemmaL1,
        Claim::CountProp,
        Claim::MersenneRemark,
        Claim::Kasami,
        Claim::Gold,
        Claim::CorT3,
        Claim::PropP1,
        Claim::ThmT4,
        Claim::PropC1,
        Claim::PropC2,
        Claim::PropC3,
        Claim::ThmT5,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Claim::ThmT1 => "thm-t1",
            Claim::PropP11 => "prop-p11",
            Claim::ThmT2 => "thm-t2",
            Claim::LemmaL1 => "lemma-l1",
            Claim::CountProp => "count-prop",
            Claim::MersenneRemark => "mersenne-remark",
            Claim::Kasami => "kasami",
            Claim::Gold => "gold",
            Claim::CorT3 => "cor-t3",
            Claim::PropP1 => "prop-p1",
            Claim::ThmT4 => "thm-t4",
            Claim::PropC1 => "prop-c1",
            Claim::PropC2 => "prop-c2",
            Claim::PropC3 => "prop-c3",
            Claim::ThmT5 => "thm-t5",
        }
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Claim {
    type Err = AuditError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Claim::ALL
            .into_iter()
            .find(|c| c.id() == s)
            .ok_or_else(|| AuditError::UnknownClaim(s.to_string()))
    }
}

/// Grid parameters. `None` fields fall back to per-claim defaults.
#[derive(Debug, Clone)]
pub struct AuditConfig {
    /// Restrict the audit to one field instead of the default list.
    pub field: Option<FieldSpec>,
    pub seed: u64,
    pub samples: Option<usize>,
    pub mmax: Option<u32>,
    pub nmax: Option<u64>,
    /// Restrict power-function audits to one exponent.
    pub d: Option<u64>,
    pub cap: u64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            field: None,
            seed: DEFAULT_SEED,
            samples: None,
            mmax: None,
            nmax: None,
            d: None,
            cap: crate::field::effective_cap(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuditReport {
    pub claim_id: String,
    pub field_spec: String,
    pub seed: u64,
    pub instances: u64,
    pub agreements: u64,
    pub disagreements: u64,
    pub exemplars: Vec<Value>,
    /// Claim-specific tallies (secondary readings, per-field counts).
    pub extra: Value,
    pub wall_time_ms: u64,
    pub tool_version: String,
}

impl AuditReport {
    pub fn exit_code(&self) -> i32 {
        if self.disagreements == 0 {
            0
        } else {
            2
        }
    }
}

#[derive(Default)]
struct Tally {
    instances: u64,
    agreements: u64,
    disagreements: u64,
    exemplars: Vec<Value>,
}

impl Tally {
    fn record(&mut self, agree: bool, exemplar: impl FnOnce() -> Value) {
        self.instances += 1;
        if agree {
            self.agreements += 1;
        } else {
            self.disagreements += 1;
            if self.exemplars.len() < MAX_EXEMPLARS {
                self.exemplars.push(exemplar());
            }
        }
    }

    fn merge(&mut self, other: Tally) {
        self.instances += other.instances;
        self.agreements += other.agreements;
        self.disagreements += other.disagreements;
        for e in other.exemplars {
            if self.exemplars.len() < MAX_EXEMPLARS {
                self.exemplars.push(e);
            }
        }
    }
}

fn binary(m: u32, s: u32, cap: u64) -> Result<FieldCtx, FieldError> {
    FieldCtx::with_cap(2, m, ModulusSpec::Auto, s, cap)
}

/// The configured field, or the given `(m, s)` binary defaults.
fn fields(cfg: &AuditConfig, defaults: &[(u32, u32)]) -> Result<Vec<FieldCtx>, AuditError> {
    match &cfg.field {
        Some(spec) => Ok(vec![spec.build_with_cap(cfg.cap)?]),
        None => defaults.iter().map(|&(m, s)| Ok(binary(m, s, cfg.cap)?)).collect(),
    }
}

fn field_list(fs: &[FieldCtx]) -> String {
    fs.iter().map(|f| f.spec().to_string()).collect::<Vec<_>>().join(",")
}

fn rng_for(cfg: &AuditConfig, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn require_char2(claim: Claim, ctx: &FieldCtx) -> Result<(), AuditError> {
    if ctx.is_char2() {
        Ok(())
    } else {
        Err(AuditError::NotApplicable {
            claim: claim.id(),
            field: ctx.spec().to_string(),
            reason: "characteristic 2 required".into(),
        })
    }
}

fn require_binary(claim: Claim, ctx: &FieldCtx) -> Result<(), AuditError> {
    if ctx.p() == 2 && ctx.q() == 2 {
        Ok(())
    } else {
        Err(AuditError::NotApplicable {
            claim: claim.id(),
            field: ctx.spec().to_string(),
            reason: "GF(2^m) over GF(2) required".into(),
        })
    }
}

pub fn run_audit(claim: Claim, cfg: &AuditConfig) -> Result<AuditReport, AuditError> {
    let start = Instant::now();
    let (field_spec, tally, extra) = match claim {
        Claim::ThmT1 => audit_t1(cfg)?,
        Claim::PropP11 => audit_lin_criterion(claim, cfg, &[3])?,
        Claim::ThmT2 => {
            let ns: Vec<u64> = (2..=cfg.nmax.unwrap_or(5)).collect();
            audit_lin_criterion(claim, cfg, &ns)?
        }
        Claim::LemmaL1 => audit_l1(cfg)?,
        Claim::CountProp => audit_count(cfg),
        Claim::MersenneRemark => audit_mersenne(cfg),
        Claim::Kasami | Claim::Gold => audit_power_family(claim, cfg),
        Claim::CorT3 => audit_t3(cfg)?,
        Claim::PropP1 => audit_p1(cfg)?,
        Claim::ThmT4 => audit_t4(cfg)?,
        Claim::PropC1 => audit_c1(cfg)?,
        Claim::PropC2 => audit_power_conditions(claim, cfg, 4, 4)?,
        Claim::PropC3 => audit_power_conditions(claim, cfg, 5, 10)?,
        Claim::ThmT5 => audit_t5(cfg)?,
    };
    Ok(AuditReport {
        claim_id: claim.id().to_string(),
        field_spec,
        seed: cfg.seed,
        instances: tally.instances,
        agreements: tally.agreements,
        disagreements: tally.disagreements,
        exemplars: tally.exemplars,
        extra,
        wall_time_ms: start.elapsed().as_millis() as u64,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
    })
}

type Outcome = Result<(String, Tally, Value), AuditError>;

fn convention_for(ctx: &FieldCtx, seed: u64) -> (DicksonConvention, Value) {
    let check = check_convention(ctx, 50, seed);
    let chosen = check.chosen.unwrap_or(DicksonConvention::RowFrobenius);
    (chosen, serde_json::to_value(&check).expect("serializable"))
}

fn t1_holds(ctx: &FieldCtx, l: &LinPoly, conv: DicksonConvention) -> bool {
    let table = l.to_table(ctx);
    match inverse_linearized_with(ctx, l, conv) {
        Ok(inv) => {
            let it = inv.to_table(ctx);
            table.compose(&it).unwrap().is_identity() && it.compose(&table).unwrap().is_identity()
        }
        Err(_) => false,
    }
}

fn audit_t1(cfg: &AuditConfig) -> Outcome {
    let defaults: Vec<(u32, u32)> = (2..=8).map(|m| (m, 1)).collect();
    let fs = fields(cfg, &defaults)?;
    let samples = cfg.samples.unwrap_or(200);
    let mut tally = Tally::default();
    let mut per_field = Vec::new();
    for (idx, ctx) in fs.iter().enumerate() {
        let (conv, check) = convention_for(ctx, cfg.seed);
        let mut rng = rng_for(cfg, idx as u64);
        let mut drawn = 0;
        for _ in 0..samples * 1000 {
            if drawn == samples {
                break;
            }
            let l = LinPoly::random(ctx, &mut rng);
            if !l.to_table(ctx).is_permutation() {
                continue;
            }
            drawn += 1;
            let ok = t1_holds(ctx, &l, conv);
            tally.record(ok, || json!({"kind": "thm-t1", "field": ctx.spec(), "L": l, "convention": conv}));
        }
        per_field.push(json!({"field": ctx.spec(), "permutations": drawn, "convention": check}));
    }
    Ok((field_list(&fs), tally, json!({ "per_field": per_field })))
}

/// One linearized instance against the oracle for every `n`:
/// `(convolution agrees, as-stated agrees)` per `n`.
fn lin_instance(ctx: &FieldCtx, l: &LinPoly, ns: &[u64]) -> Vec<(u64, bool, bool)> {
    let order = l.to_table(ctx).cycle_order().ok();
    ns.iter()
        .map(|&n| {
            let oracle = order.as_ref().is_some_and(|o| o.divides(n));
            let conv = is_ncycle_linearized(ctx, l, n, CriterionMode::Convolution);
            let stated = is_ncycle_linearized(ctx, l, n, CriterionMode::AsStated);
            (n, conv == oracle, stated == oracle)
        })
        .collect()
}

/// Exhaustive below this many polynomials, sampled above.
const LIN_EXHAUSTIVE_MAX: u64 = 4096;

fn audit_lin_criterion(claim: Claim, cfg: &AuditConfig, ns: &[u64]) -> Outcome {
    let fs = fields(cfg, &[(2, 1), (3, 1), (4, 1), (5, 1), (6, 1)])?;
    let samples = cfg.samples.unwrap_or(10_000);
    let mut tally = Tally::default();
    let mut per_field = Vec::new();
    for (idx, ctx) in fs.iter().enumerate() {
        let space = (ctx.order() as u64).checked_pow(ctx.m()).unwrap_or(u64::MAX);
        let polys: Vec<LinPoly> = if space <= LIN_EXHAUSTIVE_MAX {
            LinPoly::all(ctx).collect()
        } else {
            let mut rng = rng_for(cfg, idx as u64);
            (0..samples).map(|_| LinPoly::random(ctx, &mut rng)).collect()
        };
        let results: Vec<Vec<(u64, bool, bool)>> =
            polys.par_iter().map(|l| lin_instance(ctx, l, ns)).collect();
        let mut stated_mismatches = 0u64;
        let mut stated_examples = Vec::new();
        let mut field_tally = Tally::default();
        for (l, rs) in polys.iter().zip(results) {
            for (n, conv_ok, stated_ok) in rs {
                field_tally.record(conv_ok, || {
                    json!({"kind": claim.id(), "field": ctx.spec(), "L": l, "n": n, "mode": "CONVOLUTION"})
                });
                if !stated_ok {
                    stated_mismatches += 1;
                    if stated_examples.len() < 8 {
                        stated_examples.push(json!({"L": l, "n": n}));
                    }
                }
            }
        }
        per_field.push(json!({
            "field": ctx.spec(),
            "exhaustive": space <= LIN_EXHAUSTIVE_MAX,
            "polynomials": polys.len(),
            "convolution_mismatches": field_tally.disagreements,
            "as_stated_mismatches": stated_mismatches,
            "as_stated_examples": stated_examples,
        }));
        tally.merge(field_tally);
    }
    Ok((field_list(&fs), tally, json!({ "n_values": ns, "per_field": per_field })))
}

fn l1_instance(ctx: &FieldCtx, d: u64, nmax: u64) -> Vec<(Option<u64>, bool)> {
    let table = PolyFn::monomial(ctx, d).to_table(ctx);
    let order = table.cycle_order().ok();
    let mut out = vec![(None, order.as_ref().and_then(|o| o.to_u64()) == monomial::monomial_cycle_order(d, ctx))];
    for n in 1..=nmax {
        let oracle = order.as_ref().is_some_and(|o| o.divides(n));
        out.push((Some(n), monomial::is_ncycle_monomial(d, ctx, n) == oracle));
    }
    out
}

fn audit_l1(cfg: &AuditConfig) -> Outcome {
    let defaults: Vec<(u32, u32)> = (1..=cfg.mmax.unwrap_or(10)).map(|m| (m, 1)).collect();
    let fs = fields(cfg, &defaults)?;
    let nmax = cfg.nmax.unwrap_or(6);
    let mut tally = Tally::default();
    for ctx in &fs {
        let top = (ctx.order() as u64 - 1).max(1);
        let results: Vec<_> =
            (1..=top).into_par_iter().map(|d| (d, l1_instance(ctx, d, nmax))).collect();
        for (d, rs) in results {
            for (n, ok) in rs {
                tally.record(ok, || json!({"kind": "lemma-l1", "field": ctx.spec(), "d": d, "n": n}));
            }
        }
    }
    Ok((field_list(&fs), tally, json!({ "nmax": nmax })))
}

fn audit_count(cfg: &AuditConfig) -> (String, Tally, Value) {
    let mmax = cfg.mmax.unwrap_or(20).min(40);
    let nmax = cfg.nmax.unwrap_or(6);
    let grid: Vec<(u32, u64)> =
        (1..=mmax).flat_map(|m| (2..=nmax).map(move |n| (m, n))).collect();
    let rows: Vec<monomial::CountAudit> = grid
        .par_iter()
        .map(|&(m, n)| monomial::count_ncycle_monomials_for(m, n))
        .collect();
    let mut tally = Tally::default();
    for row in &rows {
        tally.record(row.matches, || {
            let mut v = serde_json::to_value(row).expect("serializable");
            v["kind"] = json!("count-prop");
            v
        });
    }
    let table: Vec<Value> = rows
        .iter()
        .map(|r| json!({"m": r.m, "n": r.n, "formula": r.formula, "exhaustive": r.exhaustive}))
        .collect();
    let prime_n_mismatches = rows.iter().filter(|r| !r.matches && crate::numtheory::is_prime(r.n)).count();
    (
        format!("2^1..2^{mmax}"),
        tally,
        json!({ "table": table, "prime_n_mismatches": prime_n_mismatches }),
    )
}

fn audit_mersenne(cfg: &AuditConfig) -> (String, Tally, Value) {
    let mmax = cfg.mmax.unwrap_or(13).min(40);
    let nmax = cfg.nmax.unwrap_or(6);
    let mut tally = Tally::default();
    let mut exponents = Vec::new();
    for m in 2..=mmax {
        let mut prime = false;
        for n in 2..=nmax {
            if let Some(c) = monomial::mersenne_check(m, n) {
                prime = true;
                tally.record(c.agree, || {
                    let mut v = serde_json::to_value(&c).expect("serializable");
                    v["kind"] = json!("mersenne-remark");
                    v
                });
            }
        }
        if prime {
            exponents.push(m);
        }
    }
    (format!("2^2..2^{mmax}"), tally, json!({ "mersenne_exponents": exponents }))
}

fn audit_power_family(claim: Claim, cfg: &AuditConfig) -> (String, Tally, Value) {
    let mmax = cfg.mmax.unwrap_or(10).min(40);
    let nmax = cfg.nmax.unwrap_or(6);
    let mut tally = Tally::default();
    let mut skipped = 0u64;
    for m in 1..=mmax {
        for k in 1..=2 * m {
            for n in 2..=nmax {
                let v = match claim {
                    Claim::Kasami => monomial::kasami_audit(k, m, n),
                    _ => monomial::gold_audit(k, m, n),
                };
                match v {
                    Ok(v) if v.applicable => tally.record(v.agree, || {
                        let mut e = serde_json::to_value(&v).expect("serializable");
                        e["kind"] = json!(claim.id());
                        e
                    }),
                    _ => skipped += 1,
                }
            }
        }
    }
    (format!("2^1..2^{mmax}"), tally, json!({ "k_range": "1..=2m", "skipped": skipped }))
}

const TRACE_GRID: [(u32, u32); 4] = [(2, 1), (3, 1), (4, 1), (4, 2)];

fn nonzero_subfield(ctx: &FieldCtx) -> Vec<u32> {
    ctx.subfield_elements().into_iter().filter(|&g| g != 0).collect()
}

fn audit_t3(cfg: &AuditConfig) -> Outcome {
    let fs = fields(cfg, &TRACE_GRID)?;
    let samples = cfg.samples.unwrap_or(100);
    let mut tally = Tally::default();
    let mut commuting_failures = 0u64;
    let (mut m1_agree, mut m1_disagree, mut m1_undefined) = (0u64, 0u64, 0u64);
    for (idx, ctx) in fs.iter().enumerate() {
        let mut rng = rng_for(cfg, idx as u64);
        let mut ls: Vec<LinPoly> = (0..ctx.m()).map(|k| LinPoly::frobenius(ctx, k)).collect();
        ls.extend((0..samples).map(|_| LinPoly::random(ctx, &mut rng)));
        let mut hs = vec![PolyFn::zero(ctx), PolyFn::constant(ctx, 1), PolyFn::identity(ctx)];
        hs.extend((0..4).map(|_| random_subfield_poly(ctx, &mut rng, 3)));
        let gammas = nonzero_subfield(ctx);
        for l in &ls {
            let Some(order) = l.to_table(ctx).cycle_order().ok().and_then(|o| o.to_u64()) else {
                continue;
            };
            for h in &hs {
                for &gamma in &gammas {
                    let tc = match build_trace_construction(ctx, l, h, gamma) {
                        Ok(tc) => tc,
                        Err(TraceError::CommutingFailure { .. }) => {
                            commuting_failures += 1;
                            continue;
                        }
                        Err(_) => continue,
                    };
                    for n in [order, 2 * order] {
                        let v = check_eq_a1(ctx, &tc, n, BoundMode::NMinus1).expect("L is an n-cycle");
                        tally.record(v.agree() == Some(true), || {
                            json!({"kind": "cor-t3", "field": ctx.spec(), "L": l, "h": h, "gamma": gamma, "n": n})
                        });
                        match check_eq_a1(ctx, &tc, n, BoundMode::MMinus1).expect("checked").agree() {
                            Some(true) => m1_agree += 1,
                            Some(false) => m1_disagree += 1,
                            None => m1_undefined += 1,
                        }
                    }
                }
            }
        }
    }
    Ok((
        field_list(&fs),
        tally,
        json!({
            "bound_mode": "N_MINUS_1",
            "commuting_failures": commuting_failures,
            "m_minus_1": {"agree": m1_agree, "disagree": m1_disagree, "undefined": m1_undefined},
        }),
    ))
}

fn sample_gammas(ctx: &FieldCtx, rng: &mut impl Rng, limit: usize) -> Vec<u32> {
    if ctx.order() as usize <= limit + 1 {
        (1..ctx.order()).collect()
    } else {
        (0..limit).map(|_| rng.gen_range(1..ctx.order())).collect()
    }
}

fn audit_p1(cfg: &AuditConfig) -> Outcome {
    let fs = fields(cfg, &TRACE_GRID)?;
    let samples = cfg.samples.unwrap_or(40);
    let mut tally = Tally::default();
    let mut hypothesis_false = 0u64;
    for (idx, ctx) in fs.iter().enumerate() {
        let mut rng = rng_for(cfg, idx as u64);
        let mut l1s: Vec<LinPoly> = (0..ctx.m()).map(|k| LinPoly::frobenius(ctx, k)).collect();
        for _ in 0..samples * 100 {
            if l1s.len() >= samples + ctx.m() as usize {
                break;
            }
            let l = LinPoly::random(ctx, &mut rng);
            if l.to_table(ctx).is_permutation() {
                l1s.push(l);
            }
        }
        let mut l2s = vec![LinPoly::from_terms(ctx, &[])];
        l2s.extend((0..8).map(|_| trace_kernel_linearized(ctx, &LinPoly::random(ctx, &mut rng))));
        l2s.push(LinPoly::random(ctx, &mut rng));
        let gammas = sample_gammas(ctx, &mut rng, 15);
        for l1 in &l1s {
            for l2 in &l2s {
                for &gamma in &gammas {
                    let (_, v) = build_p1(ctx, l1, l2, gamma).expect("same field, gamma != 0");
                    if !v.hypothesis() {
                        hypothesis_false += 1;
                        continue;
                    }
                    tally.record(!v.counterexample(), || {
                        json!({"kind": "prop-p1", "field": ctx.spec(), "L1": l1, "L2": l2, "gamma": gamma})
                    });
                }
            }
        }
    }
    Ok((field_list(&fs), tally, json!({ "hypothesis_false": hypothesis_false })))
}

fn involution_pool(ctx: &FieldCtx, rng: &mut impl Rng, samples: usize) -> Vec<LinPoly> {
    let mut out = vec![LinPoly::identity(ctx)];
    if ctx.m() % 2 == 0 {
        out.push(LinPoly::frobenius(ctx, ctx.m() / 2));
    }
    for _ in 0..samples * 500 {
        if out.len() >= samples {
            break;
        }
        let l = LinPoly::random(ctx, rng);
        let t = l.to_table(ctx);
        if !t.is_identity() && t.is_ncycle(2) {
            out.push(l);
        }
    }
    out
}

fn audit_c1(cfg: &AuditConfig) -> Outcome {
    let fs = fields(cfg, &TRACE_GRID)?;
    let samples = cfg.samples.unwrap_or(8);
    let mut tally = Tally::default();
    let (mut kernel_false, mut kernel_false_involution, mut non_commuting) = (0u64, 0u64, 0u64);
    for (idx, ctx) in fs.iter().enumerate() {
        let mut rng = rng_for(cfg, idx as u64);
        let ls = involution_pool(ctx, &mut rng, samples);
        let q = ctx.q() as u64;
        let minus_one = ctx.neg(1);
        let mut hs = vec![PolyFn::zero(ctx), PolyFn::from_terms(ctx, &[(q, 1), (1, minus_one)])];
        hs.extend((0..samples).map(|_| random_subfield_poly(ctx, &mut rng, 3)));
        for l in &ls {
            for h in &hs {
                for gamma in nonzero_subfield(ctx) {
                    let v = check_c1_involution(ctx, l, h, gamma).expect("L is an involution");
                    if !v.commutes {
                        non_commuting += 1;
                        continue;
                    }
                    if !v.kernel_ok {
                        kernel_false += 1;
                        kernel_false_involution += v.is_involution as u64;
                        continue;
                    }
                    tally.record(v.is_involution, || {
                        json!({"kind": "prop-c1", "field": ctx.spec(), "L": l, "h": h, "gamma": gamma})
                    });
                }
            }
        }
    }
    Ok((
        field_list(&fs),
        tally,
        json!({
            "kernel_false": kernel_false,
            "kernel_false_but_involution": kernel_false_involution,
            "non_commuting": non_commuting,
        }),
    ))
}

fn audit_t4(cfg: &AuditConfig) -> Outcome {
    let fs = fields(cfg, &[(3, 1), (4, 1)])?;
    for ctx in &fs {
        require_char2(Claim::ThmT4, ctx)?;
    }
    let samples = cfg.samples.unwrap_or(6);
    let nmax = cfg.nmax.unwrap_or(5);
    let mut tally = Tally::default();
    let mut remark_counterexamples = 0u64;
    let mut remark_example = Value::Null;
    for (idx, ctx) in fs.iter().enumerate() {
        let mut rng = rng_for(cfg, idx as u64);
        for n in 2..=nmax {
            for g in ncycle_pool(ctx, n, &mut rng, samples) {
                let mut fs_pool = orbit_pool(ctx, &g.table, &mut rng, samples);
                fs_pool.extend(
                    boolean_pool(ctx, &mut rng, samples)
                        .into_iter()
                        .filter(|p| ctx.elements().all(|x| p.f.get(g.table.apply(x)) == p.f.get(x))),
                );
                for p in &fs_pool {
                    for gamma in 1..ctx.order() {
                        let v = check_t4(ctx, &g.table, &p.f, gamma, n).expect("preconditions hold");
                        let ex = || {
                            json!({"kind": "thm-t4", "field": ctx.spec(), "G": g.table, "G_label": g.label,
                                   "f": p.f.to_hex(), "gamma": gamma, "n": n})
                        };
                        if v.remark_counterexample() {
                            remark_counterexamples += 1;
                            if remark_example.is_null() {
                                remark_example = ex();
                            }
                        }
                        tally.record(v.agree(), ex);
                    }
                }
            }
        }
    }
    Ok((
        field_list(&fs),
        tally,
        json!({
            "remark_counterexamples": remark_counterexamples,
            "remark_example": remark_example,
        }),
    ))
}

/// Frobenius exponents `2^i mod (order - 1)` with `d^n ≡ 1`.
fn frobenius_exponents(ctx: &FieldCtx, n: u64) -> Vec<u64> {
    let modulus = ctx.order() as u64 - 1;
    let mut ds: Vec<u64> = (0..ctx.m_abs())
        .map(|i| pow_mod(2, i as u64, modulus))
        .filter(|&d| d != 0 && pow_mod(d, n, modulus) == 1 % modulus)
        .collect();
    ds.sort_unstable();
    ds.dedup();
    ds
}

/// Pool index, `γ` and verdict.
type PowerRow = (usize, u32, boolean_struct::CycleCondVerdict);

fn power_diff(ctx: &FieldCtx, n: u64, d: u64, gamma: u32) -> Vec<u32> {
    if n == 4 {
        boolean_struct::c2_identity_diff(ctx, d, gamma)
    } else {
        boolean_struct::c3_identity_diff(ctx, d, gamma)
    }
}

fn audit_power_conditions(claim: Claim, cfg: &AuditConfig, n: u64, default_m: u32) -> Outcome {
    let fs = fields(cfg, &[(default_m, 1)])?;
    let samples = cfg.samples.unwrap_or(6);
    let mut tally = Tally::default();
    let mut per_instance = Vec::new();
    let (mut stated_true, mut oracle_true, mut support_agree) = (0u64, 0u64, 0u64);
    for (idx, ctx) in fs.iter().enumerate() {
        require_binary(claim, ctx)?;
        let mut rng = rng_for(cfg, idx as u64);
        let ds = match cfg.d {
            Some(d) => vec![d],
            None => frobenius_exponents(ctx, n),
        };
        for d in ds {
            let g = FuncTable::from_fn(ctx, |x| ctx.pow(x, d));
            let mut pool = orbit_pool(ctx, &g, &mut rng, samples);
            pool.extend(boolean_pool(ctx, &mut rng, samples));
            pool.retain(|p| boolean_struct::check_power_preconditions(ctx, d, 1, &p.f, n).is_ok());
            if pool.is_empty() {
                return Err(AuditError::NotApplicable {
                    claim: claim.id(),
                    field: ctx.spec().to_string(),
                    reason: format!("d={d} does not satisfy d^{n} = 1"),
                });
            }
            let rows: Vec<Vec<PowerRow>> = (1..ctx.order())
                .into_par_iter()
                .map(|gamma| {
                    let users: Vec<usize> = (0..pool.len())
                        .filter(|&i| is_linear_structure(ctx, &pool[i].f, gamma, false))
                        .collect();
                    if users.is_empty() {
                        return Vec::new();
                    }
                    let diff = power_diff(ctx, n, d, gamma);
                    users
                        .into_iter()
                        .map(|i| (i, gamma, boolean_struct::power_verdict(ctx, d, gamma, &pool[i].f, n, &diff)))
                        .collect()
                })
                .collect();
            for (i, gamma, v) in rows.into_iter().flatten() {
                stated_true += v.stated() as u64;
                oracle_true += v.oracle as u64;
                support_agree += (v.cond1 && v.cond2a && v.cond2b_on_support == v.oracle) as u64;
                let ex = || {
                    json!({"kind": claim.id(), "field": ctx.spec(), "d": d, "f": pool[i].f.to_hex(),
                           "f_label": pool[i].label, "gamma": gamma})
                };
                if per_instance.len() < 256 {
                    per_instance.push(json!({"d": d, "f": pool[i].label, "gamma": gamma, "verdict": v}));
                }
                tally.record(v.agree(), ex);
            }
        }
    }
    Ok((
        field_list(&fs),
        tally,
        json!({
            "n": n,
            "stated_true": stated_true,
            "oracle_true": oracle_true,
            "support_restricted_agree": support_agree,
            "instances_shown": per_instance,
        }),
    ))
}

fn audit_t5(cfg: &AuditConfig) -> Outcome {
    let fs = fields(cfg, &[(4, 1), (5, 1), (6, 1)])?;
    let mut tally = Tally::default();
    let mut per_field = Vec::new();
    for ctx in &fs {
        require_binary(Claim::ThmT5, ctx)?;
        let r = binomial::search_triple_binomials(ctx, IndexMode::Exact).map_err(|e| {
            AuditError::NotApplicable { claim: "thm-t5", field: ctx.spec().to_string(), reason: e.to_string() }
        })?;
        let mut field_tally = Tally {
            instances: r.instances - r.sym_diff.len() as u64,
            agreements: r.instances - r.sym_diff.len() as u64,
            ..Tally::default()
        };
        for s in &r.sym_diff {
            field_tally.record(false, || {
                json!({"kind": "thm-t5", "field": ctx.spec(), "a": s.a, "b": s.b, "i": s.i, "j": s.j})
            });
        }
        let family = binomial::corollary_family(ctx);
        let family_triples = family
            .iter()
            .filter(|s| {
                binomial::classify_binomial(ctx, s, IndexMode::Exact).is_ok_and(|v| v.oracle_is_triple)
            })
            .count();
        per_field.push(json!({
            "field": ctx.spec(),
            "instances": r.instances,
            "oracle_true": r.oracle_true.len(),
            "theorem_true": r.theorem_true.len(),
            "strict_order3": r.strict_order3_count,
            "congruence_mode_theorem_true": r.other_mode_theorem_true,
            "corollary_family": family.len(),
            "corollary_family_oracle_true": family_triples,
            "sym_diff": r.sym_diff,
        }));
        tally.merge(field_tally);
    }
    Ok((field_list(&fs), tally, json!({ "index_mode": "EXACT", "per_field": per_field })))
}

/// Result of re-running one exemplar.
#[derive(Debug, Clone, Serialize)]
pub struct Replay {
    pub kind: String,
    /// Whether the stated criterion and the oracle still disagree.
    pub disagrees: bool,
    pub detail: Value,
}

fn get<T: serde::de::DeserializeOwned>(ex: &Value, key: &str) -> Result<T, AuditError> {
    let v = ex.get(key).ok_or_else(|| AuditError::BadExemplar(format!("missing `{key}`")))?;
    serde_json::from_value(v.clone()).map_err(|e| AuditError::BadExemplar(format!("`{key}`: {e}")))
}

fn field_of(ex: &Value, cap: u64) -> Result<FieldCtx, AuditError> {
    let spec: FieldSpec = get(ex, "field")?;
    Ok(spec.build_with_cap(cap)?)
}

fn lin(ctx: &FieldCtx, ex: &Value, key: &str) -> Result<LinPoly, AuditError> {
    LinPoly::new(ctx, get(ex, key)?).map_err(|e| AuditError::BadExemplar(e.to_string()))
}

fn poly(ctx: &FieldCtx, ex: &Value, key: &str) -> Result<PolyFn, AuditError> {
    PolyFn::new(ctx, get(ex, key)?).map_err(|e| AuditError::BadExemplar(e.to_string()))
}

fn boolfn(ctx: &FieldCtx, ex: &Value) -> Result<BoolFn, AuditError> {
    BoolFn::from_hex(ctx, &get::<String>(ex, "f")?).map_err(|e| AuditError::BadExemplar(e.to_string()))
}

fn bad(e: impl fmt::Display) -> AuditError {
    AuditError::BadExemplar(e.to_string())
}

/// Recomputes an exemplar from its serialized parameters alone.
pub fn replay_exemplar(ex: &Value, cap: u64) -> Result<Replay, AuditError> {
    let kind: String = get(ex, "kind")?;
    let claim: Claim = kind.parse()?;
    let (disagrees, detail) = match claim {
        Claim::ThmT1 => {
            let ctx = field_of(ex, cap)?;
            let l = lin(&ctx, ex, "L")?;
            let conv = get(ex, "convention").unwrap_or(DicksonConvention::RowFrobenius);
            let ok = t1_holds(&ctx, &l, conv);
            (!ok, json!({ "inverse_composes_to_identity": ok }))
        }
        Claim::PropP11 | Claim::ThmT2 => {
            let ctx = field_of(ex, cap)?;
            let l = lin(&ctx, ex, "L")?;
            let n: u64 = get(ex, "n")?;
            let (_, conv_ok, stated_ok) = lin_instance(&ctx, &l, &[n])[0];
            (!conv_ok, json!({ "convolution_agrees": conv_ok, "as_stated_agrees": stated_ok }))
        }
        Claim::LemmaL1 => {
            let ctx = field_of(ex, cap)?;
            let d: u64 = get(ex, "d")?;
            let n: Option<u64> = get(ex, "n")?;
            let rs = l1_instance(&ctx, d, n.unwrap_or(0));
            let ok = rs.iter().find(|(k, _)| *k == n).is_none_or(|r| r.1);
            (!ok, json!({ "agree": ok }))
        }
        Claim::CountProp => {
            let c = monomial::count_ncycle_monomials_for(get(ex, "m")?, get(ex, "n")?);
            (!c.matches, serde_json::to_value(c).expect("serializable"))
        }
        Claim::MersenneRemark => {
            let c = monomial::mersenne_check(get(ex, "m")?, get(ex, "n")?)
                .ok_or_else(|| bad("2^m - 1 is not prime"))?;
            (!c.agree, serde_json::to_value(c).expect("serializable"))
        }
        Claim::Kasami | Claim::Gold => {
            let (k, m, n) = (get(ex, "k")?, get(ex, "m")?, get(ex, "n")?);
            let v = if claim == Claim::Kasami {
                monomial::kasami_audit(k, m, n)
            } else {
                monomial::gold_audit(k, m, n)
            }
            .map_err(bad)?;
            (!v.agree, serde_json::to_value(v).expect("serializable"))
        }
        Claim::CorT3 => {
            let ctx = field_of(ex, cap)?;
            let tc = build_trace_construction(&ctx, &lin(&ctx, ex, "L")?, &poly(&ctx, ex, "h")?, get(ex, "gamma")?)
                .map_err(bad)?;
            let v = check_eq_a1(&ctx, &tc, get(ex, "n")?, BoundMode::NMinus1).map_err(bad)?;
            (v.agree() != Some(true), serde_json::to_value(v).expect("serializable"))
        }
        Claim::PropP1 => {
            let ctx = field_of(ex, cap)?;
            let (_, v) = build_p1(&ctx, &lin(&ctx, ex, "L1")?, &lin(&ctx, ex, "L2")?, get(ex, "gamma")?)
                .map_err(bad)?;
            (v.counterexample(), serde_json::to_value(v).expect("serializable"))
        }
        Claim::PropC1 => {
            let ctx = field_of(ex, cap)?;
            let v = check_c1_involution(&ctx, &lin(&ctx, ex, "L")?, &poly(&ctx, ex, "h")?, get(ex, "gamma")?)
                .map_err(bad)?;
            (v.commutes && v.counterexample(), serde_json::to_value(v).expect("serializable"))
        }
        Claim::ThmT4 => {
            let ctx = field_of(ex, cap)?;
            let g = FuncTable::from_values(&ctx, get(ex, "G")?).map_err(bad)?;
            let v = check_t4(&ctx, &g, &boolfn(&ctx, ex)?, get(ex, "gamma")?, get(ex, "n")?).map_err(bad)?;
            (!v.agree(), serde_json::to_value(v).expect("serializable"))
        }
        Claim::PropC2 | Claim::PropC3 => {
            let ctx = field_of(ex, cap)?;
            let (d, gamma, f) = (get(ex, "d")?, get(ex, "gamma")?, boolfn(&ctx, ex)?);
            let v = if claim == Claim::PropC2 {
                boolean_struct::check_c2_quadruple(&ctx, d, gamma, &f)
            } else {
                boolean_struct::check_c3_quintuple(&ctx, d, gamma, &f)
            }
            .map_err(bad)?;
            (!v.agree(), serde_json::to_value(v).expect("serializable"))
        }
        Claim::ThmT5 => {
            let ctx = field_of(ex, cap)?;
            let spec = BinomialSpec::new(&ctx, get(ex, "a")?, get(ex, "b")?, get(ex, "i")?, get(ex, "j")?)
                .map_err(bad)?;
            let v = binomial::classify_binomial(&ctx, &spec, IndexMode::Exact).map_err(bad)?;
            (!v.agree, serde_json::to_value(v).expect("serializable"))
        }
    };
    Ok(Replay { kind, disagrees, detail })
}

/// Replays every exemplar of a report.
pub fn replay_report(report: &AuditReport, cap: u64) -> Result<Vec<Replay>, AuditError> {
    report.exemplars.iter().map(|ex| replay_exemplar(ex, cap)).collect()
}

#[cfg(test)]
mod tests;
