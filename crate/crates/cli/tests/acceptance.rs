//! Acceptance suite: one PASS/FAIL line per criterion. Runtime limits are
//! pinned below; a criterion that misses its limit fails.

use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use ncycle_core::audit::{run_audit, AuditConfig, Claim};
use ncycle_core::binomial::{self, IndexMode};
use ncycle_core::boolean_struct::BoolFn;
use ncycle_core::field::{FieldCtx, FieldSpec, ModulusSpec, MAX_ORDER};
use ncycle_core::funcspace::FuncTable;
use ncycle_core::monomial;
use ncycle_core::numtheory::is_prime;

const LIMIT_T1: Duration = Duration::from_secs(10);
const LIMIT_COUNT: Duration = Duration::from_secs(5);
const LIMIT_T4: Duration = Duration::from_secs(60);
const LIMIT_C2_C3: Duration = Duration::from_secs(120);
const LIMIT_T5: Duration = Duration::from_secs(60);

fn cfg() -> AuditConfig {
    AuditConfig { cap: MAX_ORDER, ..AuditConfig::default() }
}

fn gf2(m: u32) -> FieldSpec {
    FieldSpec { p: 2, m_abs: m, modulus: ModulusSpec::Auto, q: None }
}

struct Line {
    id: u32,
    pass: bool,
    detail: String,
}

fn c1_inverse() -> Line {
    let start = Instant::now();
    let r = run_audit(Claim::ThmT1, &AuditConfig { samples: Some(200), ..cfg() }).unwrap();
    let elapsed = start.elapsed();
    let conventions_ok = r.extra["per_field"]
        .as_array()
        .unwrap()
        .iter()
        .all(|f| f["convention"]["chosen"].is_string() && f["permutations"] == 200);
    Line {
        id: 1,
        pass: r.instances == 7 * 200 && r.disagreements == 0 && conventions_ok && elapsed < LIMIT_T1,
        detail: format!(
            "inverse over GF(2^2..2^8): {}/{} compose to identity, conventions self-tested={conventions_ok}, {:.2?} (limit {:?})",
            r.agreements, r.instances, elapsed, LIMIT_T1
        ),
    }
}

fn c2_lin_criterion() -> Line {
    let r = run_audit(Claim::ThmT2, &AuditConfig { samples: Some(10_000), nmax: Some(5), ..cfg() }).unwrap();
    let fields = r.extra["per_field"].as_array().unwrap();
    let stated: u64 = fields.iter().map(|f| f["as_stated_mismatches"].as_u64().unwrap()).sum();
    let exhaustive_ok = fields[0]["exhaustive"] == true
        && fields[0]["polynomials"] == 16
        && fields[1]["exhaustive"] == true
        && fields[1]["polynomials"] == 512;
    Line {
        id: 2,
        pass: r.disagreements == 0 && exhaustive_ok,
        detail: format!(
            "CONVOLUTION mismatches {} over {} (L, n) pairs, n in 2..=5; AS_STATED mismatches {stated} (tolerated)",
            r.disagreements, r.instances
        ),
    }
}

fn c3_counting() -> Line {
    let start = Instant::now();
    let r = run_audit(Claim::CountProp, &AuditConfig { mmax: Some(20), nmax: Some(6), ..cfg() }).unwrap();
    let mersenne: Vec<_> = [3, 5, 7, 13]
        .into_iter()
        .flat_map(|m| (2..=6).map(move |n| monomial::mersenne_check(m, n).unwrap()))
        .collect();
    let elapsed = start.elapsed();
    let mersenne_bad: Vec<String> =
        mersenne.iter().filter(|c| !c.agree).map(|c| format!("(m={},n={})", c.m, c.n)).collect();
    let bad_n: std::collections::BTreeSet<u64> =
        r.exemplars.iter().map(|e| e["n"].as_u64().unwrap()).collect();
    Line {
        id: 3,
        pass: r.disagreements == 0 && mersenne_bad.is_empty() && elapsed < LIMIT_COUNT,
        detail: format!(
            "formula vs enumeration: {} mismatches of {} (m<=20, n<=6; n in {bad_n:?}; prime-n mismatches {}); Mersenne remark mismatches {} {}; {:.2?} (limit {:?})",
            r.disagreements,
            r.instances,
            r.extra["prime_n_mismatches"],
            mersenne_bad.len(),
            mersenne_bad.join(""),
            elapsed,
            LIMIT_COUNT
        ),
    }
}

fn c4_monomial() -> Line {
    let r = run_audit(Claim::LemmaL1, &AuditConfig { mmax: Some(10), ..cfg() }).unwrap();
    Line {
        id: 4,
        pass: r.disagreements == 0,
        detail: format!(
            "monomial order and d^n criterion vs table, GF(2^1..2^10): {}/{} agree",
            r.agreements, r.instances
        ),
    }
}

fn cli(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_ncycle")).args(args).output().unwrap();
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap_or(-1), v)
}

fn c5_gold_kasami() -> Line {
    let (gold_code, gold) = cli(&["audit", "gold", "--mmax", "10"]);
    let (kasami_code, kasami) = cli(&["audit", "kasami", "--mmax", "10"]);
    let found = gold["exemplars"]
        .as_array()
        .is_some_and(|es| es.iter().any(|e| e["m"] == 3 && e["k"] == 1 && e["n"] == 6 && e["agree"] == false));
    let structured = |v: &Value| {
        v["instances"].as_u64().is_some_and(|n| n > 0)
            && v["exemplars"].as_array().is_some_and(|es| es.iter().all(|e| e.get("criterion").is_some() && e.get("oracle").is_some()))
    };
    Line {
        id: 5,
        pass: gold_code == 2 && found && structured(&gold) && structured(&kasami) && kasami_code != 1,
        detail: format!(
            "gold exit {gold_code} ({} disagreements, (3,1,6) found={found}); kasami exit {kasami_code} ({} disagreements)",
            gold["disagreements"], kasami["disagreements"]
        ),
    }
}

fn c6_t4() -> Line {
    let start = Instant::now();
    let r = run_audit(Claim::ThmT4, &cfg()).unwrap();
    let elapsed = start.elapsed();
    let replay_ok = ncycle_core::audit::replay_report(&r, MAX_ORDER)
        .is_ok_and(|rs| rs.iter().all(|x| x.disagrees));
    let documented = r.instances == r.agreements + r.disagreements
        && r.exemplars.len() as u64 == r.disagreements.min(ncycle_core::audit::MAX_EXEMPLARS as u64);
    Line {
        id: 6,
        pass: documented && replay_ok && r.instances > 0 && elapsed < LIMIT_T4,
        detail: format!(
            "GF(2^3), GF(2^4), n in 2..=5: {} grid points, {} equivalence mismatches (replayable={replay_ok}), remark counterexamples {}; {:.2?} (limit {:?})",
            r.instances, r.disagreements, r.extra["remark_counterexamples"], elapsed, LIMIT_T4
        ),
    }
}

fn c7_c2_c3() -> Line {
    let start = Instant::now();
    let c2 = run_audit(Claim::PropC2, &AuditConfig { field: Some(gf2(4)), ..cfg() }).unwrap();
    let c3 = run_audit(Claim::PropC3, &AuditConfig { field: Some(gf2(10)), d: Some(4), ..cfg() }).unwrap();
    let elapsed = start.elapsed();
    let ds: std::collections::BTreeSet<u64> = c2.extra["instances_shown"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v["d"].as_u64().unwrap())
        .collect();
    let documented = |r: &ncycle_core::AuditReport| r.instances > 0 && r.instances == r.agreements + r.disagreements;
    Line {
        id: 7,
        pass: documented(&c2) && documented(&c3) && ds.len() == 4 && elapsed < LIMIT_C2_C3,
        detail: format!(
            "quadruple GF(2^4) d in {ds:?}: {} instances, {} stated-vs-oracle mismatches; quintuple GF(2^10) d=4: {} instances, {} mismatches; {:.2?} (limit {:?})",
            c2.instances, c2.disagreements, c3.instances, c3.disagreements, elapsed, LIMIT_C2_C3
        ),
    }
}

fn c8_p1_c1() -> Line {
    let p1 = run_audit(Claim::PropP1, &cfg()).unwrap();
    let c1 = run_audit(Claim::PropC1, &cfg()).unwrap();
    let first = p1.exemplars.first().map(|e| format!(" e.g. {e}")).unwrap_or_default();
    Line {
        id: 8,
        pass: p1.disagreements == 0 && c1.disagreements == 0 && p1.instances > 0 && c1.instances > 0,
        detail: format!(
            "two-linearized construction: {} counterexamples of {} hypothesis-true instances; involution kernel condition: {} of {}{first}",
            p1.disagreements, p1.instances, c1.disagreements, c1.instances
        ),
    }
}

fn c9_t5() -> Line {
    let start = Instant::now();
    let r = run_audit(Claim::ThmT5, &cfg()).unwrap();
    let elapsed = start.elapsed();
    let fields = r.extra["per_field"].as_array().unwrap();
    let gf32_empty = fields[1]["oracle_true"] == 0;
    let family = &fields[0];
    let family_ok = family["corollary_family"] == family["corollary_family_oracle_true"];
    let reported = fields.len() == 3 && fields.iter().all(|f| f["sym_diff"].is_array());
    let gf16 = FieldCtx::new(2, 4, ModulusSpec::Auto, 1).unwrap();
    let fam = binomial::corollary_family(&gf16);
    let fam_true = fam
        .iter()
        .filter(|s| binomial::classify_binomial(&gf16, s, IndexMode::Exact).unwrap().oracle_is_triple)
        .count();
    Line {
        id: 9,
        pass: gf32_empty && family_ok && reported && elapsed < LIMIT_T5,
        detail: format!(
            "GF(2^5) oracle set empty={gf32_empty}; GF(2^4) corollary family oracle-true {fam_true}/{}; sym-diff sizes {:?}; {:.2?} (limit {:?})",
            fam.len(),
            fields.iter().map(|f| f["sym_diff"].as_array().unwrap().len()).collect::<Vec<_>>(),
            elapsed,
            LIMIT_T5
        ),
    }
}

fn small_fields() -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for p in (2u32..=1021).filter(|&p| is_prime(p as u64)) {
        let mut order = p as u64;
        let mut m = 1;
        while order <= 1024 {
            out.push((p, m));
            m += 1;
            order *= p as u64;
        }
    }
    out
}

fn field_axioms(ctx: &FieldCtx, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let order = ctx.order();
    for x in ctx.elements() {
        if ctx.add(x, ctx.neg(x)) != 0 || ctx.add(x, 0) != x || ctx.mul(x, 1) != x {
            return Err(format!("identities at {x}"));
        }
        if x != 0 && ctx.mul(x, ctx.inv(x).unwrap()) != 1 {
            return Err(format!("inverse at {x}"));
        }
        if ctx.pow(x, order as u64) != x {
            return Err(format!("x^order != x at {x}"));
        }
        if !ctx.in_subfield(ctx.trace(x)) {
            return Err(format!("trace leaves subfield at {x}"));
        }
        let e = ctx.elem(x).map_err(|e| e.to_string())?;
        if e.repr() != x {
            return Err(format!("element encoding at {x}"));
        }
    }
    for _ in 0..2000 {
        let (a, b, c) = (rng.gen_range(0..order), rng.gen_range(0..order), rng.gen_range(0..order));
        let ok = ctx.add(a, b) == ctx.add(b, a)
            && ctx.mul(a, b) == ctx.mul(b, a)
            && ctx.add(ctx.add(a, b), c) == ctx.add(a, ctx.add(b, c))
            && ctx.mul(ctx.mul(a, b), c) == ctx.mul(a, ctx.mul(b, c))
            && ctx.mul(a, ctx.add(b, c)) == ctx.add(ctx.mul(a, b), ctx.mul(a, c))
            && ctx.frob(ctx.add(a, b), 1) == ctx.add(ctx.frob(a, 1), ctx.frob(b, 1))
            && ctx.frob(ctx.mul(a, b), 1) == ctx.mul(ctx.frob(a, 1), ctx.frob(b, 1));
        if !ok {
            return Err(format!("axioms at ({a},{b},{c})"));
        }
    }
    let spec = ctx.spec();
    let back: FieldSpec = spec.to_string().parse().map_err(|e: ncycle_core::FieldError| e.to_string())?;
    if back != spec || back.build().map_err(|e| e.to_string())?.modulus() != ctx.modulus() {
        return Err(format!("spec round trip {spec}"));
    }
    if order <= 256 {
        let t = FuncTable::from_fn(ctx, |_| rng.gen_range(0..order));
        if t.interpolate(ctx).to_table(ctx) != t {
            return Err("interpolation round trip".into());
        }
    }
    if ctx.is_char2() && ctx.q() == 2 {
        let f = BoolFn::from_fn(ctx, |_| rng.gen_bool(0.5)).map_err(|e| e.to_string())?;
        if BoolFn::from_hex(ctx, &f.to_hex()).map_err(|e| e.to_string())? != f {
            return Err("Boolean hex round trip".into());
        }
    }
    Ok(())
}

fn c10_properties() -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let fields = small_fields();
    let mut failures = Vec::new();
    for &(p, m) in &fields {
        let ctx = FieldCtx::new(p, m, ModulusSpec::Auto, 1).unwrap();
        if let Err(e) = field_axioms(&ctx, &mut rng) {
            failures.push(format!("{}: {e}", ctx.spec()));
        }
    }
    Line {
        id: 10,
        pass: failures.is_empty(),
        detail: format!(
            "field axioms and round trips over {} fields of order <= 2^10: {} failures {}",
            fields.len(),
            failures.len(),
            failures.iter().take(3).cloned().collect::<Vec<_>>().join("; ")
        ),
    }
}

fn main() {
    let criteria: [fn() -> Line; 10] = [
        c1_inverse,
        c2_lin_criterion,
        c3_counting,
        c4_monomial,
        c5_gold_kasami,
        c6_t4,
        c7_c2_c3,
        c8_p1_c1,
        c9_t5,
        c10_properties,
    ];
    let mut failed = 0;
    for criterion in criteria {
        let line = criterion();
        failed += !line.pass as u32;
        println!("criterion {:>2}: {}  {}", line.id, if line.pass { "PASS" } else { "FAIL" }, line.detail);
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
