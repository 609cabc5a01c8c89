//! `ncycle`: construction, classification, search and claim audits.
//!
//! Exit codes: 0 when the property holds or the verdicts agree, 2 when the
//! property fails or a disagreement was found, 1 on usage, parse or input
//! errors (reported as a JSON error object on stdout).

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ncycle_core::audit::{self, AuditConfig, AuditError, AuditReport, Claim};
use ncycle_core::binomial::{self, BinomialSpec, IndexMode};
use ncycle_core::field::{effective_cap, FieldCtx, FieldError, FieldSpec};
use ncycle_core::funcspace::PolyFn;
use ncycle_core::linearized::{self, CriterionMode, LinPoly};
use ncycle_core::monomial;

#[derive(Parser)]
#[command(name = "ncycle", version, about = "n-cycle permutation polynomials over finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a single map.
    #[command(subcommand)]
    Check(Check),
    /// Enumerate a family; one JSON object per line, summary last.
    #[command(subcommand)]
    Search(Search),
    /// Compare a stated criterion with the table oracle over a grid.
    Audit(AuditArgs),
    /// Re-run the exemplars stored in an audit report.
    Replay {
        report: PathBuf,
    },
}

#[derive(Args)]
struct FieldArg {
    /// Field as `p^m/MODHEX[/q=Q]`, e.g. `2^4/13` or `2^8/auto`.
    #[arg(long)]
    field: String,
}

#[derive(Subcommand)]
enum Check {
    /// Is the polynomial a permutation?
    Pp {
        #[command(flatten)]
        field: FieldArg,
        /// Coefficients as a JSON array, constant term first.
        #[arg(long)]
        poly: String,
    },
    /// Cycle order of the polynomial map.
    Order {
        #[command(flatten)]
        field: FieldArg,
        #[arg(long)]
        poly: String,
    },
    /// Coefficient criterion for a linearized polynomial.
    LinNcycle {
        #[command(flatten)]
        field: FieldArg,
        /// Coefficients of `x^{q^i}` as a JSON array of length m.
        #[arg(long)]
        poly: String,
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value = "convolution")]
        mode: Mode,
    },
    /// Is `x^d` an n-cycle?
    Monomial {
        #[command(flatten)]
        field: FieldArg,
        #[arg(long)]
        d: u64,
        #[arg(long)]
        n: u64,
    },
    /// Triple-cycle case analysis of `a x^{2^i} + b x^{2^j}`.
    Binomial {
        #[command(flatten)]
        field: FieldArg,
        #[arg(long)]
        a: u32,
        #[arg(long)]
        b: u32,
        #[arg(long)]
        i: u32,
        #[arg(long)]
        j: u32,
        /// Compare block indices modulo m instead of exactly.
        #[arg(long)]
        congruence: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Convolution,
    AsStated,
}

#[derive(Subcommand)]
enum Search {
    Monomials {
        #[command(flatten)]
        field: FieldArg,
        #[arg(long)]
        n: u64,
    },
    Binomials {
        #[command(flatten)]
        field: FieldArg,
        #[arg(long)]
        congruence: bool,
    },
    Linearized {
        #[command(flatten)]
        field: FieldArg,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 2)]
        max_terms: u32,
    },
}

#[derive(Args)]
struct AuditArgs {
    claim: String,
    #[arg(long)]
    field: Option<String>,
    #[arg(long, default_value_t = audit::DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    mmax: Option<u32>,
    #[arg(long)]
    nmax: Option<u64>,
    #[arg(long)]
    d: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Candidate cap for `search linearized`.
const LIN_SEARCH_MAX: u64 = 1 << 22;

#[derive(Debug)]
enum CliError {
    Usage(String),
    Field(FieldError),
    Input(String),
    TooLarge { what: &'static str, size: u64, cap: u64 },
    Audit(AuditError),
    Io(io::Error),
}

impl CliError {
    fn to_json(&self) -> Value {
        let (kind, message) = match self {
            CliError::Usage(m) => ("usage", m.clone()),
            CliError::Field(e) => ("field", e.to_string()),
            CliError::Input(m) => ("input", m.clone()),
            CliError::TooLarge { what, size, cap } => {
                ("reject_too_large", format!("{what} has size {size}, cap is {cap}"))
            }
            CliError::Audit(AuditError::UnknownClaim(c)) => ("unknown_claim", format!("unknown claim `{c}`")),
            CliError::Audit(e) => ("audit", e.to_string()),
            CliError::Io(e) => ("io", e.to_string()),
        };
        json!({ "error": { "kind": kind, "message": message } })
    }
}

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        match e {
            FieldError::RejectTooLarge { order, cap } => {
                CliError::TooLarge { what: "field", size: order, cap }
            }
            e => CliError::Field(e),
        }
    }
}

impl From<AuditError> for CliError {
    fn from(e: AuditError) -> Self {
        match e {
            AuditError::Field(f) => f.into(),
            e => CliError::Audit(e),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

fn input(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

fn build_field(s: &str) -> Result<FieldCtx, CliError> {
    let spec: FieldSpec = s.parse()?;
    Ok(spec.build_with_cap(effective_cap())?)
}

fn parse_coeffs(s: &str) -> Result<Vec<u32>, CliError> {
    serde_json::from_str(s).map_err(|e| CliError::Input(format!("--poly: {e}")))
}

fn exit_for(ok: bool) -> u8 {
    if ok {
        0
    } else {
        2
    }
}

struct Out<'a> {
    w: &'a mut dyn Write,
}

impl Out<'_> {
    fn emit(&mut self, v: &Value) -> Result<(), CliError> {
        writeln!(self.w, "{v}")?;
        Ok(())
    }
}

fn check(cmd: Check, out: &mut Out) -> Result<u8, CliError> {
    match cmd {
        Check::Pp { field, poly } => {
            let ctx = build_field(&field.field)?;
            let p = PolyFn::new(&ctx, parse_coeffs(&poly)?).map_err(input)?;
            let pp = p.to_table(&ctx).is_permutation();
            out.emit(&json!({ "field": ctx.spec(), "pp": pp }))?;
            Ok(exit_for(pp))
        }
        Check::Order { field, poly } => {
            let ctx = build_field(&field.field)?;
            let p = PolyFn::new(&ctx, parse_coeffs(&poly)?).map_err(input)?;
            let order = p.to_table(&ctx).cycle_order().ok();
            let ok = order.is_some();
            out.emit(&json!({ "field": ctx.spec(), "order": order }))?;
            Ok(exit_for(ok))
        }
        Check::LinNcycle { field, poly, n, mode } => {
            let ctx = build_field(&field.field)?;
            let l = LinPoly::new(&ctx, parse_coeffs(&poly)?).map_err(input)?;
            if n == 0 {
                return Err(CliError::Input("--n must be positive".into()));
            }
            let mode = match mode {
                Mode::Convolution => CriterionMode::Convolution,
                Mode::AsStated => CriterionMode::AsStated,
            };
            let criterion = linearized::is_ncycle_linearized(&ctx, &l, n, mode);
            let order = l.to_table(&ctx).cycle_order().ok();
            let oracle = order.as_ref().is_some_and(|o| o.divides(n));
            let det = linearized::dickson_matrix(&ctx, &l).det;
            out.emit(&json!({
                "field": ctx.spec(), "L": l, "n": n, "mode": mode, "det": det,
                "ncycle": criterion, "oracle": oracle, "cycle_order": order,
                "agree": criterion == oracle,
            }))?;
            Ok(exit_for(criterion && criterion == oracle))
        }
        Check::Monomial { field, d, n } => {
            let ctx = build_field(&field.field)?;
            let ncycle = monomial::is_ncycle_monomial(d, &ctx, n);
            out.emit(&json!({
                "field": ctx.spec(), "d": d, "n": n, "ncycle": ncycle,
                "cycle_order": monomial::monomial_cycle_order(d, &ctx),
            }))?;
            Ok(exit_for(ncycle))
        }
        Check::Binomial { field, a, b, i, j, congruence } => {
            let ctx = build_field(&field.field)?;
            let spec = BinomialSpec::new(&ctx, a, b, i, j).map_err(input)?;
            let v = binomial::classify_binomial(&ctx, &spec, index_mode(congruence)).map_err(input)?;
            out.emit(&json!({ "field": ctx.spec(), "verdict": v }))?;
            Ok(exit_for(v.agree))
        }
    }
}

fn index_mode(congruence: bool) -> IndexMode {
    if congruence {
        IndexMode::Congruence
    } else {
        IndexMode::Exact
    }
}

/// Linearized polynomials with between 1 and `t` nonzero coefficients.
fn sparse_linpolys(ctx: &FieldCtx, t: u32) -> Vec<LinPoly> {
    let m = ctx.m();
    let mut out = Vec::new();
    for mask in 1u32..(1 << m) {
        if mask.count_ones() > t {
            continue;
        }
        let slots: Vec<u32> = (0..m).filter(|k| mask >> k & 1 == 1).collect();
        let mut coeffs = vec![1u32; slots.len()];
        loop {
            let terms: Vec<(u32, u32)> = slots.iter().copied().zip(coeffs.iter().copied()).collect();
            out.push(LinPoly::from_terms(ctx, &terms));
            let Some(pos) = coeffs.iter().position(|&c| c + 1 < ctx.order()) else { break };
            coeffs[pos] += 1;
            coeffs[..pos].iter_mut().for_each(|c| *c = 1);
        }
    }
    out
}

fn sparse_count(ctx: &FieldCtx, t: u32) -> u64 {
    let (m, base) = (ctx.m() as u64, ctx.order() as u64 - 1);
    let mut total = 0u64;
    let mut binom = 1u64;
    for s in 1..=(t as u64).min(m) {
        binom = binom * (m - s + 1) / s;
        total = total.saturating_add(binom.saturating_mul(base.saturating_pow(s as u32)));
    }
    total
}

fn search(cmd: Search, out: &mut Out) -> Result<u8, CliError> {
    match cmd {
        Search::Monomials { field, n } => {
            let ctx = build_field(&field.field)?;
            let modulus = ctx.order() as u64 - 1;
            let mut ds = Vec::new();
            for d in 1..=modulus.max(1) {
                if monomial::is_ncycle_monomial(d, &ctx, n) {
                    out.emit(&json!({ "d": d, "cycle_order": monomial::monomial_cycle_order(d, &ctx) }))?;
                    ds.push(d);
                }
            }
            out.emit(&json!({
                "summary": true, "field": ctx.spec(), "n": n, "count": ds.len(), "d_list": ds,
            }))?;
            Ok(0)
        }
        Search::Binomials { field, congruence } => {
            let ctx = build_field(&field.field)?;
            let r = binomial::search_triple_binomials(&ctx, index_mode(congruence)).map_err(|e| match e {
                binomial::BinomError::RejectTooLarge { order, cap } => {
                    CliError::TooLarge { what: "field", size: order as u64, cap: cap as u64 }
                }
                e => input(e),
            })?;
            for s in &r.oracle_true {
                let v = binomial::classify_binomial(&ctx, s, r.index_mode).map_err(input)?;
                out.emit(&json!({ "verdict": v }))?;
            }
            for s in r.theorem_true.iter().filter(|s| !r.oracle_true.contains(s)) {
                let v = binomial::classify_binomial(&ctx, s, r.index_mode).map_err(input)?;
                out.emit(&json!({ "verdict": v }))?;
            }
            let clean = r.sym_diff.is_empty();
            let mut summary = serde_json::to_value(&r).map_err(input)?;
            summary["summary"] = json!(true);
            out.emit(&summary)?;
            Ok(exit_for(clean))
        }
        Search::Linearized { field, n, max_terms } => {
            let ctx = build_field(&field.field)?;
            if n == 0 {
                return Err(CliError::Input("--n must be positive".into()));
            }
            let size = sparse_count(&ctx, max_terms);
            if size > LIN_SEARCH_MAX {
                return Err(CliError::TooLarge { what: "linearized search", size, cap: LIN_SEARCH_MAX });
            }
            let (mut found, mut mismatches) = (0u64, 0u64);
            for l in sparse_linpolys(&ctx, max_terms) {
                let oracle = l.to_table(&ctx).cycle_order().is_ok_and(|o| o.divides(n));
                let criterion = linearized::is_ncycle_linearized(&ctx, &l, n, CriterionMode::Convolution);
                mismatches += (oracle != criterion) as u64;
                if oracle || criterion {
                    found += oracle as u64;
                    out.emit(&json!({ "L": l, "oracle": oracle, "criterion": criterion }))?;
                }
            }
            out.emit(&json!({
                "summary": true, "field": ctx.spec(), "n": n, "max_terms": max_terms,
                "candidates": size, "ncycles": found, "criterion_mismatches": mismatches,
            }))?;
            Ok(exit_for(mismatches == 0))
        }
    }
}

fn run_audit(args: AuditArgs, out: &mut Out) -> Result<u8, CliError> {
    let claim: Claim = args.claim.parse()?;
    let field = args.field.as_deref().map(str::parse::<FieldSpec>).transpose()?;
    let cfg = AuditConfig {
        field,
        seed: args.seed,
        samples: args.samples,
        mmax: args.mmax,
        nmax: args.nmax,
        d: args.d,
        cap: effective_cap(),
    };
    let report = audit::run_audit(claim, &cfg)?;
    let text = serde_json::to_string_pretty(&report).map_err(input)?;
    match args.out {
        Some(path) => fs::write(path, text + "\n")?,
        None => writeln!(out.w, "{text}")?,
    }
    Ok(report.exit_code() as u8)
}

fn replay(path: PathBuf, out: &mut Out) -> Result<u8, CliError> {
    let text = fs::read_to_string(&path)?;
    let report: AuditReport = serde_json::from_str(&text).map_err(|e| CliError::Input(format!("report: {e}")))?;
    let results = audit::replay_report(&report, effective_cap())?;
    let reproduced = results.iter().filter(|r| r.disagrees).count();
    out.emit(&json!({
        "claim_id": report.claim_id,
        "exemplars": results.len(),
        "reproduced": reproduced,
        "all_reproduced": reproduced == results.len(),
        "results": results,
    }))?;
    Ok(exit_for(reproduced == 0))
}

fn main() -> ExitCode {
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    let mut out = Out { w: &mut lock };
    let result = match Cli::try_parse() {
        Ok(cli) => match cli.command {
            Command::Check(c) => check(c, &mut out),
            Command::Search(s) => search(s, &mut out),
            Command::Audit(a) => run_audit(a, &mut out),
            Command::Replay { report } => replay(report, &mut out),
        },
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => Err(CliError::Usage(e.to_string())),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let _ = writeln!(out.w, "{}", e.to_json());
            ExitCode::from(1)
        }
    }
}
