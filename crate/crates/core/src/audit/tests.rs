use super::*;

fn cfg() -> AuditConfig {
    AuditConfig { cap: crate::field::MAX_ORDER, ..AuditConfig::default() }
}

fn strip_time(r: &AuditReport) -> Value {
    let mut v = serde_json::to_value(r).unwrap();
    v["wall_time_ms"] = json!(0);
    v
}

#[test]
fn claim_ids_round_trip() {
    for c in Claim::ALL {
        assert_eq!(c.id().parse::<Claim>().unwrap(), c);
        assert_eq!(serde_json::to_value(c).unwrap(), json!(c.id()));
    }
    assert!(matches!("thm-t9".parse::<Claim>(), Err(AuditError::UnknownClaim(_))));
}

#[test]
fn gold_finds_the_order_six_exemplar() {
    let r = run_audit(Claim::Gold, &AuditConfig { mmax: Some(8), ..cfg() }).unwrap();
    assert_eq!(r.exit_code(), 2);
    assert!(r.exemplars.iter().any(|e| e["m"] == 3 && e["k"] == 1 && e["n"] == 6));
    for rep in replay_report(&r, crate::field::MAX_ORDER).unwrap() {
        assert!(rep.disagrees);
    }
}

#[test]
fn t1_small_fields_agree() {
    let c = AuditConfig { samples: Some(20), ..cfg() };
    let r = run_audit(Claim::ThmT1, &c).unwrap();
    assert_eq!(r.instances, 20 * 7);
    assert_eq!(r.disagreements, 0);
    assert_eq!(r.exit_code(), 0);
}

#[test]
fn reports_are_deterministic() {
    let c = AuditConfig { samples: Some(30), ..cfg() };
    for claim in [Claim::ThmT2, Claim::CorT3, Claim::ThmT4] {
        let a = run_audit(claim, &c).unwrap();
        let b = run_audit(claim, &c).unwrap();
        assert_eq!(strip_time(&a), strip_time(&b), "{claim}");
    }
}

#[test]
fn linearized_criterion_convolution_has_no_mismatch() {
    let c = AuditConfig { samples: Some(300), ..cfg() };
    let r = run_audit(Claim::PropP11, &c).unwrap();
    assert_eq!(r.disagreements, 0);
    assert!(r.instances > 16 + 512);
}

#[test]
fn count_prop_mismatches_only_for_composite_n() {
    let r = run_audit(Claim::CountProp, &AuditConfig { mmax: Some(12), ..cfg() }).unwrap();
    assert_eq!(r.exit_code(), 2);
    assert_eq!(r.extra["prime_n_mismatches"], 0);
    for e in &r.exemplars {
        assert!(!crate::numtheory::is_prime(e["n"].as_u64().unwrap()));
        assert!(replay_exemplar(e, crate::field::MAX_ORDER).unwrap().disagrees);
    }
}

#[test]
fn p1_counterexamples_replay() {
    let c = AuditConfig { field: Some("2^2/7".parse().unwrap()), samples: Some(4), ..cfg() };
    let r = run_audit(Claim::PropP1, &c).unwrap();
    assert!(r.disagreements > 0);
    for rep in replay_report(&r, crate::field::MAX_ORDER).unwrap() {
        assert!(rep.disagrees);
        assert_eq!(rep.kind, "prop-p1");
    }
}

#[test]
fn t5_gf16_reports_corollary_family() {
    let c = AuditConfig { field: Some("2^4/13".parse().unwrap()), ..cfg() };
    let r = run_audit(Claim::ThmT5, &c).unwrap();
    let pf = &r.extra["per_field"][0];
    assert_eq!(pf["oracle_true"], 60);
    assert_eq!(pf["corollary_family_oracle_true"], 0);
    assert_eq!(r.disagreements, pf["sym_diff"].as_array().unwrap().len() as u64);
    let rep = replay_exemplar(&r.exemplars[0], crate::field::MAX_ORDER).unwrap();
    assert!(rep.disagrees);
}

#[test]
fn cap_is_respected() {
    let c = AuditConfig { cap: 64, ..cfg() };
    assert!(matches!(run_audit(Claim::ThmT1, &c), Err(AuditError::Field(_))));
}

#[test]
fn bad_exemplars_are_errors() {
    assert!(replay_exemplar(&json!({"kind": "gold"}), 1 << 20).is_err());
    assert!(matches!(
        replay_exemplar(&json!({"kind": "nope"}), 1 << 20),
        Err(AuditError::UnknownClaim(_))
    ));
}
