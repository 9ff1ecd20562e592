use std::collections::BTreeMap;

use qcartier_harness::report::Outcome;
use qcartier_harness::suite::{aggregate, implication_violations, plan};
use qcartier_harness::{
    run_suite, Check, CheckId, CheckParams, CheckRegistry, CheckSpec, Domain, Lab, LabConfig, ReportFormat, Status,
    SuiteConfig, SuiteReport, VerificationReport,
};

fn lab() -> Lab {
    Lab::new(LabConfig::default())
}

#[test]
fn every_id_has_a_strategy() {
    let r = CheckRegistry::with_defaults();
    let names: Vec<_> = r.names().collect();
    assert_eq!(names.len(), CheckId::ALL.len());
    for id in CheckId::ALL {
        assert_eq!(r.get(id.as_str()).unwrap().id(), id);
        assert_eq!(CheckId::parse(&id.as_str().to_lowercase()), Some(id));
    }
    assert!(r.get("NoSuchCheck").is_none());
}

#[test]
fn domain_mismatch_is_skipped_with_reason() {
    let (lab, r) = (lab(), CheckRegistry::with_defaults());
    let rep = r.run(&lab, &CheckSpec::new(CheckId::ClosureScalars, Some(5)));
    assert_eq!(rep.status, Status::Skipped);
    assert!(rep.note.unwrap().contains("inert"));
    let rep = r.run(&lab, &CheckSpec::new(CheckId::TransportDiagnostic, Some(11)));
    assert_eq!(rep.status, Status::Skipped);
    assert!(rep.diagnostic);
    let rep = r.run(&lab, &CheckSpec::new(CheckId::InertAp72, Some(7)));
    assert_eq!(rep.status, Status::Skipped);
}

#[test]
fn level_prime_is_rejected() {
    let rep = CheckRegistry::with_defaults().run(&lab(), &CheckSpec::new(CheckId::ClosureScalars, Some(3)));
    assert_eq!(rep.status, Status::Skipped);
    assert!(rep.note.unwrap().contains("p=3 excluded"));
}

#[test]
fn main_congruence_fails_at_an_inert_prime() {
    let rep = CheckRegistry::with_defaults().run(&lab(), &CheckSpec::new(CheckId::MainSupercongruence, Some(5)));
    assert_eq!(rep.status, Status::Fail);
    let detail = rep.failure_detail.unwrap();
    assert_eq!(detail.index, Some(1));
    // A_5 - A_1 = 320012514 = 14 mod 625
    assert_eq!(detail.residue.as_deref(), Some("14"));
    assert_eq!(320012532i64 - 18, 320012514);
    assert_eq!(320012514 % 625, 14);
}

#[test]
fn main_congruence_first_case() {
    let rep = CheckRegistry::with_defaults().run(
        &lab(),
        &CheckSpec::new(CheckId::MainSupercongruence, Some(7)).with_params(CheckParams { m_max: Some(1), ..Default::default() }),
    );
    assert_eq!(rep.status, Status::Pass);
    assert_eq!(rep.witness("a_p_mod_p4"), Some(18));
    assert_eq!(rep.max_index_tested, 7);
}

#[test]
fn transport_beyond_precision_is_skipped() {
    let spec = CheckSpec::new(CheckId::TransportDiagnostic, Some(7))
        .with_params(CheckParams { n_max: Some(10_000), ..Default::default() });
    let rep = CheckRegistry::with_defaults().run(&lab(), &spec);
    assert_eq!(rep.status, Status::Skipped);
    assert!(rep.note.unwrap().contains("beyond"));
}

#[test]
fn split_tower_small_cases() {
    let spec = CheckSpec::new(CheckId::SplitTower, Some(7))
        .with_params(CheckParams { m_max: Some(3), r_max: Some(2), ..Default::default() });
    let rep = CheckRegistry::with_defaults().run(&lab(), &spec);
    assert_eq!(rep.status, Status::Pass);
    // the m = p path reaches 7 * 7^2
    assert_eq!(rep.max_index_tested, 343);
    assert!(rep.witness("min_valuation_2").unwrap() >= 8);
}

#[test]
fn bridge_witnesses_are_integers() {
    let rep = CheckRegistry::with_defaults().run(&lab(), &CheckSpec::new(CheckId::BridgeCancellation, Some(7)));
    assert_eq!(rep.status, Status::Pass);
    // 95 - 27*283, 36 - 27*34, 6 - 27*1
    assert_eq!(rep.witness("bridge_1"), Some(-7546));
    assert_eq!(-7546 % 343, 0);
    assert_eq!(rep.witness("bridge_2"), Some(-882));
    assert_eq!(rep.witness("bridge_3"), Some(-21));
}

#[test]
fn mixed_cancellation_control_detects_c0() {
    let rep = CheckRegistry::with_defaults().run(&lab(), &CheckSpec::new(CheckId::MixedCartierCancellation, Some(7)));
    assert_eq!(rep.status, Status::Pass);
    assert!(rep.witness("control_index").is_some());
    assert_ne!(rep.witness("control_residue"), Some(0));
}

struct AlwaysFails;

impl Check for AlwaysFails {
    fn id(&self) -> CheckId {
        CheckId::MumSignature
    }
    fn summary(&self) -> &'static str {
        "replacement strategy"
    }
    fn domain(&self) -> Domain {
        Domain::Global
    }
    fn run(&self, _lab: &Lab, _spec: &CheckSpec) -> anyhow::Result<Outcome> {
        anyhow::bail!("deliberate failure")
    }
}

#[test]
fn registered_strategy_replaces_default_and_errors_become_failures() {
    let mut r = CheckRegistry::with_defaults();
    assert!(r.register(Box::new(AlwaysFails)).is_some());
    let rep = r.run(&lab(), &CheckSpec::new(CheckId::MumSignature, None));
    assert_eq!(rep.status, Status::Fail);
    assert_eq!(rep.failure_detail.unwrap().message, "deliberate failure");
}

fn report(id: CheckId, prime: u64, status: Status) -> VerificationReport {
    VerificationReport {
        id,
        prime: Some(prime),
        ells: vec![],
        modulus: "p^4".into(),
        status,
        diagnostic: id.is_diagnostic(),
        witnesses: BTreeMap::new(),
        max_index_tested: 0,
        elapsed_ms: None,
        failure_detail: None,
        note: None,
    }
}

#[test]
fn broken_implication_is_flagged() {
    let reports = vec![
        report(CheckId::ClosureScalars, 7, Status::Pass),
        report(CheckId::BridgeCancellation, 7, Status::Pass),
        report(CheckId::MixedCartierCancellation, 7, Status::Fail),
        report(CheckId::LayerDefectEquivalence, 7, Status::Fail),
    ];
    let v = implication_violations(&reports);
    assert_eq!(v.len(), 1);
    assert!(v[0].contains("MixedCartierCancellation"));
    let ok = vec![report(CheckId::ClosureScalars, 7, Status::Fail), report(CheckId::MixedCartierCancellation, 7, Status::Fail)];
    assert!(implication_violations(&ok).is_empty());
}

#[test]
fn aggregate_rules() {
    assert_eq!(aggregate(&[]), Status::Skipped);
    let mut diag = report(CheckId::TransportDiagnostic, 7, Status::Fail);
    assert_eq!(aggregate(std::slice::from_ref(&diag)), Status::Skipped);
    diag.status = Status::Pass;
    let pass = report(CheckId::ClosureScalars, 7, Status::Pass);
    assert_eq!(aggregate(&[pass.clone(), diag.clone()]), Status::Pass);
    assert_eq!(aggregate(&[pass, report(CheckId::SplitTower, 7, Status::Fail)]), Status::Fail);
}

#[test]
fn plan_respects_domains() {
    let r = CheckRegistry::with_defaults();
    let cfg = SuiteConfig { primes: vec![5, 7], ..Default::default() };
    let specs = plan(&r, &cfg);
    let has = |id, p| specs.iter().any(|s| s.id == id && s.prime == p);
    assert!(has(CheckId::ClosureScalars, Some(7)));
    assert!(!has(CheckId::ClosureScalars, Some(5)));
    assert!(!has(CheckId::MainSupercongruence, Some(5)));
    assert!(has(CheckId::InertAp72, Some(5)));
    assert!(has(CheckId::MumSignature, None));
}

#[test]
fn empty_suite_is_skipped_and_valid() {
    let cfg = SuiteConfig { primes: vec![], ids: Some(vec![CheckId::ClosureScalars]), ..Default::default() };
    let rep = run_suite(&lab(), &CheckRegistry::with_defaults(), &cfg, BTreeMap::new());
    assert!(rep.reports.is_empty());
    assert_eq!(rep.aggregate, Status::Skipped);
    let json = rep.emit(ReportFormat::Json);
    assert_eq!(SuiteReport::from_json(&json).unwrap(), rep);
}

#[test]
fn suite_reports_round_trip_and_repeat_identically() {
    let cfg = SuiteConfig { primes: vec![5, 7], ..Default::default() };
    let echo = BTreeMap::from([("primes".to_owned(), "5,7".to_owned())]);
    let registry = CheckRegistry::with_defaults();
    let first = run_suite(&lab(), &registry, &cfg, echo.clone());
    assert_eq!(first.aggregate, Status::Pass, "{}", first.emit(ReportFormat::Human));
    assert!(first.inconsistencies.is_empty());

    let json = first.emit(ReportFormat::Json);
    let parsed = SuiteReport::from_json(&json).unwrap();
    assert_eq!(parsed.emit(ReportFormat::Json), json);

    let second = run_suite(&lab(), &registry, &cfg, echo);
    assert_eq!(second.emit(ReportFormat::Json), json);

    let keys: Vec<_> = first.reports.iter().map(|r| (r.id, r.prime)).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);

    let tsv = first.emit(ReportFormat::Tsv);
    let mut lines = tsv.lines();
    assert_eq!(lines.next().unwrap(), "id\tp\tell\tmodulus\tstatus\twitnesses\tmax_index\tms");
    assert_eq!(lines.count(), first.reports.len());
    assert!(tsv.lines().all(|l| l.split('\t').count() == 8));

    let human = first.emit(ReportFormat::Human);
    assert!(human.contains("(95,283)"));
    assert!(human.contains("aggregate: PASS"));
}
