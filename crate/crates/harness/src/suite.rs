//! Suite planning, parallel execution, aggregation and report emission.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::lab::Lab;
use crate::registry::CheckRegistry;
use crate::report::{CheckId, CheckParams, CheckSpec, Status, VerificationReport};

pub const SCHEMA_VERSION: u32 = 1;

/// Split primes `{7, 13, 19, 31}` and inert primes `{5, 11}`.
pub const DEFAULT_PRIMES: [u64; 6] = [5, 7, 11, 13, 19, 31];

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub primes: Vec<u64>,
    /// Restrict to these checks; all registered checks when `None`.
    pub ids: Option<Vec<CheckId>>,
    pub params: CheckParams,
    pub precision_override: Option<usize>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { primes: DEFAULT_PRIMES.to_vec(), ids: None, params: CheckParams::default(), precision_override: None }
    }
}

/// One `CheckSpec` per (check, prime) pair the check is scheduled for; global checks
/// get a single prime-less spec.
pub fn plan(registry: &CheckRegistry, config: &SuiteConfig) -> Vec<CheckSpec> {
    let mut specs = Vec::new();
    for check in registry.checks() {
        if config.ids.as_ref().is_some_and(|ids| !ids.contains(&check.id())) {
            continue;
        }
        let mut push = |prime| {
            let mut spec = CheckSpec::new(check.id(), prime).with_params(config.params.clone());
            spec.precision_override = config.precision_override;
            specs.push(spec);
        };
        if check.domain() == crate::registry::Domain::Global {
            push(None);
        } else {
            for &p in &config.primes {
                if check.scheduled_for(Some(p)) {
                    push(Some(p));
                }
            }
        }
    }
    specs
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub config: BTreeMap<String, String>,
    pub reports: Vec<VerificationReport>,
    pub aggregate: Status,
    pub inconsistencies: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub total_ms: Option<u64>,
}

/// `Fail` if any gating report fails, `Pass` if at least one gating report
/// exists and all pass, `Skipped` otherwise.
pub fn aggregate(reports: &[VerificationReport]) -> Status {
    let gating: Vec<_> = reports.iter().filter(|r| !r.diagnostic).collect();
    if gating.iter().any(|r| r.status == Status::Fail) {
        Status::Fail
    } else if !gating.is_empty() && gating.iter().all(|r| r.status == Status::Pass) {
        Status::Pass
    } else {
        Status::Skipped
    }
}

/// Levels of the split-prime implication chain; each level implies the next.
const CHAIN: [&[CheckId]; 5] = [
    &[CheckId::ClosureScalars, CheckId::BridgeCancellation],
    &[CheckId::MixedCartierCancellation],
    &[CheckId::LayerDefectEquivalence],
    &[CheckId::ScalarKatzDwork],
    &[CheckId::MainSupercongruence],
];

/// Broken implications: a level that passes while the next level fails.
pub fn implication_violations(reports: &[VerificationReport]) -> Vec<String> {
    let mut primes: Vec<u64> = reports.iter().filter_map(|r| r.prime).collect();
    primes.sort_unstable();
    primes.dedup();
    let mut out = Vec::new();
    for p in primes {
        let level = |ids: &[CheckId]| -> Option<Status> {
            let statuses: Vec<Status> = ids
                .iter()
                .map(|id| reports.iter().find(|r| r.id == *id && r.prime == Some(p)).map(|r| r.status))
                .collect::<Option<_>>()?;
            if statuses.contains(&Status::Skipped) {
                None
            } else if statuses.iter().all(|s| *s == Status::Pass) {
                Some(Status::Pass)
            } else {
                Some(Status::Fail)
            }
        };
        for pair in CHAIN.windows(2) {
            if let (Some(Status::Pass), Some(Status::Fail)) = (level(pair[0]), level(pair[1])) {
                let names = |ids: &[CheckId]| ids.iter().map(|i| i.as_str()).collect::<Vec<_>>().join("+");
                out.push(format!("p={p}: {} passes but {} fails", names(pair[0]), names(pair[1])));
            }
        }
    }
    out
}

/// Runs every planned `CheckSpec` in parallel and assembles the ordered report.
pub fn run_suite(
    lab: &Lab,
    registry: &CheckRegistry,
    config: &SuiteConfig,
    echo: BTreeMap<String, String>,
) -> SuiteReport {
    let start = Instant::now();
    let specs = plan(registry, config);
    let mut reports: Vec<VerificationReport> = specs.par_iter().map(|s| registry.run(lab, s)).collect();
    reports.sort_by_key(|r| r.sort_key());
    let inconsistencies = implication_violations(&reports);
    let mut agg = aggregate(&reports);
    if !inconsistencies.is_empty() {
        agg = Status::Fail;
    }
    SuiteReport {
        schema_version: SCHEMA_VERSION,
        tool_version: lab.config().tool_version.clone(),
        config: echo,
        reports,
        aggregate: agg,
        inconsistencies,
        total_ms: lab.config().timings.then(|| start.elapsed().as_millis() as u64),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Human,
    Json,
    Tsv,
}

impl ReportFormat {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "human" => Some(Self::Human),
            "json" => Some(Self::Json),
            "tsv" => Some(Self::Tsv),
            _ => None,
        }
    }
}

fn witness_list(r: &VerificationReport) -> String {
    r.witnesses.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
}

fn ells(r: &VerificationReport) -> String {
    if r.ells.is_empty() {
        "-".to_owned()
    } else {
        r.ells.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
    }
}

impl SuiteReport {
    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn emit(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            ReportFormat::Tsv => self.tsv(),
            ReportFormat::Human => self.human(),
        }
    }

    fn tsv(&self) -> String {
        let mut s = String::from("id\tp\tell\tmodulus\tstatus\twitnesses\tmax_index\tms\n");
        for r in &self.reports {
            let _ = writeln!(
                s,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.id,
                r.prime.map_or("-".to_owned(), |p| p.to_string()),
                ells(r),
                if r.modulus.is_empty() { "-" } else { &r.modulus },
                r.status,
                witness_list(r),
                r.max_index_tested,
                r.elapsed_ms.map_or("-".to_owned(), |m| m.to_string()),
            );
        }
        s
    }

    fn human(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "qcartier {} (report schema {})", self.tool_version, self.schema_version);
        for (k, v) in &self.config {
            let _ = writeln!(s, "  {k} = {v}");
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "{:<26} {:>4} {:<8} {:<8} {:>9}  detail", "check", "p", "l", "status", "max_index");
        for r in &self.reports {
            let detail = match (&r.failure_detail, &r.note) {
                (Some(f), _) => match (&f.index, &f.residue) {
                    (Some(i), Some(res)) => format!("{} (index {i}, residue {res})", f.message),
                    _ => f.message.clone(),
                },
                (None, Some(n)) => n.clone(),
                (None, None) => String::new(),
            };
            let status = if r.diagnostic { format!("{}*", r.status) } else { r.status.to_string() };
            let _ = writeln!(
                s,
                "{:<26} {:>4} {:<8} {:<8} {:>9}  {}",
                r.id.as_str(),
                r.prime.map_or("-".to_owned(), |p| p.to_string()),
                ells(r),
                status,
                r.max_index_tested,
                detail
            );
        }
        let scalars: Vec<_> = self.reports.iter().filter(|r| r.id == CheckId::ClosureScalars).collect();
        if !scalars.is_empty() {
            let _ = writeln!(s, "\nclosure scalars (gamma_l, beta_l) mod p^(4-l)");
            let _ = writeln!(s, "{:>4}  {:>14}  {:>14}  {:>14}", "p", "l=1", "l=2", "l=3");
            for r in scalars {
                let cell = |l: u32| match (r.witness(&format!("gamma_{l}")), r.witness(&format!("beta_{l}"))) {
                    (Some(g), Some(b)) => format!("({g},{b})"),
                    _ => "-".to_owned(),
                };
                let _ = writeln!(s, "{:>4}  {:>14}  {:>14}  {:>14}", r.prime.unwrap_or(0), cell(1), cell(2), cell(3));
            }
        }
        if self.reports.iter().any(|r| r.diagnostic) {
            let _ = writeln!(s, "\n* diagnostic: reported only, never gates the aggregate");
        }
        for i in &self.inconsistencies {
            let _ = writeln!(s, "inconsistency: {i}");
        }
        let _ = writeln!(s, "\naggregate: {}", self.aggregate);
        if let Some(ms) = self.total_ms {
            let _ = writeln!(s, "total: {ms} ms");
        }
        s
    }
}
