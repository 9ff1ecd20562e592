//! Name-keyed registry of verification strategies.

use std::collections::BTreeMap;
use std::time::Instant;

use qcartier_core::{PrimeContext, Splitting};

use crate::checks;
use crate::lab::Lab;
use crate::report::{CheckId, CheckSpec, FailureDetail, Outcome, Status, VerificationReport};

/// Which primes a check accepts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    /// `p = 1 mod 3`.
    Split,
    /// `p = 2 mod 3`.
    Inert,
    /// Any admissible prime.
    AnyPrime,
    /// No prime: the check sweeps its own range.
    Global,
}

impl Domain {
    pub fn accepts(self, prime: Option<u64>) -> Result<(), String> {
        let splitting = |p| PrimeContext::new(p).map(|c| c.splitting()).map_err(|e| e.to_string());
        match (self, prime) {
            (Domain::Global, _) => Ok(()),
            (_, None) => Err("a prime is required".into()),
            (Domain::AnyPrime, Some(p)) => splitting(p).map(|_| ()),
            (Domain::Split, Some(p)) => match splitting(p)? {
                Splitting::Split => Ok(()),
                Splitting::Inert => Err(format!("p={p} is inert; this check needs a split prime")),
            },
            (Domain::Inert, Some(p)) => match splitting(p)? {
                Splitting::Inert => Ok(()),
                Splitting::Split => Err(format!("p={p} is split; this check needs an inert prime")),
            },
        }
    }
}

/// One verification strategy.
pub trait Check: Send + Sync {
    fn id(&self) -> CheckId;
    fn summary(&self) -> &'static str;
    fn domain(&self) -> Domain;
    /// Whether a suite run schedules this check for `p` (`None` for global checks).
    fn scheduled_for(&self, prime: Option<u64>) -> bool {
        self.domain().accepts(prime).is_ok()
    }
    fn run(&self, lab: &Lab, spec: &CheckSpec) -> anyhow::Result<Outcome>;
}

pub struct CheckRegistry {
    checks: BTreeMap<&'static str, Box<dyn Check>>,
}

impl Default for CheckRegistry {
    fn default() -> Self {
        Self::with_defaults()
    }
}

impl CheckRegistry {
    pub fn empty() -> Self {
        Self { checks: BTreeMap::new() }
    }

    pub fn with_defaults() -> Self {
        let mut r = Self::empty();
        for c in checks::all() {
            r.register(c);
        }
        r
    }

    /// Adds or replaces a strategy under its id.
    pub fn register(&mut self, check: Box<dyn Check>) -> Option<Box<dyn Check>> {
        self.checks.insert(check.id().as_str(), check)
    }

    pub fn get(&self, name: &str) -> Option<&dyn Check> {
        let id = CheckId::parse(name)?;
        self.checks.get(id.as_str()).map(|b| b.as_ref())
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.checks.keys().copied()
    }

    pub fn checks(&self) -> impl Iterator<Item = &dyn Check> {
        self.checks.values().map(|b| b.as_ref())
    }

    /// Runs one spec. Domain mismatches become `Skipped`, errors become `Fail`.
    pub fn run(&self, lab: &Lab, spec: &CheckSpec) -> VerificationReport {
        let start = Instant::now();
        let mut report = VerificationReport {
            id: spec.id,
            prime: spec.prime,
            ells: Vec::new(),
            modulus: String::new(),
            status: Status::Skipped,
            diagnostic: spec.id.is_diagnostic(),
            witnesses: BTreeMap::new(),
            max_index_tested: 0,
            elapsed_ms: None,
            failure_detail: None,
            note: None,
        };
        let Some(check) = self.checks.get(spec.id.as_str()) else {
            report.note = Some(format!("no strategy registered for {}", spec.id));
            return report;
        };
        if let Err(reason) = check.domain().accepts(spec.prime) {
            report.note = Some(reason);
            return report;
        }
        match check.run(lab, spec) {
            Ok(outcome) => {
                report.status = if outcome.skipped {
                    Status::Skipped
                } else if outcome.passed {
                    Status::Pass
                } else {
                    Status::Fail
                };
                report.ells = outcome.ells;
                report.modulus = outcome.modulus;
                report.witnesses = outcome.witnesses;
                report.max_index_tested = outcome.max_index;
                report.note = outcome.note;
                report.failure_detail = outcome.failure;
                if report.status == Status::Fail && report.failure_detail.is_none() {
                    report.failure_detail = Some(FailureDetail::message("check failed"));
                }
            }
            Err(e) => {
                report.status = Status::Fail;
                report.failure_detail = Some(FailureDetail::message(format!("{e:#}")));
            }
        }
        if lab.config().timings {
            report.elapsed_ms = Some(start.elapsed().as_millis() as u64);
        }
        report
    }
}
