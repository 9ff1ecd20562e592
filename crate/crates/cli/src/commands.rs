use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use anyhow::{bail, Context};
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use qcartier_core::cache::ArtifactCache;
use qcartier_core::{
    build_dictionary, Dictionary, FrobeniusDefects, Integers, LocalizedRationals, MulKernel, PrimeContext, Residues,
    Ring, Series, WideResidues,
};
use qcartier_harness::lab::TOOL_VERSION;
use qcartier_harness::suite::{aggregate, DEFAULT_PRIMES, SCHEMA_VERSION};
use qcartier_harness::{
    run_suite, Backend, CheckId, CheckParams, CheckRegistry, CheckSpec, Lab, LabConfig, ReportFormat, Status,
    SuiteConfig, SuiteReport,
};

use crate::args::{BackendArg, Common, FormatArg};

/// Bad flags or configuration; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// What a command printed and how it went.
pub struct Output {
    pub text: String,
    pub status: Status,
}

fn format(c: &Common) -> ReportFormat {
    match c.format {
        FormatArg::Human => ReportFormat::Human,
        FormatArg::Json => ReportFormat::Json,
        FormatArg::Tsv => ReportFormat::Tsv,
    }
}

fn backend(c: &Common) -> Backend {
    match c.backend {
        BackendArg::Exact => Backend::Exact,
        BackendArg::Residue => Backend::Residue,
    }
}

fn context(p: u64, c: &Common) -> anyhow::Result<PrimeContext> {
    let ctx = PrimeContext::new(p).map_err(|e| usage(e.to_string()))?;
    match c.precision {
        Some(n) => ctx.with_precision(n).map_err(|e| usage(e.to_string())),
        None => Ok(ctx),
    }
}

fn ells(c: &Common) -> anyhow::Result<Option<Vec<u32>>> {
    match &c.ell {
        Some(ls) if ls.is_empty() || ls.iter().any(|l| !(1..=3).contains(l)) => {
            Err(usage(format!("--ell must be a subset of 1,2,3 (got {ls:?})")))
        }
        Some(ls) => {
            let mut ls = ls.clone();
            ls.sort_unstable();
            ls.dedup();
            Ok(Some(ls))
        }
        None => Ok(None),
    }
}

fn params(c: &Common) -> anyhow::Result<CheckParams> {
    Ok(CheckParams { ells: ells(c)?, m_max: c.m_max, r_max: c.r_max, ..Default::default() })
}

fn lab(c: &Common) -> Lab {
    Lab::new(LabConfig {
        backend: backend(c),
        cache_dir: c.cache_dir.clone(),
        timings: c.timings,
        tool_version: TOOL_VERSION.to_owned(),
    })
}

/// Settings echoed into reports. Cache location, thread count and timing
/// flags are left out so that they cannot change the report bytes.
fn echo(command: &str, c: &Common) -> BTreeMap<String, String> {
    let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
    let mut m = BTreeMap::from([
        ("command".to_owned(), command.to_owned()),
        ("backend".to_owned(), backend(c).as_str().to_owned()),
        ("seed".to_owned(), c.seed.to_string()),
    ]);
    if let Some(p) = &c.primes {
        m.insert("primes".into(), join(p));
    }
    if let Some(p) = c.prime {
        m.insert("prime".into(), p.to_string());
    }
    if let Some(l) = &c.ell {
        m.insert("ell".into(), l.iter().map(u32::to_string).collect::<Vec<_>>().join(","));
    }
    if let Some(v) = c.m_max {
        m.insert("m_max".into(), v.to_string());
    }
    if let Some(v) = c.r_max {
        m.insert("r_max".into(), v.to_string());
    }
    if let Some(v) = c.precision {
        m.insert("precision".into(), v.to_string());
    }
    m
}

pub fn check(id: &str, c: &Common) -> anyhow::Result<Output> {
    let registry = CheckRegistry::with_defaults();
    let check = registry.get(id).ok_or_else(|| {
        usage(format!("unknown check {id:?}; known checks: {}", registry.names().collect::<Vec<_>>().join(", ")))
    })?;
    let id = check.id();
    let prime = match (c.prime, id) {
        (Some(p), _) => {
            context(p, c)?;
            Some(p)
        }
        (None, CheckId::MumSignature) => None,
        (None, _) => return Err(usage(format!("{id} needs --prime"))),
    };
    let mut spec = CheckSpec::new(id, prime).with_params(params(c)?);
    spec.precision_override = c.precision;
    let lab = lab(c);
    let start = Instant::now();
    let report = registry.run(&lab, &spec);
    let reports = vec![report];
    let suite = SuiteReport {
        schema_version: SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_owned(),
        config: echo("check", c),
        aggregate: aggregate(&reports),
        reports,
        inconsistencies: Vec::new(),
        total_ms: c.timings.then(|| start.elapsed().as_millis() as u64),
    };
    Ok(Output { text: suite.emit(format(c)), status: suite.aggregate })
}

pub fn suite(c: &Common) -> anyhow::Result<Output> {
    let primes = c.primes.clone().unwrap_or_else(|| DEFAULT_PRIMES.to_vec());
    for &p in &primes {
        context(p, c)?;
    }
    let config = SuiteConfig { primes, ids: None, params: params(c)?, precision_override: c.precision };
    let report = run_suite(&lab(c), &CheckRegistry::with_defaults(), &config, echo("suite", c));
    Ok(Output { text: report.emit(format(c)), status: report.aggregate })
}

fn dict_text<R: Ring>(dict: &Dictionary<R>, terms: usize, fmt: ReportFormat) -> anyhow::Result<(String, bool)> {
    let identities = dict.identity_checks()?;
    let ok = identities.iter().all(|(_, m)| m.is_none());
    let ring = dict.u().ring().descriptor();
    let coeffs = |s: &Series<R>| -> Vec<String> {
        (0..terms as i64).map_while(|n| s.coeff(n)).map(|c| s.ring().to_repr(&c)).collect()
    };
    let mut out = String::new();
    match fmt {
        ReportFormat::Json => {
            let objects: BTreeMap<_, _> = dict
                .objects()
                .map(|o| {
                    let v = json!({"construction": o.construction.to_string(), "coefficients": coeffs(&o.series)});
                    (o.name.as_str(), v)
                })
                .collect();
            let ids: BTreeMap<_, _> = identities.iter().map(|(n, m)| (*n, json!(m))).collect();
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "ring": ring.to_string(),
                "precision": dict.precision(),
                "objects": objects,
                "identities": ids,
            });
            out = serde_json::to_string_pretty(&doc)? + "\n";
        }
        ReportFormat::Tsv => {
            out.push_str("object\tconstruction\tcoefficients\n");
            for o in dict.objects() {
                let _ = writeln!(out, "{}\t{}\t{}", o.name, o.construction, coeffs(&o.series).join(","));
            }
        }
        ReportFormat::Human => {
            let _ = writeln!(out, "dictionary over {ring}, precision {}", dict.precision());
            for o in dict.objects() {
                let _ = writeln!(out, "{:<12} {:<16} {}", o.name.as_str(), o.construction.to_string(), coeffs(&o.series).join(" "));
            }
            let _ = writeln!(out);
            for (name, m) in &identities {
                let verdict = m.map_or("ok".to_owned(), |n| format!("fails at q^{n}"));
                let _ = writeln!(out, "{name:<28} {verdict}");
            }
        }
    }
    Ok((out, ok))
}

pub fn dict(c: &Common) -> anyhow::Result<Output> {
    let precision = c.precision.unwrap_or(c.terms.max(4)) as i64;
    if precision < 4 {
        return Err(usage("--precision must be at least 4 for the dictionary"));
    }
    let cache = ArtifactCache::new(c.cache_dir.as_deref(), TOOL_VERSION);
    let fmt = format(c);
    let (text, ok) = match c.prime {
        None => dict_text(&cache.dictionary(0, precision, &Integers)?.0, c.terms, fmt)?,
        Some(p) => {
            let ctx = PrimeContext::new(p).map_err(|e| usage(e.to_string()))?;
            match backend(c) {
                Backend::Exact => {
                    let ring = LocalizedRationals::new(p)?;
                    let d = cache.dictionary_with(p, precision, &ring, || build_dictionary(precision, Integers)?.convert(ring))?.0;
                    dict_text(&d, c.terms, fmt)?
                }
                Backend::Residue if Residues::fits(p, ctx.working_digits()) => {
                    let ring = Residues::new(p, ctx.working_digits())?;
                    dict_text(&cache.dictionary(p, precision, &ring)?.0, c.terms, fmt)?
                }
                Backend::Residue => {
                    let ring = WideResidues::new(p, ctx.working_digits())?;
                    dict_text(&cache.dictionary(p, precision, &ring)?.0, c.terms, fmt)?
                }
            }
        }
    };
    Ok(Output { text, status: if ok { Status::Pass } else { Status::Fail } })
}

pub fn sequence(c: &Common) -> anyhow::Result<Output> {
    let n = c.terms.max(1) - 1;
    let cache = ArtifactCache::new(c.cache_dir.as_deref(), TOOL_VERSION);
    let (seq, _) = cache.sequences(n.max(1))?;
    let rows: Vec<[String; 5]> = (0..=n)
        .map(|k| {
            // s, beta and c start at n = 1
            let tail = |f: &dyn Fn() -> String| if k == 0 { "-".to_owned() } else { f() };
            [
                k.to_string(),
                seq.a(k).to_string(),
                tail(&|| seq.s(k).to_string()),
                tail(&|| seq.beta(k).to_string()),
                tail(&|| seq.c(k).to_string()),
            ]
        })
        .collect();
    let text = match format(c) {
        ReportFormat::Json => {
            let col = |i: usize| rows.iter().map(|r| r[i].clone()).collect::<Vec<_>>();
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "n": col(0).len(),
                "a_mix": col(1),
                "s": col(2),
                "beta": col(3),
                "c_mix": col(4),
            });
            serde_json::to_string_pretty(&doc)? + "\n"
        }
        ReportFormat::Tsv => {
            let mut s = String::from("n\tA_n\ts\tbeta\tc\n");
            for r in &rows {
                let _ = writeln!(s, "{}", r.join("\t"));
            }
            s
        }
        ReportFormat::Human => {
            let mut s = format!("{:>4}  {:>28}  {:>16}  {:>16}  {:>18}\n", "n", "A_n", "s(n)", "beta(n)", "c_n");
            for r in &rows {
                let _ = writeln!(s, "{:>4}  {:>28}  {:>16}  {:>16}  {:>18}", r[0], r[1], r[2], r[3], r[4]);
            }
            s
        }
    };
    Ok(Output { text, status: Status::Pass })
}

fn random_series(rng: &mut ChaCha8Rng, ring: Residues, n: i64) -> anyhow::Result<Series<Residues>> {
    let m = ring.modulus();
    Ok(Series::from_fn(ring, 0, n, |_| rng.gen_range(0..m))?)
}

pub fn bench(c: &Common) -> anyhow::Result<Output> {
    let primes = c.primes.clone().unwrap_or_else(|| vec![7, 13, 19, 31]);
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let mut rows = Vec::new();
    for p in primes {
        let ctx = context(p, c)?;
        let n = ctx.working_precision() as i64;
        let k = ctx.working_digits();
        if !Residues::fits(p, k) {
            bail!("p={p} needs the wide residue backend, which bench does not time");
        }
        let ring = Residues::new(p, k)?;
        let t0 = Instant::now();
        let dict = build_dictionary(n, ring).context("dictionary")?;
        let t_dict = t0.elapsed().as_millis();
        let t1 = Instant::now();
        FrobeniusDefects::build(&dict, &ctx).context("defects")?;
        let t_defects = t1.elapsed().as_millis();
        let (a, b) = (random_series(&mut rng, ring, n)?, random_series(&mut rng, ring, n)?);
        let t2 = Instant::now();
        let school = a.mul_with(&b, MulKernel::Schoolbook)?;
        let t_school = t2.elapsed().as_millis();
        let t3 = Instant::now();
        let kara = a.mul_with(&b, MulKernel::Karatsuba)?;
        let t_kara = t3.elapsed().as_millis();
        if school != kara {
            bail!("multiplication kernels disagree at p={p}");
        }
        rows.push((p, n, t_dict, t_defects, t_school, t_kara));
    }
    let text = match format(c) {
        ReportFormat::Json => {
            let list: Vec<_> = rows
                .iter()
                .map(|(p, n, d, u, s, k)| json!({"p": p, "precision": n, "dictionary_ms": d, "defects_ms": u, "schoolbook_ms": s, "karatsuba_ms": k}))
                .collect();
            serde_json::to_string_pretty(&json!({"schema_version": SCHEMA_VERSION, "bench": list}))? + "\n"
        }
        ReportFormat::Tsv => {
            let mut s = String::from("p\tprecision\tdictionary_ms\tdefects_ms\tschoolbook_ms\tkaratsuba_ms\n");
            for (p, n, d, u, sc, k) in &rows {
                let _ = writeln!(s, "{p}\t{n}\t{d}\t{u}\t{sc}\t{k}");
            }
            s
        }
        ReportFormat::Human => {
            let mut s = format!("{:>4} {:>9} {:>14} {:>12} {:>15} {:>14}\n", "p", "precision", "dictionary ms", "defects ms", "schoolbook ms", "karatsuba ms");
            for (p, n, d, u, sc, k) in &rows {
                let _ = writeln!(s, "{p:>4} {n:>9} {d:>14} {u:>12} {sc:>15} {k:>14}");
            }
            s
        }
    };
    Ok(Output { text, status: Status::Pass })
}
