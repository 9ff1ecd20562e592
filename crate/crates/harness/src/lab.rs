//! Shared, lazily built artifacts: dictionaries, Frobenius defects, defect
//! powers and closure data, keyed by `(p, backend, precision)`.
//!
//! Each slot is a `OnceLock`, so concurrent checks on the same prime build an
//! artifact once and then share it read-only.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use qcartier_core::cache::ArtifactCache;
use qcartier_core::sequence::SequenceCache;
use qcartier_core::{
    build_dictionary, Dictionary, FrobeniusDefects, Integers, LocalizedRationals, PadicRing, PrimeContext, Residues,
    Series, WideResidues,
};

use crate::closure::{closure_rows, ClosureRow};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Backend {
    /// Rationals localized at `p`.
    Exact,
    /// `Z/p^(K+guard)`.
    Residue,
}

impl Backend {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::Residue => "residue",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Some(Self::Exact),
            "residue" => Some(Self::Residue),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LabConfig {
    pub backend: Backend,
    pub cache_dir: Option<PathBuf>,
    /// Record wall-clock timings in reports (off by default so that reports
    /// are byte-identical across runs).
    pub timings: bool,
    pub tool_version: String,
}

impl Default for LabConfig {
    fn default() -> Self {
        Self { backend: Backend::Residue, cache_dir: None, timings: false, tool_version: TOOL_VERSION.to_owned() }
    }
}

type Lazy<T> = OnceLock<Result<T, String>>;

fn lazy<T>(cell: &Lazy<T>, f: impl FnOnce() -> Result<T, String>) -> anyhow::Result<&T> {
    cell.get_or_init(f).as_ref().map_err(|e| anyhow::anyhow!("{e}"))
}

/// Everything derived from one dictionary.
pub struct Artifacts<R: PadicRing> {
    pub ctx: PrimeContext,
    pub dict: Dictionary<R>,
    defects: Lazy<Arc<FrobeniusDefects<R>>>,
    u_powers: Lazy<Arc<Vec<Series<R>>>>,
    closure: Lazy<Arc<Vec<ClosureRow<R>>>>,
}

impl<R: PadicRing> Artifacts<R> {
    pub fn new(ctx: PrimeContext, dict: Dictionary<R>) -> Self {
        Self { ctx, dict, defects: OnceLock::new(), u_powers: OnceLock::new(), closure: OnceLock::new() }
    }

    pub fn defects(&self) -> anyhow::Result<&FrobeniusDefects<R>> {
        lazy(&self.defects, || FrobeniusDefects::build(&self.dict, &self.ctx).map(Arc::new).map_err(|e| e.to_string()))
            .map(|d| d.as_ref())
    }

    /// `U_p^1, U_p^2, U_p^3` in the defect ring.
    pub fn u_powers(&self) -> anyhow::Result<&[Series<R>]> {
        let d = self.defects()?;
        lazy(&self.u_powers, || {
            let u = &d.u_p;
            let u2 = u.mul(u).map_err(|e| e.to_string())?;
            let u3 = u2.mul(u).map_err(|e| e.to_string())?;
            Ok(Arc::new(vec![u.clone(), u2, u3]))
        })
        .map(|v| v.as_slice())
    }

    /// Closure data for `l = 1, 2, 3`.
    pub fn closure(&self) -> anyhow::Result<&[ClosureRow<R>]> {
        let powers = self.u_powers()?;
        lazy(&self.closure, || closure_rows(&self.dict, &self.ctx, powers).map(Arc::new).map_err(|e| e.to_string()))
            .map(|v| v.as_slice())
    }
}

/// Artifacts over whichever ring the backend selected.
#[derive(Clone)]
pub enum AnyArtifacts {
    Exact(Arc<Artifacts<LocalizedRationals>>),
    Narrow(Arc<Artifacts<Residues>>),
    Wide(Arc<Artifacts<WideResidues>>),
}

/// Runs the same generic body against the concrete artifacts.
#[macro_export]
macro_rules! with_artifacts {
    ($any:expr, |$a:ident| $body:expr) => {
        match $any {
            $crate::lab::AnyArtifacts::Exact($a) => $body,
            $crate::lab::AnyArtifacts::Narrow($a) => $body,
            $crate::lab::AnyArtifacts::Wide($a) => $body,
        }
    };
}

type SlotKey = (u64, Backend, usize);

pub struct Lab {
    config: LabConfig,
    cache: ArtifactCache,
    slots: Mutex<HashMap<SlotKey, Arc<Lazy<AnyArtifacts>>>>,
    small: Mutex<HashMap<usize, Arc<Lazy<Arc<Dictionary<Integers>>>>>>,
    sequences: Mutex<Option<Arc<SequenceCache>>>,
}

impl Lab {
    pub fn new(config: LabConfig) -> Self {
        let cache = ArtifactCache::new(config.cache_dir.as_deref(), &config.tool_version);
        Self {
            config,
            cache,
            slots: Mutex::new(HashMap::new()),
            small: Mutex::new(HashMap::new()),
            sequences: Mutex::new(None),
        }
    }

    pub fn config(&self) -> &LabConfig {
        &self.config
    }

    pub fn cache(&self) -> &ArtifactCache {
        &self.cache
    }

    /// Prime context honouring an optional precision override.
    pub fn context(&self, p: u64, precision_override: Option<usize>) -> anyhow::Result<PrimeContext> {
        let ctx = PrimeContext::new(p)?;
        Ok(match precision_override {
            Some(n) => ctx.with_precision(n)?,
            None => ctx,
        })
    }

    /// Artifacts for `ctx` in the configured backend.
    pub fn artifacts(&self, ctx: &PrimeContext) -> anyhow::Result<AnyArtifacts> {
        self.artifacts_in(ctx, self.config.backend)
    }

    pub fn artifacts_in(&self, ctx: &PrimeContext, backend: Backend) -> anyhow::Result<AnyArtifacts> {
        let key = (ctx.p, backend, ctx.default_precision);
        let slot = self.slots.lock().expect("slot lock").entry(key).or_default().clone();
        lazy(&slot, || self.build(ctx, backend)).cloned()
    }

    fn build(&self, ctx: &PrimeContext, backend: Backend) -> Result<AnyArtifacts, String> {
        let n = ctx.working_precision() as i64;
        let p = ctx.p;
        let err = |e: qcartier_core::modular::ModularError| e.to_string();
        Ok(match backend {
            Backend::Exact => {
                let ring = LocalizedRationals::new(p).map_err(|e| e.to_string())?;
                let (dict, _) = self
                    .cache
                    .dictionary_with(p, n, &ring, || build_dictionary(n, Integers)?.convert(ring))
                    .map_err(err)?;
                AnyArtifacts::Exact(Arc::new(Artifacts::new(ctx.clone(), dict)))
            }
            Backend::Residue => {
                let k = ctx.working_digits();
                if Residues::fits(p, k) {
                    let ring = Residues::new(p, k).map_err(|e| e.to_string())?;
                    let (dict, _) = self.cache.dictionary(p, n, &ring).map_err(err)?;
                    AnyArtifacts::Narrow(Arc::new(Artifacts::new(ctx.clone(), dict)))
                } else {
                    let ring = WideResidues::new(p, k).map_err(|e| e.to_string())?;
                    let (dict, _) = self.cache.dictionary(p, n, &ring).map_err(err)?;
                    AnyArtifacts::Wide(Arc::new(Artifacts::new(ctx.clone(), dict)))
                }
            }
        })
    }

    /// Integer dictionary through `q^{precision-1}`, for the small-index
    /// coefficient extractions (branch coefficients).
    pub fn integer_dictionary(&self, precision: usize) -> anyhow::Result<Arc<Dictionary<Integers>>> {
        let slot = self.small.lock().expect("slot lock").entry(precision).or_default().clone();
        lazy(&slot, || {
            self.cache
                .dictionary(0, precision as i64, &Integers)
                .map(|(d, _)| Arc::new(d))
                .map_err(|e| e.to_string())
        })
        .cloned()
    }

    /// `A_0..=A_{n_max}` and divisor sums through `n_max`; grows on demand.
    pub fn sequences(&self, n_max: usize) -> anyhow::Result<Arc<SequenceCache>> {
        let mut guard = self.sequences.lock().expect("sequence lock");
        if let Some(s) = guard.as_ref() {
            if s.n_max() >= n_max {
                return Ok(s.clone());
            }
        }
        let (s, _) = self.cache.sequences(n_max)?;
        let s = Arc::new(s);
        *guard = Some(s.clone());
        Ok(s)
    }
}
