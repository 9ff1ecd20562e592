//! The built-in strategies, one type per [`CheckId`](crate::report::CheckId).

mod arithmetic;
mod cartier;
mod closure;
mod katz_dwork;

use anyhow::Context;

use qcartier_core::{PadicRing, PrimeContext, Residues, Ring, Series, Valuation};

use crate::lab::{AnyArtifacts, Lab};
use crate::registry::Check;
use crate::report::CheckSpec;

pub use arithmetic::{InertAp72, InertObstruction, InertParity, MainSupercongruence, MumSignature, SplitTower};
pub use cartier::{LayerDefectEquivalence, LayerDivisibility, MixedCartierCancellation, NumeratorSaturation, TransportDiagnostic};
pub use closure::{BridgeCancellation, ClosureScalars};
pub use katz_dwork::ScalarKatzDwork;

pub fn all() -> Vec<Box<dyn Check>> {
    vec![
        Box::new(MainSupercongruence),
        Box::new(ScalarKatzDwork),
        Box::new(MixedCartierCancellation),
        Box::new(ClosureScalars),
        Box::new(BridgeCancellation),
        Box::new(LayerDivisibility),
        Box::new(NumeratorSaturation),
        Box::new(LayerDefectEquivalence),
        Box::new(SplitTower),
        Box::new(InertObstruction),
        Box::new(InertParity),
        Box::new(InertAp72),
        Box::new(MumSignature),
        Box::new(TransportDiagnostic),
    ]
}

fn prime_of(spec: &CheckSpec) -> anyhow::Result<u64> {
    spec.prime.context("a prime is required")
}

/// Context and artifacts for the requested prime in the lab's backend.
fn artifacts(lab: &Lab, spec: &CheckSpec) -> anyhow::Result<(PrimeContext, AnyArtifacts)> {
    let ctx = lab.context(prime_of(spec)?, spec.precision_override)?;
    let any = lab.artifacts(&ctx)?;
    Ok((ctx, any))
}

/// Canonical representative of `x` modulo `p^k`.
fn residue<R: Ring>(ring: &R, x: &R::Elem, p: u64, k: u32) -> anyhow::Result<i64> {
    Ok(ring.reduce(x, &Residues::new(p, k)?)? as i64)
}

/// Coefficient of `q^n` modulo `p^k` (zero below the lowest stored exponent).
fn coeff_mod<R: PadicRing>(s: &Series<R>, n: i64, k: u32) -> anyhow::Result<i64> {
    let c = s.coeff(n).with_context(|| format!("q^{n} is beyond the precision {}", s.precision()))?;
    residue(s.ring(), &c, s.ring().prime(), k)
}

/// Finite valuation as a witness value, `-1` for an identically zero series.
fn valuation_witness(v: Valuation) -> i64 {
    v.finite().map_or(-1, i64::from)
}
