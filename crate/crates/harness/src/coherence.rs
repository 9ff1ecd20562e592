//! Bit-for-bit comparison of the closure pipeline across backends.

use std::collections::BTreeMap;

use qcartier_core::{PadicRing, Residues, Series};

use crate::lab::{Artifacts, Backend, Lab};
use crate::with_artifacts;

/// Every intermediate of the closure pipeline, reduced to canonical residues.
#[derive(Clone, Debug, PartialEq)]
pub struct PipelineSnapshot {
    pub series: BTreeMap<String, Series<Residues>>,
    pub scalars: BTreeMap<String, u64>,
}

fn snapshot<R: PadicRing>(a: &Artifacts<R>) -> anyhow::Result<PipelineSnapshot> {
    let ctx = &a.ctx;
    let d = a.defects()?;
    let full = Residues::new(ctx.p, ctx.modulus_exponent + ctx.guard_digits)?;
    let mut series = BTreeMap::new();
    series.insert("U_p".to_owned(), d.u_p.reduce_into(&full)?);
    series.insert("V_p".to_owned(), d.v_p.reduce_into(&full)?);
    series.insert("W_p".to_owned(), d.w_p.reduce_into(&full)?);
    let mut scalars = BTreeMap::new();
    for row in a.closure()? {
        let l = row.ell;
        let layer = Residues::new(ctx.p, row.modulus_exponent)?;
        series.insert(format!("L_C_{l}"), row.l_c.reduce_into(&layer)?);
        series.insert(format!("L_u_{l}"), row.l_u.reduce_into(&layer)?);
        scalars.insert(format!("gamma_{l}"), row.gamma);
        scalars.insert(format!("alpha_{l}"), row.alpha);
        scalars.insert(format!("beta_{l}"), row.beta);
    }
    Ok(PipelineSnapshot { series, scalars })
}

#[derive(Clone, Debug)]
pub struct CoherenceReport {
    pub p: u64,
    pub exact: PipelineSnapshot,
    pub residue: PipelineSnapshot,
    /// Names of the entries that differ.
    pub differences: Vec<String>,
}

impl CoherenceReport {
    pub fn coherent(&self) -> bool {
        self.differences.is_empty()
    }
}

/// Runs the closure pipeline at `p` over the localized rationals and over the
/// residue ring, reduces the exact results and compares every entry.
pub fn closure_coherence(lab: &Lab, p: u64, precision_override: Option<usize>) -> anyhow::Result<CoherenceReport> {
    let ctx = lab.context(p, precision_override)?;
    let exact = lab.artifacts_in(&ctx, Backend::Exact)?;
    let residue = lab.artifacts_in(&ctx, Backend::Residue)?;
    let exact = with_artifacts!(&exact, |a| snapshot(a))?;
    let residue = with_artifacts!(&residue, |a| snapshot(a))?;
    let mut differences: Vec<String> = exact
        .series
        .iter()
        .filter(|(k, v)| residue.series.get(*k) != Some(v))
        .map(|(k, _)| k.clone())
        .collect();
    differences.extend(exact.scalars.iter().filter(|(k, v)| residue.scalars.get(*k) != Some(v)).map(|(k, _)| k.clone()));
    if exact.series.len() != residue.series.len() || exact.scalars.len() != residue.scalars.len() {
        differences.push("entry sets".to_owned());
    }
    Ok(CoherenceReport { p, exact, residue, differences })
}
