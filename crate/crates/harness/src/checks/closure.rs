use qcartier_core::PadicRing;

use super::artifacts;
use crate::lab::{Artifacts, Lab};
use crate::registry::{Check, Domain};
use crate::report::{CheckId, CheckSpec, FailureDetail, Outcome};
use crate::with_artifacts;

/// Solves for `γ_l, β_l` and checks that both closure residuals vanish
/// modulo `p^{4-l}` through at least `q^{5p}`.
pub struct ClosureScalars;

fn closure_outcome<R: PadicRing>(a: &Artifacts<R>, spec: &CheckSpec) -> anyhow::Result<Outcome> {
    let p = a.ctx.p as i64;
    let ells = spec.ells();
    let mut out = Outcome::new("p^(4-l)");
    out.ells = ells.clone();
    for row in a.closure()?.iter().filter(|r| ells.contains(&r.ell)) {
        let l = row.ell;
        out.witness(format!("gamma_{l}"), row.gamma as i64);
        out.witness(format!("beta_{l}"), row.beta as i64);
        out.witness(format!("alpha_{l}"), row.alpha as i64);
        out.reach(row.reach());
        if row.alpha != 0 {
            out.fail(FailureDetail::at(0, row.alpha, format!("alpha_{l} is not 0 mod p^{}", row.modulus_exponent)));
        }
        if let Some((n, c)) = &row.residual_c {
            out.fail(FailureDetail::at(*n, c, format!("L_C - gamma_{l} uC0 is nonzero")));
        }
        if let Some((n, c)) = &row.residual_u {
            out.fail(FailureDetail::at(*n, c, format!("L_u - beta_{l} uC0 is nonzero")));
        }
        if row.reach() < 5 * p {
            out.fail(FailureDetail::message(format!(
                "residual for l={l} only known through q^{}; need q^{}",
                row.reach(),
                5 * p
            )));
        }
    }
    Ok(out)
}

impl Check for ClosureScalars {
    fn id(&self) -> CheckId {
        CheckId::ClosureScalars
    }
    fn summary(&self) -> &'static str {
        "g Λ_p(f U_p^l)/p^l lies on the uC0 line for f = C0, uC0"
    }
    fn domain(&self) -> Domain {
        Domain::Split
    }
    fn run(&self, lab: &Lab, spec: &CheckSpec) -> anyhow::Result<Outcome> {
        let (_, any) = artifacts(lab, spec)?;
        with_artifacts!(&any, |a| closure_outcome(a, spec))
    }
}

/// `γ_l - 27 β_l ≡ 0 mod p^{4-l}`.
pub struct BridgeCancellation;

fn bridge_outcome<R: PadicRing>(a: &Artifacts<R>, spec: &CheckSpec) -> anyhow::Result<Outcome> {
    let ells = spec.ells();
    let mut out = Outcome::new("p^(4-l)");
    out.ells = ells.clone();
    for row in a.closure()?.iter().filter(|r| ells.contains(&r.ell)) {
        let l = row.ell;
        let modulus = (a.ctx.p as i64).pow(row.modulus_exponent);
        let d = row.gamma as i64 - 27 * row.beta as i64;
        out.witness(format!("gamma_{l}"), row.gamma as i64);
        out.witness(format!("beta_{l}"), row.beta as i64);
        out.witness(format!("bridge_{l}"), d);
        out.reach(l as i64);
        if d.rem_euclid(modulus) != 0 {
            out.fail(FailureDetail::at(
                l as i64,
                d.rem_euclid(modulus),
                format!("gamma_{l} - 27 beta_{l} is not 0 mod p^{}", row.modulus_exponent),
            ));
        }
    }
    Ok(out)
}

impl Check for BridgeCancellation {
    fn id(&self) -> CheckId {
        CheckId::BridgeCancellation
    }
    fn summary(&self) -> &'static str {
        "gamma_l - 27 beta_l vanishes mod p^(4-l)"
    }
    fn domain(&self) -> Domain {
        Domain::Split
    }
    fn run(&self, lab: &Lab, spec: &CheckSpec) -> anyhow::Result<Outcome> {
        let (_, any) = artifacts(lab, spec)?;
        with_artifacts!(&any, |a| bridge_outcome(a, spec))
    }
}
