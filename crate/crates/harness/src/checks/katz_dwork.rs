use qcartier_core::{PadicRing, Series};

use super::{artifacts, coeff_mod};
use crate::lab::{Artifacts, Lab};
use crate::registry::{Check, Domain};
use crate::report::{CheckId, CheckSpec, FailureDetail, Outcome};
use crate::with_artifacts;

/// `Λ_p(C_mix H^{pm}) ≡ C_mix H^m mod p^4` for `m = 1..=m_max`.
///
/// The direct product is the gate. The truncated expansion
/// `H^m sum_{l<=3} (-m)^l/l! Λ_p(C_mix U^l)` is computed alongside and its
/// agreement is reported as the `x_route_m` witness.
pub struct ScalarKatzDwork;

fn x_route<R: PadicRing>(lams: &[Series<R>], h_m: &Series<R>, m: i64) -> anyhow::Result<Series<R>> {
    let ring = lams[0].ring().clone();
    let mut sum = Series::zero(ring.clone(), lams[0].precision());
    let mut coefficient = ring.one();
    for (l, lam) in lams.iter().enumerate() {
        if l > 0 {
            let step = ring.mul(&ring.from_i64(-m), &ring.inv(&ring.from_i64(l as i64)).expect("l < p is a unit"));
            coefficient = ring.mul(&coefficient, &step);
        }
        sum = sum.add(&lam.scale(&coefficient))?;
    }
    Ok(h_m.coarsen(&ring)?.mul(&sum)?)
}

fn katz_dwork_outcome<R: PadicRing>(a: &Artifacts<R>, spec: &CheckSpec) -> anyhow::Result<Outcome> {
    let p = a.ctx.p;
    let k = a.ctx.modulus_exponent;
    let m_max = spec.params.m_max.unwrap_or(3) as i64;
    let h = a.dict.h_mix();
    let c_mix = a.dict.c_mix();
    let h_p = h.pow(p as i64)?;

    let powers = a.u_powers()?;
    let u_ring = powers[0].ring();
    let c_mix_u = c_mix.coarsen(u_ring)?;
    let mut lams = vec![c_mix_u.cartier(p)];
    for u in powers {
        lams.push(c_mix_u.mul_cartier(u, p)?);
    }

    let mut out = Outcome::new("p^4");
    let mut h_pm = Series::one(h.ring().clone(), h.precision());
    let mut h_m = h_pm.clone();
    for m in 1..=m_max {
        h_pm = h_pm.mul(&h_p)?;
        h_m = h_m.mul(h)?;
        let lhs = c_mix.mul_cartier(&h_pm, p)?;
        let rhs = c_mix.mul(&h_m)?.truncated(lhs.precision());
        out.reach(lhs.precision() - 1);
        if let Some(n) = lhs.first_incongruence(&rhs, k)? {
            out.fail(FailureDetail::at(
                n,
                coeff_mod(&lhs.sub(&rhs)?, n, k)?,
                format!("Λ_p(C_mix H^(pm)) differs from C_mix H^m at m={m}"),
            ));
        }
        if m < lhs.precision() {
            out.witness(format!("a_{m}p_mod_p4"), coeff_mod(&lhs, m, k)?);
        }
        let x = x_route(&lams, &h_m, m)?;
        let agrees = x.first_incongruence(&rhs.coarsen(x.ring())?, k)?.is_none();
        out.witness(format!("x_route_{m}"), agrees as i64);
    }
    Ok(out)
}

impl Check for ScalarKatzDwork {
    fn id(&self) -> CheckId {
        CheckId::ScalarKatzDwork
    }
    fn summary(&self) -> &'static str {
        "Λ_p(C_mix H^(pm)) agrees with C_mix H^m mod p^4"
    }
    fn domain(&self) -> Domain {
        Domain::Split
    }
    fn run(&self, lab: &Lab, spec: &CheckSpec) -> anyhow::Result<Outcome> {
        let (_, any) = artifacts(lab, spec)?;
        with_artifacts!(&any, |a| katz_dwork_outcome(a, spec))
    }
}
