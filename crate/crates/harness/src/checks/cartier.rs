use qcartier_core::frobenius::{finite_difference_numerator, verschiebung_remainder};
use qcartier_core::{PadicRing, Series, Valuation};

use super::{artifacts, coeff_mod, valuation_witness};
use crate::lab::{Artifacts, Lab};
use crate::registry::{Check, Domain};
use crate::report::{CheckId, CheckSpec, FailureDetail, Outcome};
use crate::with_artifacts;

/// `Λ_p(C_mix U_p^l) ≡ 0 mod p^4`, with `C0` at `l = 1` as a negative control
/// that must fail.
pub struct MixedCartierCancellation;

fn mixed_outcome<R: PadicRing>(a: &Artifacts<R>, spec: &CheckSpec) -> anyhow::Result<Outcome> {
    let k = a.ctx.modulus_exponent;
    let powers = a.u_powers()?;
    let ring = powers[0].ring();
    let c_mix = a.dict.c_mix().coarsen(ring)?;
    let mut out = Outcome::new("p^4");
    out.ells = spec.ells();
    for &l in &out.ells.clone() {
        let lam = c_mix.mul_cartier(&powers[l as usize - 1], a.ctx.p)?;
        out.reach(lam.precision() - 1);
        if let Some(n) = lam.first_nonvanishing(k)? {
            out.fail(FailureDetail::at(n, coeff_mod(&lam, n, k)?, format!("Λ_p(C_mix U^{l}) is nonzero mod p^4")));
        }
    }
    let control = a.dict.c0().coarsen(ring)?.mul_cartier(&powers[0], a.ctx.p)?;
    match control.first_nonvanishing(k)? {
        Some(n) => {
            out.witness("control_index", n);
            out.witness("control_residue", coeff_mod(&control, n, k)?);
        }
        None => out.fail(FailureDetail::message("negative control Λ_p(C0 U) vanished mod p^4")),
    }
    Ok(out)
}

impl Check for MixedCartierCancellation {
    fn id(&self) -> CheckId {
        CheckId::MixedCartierCancellation
    }
    fn summary(&self) -> &'static str {
        "Λ_p(C_mix U_p^l) vanishes mod p^4"
    }
    fn domain(&self) -> Domain {
        Domain::Split
    }
    fn run(&self, lab: &Lab, spec: &CheckSpec) -> anyhow::Result<Outcome> {
        let (_, any) = artifacts(lab, spec)?;
        with_artifacts!(&any, |a| mixed_outcome(a, spec))
    }
}

/// `F_r = Λ_p(C_mix / t^{rp}) - C_mix / t^r ≡ 0 mod p^4` for `r = 1..=r_max`.
pub struct LayerDefectEquivalence;

fn layer_defect_outcome<R: PadicRing>(a: &Artifacts<R>, spec: &CheckSpec) -> anyhow::Result<Outcome> {
    let p = a.ctx.p;
    let k = a.ctx.modulus_exponent;
    let r_max = spec.params.r_max.unwrap_or(3);
    let t_inv = a.dict.t().invert()?;
    let t_inv_p = t_inv.pow(p as i64)?;
    let c_mix = a.dict.c_mix();
    let mut out = Outcome::new("p^4");
    let (mut pole, mut pole_p) = (c_mix.clone(), c_mix.clone());
    for r in 1..=r_max {
        let order = (r as u64 * p) as usize;
        if order > a.ctx.pole_cap {
            anyhow::bail!("pole order {order} exceeds the cap {}", a.ctx.pole_cap);
        }
        pole = pole.mul(&t_inv)?;
        let lam = pole_p.mul_cartier(&t_inv_p, p)?;
        pole_p = pole_p.mul(&t_inv_p)?;
        let f_r = lam.sub(&pole)?;
        out.witness(format!("lambda_pole_{r}"), -lam.lowest_exponent().min(0));
        out.reach(f_r.precision() - 1);
        if let Some(n) = f_r.first_nonvanishing(k)? {
            out.fail(FailureDetail::at(n, coeff_mod(&f_r, n, k)?, format!("F_{r} is nonzero mod p^4")));
        }
    }
    Ok(out)
}

impl Check for LayerDefectEquivalence {
    fn id(&self) -> CheckId {
        CheckId::LayerDefectEquivalence
    }
    fn summary(&self) -> &'static str {
        "Λ_p(C_mix/t^(rp)) agrees with C_mix/t^r mod p^4"
    }
    fn domain(&self) -> Domain {
        Domain::Split
    }
    fn run(&self, lab: &Lab, spec: &CheckSpec) -> anyhow::Result<Outcome> {
        let (_, any) = artifacts(lab, spec)?;
        with_artifacts!(&any, |a| layer_defect_outcome(a, spec))
    }
}

/// `phi_p = σ_p t / t^p - 1` lies in `p q Z_(p)[[q]]` through `q^{5p^2}`.
pub struct LayerDivisibility;

fn divisibility_outcome<R: PadicRing>(a: &Artifacts<R>) -> anyhow::Result<Outcome> {
    let p = a.ctx.p;
    let phi = &a.defects()?.phi_p;
    let target = a.ctx.default_precision as i64;
    let mut out = Outcome::new("p");
    out.reach(phi.precision() - 1);
    if phi.coeff(0).is_some_and(|c| !phi.ring().is_zero(&c)) {
        out.fail(FailureDetail::at(0, phi.ring().to_repr(&phi.coeff(0).unwrap()), "phi_p has a constant term"));
    }
    for (n, c) in phi.terms() {
        if phi.ring().valuation(c, p)? == Valuation::Finite(0) {
            out.fail(FailureDetail::at(n, phi.ring().to_repr(c), "coefficient of phi_p is a p-adic unit"));
            break;
        }
    }
    out.witness("min_valuation", valuation_witness(phi.p_valuation(p)?));
    out.witness("lowest_exponent", phi.lowest_exponent());
    if phi.precision() - 1 < target {
        out.fail(FailureDetail::message(format!(
            "phi_p only known through q^{}; need q^{target}",
            phi.precision() - 1
        )));
    }
    Ok(out)
}

impl Check for LayerDivisibility {
    fn id(&self) -> CheckId {
        CheckId::LayerDivisibility
    }
    fn summary(&self) -> &'static str {
        "phi_p is divisible by p q coefficientwise"
    }
    fn domain(&self) -> Domain {
        Domain::AnyPrime
    }
    fn scheduled_for(&self, prime: Option<u64>) -> bool {
        Domain::Split.accepts(prime).is_ok()
    }
    fn run(&self, lab: &Lab, spec: &CheckSpec) -> anyhow::Result<Outcome> {
        let (_, any) = artifacts(lab, spec)?;
        with_artifacts!(&any, |a| divisibility_outcome(a))
    }
}

/// `min v_p(N_l(f)) = l` exactly, together with the exact split
/// `N_l = Λ_p(f phi^l) + chi3(p) p^4 𝒱_l`.
pub struct NumeratorSaturation;

fn saturation_outcome<R: PadicRing>(a: &Artifacts<R>, spec: &CheckSpec) -> anyhow::Result<Outcome> {
    let ctx = &a.ctx;
    let p = ctx.p;
    let phi = &a.defects()?.phi_p;
    let mut out = Outcome::new("p^l");
    out.ells = spec.ells();
    let weight = a.dict.c0().ring().from_i64(ctx.chi3 * (p as i64).pow(4));
    for (name, f) in [("C0", a.dict.c0()), ("uC0", a.dict.uc0())] {
        let mut phi_power = Series::one(phi.ring().clone(), phi.precision());
        let mut ell_done = 0;
        for &l in &out.ells.clone() {
            while ell_done < l {
                phi_power = phi_power.mul(phi)?;
                ell_done += 1;
            }
            let n = finite_difference_numerator(f, &a.dict, ctx, l)?;
            let v = n.p_valuation(p)?;
            out.witness(format!("v_{name}_{l}"), valuation_witness(v));
            out.reach(n.precision() - 1);
            if v != Valuation::Finite(l) {
                out.fail(FailureDetail::message(format!("min v_p(N_{l}({name})) is {v}, expected {l}")));
            }
            let rem = verschiebung_remainder(f, &a.dict, ctx, l)?;
            out.witness(format!("vrem_{name}_{l}"), valuation_witness(rem.p_valuation(p)?));
            let split = f.mul_cartier(&phi_power, p)?.add(&rem.scale(&weight))?;
            if let Some(m) = n.first_mismatch(&split)? {
                let c = n.coeff(m).unwrap_or_else(|| n.ring().zero());
                out.fail(FailureDetail::at(
                    m,
                    n.ring().to_repr(&c),
                    format!("N_{l}({name}) differs from Λ_p(f phi^{l}) + chi3 p^4 V_{l}"),
                ));
            }
        }
    }
    Ok(out)
}

impl Check for NumeratorSaturation {
    fn id(&self) -> CheckId {
        CheckId::NumeratorSaturation
    }
    fn summary(&self) -> &'static str {
        "the finite-difference numerators N_l have valuation exactly l"
    }
    fn domain(&self) -> Domain {
        Domain::Split
    }
    fn run(&self, lab: &Lab, spec: &CheckSpec) -> anyhow::Result<Outcome> {
        let (_, any) = artifacts(lab, spec)?;
        with_artifacts!(&any, |a| saturation_outcome(a, spec))
    }
}

/// Report-only: `[q^n] Λ_p(C_mix U_p^l)` against `[q^n] Λ_p(C0 V_p^l)` mod `p^4`.
pub struct TransportDiagnostic;

fn transport_outcome<R: PadicRing>(a: &Artifacts<R>, spec: &CheckSpec) -> anyhow::Result<Outcome> {
    let p = a.ctx.p;
    let k = a.ctx.modulus_exponent;
    let n_max = spec.params.n_max.unwrap_or(5) as i64;
    let d = a.defects()?;
    let u_powers = a.u_powers()?;
    let ring = d.ring();
    let c_mix = a.dict.c_mix().coarsen(ring)?;
    let c0 = a.dict.c0().coarsen(ring)?;
    let mut out = Outcome::new("p^4");
    out.ells = spec.ells();
    let mut v_power = Series::one(ring.clone(), d.v_p.precision());
    let mut done = 0;
    for &l in &out.ells.clone() {
        while done < l {
            v_power = v_power.mul(&d.v_p)?;
            done += 1;
        }
        let lhs = c_mix.mul_cartier(&u_powers[l as usize - 1], p)?;
        let rhs = c0.mul_cartier(&v_power, p)?;
        let reach = lhs.precision().min(rhs.precision()) - 1;
        if n_max > reach {
            out.skipped = true;
            out.note = Some(format!("n_max={n_max} is beyond the available q^{reach}"));
            return Ok(out);
        }
        let mut mismatches = 0;
        for n in 1..=n_max {
            let (x, y) = (coeff_mod(&lhs, n, k)?, coeff_mod(&rhs, n, k)?);
            if n == 1 {
                out.witness(format!("lhs_{l}_1"), x);
                out.witness(format!("rhs_{l}_1"), y);
            }
            if x != y {
                mismatches += 1;
                out.fail(FailureDetail::at(n, y, format!("transport mismatch at l={l}")));
            }
        }
        out.witness(format!("mismatches_{l}"), mismatches);
        out.reach(n_max);
    }
    Ok(out)
}

impl Check for TransportDiagnostic {
    fn id(&self) -> CheckId {
        CheckId::TransportDiagnostic
    }
    fn summary(&self) -> &'static str {
        "conditional transport of Cartier coefficients from C_mix U^l to C0 V^l (report only)"
    }
    fn domain(&self) -> Domain {
        Domain::Split
    }
    fn run(&self, lab: &Lab, spec: &CheckSpec) -> anyhow::Result<Outcome> {
        let (_, any) = artifacts(lab, spec)?;
        with_artifacts!(&any, |a| transport_outcome(a, spec))
    }
}
