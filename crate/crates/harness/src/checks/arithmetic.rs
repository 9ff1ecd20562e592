//! Checks that need only integer sequences and divisor sums.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use qcartier_core::ring::split_p_power;
use qcartier_core::sequence::{beta_at, branch_coefficient, c_mix_at, chi3, BranchSelector};
use qcartier_core::PrimeContext;

use super::prime_of;
use crate::lab::Lab;
use crate::registry::{Check, Domain};
use crate::report::{CheckId, CheckSpec, FailureDetail, Outcome};

fn modp(x: &BigInt, modulus: &BigInt) -> BigInt {
    x.mod_floor(modulus)
}

fn small(x: &BigInt) -> i64 {
    x.to_i64().unwrap_or(i64::MAX)
}

/// `v_p(x)`, with `-1` standing for `x = 0`.
fn valuation(x: &BigInt, p: u64) -> i64 {
    if x.is_zero() {
        -1
    } else {
        split_p_power(x, p).0 as i64
    }
}

/// `A_{mp} ≡ A_m mod p^4` for `m = 1..=m_max`.
pub struct MainSupercongruence;

impl Check for MainSupercongruence {
    fn id(&self) -> CheckId {
        CheckId::MainSupercongruence
    }
    fn summary(&self) -> &'static str {
        "A_(mp) agrees with A_m mod p^4"
    }
    fn domain(&self) -> Domain {
        Domain::AnyPrime
    }
    fn scheduled_for(&self, prime: Option<u64>) -> bool {
        Domain::Split.accepts(prime).is_ok()
    }
    fn run(&self, lab: &Lab, spec: &CheckSpec) -> anyhow::Result<Outcome> {
        let p = prime_of(spec)?;
        let m_max = spec.params.m_max.unwrap_or(20);
        let seq = lab.sequences(m_max * p as usize)?;
        let modulus = BigInt::from(p).pow(4);
        let mut out = Outcome::new("p^4");
        out.witness("m_max", m_max as i64);
        for m in 1..=m_max {
            let d = seq.a(m * p as usize) - seq.a(m);
            if m == 1 {
                out.witness("a_p_mod_p4", small(&modp(seq.a(p as usize), &modulus)));
            }
            out.reach((m * p as usize) as i64);
            let r = modp(&d, &modulus);
            if !r.is_zero() {
                out.fail(FailureDetail::at(m as i64, r, format!("A_{} - A_{m} is nonzero mod p^4", m * p as usize)));
            }
        }
        Ok(out)
    }
}

/// `c_{mp^r} ≡ c_{mp^{r-1}} mod p^{4r}`, including indices `m` divisible by `p`.
pub struct SplitTower;

impl Check for SplitTower {
    fn id(&self) -> CheckId {
        CheckId::SplitTower
    }
    fn summary(&self) -> &'static str {
        "the Eisenstein coefficients c_n form a p^(4r) tower"
    }
    fn domain(&self) -> Domain {
        Domain::Split
    }
    fn run(&self, _lab: &Lab, spec: &CheckSpec) -> anyhow::Result<Outcome> {
        let p = prime_of(spec)?;
        let m_max = spec.params.m_max.unwrap_or(10) as u64;
        let r_max = spec.params.r_max.unwrap_or(2);
        let mut ms: Vec<u64> = (1..=m_max).collect();
        if !ms.contains(&p) {
            ms.push(p);
        }
        let mut out = Outcome::new("p^(4r)");
        for r in 1..=r_max {
            let mut min_v = i64::MAX;
            for &m in &ms {
                let hi = m * p.pow(r);
                let d = c_mix_at(hi) - c_mix_at(hi / p);
                let v = valuation(&d, p);
                if v >= 0 {
                    min_v = min_v.min(v);
                }
                out.reach(hi as i64);
                if v >= 0 && v < 4 * r as i64 {
                    out.fail(FailureDetail::at(m as i64, v, format!("v_p(c_(mp^{r}) - c_(mp^{})) = {v} < {}", r - 1, 4 * r)));
                }
            }
            out.witness(format!("min_valuation_{r}"), if min_v == i64::MAX { -1 } else { min_v });
        }
        Ok(out)
    }
}

/// `v_p(c_{mp} - c_m) = 0` whenever `p ∤ beta(m0)` for `m = p^a m0`, and
/// `beta(p) - beta(1) = p^4 - 2`.
pub struct InertObstruction;

impl Check for InertObstruction {
    fn id(&self) -> CheckId {
        CheckId::InertObstruction
    }
    fn summary(&self) -> &'static str {
        "c_(mp) - c_m is a p-adic unit at inert p"
    }
    fn domain(&self) -> Domain {
        Domain::Inert
    }
    fn run(&self, _lab: &Lab, spec: &CheckSpec) -> anyhow::Result<Outcome> {
        let p = prime_of(spec)?;
        let m_max = spec.params.m_max.unwrap_or(10) as u64;
        let mut out = Outcome::new("p");
        let gap = beta_at(p) - beta_at(1);
        out.witness("beta_p_minus_beta_1", small(&gap));
        if gap != BigInt::from(p).pow(4) - 2 {
            out.fail(FailureDetail::at(p as i64, &gap, "beta(p) - beta(1) differs from p^4 - 2"));
        }
        let (mut tested, mut excluded) = (0, 0);
        for m in 1..=m_max {
            let mut m0 = m;
            while m0 % p == 0 {
                m0 /= p;
            }
            if (beta_at(m0) % BigInt::from(p)).is_zero() {
                excluded += 1;
                continue;
            }
            let d = c_mix_at(m * p) - c_mix_at(m);
            let v = valuation(&d, p);
            if m == 1 {
                out.witness("v_c_p_minus_c_1", v);
            }
            tested += 1;
            out.reach((m * p) as i64);
            if v != 0 {
                out.fail(FailureDetail::at(m as i64, v, format!("v_p(c_{} - c_{m}) = {v}", m * p)));
            }
        }
        out.witness("tested", tested);
        out.witness("excluded", excluded);
        Ok(out)
    }
}

/// `A_{mp^r} ≡ A_m^(chi3(p)^r) mod p`, the branch coefficients being read
/// off `(C0 - 27 eps uC0) H_mix^m`.
pub struct InertParity;

impl Check for InertParity {
    fn id(&self) -> CheckId {
        CheckId::InertParity
    }
    fn summary(&self) -> &'static str {
        "A_(mp^r) follows the branch A_m^(chi3(p)^r) mod p"
    }
    fn domain(&self) -> Domain {
        Domain::Inert
    }
    fn run(&self, lab: &Lab, spec: &CheckSpec) -> anyhow::Result<Outcome> {
        let p = prime_of(spec)?;
        let chi = PrimeContext::new(p)?.chi3;
        let m_max = spec.params.m_max.unwrap_or(3);
        let r_max = spec.params.r_max.unwrap_or(2);
        let seq = lab.sequences(m_max * (p as usize).pow(r_max))?;
        let dict = lab.integer_dictionary(m_max + 1)?;
        let pb = BigInt::from(p);
        let mut out = Outcome::new("p");
        for m in 1..=m_max {
            for eps in [BranchSelector::Plus, BranchSelector::Minus] {
                let b = branch_coefficient(m, eps, &dict)?;
                let tag = if eps == BranchSelector::Plus { "plus" } else { "minus" };
                out.witness(format!("branch_{tag}_{m}"), small(&b));
            }
        }
        for r in 1..=r_max {
            let eps = BranchSelector::from_sign(chi.pow(r));
            for m in 1..=m_max {
                let n = m * (p as usize).pow(r);
                let branch = branch_coefficient(m, eps, &dict)?;
                let d = modp(&(seq.a(n) - &branch), &pb);
                out.reach(n as i64);
                if !d.is_zero() {
                    out.fail(FailureDetail::at(n as i64, d, format!("A_{n} differs from A_{m}^({}) mod p", eps.epsilon())));
                }
            }
        }
        Ok(out)
    }
}

/// `A_p ≡ 72 = A_1^(-1) mod p` and `v_p(A_p - 18) = 0` at inert `p`.
pub struct InertAp72;

impl Check for InertAp72 {
    fn id(&self) -> CheckId {
        CheckId::InertAp72
    }
    fn summary(&self) -> &'static str {
        "A_p is 72 mod p, so A_p - A_1 is a p-adic unit"
    }
    fn domain(&self) -> Domain {
        Domain::Inert
    }
    fn run(&self, lab: &Lab, spec: &CheckSpec) -> anyhow::Result<Outcome> {
        let p = prime_of(spec)?;
        let seq = lab.sequences(p as usize)?;
        let dict = lab.integer_dictionary(4)?;
        let minus_1 = branch_coefficient(1, BranchSelector::Minus, &dict)?;
        let pb = BigInt::from(p);
        let a_p = seq.a(p as usize);
        let mut out = Outcome::new("p");
        out.reach(p as i64);
        out.witness("branch_minus_1", small(&minus_1));
        out.witness("a_p_mod_p", small(&modp(a_p, &pb)));
        if minus_1 != BigInt::from(72) {
            out.fail(FailureDetail::at(1, &minus_1, "A_1^(-1) is not 72"));
        }
        if !modp(&(a_p - 72), &pb).is_zero() {
            out.fail(FailureDetail::at(p as i64, modp(a_p, &pb), "A_p is not 72 mod p"));
        }
        let v = valuation(&(a_p - 18), p);
        out.witness("v_a_p_minus_18", v);
        if v != 0 {
            out.fail(FailureDetail::at(p as i64, v, "A_p - 18 is divisible by p"));
        }
        Ok(out)
    }
}

/// `p | A_{p-1}` for split `p` in `[7, split_max]` and `p ∤ A_{p-1}` for
/// inert `p` in `[5, inert_max]`.
pub struct MumSignature;

impl Check for MumSignature {
    fn id(&self) -> CheckId {
        CheckId::MumSignature
    }
    fn summary(&self) -> &'static str {
        "p divides A_(p-1) exactly at the split primes"
    }
    fn domain(&self) -> Domain {
        Domain::Global
    }
    fn run(&self, lab: &Lab, spec: &CheckSpec) -> anyhow::Result<Outcome> {
        let split_max = spec.params.split_max.unwrap_or(97);
        let inert_max = spec.params.inert_max.unwrap_or(83);
        let top = split_max.max(inert_max).max(5);
        let seq = lab.sequences(top as usize)?;
        let mut out = Outcome::new("p");
        let (mut split, mut inert) = (0, 0);
        for p in (5..=top).filter(|&p| qcartier_core::ring::is_prime(p)) {
            let divides = (seq.a(p as usize - 1) % BigInt::from(p)).is_zero();
            if chi3(p) == 1 && p >= 7 && p <= split_max {
                split += 1;
                out.reach(p as i64 - 1);
                if !divides {
                    out.fail(FailureDetail::at(p as i64 - 1, p, format!("split p={p} does not divide A_(p-1)")));
                }
            } else if chi3(p) == -1 && p <= inert_max {
                inert += 1;
                out.reach(p as i64 - 1);
                if divides {
                    out.fail(FailureDetail::at(p as i64 - 1, p, format!("inert p={p} divides A_(p-1)")));
                }
            }
        }
        out.witness("split_primes", split);
        out.witness("inert_primes", inert);
        Ok(out)
    }
}
