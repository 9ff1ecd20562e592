//! Level-3 modular q-expansions: eta quotients, the hexagonal theta series,
//! weight-5 Eisenstein series with characters mod 3, and the dictionary of
//! named objects built from them.
//!
//! Whenever an object has two independent formulas, [`build_dictionary`]
//! evaluates both and refuses to return if they disagree.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ring::{Integers, Ring};
use crate::sequence::divisor_sums;
use crate::series::{Series, SeriesError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModularError {
    #[error("eta quotient has non-integral leading power {numerator}/24")]
    NonIntegralLeadingPower { numerator: i64 },
    #[error("eta quotient factor has scale 0")]
    ZeroScale,
    #[error("unsupported character pair ({0}, {1})")]
    UnsupportedCharacters(DirichletCharacterMod3, DirichletCharacterMod3),
    #[error("3 is not invertible in the coefficient ring")]
    ThreeNotInvertible,
    #[error("precision {0} is too small for the dictionary (need >= 4)")]
    PrecisionTooSmall(i64),
    #[error("{object}: {left} and {right} disagree at q^{exponent}")]
    DualMismatch {
        object: ModularObjectName,
        left: Construction,
        right: Construction,
        exponent: i64,
    },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// `prod eta(d tau)^e`, leading power `sum d e / 24`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EtaQuotientSpec {
    pub factors: Vec<(u64, i64)>,
}

impl EtaQuotientSpec {
    pub fn new(factors: &[(u64, i64)]) -> Self {
        Self { factors: factors.to_vec() }
    }

    /// `24 ×` the leading q-power.
    pub fn leading_power_numerator(&self) -> i64 {
        self.factors.iter().map(|(d, e)| *d as i64 * e).sum()
    }

    pub fn leading_power(&self) -> Result<i64, ModularError> {
        let num = self.leading_power_numerator();
        if num % 24 != 0 {
            return Err(ModularError::NonIntegralLeadingPower { numerator: num });
        }
        Ok(num / 24)
    }

    /// `eta(3 tau)^12 / eta(tau)^12`.
    pub fn hauptmodul() -> Self {
        Self::new(&[(3, 12), (1, -12)])
    }

    /// `eta(tau)^3 / eta(3 tau)`.
    pub fn theta_b() -> Self {
        Self::new(&[(1, 3), (3, -1)])
    }

    /// `eta(3 tau)^9 / eta(tau)^3`; the cubed `D` theta series is 27 times this.
    pub fn theta_d_cube_over_27() -> Self {
        Self::new(&[(3, 9), (1, -3)])
    }
}

/// `prod_{n>=1} prod_{(d,e)} (1 - q^{dn})^e` through `q^{terms-1}`, by one
/// sparse pass per binomial factor.
pub fn euler_product<R: Ring>(ring: &R, factors: &[(u64, i64)], terms: usize) -> Result<Vec<R::Elem>, ModularError> {
    let mut a = vec![ring.zero(); terms];
    if terms == 0 {
        return Ok(a);
    }
    a[0] = ring.one();
    for &(d, e) in factors {
        if d == 0 {
            return Err(ModularError::ZeroScale);
        }
        let d = d as usize;
        for m in (d..terms).step_by(d) {
            for _ in 0..e.unsigned_abs() {
                if e > 0 {
                    for i in (m..terms).rev() {
                        a[i] = ring.sub(&a[i], &a[i - m]);
                    }
                } else {
                    for i in m..terms {
                        a[i] = ring.add(&a[i], &a[i - m]);
                    }
                }
            }
        }
    }
    Ok(a)
}

/// Expansion of an eta quotient known through `q^{precision-1}`.
pub fn eta_quotient<R: Ring>(spec: &EtaQuotientSpec, precision: i64, ring: R) -> Result<Series<R>, ModularError> {
    let lead = spec.leading_power()?;
    let terms = (precision - lead).max(0) as usize;
    let coeffs = euler_product(&ring, &spec.factors, terms)?;
    Ok(Series::new(ring, lead, coeffs, lead + terms as i64)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DirichletCharacterMod3 {
    Chi0,
    Chi3,
}

impl DirichletCharacterMod3 {
    /// Value as a character modulo 3 (so `chi0(3) = 0`).
    pub fn value(self, n: i64) -> i64 {
        match (self, n.rem_euclid(3)) {
            (_, 0) => 0,
            (Self::Chi0, _) => 1,
            (Self::Chi3, 1) => 1,
            (Self::Chi3, _) => -1,
        }
    }

    /// Value of the underlying primitive character: `chi0` becomes the
    /// constant 1. Eisenstein coefficients use this form.
    pub fn primitive_value(self, n: i64) -> i64 {
        match self {
            Self::Chi0 => 1,
            Self::Chi3 => self.value(n),
        }
    }
}

impl fmt::Display for DirichletCharacterMod3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Chi0 => "chi0",
            Self::Chi3 => "chi3",
        })
    }
}

/// `sum_{m,n} q^{m^2+mn+n^2}` through `q^{precision-1}`.
pub fn theta_a<R: Ring>(precision: i64, ring: R) -> Result<Series<R>, ModularError> {
    let n = precision.max(0);
    let mut counts = vec![0i64; n as usize];
    // m^2+mn+n^2 = (m+n/2)^2 + 3n^2/4, so |n| (and by symmetry |m|) <= sqrt(4N/3)
    let bound = (4.0 * n as f64 / 3.0).sqrt().ceil() as i64;
    for a in -bound..=bound {
        for b in -bound..=bound {
            let v = a * a + a * b + b * b;
            if v < n {
                counts[v as usize] += 1;
            }
        }
    }
    Ok(Series::from_i64s(ring, 0, &counts, n)?)
}

/// `E_{5,chi,psi} = c_0 + sum_n (sum_{d|n} chi(n/d) psi(d) d^4) q^n`.
///
/// `chi` acts on the complementary divisor `n/d` and `psi` on `d`; this is the
/// reverse of the argument order used by PARI/GP's `mfeisenstein`. Both
/// characters enter through their primitive versions, so
/// `E_{5,chi3,chi0} = q + 15q^2 + 81q^3 + ...`. The constant term is `1/3` for
/// `(chi0, chi3)` and `0` for `(chi3, chi0)`.
pub fn eisenstein_5<R: Ring>(
    chi: DirichletCharacterMod3,
    psi: DirichletCharacterMod3,
    precision: i64,
    ring: R,
) -> Result<Series<R>, ModularError> {
    use DirichletCharacterMod3::*;
    let constant = match (chi, psi) {
        (Chi0, Chi3) => ring.inv(&ring.from_i64(3)).ok_or(ModularError::ThreeNotInvertible)?,
        (Chi3, Chi0) => ring.zero(),
        _ => return Err(ModularError::UnsupportedCharacters(chi, psi)),
    };
    let sums = twisted_divisor_sums(chi, psi, precision.max(1) as usize);
    let mut coeffs = Vec::with_capacity(sums.len());
    coeffs.push(constant);
    coeffs.extend(sums[1..].iter().map(|v| ring.from_bigint(&BigInt::from(*v))));
    Ok(Series::new(ring, 0, coeffs, precision)?)
}

/// `3 E_{5,chi0,chi3} = 1 + 3 sum s(n) q^n`, integral in every ring.
pub fn c0_eisenstein<R: Ring>(precision: i64, ring: R) -> Result<Series<R>, ModularError> {
    let (s, _) = divisor_sums(precision.max(1) as usize);
    let coeffs = (0..precision.max(0) as usize)
        .map(|n| if n == 0 { ring.one() } else { ring.from_bigint(&BigInt::from(3 * s[n])) })
        .collect();
    Ok(Series::new(ring, 0, coeffs, precision)?)
}

fn twisted_divisor_sums(chi: DirichletCharacterMod3, psi: DirichletCharacterMod3, terms: usize) -> Vec<i128> {
    let mut out = vec![0i128; terms];
    for d in 1..terms {
        let pd = psi.primitive_value(d as i64) as i128;
        if pd == 0 {
            continue;
        }
        let d4 = (d as i128).pow(4);
        for (k, n) in (d..terms).step_by(d).enumerate() {
            out[n] += chi.primitive_value(k as i64 + 1) as i128 * pd * d4;
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModularObjectName {
    U,
    G,
    Alpha,
    T,
    HMix,
    ThetaA,
    ThetaB,
    /// `D^3 = 27 eta(3 tau)^9 / eta(tau)^3`; `D` itself starts at `q^{1/3}`.
    ThetaDCube,
    C0,
    UC0,
    CMix,
    E5Chi0Chi3,
    E5Chi3Chi0,
}

impl ModularObjectName {
    pub const ALL: [ModularObjectName; 13] = [
        Self::U,
        Self::G,
        Self::Alpha,
        Self::T,
        Self::HMix,
        Self::ThetaA,
        Self::ThetaB,
        Self::ThetaDCube,
        Self::C0,
        Self::UC0,
        Self::CMix,
        Self::E5Chi0Chi3,
        Self::E5Chi3Chi0,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::U => "u",
            Self::G => "g",
            Self::Alpha => "alpha",
            Self::T => "t",
            Self::HMix => "H_mix",
            Self::ThetaA => "ThetaA",
            Self::ThetaB => "ThetaB",
            Self::ThetaDCube => "ThetaD^3",
            Self::C0 => "C0",
            Self::UC0 => "uC0",
            Self::CMix => "C_mix",
            Self::E5Chi0Chi3 => "E5_chi0_chi3",
            Self::E5Chi3Chi0 => "E5_chi3_chi0",
        }
    }

    /// Recipe used for the stored copy of this object.
    pub fn primary_construction(self) -> Construction {
        match self {
            Self::U | Self::ThetaB | Self::ThetaDCube => Construction::EtaQuotient,
            Self::G | Self::Alpha | Self::T | Self::UC0 | Self::CMix => Construction::Arithmetic,
            Self::HMix => Construction::Inversion,
            Self::ThetaA => Construction::LatticeSum,
            Self::C0 | Self::E5Chi0Chi3 | Self::E5Chi3Chi0 => Construction::DivisorSum,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|n| n.as_str().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for ModularObjectName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which recipe produced a dictionary entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Construction {
    EtaQuotient,
    LatticeSum,
    DivisorSum,
    /// Ring operations on other dictionary entries.
    Arithmetic,
    Inversion,
    ProductFormula,
    ThetaProduct,
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModularObject<R: Ring> {
    pub name: ModularObjectName,
    pub series: Series<R>,
    pub construction: Construction,
}

/// Named level-3 objects at a fixed precision over one coefficient ring.
#[derive(Clone, Debug)]
pub struct Dictionary<R: Ring> {
    precision: i64,
    objects: BTreeMap<ModularObjectName, ModularObject<R>>,
}

impl<R: Ring> Dictionary<R> {
    pub fn precision(&self) -> i64 {
        self.precision
    }

    pub fn object(&self, name: ModularObjectName) -> Option<&ModularObject<R>> {
        self.objects.get(&name)
    }

    /// Panics if `name` is absent; only the Eisenstein entries with a `1/3`
    /// constant term can be missing (rings where 3 is not invertible).
    pub fn get(&self, name: ModularObjectName) -> &Series<R> {
        &self.objects[&name].series
    }

    pub fn objects(&self) -> impl Iterator<Item = &ModularObject<R>> {
        self.objects.values()
    }

    pub fn u(&self) -> &Series<R> {
        self.get(ModularObjectName::U)
    }
    pub fn g(&self) -> &Series<R> {
        self.get(ModularObjectName::G)
    }
    pub fn alpha(&self) -> &Series<R> {
        self.get(ModularObjectName::Alpha)
    }
    pub fn t(&self) -> &Series<R> {
        self.get(ModularObjectName::T)
    }
    pub fn h_mix(&self) -> &Series<R> {
        self.get(ModularObjectName::HMix)
    }
    pub fn c0(&self) -> &Series<R> {
        self.get(ModularObjectName::C0)
    }
    pub fn uc0(&self) -> &Series<R> {
        self.get(ModularObjectName::UC0)
    }
    pub fn c_mix(&self) -> &Series<R> {
        self.get(ModularObjectName::CMix)
    }

    /// Reassembles a dictionary from previously exported series; `None` if a
    /// required object is missing or an identity check fails.
    pub fn from_cached(precision: i64, objects: Vec<(ModularObjectName, Series<R>)>) -> Option<Self> {
        let mut dict = Self { precision, objects: BTreeMap::new() };
        for (name, series) in objects {
            dict.insert(name, series, name.primary_construction());
        }
        let complete = ModularObjectName::ALL
            .iter()
            .filter(|n| **n != ModularObjectName::E5Chi0Chi3)
            .all(|n| dict.objects.contains_key(n));
        if !complete {
            return None;
        }
        let ok = dict.identity_checks().ok()?.iter().all(|(_, m)| m.is_none());
        ok.then_some(dict)
    }

    fn insert(&mut self, name: ModularObjectName, series: Series<R>, construction: Construction) {
        let series = series.truncated(self.precision);
        self.objects.insert(name, ModularObject { name, series, construction });
    }

    /// Series identities the objects must satisfy; each entry is the first
    /// mismatching exponent, if any.
    pub fn identity_checks(&self) -> Result<Vec<(&'static str, Option<i64>)>, ModularError> {
        let a = self.get(ModularObjectName::ThetaA);
        let b = self.get(ModularObjectName::ThetaB);
        let d3 = self.get(ModularObjectName::ThetaDCube);
        let alpha = self.alpha();
        let one = Series::one(alpha.ring().clone(), self.precision);
        let lhs = self.t().scale_i64(108);
        let rhs = alpha.scale_i64(4).mul(&one.sub(alpha)?)?;
        let b3 = b.pow(3)?;
        let a3 = a.pow(3)?;
        Ok(vec![
            ("108t = 4 alpha (1 - alpha)", lhs.first_mismatch(&rhs)?),
            ("A^3 = B^3 + D^3", a3.first_mismatch(&b3.add(d3)?)?),
            ("D^3 = 27 u B^3", d3.first_mismatch(&self.u().scale_i64(27).mul(&b3)?)?),
            (
                "C_mix = (1 - 27u) C0",
                self.c_mix().first_mismatch(&one.sub(&self.u().scale_i64(27))?.mul(self.c0())?)?,
            ),
        ])
    }

    /// Per-object JSON export for the cache layer.
    pub fn export(&self) -> BTreeMap<String, crate::series::SeriesJson> {
        self.objects.iter().map(|(k, v)| (k.as_str().to_owned(), v.series.to_json())).collect()
    }
}

impl Dictionary<Integers> {
    /// Image of every object under `Z -> R`; the `1/3`-constant Eisenstein
    /// series is added when 3 is invertible in `R`.
    pub fn convert<S: Ring>(&self, ring: S) -> Result<Dictionary<S>, ModularError> {
        let mut out = Dictionary { precision: self.precision, objects: BTreeMap::new() };
        for obj in self.objects.values() {
            out.insert(obj.name, obj.series.convert(ring.clone()), obj.construction);
        }
        let e = eisenstein_5(DirichletCharacterMod3::Chi0, DirichletCharacterMod3::Chi3, self.precision, ring);
        if let Ok(e) = e {
            out.insert(ModularObjectName::E5Chi0Chi3, e, Construction::DivisorSum);
        }
        Ok(out)
    }
}

fn dual<R: Ring>(
    object: ModularObjectName,
    left: (&Series<R>, Construction),
    right: (&Series<R>, Construction),
    precision: i64,
) -> Result<(), ModularError> {
    let a = left.0.truncated(precision);
    let b = right.0.truncated(precision);
    if let Some(exponent) = a.first_mismatch(&b)? {
        return Err(ModularError::DualMismatch { object, left: left.1, right: right.1, exponent });
    }
    Ok(())
}

/// Builds every named object through `q^{precision-1}`, cross-checking each
/// object that has two recipes.
pub fn build_dictionary<R: Ring>(precision: i64, ring: R) -> Result<Dictionary<R>, ModularError> {
    use ModularObjectName as N;
    if precision < 4 {
        return Err(ModularError::PrecisionTooSmall(precision));
    }
    // inversion of t/q costs two orders, so intermediates carry a margin
    let work = precision + 2;
    let mut dict = Dictionary { precision, objects: BTreeMap::new() };

    let u = eta_quotient(&EtaQuotientSpec::hauptmodul(), work, ring.clone())?;
    let one = Series::one(ring.clone(), work);
    let g = one.add(&u.scale_i64(27))?;
    let g_inv = g.invert()?;
    let alpha = u.scale_i64(27).mul(&g_inv)?;
    let t = u.mul(&g_inv.pow(2)?)?;

    let h_inv = t.invert()?.shift(1);
    let h_prod = Series::new(
        ring.clone(),
        0,
        euler_product(&ring, &[(1, 12), (3, -12)], work as usize)?,
        work,
    )?
    .mul(&g.pow(2)?)?;
    dual(N::HMix, (&h_inv, Construction::Inversion), (&h_prod, Construction::ProductFormula), precision)?;

    let theta_a = theta_a(work, ring.clone())?;
    let theta_b = eta_quotient(&EtaQuotientSpec::theta_b(), work, ring.clone())?;
    let theta_d3 = eta_quotient(&EtaQuotientSpec::theta_d_cube_over_27(), work, ring.clone())?.scale_i64(27);

    let c0 = c0_eisenstein(work, ring.clone())?;
    let c0_theta = theta_a.pow(2)?.mul(&theta_b.pow(3)?)?;
    dual(N::C0, (&c0, Construction::DivisorSum), (&c0_theta, Construction::ThetaProduct), precision)?;

    let uc0 = u.mul(&c0)?;
    let e_chi3_chi0 = eisenstein_5(DirichletCharacterMod3::Chi3, DirichletCharacterMod3::Chi0, work, ring.clone())?;
    dual(N::UC0, (&uc0, Construction::Arithmetic), (&e_chi3_chi0, Construction::DivisorSum), precision)?;

    let c_mix = c0.sub(&uc0.scale_i64(27))?;
    let c_mix_factored = one.sub(&u.scale_i64(27))?.mul(&c0)?;
    dual(N::CMix, (&c_mix, Construction::Arithmetic), (&c_mix_factored, Construction::Arithmetic), precision)?;

    dict.insert(N::U, u, N::U.primary_construction());
    dict.insert(N::G, g, N::G.primary_construction());
    dict.insert(N::Alpha, alpha, N::Alpha.primary_construction());
    dict.insert(N::T, t, N::T.primary_construction());
    dict.insert(N::HMix, h_inv, N::HMix.primary_construction());
    dict.insert(N::ThetaA, theta_a, N::ThetaA.primary_construction());
    dict.insert(N::ThetaB, theta_b, N::ThetaB.primary_construction());
    dict.insert(N::ThetaDCube, theta_d3, N::ThetaDCube.primary_construction());
    dict.insert(N::C0, c0, N::C0.primary_construction());
    dict.insert(N::UC0, uc0, N::UC0.primary_construction());
    dict.insert(N::CMix, c_mix, N::CMix.primary_construction());
    dict.insert(N::E5Chi3Chi0, e_chi3_chi0, N::E5Chi3Chi0.primary_construction());
    match eisenstein_5(DirichletCharacterMod3::Chi0, DirichletCharacterMod3::Chi3, work, ring) {
        Ok(e) => dict.insert(N::E5Chi0Chi3, e, N::E5Chi0Chi3.primary_construction()),
        Err(ModularError::ThreeNotInvertible) => {}
        Err(e) => return Err(e),
    }
    Ok(dict)
}

/// `u C0` and `E_{5,chi3,chi0}` agree at `a_0, a_1` (the Sturm bound) and then
/// through `q^{precision-1}`.
pub fn verify_sturm_identification(precision: i64) -> Result<bool, ModularError> {
    let u = eta_quotient(&EtaQuotientSpec::hauptmodul(), precision, Integers)?;
    let lhs = u.mul(&c0_eisenstein(precision, Integers)?)?;
    let rhs = eisenstein_5(DirichletCharacterMod3::Chi3, DirichletCharacterMod3::Chi0, precision, Integers)?;
    Ok(sturm_agreement(&lhs, &rhs))
}

/// Coefficientwise agreement, checking `a_0` and `a_1` first.
pub fn sturm_agreement<R: Ring>(lhs: &Series<R>, rhs: &Series<R>) -> bool {
    let leading_ok = (0..2).all(|n| lhs.coeff(n) == rhs.coeff(n));
    leading_ok && matches!(lhs.first_mismatch(rhs), Ok(None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Residues;

    fn ints(s: &Series<Integers>, n: i64) -> Vec<i64> {
        (s.lowest_exponent().min(0)..n).map(|k| i64::try_from(s.coeff(k).unwrap()).unwrap()).collect()
    }

    #[test]
    fn empty_eta_quotient_is_one() {
        let e = eta_quotient(&EtaQuotientSpec::new(&[]), 5, Integers).unwrap();
        assert_eq!(e, Series::one(Integers, 5));
    }

    #[test]
    fn non_integral_leading_power_rejected() {
        let r = eta_quotient(&EtaQuotientSpec::new(&[(1, 1)]), 5, Integers);
        assert!(matches!(r, Err(ModularError::NonIntegralLeadingPower { numerator: 1 })));
    }

    #[test]
    fn first_terms() {
        let u = eta_quotient(&EtaQuotientSpec::hauptmodul(), 5, Integers).unwrap();
        assert_eq!(ints(&u, 5), vec![0, 1, 12, 90, 508]);
        let b = eta_quotient(&EtaQuotientSpec::theta_b(), 2, Integers).unwrap();
        assert_eq!(ints(&b, 2), vec![1, -3]);
        let a = theta_a(4, Integers).unwrap();
        assert_eq!(ints(&a, 4), vec![1, 6, 0, 6]);
    }

    #[test]
    fn eisenstein_first_terms() {
        use DirichletCharacterMod3::*;
        let e = eisenstein_5(Chi3, Chi0, 4, Integers).unwrap();
        assert_eq!(ints(&e, 4), vec![0, 1, 15, 81]);
        let r = Residues::new(7, 4).unwrap();
        let e = eisenstein_5(Chi0, Chi3, 3, r).unwrap();
        assert_eq!(e.coeff(0).unwrap() * 3 % 2401, 1);
        assert_eq!(e.coeff(1), Some(1));
        assert_eq!(e.coeff(2), Some(2401 - 15));
        assert!(matches!(eisenstein_5(Chi0, Chi3, 3, Integers), Err(ModularError::ThreeNotInvertible)));
        assert!(eisenstein_5(Chi0, Chi0, 3, Integers).is_err());
    }

    #[test]
    fn dictionary_heads() {
        let d = build_dictionary(6, Integers).unwrap();
        assert_eq!(ints(d.t(), 4), vec![0, 1, -42, 981]);
        assert_eq!(ints(d.h_mix(), 4), vec![1, 42, 783, 8672]);
        assert_eq!(ints(d.c_mix(), 2), vec![1, -24]);
        assert_eq!(ints(d.uc0(), 4), vec![0, 1, 15, 81]);
        assert_eq!(d.precision(), 6);
        assert!(d.object(ModularObjectName::E5Chi0Chi3).is_none());
    }

    #[test]
    fn identities_hold() {
        let d = build_dictionary(60, Integers).unwrap();
        for (name, mismatch) in d.identity_checks().unwrap() {
            assert_eq!(mismatch, None, "{name}");
        }
    }

    #[test]
    fn sturm() {
        assert!(verify_sturm_identification(50).unwrap());
        let u = eta_quotient(&EtaQuotientSpec::hauptmodul(), 10, Integers).unwrap();
        let lhs = u.mul(&c0_eisenstein(10, Integers).unwrap()).unwrap();
        let mut coeffs = lhs.coefficients().to_vec();
        coeffs[4] += 1;
        let perturbed = Series::new(Integers, 1, coeffs, 10).unwrap();
        assert!(!sturm_agreement(&lhs, &perturbed));
    }

    #[test]
    fn object_names_round_trip() {
        for n in ModularObjectName::ALL {
            assert_eq!(ModularObjectName::parse(n.as_str()), Some(n));
        }
    }
}
