//! Coefficient rings for truncated q-series.
//!
//! Three arithmetic backends are provided:
//!
//! - [`Integers`]: exact integers, the natural home of every dictionary object.
//! - [`LocalizedRationals`]: rationals whose denominators are prime to a fixed `p`,
//!   i.e. the local ring `Z_(p)`. Used as the exact reference backend.
//! - [`Residues`] / [`WideResidues`]: canonical representatives of `Z/p^K`. The
//!   narrow variant stores machine words and is the fast path; the wide variant
//!   falls back to big integers when `p^K` does not fit below `2^63`.
//!
//! Rings are values, not types alone: two `Residues` with different moduli are
//! different rings and mixing them is an error at the series level.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Work estimate (multiply-accumulates) above which convolutions run in parallel.
const PARALLEL_WORK: usize = 1 << 18;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("denominator {0} is divisible by p={1}")]
    DenominatorDivisibleByP(String, u64),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("residue ring Z/{p}^{k} does not fit the narrow representation")]
    ModulusTooWide { p: u64, k: u32 },
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("cannot reduce an element of {from} into {to}")]
    IncompatibleReduction { from: String, to: String },
    #[error("cannot parse coefficient {0:?}")]
    Parse(String),
    #[error("ring exponent {have} cannot be lowered by {by}")]
    ExponentExhausted { have: u32, by: u32 },
}

/// p-adic valuation of a coefficient or a series; `Infinite` for zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

/// Serializable description of a coefficient ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum RingDescriptor {
    ExactInteger,
    ExactRationalLocalizedAt { prime: u64 },
    ResidueRing { prime: u64, exponent: u32 },
}

impl fmt::Display for RingDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingDescriptor::ExactInteger => f.write_str("Z"),
            RingDescriptor::ExactRationalLocalizedAt { prime } => write!(f, "Z_({prime})"),
            RingDescriptor::ResidueRing { prime, exponent } => write!(f, "Z/{prime}^{exponent}"),
        }
    }
}

/// A commutative ring with identity, together with the handful of extra
/// operations the series layer needs (units, valuations, textual form).
pub trait Ring: Clone + PartialEq + fmt::Debug + Send + Sync {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn descriptor(&self) -> RingDescriptor;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_bigint(&self, n: &BigInt) -> Self::Elem;
    fn from_i64(&self, n: i64) -> Self::Elem {
        self.from_bigint(&BigInt::from(n))
    }
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Inverse of a unit; `None` for non-units.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// p-adic valuation of `a`. Residue rings cap at their exponent and reject
    /// other primes.
    fn valuation(&self, a: &Self::Elem, p: u64) -> Result<Valuation, RingError>;
    /// Canonical image of `a` in `target`.
    fn reduce(&self, a: &Self::Elem, target: &Residues) -> Result<u64, RingError>;
    fn to_repr(&self, a: &Self::Elem) -> String;
    fn parse_repr(&self, s: &str) -> Result<Self::Elem, RingError>;

    /// Coefficient `k` of the Cauchy product of two dense arrays.
    fn convolution_coeff(&self, a: &[Self::Elem], b: &[Self::Elem], k: usize) -> Self::Elem {
        let (lo, hi) = convolution_range(a.len(), b.len(), k);
        let mut acc = self.zero();
        for i in lo..hi {
            acc = self.add(&acc, &self.mul(&a[i], &b[k - i]));
        }
        acc
    }

    /// Product coefficients `start, start+step, ...` (`count` of them).
    fn convolve_strided(
        &self,
        a: &[Self::Elem],
        b: &[Self::Elem],
        start: usize,
        step: usize,
        count: usize,
    ) -> Vec<Self::Elem> {
        let work = count.saturating_mul(a.len().min(b.len()).max(1));
        if work >= PARALLEL_WORK {
            (0..count)
                .into_par_iter()
                .map(|i| self.convolution_coeff(a, b, start + i * step))
                .collect()
        } else {
            (0..count).map(|i| self.convolution_coeff(a, b, start + i * step)).collect()
        }
    }
}

/// Rings that know a distinguished prime and can divide by its powers.
pub trait PadicRing: Ring {
    fn prime(&self) -> u64;
    /// Number of p-adic digits carried; `None` for exact rings.
    fn exponent(&self) -> Option<u32>;
    /// `a / p^e` when `v_p(a) >= e`, as an element of [`PadicRing::lowered`]`(e)`.
    fn div_p_power(&self, a: &Self::Elem, e: u32) -> Option<Self::Elem>;
    /// Ring in which quotients by `p^e` live.
    fn lowered(&self, e: u32) -> Result<Self, RingError>;
    /// Canonical map into a ring carrying at most as many digits.
    fn coarsen(&self, target: &Self, a: &Self::Elem) -> Result<Self::Elem, RingError>;
    /// Copy of this ring carrying `exponent` digits (exact rings return themselves).
    fn with_exponent(&self, exponent: u32) -> Result<Self, RingError>;
}

pub(crate) fn convolution_range(la: usize, lb: usize, k: usize) -> (usize, usize) {
    if la == 0 || lb == 0 {
        return (0, 0);
    }
    let lo = (k + 1).saturating_sub(lb);
    let hi = (k + 1).min(la);
    (lo, hi.max(lo))
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `(v_p(n), n / p^{v_p(n)})` for a nonzero integer.
pub fn split_p_power(n: &BigInt, p: u64) -> (u32, BigInt) {
    let pb = BigInt::from(p);
    let mut v = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return (v, m);
        }
        m = q;
        v += 1;
    }
}

fn bigint_valuation(n: &BigInt, p: u64) -> Valuation {
    if n.is_zero() {
        Valuation::Infinite
    } else {
        Valuation::Finite(split_p_power(n, p).0)
    }
}

fn mod_inverse_u64(a: u64, m: u64) -> Option<u64> {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, (a % m) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if r != 1 {
        return None;
    }
    Some(t.rem_euclid(m as i128) as u64)
}

fn bigint_to_residue(n: &BigInt, m: u64) -> u64 {
    n.mod_floor(&BigInt::from(m)).to_u64().expect("residue below modulus")
}

fn parse_bigint(s: &str) -> Result<BigInt, RingError> {
    s.trim().parse::<BigInt>().map_err(|_| RingError::Parse(s.to_owned()))
}

// ---------------------------------------------------------------------------
// Exact integers

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Integers;

impl Ring for Integers {
    type Elem = BigInt;

    fn descriptor(&self) -> RingDescriptor {
        RingDescriptor::ExactInteger
    }
    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn from_bigint(&self, n: &BigInt) -> BigInt {
        n.clone()
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn inv(&self, a: &BigInt) -> Option<BigInt> {
        if a.abs().is_one() {
            Some(a.clone())
        } else {
            None
        }
    }
    fn valuation(&self, a: &BigInt, p: u64) -> Result<Valuation, RingError> {
        Ok(bigint_valuation(a, p))
    }
    fn reduce(&self, a: &BigInt, target: &Residues) -> Result<u64, RingError> {
        Ok(bigint_to_residue(a, target.modulus))
    }
    fn to_repr(&self, a: &BigInt) -> String {
        a.to_string()
    }
    fn parse_repr(&self, s: &str) -> Result<BigInt, RingError> {
        parse_bigint(s)
    }
    fn convolution_coeff(&self, a: &[BigInt], b: &[BigInt], k: usize) -> BigInt {
        let (lo, hi) = convolution_range(a.len(), b.len(), k);
        let mut acc = BigInt::zero();
        for i in lo..hi {
            if !a[i].is_zero() {
                acc += &a[i] * &b[k - i];
            }
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// Z_(p)

/// Rationals with denominator prime to `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LocalizedRationals {
    p: u64,
}

impl LocalizedRationals {
    pub fn new(p: u64) -> Result<Self, RingError> {
        if !is_prime(p) {
            return Err(RingError::NotPrime(p));
        }
        Ok(Self { p })
    }

    /// Builds `num/den`, rejecting denominators divisible by `p`.
    pub fn element(&self, num: BigInt, den: BigInt) -> Result<BigRational, RingError> {
        if den.is_zero() {
            return Err(RingError::ZeroDenominator);
        }
        let r = BigRational::new(num, den);
        self.check(&r)?;
        Ok(r)
    }

    fn check(&self, r: &BigRational) -> Result<(), RingError> {
        if (r.denom() % BigInt::from(self.p)).is_zero() {
            return Err(RingError::DenominatorDivisibleByP(r.denom().to_string(), self.p));
        }
        Ok(())
    }
}

impl Ring for LocalizedRationals {
    type Elem = BigRational;

    fn descriptor(&self) -> RingDescriptor {
        RingDescriptor::ExactRationalLocalizedAt { prime: self.p }
    }
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_bigint(&self, n: &BigInt) -> BigRational {
        BigRational::from_integer(n.clone())
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() || (a.numer() % BigInt::from(self.p)).is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn valuation(&self, a: &BigRational, p: u64) -> Result<Valuation, RingError> {
        if a.is_zero() {
            return Ok(Valuation::Infinite);
        }
        // the denominator contributes negatively; only p itself is guaranteed absent
        let (vn, _) = split_p_power(a.numer(), p);
        let (vd, _) = split_p_power(a.denom(), p);
        if vd > 0 {
            return Err(RingError::DenominatorDivisibleByP(a.denom().to_string(), p));
        }
        Ok(Valuation::Finite(vn))
    }
    fn reduce(&self, a: &BigRational, target: &Residues) -> Result<u64, RingError> {
        let m = target.modulus;
        let num = bigint_to_residue(a.numer(), m);
        let den = bigint_to_residue(a.denom(), m);
        let inv = mod_inverse_u64(den, m)
            .ok_or_else(|| RingError::DenominatorDivisibleByP(a.denom().to_string(), target.p))?;
        Ok(((num as u128 * inv as u128) % m as u128) as u64)
    }
    fn to_repr(&self, a: &BigRational) -> String {
        if a.is_integer() {
            a.numer().to_string()
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }
    fn parse_repr(&self, s: &str) -> Result<BigRational, RingError> {
        let r = match s.split_once('/') {
            Some((n, d)) => {
                let d = parse_bigint(d)?;
                if d.is_zero() {
                    return Err(RingError::ZeroDenominator);
                }
                BigRational::new(parse_bigint(n)?, d)
            }
            None => BigRational::from_integer(parse_bigint(s)?),
        };
        self.check(&r)?;
        Ok(r)
    }

    /// Clears denominators once, convolves numerators as integers, then divides.
    fn convolve_strided(
        &self,
        a: &[BigRational],
        b: &[BigRational],
        start: usize,
        step: usize,
        count: usize,
    ) -> Vec<BigRational> {
        let (na, da) = clear_denominators(a);
        let (nb, db) = clear_denominators(b);
        let den = da * db;
        Integers
            .convolve_strided(&na, &nb, start, step, count)
            .into_iter()
            .map(|n| BigRational::new(n, den.clone()))
            .collect()
    }
}

fn clear_denominators(a: &[BigRational]) -> (Vec<BigInt>, BigInt) {
    let l = a.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let nums = a.iter().map(|x| x.numer() * (&l / x.denom())).collect();
    (nums, l)
}

impl PadicRing for LocalizedRationals {
    fn prime(&self) -> u64 {
        self.p
    }
    fn exponent(&self) -> Option<u32> {
        None
    }
    fn div_p_power(&self, a: &BigRational, e: u32) -> Option<BigRational> {
        if a.is_zero() {
            return Some(a.clone());
        }
        let (v, _) = split_p_power(a.numer(), self.p);
        if v < e {
            return None;
        }
        let pe = num_traits::pow(BigInt::from(self.p), e as usize);
        Some(BigRational::new(a.numer() / pe, a.denom().clone()))
    }
    fn lowered(&self, _e: u32) -> Result<Self, RingError> {
        Ok(*self)
    }
    fn coarsen(&self, target: &Self, a: &BigRational) -> Result<BigRational, RingError> {
        if target.p != self.p {
            return Err(RingError::IncompatibleReduction {
                from: self.descriptor().to_string(),
                to: target.descriptor().to_string(),
            });
        }
        Ok(a.clone())
    }
    fn with_exponent(&self, _exponent: u32) -> Result<Self, RingError> {
        Ok(*self)
    }
}

// ---------------------------------------------------------------------------
// Z/p^K, machine words

/// `Z/p^K` with representatives in `[0, p^K)` stored as `u64`; requires `p^K < 2^63`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Residues {
    p: u64,
    k: u32,
    modulus: u64,
}

impl Residues {
    pub fn new(p: u64, k: u32) -> Result<Self, RingError> {
        if !is_prime(p) {
            return Err(RingError::NotPrime(p));
        }
        let mut m: u64 = 1;
        for _ in 0..k {
            m = m
                .checked_mul(p)
                .filter(|m| *m < (1u64 << 63))
                .ok_or(RingError::ModulusTooWide { p, k })?;
        }
        Ok(Self { p, k, modulus: m })
    }

    /// Whether `p^k` fits the narrow representation.
    pub fn fits(p: u64, k: u32) -> bool {
        let mut m: u64 = 1;
        for _ in 0..k {
            match m.checked_mul(p) {
                Some(x) if x < (1u64 << 63) => m = x,
                _ => return false,
            }
        }
        true
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn prime_u64(&self) -> u64 {
        self.p
    }

    pub fn digits(&self) -> u32 {
        self.k
    }
}

impl Ring for Residues {
    type Elem = u64;

    fn descriptor(&self) -> RingDescriptor {
        RingDescriptor::ResidueRing { prime: self.p, exponent: self.k }
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.modulus
    }
    fn from_bigint(&self, n: &BigInt) -> u64 {
        bigint_to_residue(n, self.modulus)
    }
    fn from_i64(&self, n: i64) -> u64 {
        (n as i128).rem_euclid(self.modulus as i128) as u64
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = *a as u128 + *b as u128;
        (s % self.modulus as u128) as u64
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            self.modulus - (b - a)
        }
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.modulus - a
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.modulus as u128) as u64
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if (*a).is_multiple_of(self.p) {
            None
        } else {
            mod_inverse_u64(*a, self.modulus)
        }
    }
    fn valuation(&self, a: &u64, p: u64) -> Result<Valuation, RingError> {
        if p != self.p {
            return Err(RingError::IncompatibleReduction {
                from: self.descriptor().to_string(),
                to: format!("v_{p}"),
            });
        }
        if *a == 0 {
            return Ok(Valuation::Infinite);
        }
        let mut v = 0;
        let mut x = *a;
        while x.is_multiple_of(p) {
            x /= p;
            v += 1;
        }
        Ok(Valuation::Finite(v))
    }
    fn reduce(&self, a: &u64, target: &Residues) -> Result<u64, RingError> {
        if target.p != self.p || target.k > self.k {
            return Err(RingError::IncompatibleReduction {
                from: self.descriptor().to_string(),
                to: target.descriptor().to_string(),
            });
        }
        Ok(a % target.modulus)
    }
    fn to_repr(&self, a: &u64) -> String {
        a.to_string()
    }
    fn parse_repr(&self, s: &str) -> Result<u64, RingError> {
        let n = parse_bigint(s)?;
        if n.is_negative() || n >= BigInt::from(self.modulus) {
            return Err(RingError::Parse(s.to_owned()));
        }
        Ok(n.to_u64().expect("checked range"))
    }

    fn convolution_coeff(&self, a: &[u64], b: &[u64], k: usize) -> u64 {
        let (lo, hi) = convolution_range(a.len(), b.len(), k);
        let m = self.modulus as u128;
        if self.modulus < (1u64 << 32) {
            // products < 2^64; a u128 accumulator cannot overflow for any realistic length
            let mut acc: u128 = 0;
            for i in lo..hi {
                acc += a[i] as u128 * b[k - i] as u128;
            }
            (acc % m) as u64
        } else {
            let mut acc: u128 = 0;
            for i in lo..hi {
                acc += a[i] as u128 * b[k - i] as u128;
                if acc >= 1u128 << 126 {
                    acc %= m;
                }
            }
            (acc % m) as u64
        }
    }
}

impl PadicRing for Residues {
    fn prime(&self) -> u64 {
        self.p
    }
    fn exponent(&self) -> Option<u32> {
        Some(self.k)
    }
    fn div_p_power(&self, a: &u64, e: u32) -> Option<u64> {
        if e > self.k {
            return None;
        }
        if *a == 0 {
            return Some(0);
        }
        let pe = self.p.pow(e);
        if !(*a).is_multiple_of(pe) {
            return None;
        }
        Some(a / pe)
    }
    fn lowered(&self, e: u32) -> Result<Self, RingError> {
        if e >= self.k {
            return Err(RingError::ExponentExhausted { have: self.k, by: e });
        }
        Residues::new(self.p, self.k - e)
    }
    fn coarsen(&self, target: &Self, a: &u64) -> Result<u64, RingError> {
        self.reduce(a, target)
    }
    fn with_exponent(&self, exponent: u32) -> Result<Self, RingError> {
        Residues::new(self.p, exponent)
    }
}

// ---------------------------------------------------------------------------
// Z/p^K, big integers

/// `Z/p^K` for moduli that do not fit in a machine word.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WideResidues {
    p: u64,
    k: u32,
    modulus: BigInt,
}

impl WideResidues {
    pub fn new(p: u64, k: u32) -> Result<Self, RingError> {
        if !is_prime(p) {
            return Err(RingError::NotPrime(p));
        }
        Ok(Self { p, k, modulus: num_traits::pow(BigInt::from(p), k as usize) })
    }
}

impl Ring for WideResidues {
    type Elem = BigInt;

    fn descriptor(&self) -> RingDescriptor {
        RingDescriptor::ResidueRing { prime: self.p, exponent: self.k }
    }
    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one().mod_floor(&self.modulus)
    }
    fn from_bigint(&self, n: &BigInt) -> BigInt {
        n.mod_floor(&self.modulus)
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a + b).mod_floor(&self.modulus)
    }
    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a - b).mod_floor(&self.modulus)
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        (-a).mod_floor(&self.modulus)
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a * b).mod_floor(&self.modulus)
    }
    fn inv(&self, a: &BigInt) -> Option<BigInt> {
        if (a % BigInt::from(self.p)).is_zero() {
            return None;
        }
        let e = a.extended_gcd(&self.modulus);
        Some(e.x.mod_floor(&self.modulus))
    }
    fn valuation(&self, a: &BigInt, p: u64) -> Result<Valuation, RingError> {
        if p != self.p {
            return Err(RingError::IncompatibleReduction {
                from: self.descriptor().to_string(),
                to: format!("v_{p}"),
            });
        }
        Ok(bigint_valuation(a, p))
    }
    fn reduce(&self, a: &BigInt, target: &Residues) -> Result<u64, RingError> {
        if target.p != self.p || target.k > self.k {
            return Err(RingError::IncompatibleReduction {
                from: self.descriptor().to_string(),
                to: target.descriptor().to_string(),
            });
        }
        Ok(bigint_to_residue(a, target.modulus))
    }
    fn to_repr(&self, a: &BigInt) -> String {
        a.to_string()
    }
    fn parse_repr(&self, s: &str) -> Result<BigInt, RingError> {
        let n = parse_bigint(s)?;
        if n.is_negative() || n >= self.modulus {
            return Err(RingError::Parse(s.to_owned()));
        }
        Ok(n)
    }
    fn convolution_coeff(&self, a: &[BigInt], b: &[BigInt], k: usize) -> BigInt {
        Integers.convolution_coeff(a, b, k).mod_floor(&self.modulus)
    }
}

impl PadicRing for WideResidues {
    fn prime(&self) -> u64 {
        self.p
    }
    fn exponent(&self) -> Option<u32> {
        Some(self.k)
    }
    fn div_p_power(&self, a: &BigInt, e: u32) -> Option<BigInt> {
        if e > self.k {
            return None;
        }
        if a.is_zero() {
            return Some(BigInt::zero());
        }
        let pe = num_traits::pow(BigInt::from(self.p), e as usize);
        let (q, r) = a.div_rem(&pe);
        r.is_zero().then_some(q)
    }
    fn lowered(&self, e: u32) -> Result<Self, RingError> {
        if e >= self.k {
            return Err(RingError::ExponentExhausted { have: self.k, by: e });
        }
        WideResidues::new(self.p, self.k - e)
    }
    fn coarsen(&self, target: &Self, a: &BigInt) -> Result<BigInt, RingError> {
        if target.p != self.p || target.k > self.k {
            return Err(RingError::IncompatibleReduction {
                from: self.descriptor().to_string(),
                to: target.descriptor().to_string(),
            });
        }
        Ok(a.mod_floor(&target.modulus))
    }
    fn with_exponent(&self, exponent: u32) -> Result<Self, RingError> {
        WideResidues::new(self.p, exponent)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residue_inverse_of_two_mod_49() {
        let r = Residues::new(7, 2).unwrap();
        assert_eq!(r.inv(&2), Some(25));
        assert_eq!(r.inv(&14), None);
    }

    #[test]
    fn localized_rejects_p_in_denominator() {
        let z7 = LocalizedRationals::new(7).unwrap();
        assert!(z7.element(BigInt::from(1), BigInt::from(14)).is_err());
        let half = z7.element(BigInt::from(1), BigInt::from(2)).unwrap();
        assert_eq!(z7.reduce(&half, &Residues::new(7, 2).unwrap()).unwrap(), 25);
    }

    #[test]
    fn narrow_modulus_limit() {
        assert!(Residues::new(31, 6).is_ok());
        assert!(Residues::new(1_000_003, 4).is_err());
        assert!(!Residues::fits(1_000_003, 4));
        assert!(WideResidues::new(1_000_003, 4).is_ok());
    }

    #[test]
    fn div_p_power_checks_exactness() {
        let r = Residues::new(7, 4).unwrap();
        assert_eq!(r.div_p_power(&98, 1), Some(14));
        assert_eq!(r.div_p_power(&98, 3), None);
        assert_eq!(r.lowered(1).unwrap().modulus(), 343);
    }

    #[test]
    fn residue_convolution_matches_generic() {
        let r = Residues::new(31, 6).unwrap();
        let a: Vec<u64> = (0..40).map(|i| (i * 7919 + 3) % r.modulus()).collect();
        let b: Vec<u64> = (0..33).map(|i| (i * 104729 + 11) % r.modulus()).collect();
        for k in 0..72 {
            let (lo, hi) = convolution_range(a.len(), b.len(), k);
            let mut acc = 0;
            for i in lo..hi {
                acc = r.add(&acc, &r.mul(&a[i], &b[k - i]));
            }
            assert_eq!(r.convolution_coeff(&a, &b, k), acc);
        }
    }

    #[test]
    fn wide_and_narrow_agree() {
        let n = Residues::new(13, 5).unwrap();
        let w = WideResidues::new(13, 5).unwrap();
        for (a, b) in [(5u64, 7u64), (371_292, 1), (12, 169)] {
            let wa = BigInt::from(a);
            let wb = BigInt::from(b);
            assert_eq!(BigInt::from(n.mul(&a, &b)), w.mul(&wa, &wb));
            assert_eq!(n.inv(&a).map(BigInt::from), w.inv(&wa));
        }
    }
}
