//! The integer sequence `A_n` (mixed-point hypergeometric cube), its order-2
//! recurrence, the Eisenstein divisor sums `s(n)`, `beta(n)`, `c_n`, and the
//! branch sequences `A_m^(eps)` extracted from q-expansions.

use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::modular::Dictionary;
use crate::ring::Ring;

pub const SEQUENCE_FORMAT_VERSION: u32 = 1;

/// `A_0, A_1, A_2`.
pub const SEEDS: [i64; 3] = [1, 18, 864];

#[derive(Debug, Error)]
pub enum SequenceError {
    #[error("recurrence step n={n}: {numerator} is not divisible by (n+2)^4")]
    InexactRecurrence { n: usize, numerator: BigInt },
    #[error("direct coefficient A_{n} = {value} is not an integer")]
    NonIntegral { n: usize, value: BigRational },
    #[error("generators disagree at A_{n}")]
    CrossCheck { n: usize },
    #[error("dictionary precision {precision} cannot reach q^{index}")]
    InsufficientPrecision { index: usize, precision: i64 },
    #[error("cache format: {0}")]
    Format(String),
    #[error("cache io: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Series(#[from] crate::series::SeriesError),
}

fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

/// `A_0..=A_{n_max}` from the order-2 recurrence
/// `(n+2)^4 A_{n+2} = 6(36n^4+198n^3+424n^2+417n+158) A_{n+1} - 324(n+1)(2n+1)(3n+2)(6n+5) A_n`,
/// checking exact divisibility at every step.
pub fn a_mix_recurrence(n_max: usize) -> Result<Vec<BigInt>, SequenceError> {
    let mut a: Vec<BigInt> = SEEDS.iter().take(2).map(|v| big(*v)).collect();
    a.truncate(n_max + 1);
    while a.len() <= n_max {
        let n = a.len() - 2;
        let numerator = &recurrence_coeff_1(n) * &a[n + 1] - &recurrence_coeff_0(n) * &a[n];
        let (q, r) = numerator.div_rem(&recurrence_coeff_2(n));
        if !r.is_zero() {
            return Err(SequenceError::InexactRecurrence { n, numerator });
        }
        a.push(q);
    }
    Ok(a)
}

fn recurrence_coeff_2(n: usize) -> BigInt {
    num_traits::pow(BigInt::from(n + 2), 4)
}

fn recurrence_coeff_1(n: usize) -> BigInt {
    let n = big(n as i64);
    let poly = big(36) * n.pow(4) + big(198) * n.pow(3) + big(424) * n.pow(2) + big(417) * &n + big(158);
    big(6) * poly
}

fn recurrence_coeff_0(n: usize) -> BigInt {
    let n = n as i64;
    big(324) * big(n + 1) * big(2 * n + 1) * big(3 * n + 2) * big(6 * n + 5)
}

/// `w(n)`: the order-2 operator applied to `a` at `n`; zero iff the recurrence holds there.
pub fn l2_residual(a: &[BigInt], n: usize) -> BigInt {
    recurrence_coeff_2(n) * &a[n + 2] - recurrence_coeff_1(n) * &a[n + 1] + recurrence_coeff_0(n) * &a[n]
}

/// First `n` where the order-2 operator fails to annihilate `a`, if any.
pub fn l2_annihilates(a: &[BigInt]) -> Option<usize> {
    (0..a.len().saturating_sub(2)).find(|&n| !l2_residual(a, n).is_zero())
}

/// `A_n = 108^n [z^n] 2F1(1/6, 1/3; 1; z)^3` from exact hypergeometric
/// coefficients `h_n = (1/6)_n (1/3)_n / n!^2`.
pub fn a_mix_direct(n_max: usize) -> Result<Vec<BigInt>, SequenceError> {
    let mut h = Vec::with_capacity(n_max + 1);
    let mut cur = BigRational::one();
    for n in 0..=n_max {
        h.push(cur.clone());
        let k = n as i64;
        // h_{n+1}/h_n = (n+1/6)(n+1/3)/(n+1)^2
        cur *= BigRational::new(big((6 * k + 1) * (3 * k + 1)), big(18 * (k + 1) * (k + 1)));
    }
    let square = convolve_rational(&h, &h);
    let cube = convolve_rational(&square, &h);
    let mut out = Vec::with_capacity(n_max + 1);
    let mut scale = BigInt::one();
    for (n, c) in cube.into_iter().enumerate() {
        let v = c * BigRational::from_integer(scale.clone());
        if !v.is_integer() {
            return Err(SequenceError::NonIntegral { n, value: v });
        }
        out.push(v.to_integer());
        scale *= 108;
    }
    Ok(out)
}

fn convolve_rational(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    (0..a.len().min(b.len()))
        .map(|k| (0..=k).fold(BigRational::zero(), |acc, i| acc + &a[i] * &b[k - i]))
        .collect()
}

/// `s(n) = sum_{d|n} chi3(d) d^4` and `beta(n) = sum_{d|n} chi3(n/d) d^4`
/// for `0 <= n < terms` (index 0 holds 0), by a divisor sieve.
pub fn divisor_sums(terms: usize) -> (Vec<i128>, Vec<i128>) {
    let mut s = vec![0i128; terms];
    let mut beta = vec![0i128; terms];
    for d in 1..terms {
        let d4 = (d as i128).pow(4);
        let cd = chi3(d as u64) as i128;
        for (k, n) in (d..terms).step_by(d).enumerate() {
            s[n] += cd * d4;
            beta[n] += chi3(k as u64 + 1) as i128 * d4;
        }
    }
    (s, beta)
}

pub fn chi3(n: u64) -> i64 {
    match n % 3 {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

/// `c_n = 3 s(n) - 27 beta(n)` for `0 <= n < terms`; index 0 holds the
/// constant term 1 of the mixed Eisenstein line.
pub fn c_mix_table(terms: usize) -> Vec<i128> {
    let (s, beta) = divisor_sums(terms);
    let mut c: Vec<i128> = s.iter().zip(&beta).map(|(s, b)| 3 * s - 27 * b).collect();
    if let Some(c0) = c.first_mut() {
        *c0 = 1;
    }
    c
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// `s(n)` for a single (possibly large) index.
pub fn s_at(n: u64) -> BigInt {
    divisors(n).into_iter().map(|d| chi3(d) * num_traits::pow(BigInt::from(d), 4)).sum()
}

/// `beta(n)` for a single (possibly large) index.
pub fn beta_at(n: u64) -> BigInt {
    divisors(n).into_iter().map(|d| chi3(n / d) * num_traits::pow(BigInt::from(d), 4)).sum()
}

/// `c_n = 3 s(n) - 27 beta(n)` for `n >= 1`.
pub fn c_mix_at(n: u64) -> BigInt {
    big(3) * s_at(n) - big(27) * beta_at(n)
}

/// The sign `eps` in `C^(eps) = C0 - 27 eps uC0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BranchSelector {
    Plus,
    Minus,
}

impl BranchSelector {
    pub fn from_sign(eps: i64) -> Self {
        if eps >= 0 {
            Self::Plus
        } else {
            Self::Minus
        }
    }

    pub fn epsilon(self) -> i64 {
        match self {
            Self::Plus => 1,
            Self::Minus => -1,
        }
    }
}

fn check_reach<R: Ring>(dict: &Dictionary<R>, index: usize) -> Result<(), SequenceError> {
    if dict.precision() <= index as i64 {
        return Err(SequenceError::InsufficientPrecision { index, precision: dict.precision() });
    }
    Ok(())
}

/// `[q^m] F H^m` for a power series `F`.
fn coefficient_against_power<R: Ring>(
    f: &crate::series::Series<R>,
    h: &crate::series::Series<R>,
    m: usize,
) -> Result<R::Elem, SequenceError> {
    let hm = h.truncated(m as i64 + 1).pow(m as i64)?;
    let prod = f.truncated(m as i64 + 1).mul(&hm)?;
    Ok(prod.coeff(m as i64).expect("precision checked"))
}

/// `A_m^(eps) = [q^m] (C0 - 27 eps uC0) H_mix^m`.
pub fn branch_coefficient<R: Ring>(m: usize, eps: BranchSelector, dict: &Dictionary<R>) -> Result<R::Elem, SequenceError> {
    check_reach(dict, m)?;
    let f = dict.c0().sub(&dict.uc0().scale_i64(27 * eps.epsilon()))?;
    coefficient_against_power(&f, dict.h_mix(), m)
}

/// `A_m = [q^m] C_mix H_mix^m`.
pub fn lagrange_burmann_coefficient<R: Ring>(m: usize, dict: &Dictionary<R>) -> Result<R::Elem, SequenceError> {
    check_reach(dict, m)?;
    coefficient_against_power(dict.c_mix(), dict.h_mix(), m)
}

/// `[q^m] C_mix H_mix^m` for `m = 0..=m_max`, updating `H_mix^m` incrementally.
pub fn lagrange_burmann_sweep<R: Ring>(m_max: usize, dict: &Dictionary<R>) -> Result<Vec<R::Elem>, SequenceError> {
    check_reach(dict, m_max)?;
    let n = m_max as i64 + 1;
    let h = dict.h_mix().truncated(n);
    let c = dict.c_mix().truncated(n);
    let ring = h.ring().clone();
    let mut power = crate::series::Series::one(ring.clone(), n);
    let mut out = Vec::with_capacity(m_max + 1);
    for m in 0..=m_max {
        if m > 0 {
            power = power.mul(&h)?;
        }
        let k = m + 1;
        out.push(ring.convolution_coeff(&c.coefficients()[..k.min(c.coefficients().len())], &power.coefficients()[..k.min(power.coefficients().len())], m));
    }
    Ok(out)
}

/// Which generator produced a cached table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SequenceProvenance {
    Recurrence,
    DirectHypergeometric,
    DivisorSums,
}

/// `A_0..=A_N` together with `s`, `beta`, `c` for `n = 1..=N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceCache {
    pub a_mix: Vec<BigInt>,
    pub s_vals: Vec<BigInt>,
    pub beta_vals: Vec<BigInt>,
    pub c_mix: Vec<BigInt>,
    pub provenance: SequenceProvenance,
}

#[derive(Serialize, Deserialize)]
struct SequenceCacheJson {
    version: u32,
    n_max: usize,
    provenance: SequenceProvenance,
    a_mix: Vec<String>,
    s_vals: Vec<String>,
    beta_vals: Vec<String>,
    c_mix: Vec<String>,
}

impl SequenceCache {
    pub fn build(n_max: usize, provenance: SequenceProvenance) -> Result<Self, SequenceError> {
        let a_mix = match provenance {
            SequenceProvenance::DirectHypergeometric => a_mix_direct(n_max)?,
            _ => a_mix_recurrence(n_max)?,
        };
        for (n, seed) in SEEDS.iter().enumerate().take(a_mix.len()) {
            if a_mix[n] != big(*seed) {
                return Err(SequenceError::CrossCheck { n });
            }
        }
        let (s, beta) = divisor_sums(n_max + 1);
        let to_big = |v: &[i128]| v[1..].iter().map(|x| BigInt::from(*x)).collect::<Vec<_>>();
        let s_vals = to_big(&s);
        let beta_vals = to_big(&beta);
        let c_mix = s_vals.iter().zip(&beta_vals).map(|(s, b)| big(3) * s - big(27) * b).collect();
        Ok(Self { a_mix, s_vals, beta_vals, c_mix, provenance })
    }

    pub fn n_max(&self) -> usize {
        self.a_mix.len() - 1
    }

    pub fn a(&self, n: usize) -> &BigInt {
        &self.a_mix[n]
    }

    /// `s(n)` for `1 <= n <= N`.
    pub fn s(&self, n: usize) -> &BigInt {
        &self.s_vals[n - 1]
    }

    pub fn beta(&self, n: usize) -> &BigInt {
        &self.beta_vals[n - 1]
    }

    pub fn c(&self, n: usize) -> &BigInt {
        &self.c_mix[n - 1]
    }

    pub fn to_json(&self) -> String {
        let strs = |v: &[BigInt]| v.iter().map(|x| x.to_string()).collect();
        let j = SequenceCacheJson {
            version: SEQUENCE_FORMAT_VERSION,
            n_max: self.n_max(),
            provenance: self.provenance,
            a_mix: strs(&self.a_mix),
            s_vals: strs(&self.s_vals),
            beta_vals: strs(&self.beta_vals),
            c_mix: strs(&self.c_mix),
        };
        serde_json::to_string(&j).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, SequenceError> {
        let j: SequenceCacheJson = serde_json::from_str(text).map_err(|e| SequenceError::Format(e.to_string()))?;
        if j.version != SEQUENCE_FORMAT_VERSION {
            return Err(SequenceError::Format(format!("unsupported version {}", j.version)));
        }
        let parse = |v: &[String]| {
            v.iter()
                .map(|s| s.parse::<BigInt>().map_err(|_| SequenceError::Format(format!("bad integer {s:?}"))))
                .collect::<Result<Vec<_>, _>>()
        };
        let cache = Self {
            a_mix: parse(&j.a_mix)?,
            s_vals: parse(&j.s_vals)?,
            beta_vals: parse(&j.beta_vals)?,
            c_mix: parse(&j.c_mix)?,
            provenance: j.provenance,
        };
        if cache.a_mix.len() != j.n_max + 1
            || [&cache.s_vals, &cache.beta_vals, &cache.c_mix].iter().any(|v| v.len() != j.n_max)
        {
            return Err(SequenceError::Format("table lengths do not match n_max".into()));
        }
        Ok(cache)
    }

    pub fn save(&self, path: &Path) -> Result<(), SequenceError> {
        fs::write(path, self.to_json())?;
        Ok(())
    }

    /// Loads a cached table covering at least `n_max`, truncated to it.
    pub fn load(path: &Path, n_max: usize) -> Result<Self, SequenceError> {
        let mut cache = Self::from_json(&fs::read_to_string(path)?)?;
        if cache.n_max() < n_max {
            return Err(SequenceError::Format(format!("cache covers n <= {}, need {n_max}", cache.n_max())));
        }
        cache.a_mix.truncate(n_max + 1);
        cache.s_vals.truncate(n_max);
        cache.beta_vals.truncate(n_max);
        cache.c_mix.truncate(n_max);
        Ok(cache)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recurrence_first_terms() {
        let a = a_mix_recurrence(6).unwrap();
        let want = [1i64, 18, 864, 55152, 4035906, 320012532, 26749991016];
        assert_eq!(a, want.iter().map(|v| big(*v)).collect::<Vec<_>>());
        assert_eq!(a_mix_recurrence(0).unwrap(), vec![big(1)]);
    }

    #[test]
    fn recurrence_step_zero_by_hand() {
        // 16 A_2 = 6*158*18 - 324*1*1*2*5*1
        assert_eq!(recurrence_coeff_1(0) * 18 - recurrence_coeff_0(0), big(13824));
        assert_eq!(recurrence_coeff_2(0), big(16));
    }

    #[test]
    fn direct_matches_recurrence() {
        assert_eq!(a_mix_direct(30).unwrap(), a_mix_recurrence(30).unwrap());
        assert_eq!(l2_annihilates(&a_mix_direct(30).unwrap()), None);
    }

    #[test]
    fn divisor_sum_heads() {
        let (s, beta) = divisor_sums(6);
        assert_eq!(&s[1..], &[1, -15, 1, 241, -624]);
        assert_eq!(&beta[1..], &[1, 15, 81, 241, 624]);
        assert_eq!(c_mix_table(2), vec![1, -24]);
        assert_eq!(beta_at(5) - beta_at(1), big(625 - 2));
        assert_eq!(s_at(7), big(2402));
        assert_eq!(c_mix_at(7), big(-24 * 2402));
    }

    #[test]
    fn cache_round_trip() {
        let c = SequenceCache::build(10, SequenceProvenance::Recurrence).unwrap();
        let back = SequenceCache::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        assert_eq!(c.c(1), &big(-24));
        assert!(SequenceCache::from_json("{\"version\":9}").is_err());
    }
}
