//! Truncated Laurent q-series over a pluggable coefficient ring.
//!
//! A [`Series`] stores the dense coefficients `a_L, ..., a_{N-1}` of
//! `sum a_n q^n + O(q^N)`, where `L` is the lowest stored exponent and `N` the
//! precision. Coefficients at exponents `>= N` are unknown, never zero. Every
//! operation propagates precision conservatively, so results never claim more
//! than their inputs determine.
//!
//! The lowest exponent is kept normalized to the first nonzero coefficient; the
//! zero series has `lowest == precision` and no stored coefficients.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::prime::PrimeContext;
use crate::ring::{Integers, PadicRing, Residues, Ring, RingDescriptor, RingError, Valuation};

/// Hard ceiling on pole orders, independent of any per-prime cap.
pub const MAX_POLE_ORDER: i64 = 1 << 24;

pub const SERIES_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(RingDescriptor, RingDescriptor),
    #[error("leading coefficient at q^{exponent} is not a unit")]
    NonUnitLeading { exponent: i64 },
    #[error("cannot invert the zero series")]
    ZeroInverse,
    #[error("lowest exponent {lowest} exceeds precision {precision}")]
    InvalidShape { lowest: i64, precision: i64 },
    #[error("pole order {order} exceeds the cap {cap}")]
    PoleCapExceeded { order: i64, cap: i64 },
    #[error("log/exp argument has the wrong constant term")]
    BadConstantTerm,
    #[error("coefficient of q^{exponent} is not divisible by p (not a Frobenius-compatible input)")]
    NotDivisibleByP { exponent: i64 },
    #[error("coefficient of q^{exponent} is not divisible by p^{power}")]
    InexactDivision { exponent: i64, power: u32 },
    #[error("residue ring carries too few digits for this operation")]
    InsufficientDigits,
    #[error("series format: {0}")]
    Format(String),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// Multiplication algorithm for [`Series::mul_with`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MulKernel {
    #[default]
    Schoolbook,
    Karatsuba,
}

const KARATSUBA_CUTOFF: usize = 32;

#[derive(Clone, Debug, PartialEq)]
pub struct Series<R: Ring> {
    ring: R,
    lowest: i64,
    coeffs: Vec<R::Elem>,
    precision: i64,
}

/// `ceil(a / b)` for `b > 0`.
pub fn div_ceil(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

impl<R: Ring> Series<R> {
    /// Builds a series from coefficients starting at `lowest`; extra entries
    /// beyond the precision are dropped and missing ones are zero.
    pub fn new(
        ring: R,
        lowest: i64,
        mut coeffs: Vec<R::Elem>,
        precision: i64,
    ) -> Result<Self, SeriesError> {
        if lowest > precision {
            return Err(SeriesError::InvalidShape { lowest, precision });
        }
        coeffs.resize((precision - lowest) as usize, ring.zero());
        Ok(Self::normalized(ring, lowest, coeffs, precision))
    }

    fn normalized(ring: R, lowest: i64, mut coeffs: Vec<R::Elem>, precision: i64) -> Self {
        debug_assert_eq!(coeffs.len() as i64, precision - lowest);
        match coeffs.iter().position(|c| !ring.is_zero(c)) {
            Some(0) => Self { ring, lowest, coeffs, precision },
            Some(i) => {
                coeffs.drain(..i);
                Self { ring, lowest: lowest + i as i64, coeffs, precision }
            }
            None => Self { ring, lowest: precision, coeffs: Vec::new(), precision },
        }
    }

    pub fn zero(ring: R, precision: i64) -> Self {
        Self { ring, lowest: precision, coeffs: Vec::new(), precision }
    }

    pub fn one(ring: R, precision: i64) -> Self {
        let one = ring.one();
        Self::monomial(ring, 0, one, precision)
    }

    /// `c q^exponent + O(q^precision)`.
    pub fn monomial(ring: R, exponent: i64, c: R::Elem, precision: i64) -> Self {
        if exponent >= precision || ring.is_zero(&c) {
            return Self::zero(ring, precision);
        }
        let mut coeffs = vec![ring.zero(); (precision - exponent) as usize];
        coeffs[0] = c;
        Self { ring, lowest: exponent, coeffs, precision }
    }

    pub fn from_i64s(ring: R, lowest: i64, values: &[i64], precision: i64) -> Result<Self, SeriesError> {
        let coeffs = values.iter().map(|v| ring.from_i64(*v)).collect();
        Self::new(ring, lowest, coeffs, precision)
    }

    /// Coefficients produced by `f(n)` for `lowest <= n < precision`.
    pub fn from_fn(
        ring: R,
        lowest: i64,
        precision: i64,
        mut f: impl FnMut(i64) -> R::Elem,
    ) -> Result<Self, SeriesError> {
        if lowest > precision {
            return Err(SeriesError::InvalidShape { lowest, precision });
        }
        let coeffs = (lowest..precision).map(&mut f).collect();
        Ok(Self::normalized(ring, lowest, coeffs, precision))
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn lowest_exponent(&self) -> i64 {
        self.lowest
    }

    pub fn precision(&self) -> i64 {
        self.precision
    }

    /// Dense coefficients from [`Series::lowest_exponent`] up to the precision.
    pub fn coefficients(&self) -> &[R::Elem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_power_series(&self) -> bool {
        self.lowest >= 0
    }

    /// Order of the first nonzero coefficient; `None` for the zero series.
    pub fn order(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.lowest)
    }

    /// Coefficient of `q^n`, or `None` if `n` is beyond the precision.
    pub fn coeff(&self, n: i64) -> Option<R::Elem> {
        if n >= self.precision {
            None
        } else if n < self.lowest {
            Some(self.ring.zero())
        } else {
            Some(self.coeffs[(n - self.lowest) as usize].clone())
        }
    }

    /// `(exponent, coefficient)` pairs over the stored range.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &R::Elem)> {
        self.coeffs.iter().enumerate().map(move |(i, c)| (self.lowest + i as i64, c))
    }

    /// Drops everything at exponents `>= precision` (no-op if already coarser).
    pub fn truncated(&self, precision: i64) -> Self {
        if precision >= self.precision {
            return self.clone();
        }
        if precision <= self.lowest {
            return Self::zero(self.ring.clone(), precision);
        }
        let coeffs = self.coeffs[..(precision - self.lowest) as usize].to_vec();
        Self::normalized(self.ring.clone(), self.lowest, coeffs, precision)
    }

    fn same_ring(&self, other: &Self) -> Result<(), SeriesError> {
        if self.ring != other.ring {
            return Err(SeriesError::RingMismatch(self.ring.descriptor(), other.ring.descriptor()));
        }
        Ok(())
    }

    fn combine(
        &self,
        other: &Self,
        op: impl Fn(&R, &R::Elem, &R::Elem) -> R::Elem,
    ) -> Result<Self, SeriesError> {
        self.same_ring(other)?;
        let precision = self.precision.min(other.precision);
        let lowest = self.lowest.min(other.lowest).min(precision);
        let zero = self.ring.zero();
        let coeffs = (lowest..precision)
            .map(|n| {
                let a = self.get(n).unwrap_or(&zero);
                let b = other.get(n).unwrap_or(&zero);
                op(&self.ring, a, b)
            })
            .collect();
        Ok(Self::normalized(self.ring.clone(), lowest, coeffs, precision))
    }

    fn get(&self, n: i64) -> Option<&R::Elem> {
        if n < self.lowest || n >= self.precision {
            None
        } else {
            self.coeffs.get((n - self.lowest) as usize)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.combine(other, |r, a, b| r.add(a, b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.combine(other, |r, a, b| r.sub(a, b))
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|c| self.ring.neg(c)).collect();
        Self { ring: self.ring.clone(), lowest: self.lowest, coeffs, precision: self.precision }
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        let coeffs = self.coeffs.iter().map(|a| self.ring.mul(a, c)).collect();
        Self::normalized(self.ring.clone(), self.lowest, coeffs, self.precision)
    }

    pub fn scale_i64(&self, c: i64) -> Self {
        self.scale(&self.ring.from_i64(c))
    }

    /// Multiplication by `q^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            ring: self.ring.clone(),
            lowest: self.lowest + k,
            coeffs: self.coeffs.clone(),
            precision: self.precision + k,
        }
    }

    /// Shape `(lowest, precision)` of a product.
    fn product_shape(&self, other: &Self) -> (i64, i64) {
        let lowest = self.lowest + other.lowest;
        let precision = (self.precision + other.lowest).min(other.precision + self.lowest);
        (lowest, precision)
    }

    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.mul_with(other, MulKernel::Schoolbook)
    }

    pub fn mul_with(&self, other: &Self, kernel: MulKernel) -> Result<Self, SeriesError> {
        self.same_ring(other)?;
        let (lowest, precision) = self.product_shape(other);
        if lowest >= precision {
            return Ok(Self::zero(self.ring.clone(), precision));
        }
        let count = (precision - lowest) as usize;
        let coeffs = match kernel {
            MulKernel::Schoolbook => self.ring.convolve_strided(&self.coeffs, &other.coeffs, 0, 1, count),
            MulKernel::Karatsuba => {
                let a = &self.coeffs[..count.min(self.coeffs.len())];
                let b = &other.coeffs[..count.min(other.coeffs.len())];
                let mut full = karatsuba(&self.ring, a, b);
                full.resize(count, self.ring.zero());
                full
            }
        };
        Ok(Self::normalized(self.ring.clone(), lowest, coeffs, precision))
    }

    /// `Λ_p(self · other)`, computing only the coefficients the Cartier
    /// operator keeps.
    pub fn mul_cartier(&self, other: &Self, p: u64) -> Result<Self, SeriesError> {
        self.same_ring(other)?;
        let p = p as i64;
        let (lowest, precision) = self.product_shape(other);
        let out_lo = div_ceil(lowest, p);
        let out_hi = div_ceil(precision, p);
        if out_lo >= out_hi {
            return Ok(Self::zero(self.ring.clone(), out_hi));
        }
        let start = (p * out_lo - lowest) as usize;
        let count = (out_hi - out_lo) as usize;
        let coeffs = self.ring.convolve_strided(&self.coeffs, &other.coeffs, start, p as usize, count);
        Ok(Self::normalized(self.ring.clone(), out_lo, coeffs, out_hi))
    }

    /// Multiplicative inverse. The leading coefficient must be a unit; a
    /// series `q^v (c + ...)` known to precision `N` inverts to precision `N - 2v`.
    pub fn invert(&self) -> Result<Self, SeriesError> {
        if self.is_zero() {
            return Err(SeriesError::ZeroInverse);
        }
        let inv0 = self
            .ring
            .inv(&self.coeffs[0])
            .ok_or(SeriesError::NonUnitLeading { exponent: self.lowest })?;
        check_pole(-self.lowest)?;
        let n = self.coeffs.len();
        let neg_inv0 = self.ring.neg(&inv0);
        let mut b = Vec::with_capacity(n);
        b.push(inv0);
        let tail = &self.coeffs[1..];
        for k in 1..n {
            let s = self.ring.convolution_coeff(tail, &b[..k], k - 1);
            b.push(self.ring.mul(&neg_inv0, &s));
        }
        Ok(Self::normalized(self.ring.clone(), -self.lowest, b, self.precision - 2 * self.lowest))
    }

    /// Integer power by binary powering; negative exponents invert first.
    pub fn pow(&self, e: i64) -> Result<Self, SeriesError> {
        if e < 0 {
            return self.invert()?.pow(-e);
        }
        check_pole(-self.lowest.saturating_mul(e))?;
        let rel = self.precision - self.lowest;
        let mut result = Self::one(self.ring.clone(), rel.max(0));
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    /// Cartier operator `Λ_p: sum a_n q^n -> sum a_{pn} q^n`.
    pub fn cartier(&self, p: u64) -> Self {
        let p = p as i64;
        let out_lo = div_ceil(self.lowest, p);
        let out_hi = div_ceil(self.precision, p);
        if out_lo >= out_hi {
            return Self::zero(self.ring.clone(), out_hi);
        }
        let coeffs = (out_lo..out_hi)
            .map(|n| self.coeffs[(p * n - self.lowest) as usize].clone())
            .collect();
        Self::normalized(self.ring.clone(), out_lo, coeffs, out_hi)
    }

    /// Frobenius substitution `q -> q^p`.
    pub fn verschiebung(&self, p: u64) -> Self {
        let p = p as i64;
        let lowest = self.lowest * p;
        let precision = self.precision * p;
        let mut coeffs = vec![self.ring.zero(); (precision - lowest) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * p as usize] = c.clone();
        }
        Self { ring: self.ring.clone(), lowest, coeffs, precision }
    }

    /// Minimum p-adic valuation over the known coefficients.
    pub fn p_valuation(&self, p: u64) -> Result<Valuation, SeriesError> {
        let mut best = Valuation::Infinite;
        for c in &self.coeffs {
            best = best.min(self.ring.valuation(c, p)?);
        }
        Ok(best)
    }

    /// Coefficientwise reduction into `Z/p^k`.
    pub fn reduce_mod(&self, p: u64, k: u32) -> Result<Series<Residues>, SeriesError> {
        let target = Residues::new(p, k)?;
        self.reduce_into(&target)
    }

    pub fn reduce_into(&self, target: &Residues) -> Result<Series<Residues>, SeriesError> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| self.ring.reduce(c, target))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Series::normalized(*target, self.lowest, coeffs, self.precision))
    }

    /// First exponent (below the common precision) where the two series differ.
    pub fn first_mismatch(&self, other: &Self) -> Result<Option<i64>, SeriesError> {
        self.same_ring(other)?;
        let precision = self.precision.min(other.precision);
        let lowest = self.lowest.min(other.lowest);
        let zero = self.ring.zero();
        Ok((lowest..precision).find(|&n| self.get(n).unwrap_or(&zero) != other.get(n).unwrap_or(&zero)))
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            version: SERIES_FORMAT_VERSION,
            ring: self.ring.descriptor(),
            lowest_exponent: self.lowest,
            precision: self.precision,
            coefficients: self.coeffs.iter().map(|c| self.ring.to_repr(c)).collect(),
        }
    }

    pub fn from_json(ring: R, json: &SeriesJson) -> Result<Self, SeriesError> {
        if json.version != SERIES_FORMAT_VERSION {
            return Err(SeriesError::Format(format!("unsupported version {}", json.version)));
        }
        if json.ring != ring.descriptor() {
            return Err(SeriesError::RingMismatch(json.ring.clone(), ring.descriptor()));
        }
        if json.lowest_exponent > json.precision
            || json.coefficients.len() as i64 != json.precision - json.lowest_exponent
        {
            return Err(SeriesError::Format("coefficient count does not match the shape".into()));
        }
        let coeffs = json
            .coefficients
            .iter()
            .map(|s| ring.parse_repr(s))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::normalized(ring, json.lowest_exponent, coeffs, json.precision))
    }
}

impl Series<Integers> {
    /// Image under the canonical map `Z -> R`.
    pub fn convert<S: Ring>(&self, target: S) -> Series<S> {
        let coeffs = self.coeffs.iter().map(|c| target.from_bigint(c)).collect();
        Series::normalized(target, self.lowest, coeffs, self.precision)
    }
}

impl<R: PadicRing> Series<R> {
    /// Exact division of every coefficient by `p^e`; the result lives in the
    /// ring [`PadicRing::lowered`]`(e)`.
    pub fn divide_by_p_power(&self, e: u32) -> Result<Self, SeriesError> {
        let ring = self.ring.lowered(e)?;
        let coeffs = self
            .terms()
            .map(|(n, c)| {
                self.ring
                    .div_p_power(c, e)
                    .ok_or(SeriesError::InexactDivision { exponent: n, power: e })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::normalized(ring, self.lowest, coeffs, self.precision))
    }

    /// Canonical image in a ring carrying fewer digits.
    pub fn coarsen(&self, target: &R) -> Result<Self, SeriesError> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| self.ring.coarsen(target, c))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::normalized(target.clone(), self.lowest, coeffs, self.precision))
    }

    /// First exponent where `self` and `other` differ modulo `p^k`, comparing
    /// over the common precision.
    pub fn first_incongruence(&self, other: &Self, k: u32) -> Result<Option<i64>, SeriesError> {
        let p = self.ring.prime();
        let target = self.ring.with_exponent(k)?;
        let a = self.coarsen(&target)?;
        let b = other.coarsen(&target)?;
        let d = a.sub(&b)?;
        for (n, c) in d.terms() {
            if target.valuation(c, p)? < Valuation::Finite(k) {
                return Ok(Some(n));
            }
        }
        Ok(None)
    }

    /// First exponent whose coefficient is nonzero modulo `p^k`.
    pub fn first_nonvanishing(&self, k: u32) -> Result<Option<i64>, SeriesError> {
        self.first_incongruence(&Self::zero(self.ring.clone(), self.precision), k)
    }

    fn check_frobenius_shape(&self, want_constant_one: bool) -> Result<Self, SeriesError> {
        let p = self.ring.prime();
        let h = if want_constant_one {
            if self.lowest != 0 || self.coeffs[0] != self.ring.one() {
                return Err(SeriesError::BadConstantTerm);
            }
            self.sub(&Self::one(self.ring.clone(), self.precision))?
        } else {
            if self.lowest < 1 {
                return Err(SeriesError::BadConstantTerm);
            }
            self.clone()
        };
        for (n, c) in h.terms() {
            if let Valuation::Finite(0) = self.ring.valuation(c, p)? {
                return Err(SeriesError::NotDivisibleByP { exponent: n });
            }
        }
        Ok(h)
    }

    /// `log(1+h)` for `self = 1+h` with `h ∈ pq·Z_(p)[[q]]`, using the context's
    /// `K + guard` digits as the target.
    pub fn log1p_scaled(&self, ctx: &PrimeContext) -> Result<Self, SeriesError> {
        self.log1p_to(ctx.modulus_exponent + ctx.guard_digits)
    }

    /// `log(1+h) = sum (-1)^{k+1} h^k / k`, summed while terms can still be
    /// nonzero modulo `p^target`. Residue inputs lose the digits consumed by the
    /// p-parts of `k`.
    pub fn log1p_to(&self, target: u32) -> Result<Self, SeriesError> {
        let p = self.ring.prime();
        let h = self.check_frobenius_shape(true)?;
        let kmax = log_terms(p, target);
        let headroom = (1..=kmax).map(|k| p_part(k, p).0).max().unwrap_or(0);
        let out_ring = self.output_ring(headroom, target)?;
        let mut sum = Self::zero(out_ring.clone(), self.precision);
        let mut hk = Self::one(self.ring.clone(), self.precision);
        for k in 1..=kmax {
            hk = hk.mul(&h)?;
            if hk.is_zero() {
                break;
            }
            let (v, unit) = p_part(k, p);
            let inv = out_ring.inv(&out_ring.from_i64(unit as i64)).expect("unit part of k");
            let term = hk.divide_by_p_power(v)?.coarsen(&out_ring)?.scale(&inv);
            sum = if k % 2 == 1 { sum.add(&term)? } else { sum.sub(&term)? };
        }
        Ok(sum)
    }

    /// `exp(x) = sum x^k / k!` for `x ∈ pq·Z_(p)[[q]]`, truncated once the tail
    /// vanishes modulo `p^target`.
    pub fn exp_to(&self, target: u32) -> Result<Self, SeriesError> {
        let p = self.ring.prime();
        let x = if self.is_zero() { self.clone() } else { self.check_frobenius_shape(false)? };
        let kcount = exp_terms(p, target);
        let headroom = factorial_p_part(kcount - 1, p).0;
        let out_ring = self.output_ring(headroom, target)?;
        let mut sum = Self::one(out_ring.clone(), self.precision);
        let mut xk = Self::one(self.ring.clone(), self.precision);
        for k in 1..kcount {
            xk = xk.mul(&x)?;
            if xk.is_zero() {
                break;
            }
            let (v, unit) = factorial_p_part(k, p);
            let unit = out_ring.from_bigint(&unit);
            let inv = out_ring.inv(&unit).expect("unit part of k!");
            let term = xk.divide_by_p_power(v)?.coarsen(&out_ring)?.scale(&inv);
            sum = sum.add(&term)?;
        }
        Ok(sum)
    }

    fn output_ring(&self, headroom: u32, target: u32) -> Result<R, SeriesError> {
        match self.ring.exponent() {
            Some(w) => {
                let avail = w.checked_sub(headroom).filter(|a| *a >= 1).ok_or(SeriesError::InsufficientDigits)?;
                Ok(self.ring.with_exponent(avail.min(target))?)
            }
            None => Ok(self.ring.clone()),
        }
    }
}

fn check_pole(order: i64) -> Result<(), SeriesError> {
    if order > MAX_POLE_ORDER {
        return Err(SeriesError::PoleCapExceeded { order, cap: MAX_POLE_ORDER });
    }
    Ok(())
}

/// `(v_p(k), k / p^{v_p(k)})`.
pub fn p_part(k: u64, p: u64) -> (u32, u64) {
    let mut v = 0;
    let mut k = k;
    while k.is_multiple_of(p) {
        k /= p;
        v += 1;
    }
    (v, k)
}

/// `(v_p(k!), k! / p^{v_p(k!)})`.
pub fn factorial_p_part(k: u64, p: u64) -> (u32, BigInt) {
    let mut v = 0;
    let mut unit = BigInt::from(1);
    for i in 1..=k {
        let (vi, ui) = p_part(i, p);
        v += vi;
        unit *= ui;
    }
    (v, unit)
}

fn floor_log(k: u64, p: u64) -> u32 {
    let mut l = 0;
    let mut x = k;
    while x >= p {
        x /= p;
        l += 1;
    }
    l
}

/// Smallest `k` with `k - floor(log_p k) >= target`; every log term beyond it
/// vanishes modulo `p^target`.
pub fn log_terms(p: u64, target: u32) -> u64 {
    let mut k = 1u64;
    while (k as i64) - (floor_log(k, p) as i64) < target as i64 {
        k += 1;
    }
    k
}

/// Digits consumed by the p-parts of `k` in the log sum up to [`log_terms`].
pub fn log_headroom(p: u64, target: u32) -> u32 {
    (1..=log_terms(p, target)).map(|k| p_part(k, p).0).max().unwrap_or(0)
}

/// Number of exp terms `k = 0, 1, ...` needed: beyond it `k - v_p(k!) >= target`.
pub fn exp_terms(p: u64, target: u32) -> u64 {
    // v_p(k!) <= (k-1)/(p-1), and k - floor((k-1)/(p-1)) is nondecreasing in k
    let mut k = 1u64;
    while (k as i64) - ((k as i64 - 1) / (p as i64 - 1)) < target as i64 {
        k += 1;
    }
    k
}

fn karatsuba<R: Ring>(ring: &R, a: &[R::Elem], b: &[R::Elem]) -> Vec<R::Elem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let out_len = a.len() + b.len() - 1;
    if a.len().min(b.len()) <= KARATSUBA_CUTOFF {
        return ring.convolve_strided(a, b, 0, 1, out_len);
    }
    let m = a.len().max(b.len()) / 2;
    let (a0, a1) = a.split_at(m.min(a.len()));
    let (b0, b1) = b.split_at(m.min(b.len()));
    let z0 = karatsuba(ring, a0, b0);
    let z2 = karatsuba(ring, a1, b1);
    let sa = add_slices(ring, a0, a1);
    let sb = add_slices(ring, b0, b1);
    let z1 = karatsuba(ring, &sa, &sb);
    let mut out = vec![ring.zero(); out_len];
    for (i, c) in z0.iter().enumerate() {
        out[i] = ring.add(&out[i], c);
    }
    for (i, c) in z1.iter().enumerate() {
        let mid = ring.sub(c, z0.get(i).unwrap_or(&ring.zero()));
        let mid = ring.sub(&mid, z2.get(i).unwrap_or(&ring.zero()));
        if i + m < out_len {
            out[i + m] = ring.add(&out[i + m], &mid);
        }
    }
    for (i, c) in z2.iter().enumerate() {
        out[i + 2 * m] = ring.add(&out[i + 2 * m], c);
    }
    out
}

fn add_slices<R: Ring>(ring: &R, a: &[R::Elem], b: &[R::Elem]) -> Vec<R::Elem> {
    let n = a.len().max(b.len());
    let zero = ring.zero();
    (0..n)
        .map(|i| ring.add(a.get(i).unwrap_or(&zero), b.get(i).unwrap_or(&zero)))
        .collect()
}

/// Versioned JSON form of a series (coefficients as decimal strings).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub version: u32,
    pub ring: RingDescriptor,
    pub lowest_exponent: i64,
    pub precision: i64,
    pub coefficients: Vec<String>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::LocalizedRationals;

    fn z(lowest: i64, v: &[i64], n: i64) -> Series<Integers> {
        Series::from_i64s(Integers, lowest, v, n).unwrap()
    }

    #[test]
    fn add_examples() {
        assert_eq!(z(0, &[1, 1], 5).add(&z(1, &[1], 5)).unwrap(), z(0, &[1, 2], 5));
        let a = z(-2, &[3, 0, 1, 4], 6);
        assert_eq!(a.add(&Series::zero(Integers, 6)).unwrap(), a);
        let s = z(-1, &[1, 1], 4).add(&z(-1, &[-1], 4)).unwrap();
        assert_eq!(s.lowest_exponent(), 0);
        assert_eq!(s, z(0, &[1], 4));
    }

    #[test]
    fn precision_is_min_on_add() {
        let s = z(0, &[1, 1, 1], 10).add(&z(0, &[1], 4)).unwrap();
        assert_eq!(s.precision(), 4);
    }

    #[test]
    fn mul_examples() {
        let p = z(0, &[1, 1], 6).mul(&z(0, &[1, -1], 6)).unwrap();
        assert_eq!(p, z(0, &[1, 0, -1], 6));
        let m = z(-2, &[1], 3).mul(&z(3, &[1], 8)).unwrap();
        assert_eq!(m.lowest_exponent(), 1);
        assert_eq!(m.coeff(1), Some(BigInt::from(1)));
        assert_eq!(m.precision(), 6); // min(3 + 3, 8 - 2)
    }

    #[test]
    fn ring_mismatch_is_an_error() {
        let a = Series::one(Residues::new(7, 2).unwrap(), 4);
        let b = Series::one(Residues::new(7, 3).unwrap(), 4);
        assert!(matches!(a.add(&b), Err(SeriesError::RingMismatch(..))));
        assert!(matches!(a.mul(&b), Err(SeriesError::RingMismatch(..))));
    }

    #[test]
    fn invert_examples() {
        let inv = z(0, &[1, -1], 8).invert().unwrap();
        assert_eq!(inv, z(0, &[1; 8], 8));
        let inv = z(1, &[1, 1], 8).invert().unwrap();
        assert_eq!(inv.lowest_exponent(), -1);
        assert_eq!(inv.precision(), 6);
        assert_eq!(inv, z(-1, &[1, -1, 1, -1, 1, -1, 1], 6));
        assert!(matches!(z(0, &[2, 1], 4).invert(), Err(SeriesError::NonUnitLeading { exponent: 0 })));
        let r = Residues::new(5, 3).unwrap();
        let s = Series::from_i64s(r, 0, &[10, 1], 4).unwrap();
        assert!(matches!(s.invert(), Err(SeriesError::NonUnitLeading { .. })));
    }

    #[test]
    fn pow_examples() {
        assert_eq!(z(0, &[1, 1], 5).pow(2).unwrap(), z(0, &[1, 2, 1], 5));
        assert_eq!(z(0, &[1, 5, 3], 5).pow(0).unwrap(), z(0, &[1], 5));
        let inv2 = z(0, &[1, -1], 6).pow(-2).unwrap();
        assert_eq!(inv2, z(0, &[1, 2, 3, 4, 5, 6], 6));
    }

    #[test]
    fn cartier_and_verschiebung() {
        let f = z(0, &[1, 2, 0, 0, 0, 3, 0, 0, 0, 0, 4], 11);
        assert_eq!(f.cartier(5), z(0, &[1, 3, 4], 3));
        let mut v = vec![0; 15];
        v[0] = 1;
        v[14] = 1;
        let g = z(-14, &v, 1);
        let c = g.cartier(7);
        assert_eq!(c.lowest_exponent(), -2);
        assert_eq!(c.coeff(-2), Some(BigInt::from(1)));
        assert_eq!(c.coeff(-1), Some(BigInt::from(0)));
        assert_eq!(z(0, &[1, 1], 5).verschiebung(3), z(0, &[1, 0, 0, 1], 15));
    }

    #[test]
    fn cartier_precision_rounds_up() {
        assert_eq!(z(0, &[1], 245).cartier(7).precision(), 35);
        assert_eq!(z(0, &[1], 252).cartier(7).precision(), 36);
    }

    #[test]
    fn mul_cartier_matches_two_step() {
        let a = z(-3, &[1, 4, -2, 7, 9, 1, 0, 3, 5, 2, 1, 8], 9);
        let b = z(1, &[2, -5, 1, 3, 3, 0, 7], 8);
        assert_eq!(a.mul_cartier(&b, 3).unwrap(), a.mul(&b).unwrap().cartier(3));
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(z(1, &[7, 49], 3).p_valuation(7).unwrap(), Valuation::Finite(1));
        assert_eq!(Series::zero(Integers, 9).p_valuation(7).unwrap(), Valuation::Infinite);
    }

    #[test]
    fn reduce_examples() {
        let q7 = LocalizedRationals::new(7).unwrap();
        let half = q7.element(BigInt::from(1), BigInt::from(2)).unwrap();
        let s = Series::new(q7, 0, vec![half], 1).unwrap();
        assert_eq!(s.reduce_mod(7, 2).unwrap().coeff(0), Some(25));
        assert!(z(0, &[7, 14, 21], 3).reduce_mod(7, 1).unwrap().is_zero());
        let bad = Series::new(q7, 0, vec![num_rational::BigRational::new(1.into(), 7.into())], 1);
        // constructing via Series::new does not validate, but reduction does
        assert!(bad.unwrap().reduce_mod(7, 2).is_err());
    }

    #[test]
    fn divide_by_p_power_lowers_the_ring() {
        let r = Residues::new(7, 6).unwrap();
        let s = Series::from_i64s(r, 1, &[49, 98, 343], 4).unwrap();
        let d = s.divide_by_p_power(2).unwrap();
        assert_eq!(d.ring().digits(), 4);
        assert_eq!(d.coefficients(), &[1, 2, 7]);
        assert!(matches!(s.divide_by_p_power(3), Err(SeriesError::InexactDivision { exponent: 1, power: 3 })));
    }

    #[test]
    fn log_of_one_is_zero() {
        let r = Residues::new(7, 6).unwrap();
        assert!(Series::one(r, 20).log1p_to(6).unwrap().is_zero());
    }

    #[test]
    fn log_rejects_bad_inputs() {
        let r = Residues::new(7, 6).unwrap();
        let s = Series::from_i64s(r, 0, &[1, 3], 5).unwrap();
        assert!(matches!(s.log1p_to(6), Err(SeriesError::NotDivisibleByP { exponent: 1 })));
        let s = Series::from_i64s(r, 0, &[2, 7], 5).unwrap();
        assert!(matches!(s.log1p_to(6), Err(SeriesError::BadConstantTerm)));
    }

    #[test]
    fn term_counts() {
        assert_eq!(log_terms(7, 6), 6);
        assert_eq!(log_terms(5, 6), 7);
        assert_eq!(log_headroom(5, 6), 1);
        assert_eq!(log_headroom(7, 6), 0);
        // p = 7: k - floor((k-1)/6) >= 4 first at k = 4
        assert_eq!(exp_terms(7, 4), 4);
    }

    #[test]
    fn json_roundtrip() {
        let s = z(-2, &[3, 0, -1, 12345678901234], 5);
        let j = s.to_json();
        let text = serde_json::to_string(&j).unwrap();
        let back: SeriesJson = serde_json::from_str(&text).unwrap();
        assert_eq!(Series::from_json(Integers, &back).unwrap(), s);
        assert!(Series::from_json(Residues::new(7, 2).unwrap(), &back).is_err());
    }

    #[test]
    fn karatsuba_matches_schoolbook_on_long_inputs() {
        let r = Residues::new(13, 5).unwrap();
        let a = Series::from_fn(r, 0, 150, |n| ((n * n * 31 + 7) % 371293) as u64).unwrap();
        let b = Series::from_fn(r, 2, 140, |n| ((n * 977 + 5) % 371293) as u64).unwrap();
        assert_eq!(a.mul(&b).unwrap(), a.mul_with(&b, MulKernel::Karatsuba).unwrap());
    }
}
