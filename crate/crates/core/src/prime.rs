use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ring::is_prime;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PrimeError {
    #[error("p=3 excluded: the level itself is not an admissible prime")]
    LevelPrime,
    #[error("{0} is not prime")]
    Composite(u64),
    #[error("p={0} is below the supported range (p >= 5)")]
    TooSmall(u64),
    #[error("precision {precision} is too small for p={p} (need at least p+1)")]
    PrecisionTooSmall { p: u64, precision: usize },
}

/// Splitting behaviour of `p` in `Q(sqrt(-3))`, i.e. the value of the
/// quadratic character mod 3 at `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Splitting {
    Split,
    Inert,
}

/// A prime `p >= 5` with its working parameters.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeContext {
    pub p: u64,
    /// `chi_3(p)`: +1 for `p = 1 mod 3`, -1 for `p = 2 mod 3`.
    pub chi3: i64,
    /// q-precision of the dictionary; defaults to `5p^2`.
    pub default_precision: usize,
    /// Target modulus `p^K` of the congruences.
    pub modulus_exponent: u32,
    /// Extra digits carried by the residue backend.
    pub guard_digits: u32,
    /// Largest pole order any Laurent intermediate may reach.
    pub pole_cap: usize,
}

impl PrimeContext {
    pub fn new(p: u64) -> Result<Self, PrimeError> {
        if p == 3 {
            return Err(PrimeError::LevelPrime);
        }
        if p < 5 {
            return Err(PrimeError::TooSmall(p));
        }
        if !is_prime(p) {
            return Err(PrimeError::Composite(p));
        }
        let chi3 = if p % 3 == 1 { 1 } else { -1 };
        let p_us = p as usize;
        Ok(Self {
            p,
            chi3,
            default_precision: 5 * p_us * p_us,
            modulus_exponent: 4,
            guard_digits: 2,
            pole_cap: 4 * p_us * p_us,
        })
    }

    pub fn with_precision(mut self, precision: usize) -> Result<Self, PrimeError> {
        if precision < self.p as usize + 1 {
            return Err(PrimeError::PrecisionTooSmall { p: self.p, precision });
        }
        self.default_precision = precision;
        Ok(self)
    }

    pub fn splitting(&self) -> Splitting {
        if self.chi3 == 1 {
            Splitting::Split
        } else {
            Splitting::Inert
        }
    }

    pub fn is_split(&self) -> bool {
        self.chi3 == 1
    }

    /// Digits the residue backend must carry so that results are exact
    /// modulo `p^(K+guard)` after every division by `p`-powers in the log/exp sums.
    pub fn working_digits(&self) -> u32 {
        let target = self.modulus_exponent + self.guard_digits;
        target + crate::series::log_headroom(self.p, target)
    }

    /// Dictionary precision used by the harness: `default_precision + p`,
    /// so Cartier extraction reaches `q^{default_precision / p}` inclusive.
    pub fn working_precision(&self) -> usize {
        self.default_precision + self.p as usize
    }

    /// `p^e` as an exact integer (panics on overflow of `u128`).
    pub fn power(&self, e: u32) -> u128 {
        (self.p as u128).pow(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification() {
        assert_eq!(PrimeContext::new(7).unwrap().splitting(), Splitting::Split);
        assert_eq!(PrimeContext::new(5).unwrap().chi3, -1);
        assert_eq!(PrimeContext::new(11).unwrap().chi3, -1);
        assert_eq!(PrimeContext::new(13).unwrap().default_precision, 845);
    }

    #[test]
    fn rejects_bad_primes() {
        assert_eq!(PrimeContext::new(3), Err(PrimeError::LevelPrime));
        assert_eq!(PrimeContext::new(9), Err(PrimeError::Composite(9)));
        assert_eq!(PrimeContext::new(2), Err(PrimeError::TooSmall(2)));
        assert!(PrimeContext::new(7).unwrap().with_precision(7).is_err());
        assert!(PrimeContext::new(7).unwrap().with_precision(8).is_ok());
    }

    #[test]
    fn working_digits_include_log_headroom() {
        // k - floor(log_5 k) >= 6 first at k = 7, and v_5(5) = 1
        assert_eq!(PrimeContext::new(5).unwrap().working_digits(), 7);
        assert_eq!(PrimeContext::new(7).unwrap().working_digits(), 6);
    }
}
