//! Exact q-series arithmetic for level-3 modular forms and their Frobenius
//! structure at primes `p >= 5`.

pub mod cache;
pub mod frobenius;
pub mod modular;
pub mod prime;
pub mod ring;
pub mod sequence;
pub mod series;

pub use prime::{PrimeContext, PrimeError, Splitting};
pub use ring::{Integers, LocalizedRationals, PadicRing, Residues, Ring, RingDescriptor, RingError, Valuation, WideResidues};
pub use series::{MulKernel, Series, SeriesError, SeriesJson};
pub use modular::{build_dictionary, Dictionary, ModularObjectName};
pub use frobenius::FrobeniusDefects;
