//! Exact probability scalars.
//!
//! Everything that decides a condition or certifies an error term is generic
//! over [`Exact`], an ordered field with exact arithmetic. The float side
//! (entropies in bits) only needs [`Exact::to_f64`] and [`Exact::log2`].

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{Num, Signed, ToPrimitive};

pub trait Exact:
    Clone + Ord + Hash + Debug + Display + Num + Signed + Send + Sync + 'static
{
    /// `num / den`. Panics if `den == 0`.
    fn from_ratio(num: u64, den: u64) -> Self;

    /// Parses `"n/d"` or `"n"`. Returns `None` on malformed input or a zero denominator.
    fn parse(text: &str) -> Option<Self>;

    fn to_f64(&self) -> f64;

    /// Base-2 logarithm of a positive value, accurate even when `to_f64` would
    /// underflow or overflow.
    fn log2(&self) -> f64;

    fn from_u64(n: u64) -> Self {
        Self::from_ratio(n, 1)
    }

    /// Plain-text rendering used by every JSON emitter: `"n/d"` in lowest terms, or `"n"`.
    fn to_text(&self) -> String {
        self.to_string()
    }
}

fn bigint_log2(n: &BigInt) -> f64 {
    let bits = n.bits();
    let shift = bits.saturating_sub(64);
    let head = (n >> shift).to_f64().unwrap_or(f64::NAN);
    head.log2() + shift as f64
}

impl Exact for Ratio<BigInt> {
    fn from_ratio(num: u64, den: u64) -> Self {
        Ratio::new(BigInt::from(num), BigInt::from(den))
    }

    fn parse(text: &str) -> Option<Self> {
        Ratio::<BigInt>::from_str(text.trim()).ok()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| self.log2().exp2())
    }

    fn log2(&self) -> f64 {
        debug_assert!(self.is_positive());
        bigint_log2(self.numer()) - bigint_log2(self.denom())
    }
}

macro_rules! impl_exact_for_ratio {
    ($int:ty) => {
        impl Exact for Ratio<$int> {
            fn from_ratio(num: u64, den: u64) -> Self {
                let num = <$int>::try_from(num).expect("numerator out of range");
                let den = <$int>::try_from(den).expect("denominator out of range");
                Ratio::new(num, den)
            }

            fn parse(text: &str) -> Option<Self> {
                Ratio::<$int>::from_str(text.trim()).ok()
            }

            fn to_f64(&self) -> f64 {
                *self.numer() as f64 / *self.denom() as f64
            }

            fn log2(&self) -> f64 {
                debug_assert!(self.is_positive());
                (*self.numer() as f64).log2() - (*self.denom() as f64).log2()
            }
        }
    };
}

impl_exact_for_ratio!(i64);
impl_exact_for_ratio!(i128);

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> num_bigint::BigUint {
    if k > n {
        return num_bigint::BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = num_bigint::BigUint::from(1u32);
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `log2` of a positive arbitrary-precision unsigned integer.
pub fn biguint_log2(n: &num_bigint::BigUint) -> f64 {
    bigint_log2(&BigInt::from(n.clone()))
}
