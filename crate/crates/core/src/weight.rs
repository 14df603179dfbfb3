//! Exact probability weights.
//!
//! Everything that touches a subdistribution is generic over [`Weight`]. The
//! proof rules compare sums of weights for equality, so only exact number
//! types implement it: `Ratio<i64>`, `Ratio<i128>` and `BigRational`.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::ops::{Add, Sub};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An exact, totally ordered scalar used for subdistribution masses.
pub trait Weight:
    Clone
    + Ord
    + Hash
    + Debug
    + Display
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Builds `numer / denom`, or `None` when it does not fit the type or
    /// `denom` is zero.
    fn from_fraction(numer: &BigInt, denom: &BigInt) -> Option<Self>;

    /// Numerator and denominator in lowest terms, denominator positive.
    fn to_fraction(&self) -> (BigInt, BigInt);

    /// `p/q` rendering used by the structured proof format.
    fn fraction_string(&self) -> String {
        let (p, q) = self.to_fraction();
        format!("{p}/{q}")
    }

    fn is_positive(&self) -> bool {
        *self > Self::zero()
    }
}

macro_rules! impl_machine_ratio {
    ($int:ty, $to:ident) => {
        impl Weight for Ratio<$int> {
            fn from_fraction(numer: &BigInt, denom: &BigInt) -> Option<Self> {
                if denom.is_zero() {
                    return None;
                }
                let reduced = BigRational::new(numer.clone(), denom.clone());
                let p = reduced.numer().$to()?;
                let q = reduced.denom().$to()?;
                Some(Ratio::new(p, q))
            }

            fn to_fraction(&self) -> (BigInt, BigInt) {
                (BigInt::from(*self.numer()), BigInt::from(*self.denom()))
            }
        }
    };
}

impl_machine_ratio!(i64, to_i64);
impl_machine_ratio!(i128, to_i128);

impl Weight for BigRational {
    fn from_fraction(numer: &BigInt, denom: &BigInt) -> Option<Self> {
        if denom.is_zero() {
            return None;
        }
        Some(BigRational::new(numer.clone(), denom.clone()))
    }

    fn to_fraction(&self) -> (BigInt, BigInt) {
        let r = self.reduced();
        if r.denom().is_negative() {
            (-r.numer().clone(), -r.denom().clone())
        } else {
            (r.numer().clone(), r.denom().clone())
        }
    }
}

/// Parses `p/q`, an integer, or a decimal literal (`0.25`) exactly.
pub fn parse_fraction<W: Weight>(text: &str) -> Option<W> {
    let text = text.trim();
    if let Some((p, q)) = text.split_once('/') {
        let p: BigInt = parse_integer(p.trim())?;
        let q: BigInt = parse_integer(q.trim())?;
        return W::from_fraction(&p, &q);
    }
    if let Some((whole, frac)) = text.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let whole = if whole.is_empty() { "0" } else { whole };
        let digits = format!("{whole}{frac}");
        let p = parse_integer(&digits)?;
        let q = num_traits::pow(BigInt::from(10), frac.len());
        return W::from_fraction(&p, &q);
    }
    W::from_fraction(&parse_integer(text)?, &BigInt::one())
}

fn parse_integer(text: &str) -> Option<BigInt> {
    let digits = text.strip_prefix('-').unwrap_or(text);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    text.parse().ok()
}
