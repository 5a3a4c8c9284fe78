//! Exact dyadic arithmetic for certificate checks.
//!
//! Every finite `f64` is a dyadic rational, so sums and products of the raw
//! values can be compared without rounding.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

/// Exact rational value of a finite float. Panics on NaN or infinity.
pub fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Exact accumulator for `f64` sums. Values are stored as integers scaled by 2^1074.
#[derive(Debug, Clone, Default)]
pub struct ExactSum {
    acc: BigInt,
}

const SCALE_BITS: i64 = 1074;

impl ExactSum {
    pub fn new() -> Self {
        Self { acc: BigInt::zero() }
    }

    pub fn add(&mut self, x: f64) {
        assert!(x.is_finite(), "ExactSum::add on non-finite value");
        if x == 0.0 {
            return;
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 0 { 1i64 } else { -1 };
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        // x = mant * 2^(e)
        let (mant, e) = if exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp - 1075) };
        let shifted = BigInt::from(mant) << ((e + SCALE_BITS) as usize);
        if sign > 0 {
            self.acc += shifted;
        } else {
            self.acc -= shifted;
        }
    }

    pub fn value(&self) -> BigRational {
        BigRational::new(self.acc.clone(), BigInt::from(1) << SCALE_BITS as usize)
    }
}

impl FromIterator<f64> for ExactSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = ExactSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_sum_beats_float_rounding() {
        let xs = [1e16, 1.0, -1e16, 1.0];
        let naive: f64 = xs.iter().sum();
        let exact: ExactSum = xs.iter().copied().collect();
        assert_eq!(exact.value(), rational(2.0));
        assert_ne!(naive, 2.0);
    }

    #[test]
    fn subnormals_and_signs() {
        let tiny = f64::from_bits(1);
        let s: ExactSum = [tiny, tiny, -tiny, 0.5, -0.25].into_iter().collect();
        assert_eq!(s.value(), rational(tiny) + rational(0.25));
    }
}
