//! Exact rational evaluation of piecewise-affine interval maps.
//!
//! Every `f64` is itself a rational number, so a grid point converts
//! losslessly to `BigRational`, the orbit is computed exactly, and each
//! orbit value rounds back to `f64` with at most one ulp of error.
//! This removes the slope^horizon error amplification that makes
//! plain double-precision orbits of steep block maps unusable, so the
//! precision budget of rational-backed systems is limited only by
//! arithmetic cost rather than by the mantissa.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub(crate) type Rat = BigRational;

pub(crate) fn rat_i64(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub(crate) fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Exact conversion; every finite f64 is rational.
pub(crate) fn rat_from_f64(x: f64) -> Rat {
    Rat::from_float(x).expect("finite float")
}

pub(crate) fn rat_to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// The tent-like map `g(x) = |1 - |3x - 1||` on `[0, 1]`, exactly.
pub(crate) fn tent_exact(x: &Rat) -> Rat {
    let t = rat_int(3) * x - Rat::one();
    let inner = t.abs();
    (Rat::one() - inner).abs()
}

pub(crate) fn tent_iter_exact(x: &Rat, times: u32) -> Rat {
    let mut cur = x.clone();
    for _ in 0..times {
        cur = tent_exact(&cur);
    }
    cur
}

/// Block interval map data with exact rational boundaries.
///
/// On block `J_i = [a_{i-1}, a_i]` the map acts as the increasing
/// affine chart onto `[0,1]`, followed by `g^{m_i}`, followed by the
/// inverse chart. Outside the materialized blocks it is the identity,
/// so every block boundary is a fixed point and the map is continuous.
#[derive(Clone, Debug)]
pub(crate) struct ExactBlockMap {
    pub boundaries: Vec<Rat>, // a_0 = 0 < a_1 < ... < a_B
    pub exponents: Vec<u32>,  // m_i per block, len = B
}

impl ExactBlockMap {
    pub fn block_count(&self) -> usize {
        self.exponents.len()
    }

    /// Index of the block containing x, if any.
    pub fn block_of(&self, x: &Rat) -> Option<usize> {
        let last = self.boundaries.last()?;
        if x < &self.boundaries[0] || x > last {
            return None;
        }
        // Binary search over the boundaries.
        let mut lo = 0usize;
        let mut hi = self.block_count();
        while lo < hi {
            let mid = (lo + hi) / 2;
            if x < &self.boundaries[mid] {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Some(lo.saturating_sub(1).min(self.block_count() - 1))
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        match self.block_of(x) {
            None => x.clone(),
            Some(i) => {
                let lo = &self.boundaries[i];
                let hi = &self.boundaries[i + 1];
                let len = hi - lo;
                if len.is_zero() {
                    return x.clone();
                }
                let chart = (x - lo) / &len;
                let image = tent_iter_exact(&chart, self.exponents[i]);
                lo + image * len
            }
        }
    }
}
