//! Exact closed-form count bounds for the fixture families, used to
//! validate the numeric estimators. All counts are arbitrary-precision
//! integers; the quantities they bound overflow native words quickly.

use crate::error::{Error, Result};
use crate::fixtures::ToralMapFixture;
use crate::rational::{rat_from_f64, rat_i64, rat_int};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Lower,
    Upper,
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Sep,
    Cov,
    BallCover,
    Fix,
}

fn serialize_count<S: serde::Serializer>(c: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&c.to_string())
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleBound {
    pub kind: BoundKind,
    pub quantity: Quantity,
    #[serde(serialize_with = "serialize_count")]
    pub value: BigUint,
    /// Orbit-metric horizon the bound applies at.
    pub horizon: Option<usize>,
    /// Ladder rung index of the source construction.
    pub rung: Option<u32>,
    /// Subdivision depth of the source construction.
    pub depth: Option<u32>,
    pub eps: Option<f64>,
    pub fixture: String,
}

impl OracleBound {
    fn new(kind: BoundKind, quantity: Quantity, value: BigUint, fixture: &str) -> Self {
        OracleBound {
            kind,
            quantity,
            value,
            horizon: None,
            rung: None,
            depth: None,
            eps: None,
            fixture: fixture.to_string(),
        }
    }
}

fn pow3_big(e: u64) -> BigUint {
    BigUint::from(3u32).pow(e as u32)
}

fn integer_r(a: f64) -> Result<u32> {
    let r = 1.0 / a;
    let rounded = r.round();
    if !(1.0..=30.0).contains(&rounded) || (r - rounded).abs() > 1e-9 {
        return Err(Error::UnsupportedParameter(format!(
            "closed-form bounds need an integer reciprocal, got 1/a = {r}"
        )));
    }
    Ok(rounded as u32)
}

/// Tail index: the first block index `m >= n` past which the remaining
/// block mass drops below the rung radius `eps_n = |J_n|`.
fn phi_a_tail_index(r: u32, n: u32) -> u32 {
    // Closed form: the geometric tail from m weighs
    // 3^{-rm} / (1 - 3^{-r}) < 3^{-rn} iff m > n, so m = n + 1.
    // Cross-checked by direct rational summation.
    let m = n + 1;
    debug_assert!({
        let base = rat_i64(1, 3i64.pow(r));
        let tail = |from: u32| {
            // sum_{i >= from} 3^{-ri} = 3^{-r from} / (1 - 3^{-r})
            let num = rat_int(1) / rat_int(3).pow((r * from) as i32);
            num / (rat_int(1) - base.clone())
        };
        let eps = rat_int(1) / rat_int(3).pow((r * n) as i32);
        tail(m) < eps && tail(n) >= eps
    });
    m
}

/// Two-sided cover bounds for the block family with reciprocal
/// parameter `r = 1/a` at rung `n`, depth `k`.
///
/// Lower: the depth-`k` subdivision of block `n` forces
/// `3^{nk}` cover elements at horizon `k+1` and radius `eps_n = |J_n|`.
/// Upper: covering block-by-block (subdividing the coarser blocks,
/// one element per finer block, one for the tail) costs at most
/// `(sum_{i<n} |J_i|/|J_n| + m - n + 1) * 3^{n(k+1)}` at horizon `k`.
pub fn phi_a_cover_bounds(a: f64, n: u32, k: u32) -> Result<(OracleBound, OracleBound)> {
    if n == 0 || k == 0 {
        return Err(Error::invalid("need n >= 1 and k >= 1"));
    }
    let r = integer_r(a)?;
    let eps_n = (1.0 / (3f64.powi(r as i32) - 1.0)) * 3f64.powi(-((r * n) as i32));
    let lower_value = pow3_big(n as u64 * k as u64);
    let mut lower = OracleBound::new(BoundKind::Lower, Quantity::Cov, lower_value, &format!("phi_a:{a}"));
    lower.horizon = Some(k as usize + 1);
    lower.rung = Some(n);
    lower.depth = Some(k);
    lower.eps = Some(eps_n);

    // |J_i| / |J_n| = 3^{r(n-i)} exactly, so the ceilings are exact powers.
    let mut prefactor = BigUint::zero();
    for i in 1..n {
        prefactor += pow3_big(r as u64 * (n - i) as u64);
    }
    let m = phi_a_tail_index(r, n);
    prefactor += BigUint::from((m - n + 1) as u32);
    let upper_value = prefactor * pow3_big(n as u64 * (k as u64 + 1));
    let mut upper = OracleBound::new(BoundKind::Upper, Quantity::Cov, upper_value, &format!("phi_a:{a}"));
    upper.horizon = Some(k as usize);
    upper.rung = Some(n);
    upper.depth = Some(k);
    upper.eps = Some(eps_n);
    Ok((lower, upper))
}

/// Rate ladder point for the closed-form regression: the cover rate at
/// rung `n` is `n ln 3` against `|ln eps_n| = |ln C| + r n ln 3`.
pub fn phi_a_ladder_point(a: f64, n: u32) -> Result<(f64, f64)> {
    let r = integer_r(a)?;
    let ln3 = 3f64.ln();
    let c = 1.0 / (3f64.powi(r as i32) - 1.0);
    let rate = n as f64 * ln3;
    let abs_log_eps = c.ln().abs() + (r as f64) * (n as f64) * ln3;
    Ok((rate, abs_log_eps))
}

/// Separated-count lower bound for the `example33` preset
/// (`m_n = n`): `ceil((3^n / 2)^k)` at horizon `n + k` and radius
/// `eps_n = |J_n| / 3^n`.
pub fn example33_sep_lower(n: u32, k: u32) -> OracleBound {
    let num = pow3_big(n as u64 * k as u64);
    let den = BigUint::one() << (k as usize);
    let value = (&num + &den - BigUint::one()) / &den; // ceiling
    let mut b = OracleBound::new(BoundKind::Lower, Quantity::Sep, value, "example33");
    b.horizon = Some((n + k) as usize);
    b.rung = Some(n);
    b.depth = Some(k);
    let c = 6.0 / (std::f64::consts::PI * std::f64::consts::PI);
    b.eps = Some(c / (n as f64 * n as f64) / 3f64.powi(n as i32));
    b
}

/// The asymptotic rate of the `example33` lower bounds under the two
/// normalizations in use: per added depth `k` and per full horizon
/// `n + k`. The first converges to `ln(3^n / 2)`; the second is
/// depth-dependent and reported alongside it.
pub fn example33_rates(n: u32, k: u32) -> (f64, f64) {
    let log_bound = k as f64 * (n as f64 * 3f64.ln() - 2f64.ln());
    (log_bound / k as f64, log_bound / (n + k) as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sidedness {
    OneSided,
    TwoSided,
}

/// Product-structure shift bounds from a base cardinality `m` at
/// radius `eps`: separated from below and covered from above with the
/// window exponent `n + l` (one-sided) or `n + 2l + 1` (two-sided);
/// the upper bound covers at radius `4 eps` in the two-sided case.
pub fn shift_counts(m: &BigUint, n: u32, l: u32, sided: Sidedness) -> (OracleBound, OracleBound) {
    let exponent = match sided {
        Sidedness::OneSided => (n + l) as u64,
        Sidedness::TwoSided => (n + 2 * l + 1) as u64,
    };
    let value = m.pow(exponent as u32);
    let mut lower = OracleBound::new(BoundKind::Lower, Quantity::Sep, value.clone(), "shift");
    lower.horizon = Some(n as usize);
    let mut upper = OracleBound::new(BoundKind::Upper, Quantity::Cov, value, "shift");
    upper.horizon = Some(n as usize);
    (lower, upper)
}

/// Exact `|Fix(A^n)| = |det(A^n - I)|` for a hyperbolic unimodular
/// integer matrix.
pub fn toral_fix_count(matrix: [[i64; 2]; 2], n: u32) -> Result<OracleBound> {
    let fixture = ToralMapFixture::new(matrix)?;
    let value = fixture.fix_count(n as u64);
    let mut b = OracleBound::new(BoundKind::Exact, Quantity::Fix, value, "toral");
    b.horizon = Some(n as usize);
    Ok(b)
}

/// Exact minimal closed-ball cover count of `{0} + {1/k : k >= 1}`.
///
/// Sweep from the right: a ball placed at the highest uncovered point
/// minus `eps` covers down to `point - 2 eps`; the next uncovered point
/// is the largest `1/k` below that; terminate when the ball reaches 0,
/// which also swallows the accumulation tail.
pub fn kakeya_cover_count(eps: f64) -> Result<OracleBound> {
    if eps <= 0.0 {
        return Err(Error::invalid("radius must be positive"));
    }
    let eps_rat = rat_from_f64(eps);
    let two_eps = rat_i64(2, 1) * &eps_rat;
    let mut current = rat_int(1);
    let mut count: u64 = 0;
    loop {
        count += 1;
        let low = &current - &two_eps;
        if low <= rat_int(0) {
            break;
        }
        // Largest 1/k strictly below `low`: k = floor(1/low) + 1
        // (strict even when 1/low is integral).
        let inv = rat_int(1) / &low;
        let k = inv.floor().to_integer() + 1;
        let k: i64 = num_traits::ToPrimitive::to_i64(&k).ok_or_else(|| Error::invalid("radius too small"))?;
        current = rat_int(1) / rat_int(k);
    }
    let mut b = OracleBound::new(BoundKind::Exact, Quantity::BallCover, BigUint::from(count), "kakeya_A");
    b.eps = Some(eps);
    Ok(b)
}
