//! Growth rates from count tables and dimension regressions.
//!
//! The rate at a radius approximates the exponential growth of counts
//! in the horizon; the dimension estimate is the regression slope of
//! those rates against `|log eps|`. True limits are not observable at
//! finite data: the tail-window surrogates used here are recorded in
//! every report.

use crate::error::{Error, Result};
use crate::estimate::table::{ln_big, CountKind, CountTable};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RateMethod {
    /// Least-squares slope of log count vs horizon over the tail window.
    TailSlope,
    /// Largest per-step log-count increment over the tail window.
    MaxIncrement,
}

#[derive(Clone, Debug, Serialize)]
pub struct RatePoint {
    pub eps: f64,
    /// The requested-method rate.
    pub rate: f64,
    pub tail_slope: f64,
    pub max_increment: f64,
    /// Per-step log-count increments over the tail window, in horizon order.
    pub increments: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RateCurve {
    /// Radius-descending rate points.
    pub points: Vec<RatePoint>,
    pub window: usize,
    pub method: RateMethod,
    pub count_kind: CountKind,
}

pub const MIN_HORIZONS: usize = 4;
pub const MIN_LADDER: usize = 3;
/// Window for the liminf/limsup slope surrogates.
pub const SLOPE_WINDOW: usize = 3;

fn least_squares_slope(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in points {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let mut rss = 0.0;
    for (x, y) in points {
        let r = y - (intercept + slope * x);
        rss += r * r;
    }
    (slope, (rss / n).sqrt())
}

/// Tail slope, max increment, and the raw increment list of a
/// log-count series over horizons.
pub(crate) fn series_rates(logs: &[(f64, f64)], window: usize) -> (f64, f64, Vec<f64>) {
    let tail_start = logs.len().saturating_sub(window.max(2));
    let tail = &logs[tail_start..];
    let (tail_slope, _) = least_squares_slope(tail);
    // Increments over the last window+1 horizons, normalized by spacing.
    let inc_start = logs.len().saturating_sub(window + 1);
    let increments: Vec<f64> = logs[inc_start..]
        .windows(2)
        .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
        .collect();
    let max_increment = increments.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (tail_slope.max(0.0), max_increment.max(0.0), increments)
}

fn rate_data_at(table: &CountTable, eps: f64, window: usize) -> Result<(f64, f64, Vec<f64>)> {
    let horizons = table.horizons_at(eps);
    if horizons.len() < MIN_HORIZONS {
        return Err(Error::InsufficientHorizons { have: horizons.len(), need: MIN_HORIZONS });
    }
    let logs: Vec<(f64, f64)> = horizons
        .iter()
        .map(|&h| (h as f64, ln_big(table.get(h, eps).unwrap())))
        .collect();
    Ok(series_rates(&logs, window))
}

/// Growth rate of the counts at one radius.
pub fn growth_rate(table: &CountTable, eps: f64, method: RateMethod, window: usize) -> Result<f64> {
    let (tail, maxinc, _) = rate_data_at(table, eps, window)?;
    Ok(match method {
        RateMethod::TailSlope => tail,
        RateMethod::MaxIncrement => maxinc,
    })
}

/// Rates across the whole ladder of a table.
pub fn rate_curve(table: &CountTable, method: RateMethod, window: usize) -> Result<RateCurve> {
    let ladder = table.ladder();
    let mut points = Vec::with_capacity(ladder.len());
    for eps in ladder {
        let (tail_slope, max_increment, increments) = rate_data_at(table, eps, window)?;
        let rate = match method {
            RateMethod::TailSlope => tail_slope,
            RateMethod::MaxIncrement => max_increment,
        };
        points.push(RatePoint { eps, rate, tail_slope, max_increment, increments });
    }
    Ok(RateCurve { points, window, method, count_kind: table.kind })
}

#[derive(Clone, Debug, Serialize)]
pub struct DimensionReport {
    /// Windowed-slope minimum (liminf surrogate); infinity when flagged.
    pub lower: f64,
    /// Windowed-slope maximum (limsup surrogate); infinity when flagged.
    pub upper: f64,
    /// Divergence flag: rates grow faster than any finite dimension allows.
    pub infinite: bool,
    /// Primary estimator: global regression slope of rate vs |log eps|.
    pub slope: f64,
    pub ratio_smallest_eps: f64,
    pub residual_rms: f64,
    pub count_kind: CountKind,
    pub method: RateMethod,
    pub curve: RateCurve,
    pub notes: Vec<String>,
}

impl DimensionReport {
    /// The scalar a relation check compares.
    pub fn primary(&self) -> f64 {
        if self.infinite {
            f64::INFINITY
        } else {
            self.slope
        }
    }
}

/// Divergence test: the log-count increments must grow across the tail
/// window at each of the three smallest radii (super-exponential
/// counts), and the rate-to-`|log eps|` ratio at the smallest radius
/// must exceed twice the ambient box dimension, which no fixed-space
/// autonomous system can reach.
fn diverges(curve: &RateCurve, ambient_box_dim: f64) -> bool {
    if curve.points.len() < MIN_LADDER {
        return false;
    }
    let smallest = &curve.points[curve.points.len() - 1];
    let ratio = smallest.max_increment / smallest.eps.ln().abs().max(1e-12);
    if ratio <= 2.0 * ambient_box_dim {
        return false;
    }
    let tail3 = &curve.points[curve.points.len().saturating_sub(3)..];
    tail3.iter().all(|p| {
        p.increments.len() >= 2
            && p.increments.windows(2).all(|w| w[1] > w[0] * (1.0 + 1e-9) + 1e-12)
    })
}

/// Metric mean dimension estimate from a rate curve.
///
/// Primary estimator: least-squares slope of rate against `|log eps|`
/// (exact when the rate is affine in `|log eps|`). Lower/upper bracket
/// the asymptote with the min/max slope over 3-point ladder windows.
pub fn mmd_estimate(curve: &RateCurve, ambient_box_dim: Option<f64>) -> Result<DimensionReport> {
    if curve.points.len() < MIN_LADDER {
        return Err(Error::InsufficientLadder { have: curve.points.len(), need: MIN_LADDER });
    }
    let xy: Vec<(f64, f64)> = curve.points.iter().map(|p| (p.eps.ln().abs(), p.rate)).collect();
    let (slope, residual_rms) = least_squares_slope(&xy);
    let mut window_slopes = Vec::new();
    for w in xy.windows(SLOPE_WINDOW) {
        window_slopes.push(least_squares_slope(w).0);
    }
    let lower = window_slopes.iter().cloned().fold(f64::INFINITY, f64::min).max(0.0);
    let upper = window_slopes.iter().cloned().fold(f64::NEG_INFINITY, f64::max).max(0.0);
    let smallest = curve.points.last().unwrap();
    let ratio_smallest_eps = smallest.rate / smallest.eps.ln().abs().max(1e-12);
    let infinite = ambient_box_dim.map(|d| diverges(curve, d)).unwrap_or(false);
    let mut notes = Vec::new();
    if infinite {
        notes.push("divergence test fired: per-horizon increments grow and the rate ratio exceeds twice the ambient box dimension".to_string());
    }
    Ok(DimensionReport {
        lower: if infinite { f64::INFINITY } else { lower },
        upper: if infinite { f64::INFINITY } else { upper },
        infinite,
        slope: slope.max(0.0),
        ratio_smallest_eps,
        residual_rms,
        count_kind: curve.count_kind,
        method: curve.method,
        curve: curve.clone(),
        notes,
    })
}

/// Box-dimension regression over a ball-cover table (horizon 1 cells).
pub fn box_dimension_report(table: &CountTable) -> Result<DimensionReport> {
    let ladder = table.ladder();
    if ladder.len() < MIN_LADDER {
        return Err(Error::InsufficientLadder { have: ladder.len(), need: MIN_LADDER });
    }
    let xy: Vec<(f64, f64)> = ladder
        .iter()
        .map(|&eps| (eps.ln().abs(), ln_big(table.get(1, eps).unwrap())))
        .collect();
    let (slope, residual_rms) = least_squares_slope(&xy);
    let mut window_slopes = Vec::new();
    for w in xy.windows(SLOPE_WINDOW) {
        window_slopes.push(least_squares_slope(w).0);
    }
    let lower = window_slopes.iter().cloned().fold(f64::INFINITY, f64::min).max(0.0);
    let upper = window_slopes.iter().cloned().fold(f64::NEG_INFINITY, f64::max).max(0.0);
    let points: Vec<RatePoint> = xy
        .iter()
        .zip(&ladder)
        .map(|((x, y), &eps)| RatePoint {
            eps,
            rate: *y / x.max(1e-12),
            tail_slope: 0.0,
            max_increment: 0.0,
            increments: vec![],
        })
        .collect();
    let ratio = points.last().map(|p| p.rate).unwrap_or(0.0);
    Ok(DimensionReport {
        lower,
        upper,
        infinite: false,
        slope: slope.max(0.0),
        ratio_smallest_eps: ratio,
        residual_rms,
        count_kind: table.kind,
        method: RateMethod::TailSlope,
        curve: RateCurve {
            points,
            window: 1,
            method: RateMethod::TailSlope,
            count_kind: table.kind,
        },
        notes: vec!["log N(eps) regression against |log eps|".to_string()],
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RateVerdict {
    /// Rates bounded across the ladder: finite entropy, zero mean
    /// dimension expected.
    BoundedRates,
    /// Rates grow with `|log eps|`.
    GrowingRates,
}

/// Rate profile across the ladder with a boundedness verdict.
pub fn entropy_rate_profile(
    table: &CountTable,
    method: RateMethod,
    window: usize,
) -> Result<(Vec<(f64, f64)>, RateVerdict)> {
    let curve = rate_curve(table, method, window)?;
    let profile: Vec<(f64, f64)> = curve.points.iter().map(|p| (p.eps, p.rate)).collect();
    if profile.len() < 2 {
        return Ok((profile, RateVerdict::BoundedRates));
    }
    let xy: Vec<(f64, f64)> = profile.iter().map(|(e, r)| (e.ln().abs(), *r)).collect();
    let (slope, _) = least_squares_slope(&xy);
    let verdict = if slope <= 0.05 { RateVerdict::BoundedRates } else { RateVerdict::GrowingRates };
    Ok((profile, verdict))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimate::table::Provenance;
    use num_bigint::BigUint;

    fn geometric_table(base: u64, eps: f64, horizons: usize) -> CountTable {
        let mut t = CountTable::new(CountKind::Separated, Provenance::Oracle);
        for h in 1..=horizons {
            t.push(h, eps, BigUint::from(base).pow(h as u32));
        }
        t
    }

    #[test]
    fn exact_geometric_growth_recovers_the_rate() {
        // Counts 3^{5k}: rate 5 ln 3 from either method.
        let mut t = CountTable::new(CountKind::Separated, Provenance::Oracle);
        for k in 1..=6usize {
            t.push(k, 0.1, BigUint::from(3u32).pow(5 * k as u32));
        }
        let want = 5.0 * 3f64.ln();
        let a = growth_rate(&t, 0.1, RateMethod::TailSlope, 4).unwrap();
        let b = growth_rate(&t, 0.1, RateMethod::MaxIncrement, 4).unwrap();
        assert!((a - want).abs() < 1e-9);
        assert!((b - want).abs() < 1e-9);
    }

    #[test]
    fn constant_counts_have_zero_rate() {
        let mut t = CountTable::new(CountKind::Separated, Provenance::Numeric);
        for h in 1..=5usize {
            t.push(h, 0.2, BigUint::from(17u32));
        }
        assert_eq!(growth_rate(&t, 0.2, RateMethod::TailSlope, 4).unwrap(), 0.0);
    }

    #[test]
    fn too_few_horizons_is_an_error() {
        let t = geometric_table(3, 0.1, 3);
        assert!(matches!(
            growth_rate(&t, 0.1, RateMethod::TailSlope, 4),
            Err(Error::InsufficientHorizons { have: 3, need: 4 })
        ));
    }

    #[test]
    fn affine_rate_curve_regresses_exactly() {
        // rate(eps_n) = n ln 3 at |ln eps_n| = ln 8 + 2 n ln 3: slope 1/2.
        let ln3 = 3f64.ln();
        let points: Vec<RatePoint> = (1..=4)
            .map(|n| {
                let eps = (-(8f64.ln() + 2.0 * n as f64 * ln3)).exp();
                RatePoint {
                    eps,
                    rate: n as f64 * ln3,
                    tail_slope: n as f64 * ln3,
                    max_increment: n as f64 * ln3,
                    increments: vec![n as f64 * ln3; 3],
                }
            })
            .collect();
        let curve =
            RateCurve { points, window: 4, method: RateMethod::TailSlope, count_kind: CountKind::Separated };
        let report = mmd_estimate(&curve, Some(1.0)).unwrap();
        assert!((report.slope - 0.5).abs() < 1e-9);
        assert!((report.lower - 0.5).abs() < 1e-9);
        assert!((report.upper - 0.5).abs() < 1e-9);
        assert!(!report.infinite);
        assert!(report.lower <= report.upper);
    }

    #[test]
    fn doubling_increments_fire_the_divergence_test() {
        // Counts 2^{2^{h+1}-2+k}: increments double every horizon.
        let mut t = CountTable::new(CountKind::Separated, Provenance::Oracle);
        for q in 2..=8u32 {
            let eps = 2f64.powi(-(q as i32));
            let k = q as usize - 1;
            for h in 1..=5usize {
                let e = (1usize << (h + 1)) - 2 + k;
                t.push(h, eps, BigUint::one() << e);
            }
        }
        use num_traits::One;
        let curve = rate_curve(&t, RateMethod::MaxIncrement, 4).unwrap();
        let report = mmd_estimate(&curve, Some(1.0)).unwrap();
        assert!(report.infinite, "ratio {}", report.ratio_smallest_eps);
        assert!(report.lower.is_infinite() && report.upper.is_infinite());
    }

    #[test]
    fn linear_growth_does_not_fire_the_divergence_test() {
        // Full-shift counts 2^{h+k}: increments constant.
        let mut t = CountTable::new(CountKind::Separated, Provenance::Oracle);
        use num_traits::One;
        for q in 2..=8u32 {
            let eps = 2f64.powi(-(q as i32));
            for h in 1..=5usize {
                t.push(h, eps, BigUint::one() << (h + q as usize - 1));
            }
        }
        let curve = rate_curve(&t, RateMethod::MaxIncrement, 4).unwrap();
        let report = mmd_estimate(&curve, Some(1.0)).unwrap();
        assert!(!report.infinite);
        // Rates plateau at ln 2.
        for p in &curve.points {
            assert!((p.rate - 2f64.ln()).abs() < 1e-9);
        }
    }

    #[test]
    fn entropy_profile_verdicts() {
        use num_traits::One;
        // Bounded: constant rate ln 2 across the ladder.
        let mut bounded = CountTable::new(CountKind::Separated, Provenance::Oracle);
        for q in 2..=6u32 {
            for h in 1..=5usize {
                bounded.push(h, 2f64.powi(-(q as i32)), BigUint::one() << h);
            }
        }
        let (_, v) = entropy_rate_profile(&bounded, RateMethod::TailSlope, 4).unwrap();
        assert_eq!(v, RateVerdict::BoundedRates);

        // Growing: rate n ln 3 on the block ladder.
        let mut growing = CountTable::new(CountKind::Separated, Provenance::Oracle);
        for n in 1..=4u32 {
            let eps = (1.0 / 8.0) * 3f64.powi(-2 * n as i32);
            for h in 1..=5usize {
                growing.push(h, eps, BigUint::from(3u32).pow(n * h as u32));
            }
        }
        let (_, v) = entropy_rate_profile(&growing, RateMethod::TailSlope, 4).unwrap();
        assert_eq!(v, RateVerdict::GrowingRates);
    }
}
