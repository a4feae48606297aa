//! Numerical estimators for separated/spanning/cover counts, growth
//! rates, metric mean dimension, and box dimension from finite samples.

mod greedy;
mod rates;
mod table;

pub use rates::{
    box_dimension_report, entropy_rate_profile, growth_rate, mmd_estimate, rate_curve,
    DimensionReport, RateCurve, RateMethod, RatePoint, RateVerdict, MIN_HORIZONS, MIN_LADDER,
};
pub use table::{ln_big, CountCell, CountKind, CountTable, Provenance};

use crate::bowen::BowenContext;
use crate::error::{Error, Result};
use crate::fixtures::{CountSource, Fixture};
use crate::space::{MetricSpace, SampleSet};
use crate::system::SystemSequence;
use num_bigint::BigUint;

/// Sample-point predicate used for restricted estimation.
pub type PointFilter<'a> = &'a dyn Fn(&[f64]) -> bool;

fn check_resolution(delta: f64, eps: f64) -> Result<()> {
    if delta > eps / 4.0 + 1e-12 * eps {
        return Err(Error::Resolution { delta, eps });
    }
    Ok(())
}

fn with_matching_cache<T>(
    ctx: &BowenContext,
    sample: &SampleSet,
    run: impl Fn(&BowenContext) -> T,
) -> Result<T> {
    if ctx.cached_len() == sample.len() {
        Ok(run(ctx))
    } else {
        let fresh =
            BowenContext::with_sample(ctx.system.clone(), ctx.space.clone(), ctx.horizon, sample)?;
        Ok(run(&fresh))
    }
}

/// Maximal separated subset of the sample, greedy in sample order: a
/// lower bound for the separated count of the sample and an estimate
/// of the separated count of the space. Requires `delta <= eps/4`.
pub fn max_separated(ctx: &BowenContext, sample: &SampleSet, eps: f64) -> Result<u64> {
    check_resolution(sample.resolution, eps)?;
    with_matching_cache(ctx, sample, |c| greedy::greedy_separated(c, c.horizon, eps) as u64)
}

/// Separated count at a shallower horizon than the context's, reusing
/// its orbit cache.
pub fn max_separated_at(ctx: &BowenContext, sample: &SampleSet, horizon: usize, eps: f64) -> Result<u64> {
    check_resolution(sample.resolution, eps)?;
    if horizon > ctx.horizon {
        return Err(Error::PrecisionBudget { horizon, budget: ctx.horizon });
    }
    with_matching_cache(ctx, sample, |c| greedy::greedy_separated(c, horizon, eps) as u64)
}

/// Greedy ball cover of the sample by orbit-metric balls centered at
/// sample points: an upper estimate of the minimum spanning
/// cardinality of the sample. Requires `delta <= eps/4`.
pub fn min_spanning(ctx: &BowenContext, sample: &SampleSet, eps: f64) -> Result<u64> {
    check_resolution(sample.resolution, eps)?;
    with_matching_cache(ctx, sample, |c| greedy::greedy_cover(c, c.horizon, eps) as u64)
}

/// The `N(eps)` of box dimension: greedy ball cover of the space's
/// lattice at plain distance (horizon 1).
pub fn ball_cover_count(space: &MetricSpace, eps: f64) -> Result<u64> {
    let sample = space.sample(eps / 4.0)?;
    let system = match space.point_dim() {
        1 => SystemSequence::identity(),
        d => SystemSequence::autonomous_float(d, usize::MAX / 2, |x| x.to_vec()),
    };
    let ctx = BowenContext::with_sample(system, space.clone(), 1, &sample)?;
    Ok(greedy::greedy_cover(&ctx, 1, eps) as u64)
}

/// Box-dimension estimate over a strictly decreasing radius ladder.
pub fn box_dimension(space: &MetricSpace, ladder: &[f64]) -> Result<DimensionReport> {
    if ladder.len() < MIN_LADDER {
        return Err(Error::InsufficientLadder { have: ladder.len(), need: MIN_LADDER });
    }
    if ladder.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::invalid("radius ladder must be strictly decreasing"));
    }
    let mut table = CountTable::new(CountKind::BallCover, Provenance::Numeric);
    for &eps in ladder {
        let n = ball_cover_count(space, eps)?;
        table.push(1, eps, BigUint::from(n));
    }
    table.validate()?;
    box_dimension_report(&table)
}

/// Estimation controls shared across fixtures and relation checks.
#[derive(Clone, Debug)]
pub struct EstimatePlan {
    /// Radius ladder override; fixture default when absent.
    pub ladder: Option<Vec<f64>>,
    pub horizons: Vec<usize>,
    /// Sample resolution as a fraction of the radius.
    pub delta_factor: f64,
    /// Greedy radius as a fraction of the ladder radius.
    pub radius_factor: f64,
    /// Per-block point cap for orbit-refined nets.
    pub per_block_cap: usize,
    pub method: RateMethod,
    /// Tail window for growth rates.
    pub window: usize,
    /// Underlying composition depth per horizon step (for blocked
    /// sequences driving nets that resolve the underlying orbits).
    pub depth_multiplier: usize,
    pub seed: u64,
}

impl Default for EstimatePlan {
    fn default() -> Self {
        EstimatePlan {
            ladder: None,
            horizons: (2..=5).collect(),
            delta_factor: 0.25,
            radius_factor: 1.0,
            per_block_cap: 250_000,
            method: RateMethod::TailSlope,
            window: 4,
            depth_multiplier: 1,
            seed: 0,
        }
    }
}

impl EstimatePlan {
    /// Fixture-tuned defaults: block fixtures read rates from the
    /// largest increment (robust to late-horizon sample saturation),
    /// oracle-backed families keep their own horizon ranges.
    pub fn for_fixture(fx: &Fixture) -> Self {
        let method = match (&fx.counts, &fx.net) {
            (CountSource::ProductLift { .. }, _) => RateMethod::TailSlope,
            (CountSource::Oracle(_), _) => RateMethod::MaxIncrement,
            (_, crate::fixtures::NetStrategy::BlockRefined(_)) => RateMethod::MaxIncrement,
            _ => RateMethod::TailSlope,
        };
        EstimatePlan { horizons: fx.default_horizons.clone(), method, ..Default::default() }
    }
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct EstimateOutcome {
    pub fixture_id: String,
    pub table: CountTable,
    pub curve: RateCurve,
    pub report: DimensionReport,
}

/// Full estimation pipeline for a fixture: counts, rates, dimension.
pub fn estimate_fixture(fx: &Fixture, plan: &EstimatePlan) -> Result<EstimateOutcome> {
    estimate_fixture_filtered(fx, plan, None)
}

/// Estimation restricted to the sample points a filter accepts
/// (restriction to invariant subsets or declared non-wandering sets).
pub fn estimate_fixture_filtered(
    fx: &Fixture,
    plan: &EstimatePlan,
    filter: Option<PointFilter<'_>>,
) -> Result<EstimateOutcome> {
    let ladder = plan.ladder.clone().unwrap_or_else(|| fx.default_ladder.clone());
    if ladder.len() < MIN_LADDER {
        return Err(Error::InsufficientLadder { have: ladder.len(), need: MIN_LADDER });
    }
    // Block fixtures get the restriction-aware rate extraction: the
    // mean dimension of a block map is the maximum over its invariant
    // blocks, and blending blocks with unequal growth drags the
    // blended rate below every component.
    if let (CountSource::Numeric, crate::fixtures::NetStrategy::BlockRefined(bm)) =
        (&fx.counts, &fx.net)
    {
        return block_numeric_outcome(fx, bm, plan, &ladder, filter);
    }
    let table = match &fx.counts {
        CountSource::Numeric => numeric_table(fx, plan, &ladder, filter)?,
        CountSource::Oracle(counts) => {
            let mut t = CountTable::new(CountKind::Separated, Provenance::Oracle);
            t.seed = plan.seed;
            for &eps in &ladder {
                for &m in &plan.horizons {
                    t.push(m, eps, counts(m, eps));
                }
            }
            t
        }
        CountSource::ProductLift { base } => {
            let mut t = CountTable::new(CountKind::Separated, Provenance::Numeric);
            t.seed = plan.seed;
            for &eps in &ladder {
                let radius = eps * plan.radius_factor;
                let sample = base.sample(radius * plan.delta_factor)?;
                let ctx = BowenContext::with_sample(
                    SystemSequence::identity(),
                    base.clone(),
                    1,
                    &sample,
                )?;
                let m0 = max_separated(&ctx, &sample, radius)?;
                t.grid_resolution = Some(sample.resolution);
                // Base-separated words lifted coordinatewise: the
                // count raises to the horizon.
                for &m in &plan.horizons {
                    t.push(m, radius, BigUint::from(m0).pow(m as u32));
                }
            }
            t
        }
    };
    table.validate()?;
    let curve = rate_curve(&table, plan.method, plan.window)?;
    let report = mmd_estimate(&curve, Some(fx.ambient_box_dim))?;
    Ok(EstimateOutcome { fixture_id: fx.id.clone(), table, curve, report })
}

/// Numeric pipeline for block interval fixtures: whole-region counts
/// fill the table; the rate at each rung is the maximum over
/// block-restricted rates, all computed on one shared orbit cache.
fn block_numeric_outcome(
    fx: &Fixture,
    bm: &std::sync::Arc<crate::fixtures::BlockIntervalMap>,
    plan: &EstimatePlan,
    ladder: &[f64],
    filter: Option<PointFilter<'_>>,
) -> Result<EstimateOutcome> {
    let max_h = *plan.horizons.iter().max().unwrap_or(&1);
    let mut horizons = plan.horizons.clone();
    horizons.sort_unstable();
    if horizons.len() < MIN_HORIZONS {
        return Err(Error::InsufficientHorizons { have: horizons.len(), need: MIN_HORIZONS });
    }
    let mut table = CountTable::new(CountKind::Separated, Provenance::Numeric);
    table.seed = plan.seed;
    let mut points = Vec::with_capacity(ladder.len());
    for &eps in ladder {
        let radius = eps * plan.radius_factor;
        let delta = radius * plan.delta_factor;
        let net_depth = (max_h - 1) * plan.depth_multiplier.max(1) + 1;
        let (mut sample, mut spans) = bm.refined_net_spans(delta, net_depth, radius, plan.per_block_cap);
        if let Some(f) = filter {
            // Points stay coordinate-sorted, so block spans can be
            // relocated by binary search on the boundaries.
            sample.points.retain(|p| f(p));
            spans = (0..bm.block_count())
                .map(|i| {
                    let lo = bm.boundaries[i];
                    let hi = bm.boundaries[i + 1];
                    let start = sample.points.partition_point(|p| p[0] < lo);
                    let end = sample.points.partition_point(|p| p[0] < hi);
                    start..end
                })
                .collect();
        }
        check_resolution(sample.resolution, radius)?;
        let ctx = BowenContext::with_sample(fx.system.clone(), fx.space.clone(), max_h, &sample)?;
        table.grid_resolution = Some(sample.resolution);
        for &m in &horizons {
            let count = greedy::greedy_separated(&ctx, m, radius);
            table.push(m, radius, BigUint::from(count.max(1)));
        }
        // Rate of the dominant block at this radius.
        let mut best: Option<(f64, f64, Vec<f64>)> = None;
        for span in &spans {
            if span.is_empty() {
                continue;
            }
            let logs: Vec<(f64, f64)> = horizons
                .iter()
                .map(|&m| {
                    let c = greedy::greedy_separated_range(&ctx, m, radius, span.clone());
                    (m as f64, (c.max(1) as f64).ln())
                })
                .collect();
            let candidate = rates::series_rates(&logs, plan.window);
            let keep = match (&best, plan.method) {
                (None, _) => true,
                (Some(b), RateMethod::TailSlope) => candidate.0 > b.0,
                (Some(b), RateMethod::MaxIncrement) => candidate.1 > b.1,
            };
            if keep {
                best = Some(candidate);
            }
        }
        let (tail_slope, max_increment, increments) = best.unwrap_or((0.0, 0.0, vec![]));
        let rate = match plan.method {
            RateMethod::TailSlope => tail_slope,
            RateMethod::MaxIncrement => max_increment,
        };
        points.push(RatePoint { eps: radius, rate, tail_slope, max_increment, increments });
    }
    table.validate()?;
    points.sort_by(|a, b| b.eps.partial_cmp(&a.eps).unwrap());
    let curve = RateCurve {
        points,
        window: plan.window,
        method: plan.method,
        count_kind: CountKind::Separated,
    };
    let mut report = mmd_estimate(&curve, Some(fx.ambient_box_dim))?;
    report
        .notes
        .push("rates taken as the maximum over invariant-block restrictions".to_string());
    Ok(EstimateOutcome { fixture_id: fx.id.clone(), table, curve, report })
}

fn numeric_table(
    fx: &Fixture,
    plan: &EstimatePlan,
    ladder: &[f64],
    filter: Option<PointFilter<'_>>,
) -> Result<CountTable> {
    let max_h = *plan.horizons.iter().max().unwrap_or(&1);
    let mut t = CountTable::new(CountKind::Separated, Provenance::Numeric);
    t.seed = plan.seed;
    for &eps in ladder {
        let radius = eps * plan.radius_factor;
        let delta = radius * plan.delta_factor;
        let net_depth = (max_h - 1) * plan.depth_multiplier.max(1) + 1;
        let mut sample = fx.sample_for(delta, net_depth, radius, plan.per_block_cap)?;
        if let Some(f) = filter {
            sample.points.retain(|p| f(p));
        }
        check_resolution(sample.resolution, radius)?;
        let ctx = BowenContext::with_sample(fx.system.clone(), fx.space.clone(), max_h, &sample)?;
        t.grid_resolution = Some(sample.resolution);
        for &m in &plan.horizons {
            let count = greedy::greedy_separated(&ctx, m, radius);
            t.push(m, radius, BigUint::from(count.max(1)));
        }
    }
    Ok(t)
}

/// Estimation of a system over an explicitly given point set (for
/// declared non-wandering sets and other finite restrictions).
pub fn estimate_on_points(
    fx: &Fixture,
    plan: &EstimatePlan,
    points: Vec<crate::space::Point>,
) -> Result<EstimateOutcome> {
    let ladder = plan.ladder.clone().unwrap_or_else(|| fx.default_ladder.clone());
    if ladder.len() < MIN_LADDER {
        return Err(Error::InsufficientLadder { have: ladder.len(), need: MIN_LADDER });
    }
    let max_h = *plan.horizons.iter().max().unwrap_or(&1);
    let sample = SampleSet { points, resolution: 0.0 };
    let ctx = BowenContext::with_sample(fx.system.clone(), fx.space.clone(), max_h, &sample)?;
    let mut t = CountTable::new(CountKind::Separated, Provenance::Numeric);
    t.seed = plan.seed;
    for &eps in &ladder {
        for &m in &plan.horizons {
            let count = greedy::greedy_separated(&ctx, m, eps * plan.radius_factor);
            t.push(m, eps * plan.radius_factor, BigUint::from(count.max(1)));
        }
    }
    t.validate()?;
    let curve = rate_curve(&t, plan.method, plan.window)?;
    let report = mmd_estimate(&curve, Some(fx.ambient_box_dim))?;
    Ok(EstimateOutcome { fixture_id: format!("{}|restricted", fx.id), table: t, curve, report })
}

/// The three-way comparison at one cell: `sep(2 eps) <= span(eps) <= sep(eps)`
/// computed on one shared sample.
#[derive(Clone, Copy, Debug)]
pub struct ChainTriple {
    pub sep_at_eps: u64,
    pub sep_at_2eps: u64,
    pub span_at_eps: u64,
}

impl ChainTriple {
    pub fn holds(&self) -> bool {
        self.sep_at_2eps <= self.span_at_eps && self.span_at_eps <= self.sep_at_eps
    }
}

pub fn comparison_chain(fx: &Fixture, eps: f64, horizon: usize, plan: &EstimatePlan) -> Result<ChainTriple> {
    // The sample must be a delta-net for the doubled radius as well.
    let delta = eps * plan.delta_factor;
    let sample = fx.sample_for(delta, horizon, eps, plan.per_block_cap)?;
    let ctx = BowenContext::with_sample(fx.system.clone(), fx.space.clone(), horizon, &sample)?;
    Ok(ChainTriple {
        sep_at_eps: greedy::greedy_separated(&ctx, horizon, eps) as u64,
        sep_at_2eps: greedy::greedy_separated(&ctx, horizon, 2.0 * eps) as u64,
        span_at_eps: greedy::greedy_cover(&ctx, horizon, eps) as u64,
    })
}
