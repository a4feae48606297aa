//! Executable constructions of the example systems, each carrying its
//! analytically known invariant value as attached ground truth.
//!
//! Fixtures are immutable after construction and safe to evaluate from
//! many threads. The catalogue is keyed by the names the CLI accepts:
//! `example33`, `phi_a:<a>`, `shift:interval`, `shift:kakeya_A`,
//! `binary_power_shift`, `binary_shift`, `cat_power:<trace>`,
//! `damped:<preset>`, `truncated:<preset>`, plus the small service
//! fixtures `constant`, `identity`, `tent`, `north_south`,
//! `rotation:<p>/<q>`, and `rotation_seq`.

mod block_map;
mod shift_space;
mod toral;

pub use block_map::{tent_map, BlockIntervalMap, DEFAULT_BLOCK_COUNT};
pub use shift_space::{binary_power_shift_system, window_rule, ProductShiftSpace};
pub use toral::ToralMapFixture;

use crate::error::{Error, Result};
use crate::rational::tent_exact;
use crate::space::{MetricSpace, Point, SampleSet};
use crate::system::{SeqKind, SystemSequence};
use num_bigint::BigUint;
use num_traits::One;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GroundTruth {
    Value(f64),
    Infinite,
    Unknown,
}

/// Where a fixture's count tables come from.
#[derive(Clone)]
pub enum CountSource {
    /// Greedy counting over sampled orbits.
    Numeric,
    /// Exact closed-form counts `(horizon, eps) -> count`.
    Oracle(Arc<dyn Fn(usize, f64) -> BigUint + Send + Sync>),
    /// Product-structure lift of a numeric base count: separated
    /// points on the base grid at radius eps, raised to the horizon.
    ProductLift { base: MetricSpace },
}

/// How numeric samples are produced.
#[derive(Clone)]
pub enum NetStrategy {
    /// The space's uniform lattice at the requested resolution.
    Uniform,
    /// Orbit-resolving per-block refinement over the block region.
    BlockRefined(Arc<BlockIntervalMap>),
}

pub type PointSampler = Arc<dyn Fn(f64) -> Vec<Point> + Send + Sync>;

#[derive(Clone)]
pub struct Fixture {
    pub id: String,
    pub space: MetricSpace,
    pub system: SystemSequence,
    pub ground_truth: GroundTruth,
    /// Box dimension of the ambient space (divergence-test reference).
    pub ambient_box_dim: f64,
    pub default_ladder: Vec<f64>,
    pub default_horizons: Vec<usize>,
    pub counts: CountSource,
    pub net: NetStrategy,
    /// Every materialized map is a homeomorphism.
    pub invertible: bool,
    /// Sampler for the non-wandering set, when the fixture declares one.
    pub omega: Option<PointSampler>,
    pub block_map: Option<Arc<BlockIntervalMap>>,
}

impl std::fmt::Debug for Fixture {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fixture")
            .field("id", &self.id)
            .field("ground_truth", &self.ground_truth)
            .finish()
    }
}

impl Fixture {
    fn base(id: &str, space: MetricSpace, system: SystemSequence) -> Self {
        let ladder = default_geometric_ladder(space.diameter.max(1e-6));
        Fixture {
            id: id.to_string(),
            space,
            system,
            ground_truth: GroundTruth::Unknown,
            ambient_box_dim: 1.0,
            default_ladder: ladder,
            default_horizons: (2..=5).collect(),
            counts: CountSource::Numeric,
            net: NetStrategy::Uniform,
            invertible: false,
            omega: None,
            block_map: None,
        }
    }

    pub fn sample_for(&self, delta: f64, horizon: usize, radius: f64, per_block_cap: usize) -> Result<SampleSet> {
        match &self.net {
            NetStrategy::Uniform => self.space.sample(delta),
            NetStrategy::BlockRefined(bm) => Ok(bm.refined_net(delta, horizon, radius, per_block_cap)),
        }
    }
}

/// Geometric radius ladder with ratio 1/2 from diameter/4.
pub fn default_geometric_ladder(diameter: f64) -> Vec<f64> {
    let mut eps = diameter / 4.0;
    let mut out = Vec::new();
    for _ in 0..5 {
        out.push(eps);
        eps /= 2.0;
    }
    out
}

/// The autonomous tent-like system `g(x) = |1 - |3x - 1||`, exact.
pub fn tent_system() -> SystemSequence {
    SystemSequence::from_exact(SeqKind::Autonomous, Arc::new(|_, x| tent_exact(x)))
}

/// Block-map fixture wiring shared by the interval presets.
fn block_fixture(id: &str, map: BlockIntervalMap) -> Fixture {
    let map = Arc::new(map);
    let system = map.system();
    let mut fx = Fixture::base(id, MetricSpace::interval(), system);
    fx.ground_truth = map.known_mdim.map_or(GroundTruth::Unknown, GroundTruth::Value);
    fx.default_ladder = map.eps_ladder.iter().take(3).copied().collect();
    fx.net = NetStrategy::BlockRefined(map.clone());
    fx.block_map = Some(map);
    fx
}

pub fn example33_fixture(block_count: usize) -> Result<Fixture> {
    Ok(block_fixture("example33", BlockIntervalMap::example33(block_count)?))
}

pub fn phi_a_fixture(a: f64, block_count: usize) -> Result<Fixture> {
    let id = format!("phi_a:{a}");
    Ok(block_fixture(&id, BlockIntervalMap::phi_a(a, block_count)?))
}

/// Interval fixtures reused on the circle: the block maps fix 0 and 1,
/// so they induce continuous circle maps; the distance becomes the
/// wraparound one.
pub fn circle_phi_a_fixture(a: f64, block_count: usize) -> Result<Fixture> {
    let mut fx = phi_a_fixture(a, block_count)?;
    fx.id = format!("circle_phi_a:{a}");
    fx.space = MetricSpace::circle();
    Ok(fx)
}

/// One-sided product shift over a base space whose box dimension is
/// the attached ground truth.
pub fn product_shift_fixture(id: &str, base: MetricSpace, truth: GroundTruth, ambient: f64) -> Fixture {
    // Window large enough for the default ladder; per-radius windows
    // are recomputed by the estimator via the window rule.
    let shift = ProductShiftSpace::new(base.clone(), false, window_rule(2f64.powi(-7))).unwrap();
    let mut fx = Fixture::base(id, shift.space(), shift.shift_system());
    fx.ground_truth = truth;
    fx.ambient_box_dim = ambient;
    fx.default_ladder = (3..=7).map(|q| 2f64.powi(-q)).collect();
    fx.counts = CountSource::ProductLift { base };
    fx
}

pub fn binary_power_shift_fixture() -> Fixture {
    let window = 16;
    let system = binary_power_shift_system(window);
    let mut fx = Fixture::base("binary_power_shift", MetricSpace::shift_window(window - 1, false), system);
    fx.ground_truth = GroundTruth::Infinite;
    fx.ambient_box_dim = 1.0;
    fx.default_ladder = (2..=8).map(|q| 2f64.powi(-q)).collect();
    fx.default_horizons = (1..=5).collect();
    fx.counts = CountSource::Oracle(Arc::new(|horizon, eps| {
        // sep(n, f, eps) >= 2^{2^{n+1} - 2 + k} for 2^{-(k+1)} <= eps < 2^{-k}.
        let k = dyadic_exponent(eps);
        let shift_power = (1u64 << (horizon as u64 + 1)) - 2;
        BigUint::one() << (shift_power + k as u64) as usize
    }));
    fx
}

/// The autonomous full shift on binary sequences.
pub fn binary_shift_fixture() -> Fixture {
    let window = 16;
    let shift = ProductShiftSpace::new(MetricSpace::interval(), false, window).unwrap();
    let mut fx = Fixture::base("binary_shift", shift.space(), shift.shift_system());
    fx.ground_truth = GroundTruth::Value(0.0);
    fx.ambient_box_dim = 1.0;
    fx.default_ladder = (2..=8).map(|q| 2f64.powi(-q)).collect();
    fx.default_horizons = (1..=5).collect();
    fx.counts = CountSource::Oracle(Arc::new(|horizon, eps| {
        // Words distinguishable within the first n + k coordinates.
        let k = dyadic_exponent(eps);
        BigUint::one() << (horizon + k)
    }));
    fx
}

pub fn cat_power_fixture(trace: i64) -> Result<Fixture> {
    let matrix = if trace == 3 {
        [[2, 1], [1, 1]]
    } else {
        [[trace, -1], [1, 0]]
    };
    let toral = Arc::new(ToralMapFixture::new(matrix)?);
    let mut fx = Fixture::base(&format!("cat_power:{trace}"), MetricSpace::torus2(), toral.power_system());
    fx.ground_truth = GroundTruth::Infinite;
    fx.ambient_box_dim = 2.0;
    fx.default_ladder = (2..=8).map(|q| 2f64.powi(-q)).collect();
    fx.default_horizons = (1..=6).collect();
    let t = toral.clone();
    fx.counts = CountSource::Oracle(Arc::new(move |horizon, eps| {
        // Fixed points of phi^{2^n} are separated at radius <= 1/4.
        if eps <= 0.25 {
            t.power_sep_lower(horizon as u32)
        } else {
            BigUint::one()
        }
    }));
    Ok(fx)
}

/// Pointwise-damped copy of an interval fixture. The schedule
/// approaches 1 with vanishing partial products; the early factors are
/// small enough that the decay is visible within the certified horizon
/// window, so the declared non-wandering set `{0}` matches what the
/// materialized dynamics do.
pub fn damped_fixture(preset: &str) -> Result<Fixture> {
    let (inner_id, inner_system, omega_point) = match preset {
        "phi_a_0.5" => {
            let bm = BlockIntervalMap::phi_a(0.5, 4)?;
            (format!("damped:{preset}"), bm.system(), 0.0)
        }
        "identity" => (format!("damped:{preset}"), SystemSequence::identity(), 0.0),
        other => return Err(Error::UnknownFixture(format!("damped:{other}"))),
    };
    let damped = inner_system.damp(Arc::new(|n| (n as i64, n as i64 + 6)))?;
    let mut fx = Fixture::base(&inner_id, MetricSpace::interval(), damped);
    fx.ground_truth = GroundTruth::Value(0.0);
    fx.omega = Some(Arc::new(move |_| vec![vec![omega_point]]));
    if preset == "phi_a_0.5" {
        let bm = Arc::new(BlockIntervalMap::phi_a(0.5, 4)?);
        fx.default_ladder = bm.eps_ladder.iter().take(3).copied().collect();
        fx.net = NetStrategy::BlockRefined(bm.clone());
        fx.block_map = Some(bm);
    }
    Ok(fx)
}

/// Truncated family `f_n(x) = phi(x)` below the cutoff `a_{n+1}`,
/// constant above it; converges uniformly to phi.
pub fn truncated_fixture(preset: &str) -> Result<Fixture> {
    match preset {
        "example33" => {
            let bm = Arc::new(BlockIntervalMap::example33(6)?);
            let phi = bm.system();
            let cuts = bm.boundaries.clone();
            let cutoff = Arc::new(move |n: usize| {
                let idx = n.min(cuts.len() - 1);
                cuts[idx]
            });
            let system = SystemSequence::truncate(&phi, cutoff)?;
            let mut fx = Fixture::base("truncated:example33", MetricSpace::interval(), system);
            fx.ground_truth = GroundTruth::Value(0.0);
            fx.default_ladder = bm.eps_ladder.iter().take(3).copied().collect();
            fx.net = NetStrategy::BlockRefined(bm.clone());
            fx.block_map = Some(bm);
            Ok(fx)
        }
        other => Err(Error::UnknownFixture(format!("truncated:{other}"))),
    }
}

pub fn constant_fixture() -> Fixture {
    let mut fx = Fixture::base("constant", MetricSpace::interval(), SystemSequence::constant(0.0));
    fx.ground_truth = GroundTruth::Value(0.0);
    fx
}

pub fn identity_fixture() -> Fixture {
    let mut fx = Fixture::base("identity", MetricSpace::interval(), SystemSequence::identity());
    fx.ground_truth = GroundTruth::Value(0.0);
    fx.invertible = true;
    // Every point is non-wandering.
    fx.omega = Some(Arc::new(|delta| {
        MetricSpace::interval().sample(delta).map(|s| s.points).unwrap_or_default()
    }));
    fx
}

pub fn tent_fixture() -> Fixture {
    let mut fx = Fixture::base("tent", MetricSpace::interval(), tent_system());
    fx.ground_truth = GroundTruth::Value(0.0);
    fx
}

/// North-south style interval map `x -> x^2`: non-wandering set {0, 1}.
pub fn north_south_fixture() -> Fixture {
    let system = SystemSequence::autonomous_float(1, 40, |x| vec![x[0] * x[0]]);
    let mut fx = Fixture::base("north_south", MetricSpace::interval(), system);
    fx.ground_truth = GroundTruth::Value(0.0);
    fx.invertible = true;
    fx.omega = Some(Arc::new(|_| vec![vec![0.0], vec![1.0]]));
    fx
}

pub fn rotation_fixture(p: i64, q: i64) -> Result<Fixture> {
    if q <= 0 {
        return Err(Error::invalid("rotation denominator must be positive"));
    }
    let system = SystemSequence::rotation_sequence(Arc::new(move |_| (p, q)));
    let mut fx = Fixture::base(&format!("rotation:{p}/{q}"), MetricSpace::circle(), system);
    fx.ground_truth = GroundTruth::Value(0.0);
    fx.invertible = true;
    fx.omega = Some(Arc::new(|delta| {
        MetricSpace::circle().sample(delta).map(|s| s.points).unwrap_or_default()
    }));
    Ok(fx)
}

/// Rotation sequence with varying rational angles (all isometries).
pub fn rotation_sequence_fixture() -> Fixture {
    let system = SystemSequence::rotation_sequence(Arc::new(|n| (1, n as i64 + 2)));
    let mut fx = Fixture::base("rotation_seq", MetricSpace::circle(), system);
    fx.ground_truth = GroundTruth::Value(0.0);
    fx.invertible = true;
    fx
}

fn dyadic_exponent(eps: f64) -> usize {
    // k with 2^{-(k+1)} <= eps < 2^{-k}.
    let t = -eps.log2();
    let k = if (t - t.round()).abs() < 1e-9 { t.round() - 1.0 } else { t.floor() };
    k.max(0.0) as usize
}

/// Look up a fixture by its catalogue name.
pub fn by_name(name: &str) -> Result<Fixture> {
    if let Some(rest) = name.strip_prefix("phi_a:") {
        let a = parse_number(rest)?;
        return phi_a_fixture(a, DEFAULT_BLOCK_COUNT);
    }
    if let Some(rest) = name.strip_prefix("circle_phi_a:") {
        let a = parse_number(rest)?;
        return circle_phi_a_fixture(a, DEFAULT_BLOCK_COUNT);
    }
    if let Some(rest) = name.strip_prefix("cat_power:") {
        let t: i64 = rest
            .parse()
            .map_err(|_| Error::UnknownFixture(name.to_string()))?;
        return cat_power_fixture(t);
    }
    if let Some(rest) = name.strip_prefix("damped:") {
        return damped_fixture(rest);
    }
    if let Some(rest) = name.strip_prefix("truncated:") {
        return truncated_fixture(rest);
    }
    if let Some(rest) = name.strip_prefix("rotation:") {
        let (p, q) = rest
            .split_once('/')
            .and_then(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)))
            .ok_or_else(|| Error::UnknownFixture(name.to_string()))?;
        return rotation_fixture(p, q);
    }
    match name {
        "example33" => example33_fixture(4),
        "shift:interval" => Ok(product_shift_fixture(
            "shift:interval",
            MetricSpace::interval(),
            GroundTruth::Value(1.0),
            1.0,
        )),
        "shift:kakeya_A" => Ok(product_shift_fixture(
            "shift:kakeya_A",
            MetricSpace::reciprocal_set(),
            GroundTruth::Value(0.5),
            0.5,
        )),
        "binary_power_shift" => Ok(binary_power_shift_fixture()),
        "binary_shift" => Ok(binary_shift_fixture()),
        "constant" => Ok(constant_fixture()),
        "identity" => Ok(identity_fixture()),
        "tent" => Ok(tent_fixture()),
        "north_south" => Ok(north_south_fixture()),
        "rotation_seq" => Ok(rotation_sequence_fixture()),
        other => Err(Error::UnknownFixture(other.to_string())),
    }
}

/// Names the CLI lists.
pub fn catalogue_names() -> Vec<&'static str> {
    vec![
        "example33",
        "phi_a:<a>",
        "circle_phi_a:<a>",
        "shift:interval",
        "shift:kakeya_A",
        "binary_power_shift",
        "binary_shift",
        "cat_power:<trace>",
        "damped:phi_a_0.5",
        "damped:identity",
        "truncated:example33",
        "constant",
        "identity",
        "tent",
        "north_south",
        "rotation:<p>/<q>",
        "rotation_seq",
    ]
}

fn parse_number(s: &str) -> Result<f64> {
    if let Some((num, den)) = s.split_once('/') {
        let n: f64 = num.parse().map_err(|_| Error::invalid(format!("bad number {s}")))?;
        let d: f64 = den.parse().map_err(|_| Error::invalid(format!("bad number {s}")))?;
        return Ok(n / d);
    }
    s.parse().map_err(|_| Error::invalid(format!("bad number {s}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalogue_round_trip() {
        for name in [
            "example33",
            "phi_a:0.5",
            "shift:interval",
            "shift:kakeya_A",
            "binary_power_shift",
            "binary_shift",
            "cat_power:3",
            "damped:phi_a_0.5",
            "damped:identity",
            "truncated:example33",
            "constant",
            "identity",
            "tent",
            "north_south",
            "rotation:1/3",
            "rotation_seq",
        ] {
            let fx = by_name(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(!fx.default_ladder.is_empty(), "{name}");
        }
        assert!(by_name("no_such_fixture").is_err());
    }

    #[test]
    fn phi_a_fraction_parses() {
        let fx = by_name("phi_a:1/2").unwrap();
        assert_eq!(fx.ground_truth, GroundTruth::Value(0.5));
    }

    #[test]
    fn autonomous_systems_repeat_their_first_map() {
        let fx = tent_fixture();
        for n in 2..6 {
            for x in [0.0, 0.2, 0.9] {
                assert_eq!(fx.system.map_at(n, &[x]), fx.system.map_at(1, &[x]));
            }
        }
    }

    #[test]
    fn binary_power_counts_match_the_closed_form() {
        let fx = binary_power_shift_fixture();
        if let CountSource::Oracle(f) = &fx.counts {
            // horizon 1, eps = 0.25 (k = 1): 2^{2 + 1} = 8.
            assert_eq!(f(1, 0.25), BigUint::from(8u32));
            // horizon 2, eps = 0.25: 2^{6 + 1} = 128.
            assert_eq!(f(2, 0.25), BigUint::from(128u32));
        } else {
            panic!("expected oracle counts");
        }
    }

    #[test]
    fn dyadic_exponent_brackets() {
        assert_eq!(dyadic_exponent(0.25), 1); // 2^-2 <= eps < 2^-1
        assert_eq!(dyadic_exponent(0.3), 1);
        assert_eq!(dyadic_exponent(0.125), 2);
        assert_eq!(dyadic_exponent(0.6), 0);
    }

    #[test]
    fn damped_schedule_shift_matches_shifted_schedule() {
        // Shifting the damped system is the damped system with the
        // shifted schedule, pointwise on a probe grid.
        let inner = tent_system();
        let damped = inner.damp(Arc::new(|n| (n as i64, n as i64 + 1))).unwrap();
        let shifted = damped.shift(1);
        let redamped = inner.damp(Arc::new(|n| (n as i64 + 1, n as i64 + 2))).unwrap();
        for t in 0..60 {
            let x = [t as f64 / 59.0];
            for n in 1..5 {
                let a = shifted.map_at(n, &x)[0];
                let b = redamped.map_at(n, &x)[0];
                assert!((a - b).abs() < 1e-15, "n={n} x={x:?}");
            }
        }
    }

    #[test]
    fn truncated_map_agrees_below_cutoff_and_clamps_above() {
        let fx = truncated_fixture("example33").unwrap();
        let bm = fx.block_map.as_ref().unwrap();
        let phi = bm.system();
        for n in 1..4usize {
            let cut = bm.boundaries[(n + 1).min(bm.boundaries.len() - 1)];
            let below = [cut * 0.5];
            assert!((fx.system.map_at(n, &below)[0] - phi.map_at(1, &below)[0]).abs() < 1e-12);
            assert!((fx.system.map_at(n, &[1.0])[0] - cut).abs() < 1e-12);
        }
    }

    #[test]
    fn truncated_sup_distance_is_bounded_by_tail_oscillation() {
        let fx = truncated_fixture("example33").unwrap();
        let bm = fx.block_map.as_ref().unwrap();
        let phi = bm.system();
        for n in 1..4usize {
            let cut = bm.boundaries[(n + 1).min(bm.boundaries.len() - 1)];
            // sup |f_n - phi| over a grid vs sup_{x >= cut} |phi(x) - cut|.
            let mut sup_dist: f64 = 0.0;
            let mut tail_osc: f64 = 0.0;
            for t in 0..=400 {
                let x = t as f64 / 400.0;
                let fx_val = fx.system.map_at(n, &[x])[0];
                let phi_val = phi.map_at(1, &[x])[0];
                sup_dist = sup_dist.max((fx_val - phi_val).abs());
                if x >= cut {
                    tail_osc = tail_osc.max((phi_val - cut).abs());
                }
            }
            assert!(sup_dist <= tail_osc + 1e-12, "n={n}");
        }
    }
}
