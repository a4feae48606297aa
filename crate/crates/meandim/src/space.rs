//! Compact metric spaces presented as a distance function plus a
//! finite sampler at prescribed resolution.
//!
//! Points are fixed-width coordinate vectors. An interval or circle
//! point is one coordinate, a torus point two, a shift-space point a
//! window of base coordinates. Samplers return uniform lattices in
//! lexicographic order so greedy selections downstream are
//! reproducible.

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use serde::Serialize;

pub type Point = Vec<f64>;

#[derive(Clone, Debug, Serialize)]
pub enum SpaceKind {
    /// Closed interval `[lo, hi]` with `|x - y|`.
    Interval { lo: f64, hi: f64 },
    /// Unit circle as `[0, 1)` with wraparound distance.
    Circle,
    /// Flat 2-torus `[0,1)^2`, Euclidean distance on the closest images.
    Torus2,
    /// The set `{0} + {1/n : n >= 1}` with `|x - y|`.
    ReciprocalSet,
    /// A single point.
    Singleton,
    /// An explicit finite point list in `[0, 1]`.
    FinitePoints { points: Vec<f64> },
    /// Sequences over a base interval with the weighted metric
    /// `sum_i 2^{-|i|} d(x_i, y_i)` truncated to the window `|i| <= l`.
    /// One-sided windows hold coordinates `0..=l`; two-sided windows
    /// hold `-l..=l` stored left to right.
    ShiftWindow { window: usize, two_sided: bool },
}

/// A compact metric space handle: distance, diameter, sampler.
#[derive(Clone, Debug, Serialize)]
pub struct MetricSpace {
    pub kind: SpaceKind,
    pub diameter: f64,
}

/// A finite sample with its guaranteed net resolution: every point of
/// the space lies within `resolution` of some sample point.
#[derive(Clone, Debug)]
pub struct SampleSet {
    pub points: Vec<Point>,
    pub resolution: f64,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn circle_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).abs() % 1.0;
    d.min(1.0 - d)
}

impl MetricSpace {
    pub fn interval() -> Self {
        MetricSpace { kind: SpaceKind::Interval { lo: 0.0, hi: 1.0 }, diameter: 1.0 }
    }

    pub fn interval_on(lo: f64, hi: f64) -> Self {
        MetricSpace { kind: SpaceKind::Interval { lo, hi }, diameter: hi - lo }
    }

    pub fn circle() -> Self {
        MetricSpace { kind: SpaceKind::Circle, diameter: 0.5 }
    }

    pub fn torus2() -> Self {
        MetricSpace { kind: SpaceKind::Torus2, diameter: (0.5f64).hypot(0.5) }
    }

    pub fn reciprocal_set() -> Self {
        MetricSpace { kind: SpaceKind::ReciprocalSet, diameter: 1.0 }
    }

    pub fn singleton() -> Self {
        MetricSpace { kind: SpaceKind::Singleton, diameter: 0.0 }
    }

    pub fn finite_points(mut points: Vec<f64>) -> Self {
        points.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let diameter = if points.len() > 1 { points[points.len() - 1] - points[0] } else { 0.0 };
        MetricSpace { kind: SpaceKind::FinitePoints { points }, diameter }
    }

    /// Sequence space over `[0,1]` truncated to the given window.
    pub fn shift_window(window: usize, two_sided: bool) -> Self {
        // Full weight sum: one-sided 2, two-sided 3 (minus truncation).
        let full: f64 = if two_sided { 3.0 } else { 2.0 };
        MetricSpace { kind: SpaceKind::ShiftWindow { window, two_sided }, diameter: full }
    }

    pub fn point_dim(&self) -> usize {
        match &self.kind {
            SpaceKind::Torus2 => 2,
            SpaceKind::ShiftWindow { window, two_sided } => {
                if *two_sided {
                    2 * window + 1
                } else {
                    window + 1
                }
            }
            _ => 1,
        }
    }

    pub fn dist(&self, x: &[f64], y: &[f64]) -> f64 {
        match &self.kind {
            SpaceKind::Interval { .. }
            | SpaceKind::ReciprocalSet
            | SpaceKind::FinitePoints { .. } => (x[0] - y[0]).abs(),
            SpaceKind::Singleton => 0.0,
            SpaceKind::Circle => circle_dist(x[0], y[0]),
            SpaceKind::Torus2 => {
                let dx = circle_dist(x[0], y[0]);
                let dy = circle_dist(x[1], y[1]);
                dx.hypot(dy)
            }
            SpaceKind::ShiftWindow { window, two_sided } => {
                let mut s = 0.0;
                if *two_sided {
                    let l = *window as i64;
                    for (slot, (a, b)) in x.iter().zip(y.iter()).enumerate() {
                        let i = (slot as i64 - l).unsigned_abs() as i32;
                        s += (a - b).abs() / 2f64.powi(i);
                    }
                } else {
                    for (i, (a, b)) in x.iter().zip(y.iter()).enumerate() {
                        s += (a - b).abs() / (1u64 << i.min(62)) as f64;
                    }
                }
                s
            }
        }
    }

    /// Coordinate used for greedy bucketing: distance never falls below
    /// the difference in this coordinate (wrapping kinds excepted,
    /// which the greedy handles with wrapped bucket keys).
    pub(crate) fn bucket_coord(&self, x: &[f64]) -> f64 {
        match &self.kind {
            SpaceKind::ShiftWindow { window, two_sided } if *two_sided => x[*window],
            _ => x[0],
        }
    }

    pub(crate) fn wraps(&self) -> bool {
        matches!(self.kind, SpaceKind::Circle | SpaceKind::Torus2)
    }

    /// Uniform lattice at resolution `delta` (a `delta`-net of the
    /// space), points in lexicographic order.
    pub fn sample(&self, delta: f64) -> Result<SampleSet> {
        if delta <= 0.0 {
            return Err(Error::invalid("sampler resolution must be positive"));
        }
        let points: Vec<Point> = match &self.kind {
            SpaceKind::Interval { lo, hi } => grid_1d(*lo, *hi, delta).into_iter().map(|x| vec![x]).collect(),
            SpaceKind::Circle => {
                let n = (1.0 / delta).ceil() as usize;
                (0..n).map(|i| vec![i as f64 / n as f64]).collect()
            }
            SpaceKind::Torus2 => {
                let n = (1.0 / delta).ceil() as usize;
                let mut pts = Vec::with_capacity(n * n);
                for i in 0..n {
                    for j in 0..n {
                        pts.push(vec![i as f64 / n as f64, j as f64 / n as f64]);
                    }
                }
                pts
            }
            SpaceKind::ReciprocalSet => {
                // 1/k for k <= ceil(1/delta), plus the accumulation point.
                let kmax = (1.0 / delta).ceil() as usize;
                let mut pts = vec![vec![0.0]];
                for k in (1..=kmax).rev() {
                    pts.push(vec![1.0 / k as f64]);
                }
                pts
            }
            SpaceKind::Singleton => vec![vec![0.0]],
            SpaceKind::FinitePoints { points } => points.iter().map(|&x| vec![x]).collect(),
            SpaceKind::ShiftWindow { window, two_sided } => {
                let w = if *two_sided { 2 * window + 1 } else { window + 1 };
                let axis = grid_1d(0.0, 1.0, delta);
                let mut pts: Vec<Point> = vec![vec![]];
                for _ in 0..w {
                    let mut next = Vec::with_capacity(pts.len() * axis.len());
                    for p in &pts {
                        for &v in &axis {
                            let mut q = p.clone();
                            q.push(v);
                            next.push(q);
                        }
                    }
                    pts = next;
                    if pts.len() > 2_000_000 {
                        return Err(Error::invalid(format!(
                            "shift-window lattice at resolution {delta} exceeds the sample budget"
                        )));
                    }
                }
                pts
            }
        };
        Ok(SampleSet { points, resolution: delta })
    }

    /// Randomized verification of the metric axioms on sampled triples
    /// plus the delta-net property of the sampler on a probe grid.
    pub fn check_metric_axioms(&self, delta: f64, triples: usize, seed: u64) -> Result<()> {
        let sample = self.sample(delta)?;
        let pts = &sample.points;
        if pts.is_empty() {
            return Err(Error::Construction("sampler returned no points".into()));
        }
        let mut rng = SplitMix64::new(seed);
        let tol = 1e-12;
        for _ in 0..triples {
            let x = &pts[rng.next_index(pts.len())];
            let y = &pts[rng.next_index(pts.len())];
            let z = &pts[rng.next_index(pts.len())];
            let dxy = self.dist(x, y);
            let dyx = self.dist(y, x);
            if (dxy - dyx).abs() > tol {
                return Err(Error::Construction("distance is not symmetric".into()));
            }
            if self.dist(x, x) > tol {
                return Err(Error::Construction("dist(x, x) != 0".into()));
            }
            if dxy > self.dist(x, z) + self.dist(z, y) + tol {
                return Err(Error::Construction("triangle inequality violated".into()));
            }
            if dxy > self.diameter + tol {
                return Err(Error::Construction("distance exceeds declared diameter".into()));
            }
        }
        // Net property: probe points lie within delta of the sample.
        let probe = self.sample(delta / 2.0)?;
        for p in probe.points.iter().step_by(7) {
            let nearest = pts.iter().map(|s| self.dist(p, s)).fold(f64::INFINITY, f64::min);
            if nearest > delta + tol {
                return Err(Error::Construction(format!(
                    "sampler output is not a {delta}-net (probe point at distance {nearest})"
                )));
            }
        }
        Ok(())
    }
}

fn grid_1d(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    if hi <= lo {
        return vec![lo];
    }
    let n = ((hi - lo) / step).ceil() as usize;
    let mut v: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    if let Some(last) = v.last_mut() {
        *last = hi;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_metric_axioms_hold() {
        MetricSpace::interval().check_metric_axioms(0.01, 10_000, 0).unwrap();
    }

    #[test]
    fn circle_metric_axioms_hold() {
        MetricSpace::circle().check_metric_axioms(0.01, 10_000, 1).unwrap();
    }

    #[test]
    fn torus_metric_axioms_hold() {
        MetricSpace::torus2().check_metric_axioms(0.05, 5_000, 2).unwrap();
    }

    #[test]
    fn reciprocal_set_metric_axioms_hold() {
        MetricSpace::reciprocal_set().check_metric_axioms(0.01, 5_000, 3).unwrap();
    }

    #[test]
    fn shift_window_metric_axioms_hold() {
        MetricSpace::shift_window(2, false).check_metric_axioms(0.25, 2_000, 4).unwrap();
        MetricSpace::shift_window(1, true).check_metric_axioms(0.25, 2_000, 5).unwrap();
    }

    #[test]
    fn circle_wraps() {
        let s = MetricSpace::circle();
        assert!((s.dist(&[0.05], &[0.95]) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn interval_grid_is_lexicographic_and_covers_endpoints() {
        let s = MetricSpace::interval().sample(0.1).unwrap();
        let xs: Vec<f64> = s.points.iter().map(|p| p[0]).collect();
        assert_eq!(xs[0], 0.0);
        assert_eq!(*xs.last().unwrap(), 1.0);
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn one_sided_shift_distance_weights_by_coordinate() {
        let s = MetricSpace::shift_window(2, false);
        let d = s.dist(&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]);
        assert!((d - (0.5 + 0.25)).abs() < 1e-15);
    }

    #[test]
    fn sampler_is_deterministic() {
        let a = MetricSpace::interval().sample(0.013).unwrap();
        let b = MetricSpace::interval().sample(0.013).unwrap();
        assert_eq!(a.points, b.points);
    }
}
