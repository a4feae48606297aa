//! The orbit metric `d_n(x, y) = max_{0 <= j < n} d(f_1^(j) x, f_1^(j) y)`
//! and per-sample orbit caches.
//!
//! A context is built once for a (system, space, horizon) triple,
//! optionally precomputing the orbit segments of a sample so that the
//! counting kernels only touch flat `f64` rows. Caches are immutable
//! after construction; parallel queries are safe.

use crate::error::{Error, Result};
use crate::space::{MetricSpace, SampleSet};
use crate::system::SystemSequence;

pub struct BowenContext {
    pub system: SystemSequence,
    pub space: MetricSpace,
    pub horizon: usize,
    cache: Option<OrbitCache>,
}

impl std::fmt::Debug for BowenContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BowenContext")
            .field("system", &self.system)
            .field("horizon", &self.horizon)
            .field("cached_points", &self.cached_len())
            .finish()
    }
}

pub(crate) struct OrbitCache {
    /// Row-major: point index, then iterate j = 0..horizon, then coordinate.
    data: Vec<f64>,
    pub horizon: usize,
    pub dim: usize,
    pub len: usize,
}

impl OrbitCache {
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        let stride = self.horizon * self.dim;
        &self.data[i * stride..(i + 1) * stride]
    }
}

impl BowenContext {
    pub fn new(system: SystemSequence, space: MetricSpace, horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::invalid("horizon must be >= 1"));
        }
        if horizon > system.horizon_budget {
            return Err(Error::PrecisionBudget { horizon, budget: system.horizon_budget });
        }
        if system.dim != space.point_dim() {
            return Err(Error::invalid(format!(
                "system dimension {} does not match space dimension {}",
                system.dim,
                space.point_dim()
            )));
        }
        Ok(BowenContext { system, space, horizon, cache: None })
    }

    /// Build the context and precompute orbit segments for the sample.
    pub fn with_sample(
        system: SystemSequence,
        space: MetricSpace,
        horizon: usize,
        sample: &SampleSet,
    ) -> Result<Self> {
        let mut ctx = Self::new(system, space, horizon)?;
        ctx.attach_sample(sample);
        Ok(ctx)
    }

    pub fn attach_sample(&mut self, sample: &SampleSet) {
        let dim = self.system.dim;
        let mut data = Vec::with_capacity(sample.len() * self.horizon * dim);
        for p in &sample.points {
            let orbit = self.system.orbit(p, self.horizon);
            for row in orbit {
                data.extend_from_slice(&row);
            }
        }
        self.cache = Some(OrbitCache { data, horizon: self.horizon, dim, len: sample.len() });
    }

    pub fn cached_len(&self) -> usize {
        self.cache.as_ref().map_or(0, |c| c.len)
    }

    /// `d_n(x, y)` computed from fresh orbit segments.
    pub fn distance(&self, x: &[f64], y: &[f64]) -> f64 {
        let ox = self.system.orbit(x, self.horizon);
        let oy = self.system.orbit(y, self.horizon);
        let mut best = 0.0f64;
        for (a, b) in ox.iter().zip(oy.iter()) {
            best = best.max(self.space.dist(a, b));
        }
        best
    }

    /// `d_m` between cached sample points, `m <= horizon`; early exit
    /// once the threshold is exceeded. Returns `true` when
    /// `d_m(i, j) > eps`.
    #[inline]
    pub(crate) fn separated_indexed(&self, i: usize, j: usize, m: usize, eps: f64) -> bool {
        let cache = self.cache.as_ref().expect("orbit cache attached");
        let a = cache.row(i);
        let b = cache.row(j);
        let dim = cache.dim;
        if dim == 1 {
            for t in 0..m {
                if (a[t] - b[t]).abs() > eps && !self.space.wraps() {
                    return true;
                }
                if self.space.wraps() && self.space.dist(&a[t..=t], &b[t..=t]) > eps {
                    return true;
                }
            }
            false
        } else {
            for t in 0..m {
                let xa = &a[t * dim..(t + 1) * dim];
                let xb = &b[t * dim..(t + 1) * dim];
                if self.space.dist(xa, xb) > eps {
                    return true;
                }
            }
            false
        }
    }

    /// `d_m` between cached sample points (full value, no early exit).
    pub fn distance_indexed(&self, i: usize, j: usize, m: usize) -> f64 {
        let cache = self.cache.as_ref().expect("orbit cache attached");
        let a = cache.row(i);
        let b = cache.row(j);
        let dim = cache.dim;
        let mut best = 0.0f64;
        for t in 0..m.min(cache.horizon) {
            let xa = &a[t * dim..(t + 1) * dim];
            let xb = &b[t * dim..(t + 1) * dim];
            best = best.max(self.space.dist(xa, xb));
        }
        best
    }

    /// Bucketing coordinate of a cached point (its j = 0 row).
    pub(crate) fn base_coord(&self, i: usize) -> f64 {
        let cache = self.cache.as_ref().expect("orbit cache attached");
        self.space.bucket_coord(&cache.row(i)[..cache.dim])
    }
}
