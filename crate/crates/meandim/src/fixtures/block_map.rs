//! Block interval maps: `[0, 1]` split into adjacent blocks `J_n` of
//! prescribed lengths, with the map acting on each block as the
//! increasing affine chart to `[0, 1]`, a power `g^{m_n}` of the
//! tent-like map `g(x) = |1 - |3x - 1||`, and the chart back.
//!
//! Block boundaries are fixed points, so the map is continuous, maps
//! each block onto itself, and induces a circle map. Blocks are
//! materialized up to a finite count; past them the map is the
//! identity on the residual interval.

use crate::error::{Error, Result};
use crate::rational::{rat_i64, rat_int, rat_to_f64, ExactBlockMap, Rat};
use crate::space::SampleSet;
use crate::system::{SeqKind, SystemSequence};
use num_traits::{One, Zero};
use std::sync::Arc;

/// Default number of materialized blocks for the infinite families.
pub const DEFAULT_BLOCK_COUNT: usize = 8;

pub fn tent_map(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::invalid(format!("tent map input {x} outside [0, 1]")));
    }
    Ok((1.0 - (3.0 * x - 1.0).abs()).abs())
}

fn tent_f64(x: f64) -> f64 {
    (1.0 - (3.0 * x - 1.0).abs()).abs()
}

#[derive(Clone, Debug)]
pub struct BlockIntervalMap {
    /// Block lengths `|J_n|`, sum <= 1.
    pub lengths: Vec<f64>,
    /// Boundaries `a_0 = 0 < a_1 < ... < a_B`.
    pub boundaries: Vec<f64>,
    /// Branch exponents `m_n` (the block slope is `3^{m_n}`).
    pub exponents: Vec<u32>,
    /// Analytically known metric mean dimension, when the preset has one.
    pub known_mdim: Option<f64>,
    /// Radius ladder attached by the preset.
    pub eps_ladder: Vec<f64>,
    exact: Option<Arc<ExactBlockMap>>,
}

impl BlockIntervalMap {
    /// Build from explicit length and exponent schedules.
    pub fn from_schedules(lengths: Vec<f64>, exponents: Vec<u32>) -> Result<Self> {
        if lengths.is_empty() || lengths.len() != exponents.len() {
            return Err(Error::Construction("need equal, nonempty length/exponent schedules".into()));
        }
        let total: f64 = lengths.iter().sum();
        if total > 1.0 + 1e-12 {
            return Err(Error::Construction(format!("block lengths sum to {total} > 1")));
        }
        if lengths.iter().any(|&l| l <= 0.0) {
            return Err(Error::Construction("block lengths must be positive".into()));
        }
        let mut boundaries = Vec::with_capacity(lengths.len() + 1);
        let mut acc = 0.0;
        boundaries.push(0.0);
        for &l in &lengths {
            acc += l;
            boundaries.push(acc);
        }
        let ladder = lengths.clone();
        Ok(BlockIntervalMap {
            lengths,
            boundaries,
            exponents,
            known_mdim: None,
            eps_ladder: ladder,
            exact: None,
        })
    }

    /// Preset with `|J_n| = 6/(pi^2 n^2)` and strictly increasing
    /// exponents `m_n = n`; ground truth mean dimension 1. The radius
    /// ladder is `eps_n = |J_n| / 3^{m_n}`.
    pub fn example33(block_count: usize) -> Result<Self> {
        if block_count == 0 {
            return Err(Error::Construction("need at least one block".into()));
        }
        let c = 6.0 / (std::f64::consts::PI * std::f64::consts::PI);
        let lengths: Vec<f64> = (1..=block_count).map(|n| c / (n * n) as f64).collect();
        let exponents: Vec<u32> = (1..=block_count as u32).collect();
        let mut map = Self::from_schedules(lengths, exponents)?;
        map.known_mdim = Some(1.0);
        map.eps_ladder = map
            .lengths
            .iter()
            .zip(&map.exponents)
            .map(|(l, m)| l / 3f64.powi(*m as i32))
            .collect();
        Ok(map)
    }

    /// Preset with `r = 1/a`, `C = 1/(3^r - 1)`, `|J_n| = C 3^{-rn}`,
    /// `m_n = n`; ground truth mean dimension `a`. The radius ladder is
    /// `eps_n = |J_n|`. Exact rational evaluation when `r` is an integer.
    pub fn phi_a(a: f64, block_count: usize) -> Result<Self> {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::invalid(format!(
                "phi_a parameter {a} outside (0, 1); endpoints are served by the constant map and the example33 preset"
            )));
        }
        if block_count == 0 {
            return Err(Error::Construction("need at least one block".into()));
        }
        let r = 1.0 / a;
        let c = 1.0 / (3f64.powf(r) - 1.0);
        let lengths: Vec<f64> = (1..=block_count).map(|n| c * 3f64.powf(-r * n as f64)).collect();
        let exponents: Vec<u32> = (1..=block_count as u32).collect();
        let mut map = Self::from_schedules(lengths, exponents)?;
        map.known_mdim = Some(a);
        map.eps_ladder = map.lengths.clone();

        // Integer r admits exact rational boundaries a_n = C * sum 3^{-ri}.
        let r_round = r.round();
        if (r - r_round).abs() < 1e-9 && (1.0..31.0).contains(&r_round) {
            let ri = r_round as u32;
            let base = rat_i64(1, 3i64.pow(ri));
            let c_exact = Rat::one() / (rat_int(3).pow(ri as i32) - Rat::one());
            let mut boundaries = vec![Rat::zero()];
            let mut acc = Rat::zero();
            let mut term = base.clone();
            for _ in 0..block_count {
                acc += &c_exact * &term;
                boundaries.push(acc.clone());
                term *= &base;
            }
            // Align the float boundaries to the exact ones.
            map.boundaries = boundaries.iter().map(rat_to_f64).collect();
            map.lengths = map.boundaries.windows(2).map(|w| w[1] - w[0]).collect();
            map.eps_ladder = map.lengths.clone();
            map.exact = Some(Arc::new(ExactBlockMap { boundaries, exponents: map.exponents.clone() }));
        }
        Ok(map)
    }

    pub fn block_count(&self) -> usize {
        self.exponents.len()
    }

    /// End of the materialized block region.
    pub fn block_region_end(&self) -> f64 {
        *self.boundaries.last().unwrap()
    }

    pub fn slope(&self, block: usize) -> f64 {
        3f64.powi(self.exponents[block] as i32)
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    #[cfg(test)]
    pub(crate) fn exact_map(&self) -> Option<&Arc<ExactBlockMap>> {
        self.exact.as_ref()
    }

    /// Evaluate the map; identity outside the materialized blocks.
    pub fn eval(&self, x: f64) -> f64 {
        let b = &self.boundaries;
        if x < b[0] || x > *b.last().unwrap() {
            return x;
        }
        let i = match b.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(idx) => idx.min(self.block_count().saturating_sub(1)),
            Err(ins) => ins.saturating_sub(1).min(self.block_count() - 1),
        };
        let lo = b[i];
        let len = self.lengths[i];
        if len <= 0.0 {
            return x;
        }
        let mut y = (x - lo) / len;
        for _ in 0..self.exponents[i] {
            y = tent_f64(y);
        }
        lo + y * len
    }

    /// Exact endpoints of the depth-`k` subinterval of block `n`
    /// (1-based) addressed by `path` (0-based branch indices). Each
    /// level splits into `3^{m_n}` equal pieces.
    pub fn level_interval(&self, n: usize, path: &[usize]) -> Result<(Rat, Rat)> {
        let exact = self
            .exact
            .as_ref()
            .ok_or_else(|| Error::UnsupportedParameter("level intervals need exact boundaries".into()))?;
        if n == 0 || n > self.block_count() {
            return Err(Error::invalid("block index out of range"));
        }
        let arity = 3i64.pow(self.exponents[n - 1]);
        let mut lo = exact.boundaries[n - 1].clone();
        let mut hi = exact.boundaries[n].clone();
        for &idx in path {
            if idx as i64 >= arity {
                return Err(Error::invalid("branch index out of range"));
            }
            let width = (&hi - &lo) / rat_int(arity);
            lo += &width * rat_int(idx as i64);
            hi = &lo + width;
        }
        Ok((lo, hi))
    }

    /// The autonomous system driven by this map. Exact rational
    /// evaluation when available, else floats with the precision
    /// budget `(max slope)^horizon * ulp < min block length / 10`.
    pub fn system(&self) -> SystemSequence {
        match &self.exact {
            Some(exact) => {
                let exact = exact.clone();
                SystemSequence::from_exact(SeqKind::Autonomous, Arc::new(move |_, x| exact.eval(x)))
            }
            None => {
                let m_max = *self.exponents.iter().max().unwrap() as f64;
                let budget = (0.8 * 52.0 * std::f64::consts::LN_2 / (m_max * 3f64.ln())).floor().max(1.0)
                    as usize;
                let map = self.clone();
                SystemSequence::from_float(
                    SeqKind::Autonomous,
                    budget,
                    1,
                    Arc::new(move |_, x| vec![map.eval(x[0])]),
                )
            }
        }
    }

    /// Orbit-resolving net over the block region: block `i` is gridded
    /// at step `delta / slope_i^{horizon-1}` so that depth-`horizon`
    /// branch structure is resolved, clamped by a per-block point cap.
    /// Blocks no longer than `radius` receive only the spatial step
    /// (no pair inside them can separate at that radius). The output
    /// is a `delta`-net of `[0, a_B]` in the base metric.
    pub fn refined_net(&self, delta: f64, horizon: usize, radius: f64, per_block_cap: usize) -> SampleSet {
        self.refined_net_spans(delta, horizon, radius, per_block_cap).0
    }

    /// As `refined_net`, also reporting the sample index range each
    /// block occupies (for block-restricted counting).
    pub fn refined_net_spans(
        &self,
        delta: f64,
        horizon: usize,
        radius: f64,
        per_block_cap: usize,
    ) -> (SampleSet, Vec<std::ops::Range<usize>>) {
        let mut points = Vec::new();
        let mut spans = Vec::with_capacity(self.block_count());
        for i in 0..self.block_count() {
            let start = points.len();
            let len = self.lengths[i];
            let mut step = if len > radius {
                delta / self.slope(i).powi(horizon.saturating_sub(1) as i32)
            } else {
                delta
            };
            step = step.max(len / per_block_cap as f64).min(delta);
            let n = (len / step).ceil().max(1.0) as usize;
            let lo = self.boundaries[i];
            for k in 0..n {
                points.push(vec![lo + len * k as f64 / n as f64]);
            }
            spans.push(start..points.len());
        }
        points.push(vec![self.block_region_end()]);
        (SampleSet { points, resolution: delta }, spans)
    }
}
