//! Product shift spaces over a base metric space, with the weighted
//! metric truncated to a finite coordinate window, and the shift
//! systems living on them.

use crate::error::{Error, Result};
use crate::space::{MetricSpace, Point, SampleSet};
use crate::system::{SeqKind, SystemSequence};
use std::sync::Arc;

/// Window rule from the truncation requirement: with `l = ceil(log2(4/eps))`
/// the discarded tail weighs at most `eps/4` per unit diameter.
pub fn window_rule(eps: f64) -> usize {
    (4.0 / eps).log2().ceil().max(1.0) as usize
}

#[derive(Clone, Debug)]
pub struct ProductShiftSpace {
    pub base: MetricSpace,
    pub two_sided: bool,
    /// Window half-width `l`: coordinates `|i| <= l` enter the metric.
    pub window: usize,
    /// Ground-truth mean dimension when the base box dimension is known.
    pub known_mdim: Option<f64>,
}

impl ProductShiftSpace {
    pub fn new(base: MetricSpace, two_sided: bool, window: usize) -> Result<Self> {
        if window == 0 {
            return Err(Error::invalid("window half-width must be >= 1"));
        }
        Ok(ProductShiftSpace { base, two_sided, window, known_mdim: None })
    }

    /// Truncation error of the windowed metric: the discarded
    /// coordinates weigh at most `sum_{|i| > l} 2^{-|i|} * diam`.
    pub fn truncation_error(&self) -> f64 {
        let tail = 2f64.powi(-(self.window as i32));
        let sides = if self.two_sided { 2.0 } else { 1.0 };
        sides * tail * self.base.diameter
    }

    /// Whether the window is adequate for radius `eps` (error < eps/2).
    pub fn window_adequate(&self, eps: f64) -> bool {
        self.truncation_error() < eps / 2.0
    }

    pub fn space(&self) -> MetricSpace {
        MetricSpace::shift_window(self.window, self.two_sided)
    }

    /// The shift system on windowed points: drop the leading
    /// coordinate, pad with the base point 0. The budget is the window
    /// length; past it every coordinate is padding.
    pub fn shift_system(&self) -> SystemSequence {
        let dim = self.space().point_dim();
        SystemSequence::from_float(
            SeqKind::Autonomous,
            self.window + 1,
            dim,
            Arc::new(|_, x| {
                let mut y: Point = x[1..].to_vec();
                y.push(0.0);
                y
            }),
        )
    }

    /// Product lattice sample: a per-coordinate grid of step
    /// `resolution` over the first `depth` coordinates, padding beyond.
    pub fn lattice(&self, resolution: f64, depth: usize) -> Result<SampleSet> {
        let dim = self.space().point_dim();
        let depth = depth.min(dim);
        let axis = self.base.sample(resolution)?;
        let mut pts: Vec<Point> = vec![vec![0.0; dim]];
        for c in 0..depth {
            let mut next = Vec::with_capacity(pts.len() * axis.len());
            for p in &pts {
                for v in &axis.points {
                    let mut q = p.clone();
                    q[c] = v[0];
                    next.push(q);
                }
            }
            pts = next;
            if pts.len() > 4_000_000 {
                return Err(Error::invalid("product lattice exceeds the sample budget"));
            }
        }
        Ok(SampleSet { points: pts, resolution })
    }
}

/// The non-autonomous sequence `f_n = sigma^{2^n}` on binary sequences,
/// acting on 0/1 coordinate windows. Compositions satisfy
/// `f_1^{(n)} = sigma^{2^{n+1} - 2}`.
pub fn binary_power_shift_system(window: usize) -> SystemSequence {
    SystemSequence::from_float(
        SeqKind::Explicit,
        window.max(1),
        window,
        Arc::new(|n, x| {
            let jump = 1usize << n.min(30);
            let mut y: Point = vec![0.0; x.len()];
            let kept = x.len().saturating_sub(jump);
            y[..kept].copy_from_slice(&x[jump..jump + kept]);
            y
        }),
    )
}
