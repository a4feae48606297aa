//! Indexed families `n -> f_n` of self-maps with lazy composition.
//!
//! The composition convention is `f_1^(0) = id` and
//! `f_1^(k) = f_k o ... o f_1`; orbits list `x, f_1(x), f_1^(2)(x), ...`.
//! Autonomous, periodic, shifted, power-blocked, damped, and truncated
//! families all share this one representation.
//!
//! Each sequence carries two evaluation channels: a float step that is
//! always present, and an optional exact rational step. When the exact
//! channel exists, orbit segments are computed in exact arithmetic and
//! rounded once per value, so the horizon budget reflects arithmetic
//! cost instead of mantissa loss.

use crate::error::{Error, Result};
use crate::rational::{rat_from_f64, rat_to_f64, Rat};
use crate::space::Point;
use num_traits::One;
use serde::Serialize;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum SeqKind {
    Autonomous,
    Periodic { period: usize },
    Shifted { by: usize },
    PowerBlock { p: usize },
    Damped,
    Truncated,
    Explicit,
}

pub type FloatStep = Arc<dyn Fn(usize, &[f64]) -> Point + Send + Sync>;
pub type ExactStep = Arc<dyn Fn(usize, &Rat) -> Rat + Send + Sync>;

/// Horizon budget used for exact-rational and isometric systems where
/// evaluation does not lose precision with depth.
pub const DEEP_BUDGET: usize = 4096;

#[derive(Clone)]
pub struct SystemSequence {
    pub kind: SeqKind,
    /// Maximum composition depth for which evaluation is certified.
    pub horizon_budget: usize,
    pub dim: usize,
    float_step: FloatStep,
    exact_step: Option<ExactStep>,
}

impl std::fmt::Debug for SystemSequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SystemSequence")
            .field("kind", &self.kind)
            .field("horizon_budget", &self.horizon_budget)
            .field("dim", &self.dim)
            .field("exact", &self.exact_step.is_some())
            .finish()
    }
}

impl SystemSequence {
    pub fn from_float(kind: SeqKind, budget: usize, dim: usize, step: FloatStep) -> Self {
        SystemSequence { kind, horizon_budget: budget, dim, float_step: step, exact_step: None }
    }

    /// One-dimensional sequence with an exact rational step. The float
    /// channel evaluates through the exact one.
    pub fn from_exact(kind: SeqKind, step: ExactStep) -> Self {
        let s = step.clone();
        let float_step: FloatStep =
            Arc::new(move |n, x| vec![rat_to_f64(&s(n, &rat_from_f64(x[0])))]);
        SystemSequence {
            kind,
            horizon_budget: DEEP_BUDGET,
            dim: 1,
            float_step,
            exact_step: Some(step),
        }
    }

    pub fn autonomous_float(dim: usize, budget: usize, f: impl Fn(&[f64]) -> Point + Send + Sync + 'static) -> Self {
        Self::from_float(SeqKind::Autonomous, budget, dim, Arc::new(move |_, x| f(x)))
    }

    pub fn identity() -> Self {
        Self::from_float(SeqKind::Autonomous, DEEP_BUDGET, 1, Arc::new(|_, x| x.to_vec()))
    }

    pub fn constant(value: f64) -> Self {
        Self::from_float(SeqKind::Autonomous, DEEP_BUDGET, 1, Arc::new(move |_, _| vec![value]))
    }

    pub fn is_exact(&self) -> bool {
        self.exact_step.is_some()
    }

    /// The n-th map of the family (1-based).
    pub fn map_at(&self, n: usize, x: &[f64]) -> Point {
        (self.float_step)(n, x)
    }

    /// `f_start^{(len-1)}` orbit segment: `[x, f_start(x), ...]`,
    /// `len` entries. Uses the exact channel when available.
    pub fn orbit_from(&self, start: usize, x: &[f64], len: usize) -> Vec<Point> {
        let mut out = Vec::with_capacity(len);
        out.push(x.to_vec());
        if len <= 1 {
            return out;
        }
        if let (Some(exact), 1) = (&self.exact_step, self.dim) {
            let mut cur = rat_from_f64(x[0]);
            for j in 0..len - 1 {
                cur = exact(start + j, &cur);
                out.push(vec![rat_to_f64(&cur)]);
            }
        } else {
            let mut cur = x.to_vec();
            for j in 0..len - 1 {
                cur = (self.float_step)(start + j, &cur);
                out.push(cur.clone());
            }
        }
        out
    }

    /// Orbit under `f_1^{(j)}`, `j = 0..len-1`.
    pub fn orbit(&self, x: &[f64], len: usize) -> Vec<Point> {
        self.orbit_from(1, x, len)
    }

    /// Checked orbit: errors when the requested depth exceeds the
    /// certified budget.
    pub fn orbit_checked(&self, x: &[f64], len: usize) -> Result<Vec<Point>> {
        if len > self.horizon_budget + 1 {
            return Err(Error::PrecisionBudget { horizon: len - 1, budget: self.horizon_budget });
        }
        Ok(self.orbit(x, len))
    }

    /// The blocked sequence whose n-th map composes `p` consecutive
    /// original maps: `n -> f_{(n-1)p+1}^{(p)}`. The horizon budget
    /// divides by `p` because composition depth multiplies.
    pub fn compose_block(&self, p: usize) -> Result<SystemSequence> {
        if p == 0 {
            return Err(Error::invalid("block size p must be >= 1"));
        }
        if p == 1 {
            return Ok(self.clone());
        }
        let inner_f = self.float_step.clone();
        let float_step: FloatStep = Arc::new(move |n, x| {
            let base = (n - 1) * p + 1;
            let mut cur = x.to_vec();
            for j in 0..p {
                cur = inner_f(base + j, &cur);
            }
            cur
        });
        let exact_step: Option<ExactStep> = self.exact_step.as_ref().map(|inner| {
            let inner = inner.clone();
            let step: ExactStep = Arc::new(move |n, x| {
                let base = (n - 1) * p + 1;
                let mut cur = x.clone();
                for j in 0..p {
                    cur = inner(base + j, &cur);
                }
                cur
            });
            step
        });
        Ok(SystemSequence {
            kind: SeqKind::PowerBlock { p },
            horizon_budget: (self.horizon_budget / p).max(1),
            dim: self.dim,
            float_step,
            exact_step,
        })
    }

    /// The left-shifted sequence `n -> f_{n+k}`.
    pub fn shift(&self, k: usize) -> SystemSequence {
        if k == 0 {
            return self.clone();
        }
        let inner_f = self.float_step.clone();
        let float_step: FloatStep = Arc::new(move |n, x| inner_f(n + k, x));
        let exact_step = self.exact_step.as_ref().map(|inner| {
            let inner = inner.clone();
            let step: ExactStep = Arc::new(move |n, x| inner(n + k, x));
            step
        });
        SystemSequence {
            kind: SeqKind::Shifted { by: k },
            horizon_budget: self.horizon_budget,
            dim: self.dim,
            float_step,
            exact_step,
        }
    }

    /// Pointwise damping `n -> lambda_n * f_n` for a rational schedule
    /// `lambda_n = num(n)/den(n)` with values in [0, 1].
    pub fn damp(&self, lambda: Arc<dyn Fn(usize) -> (i64, i64) + Send + Sync>) -> Result<SystemSequence> {
        if self.dim != 1 {
            return Err(Error::invalid("damping is defined for interval systems"));
        }
        // Schedule must stay in [0, 1] on the materialized prefix and
        // approach 1 while its partial products approach 0.
        let mut product = 1.0f64;
        for n in 1..=64 {
            let (p, q) = lambda(n);
            if q <= 0 || p < 0 || p > q {
                return Err(Error::invalid(format!("damping schedule leaves [0,1] at n={n}")));
            }
            product *= p as f64 / q as f64;
        }
        let (p_tail, q_tail) = lambda(64);
        if (p_tail as f64 / q_tail as f64) < 0.9 {
            return Err(Error::invalid("damping schedule does not approach 1"));
        }
        if product > 0.5 {
            return Err(Error::invalid("damping partial products do not approach 0"));
        }
        let lam_f = lambda.clone();
        let inner_f = self.float_step.clone();
        let float_step: FloatStep = Arc::new(move |n, x| {
            let (p, q) = lam_f(n);
            let y = inner_f(n, x);
            vec![y[0] * p as f64 / q as f64]
        });
        let exact_step = self.exact_step.as_ref().map(|inner| {
            let inner = inner.clone();
            let lam = lambda.clone();
            let step: ExactStep = Arc::new(move |n, x| {
                let (p, q) = lam(n);
                crate::rational::rat_i64(p, q) * inner(n, x)
            });
            step
        });
        Ok(SystemSequence {
            kind: SeqKind::Damped,
            horizon_budget: self.horizon_budget,
            dim: 1,
            float_step,
            exact_step,
        })
    }

    /// Truncated family for a single map: `f_n(x) = phi(x)` on
    /// `[0, a_{n+1}]` and the constant `a_{n+1}` above it.
    pub fn truncate(phi: &SystemSequence, cutoffs: Arc<dyn Fn(usize) -> f64 + Send + Sync>) -> Result<SystemSequence> {
        if phi.dim != 1 {
            return Err(Error::invalid("truncation is defined for interval systems"));
        }
        let mut prev = 0.0;
        for n in 1..=32 {
            let a = cutoffs(n + 1);
            if !(0.0..=1.0).contains(&a) || a < prev {
                return Err(Error::invalid("cutoff schedule must be increasing in [0,1]"));
            }
            prev = a;
        }
        let inner_f = phi.float_step.clone();
        let cut_f = cutoffs.clone();
        let float_step: FloatStep = Arc::new(move |n, x| {
            let a = cut_f(n + 1);
            if x[0] <= a {
                inner_f(n, x)
            } else {
                vec![a]
            }
        });
        let exact_step = phi.exact_step.as_ref().map(|inner| {
            let inner = inner.clone();
            let cut = cutoffs.clone();
            let step: ExactStep = Arc::new(move |n, x| {
                let a = rat_from_f64(cut(n + 1));
                if *x <= a {
                    inner(n, x)
                } else {
                    a
                }
            });
            step
        });
        Ok(SystemSequence {
            kind: SeqKind::Truncated,
            horizon_budget: phi.horizon_budget,
            dim: 1,
            float_step,
            exact_step,
        })
    }

    /// The autonomous system driven by `outer o inner` (both must be
    /// autonomous; the exact channel survives when both sides have one).
    pub fn compose_autonomous(outer: &SystemSequence, inner: &SystemSequence) -> Result<SystemSequence> {
        if outer.dim != inner.dim {
            return Err(Error::invalid("composed systems must share a dimension"));
        }
        let of = outer.float_step.clone();
        let inf = inner.float_step.clone();
        let float_step: FloatStep = Arc::new(move |_, x| of(1, &inf(1, x)));
        let exact_step = match (&outer.exact_step, &inner.exact_step) {
            (Some(oe), Some(ie)) => {
                let oe = oe.clone();
                let ie = ie.clone();
                let step: ExactStep = Arc::new(move |_, x| oe(1, &ie(1, x)));
                Some(step)
            }
            _ => None,
        };
        Ok(SystemSequence {
            kind: SeqKind::Autonomous,
            horizon_budget: (outer.horizon_budget.min(inner.horizon_budget) / 2).max(1),
            dim: outer.dim,
            float_step,
            exact_step,
        })
    }

    /// Circle rotation sequence with rational angles `alpha(n)`.
    pub fn rotation_sequence(angles: Arc<dyn Fn(usize) -> (i64, i64) + Send + Sync>) -> SystemSequence {
        let ang = angles.clone();
        let float_step: FloatStep = Arc::new(move |n, x| {
            let (p, q) = ang(n);
            vec![(x[0] + p as f64 / q as f64).rem_euclid(1.0)]
        });
        let exact_step: ExactStep = Arc::new(move |n, x| {
            let (p, q) = angles(n);
            let y = x + crate::rational::rat_i64(p, q);
            // reduce mod 1
            let one = Rat::one();
            let mut y = y;
            while y >= one {
                y -= one.clone();
            }
            y
        });
        SystemSequence {
            kind: SeqKind::Explicit,
            horizon_budget: DEEP_BUDGET,
            dim: 1,
            float_step,
            exact_step: Some(exact_step),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn affine_family() -> SystemSequence {
        // f_n(x) = x/2 + 1/(n+2): distinct per index, stays in [0,1].
        SystemSequence::from_float(
            SeqKind::Explicit,
            64,
            1,
            Arc::new(|n, x| vec![x[0] / 2.0 + 1.0 / (n as f64 + 2.0)]),
        )
    }

    #[test]
    fn composition_law_matches_step_by_step() {
        let f = affine_family();
        let x = [0.3];
        for k in 0..=8usize {
            let orbit = f.orbit(&x, k + 1);
            let mut cur = x.to_vec();
            for n in 1..=k {
                cur = f.map_at(n, &cur);
            }
            assert!((orbit[k][0] - cur[0]).abs() < 1e-15, "k={k}");
        }
    }

    #[test]
    fn zero_step_orbit_is_identity() {
        let f = affine_family();
        assert_eq!(f.orbit(&[0.7], 1), vec![vec![0.7]]);
    }

    #[test]
    fn compose_block_pairs_maps() {
        // p = 2 sends (f_1, f_2, f_3, f_4, ...) to (f_2 o f_1, f_4 o f_3, ...).
        let f = affine_family();
        let g = f.compose_block(2).unwrap();
        let x = [0.25];
        let direct = f.map_at(2, &f.map_at(1, &x));
        assert_eq!(g.map_at(1, &x), direct);
        let second = f.map_at(4, &f.map_at(3, &x));
        assert_eq!(g.map_at(2, &x), second);
        assert_eq!(g.kind, SeqKind::PowerBlock { p: 2 });
    }

    #[test]
    fn compose_block_p1_is_identity_of_construction() {
        let f = affine_family();
        let g = f.compose_block(1).unwrap();
        for n in 1..6 {
            assert_eq!(g.map_at(n, &[0.4]), f.map_at(n, &[0.4]));
        }
    }

    #[test]
    fn compose_block_of_autonomous_is_iterate() {
        let phi = SystemSequence::autonomous_float(1, 64, |x| vec![1.0 - (3.0 * x[0] - 1.0).abs().min(1.0)]);
        let g = phi.compose_block(2).unwrap();
        let x = [0.2];
        let direct = phi.map_at(1, &phi.map_at(1, &x));
        assert_eq!(g.map_at(5, &x), direct);
    }

    #[test]
    fn blocked_orbit_subsamples_the_direct_orbit() {
        let f = affine_family();
        let g = f.compose_block(3).unwrap();
        let x = [0.6];
        let direct = f.orbit(&x, 10);
        let blocked = g.orbit(&x, 4);
        for j in 0..4 {
            assert!((blocked[j][0] - direct[3 * j][0]).abs() < 1e-12);
        }
    }

    #[test]
    fn shift_reindexes() {
        let f = affine_family();
        let g = f.shift(2);
        assert_eq!(g.map_at(1, &[0.9]), f.map_at(3, &[0.9]));
        assert_eq!(g.kind, SeqKind::Shifted { by: 2 });
        let h = f.shift(0);
        assert_eq!(h.map_at(1, &[0.9]), f.map_at(1, &[0.9]));
    }

    #[test]
    fn budget_violation_names_the_horizon() {
        let f = SystemSequence::from_float(SeqKind::Autonomous, 4, 1, Arc::new(|_, x| x.to_vec()));
        let err = f.orbit_checked(&[0.0], 6).unwrap_err();
        match err {
            Error::PrecisionBudget { horizon, budget } => {
                assert_eq!(horizon, 5);
                assert_eq!(budget, 4);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn damping_validates_schedule() {
        let id = SystemSequence::identity();
        // n/(n+1) is a valid schedule.
        let ok = id.damp(Arc::new(|n| (n as i64, n as i64 + 1)));
        assert!(ok.is_ok());
        // A schedule bounded away from 1 is rejected.
        let bad = id.damp(Arc::new(|_| (1, 2)));
        assert!(bad.is_err());
    }

    #[test]
    fn damped_identity_orbit_decays() {
        let id = SystemSequence::identity();
        let damped = id.damp(Arc::new(|n| (n as i64, n as i64 + 1))).unwrap();
        let orbit = damped.orbit(&[1.0], 30);
        // Partial products 1/(k+1) drive every orbit to 0.
        assert!(orbit[29][0] < 0.05);
        assert!(orbit.windows(2).all(|w| w[1][0] <= w[0][0] + 1e-15));
    }

    #[test]
    fn rotation_sequence_is_exact_and_invertible_in_spirit() {
        let rot = SystemSequence::rotation_sequence(Arc::new(|_| (1, 3)));
        let orbit = rot.orbit(&[0.0], 4);
        assert!((orbit[3][0] - 0.0).abs() < 1e-15); // three thirds wrap to 0
    }
}
