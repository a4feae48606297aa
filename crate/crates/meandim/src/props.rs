//! Relation checks: structural identities and inequalities between
//! dimension estimates, tested numerically on fixture pairs with
//! explicit tolerances.
//!
//! The underlying statements are exact limit theorems; the harness
//! downgrades them to toleranced comparisons of finite-scale estimates
//! on shared ladders, and each verdict records that semantics. A check
//! that would pass only with a tolerance above 0.25 dimension units is
//! reported inconclusive, never passed.

use crate::error::{Error, Result};
use crate::estimate::{
    box_dimension, estimate_fixture, estimate_fixture_filtered, estimate_on_points, EstimatePlan,
};
use crate::fixtures::Fixture;
use crate::system::SystemSequence;
use serde::Serialize;

/// Tolerance ceiling: beyond it a satisfied comparison is inconclusive.
pub const MAX_PASS_TOL: f64 = 0.25;
pub const DEFAULT_TOL: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    LessEq,
    Equal,
    MaxOf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SideValue {
    pub value: f64,
    pub infinite: bool,
}

impl SideValue {
    fn from_primary(primary: f64) -> Self {
        SideValue { value: if primary.is_finite() { primary } else { 0.0 }, infinite: primary.is_infinite() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationCheck {
    pub relation: String,
    pub comparison: Comparison,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub left: SideValue,
    pub right: SideValue,
    pub details: String,
}

fn verdict_from_excess(excess: f64, tol: f64) -> Verdict {
    if excess <= tol.min(MAX_PASS_TOL) {
        Verdict::Pass
    } else if excess <= tol {
        Verdict::Inconclusive
    } else {
        Verdict::Fail
    }
}

/// Comparison of two sides under the flag rules: agreement of two
/// divergence flags passes; a flagged side against a finite side fails
/// an equality and fails a `<=` only when the flag sits on the left.
fn conclude(
    relation: &str,
    comparison: Comparison,
    left: f64,
    right: f64,
    scale: f64,
    tol: f64,
    details: String,
) -> RelationCheck {
    let l = SideValue::from_primary(left);
    let r = SideValue::from_primary(right);
    let verdict = match comparison {
        Comparison::LessEq => {
            if r.infinite {
                Verdict::Pass
            } else if l.infinite {
                Verdict::Fail
            } else {
                verdict_from_excess(l.value - scale * r.value, tol)
            }
        }
        Comparison::Equal | Comparison::MaxOf => {
            if l.infinite && r.infinite {
                Verdict::Pass
            } else if l.infinite != r.infinite {
                Verdict::Fail
            } else {
                verdict_from_excess((l.value - r.value).abs(), tol)
            }
        }
    };
    RelationCheck {
        relation: relation.to_string(),
        comparison,
        tolerance: tol,
        verdict,
        left: l,
        right: r,
        details,
    }
}

fn inconclusive(relation: &str, comparison: Comparison, tol: f64, why: String) -> RelationCheck {
    RelationCheck {
        relation: relation.to_string(),
        comparison,
        tolerance: tol,
        verdict: Verdict::Inconclusive,
        left: SideValue { value: f64::NAN, infinite: false },
        right: SideValue { value: f64::NAN, infinite: false },
        details: why,
    }
}

/// Estimate, mapping precision-budget violations to `None` so the
/// caller can report the check inconclusive instead of erroring out.
fn primary_or_budget(fx: &Fixture, plan: &EstimatePlan) -> Result<Option<f64>> {
    match estimate_fixture(fx, plan) {
        Ok(out) => Ok(Some(out.report.primary())),
        Err(Error::PrecisionBudget { .. }) | Err(Error::InsufficientHorizons { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Power scaling: the blocked sequence's estimate is at most `p` times
/// the original's, within tolerance.
pub fn check_power_inequality(fx: &Fixture, p: usize, plan: &EstimatePlan, tol: f64) -> Result<RelationCheck> {
    let relation = format!("power_inequality[p={p}] on {}", fx.id);
    if p == 0 {
        return Err(Error::invalid("p must be >= 1"));
    }
    let right = match primary_or_budget(fx, plan)? {
        Some(v) => v,
        None => return Ok(inconclusive(&relation, Comparison::LessEq, tol, "budget exhausted on the base estimate".into())),
    };
    let mut blocked = fx.clone();
    blocked.id = format!("{}^({p})", fx.id);
    blocked.system = fx.system.compose_block(p)?;
    let mut blocked_plan = plan.clone();
    blocked_plan.depth_multiplier = plan.depth_multiplier.max(1) * p;
    let left = match primary_or_budget(&blocked, &blocked_plan)? {
        Some(v) => v,
        None => return Ok(inconclusive(&relation, Comparison::LessEq, tol, "budget exhausted on the blocked estimate".into())),
    };
    let details = format!("blocked estimate {left:.4} vs {p} * base estimate {right:.4} + tol");
    Ok(conclude(&relation, Comparison::LessEq, left, p as f64 * right, 1.0, tol, details))
}

/// Composition order: `f o g` and `g o f` estimate equally.
pub fn check_composition_commute(
    f: &Fixture,
    g: &Fixture,
    plan: &EstimatePlan,
    tol: f64,
) -> Result<RelationCheck> {
    let relation = format!("composition_commute[{}, {}]", f.id, g.id);
    if !f.invertible || !g.invertible {
        return Err(Error::Precondition("composition check needs homeomorphism fixtures".into()));
    }
    let mut fg = f.clone();
    fg.id = format!("{}o{}", f.id, g.id);
    fg.system = SystemSequence::compose_autonomous(&f.system, &g.system)?;
    let mut gf = f.clone();
    gf.id = format!("{}o{}", g.id, f.id);
    gf.system = SystemSequence::compose_autonomous(&g.system, &f.system)?;
    let (left, right) = match (primary_or_budget(&fg, plan)?, primary_or_budget(&gf, plan)?) {
        (Some(a), Some(b)) => (a, b),
        _ => return Ok(inconclusive(&relation, Comparison::Equal, tol, "budget exhausted".into())),
    };
    let details = format!("estimate(f o g) = {left:.4}, estimate(g o f) = {right:.4}");
    Ok(conclude(&relation, Comparison::Equal, left, right, 1.0, tol, details))
}

/// Restriction to a pair of invariant subsets: the whole-space
/// estimate matches the estimate assembled from the larger of the two
/// restricted rates at each rung. (Taking the max at the report level
/// instead would compare slopes of curves whose early rungs the
/// restriction zeroes, which steepens them; the rate-level max is the
/// comparison the restriction structure actually preserves.)
pub fn check_invariant_max(
    fx: &Fixture,
    region_a: (f64, f64),
    region_b: (f64, f64),
    plan: &EstimatePlan,
    tol: f64,
) -> Result<RelationCheck> {
    let relation = format!("invariant_max on {}", fx.id);
    verify_interval_invariance(fx, region_a)?;
    verify_interval_invariance(fx, region_b)?;
    let in_a = move |p: &[f64]| p[0] >= region_a.0 - 1e-12 && p[0] <= region_a.1 + 1e-12;
    let in_b = move |p: &[f64]| p[0] >= region_b.0 - 1e-12 && p[0] <= region_b.1 + 1e-12;
    let whole = match primary_or_budget(fx, plan)? {
        Some(v) => v,
        None => return Ok(inconclusive(&relation, Comparison::MaxOf, tol, "budget exhausted".into())),
    };
    let out_a = estimate_fixture_filtered(fx, plan, Some(&in_a))?;
    let out_b = estimate_fixture_filtered(fx, plan, Some(&in_b))?;
    // Per-rung maximum of the restricted rates, then the regression.
    let mut combined = out_a.curve.clone();
    for (pt, other) in combined.points.iter_mut().zip(&out_b.curve.points) {
        if other.rate > pt.rate {
            *pt = other.clone();
        }
    }
    let best = crate::estimate::mmd_estimate(&combined, Some(fx.ambient_box_dim))?.primary();
    let details = format!(
        "whole {whole:.4} vs rung-wise max of restrictions {best:.4} (sides {:.4}, {:.4}) on [{:.4},{:.4}] and [{:.4},{:.4}]",
        out_a.report.primary(),
        out_b.report.primary(),
        region_a.0,
        region_a.1,
        region_b.0,
        region_b.1
    );
    Ok(conclude(&relation, Comparison::MaxOf, whole, best, 1.0, tol, details))
}

fn verify_interval_invariance(fx: &Fixture, region: (f64, f64)) -> Result<()> {
    // Sampled invariance: images of probes stay inside up to slack.
    let slack = 1e-9 + (region.1 - region.0) * 1e-6;
    for t in 0..=200 {
        let x = region.0 + (region.1 - region.0) * t as f64 / 200.0;
        let y = fx.system.map_at(1, &[x])[0];
        if y < region.0 - slack || y > region.1 + slack {
            return Err(Error::Precondition(format!(
                "region [{}, {}] is not invariant: {x} maps to {y}",
                region.0, region.1
            )));
        }
    }
    Ok(())
}

/// Concentration on the declared non-wandering set: the whole-space
/// estimate matches the restricted one.
pub fn check_nonwandering(fx: &Fixture, plan: &EstimatePlan, tol: f64) -> Result<RelationCheck> {
    let relation = format!("nonwandering on {}", fx.id);
    let omega = fx
        .omega
        .as_ref()
        .ok_or_else(|| Error::Precondition(format!("{} declares no non-wandering sampler", fx.id)))?;
    let whole = match primary_or_budget(fx, plan)? {
        Some(v) => v,
        None => return Ok(inconclusive(&relation, Comparison::Equal, tol, "budget exhausted".into())),
    };
    let ladder = plan.ladder.clone().unwrap_or_else(|| fx.default_ladder.clone());
    let smallest = ladder.last().copied().unwrap_or(0.01);
    let points = omega(smallest / 4.0);
    let restricted = estimate_on_points(fx, plan, points)?.report.primary();
    let details = format!("whole {whole:.4} vs non-wandering restriction {restricted:.4}");
    Ok(conclude(&relation, Comparison::Equal, whole, restricted, 1.0, tol, details))
}

/// Independence of the starting index for invertible sequences:
/// estimates after dropping `i` and `j` leading maps agree.
pub fn check_shift_independence(
    fx: &Fixture,
    i: usize,
    j: usize,
    plan: &EstimatePlan,
    tol: f64,
) -> Result<RelationCheck> {
    let relation = format!("shift_independence[{i},{j}] on {}", fx.id);
    if !fx.invertible {
        return Err(Error::Precondition("shift independence needs invertible maps".into()));
    }
    let mut at_i = fx.clone();
    at_i.system = fx.system.shift(i);
    at_i.id = format!("{}<<{i}", fx.id);
    let mut at_j = fx.clone();
    at_j.system = fx.system.shift(j);
    at_j.id = format!("{}<<{j}", fx.id);
    let (left, right) = match (primary_or_budget(&at_i, plan)?, primary_or_budget(&at_j, plan)?) {
        (Some(a), Some(b)) => (a, b),
        _ => return Ok(inconclusive(&relation, Comparison::Equal, tol, "budget exhausted".into())),
    };
    let details = format!("shift {i} estimate {left:.4}, shift {j} estimate {right:.4}");
    Ok(conclude(&relation, Comparison::Equal, left, right, 1.0, tol, details))
}

/// Box-dimension ceiling: the mean-dimension estimate of an autonomous
/// system never exceeds the box dimension of its space.
pub fn check_box_bound(fx: &Fixture, plan: &EstimatePlan, tol: f64) -> Result<RelationCheck> {
    let relation = format!("box_bound on {}", fx.id);
    let left = match primary_or_budget(fx, plan)? {
        Some(v) => v,
        None => return Ok(inconclusive(&relation, Comparison::LessEq, tol, "budget exhausted".into())),
    };
    let ladder: Vec<f64> = (0..4).map(|i| fx.space.diameter.max(0.4) / 4.0 / 2f64.powi(i)).collect();
    let right = box_dimension(&fx.space, &ladder)?.slope;
    let details = format!("mean-dimension estimate {left:.4} vs box dimension {right:.4} + tol");
    Ok(conclude(&relation, Comparison::LessEq, left, right, 1.0, tol, details))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn quick_plan() -> EstimatePlan {
        EstimatePlan { horizons: (2..=5).collect(), per_block_cap: 20_000, ..Default::default() }
    }

    #[test]
    fn constant_power_inequality_passes() {
        let fx = fixtures::constant_fixture();
        let check = check_power_inequality(&fx, 3, &quick_plan(), DEFAULT_TOL).unwrap();
        assert_eq!(check.verdict, Verdict::Pass, "{}", check.details);
    }

    #[test]
    fn tent_power_inequality_passes_with_zero_sides() {
        let fx = fixtures::tent_fixture();
        let check = check_power_inequality(&fx, 2, &quick_plan(), DEFAULT_TOL).unwrap();
        assert_eq!(check.verdict, Verdict::Pass, "{}", check.details);
    }

    #[test]
    fn identity_composition_commutes() {
        let id = fixtures::identity_fixture();
        let check = check_composition_commute(&id, &id, &quick_plan(), DEFAULT_TOL).unwrap();
        assert_eq!(check.verdict, Verdict::Pass);
    }

    #[test]
    fn rotations_commute() {
        let f = fixtures::rotation_fixture(1, 3).unwrap();
        let g = fixtures::rotation_fixture(1, 5).unwrap();
        let check = check_composition_commute(&f, &g, &quick_plan(), DEFAULT_TOL).unwrap();
        assert_eq!(check.verdict, Verdict::Pass, "{}", check.details);
    }

    #[test]
    fn composition_requires_homeomorphisms() {
        let tent = fixtures::tent_fixture();
        let id = fixtures::identity_fixture();
        assert!(matches!(
            check_composition_commute(&tent, &id, &quick_plan(), DEFAULT_TOL),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn nonwandering_north_south_passes() {
        let fx = fixtures::north_south_fixture();
        let check = check_nonwandering(&fx, &quick_plan(), DEFAULT_TOL).unwrap();
        assert_eq!(check.verdict, Verdict::Pass, "{}", check.details);
    }

    #[test]
    fn nonwandering_needs_a_declaration() {
        let fx = fixtures::tent_fixture();
        assert!(matches!(check_nonwandering(&fx, &quick_plan(), DEFAULT_TOL), Err(Error::Precondition(_))));
    }

    #[test]
    fn shift_independence_on_rotations() {
        let fx = fixtures::rotation_sequence_fixture();
        let check = check_shift_independence(&fx, 0, 2, &quick_plan(), DEFAULT_TOL).unwrap();
        assert_eq!(check.verdict, Verdict::Pass, "{}", check.details);
    }

    #[test]
    fn shift_independence_rejects_non_invertible() {
        let fx = fixtures::tent_fixture();
        assert!(check_shift_independence(&fx, 0, 1, &quick_plan(), DEFAULT_TOL).is_err());
    }

    #[test]
    fn invariant_max_on_block_fixtures() {
        // Whole-space estimate against the max over an invariant split:
        // shallow blocks on one side, the deep tail on the other.
        let plan = EstimatePlan {
            horizons: (2..=5).collect(),
            method: crate::estimate::RateMethod::MaxIncrement,
            per_block_cap: 100_000,
            ..Default::default()
        };
        let fx = fixtures::example33_fixture(4).unwrap();
        let bm = fx.block_map.as_ref().unwrap();
        let split = bm.boundaries[2]; // J_1 + J_2 vs the rest
        let check =
            check_invariant_max(&fx, (0.0, split), (split, 1.0), &plan, DEFAULT_TOL).unwrap();
        assert_eq!(check.verdict, Verdict::Pass, "{}", check.details);
    }

    #[test]
    fn invariant_max_single_block_restriction_is_dominated() {
        // Restricting to the first block alone gives a smaller
        // estimate; the max against the complement closure still
        // matches the whole.
        let plan = EstimatePlan {
            horizons: (2..=5).collect(),
            method: crate::estimate::RateMethod::MaxIncrement,
            per_block_cap: 100_000,
            ..Default::default()
        };
        let fx = fixtures::phi_a_fixture(0.5, 4).unwrap();
        let bm = fx.block_map.as_ref().unwrap();
        let split = bm.boundaries[1]; // J_1 vs the rest
        let whole = crate::estimate::estimate_fixture(&fx, &plan).unwrap().report.primary();
        let in_a = move |p: &[f64]| p[0] <= split + 1e-12;
        let restricted = crate::estimate::estimate_fixture_filtered(&fx, &plan, Some(&in_a))
            .unwrap()
            .report
            .primary();
        assert!(restricted < whole, "restricted {restricted} vs whole {whole}");
        let check = check_invariant_max(&fx, (0.0, split), (split, 1.0), &plan, DEFAULT_TOL).unwrap();
        assert_eq!(check.verdict, Verdict::Pass, "{}", check.details);
    }

    #[test]
    fn invariant_max_rejects_non_invariant_regions() {
        let fx = fixtures::phi_a_fixture(0.5, 4).unwrap();
        let bm = fx.block_map.as_ref().unwrap();
        // A region cutting through the middle of a block is not invariant.
        let mid = (bm.boundaries[0] + bm.boundaries[1]) / 2.0;
        let plan = EstimatePlan::default();
        assert!(matches!(
            check_invariant_max(&fx, (0.0, mid), (mid, 1.0), &plan, DEFAULT_TOL),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn trivial_invariant_split_is_equal() {
        // A = B = X compares the whole against itself.
        let plan = EstimatePlan {
            horizons: (2..=5).collect(),
            per_block_cap: 50_000,
            ..Default::default()
        };
        let fx = fixtures::phi_a_fixture(0.5, 3).unwrap();
        let check = check_invariant_max(&fx, (0.0, 1.0), (0.0, 1.0), &plan, DEFAULT_TOL).unwrap();
        assert_eq!(check.verdict, Verdict::Pass);
        assert!((check.left.value - check.right.value).abs() < 1e-12);
    }

    #[test]
    fn box_bound_constant_passes() {
        let fx = fixtures::constant_fixture();
        let check = check_box_bound(&fx, &quick_plan(), DEFAULT_TOL).unwrap();
        assert_eq!(check.verdict, Verdict::Pass, "{}", check.details);
    }

    #[test]
    fn equal_with_one_flag_fails_and_lesseq_with_right_flag_passes() {
        let c = conclude("t", Comparison::Equal, f64::INFINITY, 0.3, 1.0, 0.1, String::new());
        assert_eq!(c.verdict, Verdict::Fail);
        let c = conclude("t", Comparison::Equal, f64::INFINITY, f64::INFINITY, 1.0, 0.1, String::new());
        assert_eq!(c.verdict, Verdict::Pass);
        let c = conclude("t", Comparison::LessEq, 0.7, f64::INFINITY, 1.0, 0.1, String::new());
        assert_eq!(c.verdict, Verdict::Pass);
        let c = conclude("t", Comparison::LessEq, f64::INFINITY, 0.7, 1.0, 0.1, String::new());
        assert_eq!(c.verdict, Verdict::Fail);
    }

    #[test]
    fn tolerance_ceiling_reports_inconclusive() {
        // A 0.3 excess under tol 0.4 is only passable beyond the 0.25
        // ceiling: inconclusive, never pass.
        let c = conclude("t", Comparison::Equal, 0.5, 0.2, 1.0, 0.4, String::new());
        assert_eq!(c.verdict, Verdict::Inconclusive);
        let c = conclude("t", Comparison::Equal, 0.5, 0.2, 1.0, 0.1, String::new());
        assert_eq!(c.verdict, Verdict::Fail);
        let c = conclude("t", Comparison::Equal, 0.25, 0.2, 1.0, 0.1, String::new());
        assert_eq!(c.verdict, Verdict::Pass);
    }

    #[test]
    fn checks_are_reproducible() {
        let fx = fixtures::north_south_fixture();
        let a = check_nonwandering(&fx, &quick_plan(), DEFAULT_TOL).unwrap();
        let b = check_nonwandering(&fx, &quick_plan(), DEFAULT_TOL).unwrap();
        assert_eq!(a.verdict, b.verdict);
        assert_eq!(a.left.value.to_bits(), b.left.value.to_bits());
    }
}
