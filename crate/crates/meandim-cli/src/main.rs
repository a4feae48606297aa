//! Command-line front end: fixture selection, estimation runs, oracle
//! queries, relation checks, and parameter sweeps with structured
//! JSON/CSV output.
//!
//! Exit codes: 0 success or check pass, 1 check fail, 2 unknown
//! fixture or argument error, 3 resolution/precision-budget violation,
//! 4 inconclusive check.

mod manifest;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use meandim::estimate::{box_dimension, estimate_fixture, EstimatePlan, RateMethod};
use meandim::fixtures::{self, Fixture};
use meandim::props::{self, Verdict};
use meandim::{oracle, Error};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "meandim", version, about = "Dimension estimation for discrete-time dynamical systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Clone)]
struct RunFlags {
    /// Radius ladder: "2^-3..2^-7", "1e-2..1e-5", or comma-separated values.
    #[arg(long)]
    ladder: Option<String>,
    /// Horizon range "2..5" or comma-separated values.
    #[arg(long)]
    horizons: Option<String>,
    /// Sample resolution as a fraction of the radius.
    #[arg(long, default_value_t = 0.25)]
    grid: f64,
    /// Per-block point cap for orbit-refined nets.
    #[arg(long, default_value_t = 250_000)]
    cap: usize,
    /// Materialized block count for the block-map families.
    #[arg(long)]
    blocks: Option<usize>,
    /// Rate extraction window.
    #[arg(long, default_value_t = 4)]
    window: usize,
    /// Rate method override (tail-slope or max-increment).
    #[arg(long)]
    method: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory; stdout when absent.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the mean dimension of a fixture.
    Estimate {
        fixture: String,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Query the exact closed-form count bounds.
    Oracle {
        fixture: String,
        /// One of: cov, sep, fix, ball_cover.
        query: String,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        eps: Option<f64>,
        /// Window exponent for shift counts.
        #[arg(long, default_value_t = 0)]
        l: u32,
        /// two-sided shift counts instead of one-sided.
        #[arg(long)]
        two_sided: bool,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Run a relation check between estimates.
    Check {
        /// power_inequality | composition_commute | invariant_max |
        /// nonwandering | shift_independence | box_bound
        relation: String,
        fixtures: Vec<String>,
        #[arg(long, default_value_t = 2)]
        p: usize,
        #[arg(long, default_value_t = 0)]
        i: usize,
        #[arg(long, default_value_t = 1)]
        j: usize,
        #[arg(long, default_value_t = 0.1)]
        tol: f64,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Map a parameter grid to estimates; emits plot-ready CSV.
    Sweep {
        fixture: String,
        /// Parameter the sweep varies: "a" or "ladder_depth".
        #[arg(long)]
        param: String,
        /// Comma-separated parameter values (may be empty).
        #[arg(long, default_value = "")]
        values: String,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// List the fixture catalogue.
    Fixtures,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Resolution { .. } | Error::PrecisionBudget { .. } => 3,
        _ => 2,
    }
}

fn parse_ladder(spec: &str) -> Result<Vec<f64>, Error> {
    let bad = || Error::invalid(format!("cannot parse ladder {spec}"));
    if let Some((lo, hi)) = spec.split_once("..") {
        // Power ranges like 2^-3..2^-7 or 1e-2..1e-5.
        let parse_pow = |s: &str| -> Option<(f64, i32)> {
            if let Some((base, exp)) = s.split_once('^') {
                Some((base.parse().ok()?, exp.parse().ok()?))
            } else if let Some((mant, exp)) = s.to_lowercase().split_once('e').map(|(a, b)| (a.to_string(), b.to_string())) {
                let m: f64 = if mant.is_empty() { 1.0 } else { mant.parse().ok()? };
                if (m - 1.0).abs() > 1e-12 {
                    return None;
                }
                Some((10.0, exp.parse().ok()?))
            } else {
                None
            }
        };
        let (base_a, exp_a) = parse_pow(lo.trim()).ok_or_else(bad)?;
        let (base_b, exp_b) = parse_pow(hi.trim()).ok_or_else(bad)?;
        if (base_a - base_b).abs() > 1e-12 {
            return Err(bad());
        }
        let (hi_e, lo_e) = (exp_a.max(exp_b), exp_a.min(exp_b));
        let mut out: Vec<f64> = (lo_e..=hi_e).rev().map(|e| base_a.powi(e)).collect();
        out.sort_by(|a, b| b.partial_cmp(a).unwrap());
        return Ok(out);
    }
    let vals: Result<Vec<f64>, _> = spec.split(',').map(|s| s.trim().parse::<f64>()).collect();
    let mut vals = vals.map_err(|_| bad())?;
    vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
    if vals.is_empty() {
        return Err(bad());
    }
    Ok(vals)
}

fn parse_horizons(spec: &str) -> Result<Vec<usize>, Error> {
    let bad = || Error::invalid(format!("cannot parse horizons {spec}"));
    if let Some((lo, hi)) = spec.split_once("..") {
        let a: usize = lo.trim().parse().map_err(|_| bad())?;
        let b: usize = hi.trim().parse().map_err(|_| bad())?;
        if a == 0 || b < a {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    let vals: Result<Vec<usize>, _> = spec.split(',').map(|s| s.trim().parse()).collect();
    vals.map_err(|_| bad())
}

fn load_fixture(name: &str, blocks: Option<usize>) -> Result<Fixture, Error> {
    if let (Some(b), Some(rest)) = (blocks, name.strip_prefix("phi_a:")) {
        let a: f64 = rest.parse().map_err(|_| Error::UnknownFixture(name.into()))?;
        return fixtures::phi_a_fixture(a, b);
    }
    if let (Some(b), "example33") = (blocks, name) {
        return fixtures::example33_fixture(b);
    }
    fixtures::by_name(name)
}

fn plan_for(fx: &Fixture, flags: &RunFlags) -> Result<EstimatePlan, Error> {
    let mut plan = EstimatePlan::for_fixture(fx);
    if let Some(l) = &flags.ladder {
        plan.ladder = Some(parse_ladder(l)?);
    }
    if let Some(h) = &flags.horizons {
        plan.horizons = parse_horizons(h)?;
    }
    plan.delta_factor = flags.grid;
    plan.per_block_cap = flags.cap;
    plan.window = flags.window;
    plan.seed = flags.seed;
    if let Some(m) = &flags.method {
        plan.method = match m.as_str() {
            "tail_slope" => RateMethod::TailSlope,
            "max_increment" => RateMethod::MaxIncrement,
            other => return Err(Error::invalid(format!("unknown rate method {other}"))),
        };
    }
    Ok(plan)
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Fixtures => {
            for name in fixtures::catalogue_names() {
                println!("{name}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Estimate { fixture, flags } => {
            let started = std::time::Instant::now();
            let fx = load_fixture(&fixture, flags.blocks)?;
            let plan = plan_for(&fx, &flags)?;
            let outcome = estimate_fixture(&fx, &plan)?;
            let manifest = manifest::RunManifest::new("estimate", std::slice::from_ref(&fixture), &plan, started);
            output::emit_estimate(&outcome, manifest, &flags)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Oracle { fixture, query, n, k, eps, l, two_sided, out } => {
            let bounds = run_oracle(&fixture, &query, n, k, eps, l, two_sided)?;
            output::emit_oracle(&bounds, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { relation, fixtures: names, p, i, j, tol, flags } => {
            let started = std::time::Instant::now();
            let check = run_check(&relation, &names, p, i, j, tol, &flags)?;
            let manifest = manifest::RunManifest::new("check", &names, &EstimatePlan::default(), started);
            output::emit_check(&check, manifest, &flags)?;
            Ok(match check.verdict {
                Verdict::Pass => ExitCode::SUCCESS,
                Verdict::Fail => ExitCode::from(1),
                Verdict::Inconclusive => ExitCode::from(4),
            })
        }
        Command::Sweep { fixture, param, values, flags } => {
            let started = std::time::Instant::now();
            let rows = run_sweep(&fixture, &param, &values, &flags)?;
            let manifest =
                manifest::RunManifest::new("sweep", std::slice::from_ref(&fixture), &EstimatePlan::default(), started);
            output::emit_sweep(&param, &rows, manifest, &flags)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_oracle(
    fixture: &str,
    query: &str,
    n: Option<u32>,
    k: Option<u32>,
    eps: Option<f64>,
    l: u32,
    two_sided: bool,
) -> Result<Vec<oracle::OracleBound>, Error> {
    match (fixture, query) {
        (f, "cov") if f.starts_with("phi_a:") => {
            let a: f64 = f[6..].parse().map_err(|_| Error::UnknownFixture(f.into()))?;
            let (lo, hi) = oracle::phi_a_cover_bounds(
                a,
                n.ok_or_else(|| Error::invalid("--n required"))?,
                k.ok_or_else(|| Error::invalid("--k required"))?,
            )?;
            Ok(vec![lo, hi])
        }
        ("example33", "sep") => Ok(vec![oracle::example33_sep_lower(
            n.ok_or_else(|| Error::invalid("--n required"))?,
            k.ok_or_else(|| Error::invalid("--k required"))?,
        )]),
        (f, "sep") if f.starts_with("shift:") => {
            let eps = eps.ok_or_else(|| Error::invalid("--eps required"))?;
            let base_count = match f {
                "shift:interval" => num_bigint::BigUint::from(1 + (1.0 / eps).floor() as u64),
                "shift:kakeya_A" => oracle::kakeya_cover_count(eps)?.value,
                other => return Err(Error::UnknownFixture(other.into())),
            };
            let sided = if two_sided { oracle::Sidedness::TwoSided } else { oracle::Sidedness::OneSided };
            let (lo, hi) =
                oracle::shift_counts(&base_count, n.ok_or_else(|| Error::invalid("--n required"))?, l, sided);
            Ok(vec![lo, hi])
        }
        (f, "fix") if f.starts_with("cat_power:") => {
            let trace: i64 = f[10..].parse().map_err(|_| Error::UnknownFixture(f.into()))?;
            let matrix = if trace == 3 { [[2, 1], [1, 1]] } else { [[trace, -1], [1, 0]] };
            Ok(vec![oracle::toral_fix_count(
                matrix,
                n.ok_or_else(|| Error::invalid("--n required"))?,
            )?])
        }
        ("shift:kakeya_A", "ball_cover") | ("kakeya_A", "ball_cover") => {
            Ok(vec![oracle::kakeya_cover_count(
                eps.ok_or_else(|| Error::invalid("--eps required"))?,
            )?])
        }
        (f, q) => Err(Error::invalid(format!("no oracle route for fixture {f} and query {q}"))),
    }
}

fn run_check(
    relation: &str,
    names: &[String],
    p: usize,
    i: usize,
    j: usize,
    tol: f64,
    flags: &RunFlags,
) -> Result<props::RelationCheck, Error> {
    let first = names
        .first()
        .ok_or_else(|| Error::invalid("check needs at least one fixture"))?;
    let fx = load_fixture(first, flags.blocks)?;
    let plan = plan_for(&fx, flags)?;
    match relation {
        "power_inequality" => props::check_power_inequality(&fx, p, &plan, tol),
        "nonwandering" => props::check_nonwandering(&fx, &plan, tol),
        "box_bound" => props::check_box_bound(&fx, &plan, tol),
        "shift_independence" => props::check_shift_independence(&fx, i, j, &plan, tol),
        "composition_commute" => {
            let second = names
                .get(1)
                .ok_or_else(|| Error::invalid("composition_commute needs two fixtures"))?;
            let gx = load_fixture(second, flags.blocks)?;
            props::check_composition_commute(&fx, &gx, &plan, tol)
        }
        "invariant_max" => {
            // Split the fixture's block region at the first boundary.
            let bm = fx
                .block_map
                .as_ref()
                .ok_or_else(|| Error::Precondition("invariant_max needs a block fixture".into()))?;
            let split = bm.boundaries[1.min(bm.boundaries.len() - 1)];
            let end = bm.block_region_end();
            props::check_invariant_max(&fx, (0.0, split), (split, end), &plan, tol)
        }
        other => Err(Error::invalid(format!("unknown relation {other}"))),
    }
}

fn run_sweep(
    fixture: &str,
    param: &str,
    values: &str,
    flags: &RunFlags,
) -> Result<Vec<(f64, f64)>, Error> {
    let vals: Vec<f64> = if values.trim().is_empty() {
        vec![]
    } else {
        values
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| Error::invalid(format!("bad value {s}"))))
            .collect::<Result<_, _>>()?
    };
    let mut rows = Vec::new();
    match param {
        "a" => {
            if fixture != "phi_a" && !fixture.starts_with("phi_a") {
                return Err(Error::invalid("parameter 'a' sweeps the phi_a family"));
            }
            for &a in &vals {
                let fx = fixtures::phi_a_fixture(a, flags.blocks.unwrap_or(4).max(4))?;
                let mut plan = plan_for(&fx, flags)?;
                if plan.ladder.is_none() {
                    // The analytic ladder shrinks by 3^{1/a} per rung.
                    // When that ratio is shallower than 9 the first
                    // rung spans too few radii to hold any separated
                    // structure; start the regression one rung down.
                    let bm = fx.block_map.as_ref().unwrap();
                    let start = if 3f64.powf(1.0 / a) < 9.0 { 1 } else { 0 };
                    plan.ladder = Some(bm.eps_ladder[start..start + 3].to_vec());
                }
                let outcome = estimate_fixture(&fx, &plan)?;
                rows.push((a, outcome.report.slope));
            }
        }
        "ladder_depth" => {
            let fx = load_fixture(fixture, flags.blocks)?;
            let base = match &fx.counts {
                fixtures::CountSource::ProductLift { base } => base.clone(),
                _ => fx.space.clone(),
            };
            for &depth in &vals {
                let rungs = (depth.round() as usize).max(3);
                let ladder: Vec<f64> =
                    (0..rungs).map(|t| 1e-2 / 10f64.powf(t as f64 * 0.75)).collect();
                let report = box_dimension(&base, &ladder)?;
                rows.push((depth, report.slope));
            }
        }
        other => return Err(Error::invalid(format!("unknown sweep parameter {other}"))),
    }
    Ok(rows)
}
