//! Structured output: JSON reports with nested diagnostics, CSV for
//! tables and sweeps. CSV columns are `kind,n,eps,count,provenance`
//! with counts as decimal strings; the manifest rides along as a
//! leading comment line in CSV files and as a field in JSON ones.

use crate::manifest::RunManifest;
use crate::{Format, RunFlags};
use meandim::estimate::EstimateOutcome;
use meandim::oracle::OracleBound;
use meandim::props::RelationCheck;
use meandim::{Error, Result};
use serde::Serialize;
use std::path::Path;

pub const CSV_HEADER: &str = "kind,n,eps,count,provenance";
pub const SWEEP_HEADER: &str = "parameter,estimate";

fn kind_label(kind: &meandim::estimate::CountKind) -> &'static str {
    match kind {
        meandim::estimate::CountKind::Separated => "separated",
        meandim::estimate::CountKind::Spanning => "spanning",
        meandim::estimate::CountKind::Cover => "cover",
        meandim::estimate::CountKind::BallCover => "ball_cover",
    }
}

fn provenance_label(p: &meandim::estimate::Provenance) -> &'static str {
    match p {
        meandim::estimate::Provenance::Numeric => "numeric",
        meandim::estimate::Provenance::Oracle => "oracle",
    }
}

pub fn table_csv(outcome: &EstimateOutcome) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for cell in &outcome.table.cells {
        out.push_str(&format!(
            "{},{},{:.12e},{},{}\n",
            kind_label(&outcome.table.kind),
            cell.horizon,
            cell.eps,
            cell.count,
            provenance_label(&outcome.table.provenance),
        ));
    }
    out
}

#[derive(Serialize)]
struct EstimateDocument<'a> {
    manifest: &'a RunManifest,
    #[serde(flatten)]
    outcome: &'a EstimateOutcome,
}

fn write_or_print(path: Option<&Path>, name: &str, data: &str) -> Result<()> {
    match path {
        Some(dir) => {
            std::fs::create_dir_all(dir)
                .map_err(|e| Error::invalid(format!("cannot create {}: {e}", dir.display())))?;
            let file = dir.join(name);
            std::fs::write(&file, data)
                .map_err(|e| Error::invalid(format!("cannot write {}: {e}", file.display())))?;
            eprintln!("wrote {}", file.display());
        }
        None => println!("{data}"),
    }
    Ok(())
}

pub fn emit_estimate(outcome: &EstimateOutcome, mut manifest: RunManifest, flags: &RunFlags) -> Result<()> {
    let csv = table_csv(outcome);
    manifest.add_digest(&csv);
    let json = serde_json::to_string_pretty(&EstimateDocument { manifest: &manifest, outcome })
        .map_err(|e| Error::invalid(format!("serialization: {e}")))?;
    match (flags.out.as_deref(), flags.format) {
        (Some(dir), _) => {
            // Directory output always gets both the report and the table.
            write_or_print(Some(dir), "report.json", &json)?;
            let manifest_line = serde_json::to_string(&manifest).unwrap_or_default();
            let csv_with_manifest = format!("# manifest {manifest_line}\n{csv}");
            write_or_print(Some(dir), "counts.csv", &csv_with_manifest)?;
        }
        (None, Format::Json) => println!("{json}"),
        (None, Format::Csv) => print!("{csv}"),
    }
    // Human-readable summary on stderr.
    let r = &outcome.report;
    if r.infinite {
        eprintln!("{}: divergent (infinite) mean dimension", outcome.fixture_id);
    } else {
        eprintln!(
            "{}: estimate {:.4} (lower {:.4}, upper {:.4})",
            outcome.fixture_id, r.slope, r.lower, r.upper
        );
    }
    Ok(())
}

pub fn emit_oracle(bounds: &[OracleBound], out: Option<&Path>) -> Result<()> {
    let json = serde_json::to_string_pretty(bounds)
        .map_err(|e| Error::invalid(format!("serialization: {e}")))?;
    write_or_print(out, "oracle.json", &json)?;
    for b in bounds {
        eprintln!("{:?} {:?} = {}", b.kind, b.quantity, b.value);
    }
    Ok(())
}

#[derive(Serialize)]
struct CheckDocument<'a> {
    manifest: &'a RunManifest,
    #[serde(flatten)]
    check: &'a RelationCheck,
}

pub fn emit_check(check: &RelationCheck, manifest: RunManifest, flags: &RunFlags) -> Result<()> {
    let json = serde_json::to_string_pretty(&CheckDocument { manifest: &manifest, check })
        .map_err(|e| Error::invalid(format!("serialization: {e}")))?;
    match flags.out.as_deref() {
        Some(dir) => write_or_print(Some(dir), "check.json", &json)?,
        None => println!("{json}"),
    }
    eprintln!("{}: {:?} ({})", check.relation, check.verdict, check.details);
    Ok(())
}

pub fn emit_sweep(param: &str, rows: &[(f64, f64)], mut manifest: RunManifest, flags: &RunFlags) -> Result<()> {
    let mut csv = String::from(SWEEP_HEADER);
    csv.push('\n');
    for (value, estimate) in rows {
        csv.push_str(&format!("{value},{estimate:.6}\n"));
    }
    manifest.add_digest(&csv);
    let manifest_line = serde_json::to_string(&manifest).unwrap_or_default();
    let full = format!("# manifest {manifest_line}\n{csv}");
    match flags.out.as_deref() {
        Some(dir) => write_or_print(Some(dir), &format!("sweep_{param}.csv"), &full)?,
        None => print!("{full}"),
    }
    Ok(())
}
