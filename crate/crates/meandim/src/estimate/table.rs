//! Count tables: `(horizon, radius) -> count` with kind and provenance.

use crate::error::{Error, Result};
use num_bigint::BigUint;
use serde::{Serialize, Serializer};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CountKind {
    Separated,
    Spanning,
    Cover,
    BallCover,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Numeric,
    Oracle,
}

fn serialize_count<S: Serializer>(c: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    // Counts exceed native integer ranges; serialize as decimal strings.
    s.serialize_str(&c.to_string())
}

#[derive(Clone, Debug, Serialize)]
pub struct CountCell {
    pub horizon: usize,
    pub eps: f64,
    #[serde(serialize_with = "serialize_count")]
    pub count: BigUint,
}

#[derive(Clone, Debug, Serialize)]
pub struct CountTable {
    pub kind: CountKind,
    pub provenance: Provenance,
    pub cells: Vec<CountCell>,
    /// Net resolution of the numeric sample, when numeric.
    pub grid_resolution: Option<f64>,
    pub seed: u64,
}

impl CountTable {
    pub fn new(kind: CountKind, provenance: Provenance) -> Self {
        CountTable { kind, provenance, cells: Vec::new(), grid_resolution: None, seed: 0 }
    }

    pub fn push(&mut self, horizon: usize, eps: f64, count: BigUint) {
        self.cells.push(CountCell { horizon, eps, count });
    }

    pub fn get(&self, horizon: usize, eps: f64) -> Option<&BigUint> {
        self.cells
            .iter()
            .find(|c| c.horizon == horizon && (c.eps - eps).abs() <= 1e-12 * eps.abs().max(1e-300))
            .map(|c| &c.count)
    }

    /// Distinct radii, largest first.
    pub fn ladder(&self) -> Vec<f64> {
        let mut eps: Vec<f64> = Vec::new();
        for c in &self.cells {
            if !eps.iter().any(|e| (e - c.eps).abs() <= 1e-12 * c.eps.abs().max(1e-300)) {
                eps.push(c.eps);
            }
        }
        eps.sort_by(|a, b| b.partial_cmp(a).unwrap());
        eps
    }

    /// Horizons present at a radius, ascending.
    pub fn horizons_at(&self, eps: f64) -> Vec<usize> {
        let mut hs: Vec<usize> = self
            .cells
            .iter()
            .filter(|c| (c.eps - eps).abs() <= 1e-12 * eps.abs().max(1e-300))
            .map(|c| c.horizon)
            .collect();
        hs.sort_unstable();
        hs.dedup();
        hs
    }

    /// Structural invariants: counts non-increasing in the radius at a
    /// fixed horizon; separated counts non-decreasing in the horizon at
    /// a fixed radius.
    pub fn validate(&self) -> Result<()> {
        let ladder = self.ladder();
        let mut horizons: Vec<usize> = self.cells.iter().map(|c| c.horizon).collect();
        horizons.sort_unstable();
        horizons.dedup();
        for &h in &horizons {
            let mut prev: Option<&BigUint> = None;
            for eps in &ladder {
                if let Some(count) = self.get(h, *eps) {
                    if let Some(p) = prev {
                        // Ladder is descending, so counts must ascend or hold.
                        if count < p {
                            return Err(Error::Construction(format!(
                                "counts increase with the radius at horizon {h}"
                            )));
                        }
                    }
                    prev = Some(count);
                }
            }
        }
        if self.kind == CountKind::Separated {
            for eps in &ladder {
                let hs = self.horizons_at(*eps);
                let mut prev: Option<&BigUint> = None;
                for h in hs {
                    let count = self.get(h, *eps).unwrap();
                    if let Some(p) = prev {
                        if count < p {
                            return Err(Error::Construction(format!(
                                "separated counts decrease with the horizon at eps={eps}"
                            )));
                        }
                    }
                    prev = Some(count);
                }
            }
        }
        Ok(())
    }
}

/// Natural log of an arbitrary-precision count.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 53 {
        let v: u64 = x.try_into().ok().unwrap_or(u64::MAX);
        return (v.max(1) as f64).ln();
    }
    // ln(x) = ln(top 53 bits) + (dropped bits) * ln 2.
    let drop = bits - 53;
    let top: BigUint = x >> drop;
    let v: u64 = (&top).try_into().unwrap_or(u64::MAX);
    (v as f64).ln() + drop as f64 * std::f64::consts::LN_2
}
