//! Run manifests: enough metadata to reproduce a run bit-for-bit.
//! Reruns with identical manifests produce identical data sections;
//! only the wall-clock field varies.

use meandim::estimate::EstimatePlan;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub command: String,
    pub fixtures: Vec<String>,
    pub ladder: Option<Vec<f64>>,
    pub horizons: Vec<usize>,
    pub grid_factor: f64,
    pub per_block_cap: usize,
    pub window: usize,
    pub seed: u64,
    pub tool_version: String,
    pub wall_ms: u128,
    /// FNV-1a 64 digests of the data sections written by the run.
    pub output_digests: Vec<String>,
}

pub const SCHEMA_VERSION: u32 = 1;

impl RunManifest {
    pub fn new(command: &str, fixtures: &[String], plan: &EstimatePlan, started: std::time::Instant) -> Self {
        RunManifest {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            fixtures: fixtures.to_vec(),
            ladder: plan.ladder.clone(),
            horizons: plan.horizons.clone(),
            grid_factor: plan.delta_factor,
            per_block_cap: plan.per_block_cap,
            window: plan.window,
            seed: plan.seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_ms: started.elapsed().as_millis(),
            output_digests: Vec::new(),
        }
    }

    pub fn add_digest(&mut self, data: &str) {
        self.output_digests.push(format!("fnv1a64:{:016x}", fnv1a64(data.as_bytes())));
    }
}

pub fn fnv1a64(data: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in data {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}
