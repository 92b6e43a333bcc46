//! Versioned JSON certificates emitted by the command-line tool.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::pairing::WindingTolerance;
use crate::two_bridge::TrackerConfig;

pub const SCHEMA_VERSION: u32 = 1;

/// Numeric settings a certificate was produced under.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub residual: f64,
    pub samples: usize,
    pub max_steps: usize,
    pub winding_step_bound: f64,
    pub closure: f64,
    pub max_residue: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let t = TrackerConfig::default();
        let w = WindingTolerance::default();
        Self {
            residual: t.residual_tol,
            samples: crate::torus::DEFAULT_LOOP_SAMPLES,
            max_steps: t.max_steps,
            winding_step_bound: w.max_step,
            closure: w.closure,
            max_residue: w.max_residue,
        }
    }
}

impl Tolerances {
    pub fn tracker(&self) -> TrackerConfig {
        TrackerConfig { residual_tol: self.residual, max_steps: self.max_steps, ..TrackerConfig::default() }
    }

    pub fn winding(&self) -> WindingTolerance {
        WindingTolerance {
            closure: self.closure,
            max_step: self.winding_step_bound,
            max_residue: self.max_residue,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema_version: u32,
    /// Arguments after the program name.
    pub command: Vec<String>,
    pub inputs: Value,
    pub outputs: Value,
    pub tolerances: Tolerances,
    /// Only recorded on request, so that certificates stay byte-identical
    /// across runs by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_clock_seconds: Option<f64>,
}

impl Certificate {
    pub fn new(command: Vec<String>, inputs: Value, outputs: Value, tolerances: Tolerances) -> Self {
        Self { schema_version: SCHEMA_VERSION, command, inputs, outputs, tolerances, wall_clock_seconds: None }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate values are finite")
    }
}

/// First 16 hex digits of the SHA-256 of `parts` joined by NUL.
pub fn input_hash(parts: &[&str]) -> String {
    let mut h = Sha256::new();
    for (i, p) in parts.iter().enumerate() {
        if i > 0 {
            h.update([0u8]);
        }
        h.update(p.as_bytes());
    }
    hex::encode(h.finalize())[..16].to_string()
}
