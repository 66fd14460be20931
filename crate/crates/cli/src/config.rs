//! Run configuration with layered resolution: CLI flag over config file over
//! built-in default.

use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::UsageError;

/// Every tunable of a run. Serialized as a flat JSON object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Half-length L of the spatial grid.
    pub grid_l: f64,
    /// Spacing h of the spatial grid.
    pub grid_h: f64,
    /// Tolerance on the weighted residual of g_n.
    pub residual_tolerance: f64,
    /// Tolerance on linear-solve back-substitution residuals.
    pub solve_tolerance: f64,
    /// Tolerance of closed-form comparisons in `jost --validate-p3`.
    pub closed_form_tolerance: f64,
    /// Exponent p.
    pub p: f64,
    /// Lower end of a p-range.
    pub p_min: f64,
    /// Upper end of a p-range.
    pub p_max: f64,
    /// Order n of the refined profile.
    pub n: usize,
    /// Number of sweep points.
    pub steps: usize,
    /// Real part of the wavenumber k.
    pub k_re: f64,
    /// Imaginary part of the wavenumber k.
    pub k_im: f64,
    /// Time step of the evolution.
    pub dt: f64,
    /// Final time of the evolution.
    pub t_final: f64,
    /// Initial internal-mode amplitude.
    pub z0: f64,
    /// Whether the boundary sponge is on.
    pub sponge: bool,
    /// Peak sponge absorption per unit time.
    pub sponge_peak: f64,
    /// Time between modulation decompositions.
    pub output_every: f64,
    /// Half-length of the periodic evolution box.
    pub dyn_half_length: f64,
    /// Number of Fourier points of the evolution box.
    pub dyn_points: usize,
    /// Whether SVG plots are written.
    pub svg: bool,
    /// Output directory.
    pub out: String,
    /// Seed for randomized checks.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            grid_l: fgrlab_core::grid::DEFAULT_HALF_LENGTH,
            grid_h: fgrlab_core::grid::DEFAULT_SPACING,
            residual_tolerance: fgrlab_core::fgr::RESIDUAL_TOLERANCE,
            solve_tolerance: fgrlab_core::refined_profile::SOLVE_TOLERANCE,
            closed_form_tolerance: 1e-6,
            p: 4.3,
            p_min: 3.2,
            p_max: 4.9,
            n: 3,
            steps: 50,
            k_re: 1.0,
            k_im: 0.0,
            dt: 0.005,
            t_final: 400.0,
            z0: 0.05,
            sponge: false,
            sponge_peak: fgrlab_core::dynamics::SPONGE_PEAK,
            output_every: 0.1,
            dyn_half_length: 100.0,
            dyn_points: 4096,
            svg: false,
            out: "out".to_string(),
            seed: 0,
        }
    }
}

impl RunConfig {
    /// Pretty JSON form.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Parses a JSON document; missing fields take their defaults.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| UsageError(format!("invalid config: {e}")).into())
    }

    /// Layers `file` over the defaults and `flags` over both. Both layers are
    /// partial JSON objects whose keys must be config fields.
    pub fn resolve(file: Option<&Map<String, Value>>, flags: &Map<String, Value>) -> Result<Self> {
        let mut merged = match serde_json::to_value(Self::default())? {
            Value::Object(m) => m,
            _ => unreachable!("config serializes to an object"),
        };
        for layer in file.into_iter().chain(std::iter::once(flags)) {
            for (k, v) in layer {
                if !merged.contains_key(k) {
                    return Err(UsageError(format!("unknown config field `{k}`")).into());
                }
                merged.insert(k.clone(), v.clone());
            }
        }
        serde_json::from_value(Value::Object(merged)).map_err(|e| UsageError(format!("invalid config: {e}")).into())
    }
}

/// Reads a config file as a partial JSON object.
pub fn read_layer(path: &Path) -> Result<Map<String, Value>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => Err(UsageError(format!("{} is not a JSON object", path.display())).into()),
        Err(e) => Err(UsageError(format!("{}: {e}", path.display())).into()),
    }
}
