//! Command-line surface of fgrlab: argument parsing, config layering, the
//! subcommands, CSV/SVG emission and the run manifest.

pub mod commands;
pub mod config;
pub mod manifest;
pub mod svg;

use std::path::PathBuf;
use std::time::Instant;

use anyhow::Result;
use clap::{Parser, Subcommand};
use serde_json::{Map, Value};

use config::RunConfig;
use manifest::{Recorder, RunManifest};

/// Invalid invocation or configuration; maps to exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Top-level arguments.
#[derive(Debug, Parser)]
#[command(name = "fgrlab", version, about = "Spectral and FGR diagnostics for pure-power NLS solitons")]
pub struct Cli {
    /// JSON config file; flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<String>,
    /// Grid half-length L.
    #[arg(long = "grid-L", global = true)]
    pub grid_l: Option<f64>,
    /// Grid spacing h.
    #[arg(long = "grid-h", global = true)]
    pub grid_h: Option<f64>,
    /// Subcommand.
    #[command(subcommand)]
    pub command: Command,
}

/// Subcommands.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Internal mode at one p: prints lambda, writes mode.csv.
    Mode {
        /// Exponent p.
        #[arg(long)]
        p: Option<f64>,
    },
    /// Thresholds p2 < p3 < p4 with lambda(p_n) = 1/n.
    Thresholds,
    /// Jost solutions at (p, k).
    Jost {
        /// Exponent p.
        #[arg(long)]
        p: Option<f64>,
        /// Wavenumber as `re,im`.
        #[arg(long, value_parser = parse_k, allow_hyphen_values = true)]
        k: Option<(f64, f64)>,
        /// Compare against the cubic closed forms (requires p = 3).
        #[arg(long)]
        validate_p3: bool,
    },
    /// det D(p, 0) over a p-range.
    ResonanceSweep {
        /// Lower exponent.
        #[arg(long)]
        p_min: Option<f64>,
        /// Upper exponent.
        #[arg(long)]
        p_max: Option<f64>,
        /// Number of points.
        #[arg(long)]
        steps: Option<usize>,
    },
    /// gamma_n over its window.
    FgrSweep {
        /// Order (3 or 4).
        #[arg(long, value_parser = clap::value_parser!(u8).range(3..=4))]
        n: Option<u8>,
        /// Number of points.
        #[arg(long)]
        steps: Option<usize>,
        /// Also write an SVG plot.
        #[arg(long)]
        svg: bool,
    },
    /// Closed-form cubic identities.
    P3Oracle,
    /// Refined profile at (p, n) with the remainder-order report.
    Profile {
        /// Exponent p.
        #[arg(long)]
        p: Option<f64>,
        /// Order (3 or 4).
        #[arg(long, value_parser = clap::value_parser!(u8).range(3..=4))]
        n: Option<u8>,
    },
    /// Perturbed-soliton evolution with modulation tracking.
    Simulate {
        /// Exponent p.
        #[arg(long)]
        p: Option<f64>,
        /// Initial internal-mode amplitude.
        #[arg(long)]
        z0: Option<f64>,
        /// Final time.
        #[arg(long = "T")]
        t_final: Option<f64>,
        /// Time step.
        #[arg(long)]
        dt: Option<f64>,
        /// Turn the boundary sponge on.
        #[arg(long)]
        sponge: bool,
        /// Also write an SVG plot.
        #[arg(long)]
        svg: bool,
    },
}

fn parse_k(s: &str) -> std::result::Result<(f64, f64), String> {
    let mut parts = s.split(',');
    let re = parts.next().ok_or("missing real part")?.trim();
    let im = parts.next().unwrap_or("0").trim();
    if parts.next().is_some() {
        return Err("expected `re,im`".into());
    }
    let re = re.parse::<f64>().map_err(|e| e.to_string())?;
    let im = im.parse::<f64>().map_err(|e| e.to_string())?;
    Ok((re, im))
}

impl Command {
    /// Subcommand name as typed.
    pub fn name(&self) -> &'static str {
        match self {
            Command::Mode { .. } => "mode",
            Command::Thresholds => "thresholds",
            Command::Jost { .. } => "jost",
            Command::ResonanceSweep { .. } => "resonance-sweep",
            Command::FgrSweep { .. } => "fgr-sweep",
            Command::P3Oracle => "p3-oracle",
            Command::Profile { .. } => "profile",
            Command::Simulate { .. } => "simulate",
        }
    }
}

impl Cli {
    /// Flags given on the command line as a partial config object.
    pub fn overrides(&self) -> Map<String, Value> {
        let mut m = Map::new();
        let mut put = |k: &str, v: Option<Value>| {
            if let Some(v) = v {
                m.insert(k.to_string(), v);
            }
        };
        put("out", self.out.clone().map(Value::from));
        put("grid_l", self.grid_l.map(Value::from));
        put("grid_h", self.grid_h.map(Value::from));
        let flag = |b: bool| b.then_some(Value::Bool(true));
        match &self.command {
            Command::Mode { p } | Command::Profile { p, .. } => put("p", p.map(Value::from)),
            Command::Jost { p, k, .. } => {
                put("p", p.map(Value::from));
                put("k_re", k.map(|k| Value::from(k.0)));
                put("k_im", k.map(|k| Value::from(k.1)));
            }
            Command::ResonanceSweep { p_min, p_max, steps } => {
                put("p_min", p_min.map(Value::from));
                put("p_max", p_max.map(Value::from));
                put("steps", steps.map(Value::from));
            }
            Command::FgrSweep { n, steps, svg } => {
                put("n", n.map(Value::from));
                put("steps", steps.map(Value::from));
                put("svg", flag(*svg));
            }
            Command::Simulate { p, z0, t_final, dt, sponge, svg } => {
                put("p", p.map(Value::from));
                put("z0", z0.map(Value::from));
                put("t_final", t_final.map(Value::from));
                put("dt", dt.map(Value::from));
                put("sponge", flag(*sponge));
                put("svg", flag(*svg));
            }
            Command::Thresholds | Command::P3Oracle => {}
        }
        if let Command::Profile { n, .. } = &self.command {
            put("n", n.map(Value::from));
        }
        m
    }

    /// Resolves the config from defaults, the optional file and the flags.
    pub fn resolve_config(&self) -> Result<RunConfig> {
        let file = self.config.as_deref().map(config::read_layer).transpose()?;
        RunConfig::resolve(file.as_ref(), &self.overrides())
    }
}

/// Runs one invocation and writes its manifest.
pub fn run(cli: &Cli) -> Result<RunManifest> {
    let cfg = cli.resolve_config()?;
    let start = Instant::now();
    let mut rec = Recorder::new(cli.command.name(), &cfg)?;
    commands::dispatch(&cli.command, &cfg, &mut rec)?;
    rec.finish(start.elapsed().as_secs_f64())
}
