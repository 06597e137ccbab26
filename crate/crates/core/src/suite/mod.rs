//! Manifest-driven runs over the entry catalog.
//!
//! A run validates a [`RunConfig`], evaluates every entry on a rayon pool and
//! writes one JSON file per entry plus `summary.csv`, `summary.json` and a
//! `run_metadata.json` sidecar with wall-clock timings. Everything except the
//! sidecar is a deterministic function of the manifest and seed.

mod catalog;
mod config;
mod ops;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

pub use catalog::{describe, lookup, CatalogEntry, Cmp, MetricSpec, ParamSpec, CATALOG};
pub use config::{EntrySpec, OutputFormat, RunConfig, SpaceSpec, SCHEMA_VERSION};

use crate::error::{Error, Result};

/// Command-line style overrides applied on top of a manifest.
#[derive(Debug, Clone, Default)]
pub struct RunOverrides {
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    /// Restrict the run to these entry names.
    pub entries: Vec<String>,
    /// Number of refinement levels for ladder parameters left at default.
    pub refine: Option<usize>,
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metric {
    pub metric: String,
    pub value: f64,
    pub threshold: f64,
    pub cmp: Cmp,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntryReport {
    pub entry: String,
    pub op: String,
    pub anchor: String,
    pub seed: u64,
    pub pass: bool,
    pub metrics: Vec<Metric>,
    pub details: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub seed: u64,
    pub pass: bool,
    pub entries: Vec<EntryReport>,
}

/// Wall-clock data kept out of the deterministic outputs.
#[derive(Debug, Clone, Serialize)]
pub struct RunMetadata {
    pub started_unix: f64,
    pub finished_unix: f64,
    pub total_seconds: f64,
    pub workers: usize,
    pub entry_seconds: BTreeMap<String, f64>,
}

impl SuiteReport {
    pub fn failures(&self) -> Vec<(&str, &Metric)> {
        self.entries
            .iter()
            .flat_map(|e| e.metrics.iter().filter(|m| !m.pass).map(move |m| (e.entry.as_str(), m)))
            .collect()
    }

    pub fn summary_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["entry", "metric", "value", "threshold", "pass"])?;
        for e in &self.entries {
            for m in &e.metrics {
                w.write_record([
                    e.entry.as_str(),
                    m.metric.as_str(),
                    &format!("{:e}", m.value),
                    &format!("{:e}", m.threshold),
                    if m.pass { "true" } else { "false" },
                ])?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Serialization(e.to_string()))
    }

    /// Writes per-entry files and summaries into `dir`.
    pub fn write(&self, dir: &Path, format: OutputFormat) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        if format.json() {
            for e in &self.entries {
                let path = dir.join(format!("{}.json", file_stem(&e.entry)));
                std::fs::write(path, serde_json::to_string_pretty(e)? + "\n")?;
            }
            let summary: Vec<Value> = self
                .entries
                .iter()
                .map(|e| serde_json::json!({ "entry": e.entry, "op": e.op, "pass": e.pass, "metrics": e.metrics }))
                .collect();
            let doc = serde_json::json!({
                "schema_version": self.schema_version,
                "seed": self.seed,
                "pass": self.pass,
                "entries": summary,
            });
            std::fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&doc)? + "\n")?;
        }
        if format.csv() {
            std::fs::write(dir.join("summary.csv"), self.summary_csv()?)?;
        }
        Ok(())
    }
}

impl RunMetadata {
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(
            dir.join("run_metadata.json"),
            serde_json::to_string_pretty(self)? + "\n",
        )?;
        Ok(())
    }
}

fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed of one entry: FNV-1a of its name mixed with the run seed.
pub fn entry_seed(run_seed: u64, name: &str) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for b in name.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01B3);
    }
    splitmix64(h ^ splitmix64(run_seed))
}

fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

fn evaluate(spec: &EntrySpec, index: usize, seed: u64, refine: Option<usize>) -> Result<EntryReport> {
    let entry = lookup(&spec.op).ok_or_else(|| Error::Config {
        pointer: format!("/suite/{index}/op"),
        message: format!("unknown op {:?}", spec.op),
    })?;
    let ctx = ops::Ctx {
        spec,
        index,
        seed,
        refine,
    };
    let out = ops::run(&spec.op, &ctx).map_err(|e| match e {
        Error::Config { .. } => e,
        other => Error::InvalidArgument(format!("entry {:?}: {other}", spec.entry_name())),
    })?;
    let mut metrics = Vec::with_capacity(entry.metrics.len());
    for m in entry.metrics {
        let value = out
            .metrics
            .iter()
            .find(|(n, _)| *n == m.name)
            .map(|(_, v)| *v)
            .ok_or_else(|| Error::InvalidArgument(format!("{} did not report {}", spec.op, m.name)))?;
        let threshold = spec.thresholds.get(m.name).copied().unwrap_or(m.threshold);
        metrics.push(Metric {
            metric: m.name.to_string(),
            value,
            threshold,
            cmp: m.cmp,
            pass: m.cmp.holds(value, threshold),
        });
    }
    Ok(EntryReport {
        entry: spec.entry_name().to_string(),
        op: spec.op.clone(),
        anchor: entry.anchor.to_string(),
        seed,
        pass: metrics.iter().all(|m| m.pass),
        metrics,
        details: out.details,
    })
}

/// Runs a validated manifest. Returns the deterministic report and the timing sidecar.
pub fn run_suite(config: &RunConfig, overrides: &RunOverrides) -> Result<(SuiteReport, RunMetadata)> {
    config.validate()?;
    if overrides.workers == Some(0) {
        return Err(Error::Config {
            pointer: "/workers".into(),
            message: "worker count must be positive".into(),
        });
    }
    if overrides.refine.is_some_and(|k| k < 2) {
        return Err(Error::InvalidArgument("--refine needs at least two levels".into()));
    }
    for name in &overrides.entries {
        if !config.suite.iter().any(|e| e.entry_name() == name) {
            return Err(Error::InvalidArgument(format!(
                "no entry named {name:?} in the manifest"
            )));
        }
    }
    let seed = overrides.seed.unwrap_or(config.seed);
    let workers = overrides
        .workers
        .or(config.workers)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    let selected: Vec<(usize, &EntrySpec)> = config
        .suite
        .iter()
        .enumerate()
        .filter(|(_, e)| overrides.entries.is_empty() || overrides.entries.iter().any(|n| n == e.entry_name()))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let started_unix = unix_now();
    let clock = Instant::now();
    let results: Vec<Result<(EntryReport, f64)>> = pool.install(|| {
        selected
            .par_iter()
            .map(|(i, spec)| {
                let t = Instant::now();
                let r = evaluate(spec, *i, entry_seed(seed, spec.entry_name()), overrides.refine)?;
                Ok((r, t.elapsed().as_secs_f64()))
            })
            .collect()
    });
    let mut entries = Vec::with_capacity(results.len());
    let mut entry_seconds = BTreeMap::new();
    for r in results {
        let (report, secs) = r?;
        entry_seconds.insert(report.entry.clone(), secs);
        entries.push(report);
    }
    entries.sort_by(|a, b| a.entry.cmp(&b.entry));
    let report = SuiteReport {
        schema_version: SCHEMA_VERSION,
        seed,
        pass: entries.iter().all(|e| e.pass),
        entries,
    };
    let meta = RunMetadata {
        started_unix,
        finished_unix: unix_now(),
        total_seconds: clock.elapsed().as_secs_f64(),
        workers,
        entry_seconds,
    };
    Ok((report, meta))
}
