//! Experiment records and their append-only persistence.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::ExperimentConfig;

/// Keys holding wall-clock data; ignored when comparing records.
pub const TIMESTAMP_KEYS: [&str; 1] = ["timestamps"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timestamps {
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
}

pub fn now_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub tool: String,
    pub version: String,
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub timestamps: Timestamps,
    /// Stage name to report, in insertion order.
    pub stages: serde_json::Map<String, Value>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    /// Every checked claim held.
    pub holds: bool,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub holds: bool,
    pub observed: f64,
    pub required: f64,
    pub detail: String,
}

impl ExperimentRecord {
    pub fn new(config: &ExperimentConfig, started: u128) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: config.hash(),
            config: config.clone(),
            timestamps: Timestamps {
                started_unix_ms: started,
                finished_unix_ms: started,
            },
            stages: serde_json::Map::new(),
            verdict: Verdict {
                holds: true,
                checks: Vec::new(),
            },
        }
    }

    pub fn stage(&mut self, name: &str, report: impl Serialize) -> Result<()> {
        self.stages
            .insert(name.to_string(), serde_json::to_value(report).context("serializing stage")?);
        Ok(())
    }

    pub fn check(&mut self, check: Check) {
        self.verdict.holds &= check.holds;
        self.verdict.checks.push(check);
    }

    pub fn finish(&mut self) {
        self.timestamps.finished_unix_ms = now_ms();
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serializes")
    }

    /// Short human-readable summary.
    pub fn summary(&self) -> String {
        let mut out = format!(
            "{} {} config {}\n",
            self.tool,
            self.version,
            &self.config_hash[..12]
        );
        for c in &self.verdict.checks {
            out.push_str(&format!(
                "  [{}] {}: observed {:.4}, required {:.4} ({})\n",
                if c.holds { "ok" } else { "FAIL" },
                c.name,
                c.observed,
                c.required,
                c.detail
            ));
        }
        out.push_str(if self.verdict.holds { "verdict: holds\n" } else { "verdict: falsified\n" });
        out
    }
}

/// Record JSON with the timestamp fields removed.
pub fn without_timestamps(json: &str) -> Result<Value> {
    let mut v: Value = serde_json::from_str(json).context("record is not JSON")?;
    if let Some(obj) = v.as_object_mut() {
        for k in TIMESTAMP_KEYS {
            obj.remove(k);
        }
    }
    Ok(v)
}

/// Files written for one run.
#[derive(Clone, Debug, PartialEq)]
pub struct Persisted {
    pub record: PathBuf,
    pub config: PathBuf,
    pub extras: Vec<PathBuf>,
}

/// Creates `path`, failing if it already exists.
pub fn write_new(path: &Path, contents: &str) -> Result<()> {
    let mut f = OpenOptions::new()
        .write(true)
        .create_new(true)
        .open(path)
        .with_context(|| format!("creating {}", path.display()))?;
    f.write_all(contents.as_bytes())
        .with_context(|| format!("writing {}", path.display()))
}

/// First unused stem `<prefix>-<n>` in `dir`, for `n = 1, 2, …`.
fn fresh_stem(dir: &Path, prefix: &str) -> PathBuf {
    (1u32..)
        .map(|n| dir.join(format!("{prefix}-{n:03}")))
        .find(|stem| !stem.with_extension("json").exists() && !stem.with_extension("config.json").exists())
        .expect("unbounded counter")
}

/// Writes `<name>-<hash12>-<n>.json`, its `.config.json` and any extra
/// `(extension, contents)` files under `dir`, never overwriting.
pub fn persist(dir: &Path, name: &str, record: &ExperimentRecord, extras: &[(&str, String)]) -> Result<Persisted> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let stem = fresh_stem(dir, &format!("{name}-{}", &record.config_hash[..12]));
    let record_path = stem.with_extension("json");
    let config_path = stem.with_extension("config.json");
    write_new(&config_path, &record.config.to_json())?;
    write_new(&record_path, &record.to_json())?;
    let mut written = Vec::new();
    for (ext, contents) in extras {
        let p = stem.with_extension(ext);
        write_new(&p, contents)?;
        written.push(p);
    }
    Ok(Persisted {
        record: record_path,
        config: config_path,
        extras: written,
    })
}
