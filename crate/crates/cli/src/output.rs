//! Output directory handling. Primary outputs depend only on the config;
//! wall-clock data goes to the `timing.json` sidecar.

use std::fs;
use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::config::Config;
use crate::error::CliError;

pub const CONFIG_ARCHIVE: &str = "config.json";
pub const TIMING_SIDECAR: &str = "timing.json";

pub struct OutputDir {
    root: PathBuf,
    command: &'static str,
    started: Instant,
    started_unix_ms: u128,
}

impl OutputDir {
    /// Creates the directory and archives the config text verbatim.
    pub fn create(cfg: &Config, command: &'static str) -> Result<Self, CliError> {
        let root = cfg.header.output_dir.clone();
        fs::create_dir_all(&root)
            .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", root.display())))?;
        let out = Self {
            root,
            command,
            started: Instant::now(),
            started_unix_ms: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis()),
        };
        out.write(CONFIG_ARCHIVE, &cfg.raw)?;
        Ok(out)
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write(&self, name: &str, contents: &str) -> Result<(), CliError> {
        let p = self.path(name);
        if let Some(parent) = p.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&p, contents).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", p.display())))
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<(), CliError> {
        self.write(name, &(json(value)? + "\n"))
    }

    /// Writes the timing sidecar; `runs` carries per-run wall times.
    pub fn finish(&self, runs: &[(String, u64)]) -> Result<(), CliError> {
        #[derive(Serialize)]
        struct Timing<'a> {
            command: &'a str,
            started_unix_ms: u128,
            wall_ms: u128,
            runs: Vec<RunTime<'a>>,
        }
        #[derive(Serialize)]
        struct RunTime<'a> {
            name: &'a str,
            wall_ms: u64,
        }
        let t = Timing {
            command: self.command,
            started_unix_ms: self.started_unix_ms,
            wall_ms: self.started.elapsed().as_millis(),
            runs: runs.iter().map(|(name, ms)| RunTime { name, wall_ms: *ms }).collect(),
        };
        self.write_json(TIMING_SIDECAR, &t)
    }
}

pub fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(value)?)
}
