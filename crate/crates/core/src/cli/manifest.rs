//! Run manifest written next to every artifact.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use super::CliError;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    pub config: Value,
    pub seed: Option<u64>,
    pub version: String,
    pub outputs: Vec<String>,
    pub wall_time_s: f64,
}

/// Collects the manifest while a command runs and writes the artifacts.
pub struct Run {
    manifest: RunManifest,
    out: Option<PathBuf>,
    started: Instant,
}

impl Run {
    pub fn start(command: &str, out: Option<&Path>) -> Result<Self, CliError> {
        if let Some(dir) = out {
            std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
                path: dir.to_path_buf(),
                source,
            })?;
        }
        Ok(Run {
            manifest: RunManifest {
                command: command.to_string(),
                inputs: BTreeMap::new(),
                config: Value::Null,
                seed: None,
                version: env!("CARGO_PKG_VERSION").to_string(),
                outputs: Vec::new(),
                wall_time_s: 0.0,
            },
            out: out.map(Path::to_path_buf),
            started: Instant::now(),
        })
    }

    pub fn input(&mut self, name: &str, value: impl Into<String>) {
        self.manifest.inputs.insert(name.to_string(), value.into());
    }

    pub fn config<T: Serialize>(&mut self, config: &T, seed: Option<u64>) {
        self.manifest.config = serde_json::to_value(config).expect("config serialises");
        self.manifest.seed = seed;
    }

    pub fn has_out(&self) -> bool {
        self.out.is_some()
    }

    /// Writes `contents` to `name` in the output directory, or to stdout
    /// when there is none and `stdout` is set.
    pub fn emit(&mut self, name: &str, contents: &str, stdout: bool) -> Result<(), CliError> {
        match &self.out {
            Some(dir) => {
                let path = dir.join(name);
                std::fs::write(&path, contents).map_err(|source| CliError::Io { path, source })?;
                self.manifest.outputs.push(name.to_string());
            }
            None if stdout => {
                print!("{contents}");
                self.manifest.outputs.push("<stdout>".to_string());
            }
            None => {}
        }
        Ok(())
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.manifest.wall_time_s = self.started.elapsed().as_secs_f64();
        let text = serde_json::to_string_pretty(&self.manifest).expect("manifest serialises") + "\n";
        match &self.out {
            Some(dir) => {
                let path = dir.join("manifest.json");
                std::fs::write(&path, text).map_err(|source| CliError::Io { path, source })
            }
            None => {
                eprint!("{text}");
                Ok(())
            }
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("artifact serialises") + "\n"
}
