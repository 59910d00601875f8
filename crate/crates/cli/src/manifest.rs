use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::CliError;

/// Description of one run: enough to reproduce its output exactly.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub params: Value,
    pub seed: Option<u64>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &'static str, params: Value, out: &Option<PathBuf>) -> Self {
        RunManifest {
            tool: "bsglab",
            version: env!("CARGO_PKG_VERSION"),
            command,
            params,
            seed: None,
            outputs: vec![out_name(out)],
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

fn out_name(out: &Option<PathBuf>) -> String {
    match out {
        Some(p) if p != Path::new("-") => p.display().to_string(),
        _ => "-".to_string(),
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("{}: {e}", path.display()))
}

/// Where a command's main output goes.
pub enum Sink {
    Stdout,
    File(PathBuf),
}

impl Sink {
    pub fn from_arg(out: &Option<PathBuf>) -> Self {
        match out {
            Some(p) if p != Path::new("-") => Sink::File(p.clone()),
            _ => Sink::Stdout,
        }
    }

    /// Writes `body`. When the manifest is not embedded in `body`, it is
    /// written next to the output file, or to stderr for stdout output.
    pub fn emit(&self, body: &str, manifest: &RunManifest, embedded: bool) -> Result<(), CliError> {
        let side = || serde_json::to_string_pretty(manifest).expect("manifest serializes");
        match self {
            Sink::Stdout => {
                let mut out = io::stdout().lock();
                out.write_all(body.as_bytes())
                    .and_then(|_| out.flush())
                    .map_err(|e| CliError::Io(format!("stdout: {e}")))?;
                if !embedded {
                    eprintln!("manifest: {}", serde_json::to_string(manifest).expect("manifest serializes"));
                }
            }
            Sink::File(path) => {
                fs::write(path, body).map_err(io_err(path))?;
                if !embedded {
                    let mpath = manifest_path(path);
                    fs::write(&mpath, side() + "\n").map_err(io_err(&mpath))?;
                }
            }
        }
        Ok(())
    }
}

pub fn manifest_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

/// `{"manifest": ..., <fields of result>}` as pretty JSON.
pub fn embed<T: Serialize>(manifest: &RunManifest, result: &T) -> String {
    let mut doc = serde_json::Map::new();
    doc.insert("manifest".into(), serde_json::to_value(manifest).expect("manifest serializes"));
    match serde_json::to_value(result).expect("result serializes") {
        Value::Object(fields) => doc.extend(fields),
        other => {
            doc.insert("result".into(), other);
        }
    }
    serde_json::to_string_pretty(&Value::Object(doc)).expect("json") + "\n"
}
