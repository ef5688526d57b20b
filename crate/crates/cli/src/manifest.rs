use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};

/// Run record written next to every output file. Result files stay
/// deterministic; wall-clock data lives only here.
#[derive(Debug, Serialize)]
pub struct Manifest {
    tool: &'static str,
    version: &'static str,
    command: String,
    arguments: Value,
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    results: Value,
    started_unix: u64,
    elapsed_seconds: f64,
    #[serde(skip)]
    clock: Option<Instant>,
}

impl Manifest {
    pub fn start(command: &str, arguments: impl Serialize) -> Self {
        Manifest {
            tool: "fdmap",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            arguments: serde_json::to_value(arguments).unwrap_or(Value::Null),
            inputs: Vec::new(),
            outputs: Vec::new(),
            results: json!({}),
            started_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
            elapsed_seconds: 0.0,
            clock: Some(Instant::now()),
        }
    }

    pub fn input(&mut self, path: &Path) {
        self.inputs.push(path.to_path_buf());
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.to_path_buf());
    }

    pub fn result(&mut self, key: &str, value: impl Serialize) {
        if let Value::Object(map) = &mut self.results {
            map.insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
        }
    }

    /// Stamp the elapsed time and write to `path`.
    pub fn finish(mut self, path: &Path) -> fdmap::Result<()> {
        self.elapsed_seconds = self.clock.map_or(0.0, |c| c.elapsed().as_secs_f64());
        fs::write(path, serde_json::to_string_pretty(&self)? + "\n")?;
        Ok(())
    }
}

/// `out/name.csv` → `out/name.manifest.json`.
pub fn manifest_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("run");
    out.with_file_name(format!("{stem}.manifest.json"))
}
