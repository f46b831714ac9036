//! Output routing and the run manifest.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// What a command produced: an optional table, a structured value, human
/// summary lines and, for checking commands, whether the check passed.
pub struct Output {
    pub table: Option<String>,
    pub json: serde_json::Value,
    pub summary: Vec<String>,
    pub passed: Option<bool>,
    pub warnings: Vec<String>,
    /// Write both the table and the JSON regardless of `--format`.
    pub both: bool,
}

impl Output {
    pub fn new(json: impl Serialize) -> Self {
        Self {
            table: None,
            json: serde_json::to_value(json).expect("plain data"),
            summary: Vec::new(),
            passed: None,
            warnings: Vec::new(),
            both: false,
        }
    }

    pub fn table(mut self, csv: String) -> Self {
        self.table = Some(csv);
        self
    }

    pub fn line(mut self, s: impl Into<String>) -> Self {
        self.summary.push(s.into());
        self
    }

    pub fn check(mut self, passed: bool) -> Self {
        self.passed = Some(passed);
        self
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    arguments: &'a [String],
    /// SHA-256 of every input file, by path as given.
    inputs: &'a BTreeMap<String, String>,
    seed: u64,
    started_unix: f64,
    elapsed_seconds: f64,
    status: &'static str,
    warnings: &'a [String],
    outputs: &'a [String],
}

pub struct Run {
    command: String,
    arguments: Vec<String>,
    inputs: BTreeMap<String, String>,
    pub seed: u64,
    started: SystemTime,
    clock: Instant,
}

impl Run {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            arguments: std::env::args().skip(1).collect(),
            inputs: BTreeMap::new(),
            seed: 0,
            started: SystemTime::now(),
            clock: Instant::now(),
        }
    }

    /// Reads an input file and records its hash.
    pub fn read_input(&mut self, path: &Path) -> Result<String> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.inputs.insert(path.display().to_string(), hex::encode(Sha256::digest(&bytes)));
        String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))
    }

    /// Writes the outputs, or prints them when there is no output directory.
    /// Summary lines go to stdout with an output directory and to stderr otherwise.
    pub fn finish(self, out: &Output, out_dir: Option<&Path>, format: Format) -> Result<()> {
        let manifest_name = format!("{}.manifest.json", self.command);
        let json_body = |with_manifest: bool| {
            let mut v = out.json.clone();
            if with_manifest {
                if let serde_json::Value::Object(m) = &mut v {
                    m.insert("manifest".into(), manifest_name.clone().into());
                }
            }
            let mut s = serde_json::to_string_pretty(&v).expect("plain data");
            s.push('\n');
            s
        };
        let want_table = out.table.is_some() && (format == Format::Csv || out.both);
        let want_json = out.table.is_none() || format == Format::Json || out.both;

        let Some(dir) = out_dir else {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            if want_table {
                lock.write_all(out.table.as_deref().unwrap_or_default().as_bytes())?;
            }
            if want_json {
                lock.write_all(json_body(false).as_bytes())?;
            }
            for s in &out.summary {
                eprintln!("{s}");
            }
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            return Ok(());
        };

        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let mut outputs = Vec::new();
        if want_table {
            let name = format!("{}.csv", self.command);
            let body = format!("# manifest: {manifest_name}\n{}", out.table.as_deref().unwrap_or_default());
            write_atomic(&dir.join(&name), body.as_bytes())?;
            outputs.push(name);
        }
        if want_json {
            let name = format!("{}.json", self.command);
            write_atomic(&dir.join(&name), json_body(true).as_bytes())?;
            outputs.push(name);
        }
        let status = match out.passed {
            Some(true) => "passed",
            Some(false) => "failed",
            None => "ok",
        };
        let manifest = Manifest {
            tool: "algebroid",
            version: env!("CARGO_PKG_VERSION"),
            command: &self.command,
            arguments: &self.arguments,
            inputs: &self.inputs,
            seed: self.seed,
            started_unix: self.started.duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0),
            elapsed_seconds: self.clock.elapsed().as_secs_f64(),
            status,
            warnings: &out.warnings,
            outputs: &outputs,
        };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        write_atomic(&dir.join(&manifest_name), text.as_bytes())?;
        for s in &out.summary {
            println!("{s}");
        }
        for w in &out.warnings {
            eprintln!("warning: {w}");
        }
        Ok(())
    }
}

/// Writes to a temporary file in the same directory, then renames over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp: PathBuf = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    {
        let mut f = fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).with_context(|| format!("renaming onto {}", path.display()))?;
    Ok(())
}
