use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

use noisy_local::circuit::RNG_NAME;

/// Bumped whenever a record layout changes.
pub const SCHEMA_VERSION: u32 = 1;
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Serialize)]
struct Record<'a, T: Serialize> {
    schema: u32,
    kind: &'a str,
    version: &'a str,
    rng: &'a str,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    circuit_hash: Option<&'a str>,
    #[serde(flatten)]
    body: T,
}

/// Line-delimited JSON sink with the provenance header on every record.
pub struct Sink {
    out: Box<dyn Write>,
    path: Option<PathBuf>,
}

impl Sink {
    pub fn open(path: Option<&Path>) -> Result<Self> {
        let out: Box<dyn Write> = match path {
            Some(p) => {
                if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                }
                Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?))
            }
            None => Box::new(BufWriter::new(io::stdout())),
        };
        Ok(Self { out, path: path.map(Path::to_path_buf) })
    }

    pub fn record<T: Serialize>(&mut self, kind: &str, seed: u64, circuit_hash: Option<&str>, body: T) -> Result<()> {
        let rec = Record { schema: SCHEMA_VERSION, kind, version: VERSION, rng: RNG_NAME, seed, circuit_hash, body };
        serde_json::to_writer(&mut self.out, &rec)?;
        self.out.write_all(b"\n")?;
        Ok(())
    }

    pub fn line(&mut self, text: &str) -> Result<()> {
        self.out.write_all(text.as_bytes())?;
        self.out.write_all(b"\n")?;
        Ok(())
    }

    /// Flush and, for file outputs, write `<path>.meta.json` holding the
    /// run metadata and the wall-clock timestamp.
    pub fn finish(mut self, meta: Value) -> Result<()> {
        self.out.flush()?;
        if let Some(path) = &self.path {
            let created = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
            let mut meta = meta;
            if let Value::Object(map) = &mut meta {
                map.insert("schema".into(), SCHEMA_VERSION.into());
                map.insert("version".into(), VERSION.into());
                map.insert("rng".into(), RNG_NAME.into());
                map.insert("created_unix".into(), created.into());
            }
            let side = sidecar_path(path);
            fs::write(&side, serde_json::to_string_pretty(&meta)? + "\n")
                .with_context(|| format!("writing {}", side.display()))?;
        }
        Ok(())
    }
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}
