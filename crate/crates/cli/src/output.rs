//! Result files: hashing, seeding, atomic writes and error reporting.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Bumped whenever a column or JSON field changes meaning.
pub const SCHEMA: u32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("grid point {point} failed: {message}")]
    PointFailed { point: String, message: String },
    #[error("{0}")]
    Simulation(String),
    #[error("{0}")]
    Check(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Io { .. } => "io",
            CliError::Parse { .. } => "parse",
            CliError::PointFailed { .. } => "point_failed",
            CliError::Simulation(_) => "simulation",
            CliError::Check(_) => "check_failed",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Check(_) => 1,
            CliError::Config(_) => 2,
            CliError::Io { .. } | CliError::Parse { .. } => 3,
            CliError::PointFailed { .. } | CliError::Simulation(_) => 4,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "error": self.kind(), "message": self.to_string() })
    }

    fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

fn sha(bytes: &[u8]) -> [u8; 32] {
    Sha256::digest(bytes).into()
}

/// First 16 hex digits of the SHA-256 of the JSON form of `value`.
pub fn hash_of<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("config serialises");
    hex::encode(&sha(&bytes)[..8])
}

/// Seed for one grid point, derived from the master seed and the point's
/// identity so that adding points never shifts the others.
pub fn point_seed(master: u64, point_hash: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update(point_hash.as_bytes());
    let d: [u8; 32] = h.finalize().into();
    u64::from_le_bytes(d[..8].try_into().expect("8 bytes"))
}

/// Writes through a temporary file in the same directory and renames it
/// over the target.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let mut f = fs::File::create(&tmp).map_err(|e| CliError::io(&tmp, e))?;
    f.write_all(bytes).map_err(|e| CliError::io(&tmp, e))?;
    f.sync_all().map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

/// CSV with a block of `# ` comment lines in front.
pub fn csv_bytes<R: Serialize>(preamble: &[String], rows: &[R]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    for line in preamble {
        out.extend_from_slice(b"# ");
        out.extend_from_slice(line.as_bytes());
        out.push(b'\n');
    }
    let mut w = csv::Writer::from_writer(&mut out);
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Simulation(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Simulation(e.to_string()))?;
    drop(w);
    Ok(out)
}

pub fn write_csv<R: Serialize>(path: &Path, preamble: &[String], rows: &[R]) -> Result<()> {
    write_atomic(path, &csv_bytes(preamble, rows)?)
}

pub fn read_csv<R: DeserializeOwned>(path: &Path) -> Result<Vec<R>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let body: String = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .flat_map(|l| [l, "\n"])
        .collect();
    let mut r = csv::Reader::from_reader(body.as_bytes());
    r.deserialize()
        .collect::<std::result::Result<Vec<R>, _>>()
        .map_err(|e| CliError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
}

/// Rows of an earlier run at `path`, or none if it does not exist.
pub fn read_existing<R: DeserializeOwned>(path: &Path) -> Result<Vec<R>> {
    if path.exists() {
        read_csv(path)
    } else {
        Ok(Vec::new())
    }
}

pub fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(value).expect("report serialises");
    v.push(b'\n');
    v
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, &json_bytes(value))
}

/// Worker count: the explicit flag, then `QSEGSIM_WORKERS`, then rayon's
/// default.
pub fn workers(flag: Option<usize>) -> Result<Option<usize>> {
    if let Some(w) = flag {
        return Ok(Some(w));
    }
    match std::env::var("QSEGSIM_WORKERS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| CliError::Config(format!("QSEGSIM_WORKERS={v} is not a count"))),
        Err(_) => Ok(None),
    }
}

/// Runs `f` inside a pool of the requested size.
pub fn with_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == Some(0) {
        return Err(CliError::Config("worker count must be positive".into()));
    }
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        b = b.num_threads(w);
    }
    let pool = b.build().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(pool.install(f))
}

/// Runs one grid point, turning a panic into [`CliError::PointFailed`].
pub fn guarded<T>(point: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
    match std::panic::catch_unwind(std::panic::AssertUnwindSafe(f)) {
        Ok(r) => r,
        Err(p) => {
            let message = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "worker panicked".into());
            Err(CliError::PointFailed {
                point: point.into(),
                message,
            })
        }
    }
}
