//! Run directories and stamped artifacts.
//!
//! Every CSV starts with one `#` line carrying the tool version and command;
//! everything after it (the body) depends only on scenario and seed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Fresh `<base>/<command>-<UTC timestamp>[-k]` unless `explicit` is given,
/// in which case that directory is used (and created) as is.
pub fn run_dir(explicit: Option<&Path>, base: &Path, command: &str) -> Result<PathBuf, CliError> {
    if let Some(dir) = explicit {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        return Ok(dir.to_path_buf());
    }
    fs::create_dir_all(base).map_err(|e| CliError::io(base, e))?;
    let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%S%.3fZ");
    for k in 0.. {
        let name = if k == 0 { format!("{command}-{stamp}") } else { format!("{command}-{stamp}-{k}") };
        let dir = base.join(name);
        match fs::create_dir(&dir) {
            Ok(()) => return Ok(dir),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(CliError::io(&dir, e)),
        }
    }
    unreachable!("unbounded suffix search")
}

pub fn stamp_line(command: &str, scenario: &str) -> String {
    format!("# hklab {VERSION} command={command} scenario={scenario}\n")
}

/// Writes `rows` as CSV below the version stamp.
pub fn write_csv<R: Serialize>(path: &Path, stamp: &str, rows: &[R]) -> Result<(), CliError> {
    let mut body = csv::Writer::from_writer(Vec::new());
    for r in rows {
        body.serialize(r)?;
    }
    let body = body.into_inner().map_err(|e| CliError::io(path, e.into_error()))?;
    let mut file = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    file.write_all(stamp.as_bytes()).map_err(|e| CliError::io(path, e))?;
    file.write_all(&body).map_err(|e| CliError::io(path, e))?;
    Ok(())
}

pub fn write_json<V: Serialize + ?Sized>(path: &Path, value: &V) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Everything after the stamp line.
pub fn csv_body(text: &str) -> &str {
    match text.strip_prefix('#') {
        Some(rest) => rest.split_once('\n').map_or("", |(_, body)| body),
        None => text,
    }
}

/// Vertex ids are free-form; keep file names portable.
pub fn file_safe(id: &str) -> String {
    id.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' { c } else { '_' }).collect()
}
