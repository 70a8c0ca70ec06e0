use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::config::Command;
use crate::run::Artifacts;

pub const VERSION: &str = concat!("graded-weyl ", env!("CARGO_PKG_VERSION"));

pub const LEDGER_HEADER: &str = "config_hash,command,version,status,exit_code,cache,detail";

/// Canonical text of a run: command, then the resolved configuration.
pub fn canonical_run(command: Command, config: &str) -> String {
    format!("command = \"{}\"\n{config}", command.name())
}

/// SHA-256 of the canonical run text and the toolkit version.
pub fn config_hash(canonical: &str) -> String {
    let mut h = Sha256::new();
    h.update(canonical.as_bytes());
    h.update(b"\n");
    h.update(VERSION.as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Directory name of a run.
pub fn short_hash(hash: &str) -> &str {
    &hash[..16]
}

fn metadata(hash: &str) -> String {
    format!("# {VERSION}\n# config {hash}\n")
}

/// File names and contents of a finished run, each stamped with the
/// version and configuration hash.
pub fn render(artifacts: &Artifacts, hash: &str, canonical: &str) -> Vec<(String, String)> {
    let meta = metadata(hash);
    let mut summary = format!("{meta}quantity,value,uncertainty\n");
    for (q, v, u) in &artifacts.rows {
        summary.push_str(&format!("{q},{v},{u:e}\n"));
    }
    let mut files = vec![("summary.csv".to_string(), summary), ("config.toml".to_string(), format!("{meta}{canonical}"))];
    if let Some(sv) = &artifacts.singular_values {
        files.push(("singular_values.csv".into(), format!("{meta}{sv}")));
    }
    if let Some(svg) = &artifacts.plot {
        files.push(("plot.svg".into(), format!("<!-- {VERSION} config {hash} -->\n{svg}")));
    }
    for (name, body) in &artifacts.extra {
        files.push((name.clone(), format!("{meta}{body}")));
    }
    files
}

/// Files of a completed run under `dir`, if any.
pub fn cached(dir: &Path) -> Option<Vec<(String, String)>> {
    if !dir.join("summary.csv").is_file() {
        return None;
    }
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).ok()? {
        let path = entry.ok()?.path();
        if path.is_file() {
            let name = path.file_name()?.to_string_lossy().into_owned();
            files.push((name, fs::read_to_string(&path).ok()?));
        }
    }
    files.sort();
    Some(files)
}

/// Writes into a scratch directory and renames it into place, so a
/// directory with `summary.csv` is always complete.
pub fn write_run(dir: &Path, files: &[(String, String)]) -> io::Result<()> {
    let parent = dir.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(parent)?;
    let name = dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let scratch = parent.join(format!(".{name}.partial-{}", std::process::id()));
    if scratch.exists() {
        fs::remove_dir_all(&scratch)?;
    }
    fs::create_dir_all(&scratch)?;
    for (file, body) in files {
        fs::write(scratch.join(file), body)?;
    }
    if dir.exists() {
        fs::remove_dir_all(dir)?;
    }
    fs::rename(&scratch, dir)
}

pub fn cache_root(out: &Path) -> PathBuf {
    match std::env::var_os("GRADED_WEYL_CACHE") {
        Some(p) if !p.is_empty() => PathBuf::from(p),
        _ => out.to_path_buf(),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\"").replace('\n', " "))
    } else {
        s.to_string()
    }
}

/// One ledger line per run.
#[derive(Debug, Clone, PartialEq)]
pub struct LedgerRow {
    pub hash: String,
    pub command: Command,
    pub status: &'static str,
    pub exit_code: i32,
    pub cache: &'static str,
    pub detail: String,
}

pub fn append_ledger(path: &Path, rows: &[LedgerRow]) -> io::Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let fresh = !path.exists();
    let mut f = fs::OpenOptions::new().create(true).append(true).open(path)?;
    if fresh {
        writeln!(f, "{LEDGER_HEADER}")?;
    }
    for r in rows {
        writeln!(f, "{},{},{},{},{},{},{}", r.hash, r.command.name(), VERSION, r.status, r.exit_code, r.cache, csv_field(&r.detail))?;
    }
    Ok(())
}
