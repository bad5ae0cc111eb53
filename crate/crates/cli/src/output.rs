//! Writers: fixed-precision numbers, CSV tables, JSON sidecars and the run
//! manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::CliError;

/// Twelve significant digits in scientific notation.
pub fn sci(x: f64) -> String {
    format!("{x:.11e}")
}

/// A float serialized into JSON as a scientific-notation literal with
/// twelve significant digits; non-finite values become `null`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sci(pub f64);

impl Serialize for Sci {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = serde_json::value::RawValue::from_string(sci(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

/// Collects output files and their digests for the manifest.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    files: Vec<OutputFile>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputFile {
    pub file: String,
    pub sha256: String,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(Self { root: root.to_path_buf(), files: Vec::new() })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.root.join(name);
        fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        let digest = Sha256::digest(contents.as_bytes());
        let sha256 = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.files.push(OutputFile { file: name.to_string(), sha256 });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, &text)
    }

    /// Writes `manifest.json`, which lists every file written so far.
    pub fn finish(self, subcommand: &str, config: serde_json::Value, seed: Option<u64>) -> Result<PathBuf, CliError> {
        let manifest = RunManifest {
            subcommand: subcommand.to_string(),
            config,
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            outputs: self.files,
        };
        let path = self.root.join("manifest.json");
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}

/// Provenance of one run.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub tool_version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub outputs: Vec<OutputFile>,
}

/// Comma-separated table with a header row.
pub fn csv<R: AsRef<[String]>>(header: &[&str], rows: &[R]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.as_ref().join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sci(0.5641895835477563), "5.64189583548e-1");
        assert_eq!(sci(-1.0), "-1.00000000000e0");
        assert_eq!(serde_json::to_string(&Sci(0.25)).unwrap(), "2.50000000000e-1");
        assert_eq!(serde_json::to_string(&Sci(f64::NAN)).unwrap(), "null");
        let v: f64 = serde_json::from_str(&serde_json::to_string(&Sci(1.5e-300)).unwrap()).unwrap();
        assert_eq!(v, 1.5e-300);
    }

    #[test]
    fn csv_layout() {
        let rows = vec![vec!["1".to_string(), "2".to_string()]];
        assert_eq!(csv(&["a", "b"], &rows), "a,b\n1,2\n");
    }
}
