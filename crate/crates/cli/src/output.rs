use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use lissajous_core::verify::format_float;
use serde::Serialize;

use crate::error::CliError;

pub const UNITS: &str = "natural: m=omega=hbar=1";

/// Fixed 17-significant-digit form; `-0` prints as `0`.
pub fn num(v: f64) -> String {
    format_float(v)
}

/// Line-oriented writer that keeps a CRC-32 of everything written.
pub struct ChecksummedWriter {
    path: PathBuf,
    inner: BufWriter<File>,
    crc: crc32fast::Hasher,
}

impl ChecksummedWriter {
    pub fn create(path: &Path) -> Result<Self, CliError> {
        let file = File::create(path).map_err(|e| CliError::io(path, e))?;
        Ok(Self {
            path: path.to_path_buf(),
            inner: BufWriter::new(file),
            crc: crc32fast::Hasher::new(),
        })
    }

    pub fn line(&mut self, s: &str) -> Result<(), CliError> {
        self.crc.update(s.as_bytes());
        self.crc.update(b"\n");
        self.inner
            .write_all(s.as_bytes())
            .and_then(|_| self.inner.write_all(b"\n"))
            .map_err(|e| CliError::io(&self.path, e))
    }

    /// Flushes and returns the checksum as eight lowercase hex digits.
    pub fn finish(mut self) -> Result<String, CliError> {
        self.inner.flush().map_err(|e| CliError::io(&self.path, e))?;
        Ok(format!("{:08x}", self.crc.finalize()))
    }
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_os_string();
    s.push(".json");
    PathBuf::from(s)
}

#[derive(Serialize)]
struct Sidecar<'a, C: Serialize, E: Serialize> {
    config: &'a C,
    version: &'static str,
    units: &'static str,
    checksum: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<&'a E>,
}

pub fn write_sidecar<C: Serialize, E: Serialize>(
    data_path: &Path,
    config: &C,
    checksum: String,
    report: Option<&E>,
) -> Result<(), CliError> {
    let path = sidecar_path(data_path);
    let sidecar = Sidecar {
        config,
        version: env!("CARGO_PKG_VERSION"),
        units: UNITS,
        checksum,
        report,
    };
    let mut text = serde_json::to_string_pretty(&sidecar).map_err(|e| CliError::Usage(e.to_string()))?;
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))
}
