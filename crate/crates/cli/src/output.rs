//! Output files. Every file starts with the config hash and versions.

use crate::error::CliError;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

pub struct Output {
    dir: PathBuf,
    hash: String,
}

/// SHA-256 of the canonical JSON form of the configuration.
pub fn config_hash<T: Serialize>(config: &T) -> String {
    let canonical = serde_json::to_vec(&serde_json::to_value(config).expect("config serializes")).expect("value serializes");
    hex::encode(Sha256::digest(canonical))
}

impl Output {
    pub fn new(dir: &Path, hash: String) -> Result<Output, CliError> {
        fs::create_dir_all(dir)?;
        Ok(Output { dir: dir.to_path_buf(), hash })
    }

    pub fn header(&self) -> Value {
        json!({
            "config_sha256": self.hash,
            "versions": { "enclosure": enclosure::VERSION, "enclosure-cli": env!("CARGO_PKG_VERSION") },
        })
    }

    /// CSV with a `#` comment line carrying the header, then whatever `body` writes.
    pub fn csv<F>(&self, name: &str, body: F) -> Result<PathBuf, CliError>
    where
        F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
    {
        let mut buf = Vec::new();
        writeln!(
            buf,
            "# config_sha256={} enclosure={} enclosure-cli={}",
            self.hash,
            enclosure::VERSION,
            env!("CARGO_PKG_VERSION")
        )?;
        body(&mut buf)?;
        let path = self.dir.join(name);
        fs::write(&path, buf)?;
        Ok(path)
    }

    /// JSON object with the header under "header".
    pub fn json(&self, name: &str, mut body: Value) -> Result<PathBuf, CliError> {
        if let Value::Object(m) = &mut body {
            m.insert("header".into(), self.header());
        }
        let mut text = serde_json::to_string_pretty(&body).expect("value serializes");
        text.push('\n');
        let path = self.dir.join(name);
        fs::write(&path, text)?;
        Ok(path)
    }
}
