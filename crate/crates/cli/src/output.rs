//! JSON with 17 significant digits, atomic file writes and run manifests.

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const SCHEMA: &str = "v1";

struct SigFigs;

impl Formatter for SigFigs {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        write!(w, "{v:.16e}")
    }
}

/// Compact JSON, floats as `d.dddddddddddddddde±x`, newline-terminated.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    value.serialize(&mut serde_json::Serializer::with_formatter(&mut buf, SigFigs))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf)?)
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// Collects a command's output files and records them in
/// `<command>-manifest.json`.
pub struct Run {
    command: &'static str,
    parameters: Value,
    seed: Option<u64>,
    dir: PathBuf,
    outputs: Vec<Value>,
}

impl Run {
    pub fn new<P: Serialize>(command: &'static str, parameters: &P, seed: Option<u64>, dir: &Path) -> Result<Self> {
        Ok(Run { command, parameters: serde_json::to_value(parameters)?, seed, dir: dir.to_path_buf(), outputs: Vec::new() })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        write_atomic(&path, bytes)?;
        self.outputs.push(json!({
            "path": path.display().to_string(),
            "sha256": hex::encode(Sha256::digest(bytes)),
        }));
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<String> {
        let text = to_json(value)?;
        self.write(name, text.as_bytes())?;
        Ok(text)
    }

    pub fn finish(self) -> Result<()> {
        let manifest = json!({
            "schema": SCHEMA,
            "command": self.command,
            "parameters": self.parameters,
            "seed": self.seed,
            "tool_version": circum_core::VERSION,
            "outputs": self.outputs,
        });
        write_atomic(&self.dir.join(format!("{}-manifest.json", self.command)), to_json(&manifest)?.as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_seventeen_digits() {
        let s = to_json(&json!({"x": 0.1, "n": 3, "y": -2.5e-300, "z": 1.0})).unwrap();
        assert_eq!(s, "{\"x\":1.0000000000000001e-1,\"n\":3,\"y\":-2.5000000000000000e-300,\"z\":1.0000000000000000e0}\n");
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["x"].as_f64(), Some(0.1));
    }

    #[test]
    fn manifest_records_hashes() {
        let dir = tempfile::tempdir().unwrap();
        let mut run = Run::new("demo", &json!({"k": 1}), Some(7), dir.path()).unwrap();
        run.write("a.txt", b"abc").unwrap();
        run.finish().unwrap();
        let m: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("demo-manifest.json")).unwrap()).unwrap();
        assert_eq!(m["schema"], "v1");
        assert_eq!(m["seed"], 7);
        assert_eq!(m["outputs"][0]["sha256"], "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
