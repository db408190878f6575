//! Run manifest and manifest-stamped output files.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use circadia::dynamics::TrajectoryRecord;
use circadia::table::SweepTable;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::failure::Failure;

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Identity of a run: everything that determines the output bytes.
#[derive(Debug, Serialize)]
struct RunIdentity<'a> {
    command: &'a str,
    tool_version: &'a str,
    /// Role → SHA-256 of the input contents.
    inputs: &'a BTreeMap<String, String>,
    parameters: &'a serde_json::Value,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub hash: String,
    pub command: String,
    pub tool_version: String,
    pub inputs: BTreeMap<String, String>,
    pub parameters: serde_json::Value,
    pub outputs: Vec<String>,
    /// Kept out of the hash and out of every data file.
    pub wall_time_s: f64,
}

/// Collects the inputs of a run, then writes outputs stamped with the
/// manifest hash.
pub struct Run {
    command: String,
    inputs: BTreeMap<String, String>,
    parameters: serde_json::Value,
    dir: PathBuf,
    hash: Option<String>,
    outputs: Vec<String>,
    started: Instant,
}

impl Run {
    pub fn new(command: &str, parameters: serde_json::Value, dir: &Path) -> Self {
        Self {
            command: command.to_string(),
            inputs: BTreeMap::new(),
            parameters,
            dir: dir.to_path_buf(),
            hash: None,
            outputs: Vec::new(),
            started: Instant::now(),
        }
    }

    /// Reads an input file and records its digest under `role`.
    pub fn read_input(&mut self, role: &str, path: &Path) -> Result<Vec<u8>, Failure> {
        let bytes = fs::read(path)
            .map_err(|e| Failure::Usage(format!("cannot read {role} {}: {e}", path.display())))?;
        self.record_input(role, &bytes);
        Ok(bytes)
    }

    pub fn record_input(&mut self, role: &str, bytes: &[u8]) {
        assert!(self.hash.is_none(), "inputs are frozen once outputs start");
        self.inputs.insert(role.to_string(), sha256_hex(bytes));
    }

    pub fn hash(&mut self) -> String {
        if let Some(h) = &self.hash {
            return h.clone();
        }
        let id = RunIdentity {
            command: &self.command,
            tool_version: env!("CARGO_PKG_VERSION"),
            inputs: &self.inputs,
            parameters: &self.parameters,
        };
        let h = sha256_hex(&serde_json::to_vec(&id).expect("identity serializes"));
        self.hash = Some(h.clone());
        h
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf, Failure> {
        fs::create_dir_all(&self.dir)?;
        let path = self.dir.join(name);
        fs::write(&path, bytes)?;
        if !self.outputs.iter().any(|o| o == name) {
            self.outputs.push(name.to_string());
        }
        Ok(path)
    }

    fn comments(&mut self) -> Vec<(String, String)> {
        vec![
            ("manifest".to_string(), self.hash()),
            ("command".to_string(), self.command.clone()),
        ]
    }

    pub fn table(&mut self, name: &str, table: &SweepTable) -> Result<PathBuf, Failure> {
        let comments = self.comments();
        let text = table.to_csv_string(&comments)?;
        self.write(name, text.as_bytes())
    }

    pub fn trajectory(
        &mut self,
        name: &str,
        rec: &TrajectoryRecord,
        spec: &serde_json::Value,
    ) -> Result<PathBuf, Failure> {
        let mut buf = Vec::new();
        for (k, v) in self.comments() {
            buf.extend_from_slice(format!("# {k}={v}\n").as_bytes());
        }
        buf.extend_from_slice(format!("# spec={}\n", serde_json::to_string(spec)?).as_bytes());
        rec.write_csv(&mut buf)?;
        self.write(name, &buf)
    }

    pub fn svg(&mut self, name: &str, body: String) -> Result<PathBuf, Failure> {
        let stamped = body.replacen(
            "<svg ",
            &format!("<!-- manifest={} -->\n<svg ", self.hash()),
            1,
        );
        self.write(name, stamped.as_bytes())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf, Failure> {
        let mut v = serde_json::to_value(value)?;
        if let serde_json::Value::Object(map) = &mut v {
            map.insert("manifest".to_string(), self.hash().into());
        }
        let mut text = serde_json::to_string_pretty(&v)?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    /// Writes `manifest.json` when the run produced any output.
    pub fn finish(mut self) -> Result<Option<RunManifest>, Failure> {
        if self.outputs.is_empty() {
            return Ok(None);
        }
        let manifest = RunManifest {
            hash: self.hash(),
            command: self.command.clone(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            inputs: self.inputs.clone(),
            parameters: self.parameters.clone(),
            outputs: self.outputs.clone(),
            wall_time_s: self.started.elapsed().as_secs_f64(),
        };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        fs::create_dir_all(&self.dir)?;
        fs::write(self.dir.join("manifest.json"), text)?;
        Ok(Some(manifest))
    }
}
