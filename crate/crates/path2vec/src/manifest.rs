//! Flat JSON record of a command run: config, input digests, seed, version
//! and duration.

use std::path::Path;
use std::time::Duration;

use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default)]
pub struct RunManifest {
    fields: Map<String, Value>,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|source| Error::File {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(format!("{:x}", Sha256::digest(&bytes)))
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        let mut m = Self::default();
        m.set("command", command);
        m.set("version", env!("CARGO_PKG_VERSION"));
        m
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.fields.insert(key.to_string(), value.into());
        self
    }

    /// Records `input.<name>` and `input.<name>.sha256`.
    pub fn input(&mut self, name: &str, path: &Path) -> Result<&mut Self> {
        let digest = sha256_file(path)?;
        self.set(&format!("input.{name}"), path.display().to_string());
        self.set(&format!("input.{name}.sha256"), digest);
        Ok(self)
    }

    pub fn finish(&mut self, elapsed: Duration) -> &mut Self {
        self.set("duration_seconds", elapsed.as_secs_f64())
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.get(key)
    }

    pub fn to_json(&self) -> String {
        Value::Object(self.fields.clone()).to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_tracks_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f");
        std::fs::write(&p, "abc").unwrap();
        let a = sha256_file(&p).unwrap();
        assert_eq!(
            a,
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        std::fs::write(&p, "abd").unwrap();
        assert_ne!(sha256_file(&p).unwrap(), a);
    }

    #[test]
    fn manifest_is_flat_json() {
        let mut m = RunManifest::new("train");
        m.set("seed", 7u64).set("config.dim", 64u64);
        let v: Value = serde_json::from_str(&m.to_json()).unwrap();
        assert_eq!(v["command"], "train");
        assert_eq!(v["config.dim"], 64);
        assert!(v.as_object().unwrap().values().all(|x| !x.is_object()));
    }
}
