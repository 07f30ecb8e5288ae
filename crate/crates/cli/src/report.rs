use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

/// Process exit status paired with its cause.
#[derive(Debug)]
pub enum Failure {
    /// Bad arguments or inputs; exit code 2.
    Invalid(anyhow::Error),
    /// Anything else; exit code 1.
    Internal(anyhow::Error),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Invalid(_) => 2,
            Failure::Internal(_) => 1,
        }
    }

    pub fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Invalid(e) | Failure::Internal(e) => e,
        }
    }
}

pub fn invalid<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Invalid(e.into())
}

pub fn internal<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Internal(e.into())
}

pub type CliResult<T> = Result<T, Failure>;

/// Reads inputs and keeps a running digest of everything read.
pub struct Inputs {
    hasher: Sha256,
    any: bool,
}

impl Inputs {
    pub fn new() -> Self {
        Self { hasher: Sha256::new(), any: false }
    }

    pub fn read(&mut self, path: &Path) -> CliResult<String> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display())).map_err(invalid)?;
        self.hasher.update(&bytes);
        self.any = true;
        String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display())).map_err(invalid)
    }

    /// Hex SHA-256 of the concatenated inputs, or `None` if nothing was read.
    pub fn digest(self) -> Option<String> {
        self.any.then(|| hex::encode(self.hasher.finalize()))
    }
}

pub struct Provenance {
    pub command: String,
    pub seed: u64,
    pub input_sha256: Option<String>,
}

impl Provenance {
    /// `body` with the provenance fields added at the top level.
    pub fn wrap(&self, body: Value) -> Value {
        let mut map = match body {
            Value::Object(m) => m,
            other => {
                let mut m = Map::new();
                m.insert("result".into(), other);
                m
            }
        };
        map.insert("tool".into(), Value::from("topocube"));
        map.insert("version".into(), Value::from(env!("CARGO_PKG_VERSION")));
        map.insert("command".into(), Value::from(self.command.clone()));
        map.insert("seed".into(), Value::from(self.seed));
        map.insert("input_sha256".into(), self.input_sha256.clone().map_or(Value::Null, Value::from));
        Value::Object(map)
    }
}

/// Writes `text` to `out`, or stdout when no path is given.
pub fn emit(out: Option<&PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())).map_err(internal),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}
