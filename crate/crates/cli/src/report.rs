//! Report assembly: every subcommand produces one `Report`, printed as text
//! or JSON. Identical configuration and seed produce byte-identical JSON.

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Outcome of one command. `ok` drives the exit status; exploratory
/// computations leave `ok` unset and report `status: "open"` instead.
pub struct Report {
    pub command: String,
    pub ok: Option<bool>,
    pub status: Option<String>,
    pub witnesses: Vec<String>,
    pub tables: Map<String, Value>,
    pub input_hash: String,
    pub seed: Option<u64>,
    /// human-readable lines for the text renderer
    pub lines: Vec<String>,
}

impl Report {
    pub fn new(command: &str, input: &str) -> Report {
        let mut hasher = Sha256::new();
        hasher.update(input.as_bytes());
        let hash = hasher.finalize();
        Report {
            command: command.to_string(),
            ok: None,
            status: None,
            witnesses: Vec::new(),
            tables: Map::new(),
            input_hash: format!("{:x}", hash),
            seed: None,
            lines: Vec::new(),
        }
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    pub fn witness(&mut self, s: impl Into<String>) {
        self.witnesses.push(s.into());
    }

    pub fn table(&mut self, key: &str, value: Value) {
        self.tables.insert(key.to_string(), value);
    }

    /// Exit 0 exactly when ok is true or the status is "open".
    pub fn exit_code(&self) -> i32 {
        match (&self.ok, &self.status) {
            (Some(true), _) => 0,
            (None, Some(s)) if s == "open" => 0,
            (None, None) => 0,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("command".into(), json!(self.command));
        match (&self.ok, &self.status) {
            (Some(ok), _) => {
                obj.insert("ok".into(), json!(ok));
            }
            (None, Some(status)) => {
                obj.insert("status".into(), json!(status));
            }
            (None, None) => {
                obj.insert("ok".into(), json!(true));
            }
        }
        obj.insert("witnesses".into(), json!(self.witnesses));
        obj.insert("tables".into(), Value::Object(self.tables.clone()));
        obj.insert("version".into(), json!(VERSION));
        obj.insert("input_hash".into(), json!(self.input_hash));
        if let Some(seed) = self.seed {
            obj.insert("seed".into(), json!(seed));
        }
        Value::Object(obj)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("== {} ==\n", self.command));
        for l in &self.lines {
            out.push_str(l);
            out.push('\n');
        }
        if !self.witnesses.is_empty() {
            out.push_str("witnesses:\n");
            for w in &self.witnesses {
                out.push_str("  ");
                out.push_str(w);
                out.push('\n');
            }
        }
        match (&self.ok, &self.status) {
            (Some(true), _) => out.push_str("result: ok\n"),
            (Some(false), _) => out.push_str("result: FAILED\n"),
            (None, Some(s)) => out.push_str(&format!("status: {}\n", s)),
            (None, None) => out.push_str("result: ok\n"),
        }
        out
    }
}
