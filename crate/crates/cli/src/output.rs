use std::fmt;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

/// Failure classes, each with its own exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or arguments (exit 2).
    Usage(String),
    /// Unreadable or malformed input file, unwritable output (exit 3).
    Input(String),
    /// Parameters outside an operation's domain (exit 4).
    Domain(String),
    /// A search ran to completion without a result (exit 1).
    NoResult(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::NoResult(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Input(_) => 3,
            Failure::Domain(_) => 4,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::NoResult(_) => "no_result",
            Failure::Usage(_) => "usage",
            Failure::Input(_) => "input",
            Failure::Domain(_) => "domain",
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::NoResult(m) | Failure::Usage(m) | Failure::Input(m) | Failure::Domain(m) => m,
        }
    }

    pub fn to_json(&self) -> String {
        json!({ "error": self.kind(), "code": self.exit_code(), "message": self.message() }).to_string()
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind(), self.message())
    }
}

impl From<epsnet::Error> for Failure {
    fn from(e: epsnet::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

pub type CliResult<T> = Result<T, Failure>;

/// Tool name, version, subcommand, full configuration and seed.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: Value,
    pub seed: Option<u64>,
}

impl Provenance {
    pub fn new<C: Serialize>(command: &'static str, config: &C, seed: Option<u64>) -> Self {
        Provenance {
            tool: "epsnet",
            version: env!("CARGO_PKG_VERSION"),
            command,
            config: serde_json::to_value(config).expect("configs serialize"),
            seed,
        }
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path, what: &str) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {what} {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("malformed {what} {}: {e}", path.display())))
}

/// Serializes `artifact` as a JSON object with a `provenance` member.
pub fn with_provenance<T: Serialize>(artifact: &T, prov: &Provenance) -> Value {
    let mut v = serde_json::to_value(artifact).expect("artifacts serialize");
    if let Value::Object(m) = &mut v {
        m.insert("provenance".into(), serde_json::to_value(prov).expect("provenance serializes"));
    }
    v
}

fn write_text(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Writes pretty JSON to `path`, or to stdout without one.
pub fn emit_json(path: Option<&Path>, v: &Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(v).expect("values serialize");
    text.push('\n');
    write_text(path, &text)
}

/// Writes CSV preceded by a `#` comment line carrying the provenance.
pub fn emit_csv(path: Option<&Path>, csv: &str, prov: &Provenance) -> CliResult<()> {
    let head = serde_json::to_string(prov).expect("provenance serializes");
    write_text(path, &format!("# {head}\n{csv}"))
}
