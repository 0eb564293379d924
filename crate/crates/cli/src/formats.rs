//! JSON file formats read and written by the command line.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use xnlplab_core::Digraph;

use crate::CliError;

/// Graph with an optional bandwidth limit, as written by the gadget and
/// scheduling reductions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BandwidthInstance {
    pub graph: Digraph,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<usize>,
}

/// Reads a bandwidth instance or a bare graph, told apart by a `graph`
/// field.
pub fn parse_graph_input(text: &str) -> Result<BandwidthInstance, CliError> {
    let value: serde_json::Value = parse_json(text, "graph")?;
    let parsed = if value.get("graph").is_some() {
        serde_json::from_value(value)
    } else {
        serde_json::from_value(value).map(|graph| BandwidthInstance { graph, b: None })
    };
    parsed.map_err(|e| CliError::Parse(format!("graph: {e}")))
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

pub fn parse_json<T: DeserializeOwned>(text: &str, what: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse(format!("{what}: {e}")))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    parse_json(&read_text(path)?, &path.display().to_string())
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("plain data serialises");
    s.push('\n');
    s
}

/// Writes to `path`, or to standard output for `-`.
pub fn write_output(path: &Path, text: &str) -> Result<(), CliError> {
    if path == Path::new("-") {
        std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Parse(format!("stdout: {e}")))
    } else {
        fs::write(path, text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
    }
}
