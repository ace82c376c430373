//! Line-oriented `key=value` run reports.

use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    /// One `key=value` pair per line.
    Text,
    /// All pairs on one line separated by `; `.
    Compact,
}

/// Exit codes shared by every subcommand.
pub mod exit {
    pub const POSITIVE: u8 = 0;
    pub const NEGATIVE: u8 = 1;
    pub const UNKNOWN: u8 = 2;
    pub const USAGE: u8 = 64;
    pub const DATA: u8 = 65;
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    fields: Vec<(String, String)>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut r = Report::default();
        r.push("command", command);
        r
    }

    /// Appends a field; keys may repeat for list-valued results.
    pub fn push(&mut self, key: &str, value: impl ToString) -> &mut Self {
        let v = value.to_string().replace('\n', " ");
        self.fields.push((key.to_string(), v));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn get_all<'a>(&'a self, key: &'a str) -> impl Iterator<Item = &'a str> {
        self.fields
            .iter()
            .filter(move |(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn render(&self, format: OutputFormat) -> String {
        let pairs = self.fields.iter().map(|(k, v)| format!("{k}={v}"));
        match format {
            OutputFormat::Text => pairs.map(|p| p + "\n").collect(),
            OutputFormat::Compact => pairs.collect::<Vec<_>>().join("; ") + "\n",
        }
    }
}

/// Hex SHA-256 over the input files, each prefixed by its length so that
/// boundaries between files are unambiguous.
pub fn digest(inputs: &[Vec<u8>]) -> String {
    let mut h = Sha256::new();
    for bytes in inputs {
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    }
    hex::encode(h.finalize())
}
