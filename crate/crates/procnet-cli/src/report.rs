//! Run reports: what a command read, what it wrote, and how long it took.
//! Printed to stderr so piped CSV output stays clean.

use std::time::Instant;

use sha2::{Digest, Sha256};

use procnet::model::NetworkConfig;

pub struct RunReport {
    command: &'static str,
    /// Hash of the canonical form of the parsed config; changes iff any
    /// parsed field changes.
    config_digest: String,
    outputs: Vec<(String, usize)>,
    notes: Vec<String>,
}

impl RunReport {
    pub fn new(command: &'static str, config: &NetworkConfig) -> Self {
        let digest = Sha256::digest(config.to_config_string().as_bytes());
        Self {
            command,
            config_digest: hex_prefix(&digest),
            outputs: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn for_reproduce(figure: u8) -> Self {
        let digest = Sha256::digest(format!("figure:{figure}").as_bytes());
        Self {
            command: "reproduce",
            config_digest: hex_prefix(&digest),
            outputs: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn note(&mut self, line: String) {
        self.notes.push(line);
    }

    pub fn output(&mut self, path: String, rows: usize) -> &mut Self {
        self.outputs.push((path, rows));
        self
    }

    pub fn finish(&self, started: Instant) {
        let ms = started.elapsed().as_secs_f64() * 1e3;
        eprintln!("# {} config={} wall_time={ms:.1}ms", self.command, self.config_digest);
        for (path, rows) in &self.outputs {
            eprintln!("#   wrote {path}: {rows} rows");
        }
        for line in &self.notes {
            eprintln!("#   {line}");
        }
    }
}

fn hex_prefix(digest: &[u8]) -> String {
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}
