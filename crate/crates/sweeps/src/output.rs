use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use sha2::{Digest, Sha256};

/// Failure classes mapped onto process exit codes.
#[derive(Debug)]
pub enum Failure {
    Config(anyhow::Error),
    Numerics(anyhow::Error),
    Io(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Numerics(_) => 2,
            Failure::Io(_) => 3,
        }
    }

    pub fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Config(e) | Failure::Numerics(e) | Failure::Io(e) => e,
        }
    }

    pub fn from_core(e: nvsource_core::Error) -> Self {
        use nvsource_core::Error as E;
        match e {
            E::Config(_) | E::InvalidParameter(_) => Failure::Config(e.into()),
            E::Io(_) | E::Format { .. } | E::FieldGrid(_) => Failure::Io(e.into()),
            _ => Failure::Numerics(e.into()),
        }
    }

    pub fn from_anyhow(e: anyhow::Error) -> Self {
        match e.downcast::<nvsource_core::Error>() {
            Ok(core) => Self::from_core(core),
            Err(other) => Failure::Numerics(other),
        }
    }
}

/// Column names and stringified cells.
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

/// Where a command's result goes: the `--output` file, else the stream.
pub struct Destination<'a> {
    pub path: Option<PathBuf>,
    pub stream: &'a mut dyn Write,
}

fn sink(dest: &mut Destination, bytes: &[u8]) -> Result<(), Failure> {
    match &dest.path {
        Some(p) => std::fs::write(p, bytes).with_context(|| format!("writing {}", p.display())).map_err(Failure::Io),
        None => dest.stream.write_all(bytes).context("writing to stdout").map_err(Failure::Io),
    }
}

/// CSV preceded by a `# config_sha256=...` provenance comment.
pub fn write_csv(dest: &mut Destination, hash: &str, table: &Table) -> Result<(), Failure> {
    let mut buf = format!("# config_sha256={hash}\n").into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        let io = |e: csv::Error| Failure::Io(anyhow!(e));
        w.write_record(&table.columns).map_err(io)?;
        for row in &table.rows {
            w.write_record(row).map_err(io)?;
        }
        w.flush().map_err(|e| Failure::Io(anyhow!(e)))?;
    }
    sink(dest, &buf)
}

pub fn write_json(dest: &mut Destination, value: &serde_json::Value) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Io(anyhow!(e)))?;
    text.push('\n');
    sink(dest, text.as_bytes())
}

/// A table as CSV (default) or as JSON records.
pub fn write_table(dest: &mut Destination, json: Option<bool>, hash: &str, table: &Table) -> Result<(), Failure> {
    if json == Some(true) {
        let rows: Vec<serde_json::Map<String, serde_json::Value>> = table
            .rows
            .iter()
            .map(|r| {
                table
                    .columns
                    .iter()
                    .zip(r)
                    .map(|(c, v)| {
                        let value = v.parse::<f64>().map(serde_json::Value::from).unwrap_or_else(|_| v.clone().into());
                        (c.to_string(), value)
                    })
                    .collect()
            })
            .collect();
        write_json(dest, &serde_json::json!({ "config_sha256": hash, "rows": rows }))
    } else {
        write_csv(dest, hash, table)
    }
}

/// Hash of an input file, used as provenance when no configuration is given.
pub fn input_hash(path: &Path) -> anyhow::Result<String> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}
