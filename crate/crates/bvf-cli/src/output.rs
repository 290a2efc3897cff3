//! Report and CSV emission. CSV uses '.' decimals, LF endings, and a
//! mandatory header row; floats print in shortest-roundtrip form so reruns
//! are byte-identical.

use serde::Serialize;
use sha2::{Digest, Sha256};

pub const SCHEMA: &str = "bvf/1";

#[derive(Serialize)]
pub struct Report<T: Serialize> {
    pub schema: &'static str,
    pub tool_version: &'static str,
    pub command: String,
    pub config_hash: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub result: T,
}

pub fn emit<T: Serialize>(command: &str, seed: Option<u64>, config_repr: &str, result: T) {
    let mut hasher = Sha256::new();
    hasher.update(config_repr.as_bytes());
    let hash = hasher.finalize();
    let report = Report {
        schema: SCHEMA,
        tool_version: env!("CARGO_PKG_VERSION"),
        command: command.to_string(),
        config_hash: hex_of(&hash[..8]),
        seed,
        result,
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("report serialization")
    );
}

fn hex_of(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn write_csv(
    out_dir: &Option<String>,
    name: &str,
    header: &str,
    rows: &[String],
) -> bvf::Result<Option<String>> {
    let Some(dir) = out_dir else {
        return Ok(None);
    };
    std::fs::create_dir_all(dir)
        .map_err(|e| bvf::Error::InvalidInput(format!("cannot create {dir}: {e}")))?;
    let path = format!("{dir}/{name}");
    let mut text = String::with_capacity(rows.len() * 32 + header.len() + 1);
    text.push_str(header);
    text.push('\n');
    for r in rows {
        text.push_str(r);
        text.push('\n');
    }
    std::fs::write(&path, text)
        .map_err(|e| bvf::Error::InvalidInput(format!("cannot write {path}: {e}")))?;
    Ok(Some(path))
}
