//! Weingarten tables kept on disk under $NC_CACHE_DIR, one JSON file per
//! (group, k, n).

use std::path::PathBuf;

use nc_core::weingarten::{weingarten, QuantumGroup};
use serde_json::{json, Value};

use crate::Failure;

fn path(group: QuantumGroup, k: usize, n: u64) -> Option<PathBuf> {
    let dir = std::env::var_os("NC_CACHE_DIR")?;
    let tag = group.name().replace('+', "plus");
    Some(PathBuf::from(dir).join(format!("weingarten-{tag}-{k}-{n}.json")))
}

fn load(file: &PathBuf, labels: &[String]) -> Option<Vec<Vec<String>>> {
    let v: Value = serde_json::from_str(&std::fs::read_to_string(file).ok()?).ok()?;
    let stored: Vec<String> = serde_json::from_value(v.get("partitions")?.clone()).ok()?;
    if stored != labels {
        return None;
    }
    let rows: Vec<Vec<String>> = serde_json::from_value(v.get("weingarten")?.clone()).ok()?;
    (rows.len() == labels.len() && rows.iter().all(|r| r.len() == labels.len())).then_some(rows)
}

/// Rows of W as lowest-terms strings, from the cache when possible.
pub fn weingarten_rows(group: QuantumGroup, k: usize, n: u64, labels: &[String]) -> Result<Vec<Vec<String>>, Failure> {
    let file = path(group, k, n);
    if let Some(rows) = file.as_ref().and_then(|f| load(f, labels)) {
        return Ok(rows);
    }
    let w = weingarten(group, k, n)?;
    let rows: Vec<Vec<String>> =
        (0..w.dim()).map(|i| (0..w.dim()).map(|j| w.entry(i, j).to_string()).collect()).collect();
    if let Some(file) = file {
        let body = json!({ "partitions": labels, "weingarten": rows }).to_string();
        let written = file.parent().map_or(Ok(()), std::fs::create_dir_all).and_then(|_| std::fs::write(&file, body));
        if let Err(e) = written {
            eprintln!("nc: warning: cannot write {}: {e}", file.display());
        }
    }
    Ok(rows)
}
