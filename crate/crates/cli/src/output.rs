//! Atomic file output and the `features.csv` format.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use affectwear_core::mlbench::SubjectFeatures;
use affectwear_core::session::Label;

use crate::error::{CliError, CliResult};

/// Writes through a sibling temporary file and renames it into place, so a
/// reader never sees a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> CliResult<()> {
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(parent).map_err(CliError::io(parent))?;
    let name = path
        .file_name()
        .ok_or_else(|| CliError::Config(format!("{} is not a file path", path.display())))?;
    let tmp = parent.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, contents).map_err(CliError::io(&tmp))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        CliError::Io {
            path: path.to_path_buf(),
            source: e,
        }
    })
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("output types serialise");
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// One row per subject; absent values are empty cells.
pub fn features_csv(names: &[&str], rows: &[(String, Label, Vec<Option<f64>>)]) -> String {
    let mut out = String::from("subject_id,label");
    for n in names {
        out.push(',');
        out.push_str(n);
    }
    out.push('\n');
    for (id, label, values) in rows {
        out.push_str(id);
        out.push(',');
        out.push_str(label.as_str());
        for v in values {
            out.push(',');
            if let Some(v) = v {
                out.push_str(&format!("{v:?}"));
            }
        }
        out.push('\n');
    }
    out
}

pub fn parse_features_csv(text: &str) -> CliResult<Vec<SubjectFeatures>> {
    let bad = |msg: String| CliError::Config(format!("features.csv: {msg}"));
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| bad("missing header".into()))?
        .split(',')
        .collect();
    if header.len() < 2 || header[0] != "subject_id" || header[1] != "label" {
        return Err(bad("header must start with subject_id,label".into()));
    }
    let mut subjects = Vec::new();
    for (i, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != header.len() {
            return Err(bad(format!("row {} has {} cells, expected {}", i + 2, cells.len(), header.len())));
        }
        let label: Label = cells[1].parse().map_err(|e| bad(format!("row {}: {e}", i + 2)))?;
        let mut values = BTreeMap::new();
        for (name, cell) in header[2..].iter().zip(&cells[2..]) {
            let v = if cell.is_empty() {
                None
            } else {
                Some(
                    cell.parse::<f64>()
                        .map_err(|_| bad(format!("row {}: bad value {cell:?} in {name}", i + 2)))?,
                )
            };
            values.insert(name.to_string(), v);
        }
        subjects.push(SubjectFeatures {
            subject_id: cells[0].to_string(),
            label,
            values,
        });
    }
    Ok(subjects)
}
