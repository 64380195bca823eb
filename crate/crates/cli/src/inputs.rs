//! Locating and loading input files.

use std::path::{Path, PathBuf};

use topocube::persistence::DiagramRecord;
use topocube::volume::{load_volume, Dims, VolumeFormat};
use topocube::{PersistenceDiagram, Volume};

use crate::Failure;

pub fn require_file(path: &Path) -> Result<(), Failure> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Failure::io(format!("{}: no such file", path.display())))
    }
}

pub fn volume(path: &Path, raw_dims: Option<Dims>) -> Result<Volume, Failure> {
    let format = VolumeFormat::from_path(path, raw_dims).map_err(|e| Failure::from(e).context(path))?;
    load_volume(path, format).map_err(|e| Failure::from(e).context(path))
}

pub fn is_json(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// Diagrams from a JSON file holding either one diagram object or an array of them.
pub fn diagrams(path: &Path) -> Result<Vec<PersistenceDiagram>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    let bad = |e: serde_json::Error| Failure::io(format!("{}: malformed diagram JSON: {e}", path.display()));
    let value: serde_json::Value = serde_json::from_str(&text).map_err(bad)?;
    let records: Vec<DiagramRecord> = if value.is_array() {
        serde_json::from_value(value).map_err(bad)?
    } else {
        vec![serde_json::from_value(value).map_err(bad)?]
    };
    records
        .into_iter()
        .map(|r| PersistenceDiagram::try_from(r).map_err(|e| Failure::from(e).context(path)))
        .collect()
}

/// Display id of an input: its file stem.
pub fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Files matching `pattern`, sorted by file name and then by full path.
pub fn expand(pattern: &str) -> Result<Vec<PathBuf>, Failure> {
    let paths = glob::glob(pattern).map_err(|e| Failure::io(format!("bad glob {pattern:?}: {e}")))?;
    let mut files = Vec::new();
    for entry in paths {
        let path = entry.map_err(|e| Failure::io(e.to_string()))?;
        if path.is_file() {
            files.push(path);
        }
    }
    if files.is_empty() {
        return Err(Failure::io(format!("no files match {pattern:?}")));
    }
    files.sort_by(|a, b| a.file_name().cmp(&b.file_name()).then_with(|| a.cmp(b)));
    Ok(files)
}

/// A (prediction, truth) file pair with the id used in reports.
#[derive(Debug, Clone, PartialEq)]
pub struct Pair {
    pub id: String,
    pub pred: PathBuf,
    pub truth: PathBuf,
}

/// Pairs the i-th prediction with the i-th truth in sorted order.
pub fn pair_globs(pred: &str, truth: &str) -> Result<Vec<Pair>, Failure> {
    let (p, t) = (expand(pred)?, expand(truth)?);
    if p.len() != t.len() {
        return Err(Failure::semantic(format!(
            "{} prediction files but {} truth files; use --manifest to pair them explicitly",
            p.len(),
            t.len()
        )));
    }
    Ok(p.into_iter()
        .zip(t)
        .map(|(pred, truth)| Pair {
            id: stem(&pred),
            pred,
            truth,
        })
        .collect())
}

/// Reads a manifest of `pred,truth[,id]` rows; `#` starts a comment line.
/// Relative paths are taken from the manifest's directory.
pub fn read_manifest(path: &Path) -> Result<Vec<Pair>, Failure> {
    require_file(path)?;
    let base = path.parent().unwrap_or(Path::new(""));
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    let mut pairs = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        if !(2..=3).contains(&record.len()) {
            return Err(Failure::io(format!(
                "{}: row {} needs `pred,truth` or `pred,truth,id`",
                path.display(),
                line + 1
            )));
        }
        let pred = base.join(&record[0]);
        let truth = base.join(&record[1]);
        let id = record.get(2).map(str::to_string).unwrap_or_else(|| stem(&pred));
        pairs.push(Pair { id, pred, truth });
    }
    if pairs.is_empty() {
        return Err(Failure::io(format!("{}: manifest lists no pairs", path.display())));
    }
    Ok(pairs)
}
