//! CSV workbook directories and mapping files.
//!
//! A workbook is a directory of `<tab>.csv` files. An optional
//! `<tab>.notes.json` object maps headers to note text.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use super::{IngestError, MappingDictionary, RawTable};

fn io_err(path: &Path, e: impl std::fmt::Display) -> IngestError {
    IngestError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// Reads every `*.csv` file in `dir`, sorted by tab name.
pub fn read_tables(dir: &Path) -> Result<Vec<RawTable>, IngestError> {
    let mut paths: Vec<_> = fs::read_dir(dir)
        .map_err(|e| io_err(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    paths.sort();
    paths.iter().map(|p| read_table(p)).collect()
}

fn read_table(path: &Path) -> Result<RawTable, IngestError> {
    let tab = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_path(path)
        .map_err(|e| io_err(path, e))?;
    let columns: Vec<String> = reader
        .headers()
        .map_err(|e| io_err(path, e))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| io_err(path, e))?;
        rows.push(record.iter().map(str::to_string).collect());
    }
    let mut table = RawTable::new(tab.clone(), columns, rows)?;
    let notes_path = path.with_file_name(format!("{tab}.notes.json"));
    if notes_path.exists() {
        let text = fs::read_to_string(&notes_path).map_err(|e| io_err(&notes_path, e))?;
        table.notes = serde_json::from_str::<BTreeMap<String, String>>(&text)
            .map_err(|e| io_err(&notes_path, e))?;
    }
    Ok(table)
}

/// Writes each table as `<dir>/<tab>.csv`, creating `dir` if needed.
pub fn write_tables(dir: &Path, tables: &[RawTable]) -> Result<(), IngestError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    for t in tables {
        let path = dir.join(format!("{}.csv", t.tab_name));
        let mut w = csv::Writer::from_path(&path).map_err(|e| io_err(&path, e))?;
        w.write_record(&t.columns).map_err(|e| io_err(&path, e))?;
        for row in &t.rows {
            w.write_record(row).map_err(|e| io_err(&path, e))?;
        }
        w.flush().map_err(|e| io_err(&path, e))?;
        if !t.notes.is_empty() {
            let notes = dir.join(format!("{}.notes.json", t.tab_name));
            let text = serde_json::to_string_pretty(&t.notes).map_err(|e| io_err(&notes, e))?;
            fs::write(&notes, text).map_err(|e| io_err(&notes, e))?;
        }
    }
    Ok(())
}

pub fn read_mapping(path: &Path) -> Result<MappingDictionary, IngestError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| io_err(path, e))
}

pub fn write_mapping(path: &Path, m: &MappingDictionary) -> Result<(), IngestError> {
    let text = serde_json::to_string_pretty(m).map_err(|e| io_err(path, e))?;
    fs::write(path, text + "\n").map_err(|e| io_err(path, e))
}
