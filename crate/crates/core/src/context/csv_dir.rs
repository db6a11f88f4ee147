//! CSV-directory adapter: one RFC-4180-style file per table, first row is
//! the header, UTF-8. Empty fields read as NULL.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use super::adapter::{ColumnMeta, DatasetAdapter, DatasetError, Row};

pub struct CsvDirAdapter {
    tables: BTreeMap<String, PathBuf>,
}

impl CsvDirAdapter {
    pub fn open(dir: &Path) -> Result<Self, DatasetError> {
        let mut tables = BTreeMap::new();
        for entry in std::fs::read_dir(dir)? {
            let path = entry?.path();
            if path.extension().and_then(|e| e.to_str()) == Some("csv") {
                if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                    tables.insert(stem.to_string(), path.clone());
                }
            }
        }
        Ok(CsvDirAdapter { tables })
    }

    fn path_for(&self, table: &str) -> Result<&PathBuf, DatasetError> {
        self.tables
            .get(table)
            .ok_or_else(|| DatasetError::MissingTable(table.to_string()))
    }

    fn reader(&self, table: &str) -> Result<csv::Reader<std::fs::File>, DatasetError> {
        let path = self.path_for(table)?;
        csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .from_path(path)
            .map_err(|e| DatasetError::Backend(e.to_string()))
    }
}

impl DatasetAdapter for CsvDirAdapter {
    fn table_names(&self) -> Result<Vec<String>, DatasetError> {
        Ok(self.tables.keys().cloned().collect())
    }

    fn table_columns(&self, table: &str) -> Result<Vec<ColumnMeta>, DatasetError> {
        let mut reader = self.reader(table)?;
        let headers = reader
            .headers()
            .map_err(|e| DatasetError::Backend(e.to_string()))?;
        Ok(headers
            .iter()
            .map(|h| ColumnMeta {
                name: h.trim().to_string(),
                declared_type: None,
            })
            .collect())
    }

    fn row_count(&self, table: &str) -> Result<u64, DatasetError> {
        let mut reader = self.reader(table)?;
        let mut count = 0u64;
        for record in reader.records() {
            record.map_err(|e| DatasetError::Backend(e.to_string()))?;
            count += 1;
        }
        Ok(count)
    }

    fn read_rows(&self, table: &str, limit: Option<usize>) -> Result<Vec<Row>, DatasetError> {
        let width = self.table_columns(table)?.len();
        let mut reader = self.reader(table)?;
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| DatasetError::Backend(e.to_string()))?;
            let mut row: Row = Vec::with_capacity(width);
            for i in 0..width {
                row.push(match record.get(i) {
                    Some("") | None => None,
                    Some(v) => Some(v.to_string()),
                });
            }
            rows.push(row);
            if limit.is_some_and(|n| rows.len() >= n) {
                break;
            }
        }
        Ok(rows)
    }
}
