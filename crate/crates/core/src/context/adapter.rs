//! Dataset access used by profiling. Adapters expose table lists, column
//! metadata, and row reads; everything else (sampling, statistics) is built
//! on top of this contract.

use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("dataset i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("dataset backend error: {0}")]
    Backend(String),
    #[error("no such table: {0}")]
    MissingTable(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnMeta {
    pub name: String,
    /// Declared storage type when the backend knows one (e.g. SQLite column
    /// type affinity text). CSV sources have none.
    pub declared_type: Option<String>,
}

/// One sampled row; `None` is SQL NULL. Values are carried textually since
/// profiling classifies them lexically.
pub type Row = Vec<Option<String>>;

pub trait DatasetAdapter {
    fn table_names(&self) -> Result<Vec<String>, DatasetError>;
    fn table_columns(&self, table: &str) -> Result<Vec<ColumnMeta>, DatasetError>;
    fn row_count(&self, table: &str) -> Result<u64, DatasetError>;
    /// Rows in storage order, truncated at `limit` when given. Column order
    /// matches `table_columns`.
    fn read_rows(&self, table: &str, limit: Option<usize>) -> Result<Vec<Row>, DatasetError>;
}

/// Open a dataset path, auto-detecting the backend: a directory is a CSV
/// dataset (one file per table), anything else is treated as an embedded
/// SQLite database file.
pub fn open_dataset(path: &Path) -> Result<Box<dyn DatasetAdapter>, DatasetError> {
    if path.is_dir() {
        Ok(Box::new(super::csv_dir::CsvDirAdapter::open(path)?))
    } else {
        Ok(Box::new(super::sqlite::SqliteAdapter::open(path)?))
    }
}
