//! Embedded single-file relational database adapter (SQLite, read-only).

use std::path::Path;

use rusqlite::types::ValueRef;
use rusqlite::{Connection, OpenFlags};

use super::adapter::{ColumnMeta, DatasetAdapter, DatasetError, Row};

pub struct SqliteAdapter {
    conn: Connection,
}

impl SqliteAdapter {
    pub fn open(path: &Path) -> Result<Self, DatasetError> {
        let conn = Connection::open_with_flags(
            path,
            OpenFlags::SQLITE_OPEN_READ_ONLY | OpenFlags::SQLITE_OPEN_NO_MUTEX,
        )
        .map_err(backend)?;
        Ok(SqliteAdapter { conn })
    }
}

fn backend(e: rusqlite::Error) -> DatasetError {
    DatasetError::Backend(e.to_string())
}

fn quote_ident(name: &str) -> String {
    format!("\"{}\"", name.replace('"', "\"\""))
}

fn value_to_text(v: ValueRef<'_>) -> Option<String> {
    match v {
        ValueRef::Null => None,
        ValueRef::Integer(i) => Some(i.to_string()),
        ValueRef::Real(f) => Some(format!("{f}")),
        ValueRef::Text(t) => Some(String::from_utf8_lossy(t).into_owned()),
        ValueRef::Blob(b) => Some(format!("<blob {} bytes>", b.len())),
    }
}

impl DatasetAdapter for SqliteAdapter {
    fn table_names(&self) -> Result<Vec<String>, DatasetError> {
        let mut stmt = self
            .conn
            .prepare(
                "SELECT name FROM sqlite_master
                 WHERE type = 'table' AND name NOT LIKE 'sqlite_%'
                 ORDER BY name",
            )
            .map_err(backend)?;
        let names = stmt
            .query_map([], |row| row.get::<_, String>(0))
            .map_err(backend)?
            .collect::<Result<Vec<_>, _>>()
            .map_err(backend)?;
        Ok(names)
    }

    fn table_columns(&self, table: &str) -> Result<Vec<ColumnMeta>, DatasetError> {
        let mut stmt = self
            .conn
            .prepare(&format!("PRAGMA table_info({})", quote_ident(table)))
            .map_err(backend)?;
        let cols = stmt
            .query_map([], |row| {
                let name: String = row.get(1)?;
                let decl: String = row.get(2)?;
                Ok(ColumnMeta {
                    name,
                    declared_type: if decl.is_empty() { None } else { Some(decl) },
                })
            })
            .map_err(backend)?
            .collect::<Result<Vec<_>, _>>()
            .map_err(backend)?;
        if cols.is_empty() {
            return Err(DatasetError::MissingTable(table.to_string()));
        }
        Ok(cols)
    }

    fn row_count(&self, table: &str) -> Result<u64, DatasetError> {
        self.conn
            .query_row(
                &format!("SELECT COUNT(*) FROM {}", quote_ident(table)),
                [],
                |row| row.get::<_, i64>(0),
            )
            .map(|n| n.max(0) as u64)
            .map_err(backend)
    }

    fn read_rows(&self, table: &str, limit: Option<usize>) -> Result<Vec<Row>, DatasetError> {
        let sql = match limit {
            Some(n) => format!("SELECT * FROM {} LIMIT {n}", quote_ident(table)),
            None => format!("SELECT * FROM {}", quote_ident(table)),
        };
        let mut stmt = self.conn.prepare(&sql).map_err(backend)?;
        let width = stmt.column_count();
        let rows = stmt
            .query_map([], |row| {
                let mut out = Vec::with_capacity(width);
                for i in 0..width {
                    out.push(value_to_text(row.get_ref(i)?));
                }
                Ok(out)
            })
            .map_err(backend)?
            .collect::<Result<Vec<_>, _>>()
            .map_err(backend)?;
        Ok(rows)
    }
}
