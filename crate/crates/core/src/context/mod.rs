//! Application context: the immutable registry of schemas, indexes,
//! constraints, the full query set, and column data profiles that contextual
//! rules query. Built once per invocation; DDL-only mode (no dataset) is
//! first-class, and dataset failures degrade to it with a warning.

pub mod adapter;
pub mod csv_dir;
pub mod sqlite;

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet};
use std::hash::{Hash, Hasher};

use serde::Serialize;

use crate::config::BuildConfig;
use crate::frontend::{
    canonical, AlterAction, AnnotatedStatement, ColumnDef, ConstraintDecl, ConstraintKind,
    StatementKind,
};
use crate::rules::{Finding, Location};

pub use adapter::{open_dataset, ColumnMeta, DatasetAdapter, DatasetError, Row};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueClass {
    Integer,
    Decimal,
    Text,
    DateTime,
    Boolean,
    Mixed,
}

impl ValueClass {
    pub fn type_name(self) -> &'static str {
        match self {
            ValueClass::Integer => "INTEGER",
            ValueClass::Decimal => "DECIMAL",
            ValueClass::Text => "TEXT",
            ValueClass::DateTime => "DATETIME",
            ValueClass::Boolean => "BOOLEAN",
            ValueClass::Mixed => "MIXED",
        }
    }
}

/// Per-column statistics over a deterministic sample.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnProfile {
    pub row_count_sampled: usize,
    /// Distinct non-null values in the sample.
    pub distinct_count: usize,
    pub null_fraction: f64,
    pub inferred_value_class: ValueClass,
    /// Fraction of non-null values matching the delimiter-separated
    /// multi-token pattern.
    pub delimiter_list_fraction: f64,
    /// Share of the modal non-null value.
    pub constant_fraction: f64,
    /// True when every date-time value carries an offset/Z suffix or the
    /// declared type says WITH TIME ZONE.
    pub timezone_annotated: bool,
    /// Whether values carry a time-of-day component (dates alone do not).
    pub has_time_component: bool,
    /// Sampled raw values in row order; None is NULL.
    pub sample: Vec<Option<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexDecl {
    pub name: String,
    pub columns: Vec<String>,
    pub unique: bool,
    /// Source statement id of the CREATE INDEX, when it came from DDL.
    pub source: Option<String>,
}

#[derive(Debug, Clone)]
pub struct TableSchema {
    pub name: String,
    pub columns: Vec<ColumnDef>,
    pub constraints: Vec<ConstraintDecl>,
    pub indexes: Vec<IndexDecl>,
    /// True when at least one CREATE/ALTER TABLE contributed to this schema;
    /// false for schemas synthesized purely from dataset metadata.
    pub from_ddl: bool,
    /// Statement id of the defining CREATE TABLE, when known.
    pub created_by: Option<String>,
}

impl TableSchema {
    pub fn column(&self, name: &str) -> Option<&ColumnDef> {
        let c = canonical(name);
        self.columns.iter().find(|col| canonical(&col.name) == c)
    }

    pub fn primary_key(&self) -> Option<&ConstraintDecl> {
        self.constraints
            .iter()
            .find(|c| c.kind == ConstraintKind::PrimaryKey)
    }

    pub fn is_pk_column(&self, column: &str) -> bool {
        let c = canonical(column);
        self.primary_key()
            .map(|pk| pk.columns.iter().any(|pc| canonical(pc) == c))
            .unwrap_or(false)
    }

    pub fn has_check_on(&self, column: &str) -> bool {
        let c = canonical(column);
        self.constraints.iter().any(|con| {
            con.kind == ConstraintKind::Check
                && (con.columns.iter().any(|cc| canonical(cc) == c)
                    || con
                        .expression_text
                        .as_deref()
                        .is_some_and(|e| expression_mentions(e, &c)))
        })
    }

    /// Any foreign key declared from `column` (canonical).
    pub fn foreign_key_from(&self, column: &str) -> Option<&ConstraintDecl> {
        let c = canonical(column);
        self.constraints.iter().find(|con| {
            con.kind == ConstraintKind::ForeignKey
                && con.columns.iter().any(|cc| canonical(cc) == c)
        })
    }

    pub fn not_null(&self, column: &str) -> bool {
        self.column(column).map(|c| !c.nullable).unwrap_or(false)
            || self.is_pk_column(column)
    }
}

fn expression_mentions(expr: &str, canonical_col: &str) -> bool {
    crate::frontend::tokenize(expr).iter().any(|t| {
        t.kind == crate::frontend::TokenKind::Ident && canonical(t.ident_text()) == canonical_col
    })
}

/// Undirected column-pair edge observed in a JOIN/WHERE equality. Endpoints
/// are canonical `(table, column)` pairs, stored in sorted order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct JoinEdge {
    pub left: (String, String),
    pub right: (String, String),
}

impl JoinEdge {
    pub fn new(a: (String, String), b: (String, String)) -> Self {
        if a <= b {
            JoinEdge { left: a, right: b }
        } else {
            JoinEdge { left: b, right: a }
        }
    }

    pub fn touches(&self, table: &str, column: &str) -> bool {
        let key = (canonical(table), canonical(column));
        self.left == key || self.right == key
    }

    pub fn other(&self, table: &str, column: &str) -> Option<&(String, String)> {
        let key = (canonical(table), canonical(column));
        if self.left == key {
            Some(&self.right)
        } else if self.right == key {
            Some(&self.left)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone)]
pub struct ApplicationContext {
    /// Canonical table name to schema.
    pub schemas: BTreeMap<String, TableSchema>,
    pub query_registry: Vec<AnnotatedStatement>,
    pub join_graph: BTreeSet<JoinEdge>,
    /// Keyed by canonical `(table, column)`.
    pub profiles: BTreeMap<(String, String), ColumnProfile>,
    pub build_config: BuildConfig,
    pub warnings: Vec<String>,
    /// Deterministic fingerprint findings reference as their context snapshot.
    pub snapshot_id: String,
}

impl ApplicationContext {
    pub fn empty() -> Self {
        build_context(Vec::new(), None, BuildConfig::default())
    }

    pub fn schema(&self, table: &str) -> Option<&TableSchema> {
        self.schemas.get(&canonical(table))
    }

    pub fn profile(&self, table: &str, column: &str) -> Option<&ColumnProfile> {
        self.profiles.get(&(canonical(table), canonical(column)))
    }

    pub fn statement(&self, source_id: &str) -> Option<&AnnotatedStatement> {
        self.query_registry.iter().find(|s| s.source_id == source_id)
    }

    pub fn registry_index(&self, source_id: &str) -> Option<usize> {
        self.query_registry
            .iter()
            .position(|s| s.source_id == source_id)
    }

    pub fn has_profiles(&self) -> bool {
        !self.profiles.is_empty()
    }
}

/// Build the application context from parsed statements and an optional
/// dataset. Dataset metadata augments DDL-derived schemas but never
/// overrides them; adapter failures produce warnings, not errors.
pub fn build_context(
    queries: Vec<AnnotatedStatement>,
    dataset: Option<&dyn DatasetAdapter>,
    config: BuildConfig,
) -> ApplicationContext {
    let mut schemas: BTreeMap<String, TableSchema> = BTreeMap::new();
    let mut warnings = Vec::new();

    // DDL pass, in registry order.
    for stmt in &queries {
        match stmt.kind {
            StatementKind::CreateTable => {
                let Some(name) = stmt.target_table.clone() else {
                    continue;
                };
                let key = canonical(&name);
                if schemas.contains_key(&key) {
                    warnings.push(format!(
                        "duplicate CREATE TABLE for {name} at {}; keeping the first definition",
                        stmt.source_id
                    ));
                    continue;
                }
                schemas.insert(
                    key,
                    TableSchema {
                        name,
                        columns: stmt.columns_defined.clone(),
                        constraints: stmt.constraints.clone(),
                        indexes: Vec::new(),
                        from_ddl: true,
                        created_by: Some(stmt.source_id.clone()),
                    },
                );
            }
            StatementKind::AlterTable => {
                let Some(name) = stmt.target_table.clone() else {
                    continue;
                };
                let key = canonical(&name);
                let schema = schemas.entry(key).or_insert_with(|| TableSchema {
                    name,
                    columns: Vec::new(),
                    constraints: Vec::new(),
                    indexes: Vec::new(),
                    from_ddl: true,
                    created_by: None,
                });
                for action in &stmt.alter_actions {
                    apply_alter(schema, action);
                }
            }
            _ => {}
        }
    }

    // Index pass: bind CREATE INDEX statements to tables.
    for stmt in &queries {
        if stmt.kind != StatementKind::CreateIndex {
            continue;
        }
        let Some(idx) = &stmt.index_decl else { continue };
        let decl = IndexDecl {
            name: idx.name.clone(),
            columns: idx.columns.clone(),
            unique: idx.unique,
            source: Some(stmt.source_id.clone()),
        };
        let table_key = match &idx.table {
            Some(t) => Some(canonical(t)),
            // Tolerated dialect form without ON <table>: bind to the unique
            // table containing every indexed column.
            None => {
                let candidates: Vec<&String> = schemas
                    .iter()
                    .filter(|(_, s)| idx.columns.iter().all(|c| s.column(c).is_some()))
                    .map(|(k, _)| k)
                    .collect();
                match candidates.as_slice() {
                    [one] => Some((*one).clone()),
                    _ => {
                        warnings.push(format!(
                            "index {} has no table and {} candidates; ignored",
                            idx.name,
                            candidates.len()
                        ));
                        None
                    }
                }
            }
        };
        if let Some(key) = table_key {
            let schema = schemas.entry(key.clone()).or_insert_with(|| TableSchema {
                name: idx.table.clone().unwrap_or(key),
                columns: Vec::new(),
                constraints: Vec::new(),
                indexes: Vec::new(),
                from_ddl: true,
                created_by: None,
            });
            schema.indexes.push(decl);
        }
    }

    // Dataset pass: profiles plus schema augmentation/synthesis.
    let mut profiles = BTreeMap::new();
    if let Some(adapter) = dataset {
        match adapter.table_names() {
            Err(e) => warnings.push(format!("dataset unavailable, using DDL only: {e}")),
            Ok(mut names) => {
                names.sort_by_key(|n| canonical(n));
                for table in names {
                    let columns = match adapter.table_columns(&table) {
                        Ok(c) => c,
                        Err(e) => {
                            warnings.push(format!("skipping table {table}: {e}"));
                            continue;
                        }
                    };
                    let table_profiles =
                        match crate::profiler::profile_table(adapter, &table, &config) {
                            Ok(p) => p,
                            Err(e) => {
                                warnings.push(format!("profiling failed for {table}: {e}"));
                                continue;
                            }
                        };
                    let key = canonical(&table);
                    let schema = schemas.entry(key.clone()).or_insert_with(|| TableSchema {
                        name: table.clone(),
                        columns: Vec::new(),
                        constraints: Vec::new(),
                        indexes: Vec::new(),
                        from_ddl: false,
                        created_by: None,
                    });
                    for meta in &columns {
                        if schema.column(&meta.name).is_none() {
                            let declared_type = meta.declared_type.clone().unwrap_or_else(|| {
                                table_profiles
                                    .get(&canonical(&meta.name))
                                    .map(|p| p.inferred_value_class.type_name().to_string())
                                    .unwrap_or_else(|| "TEXT".to_string())
                            });
                            schema.columns.push(ColumnDef {
                                name: meta.name.clone(),
                                declared_type,
                                nullable: true,
                            });
                        }
                    }
                    for (col, profile) in table_profiles {
                        profiles.insert((key.clone(), col), profile);
                    }
                }
            }
        }
    }

    // Join graph from every query's column equalities.
    let mut join_graph = BTreeSet::new();
    for stmt in &queries {
        for (a, b) in &stmt.join_equalities {
            if let (Some(ta), Some(tb)) = (&a.table, &b.table) {
                join_graph.insert(JoinEdge::new(
                    (canonical(ta), canonical(&a.column)),
                    (canonical(tb), canonical(&b.column)),
                ));
            }
        }
    }

    let snapshot_id = {
        let mut h = DefaultHasher::new();
        for (key, schema) in &schemas {
            key.hash(&mut h);
            schema.columns.len().hash(&mut h);
            schema.constraints.len().hash(&mut h);
        }
        for stmt in &queries {
            stmt.source_id.hash(&mut h);
        }
        profiles.len().hash(&mut h);
        format!("{:016x}", h.finish())
    };

    ApplicationContext {
        schemas,
        query_registry: queries,
        join_graph,
        profiles,
        build_config: config,
        warnings,
        snapshot_id,
    }
}

fn apply_alter(schema: &mut TableSchema, action: &AlterAction) {
    match action {
        AlterAction::AddColumn(col) => {
            if schema.column(&col.name).is_none() {
                schema.columns.push(col.clone());
            }
        }
        AlterAction::DropColumn(name) => {
            let c = canonical(name);
            schema.columns.retain(|col| canonical(&col.name) != c);
        }
        AlterAction::AddConstraint(con) => schema.constraints.push(con.clone()),
        AlterAction::DropConstraint(name) => {
            let c = canonical(name);
            schema
                .constraints
                .retain(|con| con.name.as_deref().map(canonical) != Some(c.clone()));
        }
        AlterAction::Other => {}
    }
}

/// Every registered statement that references the finding's table/column, in
/// registry order. Statement-located findings have no table subject and
/// yield an empty list; unknown tables yield an empty list.
pub fn impacted_queries<'a>(
    ctx: &'a ApplicationContext,
    finding: &Finding,
) -> Vec<&'a AnnotatedStatement> {
    match &finding.location {
        Location::Statement(_) => Vec::new(),
        Location::Table(table) => ctx
            .query_registry
            .iter()
            .filter(|s| s.references_table(table))
            .collect(),
        Location::Column(table, column) => ctx
            .query_registry
            .iter()
            .filter(|s| s.references_column(table, column))
            .collect(),
    }
}
