//! Contextual rules: evaluated against the full application context. Rules
//! that describe a table anchor on its defining CREATE TABLE statement so
//! each fires exactly once per subject; a fallback pass covers tables whose
//! schema was synthesized from data and has no defining statement.

use std::collections::{BTreeMap, BTreeSet};

use crate::catalog::AntiPatternKind;
use crate::context::{ApplicationContext, TableSchema};
use crate::frontend::{canonical, AnnotatedStatement, ConstraintKind, StatementKind, TokenKind};

use super::{Finding, Location, Phase};

fn inter(
    kind: AntiPatternKind,
    location: Location,
    statement_id: Option<String>,
    evidence: String,
) -> Finding {
    Finding::new(kind, location, statement_id, evidence, Phase::InterQuery)
}

/// True when this statement is the defining CREATE TABLE of its target.
fn is_defining_statement(stmt: &AnnotatedStatement, ctx: &ApplicationContext) -> Option<String> {
    let table = stmt.target_table.clone()?;
    let schema = ctx.schema(&table)?;
    (schema.created_by.as_deref() == Some(stmt.source_id.as_str())).then_some(table)
}

pub fn no_primary_key(stmt: &AnnotatedStatement, ctx: &ApplicationContext) -> Vec<Finding> {
    let Some(table) = is_defining_statement(stmt, ctx) else {
        return Vec::new();
    };
    let schema = ctx.schema(&table).unwrap();
    if schema.primary_key().is_some() {
        return Vec::new();
    }
    vec![inter(
        AntiPatternKind::NoPrimaryKey,
        Location::Table(schema.name.clone()),
        Some(stmt.source_id.clone()),
        format!(
            "no PRIMARY KEY declared for {} across its DDL statements",
            schema.name
        ),
    )]
}

fn has_fk_between(
    from: &TableSchema,
    from_col: &str,
    to_table: &str,
) -> bool {
    from.constraints.iter().any(|c| {
        c.kind == ConstraintKind::ForeignKey
            && c.columns.iter().any(|col| canonical(col) == canonical(from_col))
            && c.target
                .as_ref()
                .is_some_and(|(t, _)| canonical(t) == canonical(to_table))
    })
}

pub fn no_foreign_key(stmt: &AnnotatedStatement, ctx: &ApplicationContext) -> Vec<Finding> {
    let Some(table) = is_defining_statement(stmt, ctx) else {
        return Vec::new();
    };
    let table_key = canonical(&table);
    let mut findings = Vec::new();

    for edge in &ctx.join_graph {
        for (side, other) in [(&edge.left, &edge.right), (&edge.right, &edge.left)] {
            if side.0 != table_key {
                continue;
            }
            let (Some(side_schema), Some(other_schema)) =
                (ctx.schemas.get(&side.0), ctx.schemas.get(&other.0)) else {
                continue;
            };
            if !side_schema.from_ddl || !other_schema.from_ddl || side.0 == other.0 {
                continue;
            }
            if has_fk_between(side_schema, &side.1, &other_schema.name)
                || has_fk_between(other_schema, &other.1, &side_schema.name)
            {
                continue;
            }
            // The referencing (child) side carries the finding: the side that
            // is not a primary-key column. Ties break to the larger key so
            // exactly one side reports.
            let side_is_pk = side_schema.is_pk_column(&side.1);
            let other_is_pk = other_schema.is_pk_column(&other.1);
            let reports_here = match (side_is_pk, other_is_pk) {
                (false, true) => true,
                (true, false) => false,
                _ => side > other,
            };
            if !reports_here {
                continue;
            }
            let side_col = side_schema
                .column(&side.1)
                .map(|c| c.name.clone())
                .unwrap_or_else(|| side.1.clone());
            let other_col = other_schema
                .column(&other.1)
                .map(|c| c.name.clone())
                .unwrap_or_else(|| other.1.clone());
            findings.push(inter(
                AntiPatternKind::NoForeignKey,
                Location::Column(side_schema.name.clone(), side_col.clone()),
                Some(stmt.source_id.clone()),
                format!(
                    "{}.{} joins {}.{} but neither table declares the foreign key",
                    side_schema.name, side_col, other_schema.name, other_col
                ),
            ));
        }
    }
    findings
}

/// `<column> IN (<literals>)` parsed out of a CHECK expression.
fn check_in_list(expr: &str) -> Option<(String, Vec<String>)> {
    let tokens: Vec<_> = crate::frontend::tokenize(expr)
        .into_iter()
        .filter(|t| !t.is_trivia())
        .collect();
    if tokens.len() < 4 || tokens[0].kind != TokenKind::Ident || !tokens[1].is_keyword("IN") {
        return None;
    }
    if !tokens[2].is_punct("(") {
        return None;
    }
    let values: Vec<String> = tokens[3..]
        .iter()
        .take_while(|t| !t.is_punct(")"))
        .filter(|t| matches!(t.kind, TokenKind::StringLit | TokenKind::Number))
        .map(|t| t.text.clone())
        .collect();
    if values.is_empty() {
        return None;
    }
    Some((tokens[0].ident_text().to_string(), values))
}

/// CHECK constraints that pin a column to a fixed value list, anchored on the
/// statement that declares them.
pub fn enumerated_types_check(stmt: &AnnotatedStatement, _ctx: &ApplicationContext) -> Vec<Finding> {
    let Some(table) = stmt.target_table.clone() else {
        return Vec::new();
    };
    let mut findings = Vec::new();
    for constraint in &stmt.constraints {
        if constraint.kind != ConstraintKind::Check {
            continue;
        }
        let Some(expr) = constraint.expression_text.as_deref() else {
            continue;
        };
        if let Some((column, values)) = check_in_list(expr) {
            findings.push(inter(
                AntiPatternKind::EnumeratedTypes,
                Location::Column(table.clone(), column.clone()),
                Some(stmt.source_id.clone()),
                format!(
                    "CHECK constraint{} pins {}.{} to the value list ({})",
                    constraint
                        .name
                        .as_deref()
                        .map(|n| format!(" {n}"))
                        .unwrap_or_default(),
                    table,
                    column,
                    values.join(", ")
                ),
            ));
        }
    }
    findings
}

pub fn adjacency_list(stmt: &AnnotatedStatement, _ctx: &ApplicationContext) -> Vec<Finding> {
    let Some(table) = stmt.target_table.clone() else {
        return Vec::new();
    };
    let mut findings = Vec::new();
    for constraint in &stmt.constraints {
        if constraint.kind != ConstraintKind::ForeignKey {
            continue;
        }
        let Some((target, _)) = &constraint.target else { continue };
        if canonical(target) == canonical(&table) {
            let column = constraint
                .columns
                .first()
                .cloned()
                .unwrap_or_else(|| "?".to_string());
            findings.push(inter(
                AntiPatternKind::AdjacencyList,
                Location::Column(table.clone(), column.clone()),
                Some(stmt.source_id.clone()),
                format!("{table}.{column} references its own table (hierarchy as adjacency list)"),
            ));
        }
    }
    findings
}

/// `orders_1`, `orders_2`, ... style names share a clone base.
fn clone_base(name: &str) -> Option<String> {
    let trimmed = name.trim_end_matches(|c: char| c.is_ascii_digit());
    if trimmed.len() == name.len() || trimmed.is_empty() {
        return None;
    }
    let base = trimmed.trim_end_matches(['_', '-']);
    if base.is_empty() {
        return None;
    }
    Some(base.to_string())
}

fn clone_groups(ctx: &ApplicationContext) -> BTreeMap<String, Vec<String>> {
    let mut groups: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for key in ctx.schemas.keys() {
        if let Some(base) = clone_base(key) {
            groups.entry(base).or_default().push(key.clone());
        }
    }
    groups.retain(|_, members| members.len() >= 2);
    groups
}

pub fn clone_table(stmt: &AnnotatedStatement, ctx: &ApplicationContext) -> Vec<Finding> {
    let Some(table) = is_defining_statement(stmt, ctx) else {
        return Vec::new();
    };
    let table_key = canonical(&table);
    let Some(base) = clone_base(&table_key) else {
        return Vec::new();
    };
    let groups = clone_groups(ctx);
    let Some(members) = groups.get(&base) else {
        return Vec::new();
    };
    // Anchor on the first member (canonical order) that has a defining DDL
    // statement; the context-level pass handles fully synthesized groups.
    let anchor = members
        .iter()
        .find(|m| ctx.schemas.get(*m).is_some_and(|s| s.created_by.is_some()));
    if anchor != Some(&table_key) {
        return Vec::new();
    }
    vec![clone_finding(ctx, &table_key, members, Some(stmt.source_id.clone()))]
}

fn clone_finding(
    ctx: &ApplicationContext,
    subject_key: &str,
    members: &[String],
    statement_id: Option<String>,
) -> Finding {
    let names: Vec<String> = members
        .iter()
        .map(|k| ctx.schemas.get(k).map(|s| s.name.clone()).unwrap_or_else(|| k.clone()))
        .collect();
    let subject = ctx
        .schemas
        .get(subject_key)
        .map(|s| s.name.clone())
        .unwrap_or_else(|| subject_key.to_string());
    inter(
        AntiPatternKind::CloneTable,
        Location::Table(subject),
        statement_id,
        format!(
            "tables {} share one structure split by a numeric suffix",
            names.join(", ")
        ),
    )
}

/// Column groups like `revenue2002`, `revenue2010` inside one table.
fn metadata_column_groups(schema: &TableSchema) -> Vec<(String, Vec<String>)> {
    let mut groups: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut order: Vec<String> = Vec::new();
    for col in &schema.columns {
        if let Some(base) = clone_base(&canonical(&col.name)) {
            let entry = groups.entry(base.clone()).or_default();
            if entry.is_empty() {
                order.push(base);
            }
            entry.push(col.name.clone());
        }
    }
    order
        .into_iter()
        .filter_map(|base| {
            let cols = groups.remove(&base)?;
            (cols.len() >= 2).then_some((base, cols))
        })
        .collect()
}

pub fn data_in_metadata(stmt: &AnnotatedStatement, ctx: &ApplicationContext) -> Vec<Finding> {
    let Some(table) = is_defining_statement(stmt, ctx) else {
        return Vec::new();
    };
    let schema = ctx.schema(&table).unwrap();
    data_in_metadata_for(schema, Some(stmt.source_id.clone()))
}

fn data_in_metadata_for(schema: &TableSchema, statement_id: Option<String>) -> Vec<Finding> {
    metadata_column_groups(schema)
        .into_iter()
        .map(|(base, cols)| {
            inter(
                AntiPatternKind::DataInMetadata,
                Location::Column(schema.name.clone(), cols[0].clone()),
                statement_id.clone(),
                format!(
                    "columns {} encode data ({}-series) in column names",
                    cols.join(", "),
                    base
                ),
            )
        })
        .collect()
}

/// Registered queries (SELECT/UPDATE/DELETE) with a value predicate on the
/// canonical `(table, column)`, in registry order.
fn queries_with_predicate<'a>(
    ctx: &'a ApplicationContext,
    table: &str,
    column: &str,
) -> Vec<&'a AnnotatedStatement> {
    ctx.query_registry
        .iter()
        .filter(|s| {
            matches!(
                s.kind,
                StatementKind::Select | StatementKind::Update | StatementKind::Delete
            ) && s.predicates.iter().any(|p| {
                p.column.table.as_deref().map(canonical) == Some(table.to_string())
                    && canonical(&p.column.column) == column
            })
        })
        .collect()
}

fn column_is_indexed(schema: &TableSchema, column: &str) -> bool {
    let c = canonical(column);
    schema.is_pk_column(column)
        || schema
            .indexes
            .iter()
            .any(|idx| idx.columns.iter().any(|ic| canonical(ic) == c))
        || schema.constraints.iter().any(|con| {
            con.kind == ConstraintKind::Unique && con.columns.iter().any(|cc| canonical(cc) == c)
        })
}

/// Missing-index detection, anchored on the first query using the predicate.
pub fn index_underuse(stmt: &AnnotatedStatement, ctx: &ApplicationContext) -> Vec<Finding> {
    let mut findings = Vec::new();
    let mut seen: BTreeSet<(String, String)> = BTreeSet::new();
    for pred in &stmt.predicates {
        let Some(table) = pred.column.table.as_deref() else { continue };
        let key = (canonical(table), canonical(&pred.column.column));
        if !seen.insert(key.clone()) {
            continue;
        }
        let Some(schema) = ctx.schema(table) else { continue };
        if column_is_indexed(schema, &pred.column.column) {
            continue;
        }
        let users = queries_with_predicate(ctx, &key.0, &key.1);
        if users.len() < ctx.build_config.index_use_min {
            continue;
        }
        if users.first().map(|s| s.source_id.as_str()) != Some(stmt.source_id.as_str()) {
            continue;
        }
        let column_name = schema
            .column(&pred.column.column)
            .map(|c| c.name.clone())
            .unwrap_or_else(|| pred.column.column.clone());
        findings.push(inter(
            AntiPatternKind::IndexUnderuse,
            Location::Column(schema.name.clone(), column_name.clone()),
            Some(stmt.source_id.clone()),
            format!(
                "{} queries filter on {}.{} but no index covers it",
                users.len(),
                schema.name,
                column_name
            ),
        ));
    }
    findings
}

/// Candidate access path for best-index selection.
struct Candidate {
    prefix_len: usize,
    is_pk: bool,
    width: usize,
    name: String,
}

fn prefix_match(columns: &[String], predicates: &BTreeSet<String>) -> usize {
    columns
        .iter()
        .take_while(|c| predicates.contains(&canonical(c)))
        .count()
}

/// The single index a query is expected to use: longest usable prefix wins,
/// the primary key wins ties, then the narrower index, then the name.
fn best_index_for(schema: &TableSchema, predicates: &BTreeSet<String>) -> Option<String> {
    let mut candidates: Vec<Candidate> = schema
        .indexes
        .iter()
        .map(|idx| Candidate {
            prefix_len: prefix_match(&idx.columns, predicates),
            is_pk: false,
            width: idx.columns.len(),
            name: idx.name.clone(),
        })
        .collect();
    if let Some(pk) = schema.primary_key() {
        candidates.push(Candidate {
            prefix_len: prefix_match(&pk.columns, predicates),
            is_pk: true,
            width: pk.columns.len(),
            name: format!("<primary key of {}>", schema.name),
        });
    }
    candidates.retain(|c| c.prefix_len >= 1);
    candidates.sort_by(|a, b| {
        b.prefix_len
            .cmp(&a.prefix_len)
            .then(b.is_pk.cmp(&a.is_pk))
            .then(a.width.cmp(&b.width))
            .then(a.name.cmp(&b.name))
    });
    candidates.into_iter().next().map(|c| c.name)
}

/// A registered index is redundant when the workload never picks it as the
/// best access path while other indexes serve every query on the table.
pub fn index_overuse(stmt: &AnnotatedStatement, ctx: &ApplicationContext) -> Vec<Finding> {
    let Some(parts) = &stmt.index_decl else {
        return Vec::new();
    };
    // Locate the schema this index was bound to during context build.
    let Some(schema) = ctx
        .schemas
        .values()
        .find(|s| s.indexes.iter().any(|i| i.source.as_deref() == Some(stmt.source_id.as_str())))
    else {
        return Vec::new();
    };
    let table_key = canonical(&schema.name);

    let workloads: Vec<BTreeSet<String>> = ctx
        .query_registry
        .iter()
        .filter(|s| {
            matches!(
                s.kind,
                StatementKind::Select | StatementKind::Update | StatementKind::Delete
            )
        })
        .filter_map(|s| {
            let preds: BTreeSet<String> = s
                .predicates
                .iter()
                .filter(|p| p.column.table.as_deref().map(canonical) == Some(table_key.clone()))
                .map(|p| canonical(&p.column.column))
                .collect();
            (!preds.is_empty()).then_some(preds)
        })
        .collect();
    if workloads.is_empty() {
        return Vec::new();
    }

    let used_somewhere = workloads
        .iter()
        .any(|preds| best_index_for(schema, preds).as_deref() == Some(parts.name.as_str()));
    if used_somewhere {
        return Vec::new();
    }
    vec![inter(
        AntiPatternKind::IndexOveruse,
        Location::Statement(stmt.source_id.clone()),
        Some(stmt.source_id.clone()),
        format!(
            "index {} on {} ({}) is never the best access path for the registered workload",
            parts.name,
            schema.name,
            parts.columns.join(", ")
        ),
    )]
}

const BOUNDED_NAME_SEGMENTS: &[&str] = &["rating", "percent", "percentage", "age"];

/// Name-based domain-constraint suspect; the data phase refines it (confirmed
/// findings dedup in its favor, contradicting profiles suppress it).
pub fn no_domain_constraint_name(
    stmt: &AnnotatedStatement,
    ctx: &ApplicationContext,
) -> Vec<Finding> {
    let Some(table) = is_defining_statement(stmt, ctx) else {
        return Vec::new();
    };
    let schema = ctx.schema(&table).unwrap();
    let mut findings = Vec::new();
    for col in &schema.columns {
        let named_bounded = canonical(&col.name)
            .split('_')
            .any(|seg| BOUNDED_NAME_SEGMENTS.contains(&seg));
        if !named_bounded || schema.has_check_on(&col.name) {
            continue;
        }
        let mut finding = inter(
            AntiPatternKind::NoDomainConstraint,
            Location::Column(schema.name.clone(), col.name.clone()),
            Some(stmt.source_id.clone()),
            format!(
                "{}.{} is named like a bounded quantity but has no CHECK constraint (heuristic)",
                schema.name, col.name
            ),
        );
        if let Some(profile) = ctx.profile(&table, &col.name) {
            if crate::profiler::conventional_range(profile).is_none() {
                finding.suppressed_by_context = true;
            }
        }
        findings.push(finding);
    }
    findings
}

/// Table-set rules for schemas with no defining statement (synthesized from
/// data): evaluated once over the context, after per-statement inter rules.
pub(super) fn context_level(ctx: &ApplicationContext) -> Vec<Finding> {
    let mut findings = Vec::new();
    for (base, members) in clone_groups(ctx) {
        let _ = base;
        let has_ddl_anchor = members
            .iter()
            .any(|m| ctx.schemas.get(m).is_some_and(|s| s.created_by.is_some()));
        if !has_ddl_anchor {
            findings.push(clone_finding(ctx, &members[0], &members, None));
        }
    }
    for schema in ctx.schemas.values() {
        if schema.created_by.is_none() {
            findings.extend(data_in_metadata_for(schema, None));
        }
    }
    for finding in &mut findings {
        finding.context_ref = Some(ctx.snapshot_id.clone());
    }
    findings
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::BuildConfig;
    use crate::context::build_context;
    use crate::frontend::parse_corpus;
    use crate::rules::detect_all;

    fn run(corpus: &str) -> Vec<Finding> {
        let stmts = parse_corpus(corpus, "fx");
        let ctx = build_context(stmts.clone(), None, BuildConfig::default());
        detect_all(&stmts, &ctx)
    }

    fn of_kind(findings: &[Finding], kind: AntiPatternKind) -> Vec<Finding> {
        findings.iter().filter(|f| f.kind == kind).cloned().collect()
    }

    const NO_FK_FIXTURE: &str = "
CREATE TABLE Tenant(Tenant_ID INTEGER PRIMARY KEY,
Zone_ID VARCHAR(30) NOT NULL, Active BOOLEAN);
CREATE TABLE Questionnaire (Questionnaire_ID UUID PRIMARY KEY,
Tenant_ID INTEGER, Name VARCHAR(30), Editable BOOLEAN);
SELECT q.Name, q.Editable, t.Active
FROM   Questionnaire q JOIN Tenant T
ON T.Tenant_ID = Q.Tenant_ID WHERE q.Editable = true;
";

    #[test]
    fn missing_foreign_key_found_on_child_side() {
        let findings = run(NO_FK_FIXTURE);
        let fk = of_kind(&findings, AntiPatternKind::NoForeignKey);
        assert_eq!(fk.len(), 1);
        assert_eq!(
            fk[0].location,
            Location::Column("Questionnaire".into(), "Tenant_ID".into())
        );
        assert_eq!(fk[0].phase, Phase::InterQuery);
        assert!(fk[0].context_ref.is_some());
    }

    #[test]
    fn intra_only_never_emits_no_foreign_key() {
        let stmts = parse_corpus(NO_FK_FIXTURE, "fx");
        for stmt in &stmts {
            assert!(of_kind(&crate::rules::detect_intra(stmt), AntiPatternKind::NoForeignKey)
                .is_empty());
        }
    }

    #[test]
    fn declared_primary_key_is_clean() {
        let findings = run("CREATE TABLE t (tid INTEGER PRIMARY KEY, a TEXT);");
        assert!(of_kind(&findings, AntiPatternKind::NoPrimaryKey).is_empty());
    }

    #[test]
    fn missing_primary_key_found_once() {
        let findings = run("CREATE TABLE t (a TEXT); ALTER TABLE t ADD COLUMN b INT;");
        let f = of_kind(&findings, AntiPatternKind::NoPrimaryKey);
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].location, Location::Table("t".into()));
    }

    #[test]
    fn primary_key_via_alter_is_clean() {
        let findings = run("CREATE TABLE t (a INT); ALTER TABLE t ADD PRIMARY KEY (a);");
        assert!(of_kind(&findings, AntiPatternKind::NoPrimaryKey).is_empty());
    }

    #[test]
    fn enumerated_types_from_alter_check() {
        let findings = run(
            "ALTER TABLE User ADD CONSTRAINT User_Role_Check CHECK (ROLE IN ('R1', 'R2', 'R3'));",
        );
        let f = of_kind(&findings, AntiPatternKind::EnumeratedTypes);
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].location, Location::Column("User".into(), "ROLE".into()));
        assert!(f[0].evidence.contains("User_Role_Check"));
    }

    #[test]
    fn adjacency_list_self_reference() {
        let findings = run(
            "CREATE TABLE emp (emp_id INTEGER PRIMARY KEY, manager_id INTEGER REFERENCES emp(emp_id));",
        );
        let f = of_kind(&findings, AntiPatternKind::AdjacencyList);
        assert_eq!(f.len(), 1);
        assert_eq!(
            f[0].location,
            Location::Column("emp".into(), "manager_id".into())
        );
    }

    #[test]
    fn clone_tables_by_numeric_suffix() {
        let findings = run(
            "CREATE TABLE orders_1 (a INT PRIMARY KEY); CREATE TABLE orders_2 (a INT PRIMARY KEY);",
        );
        let f = of_kind(&findings, AntiPatternKind::CloneTable);
        assert_eq!(f.len(), 1);
        assert!(f[0].evidence.contains("orders_1"));
        assert!(f[0].evidence.contains("orders_2"));
    }

    #[test]
    fn data_in_metadata_by_column_suffix() {
        let findings = run(
            "CREATE TABLE sales (store_id INTEGER PRIMARY KEY, revenue2002 INT, revenue2010 INT);",
        );
        let f = of_kind(&findings, AntiPatternKind::DataInMetadata);
        assert_eq!(f.len(), 1);
        assert!(f[0].evidence.contains("revenue2002"));
    }

    #[test]
    fn index_underuse_needs_two_queries_and_no_index() {
        let corpus = "
CREATE TABLE t (tid INTEGER PRIMARY KEY, zone VARCHAR(10));
SELECT tid FROM t WHERE zone = 'a';
SELECT tid FROM t WHERE zone = 'b';
";
        let f = of_kind(&run(corpus), AntiPatternKind::IndexUnderuse);
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].location, Location::Column("t".into(), "zone".into()));

        let indexed = format!("{corpus}\nCREATE INDEX idx_zone ON t (zone);");
        assert!(of_kind(&run(&indexed), AntiPatternKind::IndexUnderuse).is_empty());

        let once = "
CREATE TABLE t (tid INTEGER PRIMARY KEY, zone VARCHAR(10));
SELECT tid FROM t WHERE zone = 'a';
";
        assert!(of_kind(&run(once), AntiPatternKind::IndexUnderuse).is_empty());
    }

    const INDEX_FIXTURE_BASE: &str = "
CREATE TABLE Tenant(Tenant_ID INTEGER PRIMARY KEY,
Zone_ID VARCHAR(30) NOT NULL, Active BOOLEAN);
CREATE INDEX idx_zone_actv (Zone_ID, Active);
CREATE INDEX idx_zone (Zone_ID);
CREATE INDEX idx_actv (Active);
";

    fn redundant_indexes(findings: &[Finding]) -> Vec<String> {
        of_kind(findings, AntiPatternKind::IndexOveruse)
            .iter()
            .filter_map(|f| {
                f.evidence
                    .strip_prefix("index ")
                    .and_then(|rest| rest.split_whitespace().next())
                    .map(str::to_string)
            })
            .collect()
    }

    #[test]
    fn index_overuse_workload_one() {
        let corpus = format!(
            "{INDEX_FIXTURE_BASE}
SELECT Tenant_ID FROM Tenant WHERE Zone_ID = 'Z1' AND Active = 'True';
SELECT Tenant_ID FROM Tenant WHERE Tenant_ID = 'T1' AND Active = 'True';
"
        );
        let redundant = redundant_indexes(&run(&corpus));
        assert_eq!(redundant, vec!["idx_zone", "idx_actv"]);
    }

    #[test]
    fn index_overuse_workload_two() {
        let corpus = format!(
            "{INDEX_FIXTURE_BASE}
SELECT Tenant_ID FROM Tenant WHERE Zone_ID = 'Z1';
SELECT Tenant_ID FROM Tenant WHERE Active = 'True';
"
        );
        let redundant = redundant_indexes(&run(&corpus));
        assert_eq!(redundant, vec!["idx_zone_actv"]);
    }

    #[test]
    fn no_domain_constraint_by_name_without_check() {
        let findings = run("CREATE TABLE r (rid INTEGER PRIMARY KEY, user_rating INTEGER);");
        let f = of_kind(&findings, AntiPatternKind::NoDomainConstraint);
        assert_eq!(f.len(), 1);
        assert!(!f[0].suppressed_by_context);

        let checked = run(
            "CREATE TABLE r (rid INTEGER PRIMARY KEY, user_rating INTEGER CHECK (user_rating IN (1,2,3,4,5)));",
        );
        assert!(of_kind(&checked, AntiPatternKind::NoDomainConstraint).is_empty());
    }
}
