//! Statement classification and clause-level annotation.
//!
//! The annotator is non-validating: it classifies a statement by its leading
//! keyword, extracts clauses by keyword boundaries at parenthesis depth zero,
//! and leaves anything it does not understand verbatim in the token stream
//! (present in `tokens`, absent from `clauses`). It never rejects input.

use std::collections::BTreeMap;

use super::lexer::{tokenize, Token, TokenKind};
use super::splitter::RawStatement;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StatementKind {
    Select,
    Insert,
    Update,
    Delete,
    CreateTable,
    AlterTable,
    CreateIndex,
    DropX,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClauseRole {
    Projection,
    From,
    Joins,
    Where,
    GroupBy,
    OrderBy,
    Values,
    ColumnList,
    ConstraintList,
    IndexColumns,
}

/// Half-open token index range into `AnnotatedStatement::tokens`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClauseSpan {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintKind {
    PrimaryKey,
    ForeignKey,
    Check,
    Unique,
    NotNull,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintDecl {
    pub kind: ConstraintKind,
    pub name: Option<String>,
    pub columns: Vec<String>,
    /// Referenced `(table, column)` for foreign keys; the column may be
    /// omitted in the source, in which case it resolves to the target's
    /// primary key downstream.
    pub target: Option<(String, Option<String>)>,
    pub expression_text: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnDef {
    pub name: String,
    pub declared_type: String,
    pub nullable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlterAction {
    AddColumn(ColumnDef),
    DropColumn(String),
    AddConstraint(ConstraintDecl),
    DropConstraint(String),
    Other,
}

/// A `(table?, column)` reference. Table is present when the reference was
/// qualified (after alias resolution) or unambiguous from a single-table scope.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ColumnRef {
    pub table: Option<String>,
    pub column: String,
}

impl ColumnRef {
    pub fn canonical(&self) -> (Option<String>, String) {
        (
            self.table.as_deref().map(canonical),
            canonical(&self.column),
        )
    }
}

/// A comparison predicate on a named column in a WHERE clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Predicate {
    pub column: ColumnRef,
    pub operator: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexParts {
    pub name: String,
    pub table: Option<String>,
    pub columns: Vec<String>,
    pub unique: bool,
}

/// Canonical identifier form used for every lookup: quotes stripped,
/// lowercased. Original casing is preserved in the annotation fields.
pub fn canonical(name: &str) -> String {
    let t = name.trim();
    let t = if t.len() >= 2 {
        let b = t.as_bytes();
        match (b[0], b[t.len() - 1]) {
            (b'"', b'"') | (b'`', b'`') => &t[1..t.len() - 1],
            _ => t,
        }
    } else {
        t
    };
    t.to_lowercase()
}

#[derive(Debug, Clone)]
pub struct AnnotatedStatement {
    pub kind: StatementKind,
    pub tokens: Vec<Token>,
    pub clauses: BTreeMap<ClauseRole, ClauseSpan>,
    pub tables_referenced: Vec<String>,
    pub columns_referenced: Vec<ColumnRef>,
    pub constraints: Vec<ConstraintDecl>,
    pub has_wildcard_projection: bool,
    pub join_count: usize,
    pub distinct_present: bool,
    pub source_id: String,
    /// Set when the raw text had no usable tokens at all.
    pub diagnostic: bool,

    /// Main table of DML/DDL statements (insert target, updated table, ...).
    pub target_table: Option<String>,
    /// Alias (canonical) to table name (original casing).
    pub aliases: BTreeMap<String, String>,
    /// Column definitions contributed by CREATE TABLE or ALTER TABLE ADD.
    pub columns_defined: Vec<ColumnDef>,
    pub alter_actions: Vec<AlterAction>,
    pub index_decl: Option<IndexParts>,
    /// Column-to-column equalities seen in JOIN ON and WHERE clauses.
    pub join_equalities: Vec<(ColumnRef, ColumnRef)>,
    /// Columns compared against values in the WHERE clause.
    pub predicates: Vec<Predicate>,
    /// Number of value tuples and the arity of the first one, for INSERTs.
    pub values_arity: Option<usize>,
}

impl AnnotatedStatement {
    pub fn clause_text(&self, role: ClauseRole) -> Option<String> {
        self.clauses.get(&role).map(|span| {
            self.tokens[span.start..span.end]
                .iter()
                .map(|t| t.text.as_str())
                .collect::<String>()
                .trim()
                .to_string()
        })
    }

    pub fn references_table(&self, table: &str) -> bool {
        let c = canonical(table);
        self.tables_referenced.iter().any(|t| canonical(t) == c)
    }

    pub fn references_column(&self, table: &str, column: &str) -> bool {
        let (tc, cc) = (canonical(table), canonical(column));
        self.columns_referenced.iter().any(|r| {
            canonical(&r.column) == cc
                && match &r.table {
                    Some(t) => canonical(t) == tc,
                    None => self.references_table(table),
                }
        })
    }

    /// Semantic annotation summary used for round-trip comparisons. Clause
    /// contents are whitespace-normalized so formatting changes do not count.
    pub fn annotation_summary(&self) -> AnnotationSummary {
        AnnotationSummary {
            kind: self.kind,
            clauses: self
                .clauses
                .keys()
                .map(|role| (*role, squash_ws(&self.clause_text(*role).unwrap_or_default())))
                .collect(),
            tables: self.tables_referenced.iter().map(|t| canonical(t)).collect(),
            columns: {
                let mut cols: Vec<_> = self.columns_referenced.iter().map(|c| c.canonical()).collect();
                cols.sort();
                cols.dedup();
                cols
            },
            constraints: self.constraints.iter().map(summarize_constraint).collect(),
            has_wildcard_projection: self.has_wildcard_projection,
            join_count: self.join_count,
            distinct_present: self.distinct_present,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationSummary {
    pub kind: StatementKind,
    pub clauses: BTreeMap<ClauseRole, String>,
    pub tables: Vec<String>,
    pub columns: Vec<(Option<String>, String)>,
    pub constraints: Vec<String>,
    pub has_wildcard_projection: bool,
    pub join_count: usize,
    pub distinct_present: bool,
}

fn summarize_constraint(c: &ConstraintDecl) -> String {
    format!(
        "{:?} cols={:?} target={:?} expr={:?}",
        c.kind,
        c.columns.iter().map(|x| canonical(x)).collect::<Vec<_>>(),
        c.target
            .as_ref()
            .map(|(t, col)| (canonical(t), col.as_deref().map(canonical))),
        c.expression_text.as_deref().map(squash_ws),
    )
}

fn squash_ws(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[derive(Debug, thiserror::Error)]
pub enum RenderError {
    #[error("inconsistent clause span {role:?} ({start}..{end}) over {len} tokens")]
    InconsistentSpan {
        role: ClauseRole,
        start: usize,
        end: usize,
        len: usize,
    },
}

/// Render a statement back to SQL by reassembling its token stream. Fails
/// only when a transformation left a clause span pointing outside the tokens,
/// which signals a repair-engine bug.
pub fn render(stmt: &AnnotatedStatement) -> Result<String, RenderError> {
    let len = stmt.tokens.len();
    for (role, span) in &stmt.clauses {
        if span.start > span.end || span.end > len {
            return Err(RenderError::InconsistentSpan {
                role: *role,
                start: span.start,
                end: span.end,
                len,
            });
        }
    }
    let mut spans: Vec<(ClauseRole, ClauseSpan)> =
        stmt.clauses.iter().map(|(r, s)| (*r, *s)).collect();
    spans.sort_by_key(|(_, s)| s.start);
    for pair in spans.windows(2) {
        if pair[0].1.end > pair[1].1.start {
            return Err(RenderError::InconsistentSpan {
                role: pair[1].0,
                start: pair[1].1.start,
                end: pair[1].1.end,
                len,
            });
        }
    }
    Ok(stmt.tokens.iter().map(|t| t.text.as_str()).collect())
}

/// Parse one raw statement. Total and deterministic.
pub fn parse(raw: &RawStatement) -> AnnotatedStatement {
    let tokens = tokenize(&raw.text);
    let mut stmt = AnnotatedStatement {
        kind: StatementKind::Other,
        tokens,
        clauses: BTreeMap::new(),
        tables_referenced: Vec::new(),
        columns_referenced: Vec::new(),
        constraints: Vec::new(),
        has_wildcard_projection: false,
        join_count: 0,
        distinct_present: false,
        source_id: raw.source_id.clone(),
        diagnostic: false,
        target_table: None,
        aliases: BTreeMap::new(),
        columns_defined: Vec::new(),
        alter_actions: Vec::new(),
        index_decl: None,
        join_equalities: Vec::new(),
        predicates: Vec::new(),
        values_arity: None,
    };

    if stmt.tokens.iter().all(|t| t.is_trivia()) {
        stmt.tokens.push(Token::new(TokenKind::Opaque, ""));
        stmt.diagnostic = true;
        return stmt;
    }

    let cursor = Cursor::new(&stmt.tokens);
    stmt.kind = classify(&cursor);

    match stmt.kind {
        StatementKind::Select => annotate_select(&mut stmt),
        StatementKind::Insert => annotate_insert(&mut stmt),
        StatementKind::Update => annotate_update(&mut stmt),
        StatementKind::Delete => annotate_delete(&mut stmt),
        StatementKind::CreateTable => annotate_create_table(&mut stmt),
        StatementKind::AlterTable => annotate_alter_table(&mut stmt),
        StatementKind::CreateIndex => annotate_create_index(&mut stmt),
        StatementKind::DropX => annotate_drop(&mut stmt),
        StatementKind::Other => {}
    }

    dedup_references(&mut stmt);
    stmt
}

fn dedup_references(stmt: &mut AnnotatedStatement) {
    let mut seen = std::collections::BTreeSet::new();
    stmt.tables_referenced.retain(|t| seen.insert(canonical(t)));
    let mut seen_cols = std::collections::BTreeSet::new();
    stmt.columns_referenced.retain(|c| seen_cols.insert(c.canonical()));
}

/// Significant-token view over the full token list; positions map back to
/// full-token indices so clause spans stay valid against `tokens`.
struct Cursor<'a> {
    tokens: &'a [Token],
    sig: Vec<usize>,
}

impl<'a> Cursor<'a> {
    fn new(tokens: &'a [Token]) -> Self {
        let sig = tokens
            .iter()
            .enumerate()
            .filter(|(_, t)| !t.is_trivia())
            .map(|(i, _)| i)
            .collect();
        Cursor { tokens, sig }
    }

    fn len(&self) -> usize {
        self.sig.len()
    }

    fn tok(&self, pos: usize) -> Option<&Token> {
        self.sig.get(pos).map(|&i| &self.tokens[i])
    }

    fn full_index(&self, pos: usize) -> usize {
        self.sig
            .get(pos)
            .copied()
            .unwrap_or(self.tokens.len())
    }

    fn is_kw(&self, pos: usize, kw: &str) -> bool {
        self.tok(pos).is_some_and(|t| t.is_keyword(kw))
    }

    fn is_punct(&self, pos: usize, p: &str) -> bool {
        self.tok(pos).is_some_and(|t| t.is_punct(p))
    }

    /// Position just past a balanced paren group starting at `pos` (which must
    /// be `(`). Tolerant of unbalanced input: stops at end.
    fn skip_group(&self, pos: usize) -> usize {
        debug_assert!(self.is_punct(pos, "("));
        let mut depth = 0usize;
        let mut p = pos;
        while p < self.len() {
            if self.is_punct(p, "(") {
                depth += 1;
            } else if self.is_punct(p, ")") {
                depth = depth.saturating_sub(1);
                if depth == 0 {
                    return p + 1;
                }
            }
            p += 1;
        }
        p
    }
}

fn classify(c: &Cursor) -> StatementKind {
    let first = match c.tok(0) {
        Some(t) => t,
        None => return StatementKind::Other,
    };
    if first.kind != TokenKind::Keyword {
        return StatementKind::Other;
    }
    let second_kw = |kw: &str| c.is_kw(1, kw);
    if first.is_keyword("SELECT") {
        StatementKind::Select
    } else if first.is_keyword("INSERT") {
        StatementKind::Insert
    } else if first.is_keyword("UPDATE") {
        StatementKind::Update
    } else if first.is_keyword("DELETE") {
        StatementKind::Delete
    } else if first.is_keyword("CREATE") {
        if second_kw("TABLE") {
            StatementKind::CreateTable
        } else if second_kw("INDEX") || (second_kw("UNIQUE") && c.is_kw(2, "INDEX")) {
            StatementKind::CreateIndex
        } else {
            StatementKind::Other
        }
    } else if first.is_keyword("ALTER") {
        if second_kw("TABLE") {
            StatementKind::AlterTable
        } else {
            StatementKind::Other
        }
    } else if first.is_keyword("DROP") {
        StatementKind::DropX
    } else {
        StatementKind::Other
    }
}

/// Keywords that terminate a clause at depth zero in query statements.
fn is_clause_boundary(t: &Token) -> bool {
    const BOUNDARIES: &[&str] = &[
        "FROM", "WHERE", "GROUP", "ORDER", "HAVING", "LIMIT", "OFFSET", "UNION", "EXCEPT",
        "INTERSECT", "SET", "VALUES", "RETURNING",
    ];
    t.kind == TokenKind::Keyword && BOUNDARIES.iter().any(|b| t.is_keyword(b))
}

fn is_join_keyword(t: &Token) -> bool {
    const JOINS: &[&str] = &["JOIN", "INNER", "LEFT", "RIGHT", "FULL", "CROSS", "NATURAL"];
    t.kind == TokenKind::Keyword && JOINS.iter().any(|j| t.is_keyword(j))
}

/// Scan forward from `pos` (significant positions) to the first depth-zero
/// position matching `stop`; returns the position (or end).
fn scan_until(c: &Cursor, mut pos: usize, stop: impl Fn(&Token) -> bool) -> usize {
    let mut depth = 0usize;
    while pos < c.len() {
        let t = c.tok(pos).unwrap();
        if t.is_punct("(") {
            depth += 1;
        } else if t.is_punct(")") {
            depth = depth.saturating_sub(1);
        } else if depth == 0 && (stop(t) || t.is_punct(";")) {
            return pos;
        }
        pos += 1;
    }
    pos
}

/// Record a clause span tight around its significant tokens: leading and
/// trailing trivia stay outside the span so splicing a clause preserves the
/// whitespace around it.
fn record_span(stmt: &mut AnnotatedStatement, c: &Cursor, role: ClauseRole, from: usize, to: usize) {
    if from < to {
        stmt.clauses.insert(
            role,
            ClauseSpan {
                start: c.full_index(from),
                end: c.full_index(to - 1) + 1,
            },
        );
    }
}

fn annotate_select(stmt: &mut AnnotatedStatement) {
    let tokens = stmt.tokens.clone();
    let c = Cursor::new(&tokens);
    let mut pos = 1; // past SELECT

    if c.is_kw(pos, "DISTINCT") {
        stmt.distinct_present = true;
        pos += 1;
    } else if c.is_kw(pos, "ALL") {
        pos += 1;
    }

    let proj_start = pos;
    let proj_end = scan_until(&c, pos, is_clause_boundary);
    record_span(stmt, &c, ClauseRole::Projection, proj_start, proj_end);
    stmt.has_wildcard_projection = projection_has_wildcard(&c, proj_start, proj_end);
    pos = proj_end;

    let mut from_tables: Vec<(String, Option<String>)> = Vec::new();
    let mut comma_tables = 0usize;

    if c.is_kw(pos, "FROM") {
        pos += 1;
        let from_start = pos;
        let from_end = scan_until(&c, pos, |t| is_clause_boundary(t) || is_join_keyword(t));
        record_span(stmt, &c, ClauseRole::From, from_start, from_end);
        comma_tables = parse_table_list(&c, from_start, from_end, &mut from_tables);
        pos = from_end;

        if c.tok(pos).is_some_and(is_join_keyword) {
            let joins_start = pos;
            let joins_end = scan_until(&c, pos, is_clause_boundary);
            record_span(stmt, &c, ClauseRole::Joins, joins_start, joins_end);
            parse_joins(&c, joins_start, joins_end, stmt, &mut from_tables);
            pos = joins_end;
        }
    }

    for (table, alias) in &from_tables {
        stmt.tables_referenced.push(table.clone());
        if let Some(a) = alias {
            stmt.aliases.insert(canonical(a), table.clone());
        }
    }
    stmt.join_count += comma_tables;

    pos = annotate_tail_clauses(stmt, &c, pos);
    let _ = pos;

    collect_column_refs(stmt);
    collect_equalities_and_predicates(stmt);
}

fn annotate_tail_clauses(stmt: &mut AnnotatedStatement, c: &Cursor, mut pos: usize) -> usize {
    while pos < c.len() {
        if c.is_kw(pos, "WHERE") {
            let start = pos + 1;
            let end = scan_until(c, start, is_clause_boundary);
            record_span(stmt, c, ClauseRole::Where, start, end);
            pos = end;
        } else if c.is_kw(pos, "GROUP") && c.is_kw(pos + 1, "BY") {
            let start = pos + 2;
            let end = scan_until(c, start, is_clause_boundary);
            record_span(stmt, c, ClauseRole::GroupBy, start, end);
            pos = end;
        } else if c.is_kw(pos, "ORDER") && c.is_kw(pos + 1, "BY") {
            let start = pos + 2;
            let end = scan_until(c, start, is_clause_boundary);
            record_span(stmt, c, ClauseRole::OrderBy, start, end);
            pos = end;
        } else {
            pos += 1;
        }
    }
    pos
}

fn projection_has_wildcard(c: &Cursor, start: usize, end: usize) -> bool {
    let mut depth = 0usize;
    for pos in start..end {
        let t = c.tok(pos).unwrap();
        if t.is_punct("(") {
            depth += 1;
        } else if t.is_punct(")") {
            depth = depth.saturating_sub(1);
        } else if depth == 0 && t.is_operator("*") {
            // `*` or `t.*`; a bare multiply would sit between two operands,
            // which cannot happen at projection depth zero right after a
            // comma/start unless it is the wildcard. Good enough, tolerant.
            return true;
        }
    }
    false
}

/// Parse a comma-separated table list; returns the number of commas at depth
/// zero (implicit-join count contribution).
fn parse_table_list(
    c: &Cursor,
    start: usize,
    end: usize,
    out: &mut Vec<(String, Option<String>)>,
) -> usize {
    let mut commas = 0usize;
    let mut pos = start;
    while pos < end {
        if c.is_punct(pos, "(") {
            pos = c.skip_group(pos);
            // Optional alias after a derived table; ignored for table refs.
            if c.is_kw(pos, "AS") {
                pos += 1;
            }
            if c.tok(pos).is_some_and(|t| t.kind == TokenKind::Ident) {
                pos += 1;
            }
        } else if let Some((table, alias, next)) = parse_table_ref(c, pos, end) {
            out.push((table, alias));
            pos = next;
        } else {
            pos += 1;
        }
        if pos < end && c.is_punct(pos, ",") {
            commas += 1;
            pos += 1;
        }
    }
    commas
}

/// `schema.table [AS] [alias]` starting at `pos`; returns (table, alias, next).
fn parse_table_ref(c: &Cursor, pos: usize, end: usize) -> Option<(String, Option<String>, usize)> {
    let t = c.tok(pos)?;
    if t.kind != TokenKind::Ident {
        return None;
    }
    let mut name = t.ident_text().to_string();
    let mut p = pos + 1;
    while p + 1 < end && c.is_punct(p, ".") && c.tok(p + 1).is_some_and(|t| t.kind == TokenKind::Ident)
    {
        name = c.tok(p + 1).unwrap().ident_text().to_string();
        p += 2;
    }
    let mut alias = None;
    if p < end && c.is_kw(p, "AS") {
        p += 1;
    }
    if p < end {
        if let Some(t) = c.tok(p) {
            if t.kind == TokenKind::Ident {
                alias = Some(t.ident_text().to_string());
                p += 1;
            }
        }
    }
    Some((name, alias, p))
}

fn parse_joins(
    c: &Cursor,
    start: usize,
    end: usize,
    stmt: &mut AnnotatedStatement,
    tables: &mut Vec<(String, Option<String>)>,
) {
    let mut pos = start;
    while pos < end {
        let t = c.tok(pos).unwrap();
        if t.is_keyword("JOIN") {
            stmt.join_count += 1;
            if let Some((table, alias, next)) = parse_table_ref(c, pos + 1, end) {
                tables.push((table, alias));
                pos = next;
                continue;
            }
        }
        pos += 1;
    }
}

/// Collect column references from the clause spans that can contain them.
fn collect_column_refs(stmt: &mut AnnotatedStatement) {
    let roles = [
        ClauseRole::Projection,
        ClauseRole::Joins,
        ClauseRole::Where,
        ClauseRole::GroupBy,
        ClauseRole::OrderBy,
    ];
    let single_table = if stmt.tables_referenced.len() == 1 {
        Some(stmt.tables_referenced[0].clone())
    } else {
        None
    };
    let spans: Vec<ClauseSpan> = roles
        .iter()
        .filter_map(|r| stmt.clauses.get(r).copied())
        .collect();
    let mut refs = Vec::new();
    for span in spans {
        scan_refs(
            &stmt.tokens[span.start..span.end],
            &stmt.aliases,
            &single_table,
            &mut refs,
        );
    }
    stmt.columns_referenced.extend(refs);
}

/// Scan a token slice for `ident` / `ident.ident` column references, skipping
/// function names, join keywords, and table refs that follow FROM/JOIN/ON
/// positions handled elsewhere.
fn scan_refs(
    tokens: &[Token],
    aliases: &BTreeMap<String, String>,
    single_table: &Option<String>,
    out: &mut Vec<ColumnRef>,
) {
    let sig: Vec<&Token> = tokens.iter().filter(|t| !t.is_trivia()).collect();
    let mut i = 0;
    while i < sig.len() {
        let t = sig[i];
        if t.kind == TokenKind::Ident {
            // Function call: ident immediately followed by `(`.
            if sig.get(i + 1).is_some_and(|n| n.is_punct("(")) {
                i += 1;
                continue;
            }
            // Qualified pair `a.b` (or `a.*` wildcard, skipped).
            if sig.get(i + 1).is_some_and(|n| n.is_punct(".")) {
                if let Some(next) = sig.get(i + 2) {
                    if next.kind == TokenKind::Ident {
                        let qualifier = t.ident_text().to_string();
                        let table = aliases
                            .get(&canonical(&qualifier))
                            .cloned()
                            .unwrap_or(qualifier);
                        out.push(ColumnRef {
                            table: Some(table),
                            column: next.ident_text().to_string(),
                        });
                        i += 3;
                        continue;
                    }
                }
                i += 2;
                continue;
            }
            // JOIN-clause table names are consumed by parse_joins; a bare
            // ident directly after JOIN/AS is a table or alias, not a column.
            let prev_kw = i
                .checked_sub(1)
                .and_then(|p| sig.get(p))
                .filter(|p| p.kind == TokenKind::Keyword);
            if prev_kw.is_some_and(|p| p.is_keyword("JOIN") || p.is_keyword("AS")) {
                i += 1;
                continue;
            }
            out.push(ColumnRef {
                table: single_table.clone(),
                column: t.ident_text().to_string(),
            });
        }
        i += 1;
    }
}

/// Extract column=column equalities (join graph) and column-vs-value
/// predicates from the WHERE and JOIN clauses.
fn collect_equalities_and_predicates(stmt: &mut AnnotatedStatement) {
    let single_table = if stmt.tables_referenced.len() == 1 {
        Some(stmt.tables_referenced[0].clone())
    } else {
        None
    };
    let mut equalities = Vec::new();
    let mut predicates = Vec::new();

    for (role, span) in &stmt.clauses {
        let in_where = *role == ClauseRole::Where;
        let in_joins = *role == ClauseRole::Joins;
        if !in_where && !in_joins {
            continue;
        }
        let sig: Vec<&Token> = stmt.tokens[span.start..span.end]
            .iter()
            .filter(|t| !t.is_trivia())
            .collect();
        let mut i = 0;
        while i < sig.len() {
            if let Some((left, left_len)) = read_column_operand(&sig, i, &stmt.aliases, &single_table)
            {
                let op_pos = i + left_len;
                if let Some(op) = sig.get(op_pos) {
                    let op_text = op.text.to_uppercase();
                    let comparison = matches!(
                        op_text.as_str(),
                        "=" | "==" | "<" | ">" | "<=" | ">=" | "<>" | "!="
                    ) || (op.kind == TokenKind::Keyword
                        && matches!(op_text.as_str(), "LIKE" | "IN" | "BETWEEN"));
                    if comparison {
                        let rhs = op_pos + 1;
                        if let Some((right, _)) =
                            read_column_operand(&sig, rhs, &stmt.aliases, &single_table)
                        {
                            let equality = matches!(op_text.as_str(), "=" | "==");
                            if equality && right.table != left.table {
                                equalities.push((left.clone(), right));
                            }
                        } else if sig.get(rhs).is_some_and(|t| {
                            matches!(t.kind, TokenKind::StringLit | TokenKind::Number)
                                || t.is_keyword("TRUE")
                                || t.is_keyword("FALSE")
                        })
                            && in_where {
                                predicates.push(Predicate {
                                    column: left.clone(),
                                    operator: op_text,
                                });
                            }
                        i = op_pos + 1;
                        continue;
                    }
                }
                i += left_len;
                continue;
            }
            i += 1;
        }
    }

    stmt.join_equalities.extend(equalities);
    stmt.predicates.extend(predicates);
}

/// Read `ident` or `ident.ident` as a column operand; rejects function calls.
fn read_column_operand(
    sig: &[&Token],
    i: usize,
    aliases: &BTreeMap<String, String>,
    single_table: &Option<String>,
) -> Option<(ColumnRef, usize)> {
    let t = sig.get(i)?;
    if t.kind != TokenKind::Ident {
        return None;
    }
    if sig.get(i + 1).is_some_and(|n| n.is_punct("(")) {
        return None;
    }
    if sig.get(i + 1).is_some_and(|n| n.is_punct(".")) {
        let next = sig.get(i + 2)?;
        if next.kind == TokenKind::Ident {
            let qualifier = t.ident_text().to_string();
            let table = aliases
                .get(&canonical(&qualifier))
                .cloned()
                .unwrap_or(qualifier);
            return Some((
                ColumnRef {
                    table: Some(table),
                    column: next.ident_text().to_string(),
                },
                3,
            ));
        }
        return None;
    }
    Some((
        ColumnRef {
            table: single_table.clone(),
            column: t.ident_text().to_string(),
        },
        1,
    ))
}

fn annotate_insert(stmt: &mut AnnotatedStatement) {
    let tokens = stmt.tokens.clone();
    let c = Cursor::new(&tokens);
    let mut pos = 1;
    if c.is_kw(pos, "INTO") {
        pos += 1;
    }
    if let Some((table, _, next)) = parse_table_ref(&c, pos, c.len()) {
        stmt.target_table = Some(table.clone());
        stmt.tables_referenced.push(table);
        pos = next;
    }
    // Column list: a paren group appearing before VALUES/SELECT.
    if c.is_punct(pos, "(") {
        let group_end = c.skip_group(pos);
        record_span(stmt, &c, ClauseRole::ColumnList, pos, group_end);
        let table = stmt.target_table.clone();
        let mut p = pos + 1;
        while p + 1 < group_end {
            if let Some(t) = c.tok(p) {
                if t.kind == TokenKind::Ident {
                    stmt.columns_referenced.push(ColumnRef {
                        table: table.clone(),
                        column: t.ident_text().to_string(),
                    });
                }
            }
            p += 1;
        }
        pos = group_end;
    }
    if c.is_kw(pos, "VALUES") {
        let start = pos + 1;
        let end = scan_until(&c, start, is_clause_boundary);
        record_span(stmt, &c, ClauseRole::Values, start, end);
        if c.is_punct(start, "(") {
            let group_end = c.skip_group(start);
            let mut arity = 1usize;
            let mut depth = 0usize;
            for p in start..group_end {
                let t = c.tok(p).unwrap();
                if t.is_punct("(") {
                    depth += 1;
                } else if t.is_punct(")") {
                    depth = depth.saturating_sub(1);
                } else if depth == 1 && t.is_punct(",") {
                    arity += 1;
                }
            }
            stmt.values_arity = Some(arity);
        }
    }
}

fn annotate_update(stmt: &mut AnnotatedStatement) {
    let tokens = stmt.tokens.clone();
    let c = Cursor::new(&tokens);
    let pos = 1;
    if let Some((table, alias, mut next)) = parse_table_ref(&c, pos, c.len()) {
        stmt.target_table = Some(table.clone());
        stmt.tables_referenced.push(table.clone());
        if let Some(a) = alias {
            stmt.aliases.insert(canonical(&a), table.clone());
        }
        if c.is_kw(next, "SET") {
            next += 1;
            let end = scan_until(&c, next, |t| {
                t.is_keyword("WHERE") || t.is_keyword("FROM") || t.is_keyword("RETURNING")
            });
            // SET assignment targets are column references on the table.
            let mut p = next;
            while p < end {
                if let Some(t) = c.tok(p) {
                    if t.kind == TokenKind::Ident
                        && c.tok(p + 1).is_some_and(|n| n.is_operator("="))
                    {
                        stmt.columns_referenced.push(ColumnRef {
                            table: Some(table.clone()),
                            column: t.ident_text().to_string(),
                        });
                    }
                }
                p += 1;
            }
            annotate_tail_clauses(stmt, &c, end);
        } else {
            annotate_tail_clauses(stmt, &c, next);
        }
    }
    collect_column_refs(stmt);
    collect_equalities_and_predicates(stmt);
}

fn annotate_delete(stmt: &mut AnnotatedStatement) {
    let tokens = stmt.tokens.clone();
    let c = Cursor::new(&tokens);
    let mut pos = 1;
    if c.is_kw(pos, "FROM") {
        pos += 1;
    }
    if let Some((table, alias, next)) = parse_table_ref(&c, pos, c.len()) {
        stmt.target_table = Some(table.clone());
        stmt.tables_referenced.push(table.clone());
        if let Some(a) = alias {
            stmt.aliases.insert(canonical(&a), table);
        }
        annotate_tail_clauses(stmt, &c, next);
    }
    collect_column_refs(stmt);
    collect_equalities_and_predicates(stmt);
}

fn annotate_create_table(stmt: &mut AnnotatedStatement) {
    let tokens = stmt.tokens.clone();
    let c = Cursor::new(&tokens);
    let mut pos = 2; // past CREATE TABLE
    if c.is_kw(pos, "IF") {
        // IF NOT EXISTS
        pos += 1;
        if c.is_kw(pos, "NOT") {
            pos += 1;
        }
        if c.is_kw(pos, "EXISTS") {
            pos += 1;
        }
    }
    let table = match c.tok(pos) {
        Some(t) if t.kind == TokenKind::Ident => t.ident_text().to_string(),
        _ => return,
    };
    stmt.target_table = Some(table.clone());
    stmt.tables_referenced.push(table.clone());
    pos += 1;
    while pos + 1 < c.len() && c.is_punct(pos, ".") {
        if let Some(t) = c.tok(pos + 1) {
            if t.kind == TokenKind::Ident {
                let name = t.ident_text().to_string();
                stmt.target_table = Some(name.clone());
                stmt.tables_referenced.pop();
                stmt.tables_referenced.push(name);
            }
        }
        pos += 2;
    }

    if !c.is_punct(pos, "(") {
        return;
    }
    let body_end = c.skip_group(pos);
    record_span(stmt, &c, ClauseRole::ConstraintList, pos, body_end);

    // Split the body into definition items at depth-1 commas.
    let mut items: Vec<(usize, usize)> = Vec::new();
    let mut depth = 0usize;
    let mut item_start = pos + 1;
    for p in pos..body_end {
        let t = c.tok(p).unwrap();
        if t.is_punct("(") {
            depth += 1;
        } else if t.is_punct(")") {
            depth -= if depth > 0 { 1 } else { 0 };
            if depth == 0 && p > item_start {
                items.push((item_start, p));
            }
        } else if depth == 1 && t.is_punct(",") {
            if p > item_start {
                items.push((item_start, p));
            }
            item_start = p + 1;
        }
    }

    for (start, end) in items {
        parse_definition_item(&c, start, end, &table, stmt);
    }

    for col in &stmt.columns_defined {
        stmt.columns_referenced.push(ColumnRef {
            table: Some(table.clone()),
            column: col.name.clone(),
        });
    }
}

/// One item of a CREATE TABLE body: either a column definition or a
/// table-level constraint.
fn parse_definition_item(
    c: &Cursor,
    start: usize,
    end: usize,
    _table: &str,
    stmt: &mut AnnotatedStatement,
) {
    let mut pos = start;
    let mut name: Option<String> = None;
    if c.is_kw(pos, "CONSTRAINT") {
        if let Some(t) = c.tok(pos + 1) {
            name = Some(t.ident_text().to_string());
        }
        pos += 2;
    }

    if let Some(constraint) = parse_table_constraint(c, pos, end, name.clone()) {
        stmt.constraints.push(constraint);
        return;
    }

    // Column definition.
    let col_name = match c.tok(pos) {
        Some(t) if t.kind == TokenKind::Ident => t.ident_text().to_string(),
        _ => return,
    };
    pos += 1;
    let type_start = pos;
    let mut type_end = pos;
    while type_end < end {
        let t = c.tok(type_end).unwrap();
        if t.kind == TokenKind::Keyword
            && !t.is_keyword("KEY") // e.g. nothing; types are idents/keywords like VARCHAR
            && (t.is_keyword("PRIMARY")
                || t.is_keyword("NOT")
                || t.is_keyword("NULL")
                || t.is_keyword("UNIQUE")
                || t.is_keyword("REFERENCES")
                || t.is_keyword("CHECK")
                || t.is_keyword("DEFAULT")
                || t.is_keyword("CONSTRAINT"))
        {
            break;
        }
        if t.is_punct("(") {
            type_end = c.skip_group(type_end);
            continue;
        }
        type_end += 1;
    }
    let declared_type = span_text(c, type_start, type_end);
    let mut column = ColumnDef {
        name: col_name.clone(),
        declared_type,
        nullable: true,
    };

    // Column-level constraints.
    pos = type_end;
    let mut pending_name: Option<String> = None;
    while pos < end {
        let t = match c.tok(pos) {
            Some(t) => t,
            None => break,
        };
        if t.is_keyword("CONSTRAINT") {
            pending_name = c.tok(pos + 1).map(|t| t.ident_text().to_string());
            pos += 2;
        } else if t.is_keyword("PRIMARY") {
            column.nullable = false;
            stmt.constraints.push(ConstraintDecl {
                kind: ConstraintKind::PrimaryKey,
                name: pending_name.take(),
                columns: vec![col_name.clone()],
                target: None,
                expression_text: None,
            });
            pos += if c.is_kw(pos + 1, "KEY") { 2 } else { 1 };
        } else if t.is_keyword("NOT") && c.is_kw(pos + 1, "NULL") {
            column.nullable = false;
            stmt.constraints.push(ConstraintDecl {
                kind: ConstraintKind::NotNull,
                name: pending_name.take(),
                columns: vec![col_name.clone()],
                target: None,
                expression_text: None,
            });
            pos += 2;
        } else if t.is_keyword("UNIQUE") {
            stmt.constraints.push(ConstraintDecl {
                kind: ConstraintKind::Unique,
                name: pending_name.take(),
                columns: vec![col_name.clone()],
                target: None,
                expression_text: None,
            });
            pos += 1;
        } else if t.is_keyword("REFERENCES") {
            let (target, next) = parse_references(c, pos + 1, end);
            if let Some(target) = target {
                stmt.constraints.push(ConstraintDecl {
                    kind: ConstraintKind::ForeignKey,
                    name: pending_name.take(),
                    columns: vec![col_name.clone()],
                    target: Some(target),
                    expression_text: None,
                });
            }
            pos = next;
        } else if t.is_keyword("CHECK") && c.is_punct(pos + 1, "(") {
            let group_end = c.skip_group(pos + 1);
            stmt.constraints.push(ConstraintDecl {
                kind: ConstraintKind::Check,
                name: pending_name.take(),
                columns: vec![col_name.clone()],
                target: None,
                expression_text: Some(span_text(c, pos + 2, group_end - 1)),
            });
            pos = group_end;
        } else {
            pos += 1;
        }
    }

    stmt.columns_defined.push(column);
}

/// PRIMARY KEY (..) | FOREIGN KEY (..) REFERENCES .. | UNIQUE (..) | CHECK (..)
fn parse_table_constraint(
    c: &Cursor,
    pos: usize,
    end: usize,
    name: Option<String>,
) -> Option<ConstraintDecl> {
    let t = c.tok(pos)?;
    if t.is_keyword("PRIMARY") && c.is_kw(pos + 1, "KEY") && c.is_punct(pos + 2, "(") {
        let group_end = c.skip_group(pos + 2);
        return Some(ConstraintDecl {
            kind: ConstraintKind::PrimaryKey,
            name,
            columns: ident_list(c, pos + 3, group_end - 1),
            target: None,
            expression_text: None,
        });
    }
    if t.is_keyword("FOREIGN") && c.is_kw(pos + 1, "KEY") && c.is_punct(pos + 2, "(") {
        let group_end = c.skip_group(pos + 2);
        let columns = ident_list(c, pos + 3, group_end - 1);
        let mut p = group_end;
        while p < end && !c.is_kw(p, "REFERENCES") {
            p += 1;
        }
        let (target, _) = if p < end {
            parse_references(c, p + 1, end)
        } else {
            (None, end)
        };
        return Some(ConstraintDecl {
            kind: ConstraintKind::ForeignKey,
            name,
            columns,
            target,
            expression_text: None,
        });
    }
    if t.is_keyword("UNIQUE") && c.is_punct(pos + 1, "(") {
        let group_end = c.skip_group(pos + 1);
        return Some(ConstraintDecl {
            kind: ConstraintKind::Unique,
            name,
            columns: ident_list(c, pos + 2, group_end - 1),
            target: None,
            expression_text: None,
        });
    }
    if t.is_keyword("CHECK") && c.is_punct(pos + 1, "(") {
        let group_end = c.skip_group(pos + 1);
        return Some(ConstraintDecl {
            kind: ConstraintKind::Check,
            name,
            columns: Vec::new(),
            target: None,
            expression_text: Some(span_text(c, pos + 2, group_end - 1)),
        });
    }
    None
}

/// `table [(column)]` after REFERENCES; returns target and next position.
fn parse_references(
    c: &Cursor,
    pos: usize,
    end: usize,
) -> (Option<(String, Option<String>)>, usize) {
    let table = match c.tok(pos) {
        Some(t) if t.kind == TokenKind::Ident => t.ident_text().to_string(),
        _ => return (None, pos),
    };
    let mut p = pos + 1;
    let mut column = None;
    if p < end && c.is_punct(p, "(") {
        let group_end = c.skip_group(p);
        let cols = ident_list(c, p + 1, group_end - 1);
        column = cols.into_iter().next();
        p = group_end;
    }
    (Some((table, column)), p)
}

fn ident_list(c: &Cursor, start: usize, end: usize) -> Vec<String> {
    let mut out = Vec::new();
    for p in start..end {
        if let Some(t) = c.tok(p) {
            if t.kind == TokenKind::Ident {
                out.push(t.ident_text().to_string());
            }
        }
    }
    out
}

fn span_text(c: &Cursor, start: usize, end: usize) -> String {
    if start >= end {
        return String::new();
    }
    let from = c.full_index(start);
    let to = if end >= c.len() {
        c.tokens.len()
    } else {
        c.full_index(end)
    };
    c.tokens[from..to]
        .iter()
        .map(|t| t.text.as_str())
        .collect::<String>()
        .trim()
        .to_string()
}

fn annotate_alter_table(stmt: &mut AnnotatedStatement) {
    let tokens = stmt.tokens.clone();
    let c = Cursor::new(&tokens);
    let mut pos = 2; // past ALTER TABLE
    if c.is_kw(pos, "IF") {
        pos += 1;
        if c.is_kw(pos, "EXISTS") {
            pos += 1;
        }
    }
    let table = match c.tok(pos) {
        Some(t) if t.kind == TokenKind::Ident => t.ident_text().to_string(),
        _ => return,
    };
    stmt.target_table = Some(table.clone());
    stmt.tables_referenced.push(table.clone());
    pos += 1;

    while pos < c.len() {
        if c.is_kw(pos, "ADD") {
            pos += 1;
            let mut name = None;
            if c.is_kw(pos, "CONSTRAINT") {
                name = c.tok(pos + 1).map(|t| t.ident_text().to_string());
                pos += 2;
            }
            if let Some(constraint) = parse_table_constraint(&c, pos, c.len(), name.clone()) {
                for col in &constraint.columns {
                    stmt.columns_referenced.push(ColumnRef {
                        table: Some(table.clone()),
                        column: col.clone(),
                    });
                }
                // Column-scoped CHECK has no column list; bind from expression.
                stmt.constraints.push(constraint.clone());
                stmt.alter_actions.push(AlterAction::AddConstraint(constraint));
                break;
            }
            if c.is_kw(pos, "COLUMN") {
                pos += 1;
            }
            // ADD [COLUMN] coldef: reuse definition parsing on the remainder.
            let before = stmt.columns_defined.len();
            parse_definition_item(&c, pos, c.len(), &table, stmt);
            if let Some(col) = stmt.columns_defined.get(before).cloned() {
                stmt.columns_referenced.push(ColumnRef {
                    table: Some(table.clone()),
                    column: col.name.clone(),
                });
                stmt.alter_actions.push(AlterAction::AddColumn(col));
            } else if let Some(constraint) = stmt.constraints.last().cloned() {
                stmt.alter_actions.push(AlterAction::AddConstraint(constraint));
            }
            break;
        } else if c.is_kw(pos, "DROP") {
            pos += 1;
            if c.is_kw(pos, "COLUMN") {
                if let Some(t) = c.tok(pos + 1) {
                    let col = t.ident_text().to_string();
                    stmt.columns_referenced.push(ColumnRef {
                        table: Some(table.clone()),
                        column: col.clone(),
                    });
                    stmt.alter_actions.push(AlterAction::DropColumn(col));
                }
            } else if c.is_kw(pos, "CONSTRAINT") {
                let mut p = pos + 1;
                if c.is_kw(p, "IF") {
                    p += 1;
                    if c.is_kw(p, "EXISTS") {
                        p += 1;
                    }
                }
                if let Some(t) = c.tok(p) {
                    stmt.alter_actions
                        .push(AlterAction::DropConstraint(t.ident_text().to_string()));
                }
            } else {
                stmt.alter_actions.push(AlterAction::Other);
            }
            break;
        } else {
            pos += 1;
        }
    }

    if stmt.alter_actions.is_empty() {
        stmt.alter_actions.push(AlterAction::Other);
    }
}

fn annotate_create_index(stmt: &mut AnnotatedStatement) {
    let tokens = stmt.tokens.clone();
    let c = Cursor::new(&tokens);
    let mut pos = 1;
    let mut unique = false;
    if c.is_kw(pos, "UNIQUE") {
        unique = true;
        pos += 1;
    }
    if c.is_kw(pos, "INDEX") {
        pos += 1;
    }
    if c.is_kw(pos, "IF") {
        pos += 1;
        if c.is_kw(pos, "NOT") {
            pos += 1;
        }
        if c.is_kw(pos, "EXISTS") {
            pos += 1;
        }
    }
    let name = match c.tok(pos) {
        Some(t) if t.kind == TokenKind::Ident => t.ident_text().to_string(),
        _ => return,
    };
    pos += 1;
    let mut table = None;
    if c.is_kw(pos, "ON") {
        if let Some(t) = c.tok(pos + 1) {
            if t.kind == TokenKind::Ident {
                let tname = t.ident_text().to_string();
                stmt.tables_referenced.push(tname.clone());
                stmt.target_table = Some(tname.clone());
                table = Some(tname);
                pos += 2;
            }
        }
    }
    let mut columns = Vec::new();
    if c.is_punct(pos, "(") {
        let group_end = c.skip_group(pos);
        record_span(stmt, &c, ClauseRole::IndexColumns, pos, group_end);
        columns = ident_list(&c, pos + 1, group_end - 1);
        for col in &columns {
            stmt.columns_referenced.push(ColumnRef {
                table: table.clone(),
                column: col.clone(),
            });
        }
    }
    stmt.index_decl = Some(IndexParts {
        name,
        table,
        columns,
        unique,
    });
}

fn annotate_drop(stmt: &mut AnnotatedStatement) {
    let tokens = stmt.tokens.clone();
    let c = Cursor::new(&tokens);
    if c.is_kw(1, "TABLE") {
        let mut pos = 2;
        if c.is_kw(pos, "IF") {
            pos += 1;
            if c.is_kw(pos, "EXISTS") {
                pos += 1;
            }
        }
        if let Some(t) = c.tok(pos) {
            if t.kind == TokenKind::Ident {
                let name = t.ident_text().to_string();
                stmt.target_table = Some(name.clone());
                stmt.tables_referenced.push(name);
            }
        }
    }
}
