//! Context-free rules applied to a single statement.

use crate::catalog::AntiPatternKind;
use crate::context::ApplicationContext;
use crate::frontend::{
    canonical, AnnotatedStatement, ClauseRole, ColumnRef, ConstraintKind, Token, TokenKind,
};

use super::{Finding, Location, Phase};

fn intra(
    kind: AntiPatternKind,
    location: Location,
    stmt: &AnnotatedStatement,
    evidence: String,
) -> Finding {
    Finding::new(
        kind,
        location,
        Some(stmt.source_id.clone()),
        evidence,
        Phase::IntraQuery,
    )
}

/// Significant tokens of a clause span.
fn sig_tokens(stmt: &AnnotatedStatement, role: ClauseRole) -> Vec<&Token> {
    stmt.clauses
        .get(&role)
        .map(|span| {
            stmt.tokens[span.start..span.end]
                .iter()
                .filter(|t| !t.is_trivia())
                .collect()
        })
        .unwrap_or_default()
}

fn resolve_table(stmt: &AnnotatedStatement, qualifier: Option<&str>) -> Option<String> {
    match qualifier {
        Some(q) => Some(
            stmt.aliases
                .get(&canonical(q))
                .cloned()
                .unwrap_or_else(|| q.to_string()),
        ),
        None if stmt.tables_referenced.len() == 1 => Some(stmt.tables_referenced[0].clone()),
        None => None,
    }
}

/// Join significant tokens into a readable snippet: spaces between tokens,
/// none around `.`(), or before `,`/`)`.
fn snippet_of(tokens: &[&Token]) -> String {
    let mut out = String::new();
    for (i, t) in tokens.iter().enumerate() {
        let tight = t.is_punct(".")
            || t.is_punct(",")
            || t.is_punct(")")
            || i == 0
            || tokens[i - 1].is_punct(".")
            || tokens[i - 1].is_punct("(");
        if !tight && !out.is_empty() {
            out.push(' ');
        }
        out.push_str(&t.text);
    }
    out
}

/// `ident` or `ident.ident` at `i`; returns (qualifier, column, token count).
fn column_at<'a>(sig: &[&'a Token], i: usize) -> Option<(Option<&'a str>, &'a str, usize)> {
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
            return Some((Some(t.ident_text()), next.ident_text(), 3));
        }
        return None;
    }
    Some((None, t.ident_text(), 1))
}

pub(crate) struct LikePredicate {
    pub(crate) column: ColumnRef,
    pub(crate) operator: String,
    pub(crate) pattern: Option<String>,
    pub(crate) snippet: String,
}

/// LIKE/REGEXP-family predicates in the WHERE and JOIN clauses.
pub(crate) fn like_predicates(stmt: &AnnotatedStatement) -> Vec<LikePredicate> {
    let mut out = Vec::new();
    for role in [ClauseRole::Where, ClauseRole::Joins] {
        let sig = sig_tokens(stmt, role);
        let mut i = 0;
        while i < sig.len() {
            if let Some((qualifier, column, len)) = column_at(&sig, i) {
                let mut op_pos = i + len;
                if sig.get(op_pos).is_some_and(|t| t.is_keyword("NOT")) {
                    op_pos += 1;
                }
                let matched = sig.get(op_pos).and_then(|t| {
                    ["LIKE", "ILIKE", "REGEXP", "RLIKE", "SIMILAR"]
                        .iter()
                        .find(|op| t.is_keyword(op))
                        .copied()
                });
                if let Some(op) = matched {
                    let mut end = op_pos + 1;
                    while end < sig.len() {
                        let t = sig[end];
                        if t.is_keyword("AND") || t.is_keyword("OR") {
                            break;
                        }
                        end += 1;
                    }
                    let pattern = sig[op_pos + 1..end]
                        .iter()
                        .find(|t| t.kind == TokenKind::StringLit)
                        .map(|t| t.text.trim_matches('\'').to_string());
                    let snippet = snippet_of(&sig[i..end]);
                    out.push(LikePredicate {
                        column: ColumnRef {
                            table: resolve_table(stmt, qualifier),
                            column: column.to_string(),
                        },
                        operator: op.to_string(),
                        pattern,
                        snippet,
                    });
                    i = end;
                    continue;
                }
                i += len;
                continue;
            }
            i += 1;
        }
    }
    out
}

fn has_word_boundary_tokens(pattern: &str) -> bool {
    pattern.contains("[[:<:]]") || pattern.contains("[[:>:]]") || pattern.contains("\\b")
}

/// String-trick suspects over id-like columns; confirmed or suppressed by the
/// data phase when profiles are available.
pub fn multi_valued_attribute_suspect(
    stmt: &AnnotatedStatement,
    _ctx: &ApplicationContext,
) -> Vec<Finding> {
    let mut findings = Vec::new();
    for pred in like_predicates(stmt) {
        let name = canonical(&pred.column.column);
        let id_like = name.ends_with("id") || name.ends_with("ids");
        let boundary = pred
            .pattern
            .as_deref()
            .is_some_and(has_word_boundary_tokens);
        if id_like || boundary {
            let location = match &pred.column.table {
                Some(t) => Location::Column(t.clone(), pred.column.column.clone()),
                None => Location::Statement(stmt.source_id.clone()),
            };
            findings.push(intra(
                AntiPatternKind::MultiValuedAttribute,
                location,
                stmt,
                format!(
                    "string-matching over {} suggests a delimiter-separated value list (heuristic): {}",
                    pred.column.column, pred.snippet
                ),
            ));
            break;
        }
    }
    findings
}

pub fn column_wildcard_usage(stmt: &AnnotatedStatement, _ctx: &ApplicationContext) -> Vec<Finding> {
    if !stmt.has_wildcard_projection {
        return Vec::new();
    }
    let projection = stmt
        .clause_text(ClauseRole::Projection)
        .unwrap_or_else(|| "*".to_string());
    vec![intra(
        AntiPatternKind::ColumnWildcardUsage,
        Location::Statement(stmt.source_id.clone()),
        stmt,
        format!("wildcard projection: SELECT {projection}"),
    )]
}

pub fn ordering_by_rand(stmt: &AnnotatedStatement, _ctx: &ApplicationContext) -> Vec<Finding> {
    let sig = sig_tokens(stmt, ClauseRole::OrderBy);
    for (i, t) in sig.iter().enumerate() {
        let name = canonical(t.ident_text());
        if t.kind == TokenKind::Ident
            && (name == "rand" || name == "random")
            && sig.get(i + 1).is_some_and(|n| n.is_punct("("))
        {
            return vec![intra(
                AntiPatternKind::OrderingByRand,
                Location::Statement(stmt.source_id.clone()),
                stmt,
                format!("ORDER BY {}() forces a full sort", t.ident_text()),
            )];
        }
    }
    Vec::new()
}

/// Functions whose result is safe to concatenate.
fn is_null_safe_function(name: &str) -> bool {
    matches!(canonical(name).as_str(), "coalesce" | "ifnull" | "nvl")
}

pub fn concatenate_nulls(stmt: &AnnotatedStatement, _ctx: &ApplicationContext) -> Vec<Finding> {
    let sig: Vec<&Token> = stmt.tokens.iter().filter(|t| !t.is_trivia()).collect();
    let mut operands: Vec<ColumnRef> = Vec::new();
    let mut snippet = None;

    for (i, t) in sig.iter().enumerate() {
        if !t.is_operator("||") {
            continue;
        }
        // Left operand: bare/qualified column, or a call result.
        if i >= 1 {
            match sig[i - 1].kind {
                TokenKind::Ident => {
                    let (qualifier, column) = if i >= 3
                        && sig[i - 2].is_punct(".")
                        && sig[i - 3].kind == TokenKind::Ident
                    {
                        (Some(sig[i - 3].ident_text()), sig[i - 1].ident_text())
                    } else {
                        (None, sig[i - 1].ident_text())
                    };
                    operands.push(ColumnRef {
                        table: resolve_table(stmt, qualifier),
                        column: column.to_string(),
                    });
                }
                TokenKind::Punct if sig[i - 1].is_punct(")") => {
                    // Walk back to the callee name; null-safe wrappers are fine.
                    let mut depth = 0usize;
                    let mut j = i - 1;
                    loop {
                        if sig[j].is_punct(")") {
                            depth += 1;
                        } else if sig[j].is_punct("(") {
                            depth -= 1;
                            if depth == 0 {
                                break;
                            }
                        }
                        if j == 0 {
                            break;
                        }
                        j -= 1;
                    }
                    if j >= 1
                        && sig[j - 1].kind == TokenKind::Ident
                        && !is_null_safe_function(sig[j - 1].ident_text())
                    {
                        // Unknown call result: tolerated, not reported.
                    }
                }
                _ => {}
            }
        }
        // Right operand.
        if let Some((qualifier, column, _)) = column_at(&sig, i + 1) {
            operands.push(ColumnRef {
                table: resolve_table(stmt, qualifier),
                column: column.to_string(),
            });
        }
        if snippet.is_none() {
            let from = i.saturating_sub(3);
            let to = (i + 4).min(sig.len());
            snippet = Some(snippet_of(&sig[from..to]));
        }
    }

    operands.sort();
    operands.dedup();
    if operands.is_empty() {
        return Vec::new();
    }
    let mut finding = intra(
        AntiPatternKind::ConcatenateNulls,
        Location::Statement(stmt.source_id.clone()),
        stmt,
        format!(
            "|| over column(s) {} of unknown nullability: {}",
            operands
                .iter()
                .map(|c| c.column.as_str())
                .collect::<Vec<_>>()
                .join(", "),
            snippet.unwrap_or_default()
        ),
    );
    finding.detail_columns = operands;
    vec![finding]
}

pub fn pattern_matching(stmt: &AnnotatedStatement, _ctx: &ApplicationContext) -> Vec<Finding> {
    for pred in like_predicates(stmt) {
        let regexp_family = matches!(pred.operator.as_str(), "REGEXP" | "RLIKE" | "SIMILAR");
        let hostile_like = pred.pattern.as_deref().is_some_and(|p| {
            p.starts_with('%') || p.starts_with('_') || has_word_boundary_tokens(p)
        });
        if regexp_family || hostile_like {
            return vec![intra(
                AntiPatternKind::PatternMatching,
                Location::Statement(stmt.source_id.clone()),
                stmt,
                format!("unindexable pattern predicate: {}", pred.snippet),
            )];
        }
    }
    Vec::new()
}

pub fn too_many_joins(stmt: &AnnotatedStatement, ctx: &ApplicationContext) -> Vec<Finding> {
    let threshold = ctx.build_config.join_threshold;
    if stmt.join_count >= threshold {
        return vec![intra(
            AntiPatternKind::TooManyJoins,
            Location::Statement(stmt.source_id.clone()),
            stmt,
            format!("{} joins (threshold {})", stmt.join_count, threshold),
        )];
    }
    Vec::new()
}

pub fn distinct_and_join(stmt: &AnnotatedStatement, _ctx: &ApplicationContext) -> Vec<Finding> {
    if stmt.distinct_present && stmt.join_count >= 1 {
        return vec![intra(
            AntiPatternKind::DistinctAndJoin,
            Location::Statement(stmt.source_id.clone()),
            stmt,
            format!(
                "DISTINCT over a {}-join result deduplicates rows the join produced",
                stmt.join_count
            ),
        )];
    }
    Vec::new()
}

fn type_words(declared: &str) -> Vec<String> {
    declared
        .split(|c: char| !c.is_ascii_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(|w| w.to_uppercase())
        .collect()
}

pub fn rounding_errors(stmt: &AnnotatedStatement, _ctx: &ApplicationContext) -> Vec<Finding> {
    let Some(table) = stmt.target_table.clone() else {
        return Vec::new();
    };
    stmt.columns_defined
        .iter()
        .filter(|col| {
            type_words(&col.declared_type)
                .iter()
                .any(|w| matches!(w.as_str(), "FLOAT" | "REAL" | "DOUBLE"))
        })
        .map(|col| {
            intra(
                AntiPatternKind::RoundingErrors,
                Location::Column(table.clone(), col.name.clone()),
                stmt,
                format!(
                    "column {} stores fractional data as {}; finite precision skews aggregates",
                    col.name, col.declared_type
                ),
            )
        })
        .collect()
}

pub fn generic_primary_key(stmt: &AnnotatedStatement, _ctx: &ApplicationContext) -> Vec<Finding> {
    let Some(table) = stmt.target_table.clone() else {
        return Vec::new();
    };
    for constraint in &stmt.constraints {
        if constraint.kind == ConstraintKind::PrimaryKey
            && constraint.columns.len() == 1
            && canonical(&constraint.columns[0]) == "id"
        {
            return vec![intra(
                AntiPatternKind::GenericPrimaryKey,
                Location::Column(table, constraint.columns[0].clone()),
                stmt,
                "primary key column is literally named \"id\"".to_string(),
            )];
        }
    }
    Vec::new()
}

pub fn god_table(stmt: &AnnotatedStatement, ctx: &ApplicationContext) -> Vec<Finding> {
    let threshold = ctx.build_config.god_table_threshold;
    let Some(table) = stmt.target_table.clone() else {
        return Vec::new();
    };
    if stmt.columns_defined.len() >= threshold {
        return vec![intra(
            AntiPatternKind::GodTable,
            Location::Table(table.clone()),
            stmt,
            format!(
                "table {} declares {} columns (threshold {})",
                table,
                stmt.columns_defined.len(),
                threshold
            ),
        )];
    }
    Vec::new()
}

pub fn implicit_columns(stmt: &AnnotatedStatement, _ctx: &ApplicationContext) -> Vec<Finding> {
    if stmt.target_table.is_none() || stmt.clauses.contains_key(&ClauseRole::ColumnList) {
        return Vec::new();
    }
    vec![intra(
        AntiPatternKind::ImplicitColumns,
        Location::Statement(stmt.source_id.clone()),
        stmt,
        format!(
            "INSERT INTO {} gives no column list; it breaks when the schema evolves",
            stmt.target_table.as_deref().unwrap_or("?")
        ),
    )]
}

pub fn external_data_storage(stmt: &AnnotatedStatement, _ctx: &ApplicationContext) -> Vec<Finding> {
    let Some(table) = stmt.target_table.clone() else {
        return Vec::new();
    };
    stmt.columns_defined
        .iter()
        .filter(|col| {
            let textual = type_words(&col.declared_type)
                .iter()
                .any(|w| matches!(w.as_str(), "VARCHAR" | "CHAR" | "TEXT" | "STRING" | "CLOB"));
            let named_like_path = canonical(&col.name)
                .split('_')
                .any(|seg| matches!(seg, "path" | "file" | "url" | "uri"));
            textual && named_like_path
        })
        .map(|col| {
            intra(
                AntiPatternKind::ExternalDataStorage,
                Location::Column(table.clone(), col.name.clone()),
                stmt,
                format!(
                    "column {} looks like an external-file reference (heuristic by name/type)",
                    col.name
                ),
            )
        })
        .collect()
}
