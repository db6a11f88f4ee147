//! Rule-based repair engine: per-kind rules that either transform statements
//! (rewriting registered SQL and creating new statements) or fall back to a
//! textual fix tailored from the context. Exactly one modality per plan.
//!
//! Rewrites are suggestions carried in the report; input files are never
//! modified in place.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::catalog::AntiPatternKind;
use crate::context::{impacted_queries, ApplicationContext, TableSchema};
use crate::frontend::{
    canonical, parse_corpus, AnnotatedStatement, ClauseRole, ConstraintKind,
    StatementKind, Token,
};
use crate::rules::{Finding, Location};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformOp {
    /// Replaces a registered statement; `target` is its source id.
    RewriteExisting,
    /// A new statement to run; `target` is a fresh id.
    CreateNew,
    /// A note attached to a statement, no SQL change.
    Annotate,
}

#[derive(Debug, Clone, Serialize)]
pub struct StatementTransformation {
    pub op: TransformOp,
    pub target: String,
    /// Clause-level description of the edit.
    pub edit: String,
    /// Final SQL (empty for annotations).
    pub rendered: String,
}

impl StatementTransformation {
    fn rewrite(target: &str, edit: impl Into<String>, rendered: String) -> Self {
        StatementTransformation {
            op: TransformOp::RewriteExisting,
            target: target.to_string(),
            edit: edit.into(),
            rendered,
        }
    }

    fn create(target: String, edit: impl Into<String>, rendered: String) -> Self {
        StatementTransformation {
            op: TransformOp::CreateNew,
            target,
            edit: edit.into(),
            rendered,
        }
    }

    fn note(target: &str, text: impl Into<String>) -> Self {
        StatementTransformation {
            op: TransformOp::Annotate,
            target: target.to_string(),
            edit: "note".to_string(),
            rendered: text.into(),
        }
    }
}

/// Fix for one finding: statement transformations over the to-be-transformed
/// set, or a tailored textual fix.
#[derive(Debug, Clone)]
pub struct RepairPlan {
    pub finding: Finding,
    pub transformations: Vec<StatementTransformation>,
    pub textual_fix: Option<String>,
    /// Statements impacted by the fix, in registry order.
    pub impacted: Vec<String>,
    /// Finding's statement plus the impacted set.
    pub to_transform: Vec<String>,
}

impl RepairPlan {
    pub fn is_rewrite(&self) -> bool {
        !self.transformations.is_empty()
    }
}

/// Compute repair plans for findings in ranking order. Transformation
/// failures degrade the plan to a textual fix with an error note; the batch
/// never aborts.
pub fn fix(findings: &[Finding], ctx: &ApplicationContext) -> Vec<RepairPlan> {
    findings.iter().map(|f| plan_for(f, ctx)).collect()
}

fn plan_for(finding: &Finding, ctx: &ApplicationContext) -> RepairPlan {
    let impacted: Vec<String> = impacted_queries(ctx, finding)
        .iter()
        .map(|s| s.source_id.clone())
        .collect();
    let mut to_transform: Vec<String> = Vec::new();
    if let Some(sid) = &finding.statement_id {
        to_transform.push(sid.clone());
    }
    for sid in &impacted {
        if !to_transform.contains(sid) {
            to_transform.push(sid.clone());
        }
    }

    let transformations = transform_for(finding, ctx, &to_transform).map(validate);

    match transformations {
        Some(Ok(ts)) if !ts.is_empty() => RepairPlan {
            finding: finding.clone(),
            transformations: ts,
            textual_fix: None,
            impacted,
            to_transform,
        },
        other => {
            // Either no rewrite is defined for the kind, or a rendered
            // statement failed validation: degrade to a textual fix, with the
            // render failure noted, and keep processing the batch.
            let mut text = textual_fix(finding, ctx);
            if let Some(Err(render_error)) = other {
                text.push_str(&format!(
                    " (automated rewrite withdrawn: {render_error})"
                ));
            }
            RepairPlan {
                finding: finding.clone(),
                transformations: Vec::new(),
                textual_fix: Some(text),
                impacted,
                to_transform,
            }
        }
    }
}

/// Every rewritten or created statement must reparse cleanly to a recognized
/// statement kind; otherwise the whole plan degrades to textual.
fn validate(ts: Vec<StatementTransformation>) -> Result<Vec<StatementTransformation>, String> {
    for t in &ts {
        if t.op == TransformOp::Annotate {
            continue;
        }
        let parsed = parse_corpus(&t.rendered, "rewrite");
        let ok = parsed.len() == 1
            && !parsed[0].diagnostic
            && parsed[0].kind != StatementKind::Other;
        if !ok {
            return Err(format!("rendered statement does not reparse: {}", t.rendered));
        }
    }
    Ok(ts)
}

fn transform_for(
    finding: &Finding,
    ctx: &ApplicationContext,
    to_transform: &[String],
) -> Option<Vec<StatementTransformation>> {
    match finding.kind {
        AntiPatternKind::MultiValuedAttribute => mva_transform(finding, ctx, to_transform),
        AntiPatternKind::ImplicitColumns => implicit_columns_transform(finding, ctx),
        AntiPatternKind::ColumnWildcardUsage => wildcard_transform(finding, ctx),
        AntiPatternKind::EnumeratedTypes => enumerated_types_transform(finding, ctx),
        AntiPatternKind::ConcatenateNulls => concatenate_nulls_transform(finding, ctx),
        AntiPatternKind::IndexUnderuse => index_underuse_transform(finding, ctx),
        AntiPatternKind::NoPrimaryKey => no_primary_key_transform(finding, ctx),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Shared rendering helpers
// ---------------------------------------------------------------------------

fn significant_indices(tokens: &[Token]) -> Vec<usize> {
    tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| !t.is_trivia())
        .map(|(i, _)| i)
        .collect()
}

fn text_of(tokens: &[Token]) -> String {
    tokens.iter().map(|t| t.text.as_str()).collect()
}

/// Rebuild a statement with one clause span replaced by new text.
fn splice_clause(stmt: &AnnotatedStatement, role: ClauseRole, new_text: &str) -> Option<String> {
    let span = stmt.clauses.get(&role)?;
    let mut out = text_of(&stmt.tokens[..span.start]);
    out.push_str(new_text);
    out.push_str(&text_of(&stmt.tokens[span.end..]));
    Some(out)
}

/// Print a CREATE TABLE from the assembled schema, optionally dropping
/// columns and constraints.
fn render_create_table(
    schema: &TableSchema,
    skip_columns: &[String],
    skip_check_named: Option<&str>,
) -> String {
    let skip: BTreeSet<String> = skip_columns.iter().map(|c| canonical(c)).collect();
    let mut items: Vec<String> = Vec::new();
    for col in &schema.columns {
        if skip.contains(&canonical(&col.name)) {
            continue;
        }
        let mut item = format!("{} {}", col.name, col.declared_type);
        for con in &schema.constraints {
            if con.columns.len() == 1 && canonical(&con.columns[0]) == canonical(&col.name) {
                match con.kind {
                    ConstraintKind::PrimaryKey => item.push_str(" PRIMARY KEY"),
                    ConstraintKind::NotNull => item.push_str(" NOT NULL"),
                    ConstraintKind::Unique => item.push_str(" UNIQUE"),
                    ConstraintKind::ForeignKey => {
                        if let Some((t, c)) = &con.target {
                            item.push_str(&format!(
                                " REFERENCES {t}{}",
                                c.as_ref().map(|c| format!("({c})")).unwrap_or_default()
                            ));
                        }
                    }
                    ConstraintKind::Check => {
                        if skip_check_named.is_none_or(|n| con.name.as_deref() != Some(n)) {
                            if let Some(expr) = &con.expression_text {
                                item.push_str(&format!(" CHECK ({expr})"));
                            }
                        }
                    }
                }
            }
        }
        items.push(item);
    }
    for con in &schema.constraints {
        if con.columns.len() == 1 {
            continue; // rendered inline above
        }
        if con
            .columns
            .iter()
            .any(|c| skip.contains(&canonical(c)))
        {
            continue;
        }
        match con.kind {
            ConstraintKind::PrimaryKey => {
                items.push(format!("PRIMARY KEY ({})", con.columns.join(", ")))
            }
            ConstraintKind::Unique => items.push(format!("UNIQUE ({})", con.columns.join(", "))),
            ConstraintKind::ForeignKey => {
                if let Some((t, c)) = &con.target {
                    items.push(format!(
                        "FOREIGN KEY ({}) REFERENCES {t}{}",
                        con.columns.join(", "),
                        c.as_ref().map(|c| format!("({c})")).unwrap_or_default()
                    ));
                }
            }
            ConstraintKind::Check => {
                if skip_check_named.is_none_or(|n| con.name.as_deref() != Some(n)) {
                    if let Some(expr) = &con.expression_text {
                        items.push(format!(
                            "{}CHECK ({expr})",
                            con.name
                                .as_deref()
                                .map(|n| format!("CONSTRAINT {n} "))
                                .unwrap_or_default()
                        ));
                    }
                }
            }
            ConstraintKind::NotNull => {}
        }
    }
    format!("CREATE TABLE {} ({});", schema.name, items.join(", "))
}

fn fresh_table_name(ctx: &ApplicationContext, base: String) -> String {
    if ctx.schema(&base).is_none() {
        return base;
    }
    let mut n = 2;
    loop {
        let candidate = format!("{base}_{n}");
        if ctx.schema(&candidate).is_none() {
            return candidate;
        }
        n += 1;
    }
}

// ---------------------------------------------------------------------------
// Multi-valued attribute: intersection table, column drop, query rewrites
// ---------------------------------------------------------------------------

/// `User_IDs` -> `User_ID`; `tags` -> `tag`.
fn singularize(column: &str) -> Option<String> {
    let c = column.trim();
    if canonical(c).ends_with('s') && c.len() > 1 {
        Some(c[..c.len() - 1].to_string())
    } else {
        None
    }
}

struct MvaShape<'a> {
    owner: &'a TableSchema,
    column: String,
    owner_pk: String,
    owner_pk_type: String,
    target: &'a TableSchema,
    target_col: String,
    target_col_type: String,
}

fn resolve_mva_shape<'a>(
    ctx: &'a ApplicationContext,
    table: &str,
    column: &str,
) -> Option<MvaShape<'a>> {
    let owner = ctx.schema(table)?;
    let pk = owner.primary_key()?;
    if pk.columns.len() != 1 {
        return None;
    }
    let owner_pk = pk.columns[0].clone();
    let owner_pk_type = owner.column(&owner_pk)?.declared_type.clone();

    let wanted = canonical(&singularize(column)?);
    let target = ctx
        .schemas
        .values()
        .filter(|s| canonical(&s.name) != canonical(table))
        .find(|s| s.columns.iter().any(|c| canonical(&c.name) == wanted))?;
    let target_col = target
        .columns
        .iter()
        .find(|c| canonical(&c.name) == wanted)?
        .clone();

    Some(MvaShape {
        owner,
        column: owner.column(column)?.name.clone(),
        owner_pk,
        owner_pk_type,
        target,
        target_col: target_col.name,
        target_col_type: target_col.declared_type,
    })
}

fn mva_transform(
    finding: &Finding,
    ctx: &ApplicationContext,
    to_transform: &[String],
) -> Option<Vec<StatementTransformation>> {
    let Location::Column(table, column) = &finding.location else {
        return None;
    };
    let shape = resolve_mva_shape(ctx, table, column)?;
    let xref = fresh_table_name(
        ctx,
        format!("{}_{}_xref", shape.owner.name, shape.target.name),
    );

    let mut ts = Vec::new();
    ts.push(StatementTransformation::create(
        format!("new:{xref}"),
        "create intersection table",
        format!(
            "CREATE TABLE {xref} (\n    {tc} {tt} REFERENCES {target}({tc}),\n    {oc} {ot} REFERENCES {owner}({oc}),\n    PRIMARY KEY ({tc}, {oc})\n);",
            tc = shape.target_col,
            tt = shape.target_col_type,
            target = shape.target.name,
            oc = shape.owner_pk,
            ot = shape.owner_pk_type,
            owner = shape.owner.name,
        ),
    ));
    ts.push(StatementTransformation::create(
        format!("new:drop_{}", canonical(&shape.column)),
        "drop redundant column",
        format!(
            "ALTER TABLE {} DROP COLUMN {};",
            shape.owner.name, shape.column
        ),
    ));

    // Amend the owner's CREATE TABLE so the redesigned schema drops the column.
    if let Some(created_by) = &shape.owner.created_by {
        ts.push(StatementTransformation::rewrite(
            created_by,
            format!("remove column {} from table definition", shape.column),
            render_create_table(shape.owner, std::slice::from_ref(&shape.column), None),
        ));
    }

    // Rewrite dependent statements that use the string-matching trick.
    for sid in to_transform {
        if Some(sid) == shape.owner.created_by.as_ref() {
            continue;
        }
        let Some(stmt) = ctx.statement(sid) else { continue };
        if stmt.kind != StatementKind::Select {
            continue;
        }
        match rewrite_mva_select(stmt, &shape, &xref) {
            Some(rewritten) => ts.push(StatementTransformation::rewrite(
                sid,
                "replace string-matching join with intersection-table equi-join",
                rewritten,
            )),
            None => ts.push(StatementTransformation::note(
                sid,
                format!(
                    "references {}.{}; review manually after the intersection table lands",
                    shape.owner.name, shape.column
                ),
            )),
        }
    }

    ts.push(StatementTransformation::note(
        &format!("new:{xref}"),
        format!(
            "data migration not generated: backfill {xref} by splitting existing {}.{} values",
            shape.owner.name, shape.column
        ),
    ));
    Some(ts)
}

/// Pattern value inside word-boundary markers and wildcards, when the rest is
/// a plain literal.
fn extract_pattern_value(pattern: &str) -> Option<String> {
    let v = pattern
        .replace("[[:<:]]", "")
        .replace("[[:>:]]", "")
        .replace("\\b", "");
    let v = v.trim_matches(['%', '_']).trim().to_string();
    if v.is_empty() || v.contains(['%', '_', '[', ']']) {
        None
    } else {
        Some(v)
    }
}

fn rewrite_mva_select(
    stmt: &AnnotatedStatement,
    shape: &MvaShape,
    xref: &str,
) -> Option<String> {
    let projection = stmt.clause_text(ClauseRole::Projection)?;
    let preds = crate::rules::like_predicates_of(stmt);
    let pred = preds.iter().find(|p| {
        canonical(&p.column.column) == canonical(&shape.column)
            && p.column.table.as_deref().map(canonical) == Some(canonical(&shape.owner.name))
    })?;

    let owner_only = stmt.tables_referenced.len() == 1;
    if owner_only {
        // Lookup by one value: join the intersection table back to the owner.
        let value = extract_pattern_value(pred.pattern.as_deref()?)?;
        return Some(format!(
            "SELECT {projection} FROM {xref} AS H JOIN {owner} AS T ON H.{oc} = T.{oc} WHERE H.{tc} = '{value}';",
            owner = shape.owner.name,
            oc = shape.owner_pk,
            tc = shape.target_col,
        ));
    }

    // Owner-to-target join through the string trick: keep the WHERE filter,
    // redirected at the intersection table.
    let references_target = stmt
        .tables_referenced
        .iter()
        .any(|t| canonical(t) == canonical(&shape.target.name));
    if !references_target {
        return None;
    }
    let where_text = stmt.clause_text(ClauseRole::Where)?;
    let rewritten_where = redirect_owner_refs(&where_text, stmt, shape)?;
    Some(format!(
        "SELECT {projection} FROM {xref} AS H JOIN {target} AS U ON H.{tc} = U.{tc} WHERE {rewritten_where};",
        target = shape.target.name,
        tc = shape.target_col,
    ))
}

/// Remap `ownerAlias.pk` references to the intersection table; any other
/// owner-column reference makes the rewrite ambiguous.
fn redirect_owner_refs(
    where_text: &str,
    stmt: &AnnotatedStatement,
    shape: &MvaShape,
) -> Option<String> {
    let tokens = crate::frontend::tokenize(where_text);
    let sig = significant_indices(&tokens);
    let mut out: Vec<String> = tokens.iter().map(|t| t.text.clone()).collect();
    let owner_key = canonical(&shape.owner.name);
    let mut i = 0;
    while i < sig.len() {
        let qualified = i + 2 < sig.len()
            && tokens[sig[i]].kind == crate::frontend::TokenKind::Ident
            && tokens[sig[i + 1]].is_punct(".")
            && tokens[sig[i + 2]].kind == crate::frontend::TokenKind::Ident;
        if qualified {
            let qualifier = tokens[sig[i]].ident_text().to_string();
            let resolved = stmt
                .aliases
                .get(&canonical(&qualifier))
                .map(|t| canonical(t))
                .unwrap_or_else(|| canonical(&qualifier));
            if resolved == owner_key {
                let column = tokens[sig[i + 2]].ident_text();
                if canonical(column) == canonical(&shape.owner_pk) {
                    out[sig[i]] = "H".to_string();
                } else {
                    return None;
                }
            }
            i += 3;
            continue;
        }
        i += 1;
    }
    Some(out.concat())
}

// ---------------------------------------------------------------------------
// Remaining automated rewrites
// ---------------------------------------------------------------------------

fn implicit_columns_transform(
    finding: &Finding,
    ctx: &ApplicationContext,
) -> Option<Vec<StatementTransformation>> {
    let sid = finding.statement_id.as_deref()?;
    let stmt = ctx.statement(sid)?;
    let table = stmt.target_table.as_deref()?;
    let schema = ctx.schema(table)?;
    if schema.columns.is_empty() || stmt.values_arity != Some(schema.columns.len()) {
        return None;
    }
    let columns: Vec<&str> = schema.columns.iter().map(|c| c.name.as_str()).collect();

    // Insert the column list right after the target table name.
    let sig = significant_indices(&stmt.tokens);
    let table_pos = sig.iter().copied().find(|&i| {
        stmt.tokens[i].kind == crate::frontend::TokenKind::Ident
            && canonical(stmt.tokens[i].ident_text()) == canonical(table)
    })?;
    let mut text = text_of(&stmt.tokens[..=table_pos]);
    text.push_str(&format!(" ({})", columns.join(", ")));
    text.push_str(&text_of(&stmt.tokens[table_pos + 1..]));
    Some(vec![StatementTransformation::rewrite(
        sid,
        "add explicit column list",
        text,
    )])
}

fn wildcard_transform(
    finding: &Finding,
    ctx: &ApplicationContext,
) -> Option<Vec<StatementTransformation>> {
    let sid = finding.statement_id.as_deref()?;
    let stmt = ctx.statement(sid)?;
    let projection = stmt.clause_text(ClauseRole::Projection)?;
    if projection.trim() != "*" {
        return None;
    }
    let mut expanded: Vec<String> = Vec::new();
    let single = stmt.tables_referenced.len() == 1;
    for table in &stmt.tables_referenced {
        let schema = ctx.schema(table)?;
        if schema.columns.is_empty() {
            return None;
        }
        // Prefer the statement's alias for qualification.
        let qualifier = stmt
            .aliases
            .iter()
            .find(|(_, t)| canonical(t) == canonical(table))
            .map(|(a, _)| a.clone())
            .unwrap_or_else(|| table.clone());
        for col in &schema.columns {
            if single {
                expanded.push(col.name.clone());
            } else {
                expanded.push(format!("{qualifier}.{}", col.name));
            }
        }
    }
    let text = splice_clause(stmt, ClauseRole::Projection, &expanded.join(", "))?;
    Some(vec![StatementTransformation::rewrite(
        sid,
        "expand wildcard projection to explicit columns",
        text,
    )])
}

fn enumerated_types_transform(
    finding: &Finding,
    ctx: &ApplicationContext,
) -> Option<Vec<StatementTransformation>> {
    let Location::Column(table, column) = &finding.location else {
        return None;
    };
    let schema = ctx.schema(table)?;
    let check = schema.constraints.iter().find(|c| {
        c.kind == ConstraintKind::Check
            && c.expression_text
                .as_deref()
                .is_some_and(|e| crate::frontend::tokenize(e).iter().any(|t| {
                    t.kind == crate::frontend::TokenKind::Ident
                        && canonical(t.ident_text()) == canonical(column)
                }))
    })?;

    let lookup = fresh_table_name(ctx, format!("{column}_lookup"));
    let mut ts = vec![StatementTransformation::create(
        format!("new:{lookup}"),
        "create lookup table",
        format!(
            "CREATE TABLE {lookup} (\n    {column}_ID INTEGER PRIMARY KEY,\n    {column}_Name VARCHAR(30) NOT NULL UNIQUE\n);"
        ),
    )];

    let anchor = finding.statement_id.as_deref();
    let anchor_stmt = anchor.and_then(|sid| ctx.statement(sid));
    match (check.name.as_deref(), anchor_stmt) {
        (Some(name), Some(stmt)) if stmt.kind == StatementKind::AlterTable => {
            // The constraint came from ALTER ADD; the fix is the DROP.
            ts.push(StatementTransformation::rewrite(
                &stmt.source_id,
                "replace constraint addition with its removal",
                format!("ALTER TABLE {table} DROP CONSTRAINT IF EXISTS {name};"),
            ));
        }
        (name, Some(stmt)) if stmt.kind == StatementKind::CreateTable => {
            ts.push(StatementTransformation::rewrite(
                &stmt.source_id,
                "remove value-list CHECK from table definition",
                render_create_table(schema, &[], name.or(Some("")).filter(|n| !n.is_empty())),
            ));
            if let Some(name) = name {
                ts.push(StatementTransformation::create(
                    format!("new:drop_{}", canonical(name)),
                    "drop the constraint on live schemas",
                    format!("ALTER TABLE {table} DROP CONSTRAINT IF EXISTS {name};"),
                ));
            }
        }
        _ => return None,
    }

    ts.push(StatementTransformation::note(
        &format!("new:{lookup}"),
        format!(
            "retype {table}.{column} as INTEGER REFERENCES {lookup}({column}_ID) and backfill from the old values"
        ),
    ));
    Some(ts)
}

/// Unnamed inline CHECKs on CREATE TABLE are removable but schema rendering
/// must drop exactly the IN-list check; handled by skipping unnamed checks on
/// the subject column.
fn concatenate_nulls_transform(
    finding: &Finding,
    ctx: &ApplicationContext,
) -> Option<Vec<StatementTransformation>> {
    let sid = finding.statement_id.as_deref()?;
    let stmt = ctx.statement(sid)?;
    let tokens = &stmt.tokens;
    let sig = significant_indices(tokens);

    // Wrap bare/qualified column operands adjacent to || in COALESCE(x, '').
    let mut pieces: Vec<String> = tokens.iter().map(|t| t.text.clone()).collect();
    let mut wrapped: BTreeSet<usize> = BTreeSet::new();
    let mut changed = false;
    for (k, &ti) in sig.iter().enumerate() {
        if !tokens[ti].is_operator("||") {
            continue;
        }
        for (range_start, range_end) in [operand_left(tokens, &sig, k), operand_right(tokens, &sig, k)]
            .into_iter()
            .flatten()
        {
            if wrapped.contains(&range_start) {
                continue;
            }
            wrapped.insert(range_start);
            pieces[range_start] = format!("COALESCE({}", pieces[range_start]);
            pieces[range_end] = format!("{}, '')", pieces[range_end]);
            changed = true;
        }
    }
    if !changed {
        return None;
    }
    Some(vec![StatementTransformation::rewrite(
        sid,
        "wrap nullable concatenation operands in COALESCE",
        pieces.concat(),
    )])
}

/// Column operand token range (full-token indices) left of the operator at
/// sig position `k`, when it is a bare or qualified column.
fn operand_left(tokens: &[Token], sig: &[usize], k: usize) -> Option<(usize, usize)> {
    use crate::frontend::TokenKind;
    if k < 1 || tokens[sig[k - 1]].kind != TokenKind::Ident {
        return None;
    }
    if k >= 3 && tokens[sig[k - 2]].is_punct(".") && tokens[sig[k - 3]].kind == TokenKind::Ident {
        Some((sig[k - 3], sig[k - 1]))
    } else {
        Some((sig[k - 1], sig[k - 1]))
    }
}

fn operand_right(tokens: &[Token], sig: &[usize], k: usize) -> Option<(usize, usize)> {
    use crate::frontend::TokenKind;
    let first = *sig.get(k + 1)?;
    if tokens[first].kind != TokenKind::Ident {
        return None;
    }
    // Function call result: not a bare column.
    if sig.get(k + 2).is_some_and(|&i| tokens[i].is_punct("(")) {
        return None;
    }
    if sig.get(k + 2).is_some_and(|&i| tokens[i].is_punct("."))
        && sig.get(k + 3).is_some_and(|&i| tokens[i].kind == TokenKind::Ident)
    {
        Some((first, sig[k + 3]))
    } else {
        Some((first, first))
    }
}

fn index_underuse_transform(
    finding: &Finding,
    ctx: &ApplicationContext,
) -> Option<Vec<StatementTransformation>> {
    let Location::Column(table, column) = &finding.location else {
        return None;
    };
    let schema = ctx.schema(table)?;
    let mut name = format!("idx_{}_{}", canonical(table), canonical(column));
    let taken: BTreeSet<String> = schema.indexes.iter().map(|i| canonical(&i.name)).collect();
    let mut n = 2;
    while taken.contains(&name) {
        name = format!("idx_{}_{}_{n}", canonical(table), canonical(column));
        n += 1;
    }
    Some(vec![StatementTransformation::create(
        format!("new:{name}"),
        "create covering index for the hot predicate",
        format!("CREATE INDEX {name} ON {} ({column});", schema.name),
    )])
}

fn no_primary_key_transform(
    finding: &Finding,
    ctx: &ApplicationContext,
) -> Option<Vec<StatementTransformation>> {
    let Location::Table(table) = &finding.location else {
        return None;
    };
    let schema = ctx.schema(table)?;
    let unique_cols: Vec<&str> = schema
        .columns
        .iter()
        .filter(|col| {
            ctx.profile(table, &col.name).is_some_and(|p| {
                p.row_count_sampled >= 1
                    && p.null_fraction == 0.0
                    && p.distinct_count == p.row_count_sampled
            })
        })
        .map(|col| col.name.as_str())
        .collect();
    let candidate = unique_cols
        .iter()
        .find(|c| canonical(c).ends_with("id"))
        .or_else(|| unique_cols.first())?;
    Some(vec![StatementTransformation::create(
        format!("new:pk_{}", canonical(table)),
        "promote the unique-looking column to primary key",
        format!("ALTER TABLE {} ADD PRIMARY KEY ({candidate});", schema.name),
    )])
}

// ---------------------------------------------------------------------------
// Textual fixes
// ---------------------------------------------------------------------------

/// Tailored textual guidance; total over every kind and deterministic given
/// (finding, context).
pub fn textual_fix(finding: &Finding, ctx: &ApplicationContext) -> String {
    use AntiPatternKind::*;
    let table = finding.location.table().unwrap_or("the table");
    let column = finding.location.column().unwrap_or("the column");
    match finding.kind {
        MultiValuedAttribute => format!(
            "Create an intersection table holding one row per ({table}, value) pair with foreign keys \
             to both referenced tables, drop {table}.{column}, and replace string-matching predicates \
             with equi-joins through it."
        ),
        NoPrimaryKey => format!(
            "Declare a primary key on {table} (ALTER TABLE {table} ADD PRIMARY KEY (<column>)); \
             without one the DBMS cannot prevent duplicate rows or support foreign keys."
        ),
        NoForeignKey => {
            let edge = ctx
                .join_graph
                .iter()
                .find(|e| e.touches(table, column))
                .and_then(|e| e.other(table, column).cloned())
                .map(|(t, c)| match ctx.schema(&t) {
                    Some(schema) => {
                        let col = schema
                            .column(&c)
                            .map(|col| col.name.clone())
                            .unwrap_or(c);
                        (schema.name.clone(), col)
                    }
                    None => (t, c),
                });
            match edge {
                Some((other_table, other_col)) => format!(
                    "ALTER TABLE {table} ADD FOREIGN KEY ({column}) REFERENCES {other_table}({other_col}); \
                     the join between these columns is not protected by referential integrity."
                ),
                None => format!(
                    "Declare the foreign key relationship for {table}.{column} so the DBMS enforces \
                     referential integrity."
                ),
            }
        }
        GenericPrimaryKey => format!(
            "Rename {table}.{column} to a descriptive key such as {table}_id; a bare \"id\" is \
             ambiguous in joins."
        ),
        DataInMetadata => format!(
            "Fold the numbered columns of {table} into rows of a child table keyed by ({table} id, \
             series label); column names should not encode data values."
        ),
        AdjacencyList => format!(
            "Hierarchies stored via {table}.{column} self-references make depth queries and deletes \
             hard; consider a path enumeration or closure table design."
        ),
        GodTable => format!(
            "Split {table} into cohesive entities linked by foreign keys instead of one wide table."
        ),
        RoundingErrors => format!(
            "Retype {table}.{column} as NUMERIC/DECIMAL with explicit precision; binary floating \
             point skews aggregates and equality filters."
        ),
        EnumeratedTypes => {
            let drop = ctx
                .schema(table)
                .and_then(|s| {
                    s.constraints.iter().find(|c| {
                        c.kind == ConstraintKind::Check
                            && c.expression_text
                                .as_deref()
                                .is_some_and(|e| e.to_lowercase().contains(&canonical(column)))
                    })
                })
                .and_then(|c| c.name.as_deref())
                .map(|name| format!("ALTER TABLE {table} DROP CONSTRAINT IF EXISTS {name}; "))
                .unwrap_or_default();
            format!(
                "Create a lookup table {column}_lookup with one row per permitted value and declare \
                 a foreign key from {table}.{column} to it. {drop}Adding or renaming values then \
                 touches one row instead of the schema."
            )
        }
        ExternalDataStorage => format!(
            "{table}.{column} stores a filesystem reference; files outside the database skip \
             transactions, backups, and access control. Consider storing the content in a BLOB column."
        ),
        IndexOveruse => format!(
            "Drop the unused index flagged on {}; every write pays for it while no registered query \
             chooses it.",
            finding
                .evidence
                .split_whitespace()
                .nth(1)
                .unwrap_or("this statement")
        ),
        IndexUnderuse => format!(
            "CREATE INDEX idx_{}_{} ON {table} ({column}); repeated selective predicates on this \
             column currently scan the table.",
            canonical(table),
            canonical(column)
        ),
        CloneTable => format!(
            "Merge the {table} clones into one table with a discriminator column; per-period tables \
             force schema edits and UNIONs."
        ),
        ColumnWildcardUsage => {
            let cols = finding
                .statement_id
                .as_deref()
                .and_then(|sid| ctx.statement(sid))
                .and_then(|s| s.tables_referenced.first().cloned())
                .and_then(|t| ctx.schema(&t))
                .map(|s| {
                    s.columns
                        .iter()
                        .map(|c| c.name.clone())
                        .collect::<Vec<_>>()
                        .join(", ")
                });
            match cols {
                Some(cols) if !cols.is_empty() => format!(
                    "List the needed columns explicitly instead of SELECT * (available: {cols}); \
                     wildcard reads break on refactoring and drag unused data."
                ),
                _ => "List the needed columns explicitly instead of SELECT *; wildcard reads break \
                      on refactoring and drag unused data."
                    .to_string(),
            }
        }
        ConcatenateNulls => "Wrap nullable concatenation operands in COALESCE(col, '') so a single \
                             NULL does not null the whole expression."
            .to_string(),
        OrderingByRand => "Avoid ORDER BY RAND(): count the rows, pick a random offset, and fetch \
                           with LIMIT 1 OFFSET <n> instead of sorting the whole table."
            .to_string(),
        PatternMatching => "Leading-wildcard and regex predicates cannot use indexes; consider a \
                            full-text index or a dedicated search engine for this filter."
            .to_string(),
        ImplicitColumns => {
            let cols = finding
                .statement_id
                .as_deref()
                .and_then(|sid| ctx.statement(sid))
                .and_then(|s| s.target_table.clone())
                .and_then(|t| ctx.schema(&t))
                .map(|s| {
                    s.columns
                        .iter()
                        .map(|c| c.name.clone())
                        .collect::<Vec<_>>()
                        .join(", ")
                });
            match cols {
                Some(cols) if !cols.is_empty() => {
                    format!("Spell out the insert column list ({cols}) so schema evolution cannot \
                             silently shift values into the wrong columns.")
                }
                _ => "Spell out the insert column list so schema evolution cannot silently shift \
                      values into the wrong columns."
                    .to_string(),
            }
        }
        DistinctAndJoin => "DISTINCT here deduplicates rows the join multiplied; an EXISTS subquery \
                            avoids producing the duplicates at all."
            .to_string(),
        TooManyJoins => "Split this query into simpler steps or revisit the schema; the join chain \
                         is past the configured threshold."
            .to_string(),
        MissingTimezone => format!(
            "Store {table}.{column} with an explicit timezone (TIMESTAMP WITH TIME ZONE or \
             ISO-8601 offsets); naive timestamps are ambiguous across regions."
        ),
        IncorrectDataType => format!(
            "Retype {table}.{column} to match its contents; storing numbers as text costs space \
             and breaks comparisons."
        ),
        DenormalizedTable => format!(
            "Extract the correlated pair around {table}.{column} into its own table and reference \
             it by key; duplicated pairs drift apart on update."
        ),
        InformationDuplication => format!(
            "Drop the derived column {table}.{column} and compute it in queries (or a view); stored \
             derivations go stale."
        ),
        RedundantColumn => format!(
            "Drop {table}.{column}: the sampled data shows it carries no information."
        ),
        NoDomainConstraint => format!(
            "ALTER TABLE {table} ADD CHECK ({column} BETWEEN <lo> AND <hi>); the sampled values sit \
             in a conventional bounded range that nothing enforces."
        ),
    }
}

/// Apply plans to a corpus: rewritten statements are replaced in place,
/// created statements are appended, annotations are dropped. Plans arrive in
/// ranking order and conflicts resolve iteratively: the first (highest
/// ranked) plan to rewrite a statement wins, mirroring a developer applying
/// fixes top-down. Returns the new corpus text (used to check fix
/// idempotence).
pub fn apply_to_corpus(statements: &[AnnotatedStatement], plans: &[RepairPlan]) -> String {
    let mut texts: Vec<(String, String)> = statements
        .iter()
        .map(|s| (s.source_id.clone(), text_of(&s.tokens)))
        .collect();
    let mut rewritten: BTreeSet<String> = BTreeSet::new();
    let mut created: Vec<String> = Vec::new();
    for plan in plans {
        for t in &plan.transformations {
            match t.op {
                TransformOp::RewriteExisting => {
                    if rewritten.contains(&t.target) {
                        continue;
                    }
                    if let Some(slot) = texts.iter_mut().find(|(sid, _)| *sid == t.target) {
                        slot.1 = t.rendered.clone();
                        rewritten.insert(t.target.clone());
                    }
                }
                TransformOp::CreateNew => {
                    if !created.contains(&t.rendered) {
                        created.push(t.rendered.clone());
                    }
                }
                TransformOp::Annotate => {}
            }
        }
    }
    let mut out: Vec<String> = texts.into_iter().map(|(_, text)| text).collect();
    out.extend(created);
    let mut corpus = String::new();
    for text in out {
        let trimmed = text.trim().to_string();
        corpus.push_str(&trimmed);
        if !trimmed.ends_with(';') {
            corpus.push(';');
        }
        corpus.push('\n');
    }
    corpus
}
