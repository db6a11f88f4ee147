//! Detection rule registry and the intra-query / inter-query / data
//! detection passes.
//!
//! Rules are pure functions over `(statement, context)`. The registry is
//! enumerable and in catalog order, which together with statement order and
//! phase order fixes the output ordering completely: findings are emitted in
//! phase order (intra, inter, data), statement order within a phase, and
//! registry order within a statement.

mod inter;
mod intra;

pub(crate) use intra::like_predicates as like_predicates_of;

use std::collections::BTreeSet;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::{AntiPatternKind, Category};
use crate::context::ApplicationContext;
use crate::frontend::{AnnotatedStatement, ColumnRef, StatementKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    IntraQuery,
    InterQuery,
    Data,
}

/// Subject of a finding: a statement, a table, or a table column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Location {
    Statement(String),
    Table(String),
    Column(String, String),
}

impl Location {
    /// Canonical comparable form (kind tag, table-or-statement, column).
    pub fn key(&self) -> (u8, String, String) {
        use crate::frontend::canonical;
        match self {
            Location::Statement(s) => (0, s.clone(), String::new()),
            Location::Table(t) => (1, canonical(t), String::new()),
            Location::Column(t, c) => (2, canonical(t), canonical(c)),
        }
    }

    pub fn table(&self) -> Option<&str> {
        match self {
            Location::Statement(_) => None,
            Location::Table(t) => Some(t),
            Location::Column(t, _) => Some(t),
        }
    }

    pub fn column(&self) -> Option<&str> {
        match self {
            Location::Column(_, c) => Some(c),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub kind: AntiPatternKind,
    pub location: Location,
    /// Statement the finding was raised on, when any; used for grouping in
    /// the ranking stage.
    pub statement_id: Option<String>,
    pub evidence: String,
    pub phase: Phase,
    pub suppressed_by_context: bool,
    /// Context snapshot fingerprint; always present for inter/data findings.
    pub context_ref: Option<String>,
    /// Columns implicated beyond the location, e.g. concatenation operands.
    pub detail_columns: Vec<ColumnRef>,
}

impl Finding {
    pub fn new(
        kind: AntiPatternKind,
        location: Location,
        statement_id: Option<String>,
        evidence: impl Into<String>,
        phase: Phase,
    ) -> Self {
        Finding {
            kind,
            location,
            statement_id,
            evidence: evidence.into(),
            phase,
            suppressed_by_context: false,
            context_ref: None,
            detail_columns: Vec::new(),
        }
    }

    pub fn category(&self) -> Category {
        self.kind.category()
    }
}

/// One registered detection rule.
pub struct DetectionRule {
    pub kind: AntiPatternKind,
    pub phase: Phase,
    pub applicable: &'static [StatementKind],
    pub detect: fn(&AnnotatedStatement, &ApplicationContext) -> Vec<Finding>,
}

impl DetectionRule {
    pub fn applies_to(&self, kind: StatementKind) -> bool {
        self.applicable.contains(&kind)
    }
}

use StatementKind::*;

const QUERIES: &[StatementKind] = &[Select, Update, Delete];
const DML: &[StatementKind] = &[Select, Insert, Update, Delete];
const DDL: &[StatementKind] = &[CreateTable, AlterTable];

/// Registry in catalog order. Data-category rules live in the profiler and
/// are not statement rules.
pub fn registry() -> &'static [DetectionRule] {
    static REGISTRY: OnceLock<Vec<DetectionRule>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        vec![
            DetectionRule {
                kind: AntiPatternKind::MultiValuedAttribute,
                phase: Phase::IntraQuery,
                applicable: &[Select],
                detect: intra::multi_valued_attribute_suspect,
            },
            DetectionRule {
                kind: AntiPatternKind::NoPrimaryKey,
                phase: Phase::InterQuery,
                applicable: &[CreateTable],
                detect: inter::no_primary_key,
            },
            DetectionRule {
                kind: AntiPatternKind::NoForeignKey,
                phase: Phase::InterQuery,
                applicable: &[CreateTable],
                detect: inter::no_foreign_key,
            },
            DetectionRule {
                kind: AntiPatternKind::GenericPrimaryKey,
                phase: Phase::IntraQuery,
                applicable: DDL,
                detect: intra::generic_primary_key,
            },
            DetectionRule {
                kind: AntiPatternKind::DataInMetadata,
                phase: Phase::InterQuery,
                applicable: &[CreateTable],
                detect: inter::data_in_metadata,
            },
            DetectionRule {
                kind: AntiPatternKind::AdjacencyList,
                phase: Phase::InterQuery,
                applicable: DDL,
                detect: inter::adjacency_list,
            },
            DetectionRule {
                kind: AntiPatternKind::GodTable,
                phase: Phase::IntraQuery,
                applicable: &[CreateTable],
                detect: intra::god_table,
            },
            DetectionRule {
                kind: AntiPatternKind::RoundingErrors,
                phase: Phase::IntraQuery,
                applicable: DDL,
                detect: intra::rounding_errors,
            },
            DetectionRule {
                kind: AntiPatternKind::EnumeratedTypes,
                phase: Phase::InterQuery,
                applicable: DDL,
                detect: inter::enumerated_types_check,
            },
            DetectionRule {
                kind: AntiPatternKind::ExternalDataStorage,
                phase: Phase::IntraQuery,
                applicable: DDL,
                detect: intra::external_data_storage,
            },
            DetectionRule {
                kind: AntiPatternKind::IndexOveruse,
                phase: Phase::InterQuery,
                applicable: &[CreateIndex],
                detect: inter::index_overuse,
            },
            DetectionRule {
                kind: AntiPatternKind::IndexUnderuse,
                phase: Phase::InterQuery,
                applicable: QUERIES,
                detect: inter::index_underuse,
            },
            DetectionRule {
                kind: AntiPatternKind::CloneTable,
                phase: Phase::InterQuery,
                applicable: &[CreateTable],
                detect: inter::clone_table,
            },
            DetectionRule {
                kind: AntiPatternKind::ColumnWildcardUsage,
                phase: Phase::IntraQuery,
                applicable: &[Select],
                detect: intra::column_wildcard_usage,
            },
            DetectionRule {
                kind: AntiPatternKind::ConcatenateNulls,
                phase: Phase::IntraQuery,
                applicable: DML,
                detect: intra::concatenate_nulls,
            },
            DetectionRule {
                kind: AntiPatternKind::OrderingByRand,
                phase: Phase::IntraQuery,
                applicable: &[Select],
                detect: intra::ordering_by_rand,
            },
            DetectionRule {
                kind: AntiPatternKind::PatternMatching,
                phase: Phase::IntraQuery,
                applicable: QUERIES,
                detect: intra::pattern_matching,
            },
            DetectionRule {
                kind: AntiPatternKind::ImplicitColumns,
                phase: Phase::IntraQuery,
                applicable: &[Insert],
                detect: intra::implicit_columns,
            },
            DetectionRule {
                kind: AntiPatternKind::DistinctAndJoin,
                phase: Phase::IntraQuery,
                applicable: &[Select],
                detect: intra::distinct_and_join,
            },
            DetectionRule {
                kind: AntiPatternKind::TooManyJoins,
                phase: Phase::IntraQuery,
                applicable: &[Select],
                detect: intra::too_many_joins,
            },
            DetectionRule {
                kind: AntiPatternKind::NoDomainConstraint,
                phase: Phase::InterQuery,
                applicable: &[CreateTable],
                detect: inter::no_domain_constraint_name,
            },
        ]
    })
}

/// Rules applicable to the statement's kind, in registry order.
pub fn rules_for_query(stmt: &AnnotatedStatement) -> Vec<&'static DetectionRule> {
    registry().iter().filter(|r| r.applies_to(stmt.kind)).collect()
}

fn empty_context() -> &'static ApplicationContext {
    static EMPTY: OnceLock<ApplicationContext> = OnceLock::new();
    EMPTY.get_or_init(ApplicationContext::empty)
}

/// Context-free findings for one statement. Thresholds come from the default
/// configuration; use [`detect_inter`] to honor a custom one.
pub fn detect_intra(stmt: &AnnotatedStatement) -> Vec<Finding> {
    intra_with(stmt, empty_context())
}

fn intra_with(stmt: &AnnotatedStatement, ctx: &ApplicationContext) -> Vec<Finding> {
    let mut findings = Vec::new();
    for rule in rules_for_query(stmt) {
        if rule.phase == Phase::IntraQuery {
            findings.extend((rule.detect)(stmt, ctx));
        }
    }
    findings
}

/// Full per-statement detection against the application context: intra
/// findings with contextual suppression applied, plus inter-phase findings.
pub fn detect_inter(stmt: &AnnotatedStatement, ctx: &ApplicationContext) -> Vec<Finding> {
    let (mut intra, inter) = detect_statement(stmt, ctx);
    intra.extend(inter);
    intra
}

fn detect_statement(
    stmt: &AnnotatedStatement,
    ctx: &ApplicationContext,
) -> (Vec<Finding>, Vec<Finding>) {
    let mut intra = intra_with(stmt, ctx);
    for finding in &mut intra {
        apply_suppression(finding, ctx);
    }
    let mut inter = Vec::new();
    for rule in rules_for_query(stmt) {
        if rule.phase == Phase::InterQuery {
            inter.extend((rule.detect)(stmt, ctx));
        }
    }
    for finding in &mut inter {
        finding.context_ref = Some(ctx.snapshot_id.clone());
    }
    (intra, inter)
}

/// Contextual confirmation/suppression of intra findings. Suppressed
/// findings are retained with the flag set; nothing is ever removed.
fn apply_suppression(finding: &mut Finding, ctx: &ApplicationContext) {
    match finding.kind {
        AntiPatternKind::MultiValuedAttribute => {
            if let Location::Column(table, column) = &finding.location {
                if let Some(profile) = ctx.profile(table, column) {
                    if profile.delimiter_list_fraction < ctx.build_config.mva_fraction {
                        finding.suppressed_by_context = true;
                        finding.context_ref = Some(ctx.snapshot_id.clone());
                    }
                }
            }
        }
        AntiPatternKind::ConcatenateNulls
            if !finding.detail_columns.is_empty() => {
                let all_not_null = finding.detail_columns.iter().all(|cr| {
                    cr.table
                        .as_deref()
                        .and_then(|t| ctx.schema(t))
                        .map(|schema| schema.not_null(&cr.column))
                        .unwrap_or(false)
                });
                if all_not_null {
                    finding.suppressed_by_context = true;
                    finding.context_ref = Some(ctx.snapshot_id.clone());
                }
            }
        _ => {}
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DetectOptions {
    /// Run inter-query analysis (context rules and suppression).
    pub inter: bool,
    /// Run data rules when the context has profiles.
    pub data: bool,
}

impl Default for DetectOptions {
    fn default() -> Self {
        DetectOptions { inter: true, data: true }
    }
}

/// Run the full detection pipeline over the registered queries. Output order
/// is schedule-independent: phase, then statement registry order, then rule
/// registry order; data findings follow in table/column/rule order.
pub fn detect_all(queries: &[AnnotatedStatement], ctx: &ApplicationContext) -> Vec<Finding> {
    detect_with(queries, ctx, DetectOptions::default())
}

pub fn detect_with(
    queries: &[AnnotatedStatement],
    ctx: &ApplicationContext,
    opts: DetectOptions,
) -> Vec<Finding> {
    detect_with_rules(queries, ctx, opts, &[])
}

/// Like [`detect_with`], with in-process rule extension: `extra` rules run
/// after the built-in registry, in the given order. New rules target catalog
/// kinds; pair them with [`crate::ranker::MetricsTable::insert`] overrides
/// when their default impact metrics should differ.
pub fn detect_with_rules(
    queries: &[AnnotatedStatement],
    ctx: &ApplicationContext,
    opts: DetectOptions,
    extra: &[DetectionRule],
) -> Vec<Finding> {
    let per_statement: Vec<(Vec<Finding>, Vec<Finding>)> = queries
        .par_iter()
        .map(|stmt| {
            let (mut intra, mut inter) = if opts.inter {
                detect_statement(stmt, ctx)
            } else {
                (intra_with(stmt, ctx), Vec::new())
            };
            for rule in extra.iter().filter(|r| r.applies_to(stmt.kind)) {
                match rule.phase {
                    Phase::IntraQuery => intra.extend((rule.detect)(stmt, ctx)),
                    Phase::InterQuery if opts.inter => {
                        let mut found = (rule.detect)(stmt, ctx);
                        for f in &mut found {
                            f.context_ref = Some(ctx.snapshot_id.clone());
                        }
                        inter.extend(found);
                    }
                    _ => {}
                }
            }
            (intra, inter)
        })
        .collect();

    let mut findings = Vec::new();
    for (intra, _) in &per_statement {
        findings.extend(intra.iter().cloned());
    }
    if opts.inter {
        for (_, inter) in &per_statement {
            findings.extend(inter.iter().cloned());
        }
        findings.extend(inter::context_level(ctx));
    }
    if opts.data && ctx.has_profiles() {
        findings.extend(crate::profiler::data_rules(ctx));
    }

    // One report per (kind, subject): a data rule confirming an earlier-phase
    // finding on the same column refines it rather than duplicating it.
    let mut seen = BTreeSet::new();
    findings.retain(|f| seen.insert((f.kind, f.location.key())));
    findings
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::BuildConfig;
    use crate::context::build_context;
    use crate::frontend::parse_corpus;

    fn parse_one(sql: &str) -> AnnotatedStatement {
        let mut stmts = parse_corpus(sql, "t");
        assert_eq!(stmts.len(), 1);
        stmts.remove(0)
    }

    #[test]
    fn rules_for_insert_include_implicit_columns_only_applicable() {
        let stmt = parse_one("INSERT INTO Tenant VALUES (1)");
        let kinds: Vec<AntiPatternKind> = rules_for_query(&stmt).iter().map(|r| r.kind).collect();
        assert!(kinds.contains(&AntiPatternKind::ImplicitColumns));
        assert!(!kinds.contains(&AntiPatternKind::ColumnWildcardUsage));
    }

    #[test]
    fn rules_for_other_is_empty() {
        let stmt = parse_one("VACUUM");
        assert!(rules_for_query(&stmt).is_empty());
    }

    #[test]
    fn rules_for_create_table_cover_ddl_checks() {
        let stmt = parse_one("CREATE TABLE t (a int)");
        let kinds: Vec<AntiPatternKind> = rules_for_query(&stmt).iter().map(|r| r.kind).collect();
        for expected in [
            AntiPatternKind::NoPrimaryKey,
            AntiPatternKind::GodTable,
            AntiPatternKind::EnumeratedTypes,
            AntiPatternKind::RoundingErrors,
        ] {
            assert!(kinds.contains(&expected), "{expected:?} missing");
        }
    }

    #[test]
    fn registry_is_in_catalog_order() {
        let ordinals: Vec<usize> = registry().iter().map(|r| r.kind.ordinal()).collect();
        let mut sorted = ordinals.clone();
        sorted.sort();
        assert_eq!(ordinals, sorted);
    }

    #[test]
    fn detect_all_empty_inputs() {
        let ctx = build_context(Vec::new(), None, BuildConfig::default());
        assert!(detect_all(&[], &ctx).is_empty());
    }
}
