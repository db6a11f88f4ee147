//! SQL anti-pattern analysis: a tolerant SQL frontend, an application-context
//! builder with pluggable dataset adapters, detection rules (per-statement,
//! cross-statement, and data-driven), a weighted impact ranking model, and a
//! rule-based repair engine.

pub mod catalog;
pub mod config;
pub mod context;
pub mod frontend;
pub mod pipeline;
pub mod profiler;
pub mod ranker;
pub mod repair;
pub mod report;
pub mod rules;

pub use catalog::{AntiPatternKind, Category};
pub use config::BuildConfig;
pub use context::{build_context, impacted_queries, ApplicationContext, ColumnProfile, TableSchema};
pub use frontend::{parse, parse_corpus, render, split_statements, AnnotatedStatement, StatementKind};
pub use ranker::{normalize, rank, score, ImpactVector, MetricsTable, RankingConfig, ScoreBreakdown};
pub use repair::{fix, textual_fix, RepairPlan};
pub use rules::{detect_all, detect_inter, detect_intra, rules_for_query, Finding, Location, Phase};
