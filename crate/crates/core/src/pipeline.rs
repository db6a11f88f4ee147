//! End-to-end analysis: parse, build context, detect, rank, fix. Shared by
//! the command-line tool and the HTTP service.

use crate::config::BuildConfig;
use crate::context::{build_context, ApplicationContext, DatasetAdapter};
use crate::frontend::parse_corpus;
use crate::ranker::{rank, MetricsTable, RankError, RankingConfig, ScoreBreakdown};
use crate::repair::{fix, RepairPlan};
use crate::report::{build_report, Report};
use crate::rules::{detect_with, DetectOptions, Finding};

#[derive(Debug, Clone)]
pub struct AnalysisOptions {
    pub build: BuildConfig,
    pub ranking: RankingConfig,
    pub metrics: MetricsTable,
    pub preset_name: Option<String>,
    pub detect: DetectOptions,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            build: BuildConfig::default(),
            ranking: RankingConfig::preset_c1(),
            metrics: MetricsTable::default(),
            preset_name: Some("C1".to_string()),
            detect: DetectOptions::default(),
        }
    }
}

#[derive(Debug)]
pub struct Analysis {
    pub context: ApplicationContext,
    pub ranked: Vec<(Finding, ScoreBreakdown)>,
    pub plans: Vec<RepairPlan>,
}

/// Analyze named SQL sources against an optional dataset.
pub fn analyze_sources(
    sources: &[(String, String)],
    dataset: Option<&dyn DatasetAdapter>,
    opts: &AnalysisOptions,
) -> Result<Analysis, RankError> {
    let mut statements = Vec::new();
    for (name, text) in sources {
        statements.extend(parse_corpus(text, name));
    }
    let ctx = build_context(statements.clone(), dataset, opts.build.clone());
    let findings = detect_with(&statements, &ctx, opts.detect);
    let ranked = rank(&findings, &opts.ranking, &opts.metrics)?;
    let ranked_findings: Vec<Finding> = ranked.iter().map(|(f, _)| f.clone()).collect();
    let plans = fix(&ranked_findings, &ctx);
    Ok(Analysis {
        context: ctx,
        ranked,
        plans,
    })
}

/// Single-corpus convenience used by the HTTP endpoint and tests.
pub fn analyze_sql(
    sql: &str,
    source: &str,
    opts: &AnalysisOptions,
) -> Result<Analysis, RankError> {
    analyze_sources(&[(source.to_string(), sql.to_string())], None, opts)
}

pub fn report_for(analysis: &Analysis, opts: &AnalysisOptions) -> Report {
    build_report(
        &analysis.ranked,
        &analysis.plans,
        &opts.build,
        &opts.ranking,
        opts.preset_name.as_deref(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_corpus_yields_empty_report() {
        let opts = AnalysisOptions::default();
        let analysis = analyze_sql("", "t", &opts).unwrap();
        assert!(analysis.ranked.is_empty());
        let report = report_for(&analysis, &opts);
        assert!(report.findings.is_empty());
        assert_eq!(report.summary.by_category.values().sum::<usize>(), 0);
        assert!(report.summary.by_kind.is_empty());
    }

    #[test]
    fn insert_example_reports_rewrite_through_pipeline() {
        let opts = AnalysisOptions::default();
        let sql = "
CREATE TABLE Tenant(Tenant_ID VARCHAR(10) PRIMARY KEY, Zone_ID VARCHAR(10),
Active BOOLEAN, User_IDs VARCHAR(100));
INSERT INTO Tenant VALUES ('T1', 'Z1', True, 'U1,U2');
";
        let analysis = analyze_sql(sql, "t", &opts).unwrap();
        let report = report_for(&analysis, &opts);
        let implicit = report
            .findings
            .iter()
            .find(|f| f.kind == "implicit_columns")
            .expect("implicit columns reported");
        assert_eq!(implicit.fix.mode, "rewrite");
        let rewritten = &implicit.fix.statements[0].sql;
        assert!(rewritten.contains("(Tenant_ID, Zone_ID, Active, User_IDs)"), "{rewritten}");
    }

    #[test]
    fn json_output_is_deterministic() {
        let opts = AnalysisOptions::default();
        let sql = "SELECT * FROM t WHERE name LIKE '%x'";
        let a = report_for(&analyze_sql(sql, "t", &opts).unwrap(), &opts).to_json_bytes();
        let b = report_for(&analyze_sql(sql, "t", &opts).unwrap(), &opts).to_json_bytes();
        assert_eq!(a, b);
    }
}
