//! Report assembly and emission. The JSON shape here is the single machine
//! format: the CLI writes it and the REST endpoint returns it, so the two
//! surfaces cannot drift apart. Output is byte-deterministic for identical
//! inputs and configuration.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::catalog::Category;
use crate::config::BuildConfig;
use crate::ranker::{RankingConfig, ScoreBreakdown};
use crate::repair::{RepairPlan, StatementTransformation, TransformOp};
use crate::rules::{Finding, Location, Phase};

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Report {
    pub version: u32,
    pub config: ReportConfig,
    pub findings: Vec<ReportFinding>,
    pub summary: Summary,
}

#[derive(Debug, Serialize)]
pub struct ReportConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    pub weights: BTreeMap<&'static str, f64>,
    pub thresholds: BuildConfig,
}

#[derive(Debug, Serialize)]
pub struct LocationOut {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub statement: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct ReportFinding {
    pub kind: &'static str,
    pub category: &'static str,
    pub location: LocationOut,
    /// Statement the finding was raised on, when any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub statement: Option<String>,
    pub phase: Phase,
    pub suppressed: bool,
    pub evidence: String,
    pub score: ScoreOut,
    pub fix: FixOut,
}

#[derive(Debug, Serialize)]
pub struct ScoreOut {
    pub terms: BTreeMap<&'static str, f64>,
    pub contributions: BTreeMap<&'static str, f64>,
    pub total: f64,
}

#[derive(Debug, Serialize)]
pub struct FixOut {
    pub mode: &'static str,
    pub statements: Vec<FixStatement>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct FixStatement {
    pub op: TransformOp,
    pub target: String,
    pub edit: String,
    pub sql: String,
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub by_category: BTreeMap<&'static str, usize>,
    pub by_kind: BTreeMap<&'static str, usize>,
}

fn location_out(location: &Location) -> LocationOut {
    match location {
        Location::Statement(s) => LocationOut {
            statement: Some(s.clone()),
            table: None,
            column: None,
        },
        Location::Table(t) => LocationOut {
            statement: None,
            table: Some(t.clone()),
            column: None,
        },
        Location::Column(t, c) => LocationOut {
            statement: None,
            table: Some(t.clone()),
            column: Some(c.clone()),
        },
    }
}

fn fix_out(plan: &RepairPlan) -> FixOut {
    if plan.is_rewrite() {
        FixOut {
            mode: "rewrite",
            statements: plan.transformations.iter().map(fix_statement).collect(),
            text: None,
        }
    } else {
        FixOut {
            mode: "textual",
            statements: Vec::new(),
            text: plan.textual_fix.clone(),
        }
    }
}

fn fix_statement(t: &StatementTransformation) -> FixStatement {
    FixStatement {
        op: t.op,
        target: t.target.clone(),
        edit: t.edit.clone(),
        sql: t.rendered.clone(),
    }
}

/// Assemble the report from ranked findings and their plans (same order).
pub fn build_report(
    ranked: &[(Finding, ScoreBreakdown)],
    plans: &[RepairPlan],
    build: &BuildConfig,
    ranking: &RankingConfig,
    preset: Option<&str>,
) -> Report {
    debug_assert_eq!(ranked.len(), plans.len());
    let mut by_category: BTreeMap<&'static str, usize> = Category::ALL
        .iter()
        .map(|c| (c.id(), 0usize))
        .collect();
    let mut by_kind: BTreeMap<&'static str, usize> = BTreeMap::new();

    let findings: Vec<ReportFinding> = ranked
        .iter()
        .zip(plans)
        .map(|((finding, breakdown), plan)| {
            *by_category.entry(finding.category().id()).or_insert(0) += 1;
            *by_kind.entry(finding.kind.id()).or_insert(0) += 1;
            ReportFinding {
                kind: finding.kind.id(),
                category: finding.category().id(),
                location: location_out(&finding.location),
                statement: finding.statement_id.clone(),
                phase: finding.phase,
                suppressed: finding.suppressed_by_context,
                evidence: finding.evidence.clone(),
                score: ScoreOut {
                    terms: breakdown.terms.clone(),
                    contributions: breakdown.contributions.clone(),
                    total: breakdown.total,
                },
                fix: fix_out(plan),
            }
        })
        .collect();

    let weights = [
        ("rp", ranking.w_rp),
        ("wp", ranking.w_wp),
        ("m", ranking.w_m),
        ("da", ranking.w_da),
        ("di", ranking.w_di),
        ("a", ranking.w_a),
    ]
    .into_iter()
    .collect();

    Report {
        version: REPORT_VERSION,
        config: ReportConfig {
            preset: preset.map(str::to_string),
            weights,
            thresholds: build.clone(),
        },
        findings,
        summary: Summary {
            by_category,
            by_kind,
        },
    }
}

impl Report {
    pub fn to_json_bytes(&self) -> Vec<u8> {
        let mut bytes = serde_json::to_vec_pretty(self).expect("report serializes");
        bytes.push(b'\n');
        bytes
    }

    /// Human-readable rendering: a ranked table followed by fix blocks.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let suppressed = self.findings.iter().filter(|f| f.suppressed).count();
        out.push_str(&format!(
            "{} finding(s), {} suppressed by context\n",
            self.findings.len(),
            suppressed
        ));
        if self.findings.is_empty() {
            return out;
        }
        out.push_str(&format!(
            "{:<4} {:<7} {:<24} {:<16} {:<6} {}\n",
            "#", "score", "kind", "category", "phase", "location"
        ));
        for (i, f) in self.findings.iter().enumerate() {
            let location = match (&f.location.statement, &f.location.table, &f.location.column) {
                (Some(s), _, _) => s.clone(),
                (_, Some(t), Some(c)) => format!("{t}.{c}"),
                (_, Some(t), None) => t.clone(),
                _ => String::new(),
            };
            let phase = match f.phase {
                Phase::IntraQuery => "intra",
                Phase::InterQuery => "inter",
                Phase::Data => "data",
            };
            out.push_str(&format!(
                "{:<4} {:<7.3} {:<24} {:<16} {:<6} {}{}\n",
                i + 1,
                f.score.total,
                f.kind,
                f.category,
                phase,
                location,
                if f.suppressed { "  [suppressed]" } else { "" }
            ));
        }
        out.push('\n');
        for (i, f) in self.findings.iter().enumerate() {
            out.push_str(&format!("[{}] {}\n", i + 1, f.kind));
            out.push_str(&format!("    evidence: {}\n", f.evidence));
            match f.fix.mode {
                "rewrite" => {
                    for s in &f.fix.statements {
                        match s.op {
                            TransformOp::Annotate => {
                                out.push_str(&format!("    note ({}): {}\n", s.target, s.sql));
                            }
                            _ => {
                                out.push_str(&format!(
                                    "    {} ({}):\n",
                                    match s.op {
                                        TransformOp::RewriteExisting => "rewrite",
                                        TransformOp::CreateNew => "new statement",
                                        TransformOp::Annotate => unreachable!(),
                                    },
                                    s.target
                                ));
                                for line in s.sql.lines() {
                                    out.push_str(&format!("        {line}\n"));
                                }
                            }
                        }
                    }
                }
                _ => {
                    if let Some(text) = &f.fix.text {
                        out.push_str(&format!("    fix: {text}\n"));
                    }
                }
            }
            out.push('\n');
        }
        out
    }
}
