//! Impact scoring and ordering.
//!
//! Six raw metrics per anti-pattern (read/write speedup, change count,
//! data amplification, integrity and accuracy flags) are clamped to the unit
//! interval by fixed normalizers and combined as a weighted sum. Ordering has
//! an intra-query component (findings within one statement by descending
//! score) and an inter-query component (statements by finding count or by
//! score sum).

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::Serialize;

use crate::catalog::AntiPatternKind;
use crate::config::parse_kv;
use crate::rules::Finding;

#[derive(Debug, thiserror::Error)]
pub enum RankError {
    #[error("{metric} input must be 0 or 1, got {value}")]
    Domain { metric: &'static str, value: f64 },
    #[error("metric {metric} must be nonnegative, got {value}")]
    Negative { metric: &'static str, value: f64 },
    #[error("no impact metrics registered for kind {0}")]
    MissingMetrics(&'static str),
    #[error("weights must be nonnegative and not all zero")]
    BadWeights,
    #[error("metrics file: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    ReadPerformance,
    WritePerformance,
    Maintainability,
    DataAmplification,
    DataIntegrity,
    Accuracy,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::ReadPerformance,
        Metric::WritePerformance,
        Metric::Maintainability,
        Metric::DataAmplification,
        Metric::DataIntegrity,
        Metric::Accuracy,
    ];

    fn name(self) -> &'static str {
        match self {
            Metric::ReadPerformance => "rp",
            Metric::WritePerformance => "wp",
            Metric::Maintainability => "m",
            Metric::DataAmplification => "da",
            Metric::DataIntegrity => "di",
            Metric::Accuracy => "a",
        }
    }
}

/// Clamp a raw metric to the unit interval: performance and maintainability
/// saturate at 5, amplification at 8, and the two flags pass through.
pub fn normalize(metric: Metric, x: f64) -> Result<f64, RankError> {
    if x < 0.0 {
        return Err(RankError::Negative {
            metric: metric.name(),
            value: x,
        });
    }
    Ok(match metric {
        Metric::ReadPerformance | Metric::WritePerformance | Metric::Maintainability => {
            (x / 5.0).min(1.0)
        }
        Metric::DataAmplification => (x / 8.0).min(1.0),
        Metric::DataIntegrity | Metric::Accuracy => {
            if x != 0.0 && x != 1.0 {
                return Err(RankError::Domain {
                    metric: metric.name(),
                    value: x,
                });
            }
            x
        }
    })
}

/// Raw impact metrics for one anti-pattern kind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImpactVector {
    pub rp: f64,
    pub wp: f64,
    pub m: f64,
    pub da: f64,
    pub di: f64,
    pub a: f64,
}

impl ImpactVector {
    pub const ZERO: ImpactVector = ImpactVector {
        rp: 0.0,
        wp: 0.0,
        m: 0.0,
        da: 0.0,
        di: 0.0,
        a: 0.0,
    };

    fn get(&self, metric: Metric) -> f64 {
        match metric {
            Metric::ReadPerformance => self.rp,
            Metric::WritePerformance => self.wp,
            Metric::Maintainability => self.m,
            Metric::DataAmplification => self.da,
            Metric::DataIntegrity => self.di,
            Metric::Accuracy => self.a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InterQueryMode {
    /// Statements with more findings rank higher.
    ByFindingCount,
    /// Statements rank by descending score sum.
    ByScore,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankingConfig {
    pub w_rp: f64,
    pub w_wp: f64,
    pub w_m: f64,
    pub w_da: f64,
    pub w_di: f64,
    pub w_a: f64,
    pub inter_query_mode: InterQueryMode,
}

impl Default for RankingConfig {
    fn default() -> Self {
        RankingConfig::preset_c1()
    }
}

impl RankingConfig {
    /// Read-prioritizing preset (analytical workloads).
    pub fn preset_c1() -> Self {
        RankingConfig {
            w_rp: 0.7,
            w_wp: 0.15,
            w_m: 0.05,
            w_da: 0.04,
            w_di: 0.02,
            w_a: 0.02,
            inter_query_mode: InterQueryMode::ByScore,
        }
    }

    /// Balanced read/write preset (hybrid workloads).
    pub fn preset_c2() -> Self {
        RankingConfig {
            w_rp: 0.4,
            w_wp: 0.4,
            w_m: 0.1,
            w_da: 0.04,
            w_di: 0.02,
            w_a: 0.02,
            inter_query_mode: InterQueryMode::ByScore,
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name.to_uppercase().as_str() {
            "C1" => Some(Self::preset_c1()),
            "C2" => Some(Self::preset_c2()),
            _ => None,
        }
    }

    pub fn weights(&self) -> [f64; 6] {
        [self.w_rp, self.w_wp, self.w_m, self.w_da, self.w_di, self.w_a]
    }

    fn weight(&self, metric: Metric) -> f64 {
        match metric {
            Metric::ReadPerformance => self.w_rp,
            Metric::WritePerformance => self.w_wp,
            Metric::Maintainability => self.w_m,
            Metric::DataAmplification => self.w_da,
            Metric::DataIntegrity => self.w_di,
            Metric::Accuracy => self.w_a,
        }
    }

    /// Weights must sum to one (within 1e-9); anything else normalizes with a
    /// warning so ordering is unaffected.
    pub fn normalized(mut self) -> Result<(Self, Option<String>), RankError> {
        let sum: f64 = self.weights().iter().sum();
        if self.weights().iter().any(|w| *w < 0.0) || sum <= 0.0 {
            return Err(RankError::BadWeights);
        }
        if (sum - 1.0).abs() <= 1e-9 {
            return Ok((self, None));
        }
        self.w_rp /= sum;
        self.w_wp /= sum;
        self.w_m /= sum;
        self.w_da /= sum;
        self.w_di /= sum;
        self.w_a /= sum;
        Ok((
            self,
            Some(format!("weights summed to {sum}; normalized to 1")),
        ))
    }

    /// Parse a key/value weights file (`w_rp = 0.7`, ...,
    /// `inter_query_mode = count|score`). Unlisted weights are zero.
    pub fn from_kv(text: &str) -> Result<(Self, Option<String>), RankError> {
        let mut cfg = RankingConfig {
            w_rp: 0.0,
            w_wp: 0.0,
            w_m: 0.0,
            w_da: 0.0,
            w_di: 0.0,
            w_a: 0.0,
            inter_query_mode: InterQueryMode::ByScore,
        };
        for (key, value) in parse_kv(text).map_err(|e| RankError::Parse(e.to_string()))? {
            let parsed = || {
                value
                    .parse::<f64>()
                    .map_err(|_| RankError::Parse(format!("bad number for {key}: {value}")))
            };
            match key.as_str() {
                "w_rp" => cfg.w_rp = parsed()?,
                "w_wp" => cfg.w_wp = parsed()?,
                "w_m" => cfg.w_m = parsed()?,
                "w_da" => cfg.w_da = parsed()?,
                "w_di" => cfg.w_di = parsed()?,
                "w_a" => cfg.w_a = parsed()?,
                "inter_query_mode" => {
                    cfg.inter_query_mode = match value.as_str() {
                        "count" => InterQueryMode::ByFindingCount,
                        "score" => InterQueryMode::ByScore,
                        _ => return Err(RankError::Parse(format!("bad mode: {value}"))),
                    }
                }
                _ => return Err(RankError::Parse(format!("unknown key: {key}"))),
            }
        }
        cfg.normalized()
    }
}

/// Normalized terms, weighted contributions, and their exact sum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreBreakdown {
    pub terms: BTreeMap<&'static str, f64>,
    pub contributions: BTreeMap<&'static str, f64>,
    pub total: f64,
}

pub fn score(iv: &ImpactVector, cfg: &RankingConfig) -> Result<ScoreBreakdown, RankError> {
    let mut terms = BTreeMap::new();
    let mut contributions = BTreeMap::new();
    let mut total = 0.0;
    for metric in Metric::ALL {
        let term = normalize(metric, iv.get(metric))?;
        let contribution = cfg.weight(metric) * term;
        terms.insert(metric.name(), term);
        contributions.insert(metric.name(), contribution);
        total += contribution;
    }
    Ok(ScoreBreakdown {
        terms,
        contributions,
        total,
    })
}

/// Per-kind impact metrics, loadable from a key/value data file.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsTable {
    entries: BTreeMap<AntiPatternKind, ImpactVector>,
}

impl MetricsTable {
    pub fn from_kv(text: &str) -> Result<Self, RankError> {
        let mut entries = BTreeMap::new();
        for (key, value) in parse_kv(text).map_err(|e| RankError::Parse(e.to_string()))? {
            let kind = AntiPatternKind::from_id(&key)
                .ok_or_else(|| RankError::Parse(format!("unknown anti-pattern kind: {key}")))?;
            let nums: Vec<f64> = value
                .split_whitespace()
                .map(|v| {
                    v.parse::<f64>()
                        .map_err(|_| RankError::Parse(format!("bad number in {key}: {v}")))
                })
                .collect::<Result<_, _>>()?;
            if nums.len() != 6 {
                return Err(RankError::Parse(format!(
                    "{key}: expected 6 metrics, got {}",
                    nums.len()
                )));
            }
            entries.insert(
                kind,
                ImpactVector {
                    rp: nums[0],
                    wp: nums[1],
                    m: nums[2],
                    da: nums[3],
                    di: nums[4],
                    a: nums[5],
                },
            );
        }
        Ok(MetricsTable { entries })
    }

    /// The built-in table shipped with the crate.
    pub fn builtin() -> &'static MetricsTable {
        static BUILTIN: OnceLock<MetricsTable> = OnceLock::new();
        BUILTIN.get_or_init(|| {
            MetricsTable::from_kv(include_str!("../data/default_metrics.conf"))
                .expect("builtin metrics table parses")
        })
    }

    /// Overlay user entries on top of the builtin defaults.
    pub fn with_overrides(text: &str) -> Result<Self, RankError> {
        let mut table = Self::builtin().clone();
        for (kind, iv) in MetricsTable::from_kv(text)?.entries {
            table.entries.insert(kind, iv);
        }
        Ok(table)
    }

    pub fn get(&self, kind: AntiPatternKind) -> Result<&ImpactVector, RankError> {
        self.entries
            .get(&kind)
            .ok_or(RankError::MissingMetrics(kind.id()))
    }

    pub fn insert(&mut self, kind: AntiPatternKind, iv: ImpactVector) {
        self.entries.insert(kind, iv);
    }
}

impl Default for MetricsTable {
    fn default() -> Self {
        Self::builtin().clone()
    }
}

/// Rank findings: statements are ordered by the inter-query mode (suppressed
/// findings do not count toward group weight), and findings within one
/// statement by descending score; ties break on statement source order and
/// catalog position.
pub fn rank(
    findings: &[Finding],
    cfg: &RankingConfig,
    metrics: &MetricsTable,
) -> Result<Vec<(Finding, ScoreBreakdown)>, RankError> {
    struct Entry {
        finding: Finding,
        breakdown: ScoreBreakdown,
        group: usize,
    }

    let mut group_order: Vec<String> = Vec::new();
    let mut entries: Vec<Entry> = Vec::new();
    for finding in findings {
        let key = finding
            .statement_id
            .clone()
            .unwrap_or_else(|| format!("<{:?}>", finding.location.key()));
        let group = match group_order.iter().position(|g| *g == key) {
            Some(i) => i,
            None => {
                group_order.push(key);
                group_order.len() - 1
            }
        };
        let breakdown = score(metrics.get(finding.kind)?, cfg)?;
        entries.push(Entry {
            finding: finding.clone(),
            breakdown,
            group,
        });
    }

    // Inter-query component: group weight by mode over unsuppressed findings.
    let group_count = group_order.len();
    let mut weight = vec![0.0f64; group_count];
    for e in &entries {
        if !e.finding.suppressed_by_context {
            weight[e.group] += match cfg.inter_query_mode {
                InterQueryMode::ByFindingCount => 1.0,
                InterQueryMode::ByScore => e.breakdown.total,
            };
        }
    }
    let mut group_rank: Vec<usize> = (0..group_count).collect();
    group_rank.sort_by(|a, b| {
        weight[*b]
            .partial_cmp(&weight[*a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(b))
    });
    let mut position = vec![0usize; group_count];
    for (rank_pos, g) in group_rank.iter().enumerate() {
        position[*g] = rank_pos;
    }

    // Intra-query component: descending score within the statement.
    entries.sort_by(|a, b| {
        position[a.group]
            .cmp(&position[b.group])
            .then(a.finding.suppressed_by_context.cmp(&b.finding.suppressed_by_context))
            .then(
                b.breakdown
                    .total
                    .partial_cmp(&a.breakdown.total)
                    .unwrap_or(std::cmp::Ordering::Equal),
            )
            .then(a.finding.kind.ordinal().cmp(&b.finding.kind.ordinal()))
    });

    Ok(entries.into_iter().map(|e| (e.finding, e.breakdown)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::{Location, Phase};

    fn iv(rp: f64, wp: f64, m: f64, da: f64, di: f64, a: f64) -> ImpactVector {
        ImpactVector { rp, wp, m, da, di, a }
    }

    #[test]
    fn normalizer_formulas() {
        assert_eq!(normalize(Metric::ReadPerformance, 1.5).unwrap(), 0.3);
        assert_eq!(normalize(Metric::DataAmplification, 0.0).unwrap(), 0.0);
        assert_eq!(normalize(Metric::Maintainability, 7.0).unwrap(), 1.0);
        assert_eq!(normalize(Metric::DataAmplification, 1.0).unwrap(), 0.125);
        assert_eq!(normalize(Metric::Accuracy, 1.0).unwrap(), 1.0);
        assert!(normalize(Metric::DataIntegrity, 0.5).is_err());
        assert!(normalize(Metric::ReadPerformance, -1.0).is_err());
    }

    #[test]
    fn paper_scores_reproduce() {
        let c1 = RankingConfig::preset_c1();
        let c2 = RankingConfig::preset_c2();
        let index_underuse = iv(1.5, 0.0, 0.0, 0.0, 0.0, 0.0);
        let enumerated = iv(0.0, 10.0, 2.0, 1.0, 0.0, 0.0);

        assert!((score(&index_underuse, &c1).unwrap().total - 0.21).abs() < 1e-9);
        assert!((score(&enumerated, &c1).unwrap().total - 0.175).abs() < 1e-9);
        assert!((score(&index_underuse, &c2).unwrap().total - 0.12).abs() < 1e-9);
        // The published formula over the published metrics; differs from the
        // 0.47 quoted alongside it.
        assert!((score(&enumerated, &c2).unwrap().total - 0.445).abs() < 1e-9);
    }

    #[test]
    fn builtin_metrics_cover_all_kinds_and_match_flags() {
        let table = MetricsTable::builtin();
        for kind in AntiPatternKind::ALL {
            let iv = table.get(kind).unwrap();
            let measured = matches!(
                kind,
                AntiPatternKind::MultiValuedAttribute
                    | AntiPatternKind::IndexUnderuse
                    | AntiPatternKind::EnumeratedTypes
            );
            if measured {
                continue;
            }
            let flags = kind.impact_flags();
            assert_eq!(iv.rp > 0.0, flags.performance, "{kind:?} rp");
            assert_eq!(iv.wp > 0.0, flags.performance, "{kind:?} wp");
            assert_eq!(iv.m > 0.0, flags.maintainability, "{kind:?} m");
            assert_eq!(iv.da > 0.0, flags.data_amplification, "{kind:?} da");
            assert_eq!(iv.di > 0.0, flags.data_integrity, "{kind:?} di");
            assert_eq!(iv.a > 0.0, flags.accuracy, "{kind:?} a");
        }
        assert_eq!(table.get(AntiPatternKind::MultiValuedAttribute).unwrap().rp, 636.0);
        assert_eq!(table.get(AntiPatternKind::IndexUnderuse).unwrap().rp, 1.5);
        assert_eq!(table.get(AntiPatternKind::EnumeratedTypes).unwrap().wp, 10.0);
    }

    #[test]
    fn weights_normalize_with_warning() {
        let (cfg, warning) = RankingConfig::from_kv("w_rp = 7\nw_wp = 3").unwrap();
        assert!(warning.is_some());
        assert!((cfg.weights().iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!((cfg.w_rp - 0.7).abs() < 1e-9);
        assert!((cfg.w_m).abs() < 1e-9);
    }

    fn finding_on(stmt: &str, kind: AntiPatternKind) -> Finding {
        Finding::new(
            kind,
            Location::Statement(stmt.to_string()),
            Some(stmt.to_string()),
            "test",
            Phase::IntraQuery,
        )
    }

    #[test]
    fn intra_query_ordering_flips_between_presets() {
        let findings = vec![
            finding_on("q:1", AntiPatternKind::EnumeratedTypes),
            finding_on("q:1", AntiPatternKind::IndexUnderuse),
        ];
        let metrics = MetricsTable::builtin();

        let c1 = rank(&findings, &RankingConfig::preset_c1(), metrics).unwrap();
        assert_eq!(c1[0].0.kind, AntiPatternKind::IndexUnderuse);
        assert_eq!(c1[1].0.kind, AntiPatternKind::EnumeratedTypes);

        let c2 = rank(&findings, &RankingConfig::preset_c2(), metrics).unwrap();
        assert_eq!(c2[0].0.kind, AntiPatternKind::EnumeratedTypes);
        assert_eq!(c2[1].0.kind, AntiPatternKind::IndexUnderuse);
    }

    #[test]
    fn by_finding_count_orders_statements() {
        let mut findings = Vec::new();
        for _ in 0..1 {
            findings.push(finding_on("q:1", AntiPatternKind::PatternMatching));
        }
        for kind in [AntiPatternKind::PatternMatching, AntiPatternKind::TooManyJoins] {
            findings.push(finding_on("q:2", kind));
        }
        for kind in [
            AntiPatternKind::PatternMatching,
            AntiPatternKind::TooManyJoins,
            AntiPatternKind::DistinctAndJoin,
        ] {
            findings.push(finding_on("q:3", kind));
        }
        let mut cfg = RankingConfig::preset_c1();
        cfg.inter_query_mode = InterQueryMode::ByFindingCount;
        let ranked = rank(&findings, &cfg, MetricsTable::builtin()).unwrap();
        let order: Vec<&str> = ranked
            .iter()
            .map(|(f, _)| f.statement_id.as_deref().unwrap())
            .collect();
        assert_eq!(order, vec!["q:3", "q:3", "q:3", "q:2", "q:2", "q:1"]);
    }

    #[test]
    fn missing_metrics_is_an_error() {
        let table = MetricsTable::from_kv("").unwrap();
        let findings = vec![finding_on("q:1", AntiPatternKind::GodTable)];
        assert!(matches!(
            rank(&findings, &RankingConfig::default(), &table),
            Err(RankError::MissingMetrics(_))
        ));
    }
}
