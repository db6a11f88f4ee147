//! Table sampling, column profiling, and the data-category detection rules.
//!
//! Sampling is deterministic: tables at or below the sample size are scanned
//! fully (profile statistics then equal exact full-table statistics); larger
//! tables are either truncated (first-N) or reservoir-sampled with a seeded
//! generator, preserving row order either way.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog::AntiPatternKind;
use crate::config::{BuildConfig, SampleMode};
use crate::context::{
    ApplicationContext, ColumnProfile, DatasetAdapter, DatasetError, Row, ValueClass,
};
use crate::frontend::canonical;
use crate::rules::{Finding, Location, Phase};

/// Per-value classification, most specific first.
fn classify_value(value: &str) -> (ValueClass, bool, bool) {
    let v = value.trim();
    if let Some((has_time, has_tz)) = datetime_parts(v) {
        return (ValueClass::DateTime, has_time, has_tz);
    }
    if is_integer(v) {
        return (ValueClass::Integer, false, false);
    }
    if is_decimal(v) {
        return (ValueClass::Decimal, false, false);
    }
    if matches!(
        v.to_ascii_lowercase().as_str(),
        "true" | "false" | "t" | "f" | "yes" | "no"
    ) {
        return (ValueClass::Boolean, false, false);
    }
    (ValueClass::Text, false, false)
}

fn is_integer(v: &str) -> bool {
    let v = v.strip_prefix(['+', '-']).unwrap_or(v);
    !v.is_empty() && v.bytes().all(|b| b.is_ascii_digit())
}

fn is_decimal(v: &str) -> bool {
    let v = v.strip_prefix(['+', '-']).unwrap_or(v);
    let (mantissa, exponent) = match v.split_once(['e', 'E']) {
        Some((m, e)) => (m, Some(e)),
        None => (v, None),
    };
    if let Some(e) = exponent {
        let e = e.strip_prefix(['+', '-']).unwrap_or(e);
        if e.is_empty() || !e.bytes().all(|b| b.is_ascii_digit()) {
            return false;
        }
    }
    match mantissa.split_once('.') {
        Some((int, frac)) => {
            (!int.is_empty() || !frac.is_empty())
                && int.bytes().all(|b| b.is_ascii_digit())
                && frac.bytes().all(|b| b.is_ascii_digit())
        }
        None => exponent.is_some() && !mantissa.is_empty() && mantissa.bytes().all(|b| b.is_ascii_digit()),
    }
}

/// `YYYY-MM-DD[ T HH:MM[:SS[.frac]] [Z|+HH[:MM]]]`; returns (has_time, has_tz).
fn datetime_parts(v: &str) -> Option<(bool, bool)> {
    let b = v.as_bytes();
    if b.len() < 10 {
        return None;
    }
    let digits = |r: std::ops::Range<usize>| b[r].iter().all(|c| c.is_ascii_digit());
    if !(digits(0..4) && b[4] == b'-' && digits(5..7) && b[7] == b'-' && digits(8..10)) {
        return None;
    }
    let month: u32 = v[5..7].parse().ok()?;
    let day: u32 = v[8..10].parse().ok()?;
    if !(1..=12).contains(&month) || !(1..=31).contains(&day) {
        return None;
    }
    if b.len() == 10 {
        return Some((false, false));
    }
    if !(b[10] == b'T' || b[10] == b' ') || b.len() < 16 {
        return None;
    }
    if !(digits(11..13) && b[13] == b':' && digits(14..16)) {
        return None;
    }
    let rest = &v[16..];
    let rest = match rest.strip_prefix(':') {
        Some(r) if r.len() >= 2 && r.as_bytes()[..2].iter().all(|c| c.is_ascii_digit()) => {
            let r = &r[2..];
            r.strip_prefix('.')
                .map(|f| f.trim_start_matches(|c: char| c.is_ascii_digit()))
                .unwrap_or(r)
        }
        _ => rest,
    };
    let has_tz = match rest {
        "" => false,
        "Z" | "z" => true,
        _ => {
            let r = rest.strip_prefix(['+', '-']).unwrap_or("x");
            matches!(r.len(), 2 | 4 | 5)
                && r.chars().all(|c| c.is_ascii_digit() || c == ':')
        }
    };
    if !rest.is_empty() && !has_tz {
        return None;
    }
    Some((true, has_tz))
}

const DELIMITERS: [char; 3] = [',', ';', '|'];

/// A value "is a list" when splitting on `, ; |` yields at least two
/// non-empty tokens, each at most 32 chars with no internal whitespace.
fn is_delimiter_list(value: &str) -> bool {
    if !value.contains(DELIMITERS) {
        return false;
    }
    let tokens: Vec<&str> = value.split(DELIMITERS).map(str::trim).collect();
    tokens.len() >= 2
        && tokens
            .iter()
            .all(|t| !t.is_empty() && t.len() <= 32 && !t.contains(char::is_whitespace))
}

/// Deterministic row sample: full scan at or below `sample_size`, otherwise
/// first-N or a seeded reservoir keeping source order.
fn sample_rows(
    adapter: &dyn DatasetAdapter,
    table: &str,
    config: &BuildConfig,
) -> Result<Vec<Row>, DatasetError> {
    let total = adapter.row_count(table)?;
    let n = config.sample_size;
    if total as usize <= n {
        return adapter.read_rows(table, None);
    }
    match config.sample_mode {
        SampleMode::FirstN => adapter.read_rows(table, Some(n)),
        SampleMode::Seeded => {
            let rows = adapter.read_rows(table, None)?;
            let mut seed_material = config.sample_seed.to_le_bytes().to_vec();
            seed_material.extend_from_slice(canonical(table).as_bytes());
            let mut seed = [0u8; 32];
            for (i, b) in seed_material.iter().enumerate() {
                seed[i % 32] ^= b;
            }
            let mut rng = ChaCha8Rng::from_seed(seed);
            let mut chosen: Vec<usize> = (0..n).collect();
            for i in n..rows.len() {
                let j = rng.gen_range(0..=i);
                if j < n {
                    chosen[j] = i;
                }
            }
            chosen.sort_unstable();
            Ok(chosen.into_iter().map(|i| rows[i].clone()).collect())
        }
    }
}

/// Profile every column of `table` over one shared row sample, so per-column
/// samples stay row-aligned for cross-column rules.
pub fn profile_table(
    adapter: &dyn DatasetAdapter,
    table: &str,
    config: &BuildConfig,
) -> Result<BTreeMap<String, ColumnProfile>, DatasetError> {
    let columns = adapter.table_columns(table)?;
    let rows = sample_rows(adapter, table, config)?;
    let mut out = BTreeMap::new();

    for (idx, meta) in columns.iter().enumerate() {
        let values: Vec<Option<String>> = rows
            .iter()
            .map(|r| r.get(idx).cloned().flatten())
            .collect();
        let non_null: Vec<&str> = values.iter().flatten().map(String::as_str).collect();
        let rows_sampled = values.len();
        let nulls = rows_sampled - non_null.len();

        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for v in &non_null {
            *counts.entry(v).or_insert(0) += 1;
        }
        let distinct_count = counts.len();
        let modal = counts.values().copied().max().unwrap_or(0);

        let mut class_counts: BTreeMap<&'static str, usize> = BTreeMap::new();
        let mut datetime_values = 0usize;
        let mut tz_values = 0usize;
        let mut time_values = 0usize;
        let mut decimal_seen = false;
        for v in &non_null {
            let (class, has_time, has_tz) = classify_value(v);
            let key = class.type_name();
            *class_counts.entry(key).or_insert(0) += 1;
            if class == ValueClass::DateTime {
                datetime_values += 1;
                if has_time {
                    time_values += 1;
                }
                if has_tz {
                    tz_values += 1;
                }
            }
            if class == ValueClass::Decimal {
                decimal_seen = true;
            }
        }
        let inferred = infer_class(&class_counts, non_null.len(), decimal_seen);

        let list_matches = non_null.iter().filter(|v| is_delimiter_list(v)).count();

        let declared_tz = meta
            .declared_type
            .as_deref()
            .is_some_and(|t| t.to_uppercase().contains("WITH TIME ZONE"));

        out.insert(
            canonical(&meta.name),
            ColumnProfile {
                row_count_sampled: rows_sampled,
                distinct_count,
                null_fraction: fraction(nulls, rows_sampled),
                inferred_value_class: inferred,
                delimiter_list_fraction: fraction(list_matches, non_null.len()),
                constant_fraction: fraction(modal, non_null.len()),
                timezone_annotated: declared_tz
                    || (datetime_values > 0 && tz_values == datetime_values),
                has_time_component: time_values > 0,
                sample: values,
            },
        );
    }
    Ok(out)
}

fn fraction(part: usize, whole: usize) -> f64 {
    if whole == 0 {
        0.0
    } else {
        part as f64 / whole as f64
    }
}

/// Dominant class at >= 0.95 of non-null values wins; integer/decimal mixes
/// promote to the numeric class; anything else is Mixed.
fn infer_class(
    class_counts: &BTreeMap<&'static str, usize>,
    non_null: usize,
    decimal_seen: bool,
) -> ValueClass {
    if non_null == 0 {
        return ValueClass::Mixed;
    }
    let share = |name: &str| fraction(class_counts.get(name).copied().unwrap_or(0), non_null);
    for (name, class) in [
        ("INTEGER", ValueClass::Integer),
        ("DECIMAL", ValueClass::Decimal),
        ("TEXT", ValueClass::Text),
        ("DATETIME", ValueClass::DateTime),
        ("BOOLEAN", ValueClass::Boolean),
    ] {
        if share(name) >= 0.95 {
            return class;
        }
    }
    if share("INTEGER") + share("DECIMAL") >= 0.95 {
        return if decimal_seen {
            ValueClass::Decimal
        } else {
            ValueClass::Integer
        };
    }
    ValueClass::Mixed
}

fn is_textual_type(declared: &str) -> bool {
    let upper = declared.to_uppercase();
    ["VARCHAR", "CHAR", "TEXT", "STRING", "CLOB"]
        .iter()
        .any(|t| upper.contains(t))
}

/// The conventional bounded range the sampled numeric values fall into, if
/// any: [0,5] (rating-like) or [0,100] (percent-like).
pub(crate) fn conventional_range(profile: &ColumnProfile) -> Option<(f64, f64)> {
    if !matches!(
        profile.inferred_value_class,
        ValueClass::Integer | ValueClass::Decimal
    ) {
        return None;
    }
    let values: Vec<f64> = profile
        .sample
        .iter()
        .flatten()
        .filter_map(|v| v.trim().parse::<f64>().ok())
        .collect();
    if values.len() < 2 || profile.distinct_count < 3 {
        return None;
    }
    // All-unique columns are keys, not bounded quantities; a domain column
    // repeats its values.
    if profile.distinct_count == profile.row_count_sampled {
        return None;
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if min < 0.0 || max < 3.0 {
        return None;
    }
    if max <= 5.0 {
        Some((0.0, 5.0))
    } else if max <= 100.0 {
        Some((0.0, 100.0))
    } else {
        None
    }
}

struct ColumnView<'a> {
    name: String,
    declared_type: String,
    profile: &'a ColumnProfile,
}

/// Run the six data-category rules (plus the multi-valued-attribute data
/// confirmation) over every profiled table, in table / column / rule order.
pub fn data_rules(ctx: &ApplicationContext) -> Vec<Finding> {
    let mut findings = Vec::new();
    let cfg = &ctx.build_config;

    for (table_key, schema) in &ctx.schemas {
        let columns: Vec<ColumnView> = schema
            .columns
            .iter()
            .filter_map(|col| {
                ctx.profiles
                    .get(&(table_key.clone(), canonical(&col.name)))
                    .map(|profile| ColumnView {
                        name: col.name.clone(),
                        declared_type: col.declared_type.clone(),
                        profile,
                    })
            })
            .collect();
        if columns.is_empty() {
            continue;
        }

        let make = |kind: AntiPatternKind, column: &str, evidence: String| {
            let mut f = Finding::new(
                kind,
                Location::Column(schema.name.clone(), column.to_string()),
                None,
                evidence,
                Phase::Data,
            );
            f.context_ref = Some(ctx.snapshot_id.clone());
            f
        };

        for col in &columns {
            let p = col.profile;
            // Multi-valued attribute confirmation over textual columns.
            if is_textual_type(&col.declared_type)
                && p.delimiter_list_fraction >= cfg.mva_fraction
                && p.row_count_sampled > 0
            {
                findings.push(make(
                    AntiPatternKind::MultiValuedAttribute,
                    &col.name,
                    format!(
                        "{:.0}% of sampled {} values are delimiter-separated lists",
                        p.delimiter_list_fraction * 100.0,
                        col.name
                    ),
                ));
            }
            // Enumerated types: low distinct cardinality over enough rows.
            if is_textual_type(&col.declared_type)
                && p.distinct_count >= 1
                && p.distinct_count <= cfg.enum_distinct_max
                && p.row_count_sampled >= 50
            {
                findings.push(make(
                    AntiPatternKind::EnumeratedTypes,
                    &col.name,
                    format!(
                        "{} holds only {} distinct values over {} sampled rows",
                        col.name, p.distinct_count, p.row_count_sampled
                    ),
                ));
            }
            if p.inferred_value_class == ValueClass::DateTime
                && p.has_time_component
                && !p.timezone_annotated
            {
                findings.push(make(
                    AntiPatternKind::MissingTimezone,
                    &col.name,
                    format!("date-time values in {} carry no timezone", col.name),
                ));
            }
            if is_textual_type(&col.declared_type)
                && matches!(
                    p.inferred_value_class,
                    ValueClass::Integer | ValueClass::Decimal
                )
            {
                findings.push(make(
                    AntiPatternKind::IncorrectDataType,
                    &col.name,
                    format!(
                        "{} is declared {} but stores {} values",
                        col.name,
                        col.declared_type,
                        p.inferred_value_class.type_name()
                    ),
                ));
            }
            // Redundant column: all NULL, or constant over a non-trivial sample.
            if p.null_fraction == 1.0
                || (p.constant_fraction == 1.0 && p.row_count_sampled >= 2)
            {
                findings.push(make(
                    AntiPatternKind::RedundantColumn,
                    &col.name,
                    if p.null_fraction == 1.0 {
                        format!("{} is NULL in every sampled row", col.name)
                    } else {
                        format!("{} holds a single constant value", col.name)
                    },
                ));
            }
        }

        findings.extend(denormalized_pairs(ctx, schema, &columns));
        findings.extend(information_duplication(ctx, schema, &columns));

        // Domain-constraint check over conventionally bounded numerics.
        for col in &columns {
            if schema.is_pk_column(&col.name) || schema.has_check_on(&col.name) {
                continue;
            }
            if let Some((lo, hi)) = conventional_range(col.profile) {
                findings.push(make(
                    AntiPatternKind::NoDomainConstraint,
                    &col.name,
                    format!(
                        "all sampled {} values fall in [{lo}, {hi}] but no CHECK constraint bounds them",
                        col.name
                    ),
                ));
            }
        }
    }
    findings
}

/// Exact pair correlation: grouping rows by either column yields the same
/// partition (the value maps are bijective).
fn pair_correlates(a: &ColumnProfile, b: &ColumnProfile) -> bool {
    let mut ab: BTreeMap<&str, &str> = BTreeMap::new();
    let mut ba: BTreeMap<&str, &str> = BTreeMap::new();
    let mut rows = 0usize;
    for (va, vb) in a.sample.iter().zip(&b.sample) {
        let (Some(va), Some(vb)) = (va.as_deref(), vb.as_deref()) else {
            return false;
        };
        rows += 1;
        if *ab.entry(va).or_insert(vb) != vb || *ba.entry(vb).or_insert(va) != va {
            return false;
        }
    }
    rows >= 2
}

fn denormalized_pairs(
    ctx: &ApplicationContext,
    schema: &crate::context::TableSchema,
    columns: &[ColumnView],
) -> Vec<Finding> {
    let mut findings = Vec::new();
    let dup_ratio = |p: &ColumnProfile| {
        if p.row_count_sampled == 0 {
            0.0
        } else {
            1.0 - p.distinct_count as f64 / p.row_count_sampled as f64
        }
    };
    let mut reported: BTreeSet<(usize, usize)> = BTreeSet::new();
    for i in 0..columns.len() {
        for j in (i + 1)..columns.len() {
            if reported.contains(&(i, j)) {
                continue;
            }
            let (a, b) = (&columns[i], &columns[j]);
            if schema.is_pk_column(&a.name) || schema.is_pk_column(&b.name) {
                continue;
            }
            if dup_ratio(a.profile) < 0.5 {
                continue;
            }
            if pair_correlates(a.profile, b.profile) {
                reported.insert((i, j));
                let mut f = Finding::new(
                    AntiPatternKind::DenormalizedTable,
                    Location::Column(schema.name.clone(), a.name.clone()),
                    None,
                    format!(
                        "{} duplicates heavily and varies in lockstep with {} (denormalized pair)",
                        a.name, b.name
                    ),
                    Phase::Data,
                );
                f.context_ref = Some(ctx.snapshot_id.clone());
                findings.push(f);
            }
        }
    }
    findings
}

fn year_of(value: &str) -> Option<i64> {
    datetime_parts(value.trim())?;
    value.trim()[0..4].parse().ok()
}

/// Derived-column detection via a small transform library: year extraction
/// (with a constant offset), string length, and two-column concatenation.
fn information_duplication(
    ctx: &ApplicationContext,
    schema: &crate::context::TableSchema,
    columns: &[ColumnView],
) -> Vec<Finding> {
    let mut findings = Vec::new();
    let mut emit = |target: &str, evidence: String| {
        let mut f = Finding::new(
            AntiPatternKind::InformationDuplication,
            Location::Column(schema.name.clone(), target.to_string()),
            None,
            evidence,
            Phase::Data,
        );
        f.context_ref = Some(ctx.snapshot_id.clone());
        findings.push(f);
    };

    'target: for target in columns {
        let tp = target.profile;
        if tp.distinct_count < 2 || tp.row_count_sampled < 2 {
            continue;
        }
        let numeric_target = matches!(
            tp.inferred_value_class,
            ValueClass::Integer | ValueClass::Decimal
        );

        if numeric_target {
            // target = year(source) + k, or k - year(source).
            for source in columns {
                if source.name == target.name
                    || source.profile.inferred_value_class != ValueClass::DateTime
                {
                    continue;
                }
                let mut diff: Option<i64> = None;
                let mut sum: Option<i64> = None;
                let mut diff_ok = true;
                let mut sum_ok = true;
                let mut rows = 0usize;
                for (tv, sv) in tp.sample.iter().zip(&source.profile.sample) {
                    let (Some(tv), Some(sv)) = (tv.as_deref(), sv.as_deref()) else {
                        diff_ok = false;
                        sum_ok = false;
                        break;
                    };
                    let (Ok(t), Some(y)) = (tv.trim().parse::<i64>(), year_of(sv)) else {
                        diff_ok = false;
                        sum_ok = false;
                        break;
                    };
                    rows += 1;
                    diff_ok &= *diff.get_or_insert(t - y) == t - y;
                    sum_ok &= *sum.get_or_insert(t + y) == t + y;
                    if !diff_ok && !sum_ok {
                        break;
                    }
                }
                if rows >= 2 && (diff_ok || sum_ok) {
                    emit(
                        &target.name,
                        format!(
                            "{} is derived from year({}) across the full sample",
                            target.name, source.name
                        ),
                    );
                    continue 'target;
                }
            }
            // target = length(source).
            for source in columns {
                if source.name == target.name
                    || !matches!(source.profile.inferred_value_class, ValueClass::Text)
                {
                    continue;
                }
                let all = tp.sample.iter().zip(&source.profile.sample).all(|(tv, sv)| {
                    matches!((tv.as_deref(), sv.as_deref()), (Some(t), Some(s))
                        if t.trim().parse::<usize>() == Ok(s.chars().count()))
                });
                if all && tp.row_count_sampled >= 2 {
                    emit(
                        &target.name,
                        format!("{} equals length({}) on every sampled row", target.name, source.name),
                    );
                    continue 'target;
                }
            }
        } else {
            // target = concat(a, b) with "" or " " separator.
            for a in columns {
                for b in columns {
                    if a.name == target.name || b.name == target.name || a.name == b.name {
                        continue;
                    }
                    for sep in ["", " "] {
                        let all = tp
                            .sample
                            .iter()
                            .zip(&a.profile.sample)
                            .zip(&b.profile.sample)
                            .all(|((tv, av), bv)| {
                                matches!(
                                    (tv.as_deref(), av.as_deref(), bv.as_deref()),
                                    (Some(t), Some(x), Some(y)) if t == format!("{x}{sep}{y}")
                                )
                            });
                        if all && tp.row_count_sampled >= 2 {
                            emit(
                                &target.name,
                                format!(
                                    "{} concatenates {} and {} on every sampled row",
                                    target.name, a.name, b.name
                                ),
                            );
                            continue 'target;
                        }
                    }
                }
            }
        }
    }
    findings
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delimiter_list_shapes() {
        assert!(is_delimiter_list("U1,U2"));
        assert!(is_delimiter_list("U3 ; U4"));
        assert!(is_delimiter_list("a|b|c"));
        assert!(!is_delimiter_list("plain value"));
        assert!(!is_delimiter_list("123 Main St, Springfield town"));
        assert!(!is_delimiter_list("trailing,"));
    }

    #[test]
    fn value_classification() {
        assert_eq!(classify_value("42").0, ValueClass::Integer);
        assert_eq!(classify_value("-3.5").0, ValueClass::Decimal);
        assert_eq!(classify_value("1e9").0, ValueClass::Decimal);
        assert_eq!(classify_value("true").0, ValueClass::Boolean);
        assert_eq!(classify_value("hello").0, ValueClass::Text);
        assert_eq!(classify_value("2024-03-01").0, ValueClass::DateTime);
        let (class, has_time, has_tz) = classify_value("2024-03-01 10:30:00");
        assert_eq!((class, has_time, has_tz), (ValueClass::DateTime, true, false));
        let (_, _, tz) = classify_value("2024-03-01T10:30:00Z");
        assert!(tz);
        let (_, _, tz) = classify_value("2024-03-01 10:30:00+05:30");
        assert!(tz);
        assert_eq!(classify_value("2024-13-01").0, ValueClass::Text);
    }

    #[test]
    fn year_extraction() {
        assert_eq!(year_of("1955-04-12"), Some(1955));
        assert_eq!(year_of("not a date"), None);
    }
}
