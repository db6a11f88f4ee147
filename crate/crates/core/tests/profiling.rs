//! Profiling behavior: seeded synthetic columns with known statistics,
//! deterministic sampling, and full-scan exactness at or below sample size.

use sqlsmell_core::config::{BuildConfig, SampleMode};
use sqlsmell_core::context::{open_dataset, ValueClass};
use sqlsmell_core::profiler::profile_table;

fn synthetic_db(rows: i64) -> (tempfile::TempDir, std::path::PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("synth.sqlite");
    let conn = rusqlite::Connection::open(&path).unwrap();
    conn.execute_batch("CREATE TABLE obs (obs_id INTEGER, label TEXT, blank TEXT);")
        .unwrap();
    // Modal share seeded exactly: 60% alpha, 30% beta, 10% gamma.
    for i in 0..rows {
        let label = match i % 10 {
            0..=5 => "alpha",
            6..=8 => "beta",
            _ => "gamma",
        };
        conn.execute(
            "INSERT INTO obs VALUES (?1, ?2, NULL)",
            rusqlite::params![i, label],
        )
        .unwrap();
    }
    (dir, path)
}

#[test]
fn thousand_row_column_matches_seeded_statistics() {
    let (_dir, path) = synthetic_db(1000);
    let adapter = open_dataset(&path).unwrap();
    let profiles = profile_table(adapter.as_ref(), "obs", &BuildConfig::default()).unwrap();

    let label = &profiles["label"];
    assert_eq!(label.row_count_sampled, 1000);
    assert_eq!(label.distinct_count, 3);
    assert!((label.constant_fraction - 0.6).abs() < 1e-12, "modal share is the seeded 60%");
    assert_eq!(label.inferred_value_class, ValueClass::Text);
    assert_eq!(label.null_fraction, 0.0);

    let blank = &profiles["blank"];
    assert_eq!(blank.null_fraction, 1.0);
    assert_eq!(blank.distinct_count, 0);
}

#[test]
fn oversized_tables_sample_deterministically() {
    let (_dir, path) = synthetic_db(1500);
    let adapter = open_dataset(&path).unwrap();

    let mut cfg = BuildConfig {
        sample_size: 200,
        sample_seed: 11,
        ..BuildConfig::default()
    };
    let a = profile_table(adapter.as_ref(), "obs", &cfg).unwrap();
    let b = profile_table(adapter.as_ref(), "obs", &cfg).unwrap();
    assert_eq!(a["label"].row_count_sampled, 200);
    assert_eq!(a["label"].sample, b["label"].sample, "seeded sampling repeats exactly");

    cfg.sample_seed = 12;
    let c = profile_table(adapter.as_ref(), "obs", &cfg).unwrap();
    assert_ne!(a["obs_id"].sample, c["obs_id"].sample, "different seed, different sample");

    cfg.sample_mode = SampleMode::FirstN;
    let first_n = profile_table(adapter.as_ref(), "obs", &cfg).unwrap();
    let expected: Vec<Option<String>> = (0..200).map(|i| Some(i.to_string())).collect();
    assert_eq!(first_n["obs_id"].sample, expected);
}

#[test]
fn datetime_and_timezone_inference() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("times.sqlite");
    {
        let conn = rusqlite::Connection::open(&path).unwrap();
        conn.execute_batch(
            "CREATE TABLE times (naive TEXT, zoned TEXT, dates TEXT);
             INSERT INTO times VALUES ('2024-01-02 10:00:00', '2024-01-02T10:00:00Z', '2024-01-02');
             INSERT INTO times VALUES ('2024-02-03 11:30:00', '2024-02-03T11:30:00+05:30', '2024-02-03');",
        )
        .unwrap();
    }
    let adapter = open_dataset(&path).unwrap();
    let profiles = profile_table(adapter.as_ref(), "times", &BuildConfig::default()).unwrap();

    assert_eq!(profiles["naive"].inferred_value_class, ValueClass::DateTime);
    assert!(profiles["naive"].has_time_component);
    assert!(!profiles["naive"].timezone_annotated);

    assert!(profiles["zoned"].timezone_annotated);

    assert_eq!(profiles["dates"].inferred_value_class, ValueClass::DateTime);
    assert!(!profiles["dates"].has_time_component);
}
