//! Context-builder operation tests: impacted-query lookup and dataset
//! augmentation behavior.

use sqlsmell_core::catalog::AntiPatternKind;
use sqlsmell_core::config::BuildConfig;
use sqlsmell_core::context::{build_context, impacted_queries, open_dataset};
use sqlsmell_core::frontend::parse_corpus;
use sqlsmell_core::rules::{Finding, Location, Phase};

fn finding_at(location: Location) -> Finding {
    Finding::new(
        AntiPatternKind::MultiValuedAttribute,
        location,
        None,
        "test",
        Phase::Data,
    )
}

#[test]
fn impacted_queries_returns_both_task_queries() {
    let corpus = "
CREATE TABLE Tenants (Tenant_ID VARCHAR(10) PRIMARY KEY, Zone_ID VARCHAR(10),
Active BOOLEAN, User_IDs VARCHAR(100));
SELECT * FROM Tenants WHERE User_IDs LIKE '[[:<:]]U1[[:>:]]';
SELECT * FROM Tenants AS t JOIN Users AS u
ON t.User_IDs LIKE '[[:<:]]'||u.User_ID||'[[:>:]]'
WHERE t.Tenant_ID = 'T1';
";
    let stmts = parse_corpus(corpus, "fx");
    let ctx = build_context(stmts, None, BuildConfig::default());
    let finding = finding_at(Location::Column("Tenants".into(), "User_IDs".into()));
    let impacted: Vec<&str> = impacted_queries(&ctx, &finding)
        .iter()
        .map(|s| s.source_id.as_str())
        .collect();
    // The defining DDL and both task queries reference the column.
    assert_eq!(impacted, vec!["fx:1", "fx:2", "fx:3"]);
}

#[test]
fn unknown_table_yields_empty_list() {
    let stmts = parse_corpus("SELECT a FROM t;", "fx");
    let ctx = build_context(stmts, None, BuildConfig::default());
    let finding = finding_at(Location::Table("ghost".into()));
    assert!(impacted_queries(&ctx, &finding).is_empty());
}

#[test]
fn exactly_the_referencing_statements_are_returned() {
    // Ten statements, three of which touch column x of table hits.
    let corpus = "
CREATE TABLE hits (hit_id INTEGER PRIMARY KEY, x INTEGER, y INTEGER);
CREATE TABLE misses (miss_id INTEGER PRIMARY KEY, z INTEGER);
SELECT x FROM hits;
SELECT y FROM hits;
SELECT z FROM misses;
INSERT INTO hits (hit_id, x, y) VALUES (1, 2, 3);
INSERT INTO misses (miss_id, z) VALUES (1, 2);
UPDATE hits SET y = 5 WHERE hit_id = 1;
DELETE FROM misses WHERE z = 9;
SELECT hit_id FROM hits WHERE x = 4;
";
    let stmts = parse_corpus(corpus, "fx");
    assert_eq!(stmts.len(), 10);
    let ctx = build_context(stmts, None, BuildConfig::default());
    let finding = finding_at(Location::Column("hits".into(), "x".into()));
    let impacted: Vec<&str> = impacted_queries(&ctx, &finding)
        .iter()
        .map(|s| s.source_id.as_str())
        .collect();
    // The DDL declares x; fx:3, fx:6, fx:10 reference it in queries.
    assert_eq!(impacted, vec!["fx:1", "fx:3", "fx:6", "fx:10"]);
    for stmt in impacted_queries(&ctx, &finding) {
        assert!(ctx.query_registry.iter().any(|s| s.source_id == stmt.source_id));
    }
}

#[test]
fn sqlite_dataset_profiles_delimiter_lists_and_augments_schema() {
    let dir = tempfile::tempdir().unwrap();
    let db = dir.path().join("tenants.sqlite");
    {
        let conn = rusqlite::Connection::open(&db).unwrap();
        conn.execute_batch(
            "CREATE TABLE Tenants (Tenant_ID TEXT, Zone_ID TEXT, Active TEXT, User_IDs TEXT);
             INSERT INTO Tenants VALUES ('T1', 'Z1', 'True', 'U1 , U2');
             INSERT INTO Tenants VALUES ('T2', 'Z3', 'True', 'U3 ; U4');",
        )
        .unwrap();
    }
    let adapter = open_dataset(&db).unwrap();

    // DDL-only knowledge of one column; the dataset augments, never removes.
    let ddl = "CREATE TABLE Tenants (Tenant_ID VARCHAR(10) PRIMARY KEY);";
    let stmts = parse_corpus(ddl, "fx");
    let ctx = build_context(stmts.clone(), Some(adapter.as_ref()), BuildConfig::default());
    let schema = ctx.schema("tenants").unwrap();
    assert!(schema.from_ddl);
    assert_eq!(schema.columns.len(), 4, "dataset adds the missing columns");
    assert_eq!(
        schema.column("Tenant_ID").unwrap().declared_type,
        "VARCHAR(10)",
        "DDL facts are never overridden"
    );
    assert!(schema.primary_key().is_some());

    let profile = ctx.profile("Tenants", "User_IDs").unwrap();
    assert!(profile.delimiter_list_fraction >= 0.5);
    assert_eq!(profile.row_count_sampled, 2);

    // The same build without the dataset keeps every DDL fact (monotonicity).
    let ddl_only = build_context(stmts, None, BuildConfig::default());
    let base = ddl_only.schema("tenants").unwrap();
    for col in &base.columns {
        assert!(schema.column(&col.name).is_some());
    }
    assert_eq!(base.constraints.len(), schema.constraints.len());
}

#[test]
fn dataset_failure_degrades_to_ddl_only_with_warning() {
    struct Broken;
    impl sqlsmell_core::context::DatasetAdapter for Broken {
        fn table_names(&self) -> Result<Vec<String>, sqlsmell_core::context::DatasetError> {
            Err(sqlsmell_core::context::DatasetError::Backend("boom".into()))
        }
        fn table_columns(
            &self,
            _: &str,
        ) -> Result<Vec<sqlsmell_core::context::ColumnMeta>, sqlsmell_core::context::DatasetError>
        {
            unreachable!()
        }
        fn row_count(&self, _: &str) -> Result<u64, sqlsmell_core::context::DatasetError> {
            unreachable!()
        }
        fn read_rows(
            &self,
            _: &str,
            _: Option<usize>,
        ) -> Result<Vec<sqlsmell_core::context::Row>, sqlsmell_core::context::DatasetError>
        {
            unreachable!()
        }
    }
    let stmts = parse_corpus("CREATE TABLE t (a INTEGER PRIMARY KEY);", "fx");
    let ctx = build_context(stmts, Some(&Broken), BuildConfig::default());
    assert!(ctx.schema("t").is_some(), "context still returned");
    assert!(!ctx.has_profiles());
    assert_eq!(ctx.warnings.len(), 1);
    assert!(ctx.warnings[0].contains("boom"));
}
