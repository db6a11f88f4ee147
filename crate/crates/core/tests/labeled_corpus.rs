//! A hand-labeled 20-statement corpus: detection output must equal the label
//! set exactly — nothing missing, nothing extra.

use sqlsmell_core::catalog::AntiPatternKind::{self, *};
use sqlsmell_core::config::BuildConfig;
use sqlsmell_core::context::build_context;
use sqlsmell_core::frontend::parse_corpus;
use sqlsmell_core::rules::{detect_all, Location};

const CORPUS: &str = "
CREATE TABLE accounts (id INTEGER PRIMARY KEY, alpha INTEGER, beta INTEGER, gamma INTEGER,
    delta INTEGER, epsilon INTEGER, zeta INTEGER, eta INTEGER, theta INTEGER, iota INTEGER);
CREATE TABLE measurements (m_id INTEGER PRIMARY KEY, reading FLOAT, ratio DOUBLE PRECISION);
CREATE TABLE docs (doc_id INTEGER PRIMARY KEY, file_path VARCHAR(255));
CREATE TABLE sales (sale_id INTEGER PRIMARY KEY, revenue2001 INTEGER, revenue2002 INTEGER);
CREATE TABLE archive_1 (a_id INTEGER PRIMARY KEY, payload TEXT);
CREATE TABLE archive_2 (a_id INTEGER PRIMARY KEY, payload TEXT);
CREATE TABLE staff (staff_id INTEGER PRIMARY KEY,
    manager_id INTEGER REFERENCES staff(staff_id), user_rating INTEGER);
CREATE TABLE orders (order_id INTEGER, customer_id INTEGER);
CREATE TABLE customers (customer_id INTEGER PRIMARY KEY, name VARCHAR(50));
SELECT o.order_id FROM orders o JOIN customers c ON o.customer_id = c.customer_id;
ALTER TABLE customers ADD CONSTRAINT cust_tier_check CHECK (tier IN ('gold', 'silver'));
SELECT * FROM customers;
SELECT name FROM customers WHERE friend_ids LIKE '%U1%';
SELECT name FROM customers ORDER BY RANDOM();
SELECT first || last FROM people;
SELECT DISTINCT c.name FROM customers c JOIN orders o ON c.customer_id = o.customer_id;
SELECT a FROM t1 JOIN t2 ON t1.x = t2.x JOIN t3 ON t2.x = t3.x JOIN t4 ON t3.x = t4.x
    JOIN t5 ON t4.x = t5.x JOIN t6 ON t5.x = t6.x;
INSERT INTO orders VALUES (1, 2);
SELECT order_id FROM orders WHERE customer_id = 7;
SELECT order_id FROM orders WHERE customer_id = 9;
";

fn table(name: &str) -> Location {
    Location::Table(name.into())
}

fn column(table: &str, column: &str) -> Location {
    Location::Column(table.into(), column.into())
}

fn statement(sid: &str) -> Location {
    Location::Statement(sid.into())
}

#[test]
fn labeled_corpus_detects_exactly_the_seeded_anti_patterns() {
    let labels: Vec<(AntiPatternKind, Location)> = vec![
        (GodTable, table("accounts")),
        (GenericPrimaryKey, column("accounts", "id")),
        (RoundingErrors, column("measurements", "reading")),
        (RoundingErrors, column("measurements", "ratio")),
        (ExternalDataStorage, column("docs", "file_path")),
        (DataInMetadata, column("sales", "revenue2001")),
        (CloneTable, table("archive_1")),
        (AdjacencyList, column("staff", "manager_id")),
        (NoDomainConstraint, column("staff", "user_rating")),
        (NoPrimaryKey, table("orders")),
        (NoForeignKey, column("orders", "customer_id")),
        (EnumeratedTypes, column("customers", "tier")),
        (ColumnWildcardUsage, statement("fx:12")),
        (PatternMatching, statement("fx:13")),
        (MultiValuedAttribute, column("customers", "friend_ids")),
        (OrderingByRand, statement("fx:14")),
        (ConcatenateNulls, statement("fx:15")),
        (DistinctAndJoin, statement("fx:16")),
        (TooManyJoins, statement("fx:17")),
        (ImplicitColumns, statement("fx:18")),
        (IndexUnderuse, column("orders", "customer_id")),
    ];

    let stmts = parse_corpus(CORPUS, "fx");
    assert_eq!(stmts.len(), 20);
    let ctx = build_context(stmts.clone(), None, BuildConfig::default());
    let findings = detect_all(&stmts, &ctx);

    let mut got: Vec<(&str, (u8, String, String))> = findings
        .iter()
        .map(|f| (f.kind.id(), f.location.key()))
        .collect();
    let mut want: Vec<(&str, (u8, String, String))> = labels
        .iter()
        .map(|(kind, location)| (kind.id(), location.key()))
        .collect();
    got.sort();
    want.sort();
    assert_eq!(got, want, "detection output diverged from the hand labels");

    assert!(findings.iter().all(|f| !f.suppressed_by_context));
}
