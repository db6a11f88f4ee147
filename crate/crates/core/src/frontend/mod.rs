//! Tolerant SQL frontend: tokenizer, statement splitter, and clause-level
//! annotator. Everything here is total — malformed input degrades to opaque
//! tokens and `StatementKind::Other`, never an error.

pub mod annotate;
pub mod lexer;
pub mod splitter;

pub use annotate::{
    canonical, parse, render, AlterAction, AnnotatedStatement, AnnotationSummary, ClauseRole,
    ClauseSpan, ColumnDef, ColumnRef, ConstraintDecl, ConstraintKind, IndexParts, Predicate,
    RenderError, StatementKind,
};
pub use lexer::{tokenize, Token, TokenKind};
pub use splitter::{split_statements, RawStatement};

/// Split and parse a whole corpus in one pass.
pub fn parse_corpus(corpus: &str, source: &str) -> Vec<AnnotatedStatement> {
    split_statements(corpus, source).iter().map(parse).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_one(sql: &str) -> AnnotatedStatement {
        let stmts = split_statements(sql, "t");
        assert_eq!(stmts.len(), 1, "expected one statement in {sql:?}");
        parse(&stmts[0])
    }

    #[test]
    fn classify_kinds() {
        assert_eq!(parse_one("SELECT 1").kind, StatementKind::Select);
        assert_eq!(parse_one("insert into t values (1)").kind, StatementKind::Insert);
        assert_eq!(parse_one("UPDATE t SET a = 1").kind, StatementKind::Update);
        assert_eq!(parse_one("DELETE FROM t").kind, StatementKind::Delete);
        assert_eq!(parse_one("CREATE TABLE t (a int)").kind, StatementKind::CreateTable);
        assert_eq!(parse_one("ALTER TABLE t ADD COLUMN a int").kind, StatementKind::AlterTable);
        assert_eq!(parse_one("CREATE INDEX i ON t (a)").kind, StatementKind::CreateIndex);
        assert_eq!(parse_one("CREATE UNIQUE INDEX i ON t (a)").kind, StatementKind::CreateIndex);
        assert_eq!(parse_one("DROP TABLE t").kind, StatementKind::DropX);
        assert_eq!(parse_one("VACUUM").kind, StatementKind::Other);
        assert_eq!(parse_one("-- note\nSELECT 1").kind, StatementKind::Select);
    }

    #[test]
    fn insert_without_column_list() {
        let stmt = parse_one("INSERT INTO Tenant VALUES ('T1', 'Z1', True, 'U1,U2')");
        assert_eq!(stmt.kind, StatementKind::Insert);
        assert!(!stmt.clauses.contains_key(&ClauseRole::ColumnList));
        assert!(stmt.clauses.contains_key(&ClauseRole::Values));
        assert_eq!(stmt.target_table.as_deref(), Some("Tenant"));
        assert_eq!(stmt.values_arity, Some(4));
    }

    #[test]
    fn insert_with_column_list() {
        let stmt = parse_one("INSERT INTO t (a, b) VALUES (1, 2)");
        assert!(stmt.clauses.contains_key(&ClauseRole::ColumnList));
        assert_eq!(stmt.columns_referenced.len(), 2);
    }

    #[test]
    fn select_wildcard_single_table() {
        let stmt = parse_one("SELECT * FROM T");
        assert!(stmt.has_wildcard_projection);
        assert_eq!(stmt.join_count, 0);
        assert_eq!(stmt.tables_referenced, vec!["T"]);
    }

    #[test]
    fn join_count_explicit_joins() {
        let stmt = parse_one("SELECT a FROM T1 JOIN T2 ON T1.x = T2.x JOIN T3 ON T2.y = T3.y");
        assert_eq!(stmt.join_count, 2);
        assert_eq!(stmt.tables_referenced, vec!["T1", "T2", "T3"]);
        assert_eq!(stmt.join_equalities.len(), 2);
    }

    #[test]
    fn join_count_comma_tables() {
        let stmt = parse_one("SELECT a FROM T1, T2, T3 WHERE T1.x = T2.x");
        assert_eq!(stmt.join_count, 2);
        assert_eq!(stmt.join_equalities.len(), 1);
    }

    #[test]
    fn alias_resolution() {
        let stmt = parse_one(
            "SELECT q.Name FROM Questionnaire q JOIN Tenant T ON T.Tenant_ID = Q.Tenant_ID",
        );
        let eq = &stmt.join_equalities[0];
        assert_eq!(eq.0.table.as_deref(), Some("Tenant"));
        assert_eq!(eq.1.table.as_deref(), Some("Questionnaire"));
        assert!(stmt.references_column("Questionnaire", "tenant_id"));
    }

    #[test]
    fn where_predicates() {
        let stmt = parse_one("SELECT Tenant_ID FROM Tenant WHERE Zone_ID = 'Z1' AND Active = 'True'");
        let cols: Vec<&str> = stmt.predicates.iter().map(|p| p.column.column.as_str()).collect();
        assert_eq!(cols, vec!["Zone_ID", "Active"]);
    }

    #[test]
    fn create_table_constraints() {
        let stmt = parse_one(
            "CREATE TABLE Hosting (
                User_ID VARCHAR(10) REFERENCES Users(User_ID),
                Tenant_ID VARCHAR(10) REFERENCES Tenants(Tenant_ID),
                PRIMARY KEY (User_ID, Tenant_ID)
            )",
        );
        assert_eq!(stmt.columns_defined.len(), 2);
        assert_eq!(stmt.columns_defined[0].declared_type, "VARCHAR(10)");
        let fks: Vec<_> = stmt
            .constraints
            .iter()
            .filter(|c| c.kind == ConstraintKind::ForeignKey)
            .collect();
        assert_eq!(fks.len(), 2);
        assert_eq!(fks[0].target.as_ref().unwrap().0, "Users");
        assert!(stmt
            .constraints
            .iter()
            .any(|c| c.kind == ConstraintKind::PrimaryKey && c.columns.len() == 2));
    }

    #[test]
    fn create_table_inline_pk_and_not_null() {
        let stmt = parse_one(
            "CREATE TABLE Tenant(Tenant_ID INTEGER PRIMARY KEY, Zone_ID VARCHAR(30) NOT NULL, Active BOOLEAN)",
        );
        assert_eq!(stmt.columns_defined.len(), 3);
        assert!(!stmt.columns_defined[0].nullable);
        assert!(!stmt.columns_defined[1].nullable);
        assert!(stmt.columns_defined[2].nullable);
        assert!(stmt
            .constraints
            .iter()
            .any(|c| c.kind == ConstraintKind::PrimaryKey && c.columns == vec!["Tenant_ID"]));
    }

    #[test]
    fn alter_table_add_check_constraint() {
        let stmt = parse_one(
            "ALTER TABLE User ADD CONSTRAINT User_Role_Check CHECK (ROLE IN ('R1', 'R2', 'R3'))",
        );
        assert_eq!(stmt.kind, StatementKind::AlterTable);
        let check = stmt
            .constraints
            .iter()
            .find(|c| c.kind == ConstraintKind::Check)
            .expect("check constraint");
        assert_eq!(check.name.as_deref(), Some("User_Role_Check"));
        assert!(check.expression_text.as_deref().unwrap().contains("IN"));
    }

    #[test]
    fn alter_table_drop_column() {
        let stmt = parse_one("ALTER TABLE Tenants DROP COLUMN User_IDs");
        assert_eq!(
            stmt.alter_actions,
            vec![AlterAction::DropColumn("User_IDs".into())]
        );
    }

    #[test]
    fn create_index_without_on_clause() {
        // Dialect-tolerant: the target table may be omitted.
        let stmt = parse_one("CREATE INDEX idx_zone_actv (Zone_ID, Active)");
        let idx = stmt.index_decl.as_ref().unwrap();
        assert_eq!(idx.name, "idx_zone_actv");
        assert_eq!(idx.table, None);
        assert_eq!(idx.columns, vec!["Zone_ID", "Active"]);
    }

    #[test]
    fn create_index_with_on_clause() {
        let stmt = parse_one("CREATE INDEX i ON Tenant (Zone_ID)");
        let idx = stmt.index_decl.as_ref().unwrap();
        assert_eq!(idx.table.as_deref(), Some("Tenant"));
    }

    #[test]
    fn untokenizable_statement_is_other_with_diagnostic() {
        let raw = RawStatement {
            text: " ".into(),
            source_id: "t:1".into(),
        };
        let stmt = parse(&raw);
        assert_eq!(stmt.kind, StatementKind::Other);
        assert!(stmt.diagnostic);
    }

    #[test]
    fn render_round_trip_identity() {
        for sql in [
            "SELECT * FROM T",
            "SELECT a, b FROM t WHERE x = 1 GROUP BY a ORDER BY b DESC",
            "INSERT INTO Tenant VALUES ('T1', 'Z1', True, 'U1,U2');",
            "CREATE TABLE Hosting (User_ID VARCHAR(10) REFERENCES Users(User_ID), Tenant_ID VARCHAR(10) REFERENCES Tenants(Tenant_ID));",
        ] {
            let stmt = parse_one(sql);
            let rendered = render(&stmt).unwrap();
            assert_eq!(rendered, sql);
            let reparsed = parse(&RawStatement {
                text: rendered,
                source_id: stmt.source_id.clone(),
            });
            assert_eq!(stmt.annotation_summary(), reparsed.annotation_summary());
        }
    }

    #[test]
    fn like_pattern_is_not_join_equality() {
        let stmt = parse_one(
            "SELECT * FROM Tenants AS t JOIN Users AS u ON t.User_IDs LIKE '[[:<:]]'||u.User_ID||'[[:>:]]' WHERE t.Tenant_ID = 'T1'",
        );
        assert!(stmt.join_equalities.is_empty());
        assert_eq!(stmt.join_count, 1);
        assert!(stmt.references_column("Tenants", "User_IDs"));
    }
}
