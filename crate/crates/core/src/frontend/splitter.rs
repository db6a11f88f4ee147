//! Statement splitting.
//!
//! Splits a corpus on semicolons that sit outside string literals, comments,
//! and dollar-quoted bodies (the lexer already folded those into single
//! tokens). Comments and whitespace attach to the statement that follows
//! them; a trailing chunk with no significant tokens yields nothing.

use super::lexer::{tokenize, Token};

/// One raw statement as found in the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawStatement {
    pub text: String,
    pub source_id: String,
}

/// Split `corpus` into statements, labelling each as `<source>:<ordinal>`.
/// Total: malformed regions become ordinary statements.
pub fn split_statements(corpus: &str, source: &str) -> Vec<RawStatement> {
    let tokens = tokenize(corpus);
    let mut statements = Vec::new();
    let mut pending: Vec<Token> = Vec::new();

    let flush = |pending: &mut Vec<Token>, statements: &mut Vec<RawStatement>| {
        if pending.iter().any(|t| !t.is_trivia()) {
            let text: String = pending.iter().map(|t| t.text.as_str()).collect();
            let text = text.trim().to_string();
            if !text.is_empty() {
                let ordinal = statements.len() + 1;
                statements.push(RawStatement {
                    text,
                    source_id: format!("{source}:{ordinal}"),
                });
            }
        }
        pending.clear();
    };

    for token in tokens {
        if token.is_punct(";") {
            pending.push(token);
            flush(&mut pending, &mut statements);
        } else {
            pending.push(token);
        }
    }
    flush(&mut pending, &mut statements);

    statements
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_on_terminator() {
        let stmts = split_statements("SELECT 1; SELECT 2;", "in");
        assert_eq!(stmts.len(), 2);
        assert_eq!(stmts[0].text, "SELECT 1;");
        assert_eq!(stmts[0].source_id, "in:1");
        assert_eq!(stmts[1].source_id, "in:2");
    }

    #[test]
    fn empty_corpus() {
        assert!(split_statements("", "in").is_empty());
        assert!(split_statements("   \n -- only a comment\n", "in").is_empty());
    }

    #[test]
    fn semicolon_inside_string_is_opaque() {
        let stmts = split_statements("SELECT 'a;b' FROM t; SELECT 2", "in");
        assert_eq!(stmts.len(), 2);
    }

    #[test]
    fn comment_attaches_to_following_statement() {
        let stmts = split_statements("SELECT 1;\n/* next */\nSELECT 2;", "in");
        assert_eq!(stmts.len(), 2);
        assert!(stmts[1].text.starts_with("/* next */"));
    }

    #[test]
    fn missing_trailing_terminator() {
        let stmts = split_statements("SELECT 1", "in");
        assert_eq!(stmts.len(), 1);
    }

    #[test]
    fn garbled_region_is_one_statement() {
        let stmts = split_statements("@@ ][ garbage here; SELECT 1;", "in");
        assert_eq!(stmts.len(), 2);
    }
}
