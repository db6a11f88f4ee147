//! Tolerant SQL tokenizer.
//!
//! The lexer never fails: every input string is segmented into a complete
//! token stream, and anything it does not recognize becomes an [`TokenKind::Opaque`]
//! token. Concatenating the `text` of all tokens always reproduces the input
//! byte-for-byte, which is what makes lossless rendering possible.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Whitespace,
    LineComment,
    BlockComment,
    Keyword,
    Ident,
    Number,
    StringLit,
    Operator,
    Punct,
    /// Unrecognized byte sequence, kept verbatim.
    Opaque,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
}

impl Token {
    pub fn new(kind: TokenKind, text: impl Into<String>) -> Self {
        Token {
            kind,
            text: text.into(),
        }
    }

    /// Trivia tokens carry no syntactic meaning.
    pub fn is_trivia(&self) -> bool {
        matches!(
            self.kind,
            TokenKind::Whitespace | TokenKind::LineComment | TokenKind::BlockComment
        )
    }

    /// Case-insensitive keyword test.
    pub fn is_keyword(&self, kw: &str) -> bool {
        self.kind == TokenKind::Keyword && self.text.eq_ignore_ascii_case(kw)
    }

    pub fn is_punct(&self, p: &str) -> bool {
        self.kind == TokenKind::Punct && self.text == p
    }

    pub fn is_operator(&self, op: &str) -> bool {
        self.kind == TokenKind::Operator && self.text == op
    }

    /// Identifier text with surrounding quotes stripped.
    pub fn ident_text(&self) -> &str {
        let t = self.text.as_str();
        if t.len() >= 2 {
            let bytes = t.as_bytes();
            let (first, last) = (bytes[0], bytes[t.len() - 1]);
            if (first == b'"' && last == b'"') || (first == b'`' && last == b'`') {
                return &t[1..t.len() - 1];
            }
        }
        t
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// Words that receive `TokenKind::Keyword`. Everything else is an identifier.
/// The set intentionally covers only what clause extraction needs; vendor
/// keywords outside it simply parse as identifiers.
const KEYWORDS: &[&str] = &[
    "SELECT", "INSERT", "UPDATE", "DELETE", "CREATE", "ALTER", "DROP", "TABLE", "INDEX", "VIEW",
    "INTO", "VALUES", "FROM", "WHERE", "GROUP", "ORDER", "BY", "HAVING", "LIMIT", "OFFSET",
    "JOIN", "INNER", "LEFT", "RIGHT", "FULL", "OUTER", "CROSS", "NATURAL", "ON", "AS", "AND",
    "OR", "NOT", "NULL", "IS", "IN", "LIKE", "ILIKE", "REGEXP", "RLIKE", "SIMILAR", "BETWEEN",
    "EXISTS", "DISTINCT", "ALL", "UNION", "EXCEPT", "INTERSECT", "SET", "PRIMARY", "FOREIGN",
    "KEY", "REFERENCES", "CONSTRAINT", "UNIQUE", "CHECK", "DEFAULT", "CASCADE", "RESTRICT",
    "ADD", "COLUMN", "RENAME", "TO", "IF", "USING", "ASC", "DESC", "CASE", "WHEN", "THEN",
    "ELSE", "END", "CAST", "TRUE", "FALSE", "WITH",
];

fn is_keyword(word: &str) -> bool {
    KEYWORDS.iter().any(|k| word.eq_ignore_ascii_case(k))
}

fn is_word_start(c: char) -> bool {
    c == '_' || c.is_alphabetic()
}

fn is_word_continue(c: char) -> bool {
    c == '_' || c == '$' || c.is_alphanumeric()
}

/// Multi-character operators, longest first.
const MULTI_OPS: &[&str] = &[
    "->>", "||", "==", "!=", "<>", "<=", ">=", "::", ":=", "->", "<<", ">>",
];

const SINGLE_OPS: &[char] = &[
    '+', '-', '*', '/', '%', '<', '>', '=', '!', '|', '&', '^', '~', ':', '?', '@', '#', '[',
    ']', '{', '}',
];

/// Tokenize arbitrary input. Total: never fails, always consumes the whole
/// string, and each step advances by at least one character.
pub fn tokenize(input: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = input.chars().collect();
    let mut i = 0;

    while i < chars.len() {
        let c = chars[i];

        if c.is_whitespace() {
            let start = i;
            while i < chars.len() && chars[i].is_whitespace() {
                i += 1;
            }
            tokens.push(Token::new(TokenKind::Whitespace, collect(&chars, start, i)));
        } else if c == '-' && peek(&chars, i + 1) == Some('-') {
            let start = i;
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            tokens.push(Token::new(TokenKind::LineComment, collect(&chars, start, i)));
        } else if c == '/' && peek(&chars, i + 1) == Some('*') {
            let start = i;
            i += 2;
            while i < chars.len() {
                if chars[i] == '*' && peek(&chars, i + 1) == Some('/') {
                    i += 2;
                    break;
                }
                i += 1;
            }
            tokens.push(Token::new(
                TokenKind::BlockComment,
                collect(&chars, start, i),
            ));
        } else if c == '\'' {
            i = lex_quoted(&chars, i, '\'', &mut tokens, TokenKind::StringLit);
        } else if c == '"' {
            i = lex_quoted(&chars, i, '"', &mut tokens, TokenKind::Ident);
        } else if c == '`' {
            // Backtick-quoted identifier; no doubling escape.
            let start = i;
            i += 1;
            while i < chars.len() && chars[i] != '`' {
                i += 1;
            }
            if i < chars.len() {
                i += 1;
            }
            tokens.push(Token::new(TokenKind::Ident, collect(&chars, start, i)));
        } else if c == '$' {
            if let Some(end) = lex_dollar_quote(&chars, i) {
                tokens.push(Token::new(TokenKind::StringLit, collect(&chars, i, end)));
                i = end;
            } else {
                tokens.push(Token::new(TokenKind::Opaque, "$"));
                i += 1;
            }
        } else if c.is_ascii_digit() || (c == '.' && peek(&chars, i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            i = lex_number(&chars, i);
            tokens.push(Token::new(TokenKind::Number, collect(&chars, start, i)));
        } else if is_word_start(c) {
            let start = i;
            while i < chars.len() && is_word_continue(chars[i]) {
                i += 1;
            }
            let word = collect(&chars, start, i);
            let kind = if is_keyword(&word) {
                TokenKind::Keyword
            } else {
                TokenKind::Ident
            };
            tokens.push(Token::new(kind, word));
        } else if matches!(c, '(' | ')' | ',' | ';' | '.') {
            tokens.push(Token::new(TokenKind::Punct, c.to_string()));
            i += 1;
        } else if SINGLE_OPS.contains(&c) {
            let mut matched = None;
            for op in MULTI_OPS {
                let len = op.chars().count();
                if chars[i..].len() >= len && chars[i..i + len].iter().collect::<String>() == *op {
                    matched = Some(*op);
                    break;
                }
            }
            match matched {
                Some(op) => {
                    tokens.push(Token::new(TokenKind::Operator, op));
                    i += op.chars().count();
                }
                None => {
                    tokens.push(Token::new(TokenKind::Operator, c.to_string()));
                    i += 1;
                }
            }
        } else {
            tokens.push(Token::new(TokenKind::Opaque, c.to_string()));
            i += 1;
        }
    }

    tokens
}

fn peek(chars: &[char], i: usize) -> Option<char> {
    chars.get(i).copied()
}

fn collect(chars: &[char], start: usize, end: usize) -> String {
    chars[start..end].iter().collect()
}

/// Number literal: decimal with optional fraction/exponent, or 0x hex.
fn lex_number(chars: &[char], start: usize) -> usize {
    let mut i = start;
    if chars[i] == '0' && matches!(peek(chars, i + 1), Some('x') | Some('X')) {
        i += 2;
        while i < chars.len() && chars[i].is_ascii_hexdigit() {
            i += 1;
        }
        return i.max(start + 1);
    }
    while i < chars.len() && chars[i].is_ascii_digit() {
        i += 1;
    }
    if peek(chars, i) == Some('.') {
        i += 1;
        while i < chars.len() && chars[i].is_ascii_digit() {
            i += 1;
        }
    }
    if matches!(peek(chars, i), Some('e') | Some('E')) {
        let mut j = i + 1;
        if matches!(peek(chars, j), Some('+') | Some('-')) {
            j += 1;
        }
        if peek(chars, j).is_some_and(|c| c.is_ascii_digit()) {
            i = j;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
        }
    }
    i.max(start + 1)
}

/// Quote-delimited run with doubled-quote escaping; unterminated runs extend
/// to end of input.
fn lex_quoted(
    chars: &[char],
    start: usize,
    quote: char,
    tokens: &mut Vec<Token>,
    kind: TokenKind,
) -> usize {
    let mut i = start + 1;
    while i < chars.len() {
        if chars[i] == quote {
            if peek(chars, i + 1) == Some(quote) {
                i += 2;
                continue;
            }
            i += 1;
            break;
        }
        i += 1;
    }
    tokens.push(Token::new(kind, collect(chars, start, i)));
    i
}

/// `$tag$ ... $tag$` bodies are opaque string literals. Returns the end index
/// when a valid opening delimiter is present, extending to end of input if the
/// closer is missing.
fn lex_dollar_quote(chars: &[char], start: usize) -> Option<usize> {
    let mut j = start + 1;
    while j < chars.len() && (chars[j] == '_' || chars[j].is_alphanumeric()) {
        j += 1;
    }
    if peek(chars, j) != Some('$') {
        return None;
    }
    let delim: Vec<char> = chars[start..=j].to_vec();
    let mut i = j + 1;
    while i < chars.len() {
        if chars[i] == '$' && chars[i..].len() >= delim.len() && chars[i..i + delim.len()] == delim[..] {
            return Some(i + delim.len());
        }
        i += 1;
    }
    Some(chars.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roundtrip(input: &str) {
        let tokens = tokenize(input);
        let rebuilt: String = tokens.iter().map(|t| t.text.as_str()).collect();
        assert_eq!(rebuilt, input);
    }

    #[test]
    fn lossless_reassembly() {
        roundtrip("SELECT * FROM t WHERE a = 'x;y' -- trailing\n");
        roundtrip("/* unterminated");
        roundtrip("'unterminated string");
        roundtrip("$x$ body; with ; semis $x$ SELECT");
        roundtrip("\u{0}\u{7f}\u{e9}weird");
    }

    #[test]
    fn string_escape_doubling() {
        let tokens = tokenize("'it''s'");
        assert_eq!(tokens.len(), 1);
        assert_eq!(tokens[0].kind, TokenKind::StringLit);
    }

    #[test]
    fn keywords_case_insensitive() {
        let tokens = tokenize("select Name");
        assert!(tokens[0].is_keyword("SELECT"));
        assert_eq!(tokens[2].kind, TokenKind::Ident);
    }

    #[test]
    fn multi_char_operators() {
        let tokens: Vec<Token> = tokenize("a||b == c != d")
            .into_iter()
            .filter(|t| !t.is_trivia())
            .collect();
        assert!(tokens[1].is_operator("||"));
        assert!(tokens[3].is_operator("=="));
        assert!(tokens[5].is_operator("!="));
    }

    #[test]
    fn quoted_ident_text() {
        let t = Token::new(TokenKind::Ident, "\"My Table\"");
        assert_eq!(t.ident_text(), "My Table");
    }
}
