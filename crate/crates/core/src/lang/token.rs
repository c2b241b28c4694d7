use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TokenKind {
    Keyword,
    Identifier,
    Integer,
    Str,
    Operator,
    Punctuation,
    Newline,
    Indent,
    Dedent,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    pub kind: TokenKind,
    /// Source text. Empty for indent/dedent, `"\n"` for newline, quotes
    /// included for string literals.
    pub lexeme: String,
    /// 1-based source line.
    pub line: usize,
}

impl Token {
    fn new(kind: TokenKind, lexeme: impl Into<String>, line: usize) -> Token {
        Token {
            kind,
            lexeme: lexeme.into(),
            line,
        }
    }

    pub fn is(&self, kind: TokenKind, lexeme: &str) -> bool {
        self.kind == kind && self.lexeme == lexeme
    }

    /// Layout tokens carry no lexeme of their own.
    pub fn is_layout(&self) -> bool {
        matches!(self.kind, TokenKind::Newline | TokenKind::Indent | TokenKind::Dedent)
    }

    /// Name of the token in vocabularies: the lexeme, or a bracketed marker
    /// for indent/dedent.
    pub fn vocab_key(&self) -> &str {
        match self.kind {
            TokenKind::Indent => "<indent>",
            TokenKind::Dedent => "<dedent>",
            TokenKind::Newline => "<newline>",
            _ => &self.lexeme,
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            TokenKind::Newline => f.write_str("newline"),
            TokenKind::Indent => f.write_str("indent"),
            TokenKind::Dedent => f.write_str("dedent"),
            _ => write!(f, "`{}`", self.lexeme),
        }
    }
}

pub const KEYWORDS: &[&str] = &[
    "def", "return", "if", "elif", "else", "while", "for", "in", "range", "pass", "and", "or", "not", "True", "False",
    "None", "print", "input",
];

// Longest match first.
const OPERATORS: &[&str] = &[
    "==", "!=", "<=", ">=", "+=", "-=", "*=", "//", "<", ">", "+", "-", "*", "%", "=",
];

const PUNCTUATION: &[char] = &['(', ')', ',', ':', '.'];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {reason}")]
pub struct LexError {
    pub line: usize,
    pub reason: String,
}

fn lex_err(line: usize, reason: impl Into<String>) -> LexError {
    LexError {
        line,
        reason: reason.into(),
    }
}

/// Split MiniPy source into tokens.
///
/// Blank lines and `#` comments produce nothing. Every non-blank line ends
/// with a newline token (even without a trailing LF), indentation changes
/// become indent/dedent tokens, and open blocks are closed at end of input.
pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let mut out = Vec::new();
    let mut indents: Vec<usize> = alloc::vec![0];

    for (idx, raw) in source.split('\n').enumerate() {
        let line_no = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.contains('\t') {
            return Err(lex_err(line_no, "tab character (indent with spaces)"));
        }
        let width = line.len() - line.trim_start_matches(' ').len();
        let rest = &line[width..];
        if rest.is_empty() || rest.starts_with('#') {
            continue;
        }

        let current = *indents.last().expect("indent stack never empty");
        if width > current {
            indents.push(width);
            out.push(Token::new(TokenKind::Indent, "", line_no));
        } else if width < current {
            while *indents.last().expect("indent stack never empty") > width {
                indents.pop();
                out.push(Token::new(TokenKind::Dedent, "", line_no));
            }
            if *indents.last().expect("indent stack never empty") != width {
                return Err(lex_err(line_no, "dedent does not match any outer level"));
            }
        }

        lex_line(rest, line_no, &mut out)?;
        out.push(Token::new(TokenKind::Newline, "\n", line_no));
    }

    let last_line = out.last().map_or(1, |t| t.line);
    while indents.len() > 1 {
        indents.pop();
        out.push(Token::new(TokenKind::Dedent, "", last_line));
    }
    Ok(out)
}

fn lex_line(text: &str, line: usize, out: &mut Vec<Token>) -> Result<(), LexError> {
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c == ' ' {
            i += 1;
        } else if c == '#' {
            break;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let lexeme = &text[start..i];
            if lexeme.parse::<i64>().is_err() {
                return Err(lex_err(line, "integer literal out of 64-bit range"));
            }
            out.push(Token::new(TokenKind::Integer, lexeme, line));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = &text[start..i];
            let kind = if KEYWORDS.contains(&word) {
                TokenKind::Keyword
            } else {
                TokenKind::Identifier
            };
            out.push(Token::new(kind, word, line));
        } else if c == '"' {
            let start = i;
            i += 1;
            while i < bytes.len() && bytes[i] != b'"' {
                if bytes[i] == b'\\' {
                    return Err(lex_err(line, "escape sequences are not supported"));
                }
                i += 1;
            }
            if i >= bytes.len() {
                return Err(lex_err(line, "unterminated string literal"));
            }
            i += 1;
            out.push(Token::new(TokenKind::Str, &text[start..i], line));
        } else if PUNCTUATION.contains(&c) {
            out.push(Token::new(TokenKind::Punctuation, c.to_string(), line));
            i += 1;
        } else if let Some(op) = OPERATORS.iter().find(|op| text[i..].starts_with(**op)) {
            out.push(Token::new(TokenKind::Operator, *op, line));
            i += op.len();
        } else {
            let ch = text[i..].chars().next().unwrap_or('?');
            return Err(lex_err(line, alloc::format!("illegal character {ch:?}")));
        }
    }
    Ok(())
}
