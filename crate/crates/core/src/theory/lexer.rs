//! Tokenizer shared by theory and scenario files.
//!
//! Identifiers may contain inner hyphens (`sense-position`, `drop-break`);
//! a hyphen continues an identifier only when a letter follows it, so
//! `x-1` is a subtraction but `x-y` is a single name.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::diag::Diagnostic;
use crate::model::Span;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Punct {
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Semi,
    Dot,
    DotDot,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    Bar,
    FatArrow,
    Assign,
}

impl Punct {
    pub fn text(self) -> &'static str {
        match self {
            Punct::LParen => "(",
            Punct::RParen => ")",
            Punct::LBrace => "{",
            Punct::RBrace => "}",
            Punct::LBracket => "[",
            Punct::RBracket => "]",
            Punct::Comma => ",",
            Punct::Colon => ":",
            Punct::Semi => ";",
            Punct::Dot => ".",
            Punct::DotDot => "..",
            Punct::Eq => "=",
            Punct::Ne => "!=",
            Punct::Lt => "<",
            Punct::Le => "<=",
            Punct::Gt => ">",
            Punct::Ge => ">=",
            Punct::Plus => "+",
            Punct::Minus => "-",
            Punct::Star => "*",
            Punct::Slash => "/",
            Punct::Bar => "|",
            Punct::FatArrow => "=>",
            Punct::Assign => ":=",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokKind {
    Ident(String),
    /// Unsigned integer or decimal literal, as written.
    Number(String),
    Punct(Punct),
    Eof,
}

impl fmt::Display for TokKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokKind::Ident(s) => write!(f, "`{s}`"),
            TokKind::Number(s) => write!(f, "number `{s}`"),
            TokKind::Punct(p) => write!(f, "`{}`", p.text()),
            TokKind::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokKind,
    pub span: Span,
}

pub const KEYWORDS: &[&str] = &[
    "domain",
    "fluent",
    "action",
    "nominal",
    "actual",
    "poss",
    "observe",
    "likelihood",
    "successor",
    "case",
    "when",
    "effects",
    "causes",
    "not",
    "init",
    "world",
    "weight",
    "program",
    "pi",
    "if",
    "then",
    "else",
    "and",
    "or",
    "implies",
    "iff",
    "true",
    "false",
    "now",
    "prev",
    "in",
    "forall",
    "exists",
    "query",
    "bel",
    "know",
    "exec",
    "assert",
    "within",
];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    let is_ident_start = |c: char| c.is_ascii_alphabetic() || c == '_';
    let is_ident_char = |c: char| c.is_ascii_alphanumeric() || c == '_';

    while i < chars.len() {
        let c = chars[i];
        let span = Span::new(line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let kind = if is_ident_start(c) {
            i += 1;
            loop {
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                if i + 1 < chars.len() && chars[i] == '-' && chars[i + 1].is_ascii_alphabetic() {
                    i += 1;
                } else {
                    break;
                }
            }
            TokKind::Ident(chars[start..i].iter().collect())
        } else if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            TokKind::Number(chars[start..i].iter().collect())
        } else {
            let next = chars.get(i + 1).copied();
            let (p, len) = match (c, next) {
                ('.', Some('.')) => (Punct::DotDot, 2),
                ('!', Some('=')) => (Punct::Ne, 2),
                ('<', Some('=')) => (Punct::Le, 2),
                ('>', Some('=')) => (Punct::Ge, 2),
                ('=', Some('>')) => (Punct::FatArrow, 2),
                (':', Some('=')) => (Punct::Assign, 2),
                ('(', _) => (Punct::LParen, 1),
                (')', _) => (Punct::RParen, 1),
                ('{', _) => (Punct::LBrace, 1),
                ('}', _) => (Punct::RBrace, 1),
                ('[', _) => (Punct::LBracket, 1),
                (']', _) => (Punct::RBracket, 1),
                (',', _) => (Punct::Comma, 1),
                (':', _) => (Punct::Colon, 1),
                (';', _) => (Punct::Semi, 1),
                ('.', _) => (Punct::Dot, 1),
                ('=', _) => (Punct::Eq, 1),
                ('<', _) => (Punct::Lt, 1),
                ('>', _) => (Punct::Gt, 1),
                ('+', _) => (Punct::Plus, 1),
                ('-', _) => (Punct::Minus, 1),
                ('*', _) => (Punct::Star, 1),
                ('/', _) => (Punct::Slash, 1),
                ('|', _) => (Punct::Bar, 1),
                _ => {
                    return Err(Diagnostic::error(
                        span,
                        alloc::format!("unexpected character `{c}`"),
                    ))
                }
            };
            i += len;
            TokKind::Punct(p)
        };
        col += (i - start) as u32;
        out.push(Token { kind, span });
    }
    out.push(Token {
        kind: TokKind::Eof,
        span: Span::new(line, col),
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn kinds(src: &str) -> Vec<TokKind> {
        tokenize(src).unwrap().into_iter().map(|t| t.kind).collect()
    }

    fn ident(s: &str) -> TokKind {
        TokKind::Ident(s.to_string())
    }

    #[test]
    fn hyphenated_names_and_subtraction() {
        assert_eq!(
            kinds("sense-position x-1 x-y"),
            vec![
                ident("sense-position"),
                ident("x"),
                TokKind::Punct(Punct::Minus),
                TokKind::Number("1".to_string()),
                ident("x-y"),
                TokKind::Eof
            ]
        );
    }

    #[test]
    fn ranges_decimals_and_operators() {
        assert_eq!(
            kinds("-50..50 0.25 1e-3 := => != <="),
            vec![
                TokKind::Punct(Punct::Minus),
                TokKind::Number("50".to_string()),
                TokKind::Punct(Punct::DotDot),
                TokKind::Number("50".to_string()),
                TokKind::Number("0.25".to_string()),
                TokKind::Number("1e-3".to_string()),
                TokKind::Punct(Punct::Assign),
                TokKind::Punct(Punct::FatArrow),
                TokKind::Punct(Punct::Ne),
                TokKind::Punct(Punct::Le),
                TokKind::Eof
            ]
        );
    }

    #[test]
    fn comments_and_positions() {
        let toks = tokenize("# header\n  fluent p : bool # trailing\nx").unwrap();
        assert_eq!(toks[0].kind, ident("fluent"));
        assert_eq!((toks[0].span.line, toks[0].span.col), (2, 3));
        assert_eq!(toks[4].kind, ident("x"));
        assert_eq!((toks[4].span.line, toks[4].span.col), (3, 1));
    }

    #[test]
    fn stray_characters_are_reported() {
        let err = tokenize("a ? b").unwrap_err();
        assert_eq!((err.span.line, err.span.col), (1, 3));
        assert!(err.message.contains('?'));
    }
}
