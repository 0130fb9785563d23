//! Tokenizer. Every input character lands in exactly one token or one
//! skipped whitespace/comment region; unknown characters become error
//! tokens instead of failing.

use crate::diag::{FileId, Span};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Atom(String),
    Var(String),
    Int(i64),
    /// `(`
    LParen,
    /// `)`
    RParen,
    /// `[`
    LBracket,
    /// `]`
    RBracket,
    /// `|`
    Bar,
    /// `,`
    Comma,
    /// declaration terminator `.`
    End,
    /// `:-`
    Neck,
    /// `=>`
    Arrow,
    /// `:`
    Colon,
    /// one of `= is < > =< >= =:= =\= + - * /`
    Op(String),
    /// a character no rule accepts
    Error(char),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
    line: u32,
    col: u32,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn peek2(&self) -> Option<u8> {
        self.src.get(self.pos + 1).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }
}

pub fn tokenize(text: &str, file: FileId) -> Vec<Token> {
    let mut cur = Cursor { src: text.as_bytes(), pos: 0, line: 1, col: 1 };
    let mut out = Vec::new();
    loop {
        // skip whitespace and % line comments
        loop {
            match cur.peek() {
                Some(c) if (c as char).is_whitespace() => {
                    cur.bump();
                }
                Some(b'%') => {
                    while let Some(c) = cur.peek() {
                        if c == b'\n' {
                            break;
                        }
                        cur.bump();
                    }
                }
                _ => break,
            }
        }
        let (sl, sc) = (cur.line, cur.col);
        let Some(c) = cur.peek() else { break };
        let kind = match c {
            b'a'..=b'z' => {
                let mut s = String::new();
                while let Some(c) = cur.peek() {
                    if (c as char).is_ascii_alphanumeric() || c == b'_' {
                        s.push(cur.bump().unwrap() as char);
                    } else {
                        break;
                    }
                }
                if s == "is" {
                    TokenKind::Op("is".to_string())
                } else {
                    TokenKind::Atom(s)
                }
            }
            b'A'..=b'Z' | b'_' => {
                let mut s = String::new();
                while let Some(c) = cur.peek() {
                    if (c as char).is_ascii_alphanumeric() || c == b'_' {
                        s.push(cur.bump().unwrap() as char);
                    } else {
                        break;
                    }
                }
                TokenKind::Var(s)
            }
            b'0'..=b'9' => {
                let mut n: i64 = 0;
                while let Some(c) = cur.peek() {
                    if c.is_ascii_digit() {
                        n = n.saturating_mul(10).saturating_add((c - b'0') as i64);
                        cur.bump();
                    } else {
                        break;
                    }
                }
                TokenKind::Int(n)
            }
            b'(' => {
                cur.bump();
                TokenKind::LParen
            }
            b')' => {
                cur.bump();
                TokenKind::RParen
            }
            b'[' => {
                cur.bump();
                TokenKind::LBracket
            }
            b']' => {
                cur.bump();
                TokenKind::RBracket
            }
            b'|' => {
                cur.bump();
                TokenKind::Bar
            }
            b',' => {
                cur.bump();
                TokenKind::Comma
            }
            b'.' => {
                cur.bump();
                TokenKind::End
            }
            b':' => {
                cur.bump();
                if cur.peek() == Some(b'-') {
                    cur.bump();
                    TokenKind::Neck
                } else {
                    TokenKind::Colon
                }
            }
            b'=' => {
                cur.bump();
                match cur.peek() {
                    Some(b'>') => {
                        cur.bump();
                        TokenKind::Arrow
                    }
                    Some(b'<') => {
                        cur.bump();
                        TokenKind::Op("=<".to_string())
                    }
                    Some(b':') if cur.peek2() == Some(b'=') => {
                        cur.bump();
                        cur.bump();
                        TokenKind::Op("=:=".to_string())
                    }
                    Some(b'\\') if cur.peek2() == Some(b'=') => {
                        cur.bump();
                        cur.bump();
                        TokenKind::Op("=\\=".to_string())
                    }
                    _ => TokenKind::Op("=".to_string()),
                }
            }
            b'>' => {
                cur.bump();
                if cur.peek() == Some(b'=') {
                    cur.bump();
                    TokenKind::Op(">=".to_string())
                } else {
                    TokenKind::Op(">".to_string())
                }
            }
            b'<' => {
                cur.bump();
                TokenKind::Op("<".to_string())
            }
            b'+' | b'-' | b'*' | b'/' => {
                cur.bump();
                TokenKind::Op((c as char).to_string())
            }
            other => {
                cur.bump();
                TokenKind::Error(other as char)
            }
        };
        let span = Span::new(file, sl, sc, cur.line, cur.col.saturating_sub(1).max(1));
        out.push(Token { kind, span });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<TokenKind> {
        tokenize(text, FileId(0)).into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn pow_head() {
        use TokenKind::*;
        assert_eq!(
            kinds("pow(X,0,1)."),
            vec![
                Atom("pow".into()),
                LParen,
                Var("X".into()),
                Comma,
                Int(0),
                Comma,
                Int(1),
                RParen,
                End
            ]
        );
    }

    #[test]
    fn empty_input() {
        assert_eq!(kinds(""), vec![]);
    }

    #[test]
    fn comments_skipped() {
        use TokenKind::*;
        assert_eq!(kinds("% comment\nfoo."), vec![Atom("foo".into()), End]);
    }

    #[test]
    fn unknown_char_is_error_token() {
        assert!(matches!(kinds("@")[0], TokenKind::Error('@')));
    }

    #[test]
    fn multi_char_operators() {
        use TokenKind::*;
        assert_eq!(
            kinds(":- => =< >= =:= =\\= is"),
            vec![
                Neck,
                Arrow,
                Op("=<".into()),
                Op(">=".into()),
                Op("=:=".into()),
                Op("=\\=".into()),
                Op("is".into())
            ]
        );
    }
}
