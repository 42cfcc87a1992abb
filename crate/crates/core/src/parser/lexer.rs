use std::fmt;
use std::iter::Peekable;
use std::str::Chars;

use super::{SourcePosition, SyntaxError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Token {
    Ident(String),
    Str(String),
    Int(i64),
    Semi,
    Comma,
    LBrace,
    RBrace,
    Equals,
    Pipe,
    Eof,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Ident(s) => f.write_str(s),
            Token::Str(s) => write!(f, "\"{}\"", super::escape(s)),
            Token::Int(i) => write!(f, "{i}"),
            Token::Semi => f.write_str(";"),
            Token::Comma => f.write_str(","),
            Token::LBrace => f.write_str("{"),
            Token::RBrace => f.write_str("}"),
            Token::Equals => f.write_str("="),
            Token::Pipe => f.write_str("|"),
            Token::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Spanned {
    pub token: Token,
    pub position: SourcePosition,
}

pub(crate) struct Lexer<'a> {
    chars: Peekable<Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    pub fn new(text: &'a str) -> Self {
        Self {
            chars: text.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn position(&self) -> SourcePosition {
        SourcePosition {
            line: self.line,
            column: self.column,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c == '#' {
                while self.chars.peek().is_some_and(|&c| c != '\n') {
                    self.bump();
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    pub fn next_token(&mut self) -> Result<Spanned, SyntaxError> {
        self.skip_trivia();
        let position = self.position();
        let spanned = |token| Ok(Spanned { token, position });
        let Some(&c) = self.chars.peek() else {
            return spanned(Token::Eof);
        };
        let punct = match c {
            ';' => Some(Token::Semi),
            ',' => Some(Token::Comma),
            '{' => Some(Token::LBrace),
            '}' => Some(Token::RBrace),
            '=' => Some(Token::Equals),
            '|' => Some(Token::Pipe),
            _ => None,
        };
        if let Some(tok) = punct {
            self.bump();
            return spanned(tok);
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&c) = self.chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' || c == '-' {
                    s.push(c);
                    self.bump();
                } else {
                    break;
                }
            }
            return spanned(Token::Ident(s));
        }
        if c.is_ascii_digit() || c == '-' {
            return self.integer(position);
        }
        if c == '"' {
            return self.string(position);
        }
        Err(SyntaxError::new(position, "a token", c.to_string()))
    }

    fn integer(&mut self, position: SourcePosition) -> Result<Spanned, SyntaxError> {
        let mut s = String::new();
        if self.chars.peek() == Some(&'-') {
            s.push('-');
            self.bump();
        }
        while let Some(&c) = self.chars.peek() {
            if c.is_ascii_digit() {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        match s.parse::<i64>() {
            Ok(i) => Ok(Spanned {
                token: Token::Int(i),
                position,
            }),
            Err(_) => Err(SyntaxError::new(position, "a 64-bit integer", s)),
        }
    }

    fn string(&mut self, position: SourcePosition) -> Result<Spanned, SyntaxError> {
        self.bump();
        let mut s = String::new();
        loop {
            let here = self.position();
            match self.bump() {
                None => {
                    return Err(SyntaxError::new(here, "closing '\"'", "end of input"));
                }
                Some('"') => break,
                Some('\n') | Some('\r') => {
                    return Err(SyntaxError::new(here, "closing '\"'", "line break"));
                }
                Some('\\') => match self.bump() {
                    Some('"') => s.push('"'),
                    Some('\\') => s.push('\\'),
                    Some('n') => s.push('\n'),
                    other => {
                        let found = other.map_or("end of input".to_owned(), |c| format!("\\{c}"));
                        return Err(SyntaxError::new(here, "escape \\\", \\\\ or \\n", found));
                    }
                },
                Some(c) => s.push(c),
            }
        }
        Ok(Spanned {
            token: Token::Str(s),
            position,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tokens(text: &str) -> Vec<Token> {
        let mut lx = Lexer::new(text);
        let mut out = Vec::new();
        loop {
            let t = lx.next_token().unwrap();
            if t.token == Token::Eof {
                return out;
            }
            out.push(t.token);
        }
    }

    #[test]
    fn lexes_statement() {
        assert_eq!(
            tokens("assert x p \"a\\\"b\" ; # trailing\nassert x q -12;"),
            vec![
                Token::Ident("assert".into()),
                Token::Ident("x".into()),
                Token::Ident("p".into()),
                Token::Str("a\"b".into()),
                Token::Semi,
                Token::Ident("assert".into()),
                Token::Ident("x".into()),
                Token::Ident("q".into()),
                Token::Int(-12),
                Token::Semi,
            ]
        );
    }

    #[test]
    fn columns_count_scalar_values() {
        let mut lx = Lexer::new("\"é\" x");
        lx.next_token().unwrap();
        let t = lx.next_token().unwrap();
        assert_eq!(t.position, SourcePosition { line: 1, column: 5 });
    }

    #[test]
    fn crlf_is_whitespace() {
        let mut lx = Lexer::new("a\r\nb");
        lx.next_token().unwrap();
        let t = lx.next_token().unwrap();
        assert_eq!(t.position, SourcePosition { line: 2, column: 1 });
    }

    #[test]
    fn bad_escape_and_unterminated() {
        let err = Lexer::new("\"a\\t\"").next_token().unwrap_err();
        assert_eq!(err.position, SourcePosition { line: 1, column: 3 });
        let err = Lexer::new("\"abc").next_token().unwrap_err();
        assert_eq!(err.found, "end of input");
        assert_eq!(err.position, SourcePosition { line: 1, column: 5 });
    }

    #[test]
    fn integer_overflow_is_error() {
        assert!(Lexer::new("99999999999999999999").next_token().is_err());
        assert!(Lexer::new("-").next_token().is_err());
    }
}
