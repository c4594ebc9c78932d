//! Token stream over the s-expression surface syntax.
//!
//! Symbols are lowercased at lex time (PDDL is case-insensitive). Commas are
//! treated as whitespace so comma-separated hypothesis files load unchanged.

use super::{ParseError, Position};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    LParen,
    RParen,
    Symbol(String),
}

#[derive(Debug, Clone)]
pub struct Token {
    pub kind: TokenKind,
    pub pos: Position,
}

pub fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut line = 1u32;
    let mut col = 0u32;
    let mut chars = text.chars().peekable();
    let mut symbol = String::new();
    let mut symbol_pos = Position { line: 1, col: 1 };

    macro_rules! flush_symbol {
        () => {
            if !symbol.is_empty() {
                tokens.push(Token {
                    kind: TokenKind::Symbol(std::mem::take(&mut symbol)),
                    pos: symbol_pos,
                });
            }
        };
    }

    while let Some(c) = chars.next() {
        if c == '\n' {
            flush_symbol!();
            line += 1;
            col = 0;
            continue;
        }
        col += 1;
        match c {
            ';' => {
                flush_symbol!();
                while let Some(&n) = chars.peek() {
                    if n == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            '(' => {
                flush_symbol!();
                tokens.push(Token {
                    kind: TokenKind::LParen,
                    pos: Position { line, col },
                });
            }
            ')' => {
                flush_symbol!();
                tokens.push(Token {
                    kind: TokenKind::RParen,
                    pos: Position { line, col },
                });
            }
            c if c.is_whitespace() || c == ',' => flush_symbol!(),
            c => {
                if symbol.is_empty() {
                    symbol_pos = Position { line, col };
                }
                symbol.extend(c.to_lowercase());
            }
        }
    }
    flush_symbol!();
    tokens
}

/// Cursor over a token list with positioned errors.
pub struct Cursor {
    tokens: Vec<Token>,
    index: usize,
}

impl Cursor {
    pub fn new(text: &str) -> Self {
        Cursor {
            tokens: tokenize(text),
            index: 0,
        }
    }

    pub fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.index)
    }

    pub fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.index).cloned();
        if t.is_some() {
            self.index += 1;
        }
        t
    }

    pub fn last_pos(&self) -> Position {
        self.tokens
            .last()
            .map(|t| t.pos)
            .unwrap_or(Position { line: 1, col: 1 })
    }

    pub fn at_end(&self) -> bool {
        self.index >= self.tokens.len()
    }

    pub fn expect_lparen(&mut self) -> Result<Position, ParseError> {
        match self.next() {
            Some(Token {
                kind: TokenKind::LParen,
                pos,
            }) => Ok(pos),
            Some(t) => Err(ParseError::syntax(t.pos, "expected `(`")),
            None => Err(ParseError::syntax(
                self.last_pos(),
                "unexpected end of input, expected `(`",
            )),
        }
    }

    pub fn expect_rparen(&mut self) -> Result<(), ParseError> {
        match self.next() {
            Some(Token {
                kind: TokenKind::RParen,
                ..
            }) => Ok(()),
            Some(t) => Err(ParseError::syntax(t.pos, "expected `)`")),
            None => Err(ParseError::syntax(
                self.last_pos(),
                "unexpected end of input, expected `)`",
            )),
        }
    }

    pub fn expect_symbol(&mut self) -> Result<(String, Position), ParseError> {
        match self.next() {
            Some(Token {
                kind: TokenKind::Symbol(s),
                pos,
            }) => Ok((s, pos)),
            Some(t) => Err(ParseError::syntax(t.pos, "expected a symbol")),
            None => Err(ParseError::syntax(
                self.last_pos(),
                "unexpected end of input, expected a symbol",
            )),
        }
    }

    /// Consumes a symbol and checks it equals `expected`.
    pub fn expect_keyword(&mut self, expected: &str) -> Result<Position, ParseError> {
        let (s, pos) = self.expect_symbol()?;
        if s == expected {
            Ok(pos)
        } else {
            Err(ParseError::syntax(
                pos,
                format!("expected `{expected}`, found `{s}`"),
            ))
        }
    }

    pub fn peek_is_lparen(&self) -> bool {
        matches!(
            self.peek(),
            Some(Token {
                kind: TokenKind::LParen,
                ..
            })
        )
    }

    pub fn peek_is_rparen(&self) -> bool {
        matches!(
            self.peek(),
            Some(Token {
                kind: TokenKind::RParen,
                ..
            })
        )
    }

    pub fn peek_symbol(&self) -> Option<&str> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::Symbol(s),
                ..
            }) => Some(s.as_str()),
            _ => None,
        }
    }
}
