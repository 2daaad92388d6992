//! Tokenizer and recursive-descent parser for rule expressions.
//!
//! Grammar, loosest binding first: `+ -`, then `* /`, then unary minus, then
//! atoms (numbers, feature names, function calls, parenthesized expressions).
//! Binary operators are left-associative. Identifier matching is
//! case-insensitive.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ast::{BinOp, Expr, Func};
use super::RuleProgram;
use crate::features::Feature;

/// Parse failure with the byte offset of the offending token.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at offset {position}: {message}")]
pub struct ParseRuleError {
    pub position: usize,
    pub message: String,
}

fn err(position: usize, message: impl Into<String>) -> ParseRuleError {
    ParseRuleError {
        position,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    Comma,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number `{v}`"),
            Tok::Ident(name) => format!("identifier `{name}`"),
            Tok::Plus => "`+`".to_string(),
            Tok::Minus => "`-`".to_string(),
            Tok::Star => "`*`".to_string(),
            Tok::Slash => "`/`".to_string(),
            Tok::LParen => "`(`".to_string(),
            Tok::RParen => "`)`".to_string(),
            Tok::Comma => "`,`".to_string(),
        }
    }
}

fn tokenize(source: &str) -> Result<Vec<(usize, Tok)>, ParseRuleError> {
    let bytes = source.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'+' => {
                tokens.push((i, Tok::Plus));
                i += 1;
            }
            b'-' => {
                tokens.push((i, Tok::Minus));
                i += 1;
            }
            b'*' => {
                tokens.push((i, Tok::Star));
                i += 1;
            }
            b'/' => {
                tokens.push((i, Tok::Slash));
                i += 1;
            }
            b'(' => {
                tokens.push((i, Tok::LParen));
                i += 1;
            }
            b')' => {
                tokens.push((i, Tok::RParen));
                i += 1;
            }
            b',' => {
                tokens.push((i, Tok::Comma));
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && matches!(bytes[i], b'0'..=b'9' | b'.') {
                    i += 1;
                }
                if i < bytes.len() && matches!(bytes[i], b'e' | b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && matches!(bytes[j], b'+' | b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &source[start..i];
                let value: f64 = text
                    .parse()
                    .map_err(|_| err(start, format!("malformed number `{text}`")))?;
                if !value.is_finite() {
                    return Err(err(start, format!("number literal `{text}` out of range")));
                }
                tokens.push((start, Tok::Num(value)));
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = i;
                while i < bytes.len() && matches!(bytes[i], b'a'..=b'z' | b'A'..=b'Z' | b'0'..=b'9' | b'_') {
                    i += 1;
                }
                tokens.push((start, Tok::Ident(source[start..i].to_string())));
            }
            _ => {
                return Err(err(
                    i,
                    format!("unexpected character `{}`", &source[i..][..1]),
                ))
            }
        }
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: &'a [(usize, Tok)],
    pos: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&(usize, Tok)> {
        self.tokens.get(self.pos)
    }

    fn advance(&mut self) -> Option<&(usize, Tok)> {
        let tok = self.tokens.get(self.pos);
        if tok.is_some() {
            self.pos += 1;
        }
        tok
    }

    fn expr(&mut self) -> Result<Expr, ParseRuleError> {
        let mut lhs = self.term()?;
        while let Some((_, tok)) = self.peek() {
            let op = match tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => break,
            };
            self.advance();
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseRuleError> {
        let mut lhs = self.factor()?;
        while let Some((_, tok)) = self.peek() {
            let op = match tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => break,
            };
            self.advance();
            let rhs = self.factor()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ParseRuleError> {
        if matches!(self.peek(), Some((_, Tok::Minus))) {
            self.advance();
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, ParseRuleError> {
        let Some((position, tok)) = self.advance() else {
            return Err(err(self.end, "expected operand at end of input"));
        };
        let position = *position;
        match tok.clone() {
            Tok::Num(value) => Ok(Expr::Num(value)),
            Tok::Ident(name) => {
                if matches!(self.peek(), Some((_, Tok::LParen))) {
                    let func = Func::from_name(&name)
                        .ok_or_else(|| err(position, format!("unknown function `{name}`")))?;
                    self.advance();
                    let args = self.call_args(position, func)?;
                    Ok(Expr::Call(func, args))
                } else {
                    let feature = Feature::from_name(&name)
                        .ok_or_else(|| err(position, format!("unknown identifier `{name}`")))?;
                    Ok(Expr::Feature(feature))
                }
            }
            Tok::LParen => {
                let inner = self.expr()?;
                match self.advance() {
                    Some((_, Tok::RParen)) => Ok(inner),
                    Some((pos, tok)) => Err(err(*pos, format!("expected `)`, found {}", tok.describe()))),
                    None => Err(err(self.end, "unclosed parenthesis")),
                }
            }
            other => Err(err(
                position,
                format!("expected operand, found {}", other.describe()),
            )),
        }
    }

    fn call_args(&mut self, call_pos: usize, func: Func) -> Result<Vec<Expr>, ParseRuleError> {
        let mut args = Vec::new();
        if matches!(self.peek(), Some((_, Tok::RParen))) {
            self.advance();
        } else {
            loop {
                args.push(self.expr()?);
                match self.advance() {
                    Some((_, Tok::Comma)) => continue,
                    Some((_, Tok::RParen)) => break,
                    Some((pos, tok)) => {
                        return Err(err(
                            *pos,
                            format!("expected `,` or `)`, found {}", tok.describe()),
                        ))
                    }
                    None => return Err(err(self.end, "unclosed argument list")),
                }
            }
        }
        if args.len() != func.arity() {
            return Err(err(
                call_pos,
                format!(
                    "{} expects {} argument(s), found {}",
                    func.name(),
                    func.arity(),
                    args.len()
                ),
            ));
        }
        Ok(args)
    }
}

/// Parses one rule expression into a [`RuleProgram`].
pub fn parse_rule(source: &str) -> Result<RuleProgram, ParseRuleError> {
    let tokens = tokenize(source)?;
    let mut parser = Parser {
        tokens: &tokens,
        pos: 0,
        end: source.len(),
    };
    let ast = parser.expr()?;
    if let Some((pos, tok)) = parser.peek() {
        return Err(err(*pos, format!("dangling token {}", tok.describe())));
    }
    Ok(RuleProgram {
        source: source.trim().to_string(),
        ast,
    })
}
