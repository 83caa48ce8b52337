//! Recursive-descent parser for expressions in `s`.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := factor (("*" | "/") factor)*
//! factor  := "-" factor | power
//! power   := primary ("^" factor)?
//! primary := NUMBER | "s" | FUNC "(" expr ")" | "(" expr ")"
//! FUNC    := "ln" | "exp" | "sin" | "cos" | "sqrt" | "abs"
//! NUMBER  := decimal literal with optional exponent
//! ```
//!
//! `+ - * /` are left-associative, `^` is right-associative and binds
//! tighter than unary minus (`-s^2` is `-(s^2)`).

use thiserror::Error;

use super::{BinaryOp, Expr, UnaryOp};

/// Syntax error with the byte offset of the offending input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at offset {offset}: expected {expected}, found {found}")]
pub struct ParseError {
    pub offset: usize,
    pub expected: String,
    pub found: String,
}

impl ParseError {
    fn new(offset: usize, expected: &str, found: impl Into<String>) -> Self {
        ParseError {
            offset,
            expected: expected.to_string(),
            found: found.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Variable,
    Func(UnaryOp),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Number(v) => format!("number `{v}`"),
            Token::Variable => "`s`".to_string(),
            Token::Func(op) => format!("`{}`", op.name()),
            Token::Plus => "`+`".to_string(),
            Token::Minus => "`-`".to_string(),
            Token::Star => "`*`".to_string(),
            Token::Slash => "`/`".to_string(),
            Token::Caret => "`^`".to_string(),
            Token::LParen => "`(`".to_string(),
            Token::RParen => "`)`".to_string(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'+' => {
                tokens.push((Token::Plus, i));
                i += 1;
            }
            b'-' => {
                tokens.push((Token::Minus, i));
                i += 1;
            }
            b'*' => {
                tokens.push((Token::Star, i));
                i += 1;
            }
            b'/' => {
                tokens.push((Token::Slash, i));
                i += 1;
            }
            b'^' => {
                tokens.push((Token::Caret, i));
                i += 1;
            }
            b'(' => {
                tokens.push((Token::LParen, i));
                i += 1;
            }
            b')' => {
                tokens.push((Token::RParen, i));
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i == start + 1 && bytes[start] == b'.' {
                    return Err(ParseError::new(start, "a digit", "`.`"));
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j >= bytes.len() || !bytes[j].is_ascii_digit() {
                        return Err(ParseError::new(i, "an exponent digit", preview(text, j)));
                    }
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                let literal = &text[start..i];
                let value: f64 = literal.parse().map_err(|_| {
                    ParseError::new(start, "a numeric literal", format!("`{literal}`"))
                })?;
                tokens.push((Token::Number(value), start));
            }
            b'a'..=b'z' | b'A'..=b'Z' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                let word = &text[start..i];
                let token = match word {
                    "s" => Token::Variable,
                    "ln" => Token::Func(UnaryOp::Ln),
                    "exp" => Token::Func(UnaryOp::Exp),
                    "sin" => Token::Func(UnaryOp::Sin),
                    "cos" => Token::Func(UnaryOp::Cos),
                    "sqrt" => Token::Func(UnaryOp::Sqrt),
                    "abs" => Token::Func(UnaryOp::Abs),
                    other => {
                        return Err(ParseError::new(
                            start,
                            "`s` or a function name (ln, exp, sin, cos, sqrt, abs)",
                            format!("`{other}`"),
                        ))
                    }
                };
                tokens.push((token, start));
            }
            other => {
                return Err(ParseError::new(
                    i,
                    "an operator, number, `s`, or parenthesis",
                    format!("`{}`", other as char),
                ))
            }
        }
    }
    Ok(tokens)
}

fn preview(text: &str, at: usize) -> String {
    match text.as_bytes().get(at) {
        Some(&b) => format!("`{}`", b as char),
        None => "end of input".to_string(),
    }
}

struct Parser<'a> {
    tokens: &'a [(Token, usize)],
    pos: usize,
    input_len: usize,
}

const PRIMARY_EXPECTED: &str = "a number, `s`, a function name, `(`, or `-`";

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|&(_, o)| o)
            .unwrap_or(self.input_len)
    }

    fn found(&self) -> String {
        match self.peek() {
            Some(t) => t.describe(),
            None => "end of input".to_string(),
        }
    }

    fn advance(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, token: Token, expected: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&token) {
            self.pos += 1;
            Ok(())
        } else {
            Err(ParseError::new(self.offset(), expected, self.found()))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut left = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Token::Plus) => BinaryOp::Add,
                Some(Token::Minus) => BinaryOp::Sub,
                _ => break,
            };
            self.pos += 1;
            let right = self.term()?;
            left = Expr::binary(op, left, right);
        }
        Ok(left)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut left = self.factor()?;
        loop {
            let op = match self.peek() {
                Some(Token::Star) => BinaryOp::Mul,
                Some(Token::Slash) => BinaryOp::Div,
                _ => break,
            };
            self.pos += 1;
            let right = self.factor()?;
            left = Expr::binary(op, left, right);
        }
        Ok(left)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            let child = self.factor()?;
            return Ok(Expr::unary(UnaryOp::Neg, child));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.peek() == Some(&Token::Caret) {
            self.pos += 1;
            let exponent = self.factor()?;
            return Ok(Expr::binary(BinaryOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        match self.advance() {
            Some(Token::Number(v)) => Ok(Expr::Constant(v)),
            Some(Token::Variable) => Ok(Expr::Variable),
            Some(Token::Func(op)) => {
                self.expect(Token::LParen, "`(` after function name")?;
                let arg = self.expr()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(Expr::unary(op, arg))
            }
            Some(Token::LParen) => {
                let inner = self.expr()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(inner)
            }
            Some(other) => Err(ParseError::new(offset, PRIMARY_EXPECTED, other.describe())),
            None => Err(ParseError::new(offset, PRIMARY_EXPECTED, "end of input")),
        }
    }
}

pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let tokens = lex(text)?;
    let mut parser = Parser {
        tokens: &tokens,
        pos: 0,
        input_len: text.len(),
    };
    let expr = parser.expr()?;
    if parser.peek().is_some() {
        return Err(ParseError::new(
            parser.offset(),
            "end of input",
            parser.found(),
        ));
    }
    Ok(expr)
}
