//! Text syntax for words and commutator expressions.
//!
//! ```text
//! expr   := term (sep term)*          sep    := whitespace | '*'
//! term   := letter | '1' | '[' expr ',' expr ']' | '(' expr ')'
//! letter := 'x' N ('^-1' | '^1')?     N >= 1
//! ```
//!
//! `1` denotes the identity and is only accepted where a word is expected.
//! Errors carry the 1-based column of the offending character.

use std::fmt;

use thiserror::Error;

use crate::commutator::CommutatorExpr;
use crate::word::{GroupWord, Letter};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at column {}: {}", self.column, self.message)
    }
}

#[derive(Debug)]
enum Node {
    One,
    Letter(Letter),
    Comm(Box<Node>, Box<Node>),
    Prod(Vec<Node>),
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    src: &'a str,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            chars: src.chars().collect(),
            pos: 0,
            src,
        }
    }

    fn err<T>(&self, at: usize, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            column: at + 1,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn parse_all(&mut self) -> Result<Node, ParseError> {
        self.skip_ws();
        if self.peek().is_none() {
            return self.err(0, format!("empty input {:?}", self.src));
        }
        let node = self.expr()?;
        self.skip_ws();
        match self.peek() {
            None => Ok(node),
            Some(']') => self.err(self.pos, "unexpected ']' without matching '['"),
            Some(')') => self.err(self.pos, "unexpected ')' without matching '('"),
            Some(c) => self.err(self.pos, format!("unexpected {c:?}")),
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut factors = vec![self.term()?];
        loop {
            self.skip_ws();
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    self.skip_ws();
                    factors.push(self.term()?);
                }
                Some(c) if c == 'x' || c == '[' || c == '(' || c == '1' => factors.push(self.term()?),
                _ => break,
            }
        }
        Ok(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            Node::Prod(factors)
        })
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some('x') => self.letter(),
            Some('1') => {
                self.pos += 1;
                Ok(Node::One)
            }
            Some('[') => {
                self.pos += 1;
                let u = self.expr()?;
                self.skip_ws();
                match self.peek() {
                    Some(',') => self.pos += 1,
                    None => return self.err(start, "unclosed '['"),
                    Some(c) => return self.err(self.pos, format!("expected ',' but found {c:?}")),
                }
                let v = self.expr()?;
                self.skip_ws();
                match self.peek() {
                    Some(']') => self.pos += 1,
                    None => return self.err(start, "unclosed '['"),
                    Some(c) => return self.err(self.pos, format!("expected ']' but found {c:?}")),
                }
                Ok(Node::Comm(Box::new(u), Box::new(v)))
            }
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.skip_ws();
                match self.peek() {
                    Some(')') => self.pos += 1,
                    None => return self.err(start, "unclosed '('"),
                    Some(c) => return self.err(self.pos, format!("expected ')' but found {c:?}")),
                }
                Ok(e)
            }
            Some(']') => self.err(start, "unexpected ']' without matching '['"),
            Some(c) => self.err(start, format!("expected a generator or '[' but found {c:?}")),
            None => self.err(start, "unexpected end of input"),
        }
    }

    fn letter(&mut self) -> Result<Node, ParseError> {
        let start = self.pos;
        self.pos += 1; // 'x'
        let digits_start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == digits_start {
            return self.err(start, "generator needs an index, e.g. x1");
        }
        let digits: String = self.chars[digits_start..self.pos].iter().collect();
        let index: u32 = match digits.parse() {
            Ok(0) => return self.err(start, "generators are numbered from x1"),
            Ok(n) => n,
            Err(_) => return self.err(start, format!("generator index {digits} is too large")),
        };
        let mut inverse = false;
        if self.peek() == Some('^') {
            let caret = self.pos;
            self.pos += 1;
            if self.peek() == Some('-') {
                self.pos += 1;
                inverse = true;
            }
            if self.peek() != Some('1') {
                return self.err(caret, "only the exponents ^1 and ^-1 are supported");
            }
            self.pos += 1;
            if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                return self.err(caret, "only the exponents ^1 and ^-1 are supported");
            }
        }
        Ok(Node::Letter(Letter::new(index - 1, inverse)))
    }
}

fn node_word(node: &Node) -> GroupWord {
    match node {
        Node::One => GroupWord::identity(),
        Node::Letter(l) => GroupWord::from_letters([*l]),
        Node::Comm(u, v) => GroupWord::commutator(&node_word(u), &node_word(v)),
        Node::Prod(fs) => fs.iter().fold(GroupWord::identity(), |acc, f| acc.mul(&node_word(f))),
    }
}

fn node_expr(node: Node) -> Option<CommutatorExpr> {
    Some(match node {
        Node::One => return None,
        Node::Letter(l) => CommutatorExpr::Leaf(l),
        Node::Comm(u, v) => CommutatorExpr::comm(node_expr(*u)?, node_expr(*v)?),
        Node::Prod(fs) => CommutatorExpr::Prod(fs.into_iter().map(node_expr).collect::<Option<_>>()?),
    })
}

/// Parses a word; brackets are expanded and the result freely reduced.
/// An empty string or `1` is the identity.
pub fn parse_word(src: &str) -> Result<GroupWord, ParseError> {
    if src.trim().is_empty() {
        return Ok(GroupWord::identity());
    }
    Parser::new(src).parse_all().map(|n| node_word(&n))
}

pub fn parse_expr(src: &str) -> Result<CommutatorExpr, ParseError> {
    let node = Parser::new(src).parse_all()?;
    node_expr(node).ok_or(ParseError {
        column: src.find('1').map_or(1, |i| src[..i].chars().count() + 1),
        message: "the identity '1' is not allowed in a commutator expression".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn words() {
        assert_eq!(parse_word("x1 x1^-1").unwrap(), GroupWord::identity());
        assert_eq!(parse_word("1").unwrap(), GroupWord::identity());
        assert_eq!(parse_word("").unwrap(), GroupWord::identity());
        assert_eq!(parse_word("x1*x2 * x2^-1*x1").unwrap().to_string(), "x1 x1");
        assert_eq!(parse_word("[x1,x2]").unwrap().to_string(), "x1 x2 x1^-1 x2^-1");
        assert_eq!(parse_word("x2^1").unwrap(), GroupWord::generator(1));
    }

    #[test]
    fn expressions() {
        let e = parse_expr("[ [x1,x2], x1 ]").unwrap();
        assert_eq!(e, CommutatorExpr::left_normed(&[0, 1, 0]));
        let p = parse_expr("[x1,x2] [x3,x4]").unwrap();
        assert!(matches!(p, CommutatorExpr::Prod(ref fs) if fs.len() == 2));
        let q = parse_expr("[x1 x2, x3]").unwrap();
        assert_eq!(q.weight(), 2);
    }

    #[test]
    fn bracket_errors_have_positions() {
        let e = parse_expr("[x1, x2").unwrap_err();
        assert_eq!(e.column, 1);
        assert!(e.message.contains("unclosed"));
        let e = parse_expr("x1 ]").unwrap_err();
        assert_eq!(e.column, 4);
        let e = parse_expr("[x1 x2]").unwrap_err();
        assert_eq!(e.column, 7);
        assert!(e.message.contains("','"));
        let e = parse_word("x1 x0").unwrap_err();
        assert_eq!(e.column, 4);
        let e = parse_word("x1^2").unwrap_err();
        assert_eq!(e.column, 3);
        assert!(parse_expr("[x1, 1]").is_err());
        assert_eq!(
            e.to_string(),
            "at column 3: only the exponents ^1 and ^-1 are supported"
        );
    }
}
