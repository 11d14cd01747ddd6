//! Canonical s-expression text format for formulas.
//!
//! Grammar:
//! ```text
//! formula := "(var " INT ")" | "(const " ("0"|"1") ")" | "(not " formula ")"
//!          | "(and " f " " f ")" | "(or " f " " f ")" | "(xor " f " " f ")"
//!          | "(gate " TT4 " " f " " f ")"
//! ```
//! `TT4` is four characters of {0,1}: the gate output for (left,right) =
//! (0,0),(0,1),(1,0),(1,1) in that order. Lines starting with `#` are
//! comments. The renderer emits `and`/`or`/`xor` for those gates and the
//! `gate` form otherwise.

use std::fmt::Write as _;

use thiserror::Error;

use super::{Formula, GateTable, OpView};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("parse error at line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: u32,
    pub column: u32,
    pub message: String,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: u32,
    column: u32,
}

#[derive(Debug, PartialEq)]
enum Token {
    Open,
    Close,
    Word(String),
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Lexer<'a> {
        Lexer { src: src.as_bytes(), pos: 0, line: 1, column: 1 }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, column: self.column, message: message.into() }
    }

    fn bump(&mut self) -> u8 {
        let c = self.src[self.pos];
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        c
    }

    fn skip_trivia(&mut self) {
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            if c.is_ascii_whitespace() {
                self.bump();
            } else if c == b'#' {
                while self.pos < self.src.len() && self.src[self.pos] != b'\n' {
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn next(&mut self) -> Result<Option<Token>, ParseError> {
        self.skip_trivia();
        if self.pos >= self.src.len() {
            return Ok(None);
        }
        match self.src[self.pos] {
            b'(' => {
                self.bump();
                Ok(Some(Token::Open))
            }
            b')' => {
                self.bump();
                Ok(Some(Token::Close))
            }
            c if c.is_ascii_alphanumeric() => {
                let mut word = String::new();
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    word.push(self.bump() as char);
                }
                Ok(Some(Token::Word(word)))
            }
            c => Err(self.error(format!("unexpected character {:?}", c as char))),
        }
    }

    fn expect(&mut self, what: &str) -> Result<Token, ParseError> {
        match self.next()? {
            Some(t) => Ok(t),
            None => Err(self.error(format!("unexpected end of input, expected {what}"))),
        }
    }
}

/// Parse a single formula; trailing whitespace/comments are allowed.
pub fn parse(src: &str) -> Result<Formula, ParseError> {
    let mut lex = Lexer::new(src);
    let f = parse_formula(&mut lex)?;
    lex.skip_trivia();
    if lex.pos < lex.src.len() {
        return Err(lex.error("trailing input after formula"));
    }
    Ok(f)
}

fn parse_formula(lex: &mut Lexer<'_>) -> Result<Formula, ParseError> {
    match lex.expect("a formula")? {
        Token::Open => {}
        t => return Err(lex.error(format!("expected '(', got {t:?}"))),
    }
    let head = match lex.expect("an operator")? {
        Token::Word(w) => w,
        t => return Err(lex.error(format!("expected an operator, got {t:?}"))),
    };
    let f = match head.as_str() {
        "var" => {
            let w = parse_word(lex, "a variable index")?;
            let idx: u32 = w
                .parse()
                .map_err(|_| lex.error(format!("invalid variable index {w:?}")))?;
            Formula::var(idx)
        }
        "const" => {
            let w = parse_word(lex, "0 or 1")?;
            match w.as_str() {
                "0" => Formula::constant(false),
                "1" => Formula::constant(true),
                _ => return Err(lex.error(format!("invalid constant {w:?}, expected 0 or 1"))),
            }
        }
        "not" => Formula::not(parse_formula(lex)?),
        "and" => {
            let l = parse_formula(lex)?;
            Formula::and(l, parse_formula(lex)?)
        }
        "or" => {
            let l = parse_formula(lex)?;
            Formula::or(l, parse_formula(lex)?)
        }
        "xor" => {
            let l = parse_formula(lex)?;
            Formula::xor(l, parse_formula(lex)?)
        }
        "gate" => {
            let w = parse_word(lex, "a 4-bit truth table")?;
            if w.len() != 4 || !w.bytes().all(|b| b == b'0' || b == b'1') {
                return Err(lex.error(format!("invalid gate table {w:?}, expected 4 chars of 0/1")));
            }
            let mut bits = 0u8;
            for (i, b) in w.bytes().enumerate() {
                if b == b'1' {
                    bits |= 1 << i;
                }
            }
            let l = parse_formula(lex)?;
            Formula::gate(GateTable::new(bits), l, parse_formula(lex)?)
        }
        _ => return Err(lex.error(format!("unknown operator {head:?}"))),
    };
    match lex.expect("')'")? {
        Token::Close => Ok(f),
        t => Err(lex.error(format!("expected ')', got {t:?}"))),
    }
}

fn parse_word(lex: &mut Lexer<'_>, what: &str) -> Result<String, ParseError> {
    match lex.expect(what)? {
        Token::Word(w) => Ok(w),
        t => Err(lex.error(format!("expected {what}, got {t:?}"))),
    }
}

/// Canonical single-line rendering.
pub fn render(f: &Formula) -> String {
    let mut out = String::new();
    render_into(f, &mut out);
    out
}

fn render_into(f: &Formula, out: &mut String) {
    // iterative to survive deep trees
    enum Job<'a> {
        Node(&'a Formula),
        Text(&'static str),
    }
    let mut stack = vec![Job::Node(f)];
    while let Some(job) = stack.pop() {
        match job {
            Job::Text(t) => out.push_str(t),
            Job::Node(f) => match f.op_view() {
                OpView::Var(i) => {
                    let _ = write!(out, "(var {i})");
                }
                OpView::Const(b) => {
                    let _ = write!(out, "(const {})", b as u8);
                }
                OpView::Not(c) => {
                    out.push_str("(not ");
                    stack.push(Job::Text(")"));
                    stack.push(Job::Node(c));
                }
                OpView::Gate2(table, l, r) => {
                    if table == GateTable::AND {
                        out.push_str("(and ");
                    } else if table == GateTable::OR {
                        out.push_str("(or ");
                    } else if table == GateTable::XOR {
                        out.push_str("(xor ");
                    } else {
                        let _ = write!(out, "(gate {} ", table.as_text());
                    }
                    stack.push(Job::Text(")"));
                    stack.push(Job::Node(r));
                    stack.push(Job::Text(" "));
                    stack.push(Job::Node(l));
                }
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Formula;

    #[test]
    fn parse_xor_sample() {
        let f = parse("(xor (var 0) (var 1))").unwrap();
        assert!(f.structurally_eq(&Formula::xor(Formula::var(0), Formula::var(1))));
    }

    #[test]
    fn parse_gate_0110_is_xor() {
        let f = parse("(gate 0110 (var 0) (var 1))").unwrap();
        let t = f.truth_table(2).unwrap();
        let x = Formula::xor(Formula::var(0), Formula::var(1)).truth_table(2).unwrap();
        assert_eq!(t, x);
        // canonical render names it xor
        assert_eq!(render(&f), "(xor (var 0) (var 1))");
    }

    #[test]
    fn round_trip_canonical() {
        let src = "(and (not (var 2)) (or (var 0) (var 1)))";
        let f = parse(src).unwrap();
        assert_eq!(render(&f), src);
        assert!(parse(&render(&f)).unwrap().structurally_eq(&f));
    }

    #[test]
    fn comments_and_whitespace() {
        let src = "# leading comment\n (const 1) # trailing\n";
        let f = parse(src).unwrap();
        assert_eq!(render(&f), "(const 1)");
    }

    #[test]
    fn error_position() {
        let err = parse("(and (var 0)\n  (nope))").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("nope"));
    }

    #[test]
    fn error_on_trailing_input() {
        assert!(parse("(var 0) (var 1)").is_err());
    }

    #[test]
    fn nonstandard_gate_round_trips() {
        // NOR = outputs 1 only on (0,0) -> table "1000"
        let f = parse("(gate 1000 (var 0) (var 1))").unwrap();
        assert_eq!(render(&f), "(gate 1000 (var 0) (var 1))");
        let t = f.truth_table(2).unwrap();
        assert_eq!((t.get(0), t.get(1), t.get(2), t.get(3)), (true, false, false, false));
    }
}
