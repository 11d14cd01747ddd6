//! Tiny affine/max expression grammar for cost-bound right-hand sides.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := NUMBER | 'a' | VARIABLE | '(' expr ')'
//!         | 'max' '(' expr (',' expr)* ')'
//! ```
//! `a` is the block parameter α; variables are resolved against the system's
//! input-variable list at parse time.

use num_traits::Float;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Alpha,
    Var(usize),
    Sum(Vec<(bool, Expr)>), // (negated, term)
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Max(Vec<Expr>),
}

#[derive(Debug, Error, PartialEq)]
#[error("expression error: {0}")]
pub struct ExprError(pub String);

impl Expr {
    /// Evaluate with the given α and input-variable values.
    pub fn eval<F: Float>(&self, alpha: F, vars: &[F]) -> F {
        match self {
            Expr::Num(c) => F::from(*c).unwrap(),
            Expr::Alpha => alpha,
            Expr::Var(i) => vars[*i],
            Expr::Sum(terms) => {
                let mut acc = F::zero();
                for (neg, t) in terms {
                    let v = t.eval(alpha, vars);
                    acc = if *neg { acc - v } else { acc + v };
                }
                acc
            }
            Expr::Mul(l, r) => l.eval(alpha, vars) * r.eval(alpha, vars),
            Expr::Div(l, r) => l.eval(alpha, vars) / r.eval(alpha, vars),
            Expr::Max(es) => {
                let mut best = F::neg_infinity();
                for e in es {
                    best = best.max(e.eval(alpha, vars));
                }
                best
            }
        }
    }

    pub fn uses_alpha(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Var(_) => false,
            Expr::Alpha => true,
            Expr::Sum(ts) => ts.iter().any(|(_, t)| t.uses_alpha()),
            Expr::Mul(l, r) | Expr::Div(l, r) => l.uses_alpha() || r.uses_alpha(),
            Expr::Max(es) => es.iter().any(Expr::uses_alpha),
        }
    }
}

#[derive(Debug, PartialEq, Clone)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Open,
    Close,
    Comma,
}

fn tokenize(src: &str) -> Result<Vec<Tok>, ExprError> {
    let mut toks = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' => i += 1,
            b'+' => {
                toks.push(Tok::Plus);
                i += 1;
            }
            b'-' => {
                toks.push(Tok::Minus);
                i += 1;
            }
            b'*' => {
                toks.push(Tok::Star);
                i += 1;
            }
            b'/' => {
                toks.push(Tok::Slash);
                i += 1;
            }
            b'(' => {
                toks.push(Tok::Open);
                i += 1;
            }
            b')' => {
                toks.push(Tok::Close);
                i += 1;
            }
            b',' => {
                toks.push(Tok::Comma);
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                let s = &src[start..i];
                let n: f64 = s
                    .parse()
                    .map_err(|_| ExprError(format!("invalid number {s:?}")))?;
                toks.push(Tok::Num(n));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'')
                {
                    i += 1;
                }
                toks.push(Tok::Ident(src[start..i].to_string()));
            }
            c => return Err(ExprError(format!("unexpected character {:?}", c as char))),
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    vars: &'a [String],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: Tok) -> Result<(), ExprError> {
        match self.bump() {
            Some(got) if got == t => Ok(()),
            got => Err(ExprError(format!("expected {t:?}, got {got:?}"))),
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut terms = vec![(false, self.term()?)];
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    terms.push((false, self.term()?));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    terms.push((true, self.term()?));
                }
                _ => break,
            }
        }
        if terms.len() == 1 && !terms[0].0 {
            Ok(terms.pop().unwrap().1)
        } else {
            Ok(Expr::Sum(terms))
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Some(Tok::Slash) => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        match self.bump() {
            Some(Tok::Num(n)) => Ok(Expr::Num(n)),
            Some(Tok::Ident(id)) if id == "a" || id == "alpha" => Ok(Expr::Alpha),
            Some(Tok::Ident(id)) if id == "max" => {
                self.expect(Tok::Open)?;
                let mut es = vec![self.expr()?];
                while self.peek() == Some(&Tok::Comma) {
                    self.bump();
                    es.push(self.expr()?);
                }
                self.expect(Tok::Close)?;
                Ok(Expr::Max(es))
            }
            Some(Tok::Ident(id)) => {
                let i = self
                    .vars
                    .iter()
                    .position(|v| *v == id)
                    .ok_or_else(|| ExprError(format!("unknown variable {id:?}")))?;
                Ok(Expr::Var(i))
            }
            Some(Tok::Open) => {
                let e = self.expr()?;
                self.expect(Tok::Close)?;
                Ok(e)
            }
            got => Err(ExprError(format!("expected a factor, got {got:?}"))),
        }
    }
}

/// Parse an expression against the given variable names.
pub fn parse_expr(src: &str, vars: &[String]) -> Result<Expr, ExprError> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0, vars };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(ExprError(format!(
            "trailing tokens after expression: {:?}",
            &p.toks[p.pos..]
        )));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars() -> Vec<String> {
        ["X1", "X2", "U1"].iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn affine_evaluation() {
        let e = parse_expr("X1 + 3*X2 + a*U1", &vars()).unwrap();
        let got: f64 = e.eval(2.0, &[1.0, 2.0, 5.0]);
        assert_eq!(got, 1.0 + 6.0 + 10.0);
    }

    #[test]
    fn max_and_division() {
        let e = parse_expr("max( X1 + X2 , (2/a)*X1 + ((a+1)/a)*U1 )", &vars()).unwrap();
        let got: f64 = e.eval(2.0, &[4.0, 1.0, 2.0]);
        // max(5, 4 + 3) = 7
        assert_eq!(got, 7.0);
        assert!(e.uses_alpha());
    }

    #[test]
    fn unknown_variable_rejected() {
        assert!(parse_expr("X1 + Z9", &vars()).is_err());
    }

    #[test]
    fn trailing_tokens_rejected() {
        assert!(parse_expr("X1 + X2 )", &vars()).is_err());
    }
}
