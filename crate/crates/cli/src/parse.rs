//! Text syntax for sum expressions.
//!
//! ```text
//! expr    = term { ("+" | "-") term }
//! term    = unary { ("*" | "/") unary }
//! unary   = "-" unary | power
//! power   = atom [ "^" unary ]
//! atom    = integer | name | "(" expr ")"
//!         | "binom(" expr "," expr ")"
//!         | ("sum" | "prod") "(" name "," expr "," expr "," expr ")"
//!         | "S[" integer { "," integer } "](" expr ")"
//! ```

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use pisigma_core::expr::SumExpr;
use pisigma_core::Rat;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset into the input.
    pub offset: usize,
    pub message: String,
}

impl ParseError {
    /// The message with the input line and a caret under the offending spot.
    pub fn render(&self, input: &str) -> String {
        let col = input[..self.offset.min(input.len())].chars().count();
        format!("{}\n  {}\n  {}^", self, input, " ".repeat(col))
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at column {}: {}", self.offset + 1, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Name(String),
    Op(char),
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
}

fn lex(input: &str) -> Result<Lexer, ParseError> {
    let mut toks = Vec::new();
    let bytes = input.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            toks.push((Tok::Int(input[start..i].parse().unwrap()), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            toks.push((Tok::Name(input[start..i].to_string()), start));
        } else if "+-*/^(),[]".contains(c) {
            toks.push((Tok::Op(c), i));
            i += 1;
        } else {
            let ch = input[i..].chars().next().unwrap();
            return Err(ParseError { offset: i, message: format!("unexpected character '{}'", ch) });
        }
    }
    toks.push((Tok::End, input.len()));
    Ok(Lexer { toks })
}

struct Parser {
    lx: Lexer,
    pos: usize,
    /// Indices bound by the enclosing quantifiers.
    bound: Vec<String>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.lx.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.lx.toks[self.pos].1
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { offset: self.offset(), message: message.into() })
    }

    fn bump(&mut self) -> Tok {
        let t = self.lx.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Op(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{}', found {}", c, describe(self.peek())))
        }
    }

    fn expr(&mut self) -> Result<SumExpr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat('+') {
                terms.push(self.term()?);
            } else if self.eat('-') {
                terms.push(SumExpr::neg(self.term()?));
            } else {
                return Ok(SumExpr::add(terms));
            }
        }
    }

    fn term(&mut self) -> Result<SumExpr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = SumExpr::mul(vec![acc, self.unary()?]);
            } else if self.eat('/') {
                acc = SumExpr::div(acc, self.unary()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<SumExpr, ParseError> {
        if self.eat('-') {
            return Ok(SumExpr::neg(self.unary()?));
        }
        let base = self.atom()?;
        if self.eat('^') {
            let e = self.unary()?;
            return Ok(SumExpr::pow(base, e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<SumExpr, ParseError> {
        let at = self.offset();
        match self.bump() {
            Tok::Int(v) => Ok(SumExpr::rat(Rat::from_integer(v))),
            Tok::Op('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Name(name) => match name.as_str() {
                "binom" => {
                    self.expect('(')?;
                    let a = self.expr()?;
                    self.expect(',')?;
                    let b = self.expr()?;
                    self.expect(')')?;
                    Ok(SumExpr::binom(a, b))
                }
                "sum" | "prod" => self.quantifier(&name),
                "S" if *self.peek() == Tok::Op('[') => self.harmonic(),
                _ => {
                    if *self.peek() == Tok::Op('(') {
                        return Err(ParseError { offset: at, message: format!("unknown function '{}'", name) });
                    }
                    Ok(SumExpr::sym(&name))
                }
            },
            t => Err(ParseError { offset: at, message: format!("expected an expression, found {}", describe(&t)) }),
        }
    }

    fn quantifier(&mut self, which: &str) -> Result<SumExpr, ParseError> {
        self.expect('(')?;
        let at = self.offset();
        let index = match self.bump() {
            Tok::Name(n) if !is_reserved(&n) => n,
            t => return Err(ParseError { offset: at, message: format!("expected an index name, found {}", describe(&t)) }),
        };
        if self.bound.contains(&index) {
            return Err(ParseError { offset: at, message: format!("index '{}' is already bound by an enclosing quantifier", index) });
        }
        self.expect(',')?;
        let lower = self.expr()?;
        self.expect(',')?;
        let upper = self.expr()?;
        self.expect(',')?;
        self.bound.push(index.clone());
        let body = self.expr()?;
        self.bound.pop();
        self.expect(')')?;
        Ok(if which == "sum" { SumExpr::sum(&index, lower, upper, body) } else { SumExpr::prod(&index, lower, upper, body) })
    }

    fn harmonic(&mut self) -> Result<SumExpr, ParseError> {
        self.expect('[')?;
        let mut indices = Vec::new();
        loop {
            let at = self.offset();
            let neg = self.eat('-');
            match self.bump() {
                Tok::Int(v) => {
                    let v: i64 = i64::try_from(v).map_err(|_| ParseError { offset: at, message: "index too large".into() })?;
                    if v == 0 {
                        return Err(ParseError { offset: at, message: "harmonic sum indices must be nonzero".into() });
                    }
                    indices.push(if neg { -v } else { v });
                }
                t => return Err(ParseError { offset: at, message: format!("expected an integer index, found {}", describe(&t)) }),
            }
            if !self.eat(',') {
                break;
            }
        }
        self.expect(']')?;
        self.expect('(')?;
        let arg = self.expr()?;
        self.expect(')')?;
        Ok(SumExpr::harmonic(indices, arg))
    }
}

fn is_reserved(n: &str) -> bool {
    matches!(n, "sum" | "prod" | "binom")
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(v) => format!("'{}'", v),
        Tok::Name(n) => format!("'{}'", n),
        Tok::Op(c) => format!("'{}'", c),
        Tok::End => "end of input".into(),
    }
}

pub fn parse_expr(input: &str) -> Result<SumExpr, ParseError> {
    let mut p = Parser { lx: lex(input)?, pos: 0, bound: Vec::new() };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.err(format!("unexpected {} after the expression", describe(p.peek())));
    }
    Ok(e)
}

/// `lhs = rhs`.
pub fn parse_equation(input: &str) -> Result<(SumExpr, SumExpr), ParseError> {
    let Some(eq) = input.find('=') else {
        return Err(ParseError { offset: input.len(), message: "expected an equation 'lhs = rhs'".into() });
    };
    let lhs = parse_expr(&input[..eq])?;
    let rhs = parse_expr(&input[eq + 1..]).map_err(|e| ParseError { offset: e.offset + eq + 1, message: e.message })?;
    Ok((lhs, rhs))
}

/// Free symbols of several expressions.
pub fn symbols(es: &[&SumExpr]) -> BTreeSet<String> {
    es.iter().flat_map(|e| e.free_symbols()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_display() {
        let e = parse_expr("-x^2 + 3*k/(k+1)").unwrap();
        let x = SumExpr::sym("x");
        let k = SumExpr::sym("k");
        let want = SumExpr::add(vec![SumExpr::neg(SumExpr::pow(x, SumExpr::num(2))), SumExpr::div(SumExpr::mul(vec![SumExpr::num(3), k.clone()]), SumExpr::add(vec![k, SumExpr::num(1)]))]);
        assert_eq!(e, want);
    }

    #[test]
    fn quantifiers_and_harmonic_sums() {
        let e = parse_expr("sum(k,1,K, sum(i,1,k, x^(i-1)*binom(m+i-1,m))/(k+m))").unwrap();
        assert_eq!(e.quantifier_depth(), 2);
        let h = parse_expr("S[2,4](n)").unwrap();
        assert_eq!(h, SumExpr::harmonic(vec![2, 4], SumExpr::sym("n")));
        assert_eq!(parse_expr(&h.to_string()).unwrap(), h);
    }

    #[test]
    fn errors_point_at_the_problem() {
        let e = parse_expr("sum(k,1,n, 1/k").unwrap_err();
        assert_eq!(e.offset, 14);
        assert!(e.render("sum(k,1,n, 1/k").ends_with("              ^"));
        assert_eq!(parse_expr("1 + $").unwrap_err().offset, 4);
        assert!(parse_expr("sum(k,1,n, sum(k,1,k, 1))").unwrap_err().message.contains("already bound"));
        assert!(parse_expr("S[0](n)").is_err());
        assert!(parse_expr("foo(n)").unwrap_err().message.contains("unknown function"));
        let (_, _) = parse_equation("S[1](n) = sum(i,1,n,1/i)").unwrap();
        assert_eq!(parse_equation("S[1](n) = (").unwrap_err().offset, 11);
    }
}
