//! Text syntax for formulas.
//!
//! Grammar (ASCII only, shell-safe):
//!
//! ```text
//! formula := iff
//! iff     := impl ("<->" impl)*            left-associative
//! impl    := disj ("->" impl)?             right-associative
//! disj    := conj ("|" conj)*
//! conj    := unary ("&" unary)*
//! unary   := "~" unary | MOD unary | atom
//! MOD     := ("K"|"B"|"I") "[" ident "]"
//!          | "S" "[" ident "," ident "]"
//!          | "T" "[" ident "]"
//! atom    := ident | "true" | "false" | "(" formula ")"
//! ident   := [A-Za-z][A-Za-z0-9_]*
//! ```
//!
//! `S[a,b]` and `T[a]` are parsed directly into their expansions; they are
//! not formula constructors. Modal prefixes bind as tightly as negation, so
//! `K[a] p & q` reads `(K[a] p) & q`.

use std::fmt;

use thiserror::Error;

use crate::formula::{expand_factive_ignorance, expand_secret, AgentId, Formula, VarName};

/// Byte range into the parsed input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        SourceSpan { start, end }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at {span}: {message}")]
pub struct ParseError {
    pub message: String,
    pub span: SourceSpan,
    /// Descriptions of the tokens that would have been accepted here.
    pub expected: Vec<String>,
}

impl ParseError {
    fn new(message: impl Into<String>, span: SourceSpan, expected: &[&str]) -> Self {
        ParseError {
            message: message.into(),
            span,
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Arrow,
    Iff,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Eof,
}

impl Tok {
    fn describe(&self) -> &'static str {
        match self {
            Tok::Ident(_) => "identifier",
            Tok::True => "`true`",
            Tok::False => "`false`",
            Tok::Not => "`~`",
            Tok::And => "`&`",
            Tok::Or => "`|`",
            Tok::Arrow => "`->`",
            Tok::Iff => "`<->`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBracket => "`[`",
            Tok::RBracket => "`]`",
            Tok::Comma => "`,`",
            Tok::Eof => "end of input",
        }
    }
}

struct Lexer<'a> {
    input: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokenize(input: &'a str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
        let mut lexer = Lexer {
            input: input.as_bytes(),
            pos: 0,
        };
        let mut out = Vec::new();
        loop {
            let (tok, span) = lexer.next_token()?;
            let done = tok == Tok::Eof;
            out.push((tok, span));
            if done {
                return Ok(out);
            }
        }
    }

    fn next_token(&mut self) -> Result<(Tok, SourceSpan), ParseError> {
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        if start >= self.input.len() {
            return Ok((Tok::Eof, SourceSpan::new(start, start)));
        }
        let single = |tok, this: &mut Self| {
            this.pos += 1;
            Ok((tok, SourceSpan::new(start, start + 1)))
        };
        match self.input[start] {
            b'~' => single(Tok::Not, self),
            b'&' => single(Tok::And, self),
            b'|' => single(Tok::Or, self),
            b'(' => single(Tok::LParen, self),
            b')' => single(Tok::RParen, self),
            b'[' => single(Tok::LBracket, self),
            b']' => single(Tok::RBracket, self),
            b',' => single(Tok::Comma, self),
            b'-' => {
                if self.input.get(start + 1) == Some(&b'>') {
                    self.pos += 2;
                    Ok((Tok::Arrow, SourceSpan::new(start, start + 2)))
                } else {
                    Err(ParseError::new(
                        "expected `->`",
                        SourceSpan::new(start, start + 1),
                        &["->"],
                    ))
                }
            }
            b'<' => {
                if self.input.get(start + 1) == Some(&b'-')
                    && self.input.get(start + 2) == Some(&b'>')
                {
                    self.pos += 3;
                    Ok((Tok::Iff, SourceSpan::new(start, start + 3)))
                } else {
                    Err(ParseError::new(
                        "expected `<->`",
                        SourceSpan::new(start, start + 1),
                        &["<->"],
                    ))
                }
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut end = start + 1;
                while end < self.input.len()
                    && (self.input[end].is_ascii_alphanumeric() || self.input[end] == b'_')
                {
                    end += 1;
                }
                self.pos = end;
                let text = std::str::from_utf8(&self.input[start..end]).expect("ascii ident");
                let span = SourceSpan::new(start, end);
                if c == b'_' {
                    let message = if text == crate::formula::RESERVED_TOP_VAR {
                        format!("`{text}` is reserved")
                    } else {
                        "identifiers must start with a letter".to_owned()
                    };
                    return Err(ParseError::new(message, span, &["identifier"]));
                }
                let tok = match text {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    _ => Tok::Ident(text.to_owned()),
                };
                Ok((tok, span))
            }
            other => Err(ParseError::new(
                format!("unexpected character {:?}", other as char),
                SourceSpan::new(start, start + 1),
                &[],
            )),
        }
    }
}

struct Parser {
    tokens: Vec<(Tok, SourceSpan)>,
    pos: usize,
}

/// Parses a formula.
///
/// The result keeps `|`, `->`, `<->`, `true` and `false` as AST nodes;
/// desugar explicitly when a primitive-form formula is required. `S[..]` and
/// `T[..]` expand during parsing.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut parser = Parser {
        tokens: Lexer::tokenize(text)?,
        pos: 0,
    };
    let formula = parser.iff()?;
    let (tok, span) = parser.peek();
    if tok != &Tok::Eof {
        return Err(ParseError::new(
            format!("unexpected {}", tok.describe()),
            span,
            &["&", "|", "->", "<->", "end of input"],
        ));
    }
    Ok(formula)
}

impl Parser {
    fn peek(&self) -> (&Tok, SourceSpan) {
        let (tok, span) = &self.tokens[self.pos];
        (tok, *span)
    }

    fn bump(&mut self) -> (Tok, SourceSpan) {
        let entry = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        entry
    }

    fn expect(&mut self, want: Tok) -> Result<SourceSpan, ParseError> {
        let (tok, span) = self.peek();
        if *tok == want {
            self.bump();
            Ok(span)
        } else {
            Err(ParseError::new(
                format!("expected {}, found {}", want.describe(), tok.describe()),
                span,
                &[want.describe()],
            ))
        }
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.implication()?;
        while self.peek().0 == &Tok::Iff {
            self.bump();
            let rhs = self.implication()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.peek().0 == &Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while self.peek().0 == &Tok::Or {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while self.peek().0 == &Tok::And {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let (tok, span) = self.peek();
        match tok {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Ident(name) if self.tokens[self.pos + 1].0 == Tok::LBracket => {
                let name = name.clone();
                match name.as_str() {
                    "K" | "B" | "I" => {
                        self.bump();
                        self.expect(Tok::LBracket)?;
                        let agent = self.agent()?;
                        self.expect(Tok::RBracket)?;
                        let body = self.unary()?;
                        Ok(match name.as_str() {
                            "K" => Formula::k(&agent, body),
                            "B" => Formula::b(&agent, body),
                            _ => Formula::i(&agent, body),
                        })
                    }
                    "S" => {
                        self.bump();
                        self.expect(Tok::LBracket)?;
                        let keeper = self.agent()?;
                        self.expect(Tok::Comma)?;
                        let nescient = self.agent()?;
                        self.expect(Tok::RBracket)?;
                        let body = self.unary()?;
                        Ok(expand_secret(&keeper, &nescient, body))
                    }
                    "T" => {
                        self.bump();
                        self.expect(Tok::LBracket)?;
                        let agent = self.agent()?;
                        self.expect(Tok::RBracket)?;
                        let body = self.unary()?;
                        Ok(expand_factive_ignorance(&agent, body))
                    }
                    _ => Err(ParseError::new(
                        format!("`{name}` is not a modality"),
                        span,
                        &["K", "B", "I", "S", "T"],
                    )),
                }
            }
            _ => self.atom(),
        }
    }

    fn agent(&mut self) -> Result<AgentId, ParseError> {
        let (tok, span) = self.peek();
        match tok {
            Tok::Ident(name) => {
                let agent = AgentId::new(name.clone()).map_err(|e| {
                    ParseError::new(format!("bad agent name: {e}"), span, &["identifier"])
                })?;
                self.bump();
                Ok(agent)
            }
            other => Err(ParseError::new(
                format!("expected agent name, found {}", other.describe()),
                span,
                &["identifier"],
            )),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let (tok, span) = self.bump();
        match tok {
            Tok::Ident(name) => {
                let var = VarName::new(name).map_err(|e| {
                    ParseError::new(format!("bad variable name: {e}"), span, &["identifier"])
                })?;
                Ok(Formula::Var(var))
            }
            Tok::True => Ok(Formula::Top),
            Tok::False => Ok(Formula::Bot),
            Tok::LParen => {
                let inner = self.iff()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            other => Err(ParseError::new(
                format!("expected a formula, found {}", other.describe()),
                span,
                &[
                    "identifier",
                    "true",
                    "false",
                    "~",
                    "(",
                    "K[",
                    "B[",
                    "I[",
                    "S[",
                    "T[",
                ],
            )),
        }
    }
}

// Binding strength used for minimal parenthesization.
fn level(phi: &Formula) -> u8 {
    match phi {
        Formula::Var(_) | Formula::Top | Formula::Bot => 5,
        Formula::Not(_) | Formula::K(_, _) | Formula::B(_, _) | Formula::I(_, _) => 4,
        Formula::And(_, _) => 3,
        Formula::Or(_, _) => 2,
        Formula::Implies(_, _) => 1,
        Formula::Iff(_, _) => 0,
    }
}

/// Prints a formula with minimal parentheses.
///
/// Inverse of [`parse_formula`]: `parse_formula(&print_formula(phi))`
/// returns `phi` for every formula free of the reserved variable. Desugared
/// connectives stay desugared; use [`print_formula_sugared`] for a reader
/// that prefers `|` and `->`.
pub fn print_formula(phi: &Formula) -> String {
    let mut out = String::new();
    write_formula(phi, &mut out);
    out
}

fn write_child(child: &Formula, min_level: u8, out: &mut String) {
    if level(child) < min_level {
        out.push('(');
        write_formula(child, out);
        out.push(')');
    } else {
        write_formula(child, out);
    }
}

fn write_formula(phi: &Formula, out: &mut String) {
    match phi {
        Formula::Var(v) => out.push_str(v.as_str()),
        Formula::Top => out.push_str("true"),
        Formula::Bot => out.push_str("false"),
        Formula::Not(a) => {
            out.push('~');
            write_child(a, 4, out);
        }
        Formula::K(ag, a) | Formula::B(ag, a) | Formula::I(ag, a) => {
            let letter = match phi {
                Formula::K(_, _) => 'K',
                Formula::B(_, _) => 'B',
                _ => 'I',
            };
            out.push(letter);
            out.push('[');
            out.push_str(ag.as_str());
            out.push_str("] ");
            write_child(a, 4, out);
        }
        // `&` and `|` associate to the left, `->` to the right, `<->` to the
        // left; the subtree on the associating side may share the level.
        Formula::And(a, b) => {
            write_child(a, 3, out);
            out.push_str(" & ");
            write_child(b, 4, out);
        }
        Formula::Or(a, b) => {
            write_child(a, 2, out);
            out.push_str(" | ");
            write_child(b, 3, out);
        }
        Formula::Implies(a, b) => {
            write_child(a, 2, out);
            out.push_str(" -> ");
            write_child(b, 1, out);
        }
        Formula::Iff(a, b) => {
            write_child(a, 0, out);
            out.push_str(" <-> ");
            write_child(b, 1, out);
        }
    }
}

/// Prints like [`print_formula`] after rewriting desugared disjunctions and
/// implications back to `|` and `->` for readability. Display only; the
/// result parses to the resugared tree, not necessarily to the input.
pub fn print_formula_sugared(phi: &Formula) -> String {
    print_formula(&resugar(phi))
}

fn resugar(phi: &Formula) -> Formula {
    if let Formula::Not(inner) = phi {
        if let Formula::And(a, b) = inner.as_ref() {
            if let (Formula::Not(x), Formula::Not(y)) = (a.as_ref(), b.as_ref()) {
                // ~(~~x & ~y) reads x -> y, ~(~x & ~y) reads x | y.
                if let Formula::Not(x_inner) = x.as_ref() {
                    return Formula::implies(resugar(x_inner), resugar(y));
                }
                return Formula::or(resugar(x), resugar(y));
            }
        }
    }
    match phi {
        Formula::Var(_) | Formula::Top | Formula::Bot => phi.clone(),
        Formula::Not(a) => Formula::not(resugar(a)),
        Formula::And(a, b) => Formula::and(resugar(a), resugar(b)),
        Formula::Or(a, b) => Formula::or(resugar(a), resugar(b)),
        Formula::Implies(a, b) => Formula::implies(resugar(a), resugar(b)),
        Formula::Iff(a, b) => Formula::iff(resugar(a), resugar(b)),
        Formula::K(ag, a) => Formula::K(ag.clone(), Box::new(resugar(a))),
        Formula::B(ag, a) => Formula::B(ag.clone(), Box::new(resugar(a))),
        Formula::I(ag, a) => Formula::I(ag.clone(), Box::new(resugar(a))),
    }
}
