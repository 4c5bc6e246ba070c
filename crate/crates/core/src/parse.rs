//! Presentation documents.
//!
//! ```text
//! # comments run to end of line
//! field F2            # F<p> for a prime p, or Q
//! gen x 1             # name and degree; parity defaults to even
//! gen e 4 odd
//! rel x^2 + x*y + y^2
//! ```
//!
//! Relation grammar:
//!
//! ```text
//! sum    := ['-'] term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ['^' integer]
//! atom   := integer | identifier | '(' sum ')'
//! ```

use std::fmt;

use crate::algebra::{AlgebraPresentation, Generator, Parity, Polynomial};
use crate::error::{Error, Result};
use crate::field::{is_prime, Field, FieldKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(i64),
    Var(String),
    /// Signed summands; `true` marks a subtracted term.
    Sum(Vec<(bool, Expr)>),
    Product(Vec<Expr>),
    Pow(Box<Expr>, u32),
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Var(v) => f.write_str(v),
            Expr::Sum(terms) => {
                for (i, (neg, t)) in terms.iter().enumerate() {
                    match (i, neg) {
                        (0, true) => f.write_str("-")?,
                        (0, false) => {}
                        (_, true) => f.write_str(" - ")?,
                        (_, false) => f.write_str(" + ")?,
                    }
                    if matches!(t, Expr::Sum(_)) {
                        write!(f, "({t})")?;
                    } else {
                        write!(f, "{t}")?;
                    }
                }
                Ok(())
            }
            Expr::Product(factors) => {
                for (i, x) in factors.iter().enumerate() {
                    if i > 0 {
                        f.write_str("*")?;
                    }
                    if matches!(x, Expr::Sum(_) | Expr::Product(_)) {
                        write!(f, "({x})")?;
                    } else {
                        write!(f, "{x}")?;
                    }
                }
                Ok(())
            }
            Expr::Pow(base, e) => match **base {
                Expr::Int(_) | Expr::Var(_) => write!(f, "{base}^{e}"),
                _ => write!(f, "({base})^{e}"),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorDecl {
    pub name: String,
    pub degree: i32,
    pub parity: Parity,
}

#[derive(Clone, Debug, Eq)]
pub struct RelationDecl {
    pub expr: Expr,
    /// Source line, kept for diagnostics only.
    pub line: usize,
}

impl PartialEq for RelationDecl {
    fn eq(&self, other: &Self) -> bool {
        self.expr == other.expr
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresentationDocument {
    pub field: FieldKind,
    pub generators: Vec<GeneratorDecl>,
    pub relations: Vec<RelationDecl>,
}

pub fn parse_field(tag: &str) -> Result<FieldKind> {
    if tag == "Q" {
        return Ok(FieldKind::Rational);
    }
    let p = tag
        .strip_prefix('F')
        .and_then(|d| d.parse::<u32>().ok())
        .ok_or_else(|| Error::UnsupportedField(tag.to_string()))?;
    if !is_prime(p) || p >= 1 << 31 {
        return Err(Error::UnsupportedField(tag.to_string()));
    }
    Ok(FieldKind::Prime(p))
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

impl PresentationDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let mut field = None;
        let mut generators: Vec<GeneratorDecl> = Vec::new();
        let mut relations = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("");
            let trimmed = content.trim_start();
            if trimmed.is_empty() {
                continue;
            }
            let indent = content.len() - trimmed.len();
            let (keyword, rest) = trimmed.split_once(char::is_whitespace).unwrap_or((trimmed, ""));
            let rest_col = indent + keyword.len() + 2;
            match keyword {
                "field" => {
                    let words: Vec<&str> = rest.split_whitespace().collect();
                    if words.len() != 1 {
                        return Err(parse_error(line, rest_col, "expected a single field tag"));
                    }
                    if field.is_some() {
                        return Err(parse_error(line, 1, "field declared twice"));
                    }
                    field = Some(parse_field(words[0])?);
                }
                "gen" => {
                    let words: Vec<&str> = rest.split_whitespace().collect();
                    if !(2..=3).contains(&words.len()) {
                        return Err(parse_error(line, rest_col, "expected `gen <name> <degree> [odd|even]`"));
                    }
                    let name = words[0];
                    if !is_identifier(name) {
                        return Err(parse_error(line, rest_col, format!("invalid generator name `{name}`")));
                    }
                    if generators.iter().any(|g| g.name == name) {
                        return Err(parse_error(line, rest_col, format!("duplicate generator `{name}`")));
                    }
                    let degree: i32 = words[1]
                        .parse()
                        .map_err(|_| parse_error(line, rest_col, format!("invalid degree `{}`", words[1])))?;
                    if degree < 1 {
                        return Err(parse_error(line, rest_col, "generator degrees must be at least 1"));
                    }
                    let parity = match words.get(2) {
                        None | Some(&"even") => Parity::Even,
                        Some(&"odd") => Parity::Odd,
                        Some(w) => return Err(parse_error(line, rest_col, format!("unknown parity `{w}`"))),
                    };
                    generators.push(GeneratorDecl {
                        name: name.to_string(),
                        degree,
                        parity,
                    });
                }
                "rel" => {
                    let expr = ExprParser::new(rest, line, rest_col).parse()?;
                    relations.push(RelationDecl { expr, line });
                }
                other => {
                    return Err(parse_error(line, indent + 1, format!("unknown directive `{other}`")));
                }
            }
        }
        let field = field.ok_or_else(|| parse_error(1, 1, "missing `field` line"))?;
        Ok(PresentationDocument {
            field,
            generators,
            relations,
        })
    }

    /// Builds the presentation over `field`, which must match the declared tag.
    pub fn presentation<F: Field>(&self, field: F) -> Result<AlgebraPresentation<F>> {
        assert_eq!(field.kind(), self.field, "field does not match the document");
        let gens: Vec<Generator> = self
            .generators
            .iter()
            .map(|g| Generator::new(g.name.clone(), g.degree, g.parity))
            .collect();
        let bare = AlgebraPresentation::new(field.clone(), gens.clone(), Vec::new())?;
        let mut rels = Vec::new();
        for r in &self.relations {
            let poly = evaluate(&bare, &r.expr)?;
            let mut degrees: Vec<i32> = poly.terms().iter().map(|(m, _)| bare.monomial_degree(m)).collect();
            degrees.sort_unstable();
            degrees.dedup();
            if degrees.len() > 1 {
                return Err(Error::Inhomogeneous {
                    line: r.line,
                    first: degrees[0],
                    second: degrees[1],
                });
            }
            rels.push(poly);
        }
        AlgebraPresentation::new(field, gens, rels)
    }
}

impl fmt::Display for PresentationDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "field {}", self.field)?;
        for g in &self.generators {
            write!(f, "gen {} {}", g.name, g.degree)?;
            if g.parity == Parity::Odd {
                f.write_str(" odd")?;
            }
            writeln!(f)?;
        }
        for r in &self.relations {
            writeln!(f, "rel {}", r.expr)?;
        }
        Ok(())
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn evaluate<F: Field>(p: &AlgebraPresentation<F>, e: &Expr) -> Result<Polynomial<F>> {
    Ok(match e {
        Expr::Int(n) => p.constant(p.field().from_i64(*n)),
        Expr::Var(v) => {
            let g = p.generator_index(v).ok_or_else(|| Error::UnknownGenerator(v.clone()))?;
            p.variable(g)
        }
        Expr::Sum(terms) => {
            let mut acc = Polynomial::zero();
            for (neg, t) in terms {
                let mut x = evaluate(p, t)?;
                if *neg {
                    x = p.poly_neg(&x);
                }
                acc = p.poly_add(&acc, &x);
            }
            acc
        }
        Expr::Product(factors) => {
            let mut acc = p.constant(p.field().one());
            for x in factors {
                acc = p.poly_mul(&acc, &evaluate(p, x)?);
            }
            acc
        }
        Expr::Pow(base, n) => p.poly_pow(&evaluate(p, base)?, *n),
    })
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Int(i64),
    Ident(String),
    Sym(char),
}

struct ExprParser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    line: usize,
    end_col: usize,
    lex_error: Option<Error>,
}

impl ExprParser {
    fn new(src: &str, line: usize, col0: usize) -> Self {
        let chars: Vec<char> = src.chars().collect();
        let mut tokens = Vec::new();
        let mut lex_error = None;
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = col0 + i;
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                match text.parse() {
                    Ok(n) => tokens.push((Token::Int(n), col)),
                    Err(_) => {
                        lex_error.get_or_insert(parse_error(line, col, "integer literal too large"));
                    }
                }
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                tokens.push((Token::Ident(chars[start..i].iter().collect()), col));
            } else if "+-*^()".contains(c) {
                tokens.push((Token::Sym(c), col));
                i += 1;
            } else {
                lex_error.get_or_insert(parse_error(line, col, format!("unexpected character `{c}`")));
                i += 1;
            }
        }
        ExprParser {
            tokens,
            pos: 0,
            line,
            end_col: col0 + chars.len(),
            lex_error,
        }
    }

    fn parse(mut self) -> Result<Expr> {
        if let Some(e) = self.lex_error.take() {
            return Err(e);
        }
        let e = self.sum()?;
        if let Some((t, col)) = self.tokens.get(self.pos) {
            return Err(parse_error(self.line, *col, format!("unexpected {}", describe(t))));
        }
        Ok(e)
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end_col, |(_, c)| *c)
    }

    fn error(&self, message: &str) -> Error {
        let found = self.peek().map_or("end of line".to_string(), describe);
        parse_error(self.line, self.col(), format!("{message}, found {found}"))
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Token::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut terms = Vec::new();
        let neg = self.eat('-');
        terms.push((neg, self.term()?));
        loop {
            if self.eat('+') {
                terms.push((false, self.term()?));
            } else if self.eat('-') {
                terms.push((true, self.term()?));
            } else {
                break;
            }
        }
        if terms.len() == 1 && !terms[0].0 {
            return Ok(terms.pop().unwrap().1);
        }
        Ok(Expr::Sum(terms))
    }

    fn term(&mut self) -> Result<Expr> {
        let mut factors = vec![self.factor()?];
        while self.eat('*') {
            factors.push(self.factor()?);
        }
        if factors.len() == 1 {
            return Ok(factors.pop().unwrap());
        }
        Ok(Expr::Product(factors))
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        match self.peek() {
            Some(&Token::Int(n)) if n <= u32::MAX as i64 => {
                self.pos += 1;
                Ok(Expr::Pow(Box::new(base), n as u32))
            }
            _ => Err(self.error("expected a nonnegative integer exponent")),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(Token::Int(n)) => {
                self.pos += 1;
                Ok(Expr::Int(n))
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                Ok(Expr::Var(name))
            }
            Some(Token::Sym('(')) => {
                self.pos += 1;
                let e = self.sum()?;
                if !self.eat(')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(e)
            }
            _ => Err(self.error("expected a number, generator or `(`")),
        }
    }
}

fn describe(t: &Token) -> String {
    match t {
        Token::Int(n) => format!("`{n}`"),
        Token::Ident(s) => format!("`{s}`"),
        Token::Sym(c) => format!("`{c}`"),
    }
}
