use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use super::ast::{Card, CycleKind, Node, SetKeyword, SpecSystem};
use crate::scalar::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}, column {column}: reference to undefined class `{name}`")]
    UndefinedClass {
        line: usize,
        column: usize,
        name: String,
    },
    #[error("line {line}, column {column}: malformed cardinality constraint: {message}")]
    Cardinality {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}, column {column}: class `{name}` is defined twice")]
    Duplicate {
        line: usize,
        column: usize,
        name: String,
    },
}

impl ParseError {
    pub fn position(&self) -> (usize, usize) {
        match self {
            ParseError::Syntax { line, column, .. }
            | ParseError::UndefinedClass { line, column, .. }
            | ParseError::Cardinality { line, column, .. }
            | ParseError::Duplicate { line, column, .. } => (*line, *column),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Comma,
    Eq,
    Ge,
    Le,
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Int(n) => format!("`{n}`"),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Slash => "`/`".into(),
        Tok::Caret => "`^`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Eq => "`=`".into(),
        Tok::Ge => "`>=`".into(),
        Tok::Le => "`<=`".into(),
        Tok::End => "end of line".into(),
    }
}

const KEYWORDS: &[&str] = &[
    "Z",
    "SEQ",
    "SET",
    "MSET",
    "CYCLE",
    "UCYCLE",
    "EXP",
    "LOG",
    "SUBST",
    "TABLE",
    "labelled",
    "unlabelled",
    "extern",
];

fn lex(text: &str, line: usize) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), col));
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            out.push((Tok::Int(digits.parse().expect("decimal digits")), col));
            continue;
        }
        let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        let tok = match (c, two.as_str()) {
            (_, ">=") => Tok::Ge,
            (_, "<=") => Tok::Le,
            ('(', _) => Tok::LParen,
            (')', _) => Tok::RParen,
            ('+', _) => Tok::Plus,
            ('-', _) => Tok::Minus,
            ('*', _) => Tok::Star,
            ('/', _) => Tok::Slash,
            ('^', _) => Tok::Caret,
            (',', _) => Tok::Comma,
            ('=', _) => Tok::Eq,
            _ => {
                return Err(ParseError::Syntax {
                    line,
                    column: col,
                    message: format!("unexpected character `{c}`"),
                })
            }
        };
        i += if matches!(tok, Tok::Ge | Tok::Le) {
            2
        } else {
            1
        };
        out.push((tok, col));
    }
    out.push((Tok::End, chars.len() + 1));
    Ok(out)
}

/// One item of a product before scalars are folded in.
enum Factor {
    Literal(Rational),
    Node(Node),
}

struct LineParser<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    line: usize,
    refs: Vec<(String, usize, usize)>,
}

impl<'a> LineParser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn column(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            line: self.line,
            column: self.column(),
            message: message.into(),
        })
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            self.syntax(format!(
                "expected {}, found {}",
                describe(&want),
                describe(self.peek())
            ))
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    terms.push(self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    let t = self.term()?;
                    terms.push(Node::Scalar(-Rational::one(), Box::new(t)));
                }
                _ => break,
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().expect("one term")
        } else {
            Node::Union(terms)
        })
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut items = vec![self.factor()?];
        while *self.peek() == Tok::Star {
            self.bump();
            items.push(self.factor()?);
        }
        let lhs = fold_product(items);
        if *self.peek() != Tok::Slash {
            return Ok(lhs);
        }
        self.bump();
        let rhs = match self.factor()? {
            Factor::Node(n) => n,
            Factor::Literal(c) => Node::Scalar(c, Box::new(Node::Epsilon)),
        };
        if matches!(self.peek(), Tok::Star | Tok::Slash) {
            return self.syntax("parenthesize the operands of `/`");
        }
        Ok(Node::Quotient(Box::new(lhs), Box::new(rhs)))
    }

    /// `( [-] INT [/INT] )` directly ahead? A fraction literal has no space
    /// after the slash, so `(1 / 2)` stays a quotient of expressions.
    fn literal_ahead(&self) -> bool {
        if *self.peek() != Tok::LParen {
            return false;
        }
        let mut k = 1;
        if *self.peek_at(k) == Tok::Minus {
            k += 1;
        }
        if !matches!(self.peek_at(k), Tok::Int(_)) {
            return false;
        }
        k += 1;
        if *self.peek_at(k) == Tok::Slash {
            let col = |j: usize| self.toks[(self.pos + j).min(self.toks.len() - 1)].1;
            if !matches!(self.peek_at(k + 1), Tok::Int(_)) || col(k + 1) != col(k) + 1 {
                return false;
            }
            k += 2;
        }
        *self.peek_at(k) == Tok::RParen
    }

    fn literal(&mut self) -> Result<Rational, ParseError> {
        self.expect(Tok::LParen)?;
        let negative = *self.peek() == Tok::Minus;
        if negative {
            self.bump();
        }
        let Tok::Int(num) = self.bump() else {
            unreachable!("checked by literal_ahead")
        };
        let mut den = BigInt::one();
        if *self.peek() == Tok::Slash {
            self.bump();
            if let Tok::Int(d) = self.peek().clone() {
                if d.is_zero() {
                    return self.syntax("zero denominator");
                }
                den = d;
            }
            self.bump();
        }
        self.expect(Tok::RParen)?;
        let q = Rational::new(num, den);
        Ok(if negative { -q } else { q })
    }

    fn factor(&mut self) -> Result<Factor, ParseError> {
        let base = if self.literal_ahead() {
            Factor::Literal(self.literal()?)
        } else if let Tok::Int(n) = self.peek().clone() {
            self.bump();
            if n.is_one() {
                Factor::Node(Node::Epsilon)
            } else {
                Factor::Literal(Rational::from_integer(n))
            }
        } else {
            Factor::Node(self.primary()?)
        };
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        let Factor::Node(node) = base else {
            return self.syntax("a number cannot be raised to a power");
        };
        self.bump();
        if self.literal_ahead() {
            let r = self.literal()?;
            return Ok(Factor::Node(Node::Pow(Box::new(node), r)));
        }
        match self.bump() {
            Tok::Int(k) => {
                let k: usize = match k.try_into() {
                    Ok(k) if k <= 64 => k,
                    _ => return self.syntax("integer exponent too large"),
                };
                Ok(Factor::Node(match k {
                    0 => Node::Epsilon,
                    1 => node,
                    _ => Node::Product(vec![node; k]),
                }))
            }
            t => self.syntax(format!("expected an exponent, found {}", describe(&t))),
        }
    }

    fn primary(&mut self) -> Result<Node, ParseError> {
        let col = self.column();
        match self.bump() {
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => self.named(name, col),
            t => Err(ParseError::Syntax {
                line: self.line,
                column: col,
                message: format!("expected a term, found {}", describe(&t)),
            }),
        }
    }

    fn named(&mut self, name: String, col: usize) -> Result<Node, ParseError> {
        let one_arg = |p: &mut Self| -> Result<Node, ParseError> {
            p.expect(Tok::LParen)?;
            let e = p.expr()?;
            p.expect(Tok::RParen)?;
            Ok(e)
        };
        Ok(match name.as_str() {
            "Z" => Node::Atom,
            "SEQ" => {
                let (card, arg) = self.constructor_args()?;
                Node::Seq(Box::new(arg), card)
            }
            "SET" | "MSET" => {
                let (card, arg) = self.constructor_args()?;
                let kw = if name == "SET" {
                    SetKeyword::Set
                } else {
                    SetKeyword::Mset
                };
                Node::Set(Box::new(arg), card, kw)
            }
            "CYCLE" | "UCYCLE" => {
                let (card, arg) = self.constructor_args()?;
                let kind = if name == "CYCLE" {
                    CycleKind::Directed
                } else {
                    CycleKind::Undirected
                };
                Node::Cycle(Box::new(arg), card, kind)
            }
            "EXP" => Node::Exp(Box::new(one_arg(self)?)),
            "LOG" => Node::Log(Box::new(one_arg(self)?)),
            "SUBST" => {
                self.expect(Tok::LParen)?;
                let f = self.expr()?;
                self.expect(Tok::Comma)?;
                let g = self.expr()?;
                self.expect(Tok::RParen)?;
                Node::Subst(Box::new(f), Box::new(g))
            }
            "TABLE" => {
                self.expect(Tok::LParen)?;
                let Tok::Ident(t) = self.peek().clone() else {
                    return self.syntax("TABLE expects a table name");
                };
                self.bump();
                self.expect(Tok::RParen)?;
                Node::Table(t)
            }
            kw if KEYWORDS.contains(&kw) => {
                return Err(ParseError::Syntax {
                    line: self.line,
                    column: col,
                    message: format!("`{kw}` cannot appear here"),
                })
            }
            _ => {
                self.refs.push((name.clone(), self.line, col));
                Node::Ref(name)
            }
        })
    }

    fn constructor_args(&mut self) -> Result<(Card, Node), ParseError> {
        self.expect(Tok::LParen)?;
        let mut card = Card::any();
        let mut seen_min = false;
        let mut seen_max = false;
        while matches!(self.peek(), Tok::Ge | Tok::Le | Tok::Eq) {
            let col = self.column();
            let line = self.line;
            let bad = move |message: &str| ParseError::Cardinality {
                line,
                column: col,
                message: message.to_string(),
            };
            let op = self.bump();
            let Tok::Int(k) = self.peek().clone() else {
                return Err(bad("expected a nonnegative integer bound"));
            };
            self.bump();
            let k: usize = k.try_into().map_err(|_| bad("bound too large"))?;
            match op {
                Tok::Ge if !seen_min => {
                    card.min = k;
                    seen_min = true;
                }
                Tok::Le if !seen_max => {
                    card.max = Some(k);
                    seen_max = true;
                }
                Tok::Eq if !seen_min && !seen_max => {
                    card = Card::exactly(k);
                    seen_min = true;
                    seen_max = true;
                }
                _ => return Err(bad("bound given twice")),
            }
            if *self.peek() != Tok::Comma {
                return Err(bad("expected `,` after the bound"));
            }
            self.bump();
            if card.max.is_some_and(|m| m < card.min) {
                return Err(bad("upper bound below lower bound"));
            }
        }
        let arg = self.expr()?;
        self.expect(Tok::RParen)?;
        Ok((card, arg))
    }
}

/// Fold `a * b * (c) * d` into nodes: a literal scales everything to its
/// right.
fn fold_product(mut items: Vec<Factor>) -> Node {
    let split = items
        .iter()
        .position(|f| matches!(f, Factor::Literal(_)))
        .unwrap_or(items.len());
    let tail = items.split_off(split);
    let mut nodes: Vec<Node> = items
        .into_iter()
        .map(|f| match f {
            Factor::Node(n) => n,
            Factor::Literal(_) => unreachable!("split before the first literal"),
        })
        .collect();
    if !tail.is_empty() {
        let mut tail = tail.into_iter();
        let Some(Factor::Literal(c)) = tail.next() else {
            unreachable!("tail starts with a literal")
        };
        let rest: Vec<Factor> = tail.collect();
        let inner = if rest.is_empty() {
            Node::Epsilon
        } else {
            fold_product(rest)
        };
        nodes.push(Node::Scalar(c, Box::new(inner)));
    }
    if nodes.len() == 1 {
        nodes.pop().expect("one factor")
    } else {
        Node::Product(nodes)
    }
}

fn is_class_name(s: &str) -> bool {
    !KEYWORDS.contains(&s)
}

/// Parse a specification. Lines hold one definition `Name = expr` each;
/// `#` starts a comment; the first line may begin with `labelled` or
/// `unlabelled` (the default); `extern Name` is shorthand for
/// `Name = TABLE(Name)`.
pub fn parse_spec(text: &str) -> Result<SpecSystem, ParseError> {
    parse_spec_with_externals(text, &[])
}

/// As [`parse_spec`], with `externals` predeclared as table-backed classes.
pub fn parse_spec_with_externals(text: &str, externals: &[&str]) -> Result<SpecSystem, ParseError> {
    let mut system = SpecSystem {
        labelled: false,
        definitions: externals
            .iter()
            .map(|e| (e.to_string(), Node::Table(e.to_string())))
            .collect(),
    };
    let mut refs = Vec::new();
    let mut header_allowed = true;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks = lex(content, line)?;
        let mut p = LineParser {
            toks: &toks,
            pos: 0,
            line,
            refs: Vec::new(),
        };
        if *p.peek() == Tok::End {
            continue;
        }
        if header_allowed {
            if let Tok::Ident(h) = p.peek() {
                if h == "labelled" || h == "unlabelled" {
                    system.labelled = h == "labelled";
                    p.bump();
                }
            }
            header_allowed = false;
            if *p.peek() == Tok::End {
                continue;
            }
        }
        let col = p.column();
        let Tok::Ident(name) = p.bump() else {
            return Err(ParseError::Syntax {
                line,
                column: col,
                message: "expected a class name".into(),
            });
        };
        let (name, col, node) = if name == "extern" {
            let col = p.column();
            let Tok::Ident(ext) = p.bump() else {
                return p.syntax("expected a class name after `extern`");
            };
            (ext.clone(), col, Node::Table(ext))
        } else {
            p.expect(Tok::Eq)?;
            let node = p.expr()?;
            (name, col, node)
        };
        if *p.peek() != Tok::End {
            return p.syntax(format!("unexpected {}", describe(p.peek())));
        }
        if !is_class_name(&name) {
            return Err(ParseError::Syntax {
                line,
                column: col,
                message: format!("`{name}` is reserved"),
            });
        }
        if system.index_of(&name).is_some() {
            return Err(ParseError::Duplicate {
                line,
                column: col,
                name,
            });
        }
        refs.append(&mut p.refs);
        system.definitions.push((name, node));
    }
    if let Some((name, line, column)) = refs
        .into_iter()
        .find(|(n, _, _)| system.index_of(n).is_none())
    {
        return Err(ParseError::UndefinedClass { line, column, name });
    }
    Ok(system)
}
