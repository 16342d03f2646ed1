//! Recursive-descent parser.
//!
//! ```text
//! form := "tt" | "ff" | color "@" nat | VAR | "~" form | form "&" form | form "|" form
//!       | "<" action "@" nat ">" form | "[" action "@" nat "]" form
//!       | ("mu"|"nu") VAR "." form | "%{" nat {"," nat} "}" form | "(" form ")"
//! ```
//!
//! Precedence is `~`/modal/replacement over `&` over `|`; binary operators
//! associate to the left and fixpoints extend as far right as possible.
//! At arity 1 the `@0` suffix may be left out.

use thiserror::Error;

use super::wellformed::{check, FormulaError};
use super::Formula;
use crate::graph::{split_lifted, Signature};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("at byte {pos}: {message}")]
    Name { pos: usize, message: String },
    #[error(transparent)]
    Invalid(#[from] FormulaError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Lower(String),
    Upper(String),
    Nat(usize),
    Sym(&'static str),
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_lowercase() {
            while i < bytes.len()
                && (bytes[i].is_ascii_lowercase()
                    || bytes[i].is_ascii_digit()
                    || bytes[i] == b'_'
                    || bytes[i] == b'@')
            {
                i += 1;
            }
            out.push((start, Tok::Lower(text[start..i].to_string())));
        } else if c.is_ascii_uppercase() {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Upper(text[start..i].to_string())));
        } else if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n = text[start..i].parse().map_err(|_| ParseError::Syntax {
                pos: start,
                message: "number too large".into(),
            })?;
            out.push((start, Tok::Nat(n)));
        } else {
            let sym = match c {
                b'~' => "~",
                b'&' => "&",
                b'|' => "|",
                b'<' => "<",
                b'>' => ">",
                b'[' => "[",
                b']' => "]",
                b'(' => "(",
                b')' => ")",
                b'.' => ".",
                b',' => ",",
                b'}' => "}",
                b'%' if bytes.get(i + 1) == Some(&b'{') => {
                    i += 1;
                    "%{"
                }
                _ => {
                    return Err(ParseError::Syntax {
                        pos: start,
                        message: format!("unexpected character '{}'", text[start..].chars().next().unwrap()),
                    })
                }
            };
            i += 1;
            out.push((start, Tok::Sym(sym)));
        }
    }
    Ok(out)
}

#[derive(Clone, Copy)]
pub(crate) enum NameKind {
    Action,
    Color,
}

/// Resolves a lexed name to `(signature name, index)`.
///
/// `x@i` with `x` in the signature is read as `x` at index `i`; at arity 1 a
/// bare signature name stands for index 0.
pub(crate) fn resolve<'s>(
    token: &str,
    kind: NameKind,
    sig: &'s Signature,
    arity: usize,
) -> Result<(&'s str, usize), String> {
    let names = match kind {
        NameKind::Action => sig.actions(),
        NameKind::Color => sig.colors(),
    };
    let find = |name: &str| names.iter().find(|n| n.as_str() == name).map(String::as_str);
    if let Some((base, index)) = split_lifted(token) {
        if let Some(name) = find(base) {
            return Ok((name, index));
        }
    }
    let what = match kind {
        NameKind::Action => "action",
        NameKind::Color => "color",
    };
    match find(token) {
        Some(name) if arity == 1 => Ok((name, 0)),
        Some(_) => Err(format!("{what} '{token}' needs an explicit index at arity {arity}")),
        None => Err(format!("unknown {what} '{token}'")),
    }
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    sig: &'a Signature,
    arity: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            pos: self.offset(),
            message: message.into(),
        })
    }

    fn eat(&mut self, sym: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(s)) if *s == sym) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, sym: &str) -> Result<(), ParseError> {
        if self.eat(sym) {
            Ok(())
        } else {
            self.error(format!("expected '{sym}'"))
        }
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.conjunction()?;
        while self.eat("|") {
            f = Formula::or(f, self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.unary()?;
        while self.eat("&") {
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn name(&mut self, kind: NameKind) -> Result<(String, usize), ParseError> {
        let pos = self.offset();
        match self.peek().cloned() {
            Some(Tok::Lower(tok)) => {
                self.pos += 1;
                resolve(&tok, kind, self.sig, self.arity)
                    .map(|(n, i)| (n.to_string(), i))
                    .map_err(|message| ParseError::Name { pos, message })
            }
            _ => self.error("expected a name"),
        }
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Sym("~")) => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::Sym("<")) => {
                self.pos += 1;
                let (action, index) = self.name(NameKind::Action)?;
                self.expect(">")?;
                Ok(Formula::diamond(action, index, self.unary()?))
            }
            Some(Tok::Sym("[")) => {
                self.pos += 1;
                let (action, index) = self.name(NameKind::Action)?;
                self.expect("]")?;
                Ok(Formula::boxed(action, index, self.unary()?))
            }
            Some(Tok::Sym("%{")) => {
                self.pos += 1;
                let mut map = Vec::new();
                loop {
                    match self.peek() {
                        Some(Tok::Nat(k)) => {
                            map.push(*k);
                            self.pos += 1;
                        }
                        _ => return self.error("expected a component index"),
                    }
                    if !self.eat(",") {
                        break;
                    }
                }
                self.expect("}")?;
                Ok(Formula::replace(map, self.unary()?))
            }
            Some(Tok::Lower(kw)) if kw == "mu" || kw == "nu" => {
                self.pos += 1;
                let var = match self.peek().cloned() {
                    Some(Tok::Upper(v)) => {
                        self.pos += 1;
                        v
                    }
                    _ => return self.error("expected a fixpoint variable"),
                };
                self.expect(".")?;
                let body = self.disjunction()?;
                Ok(if kw == "mu" {
                    Formula::mu(var, body)
                } else {
                    Formula::nu(var, body)
                })
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Lower(kw)) if kw == "tt" => {
                self.pos += 1;
                Ok(Formula::True)
            }
            Some(Tok::Lower(kw)) if kw == "ff" => {
                self.pos += 1;
                Ok(Formula::False)
            }
            Some(Tok::Lower(_)) => {
                let (color, index) = self.name(NameKind::Color)?;
                Ok(Formula::color(color, index))
            }
            Some(Tok::Upper(v)) => {
                self.pos += 1;
                Ok(Formula::Var(v))
            }
            Some(Tok::Sym("(")) => {
                self.pos += 1;
                let f = self.disjunction()?;
                self.expect(")")?;
                Ok(f)
            }
            Some(_) => self.error("unexpected token"),
            None => self.error("unexpected end of input"),
        }
    }
}

/// Parses `text` as a formula of the given arity over `sig` and validates it.
pub fn parse(text: &str, sig: &Signature, arity: usize) -> Result<Formula, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        end: text.len(),
        sig,
        arity,
    };
    let f = p.disjunction()?;
    if p.pos != p.toks.len() {
        return p.error("trailing input");
    }
    check(&f, sig, arity)?;
    Ok(f)
}
