//! Concrete syntax.
//!
//! ```text
//! formula := disj
//! disj    := conj ("|" conj)*
//! conj    := unary ("&" unary)*
//! unary   := "!" unary | "K" "{" ids "}" unary | "C" "{" ids "}" unary
//!          | atom | "(" formula ")"
//! ids     := id ("," id)*
//! ```
//!
//! Binary connectives associate to the left. `K{i}` and `C{i}` denote the same
//! operator; rendering uses `K` for singleton groups.

use std::collections::BTreeSet;

use super::{Formula, FormulaError};
use crate::model::{InteractionModel, PlayerId};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Not,
    And,
    Or,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Not => "`!`".into(),
        Tok::And => "`&`".into(),
        Tok::Or => "`|`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::LBrace => "`{`".into(),
        Tok::RBrace => "`}`".into(),
        Tok::Comma => "`,`".into(),
        Tok::End => "end of input".into(),
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, FormulaError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'!' => Tok::Not,
            b'&' => Tok::And,
            b'|' => Tok::Or,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'{' => Tok::LBrace,
            b'}' => Tok::RBrace,
            b',' => Tok::Comma,
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
                continue;
            }
            _ => {
                return Err(FormulaError::Syntax {
                    pos: i,
                    expected: vec!["a formula token".into()],
                    found: format!("`{}`", text[i..].chars().next().unwrap_or(' ')),
                })
            }
        };
        out.push((i, tok));
        i += 1;
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    model: &'a InteractionModel,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn peek2(&self) -> &Tok {
        self.toks
            .get(self.at + 1)
            .map(|t| &t.1)
            .unwrap_or(&Tok::End)
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T, FormulaError> {
        Err(FormulaError::Syntax {
            pos: self.pos(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: describe(self.peek()),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<(), FormulaError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.fail(&[&describe(&tok)])
        }
    }

    fn disj(&mut self) -> Result<Formula, FormulaError> {
        let mut f = self.conj()?;
        while *self.peek() == Tok::Or {
            self.bump();
            f = Formula::or(f, self.conj()?);
        }
        Ok(f)
    }

    fn conj(&mut self) -> Result<Formula, FormulaError> {
        let mut f = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn group(&mut self) -> Result<Vec<PlayerId>, FormulaError> {
        let open = self.pos();
        self.expect(Tok::LBrace)?;
        let mut group = BTreeSet::new();
        if *self.peek() == Tok::RBrace {
            return Err(FormulaError::EmptyGroup { pos: open });
        }
        loop {
            let pos = self.pos();
            let Tok::Ident(name) = self.peek().clone() else {
                return self.fail(&["a player name"]);
            };
            self.bump();
            let p = self
                .model
                .player_by_name(&name)
                .ok_or(FormulaError::UnknownSymbol { name, pos })?;
            group.insert(p);
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                Tok::RBrace => {
                    self.bump();
                    return Ok(group.into_iter().collect());
                }
                _ => return self.fail(&["`,`", "`}`"]),
            }
        }
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let f = self.disj()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(name) if (name == "K" || name == "C") && *self.peek2() == Tok::LBrace => {
                self.bump();
                let group = self.group()?;
                Ok(Formula::Ck(group, Box::new(self.unary()?)))
            }
            Tok::Ident(name) => {
                self.bump();
                let a = self
                    .model
                    .atom_by_name(&name)
                    .ok_or(FormulaError::UnknownSymbol { name, pos })?;
                Ok(Formula::Atom(a))
            }
            _ => self.fail(&["`!`", "`(`", "`K{`", "`C{`", "an atom"]),
        }
    }
}

/// Parses `text`, resolving names against `model`.
pub fn parse(text: &str, model: &InteractionModel) -> Result<Formula, FormulaError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
        model,
    };
    let f = p.disj()?;
    if *p.peek() != Tok::End {
        return p.fail(&["`&`", "`|`", "end of input"]);
    }
    Ok(f)
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Level {
    Disj,
    Conj,
    Unary,
}

fn level(f: &Formula) -> Level {
    match f {
        Formula::Or(..) => Level::Disj,
        Formula::And(..) => Level::Conj,
        _ => Level::Unary,
    }
}

fn write(f: &Formula, model: &InteractionModel, ctx: Level, out: &mut String) {
    if level(f) < ctx {
        out.push('(');
        write(f, model, Level::Disj, out);
        out.push(')');
        return;
    }
    match f {
        Formula::Atom(a) => out.push_str(model.atom_name(*a)),
        Formula::Not(g) => {
            out.push('!');
            write(g, model, Level::Unary, out);
        }
        Formula::Ck(group, g) => {
            let names: Vec<&str> = group.iter().map(|&p| model.player_name(p)).collect();
            out.push(if group.len() == 1 { 'K' } else { 'C' });
            out.push('{');
            out.push_str(&names.join(","));
            out.push_str("} ");
            write(g, model, Level::Unary, out);
        }
        Formula::And(l, r) => {
            write(l, model, Level::Conj, out);
            out.push_str(" & ");
            write(r, model, Level::Unary, out);
        }
        Formula::Or(l, r) => {
            write(l, model, Level::Disj, out);
            out.push_str(" | ");
            write(r, model, Level::Conj, out);
        }
    }
}

/// Canonical text; `parse(render(f)) == f`.
pub fn render(f: &Formula, model: &InteractionModel) -> String {
    let mut out = String::new();
    write(f, model, Level::Disj, &mut out);
    out
}
