//! Lexer and recursive-descent parser for `.fst` transducer descriptions.
//!
//! ```text
//! file     := "initial" IDENT statedef{4}
//! statedef := "state" IDENT "{" rule* "}"
//! rule     := "on" expr "->" IDENT ["relabel" IDENT]
//! expr     := and ("||" and)*
//! and      := unary ("&&" unary)*
//! unary    := "!" unary | primary
//! primary  := "(" expr ")" | TEMPORAL "(" expr "," INT ")" | IDENT
//! ```
//!
//! `TEMPORAL` is one of `sustained`, `any_in`, `none_in`. `#` comments run
//! to end of line.

use thiserror::Error;

use super::ast::{FstSpec, GuardExpr, Rule, TemporalOp};
use crate::EngagementState;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{column}: syntax error: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}:{column}: unknown state `{name}`")]
    UnknownState {
        line: usize,
        column: usize,
        name: String,
    },
    #[error("{line}:{column}: state `{name}` defined twice")]
    DuplicateState {
        line: usize,
        column: usize,
        name: String,
    },
    #[error("state `{0}` is not defined")]
    MissingState(EngagementState),
    #[error("{line}:{column}: initial state must be Disengagement, got `{name}`")]
    BadInitial {
        line: usize,
        column: usize,
        name: String,
    },
    #[error("{line}:{column}: temporal window must be at least 1, got {window}")]
    BadWindow {
        line: usize,
        column: usize,
        window: u64,
    },
    #[error("{line}:{column}: temporal operators cannot be nested")]
    NestedTemporal { line: usize, column: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    AndAnd,
    OrOr,
    Bang,
    Arrow,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::AndAnd => "`&&`".into(),
            Tok::OrOr => "`||`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let column = i + 1;
            let push = |out: &mut Vec<Spanned>, tok| {
                out.push(Spanned {
                    tok,
                    line: ln + 1,
                    column,
                })
            };
            let two = |next: char| chars.get(i + 1) == Some(&next);
            match c {
                '#' => break,
                c if c.is_whitespace() => i += 1,
                '(' => {
                    push(&mut out, Tok::LParen);
                    i += 1
                }
                ')' => {
                    push(&mut out, Tok::RParen);
                    i += 1
                }
                '{' => {
                    push(&mut out, Tok::LBrace);
                    i += 1
                }
                '}' => {
                    push(&mut out, Tok::RBrace);
                    i += 1
                }
                ',' => {
                    push(&mut out, Tok::Comma);
                    i += 1
                }
                '!' => {
                    push(&mut out, Tok::Bang);
                    i += 1
                }
                '&' if two('&') => {
                    push(&mut out, Tok::AndAnd);
                    i += 2
                }
                '|' if two('|') => {
                    push(&mut out, Tok::OrOr);
                    i += 2
                }
                '-' if two('>') => {
                    push(&mut out, Tok::Arrow);
                    i += 2
                }
                c if c.is_ascii_digit() => {
                    let start = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    let digits: String = chars[start..i].iter().collect();
                    let n = digits.parse().map_err(|_| ParseError::Syntax {
                        line: ln + 1,
                        column,
                        message: format!("integer `{digits}` out of range"),
                    })?;
                    push(&mut out, Tok::Int(n));
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let start = i;
                    while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                        i += 1;
                    }
                    push(&mut out, Tok::Ident(chars[start..i].iter().collect()));
                }
                other => {
                    return Err(ParseError::Syntax {
                        line: ln + 1,
                        column,
                        message: format!("unexpected character `{other}`"),
                    })
                }
            }
        }
    }
    let line = text.lines().count().max(1);
    let column = text.lines().last().map_or(1, |l| l.chars().count() + 1);
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, at: &Spanned, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            line: at.line,
            column: at.column,
            message: message.into(),
        }
    }

    fn expect(&mut self, want: Tok) -> Result<Spanned, ParseError> {
        let t = self.bump();
        if t.tok == want {
            Ok(t)
        } else {
            Err(self.error(&t, format!("expected {}, found {}", want.describe(), t.tok.describe())))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, Spanned), ParseError> {
        let t = self.bump();
        match &t.tok {
            Tok::Ident(s) => Ok((s.clone(), t)),
            other => Err(self.error(&t, format!("expected {what}, found {}", other.describe()))),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<Spanned, ParseError> {
        let t = self.bump();
        match &t.tok {
            Tok::Ident(s) if s == kw => Ok(t),
            other => Err(self.error(&t, format!("expected `{kw}`, found {}", other.describe()))),
        }
    }

    fn state_name(&mut self) -> Result<(EngagementState, Spanned), ParseError> {
        let (name, at) = self.ident("state name")?;
        match EngagementState::from_name(&name) {
            Some(s) => Ok((s, at)),
            None => Err(ParseError::UnknownState {
                line: at.line,
                column: at.column,
                name,
            }),
        }
    }

    fn file(&mut self) -> Result<FstSpec, ParseError> {
        self.keyword("initial")?;
        let (initial, at) = self.state_name()?;
        if initial != EngagementState::Disengagement {
            return Err(ParseError::BadInitial {
                line: at.line,
                column: at.column,
                name: initial.name().to_string(),
            });
        }
        let mut rules: [Option<Vec<Rule>>; 4] = Default::default();
        while self.peek().tok != Tok::Eof {
            self.keyword("state")?;
            let (state, at) = self.state_name()?;
            if rules[state.index()].is_some() {
                return Err(ParseError::DuplicateState {
                    line: at.line,
                    column: at.column,
                    name: state.name().to_string(),
                });
            }
            self.expect(Tok::LBrace)?;
            let mut list = Vec::new();
            while self.peek().tok != Tok::RBrace {
                list.push(self.rule()?);
            }
            self.expect(Tok::RBrace)?;
            rules[state.index()] = Some(list);
        }
        let mut out: [Vec<Rule>; 4] = Default::default();
        for (slot, state) in rules.into_iter().zip(EngagementState::ALL) {
            out[state.index()] = slot.ok_or(ParseError::MissingState(state))?;
        }
        Ok(FstSpec {
            initial,
            rules: out,
        })
    }

    fn rule(&mut self) -> Result<Rule, ParseError> {
        self.keyword("on")?;
        let guard = self.expr(false)?;
        self.expect(Tok::Arrow)?;
        let (target, _) = self.state_name()?;
        let relabel = match &self.peek().tok {
            Tok::Ident(s) if s == "relabel" => {
                self.bump();
                Some(self.ident("relabel policy")?.0)
            }
            _ => None,
        };
        Ok(Rule {
            guard,
            target,
            relabel,
        })
    }

    fn expr(&mut self, in_temporal: bool) -> Result<GuardExpr, ParseError> {
        let mut lhs = self.and(in_temporal)?;
        while self.peek().tok == Tok::OrOr {
            self.bump();
            let rhs = self.and(in_temporal)?;
            lhs = GuardExpr::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self, in_temporal: bool) -> Result<GuardExpr, ParseError> {
        let mut lhs = self.unary(in_temporal)?;
        while self.peek().tok == Tok::AndAnd {
            self.bump();
            let rhs = self.unary(in_temporal)?;
            lhs = GuardExpr::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self, in_temporal: bool) -> Result<GuardExpr, ParseError> {
        if self.peek().tok == Tok::Bang {
            self.bump();
            return Ok(GuardExpr::not(self.unary(in_temporal)?));
        }
        self.primary(in_temporal)
    }

    fn primary(&mut self, in_temporal: bool) -> Result<GuardExpr, ParseError> {
        let t = self.bump();
        match &t.tok {
            Tok::LParen => {
                let e = self.expr(in_temporal)?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let Some(op) = TemporalOp::from_keyword(name).filter(|_| *self.peek_at(0) == Tok::LParen) else {
                    return Ok(GuardExpr::Signal(name.clone()));
                };
                if in_temporal {
                    return Err(ParseError::NestedTemporal {
                        line: t.line,
                        column: t.column,
                    });
                }
                self.expect(Tok::LParen)?;
                let inner = self.expr(true)?;
                self.expect(Tok::Comma)?;
                let w = self.bump();
                let window = match w.tok {
                    Tok::Int(n) => n,
                    ref other => {
                        return Err(self.error(&w, format!("expected window length, found {}", other.describe())))
                    }
                };
                if window < 1 || window > u64::from(u32::MAX) {
                    return Err(ParseError::BadWindow {
                        line: w.line,
                        column: w.column,
                        window,
                    });
                }
                self.expect(Tok::RParen)?;
                Ok(GuardExpr::temporal(op, inner, window as u32))
            }
            other => Err(self.error(&t, format!("expected expression, found {}", other.describe()))),
        }
    }
}

pub fn parse(text: &str) -> Result<FstSpec, ParseError> {
    let toks = lex(text)?;
    Parser { toks, pos: 0 }.file()
}

/// Parses a standalone guard expression.
pub fn parse_guard(text: &str) -> Result<GuardExpr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr(false)?;
    let t = p.peek().clone();
    if t.tok != Tok::Eof {
        return Err(p.error(&t, format!("unexpected {}", t.tok.describe())));
    }
    Ok(e)
}
