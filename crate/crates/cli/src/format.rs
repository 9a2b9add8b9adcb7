//! The game description format.
//!
//! One declaration per line, `#` starts a comment:
//!
//! ```text
//! game p1 decision moves=H,T payoff=0
//! game g2 conditioned obs=E,NE moves=E,NE payoff=1
//! game pass identity states=a,b
//! game flip structural map=a->b,b->a perm=0
//! compose (par p1 p2)
//! utility (H, T) = (1, -1)
//! state *
//! ```
//!
//! `payoff=i` indexes the composite payoff vector; each leaf's own payoff
//! dimension is recovered from the composition (see [`crate::build`]).

use std::fmt;

use probgames::dist::{fmt_q, Q};
use thiserror::Error;

use crate::build;

/// A diagnostic with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FileError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: invalid game: {msg}")]
    Validation { line: usize, col: usize, msg: String },
}

/// A source position; `line = 0` means "not from a file".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl Pos {
    pub fn invalid(self, msg: impl Into<String>) -> FileError {
        FileError::Validation {
            line: self.line,
            col: self.col,
            msg: msg.into(),
        }
    }

    fn syntax(self, msg: impl Into<String>) -> FileError {
        FileError::Parse {
            line: self.line,
            col: self.col,
            msg: msg.into(),
        }
    }
}

/// A symbolic value: an atom, `*`, or a parenthesized pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Term {
    Atom(String),
    Unit,
    Pair(Box<Term>, Box<Term>),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Atom(a) => write!(f, "{a}"),
            Term::Unit => write!(f, "*"),
            Term::Pair(a, b) => write!(f, "({a}, {b})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeclKind {
    Decision { moves: Vec<Term>, payoff: usize },
    Conditioned { obs: Vec<Term>, moves: Vec<Term>, payoff: usize },
    Identity { states: Vec<Term> },
    Structural { map: Vec<(Term, Term)>, perm: Option<Vec<usize>> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameDecl {
    pub name: String,
    pub kind: DeclKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Name(String),
    Par(Box<Expr>, Box<Expr>),
    Seq(Box<Expr>, Box<Expr>),
}

impl Expr {
    /// Leaf names, left to right.
    pub fn leaves(&self) -> Vec<&str> {
        match self {
            Expr::Name(n) => vec![n.as_str()],
            Expr::Par(a, b) | Expr::Seq(a, b) => {
                let mut out = a.leaves();
                out.extend(b.leaves());
                out
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Name(n) => write!(f, "{n}"),
            Expr::Par(a, b) => write!(f, "(par {a} {b})"),
            Expr::Seq(a, b) => write!(f, "(seq {a} {b})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UtilityLine {
    pub moves: Term,
    pub payoff: Vec<Q>,
}

/// A parsed and validated game file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameExpr {
    pub games: Vec<GameDecl>,
    pub compose: Expr,
    pub utility: Vec<UtilityLine>,
    pub state: Option<Term>,
}

/// Source positions of the pieces validation may complain about.
#[derive(Debug, Clone, Default)]
pub struct Spans {
    pub games: Vec<Pos>,
    pub compose: Pos,
    pub compose_names: Vec<(String, Pos)>,
    pub utility: Vec<Pos>,
    pub state: Pos,
}

// ---- lexer ----

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    LParen,
    RParen,
    Comma,
    Eq,
    Arrow,
    Minus,
    Slash,
    Star,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Word(w) => write!(f, "`{w}`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Eq => write!(f, "`=`"),
            Tok::Arrow => write!(f, "`->`"),
            Tok::Minus => write!(f, "`-`"),
            Tok::Slash => write!(f, "`/`"),
            Tok::Star => write!(f, "`*`"),
        }
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\'' || c == '.'
}

fn lex(line: usize, text: &str) -> Result<Vec<(Tok, Pos)>, FileError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col: i + 1 };
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '=' => Tok::Eq,
            '/' => Tok::Slash,
            '*' => Tok::Star,
            '-' if chars.get(i + 1) == Some(&'>') => {
                i += 1;
                Tok::Arrow
            }
            '-' => Tok::Minus,
            c if is_word_char(c) => {
                let start = i;
                while i + 1 < chars.len() && is_word_char(chars[i + 1]) {
                    i += 1;
                }
                Tok::Word(chars[start..=i].iter().collect())
            }
            other => return Err(pos.syntax(format!("unexpected character `{other}`"))),
        };
        out.push((tok, pos));
        i += 1;
    }
    Ok(out)
}

// ---- parser ----

struct Cursor {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    eol: Pos,
}

impl Cursor {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.at).map(|(_, p)| *p).unwrap_or(self.eol)
    }

    fn next(&mut self, what: &str) -> Result<(Tok, Pos), FileError> {
        match self.toks.get(self.at) {
            Some(t) => {
                self.at += 1;
                Ok(t.clone())
            }
            None => Err(self.eol.syntax(format!("expected {what}, found end of line"))),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<Pos, FileError> {
        let (t, p) = self.next(&tok.to_string())?;
        if t == tok {
            Ok(p)
        } else {
            Err(p.syntax(format!("expected {tok}, found {t}")))
        }
    }

    fn word(&mut self, what: &str) -> Result<(String, Pos), FileError> {
        match self.next(what)? {
            (Tok::Word(w), p) => Ok((w, p)),
            (t, p) => Err(p.syntax(format!("expected {what}, found {t}"))),
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn done(&self) -> Result<(), FileError> {
        match self.toks.get(self.at) {
            None => Ok(()),
            Some((t, p)) => Err(p.syntax(format!("unexpected {t} at end of declaration"))),
        }
    }

    fn term(&mut self) -> Result<Term, FileError> {
        match self.next("a value")? {
            (Tok::Word(w), _) => Ok(Term::Atom(w)),
            (Tok::Star, _) => Ok(Term::Unit),
            (Tok::LParen, _) => {
                let a = self.term()?;
                self.expect(Tok::Comma)?;
                let b = self.term()?;
                let p = self.pos();
                if self.peek() == Some(&Tok::Comma) {
                    return Err(p.syntax("tuples are pairs; nest them as `(a, (b, c))`"));
                }
                self.expect(Tok::RParen)?;
                Ok(Term::Pair(Box::new(a), Box::new(b)))
            }
            (t, p) => Err(p.syntax(format!("expected a value, found {t}"))),
        }
    }

    fn term_list(&mut self) -> Result<Vec<Term>, FileError> {
        let mut out = vec![self.term()?];
        while self.eat(&Tok::Comma) {
            out.push(self.term()?);
        }
        Ok(out)
    }

    fn index(&mut self) -> Result<usize, FileError> {
        let (w, p) = self.word("an index")?;
        w.parse().map_err(|_| p.syntax(format!("expected a nonnegative integer, found `{w}`")))
    }

    fn rational(&mut self) -> Result<Q, FileError> {
        let p = self.pos();
        let neg = self.eat(&Tok::Minus);
        let (n, np) = self.word("a number")?;
        let mut text = format!("{}{n}", if neg { "-" } else { "" });
        if self.eat(&Tok::Slash) {
            let (d, _) = self.word("a denominator")?;
            text = format!("{text}/{d}");
        }
        let _ = np;
        text.parse::<Q>().map_err(|_| p.syntax(format!("`{text}` is not a rational number")))
    }

    fn expr(&mut self, names: &mut Vec<(String, Pos)>) -> Result<Expr, FileError> {
        match self.next("a game name or `(`")? {
            (Tok::Word(w), p) => {
                names.push((w.clone(), p));
                Ok(Expr::Name(w))
            }
            (Tok::LParen, _) => {
                let (op, p) = self.word("`par` or `seq`")?;
                let a = self.expr(names)?;
                let b = self.expr(names)?;
                self.expect(Tok::RParen)?;
                match op.as_str() {
                    "par" => Ok(Expr::Par(Box::new(a), Box::new(b))),
                    "seq" => Ok(Expr::Seq(Box::new(a), Box::new(b))),
                    _ => Err(p.syntax(format!("expected `par` or `seq`, found `{op}`"))),
                }
            }
            (t, p) => Err(p.syntax(format!("expected a game name or `(`, found {t}"))),
        }
    }
}

/// `key=value` attributes, each parsed by the caller once its key is known.
fn attributes(
    c: &mut Cursor,
    mut on: impl FnMut(&str, Pos, &mut Cursor) -> Result<bool, FileError>,
) -> Result<(), FileError> {
    while c.peek().is_some() {
        let (key, p) = c.word("an attribute")?;
        c.expect(Tok::Eq)?;
        if !on(&key, p, c)? {
            return Err(p.syntax(format!("unknown attribute `{key}`")));
        }
    }
    Ok(())
}

fn required<T>(v: Option<T>, key: &str, at: Pos) -> Result<T, FileError> {
    v.ok_or_else(|| at.syntax(format!("missing attribute `{key}=`")))
}

fn game_line(c: &mut Cursor) -> Result<GameDecl, FileError> {
    let (name, _) = c.word("a game name")?;
    let (kind, kp) = c.word("a game kind")?;
    let at = c.eol;
    let once = |slot: bool, key: &str, p: Pos| if slot { Err(p.syntax(format!("duplicate attribute `{key}`"))) } else { Ok(()) };
    let kind = match kind.as_str() {
        "decision" => {
            let (mut moves, mut payoff) = (None, None);
            attributes(c, |k, p, c| {
                match k {
                    "moves" => { once(moves.is_some(), k, p)?; moves = Some(c.term_list()?) }
                    "payoff" => { once(payoff.is_some(), k, p)?; payoff = Some(c.index()?) }
                    _ => return Ok(false),
                }
                Ok(true)
            })?;
            DeclKind::Decision { moves: required(moves, "moves", at)?, payoff: required(payoff, "payoff", at)? }
        }
        "conditioned" => {
            let (mut obs, mut moves, mut payoff) = (None, None, None);
            attributes(c, |k, p, c| {
                match k {
                    "obs" => { once(obs.is_some(), k, p)?; obs = Some(c.term_list()?) }
                    "moves" => { once(moves.is_some(), k, p)?; moves = Some(c.term_list()?) }
                    "payoff" => { once(payoff.is_some(), k, p)?; payoff = Some(c.index()?) }
                    _ => return Ok(false),
                }
                Ok(true)
            })?;
            DeclKind::Conditioned {
                obs: required(obs, "obs", at)?,
                moves: required(moves, "moves", at)?,
                payoff: required(payoff, "payoff", at)?,
            }
        }
        "identity" => {
            let mut states = None;
            attributes(c, |k, p, c| {
                if k != "states" {
                    return Ok(false);
                }
                once(states.is_some(), k, p)?;
                states = Some(c.term_list()?);
                Ok(true)
            })?;
            DeclKind::Identity { states: required(states, "states", at)? }
        }
        "structural" => {
            let (mut map, mut perm) = (None, None);
            attributes(c, |k, p, c| {
                match k {
                    "map" => {
                        once(map.is_some(), k, p)?;
                        let mut pairs = Vec::new();
                        loop {
                            let a = c.term()?;
                            c.expect(Tok::Arrow)?;
                            pairs.push((a, c.term()?));
                            if !c.eat(&Tok::Comma) {
                                break;
                            }
                        }
                        map = Some(pairs);
                    }
                    "perm" => {
                        once(perm.is_some(), k, p)?;
                        let mut idx = vec![c.index()?];
                        while c.eat(&Tok::Comma) {
                            idx.push(c.index()?);
                        }
                        perm = Some(idx);
                    }
                    _ => return Ok(false),
                }
                Ok(true)
            })?;
            DeclKind::Structural { map: required(map, "map", at)?, perm }
        }
        other => {
            return Err(kp.syntax(format!(
                "unknown game kind `{other}`; expected decision, conditioned, identity or structural"
            )))
        }
    };
    Ok(GameDecl { name, kind })
}

/// Parses without validating; [`parse_game_file`] is the usual entry point.
pub fn parse_unchecked(text: &str) -> Result<(GameExpr, Spans), FileError> {
    let mut games = Vec::new();
    let mut compose: Option<Expr> = None;
    let mut utility = Vec::new();
    let mut state = None;
    let mut spans = Spans::default();
    let mut last = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last = line;
        let toks = lex(line, raw)?;
        if toks.is_empty() {
            continue;
        }
        let mut c = Cursor {
            toks,
            at: 0,
            eol: Pos { line, col: raw.trim_end().chars().count() + 1 },
        };
        let (kw, kp) = c.word("a declaration keyword")?;
        match kw.as_str() {
            "game" => {
                games.push(game_line(&mut c)?);
                spans.games.push(kp);
            }
            "compose" => {
                if compose.is_some() {
                    return Err(kp.invalid("more than one `compose` line"));
                }
                let mut names = Vec::new();
                compose = Some(c.expr(&mut names)?);
                spans.compose = kp;
                spans.compose_names = names;
            }
            "utility" => {
                let moves = c.term()?;
                c.expect(Tok::Eq)?;
                c.expect(Tok::LParen)?;
                let mut payoff = vec![c.rational()?];
                while c.eat(&Tok::Comma) {
                    payoff.push(c.rational()?);
                }
                c.expect(Tok::RParen)?;
                utility.push(UtilityLine { moves, payoff });
                spans.utility.push(kp);
            }
            "state" => {
                if state.is_some() {
                    return Err(kp.invalid("more than one `state` line"));
                }
                state = Some(c.term()?);
                spans.state = kp;
            }
            other => {
                return Err(kp.syntax(format!(
                    "unknown keyword `{other}`; expected game, compose, utility or state"
                )))
            }
        }
        c.done()?;
    }
    let compose = compose.ok_or_else(|| Pos { line: last.max(1), col: 1 }.invalid("no `compose` line"))?;
    Ok((GameExpr { games, compose, utility, state }, spans))
}

/// Parses and validates a game file.
pub fn parse_game_file(text: &str) -> Result<GameExpr, FileError> {
    let (expr, spans) = parse_unchecked(text)?;
    build::build_with_spans(&expr, &spans)?;
    Ok(expr)
}

fn join_terms(ts: &[Term]) -> String {
    ts.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(",")
}

/// Canonical text of a game file; parsing it gives back an equal `GameExpr`.
pub fn serialize(g: &GameExpr) -> String {
    let mut out = String::new();
    for d in &g.games {
        let body = match &d.kind {
            DeclKind::Decision { moves, payoff } => format!("decision moves={} payoff={payoff}", join_terms(moves)),
            DeclKind::Conditioned { obs, moves, payoff } => {
                format!("conditioned obs={} moves={} payoff={payoff}", join_terms(obs), join_terms(moves))
            }
            DeclKind::Identity { states } => format!("identity states={}", join_terms(states)),
            DeclKind::Structural { map, perm } => {
                let m: Vec<String> = map.iter().map(|(a, b)| format!("{a}->{b}")).collect();
                let mut s = format!("structural map={}", m.join(","));
                if let Some(p) = perm {
                    let p: Vec<String> = p.iter().map(|i| i.to_string()).collect();
                    s.push_str(&format!(" perm={}", p.join(",")));
                }
                s
            }
        };
        out.push_str(&format!("game {} {body}\n", d.name));
    }
    out.push_str(&format!("compose {}\n", g.compose));
    for u in &g.utility {
        let r: Vec<String> = u.payoff.iter().map(fmt_q).collect();
        out.push_str(&format!("utility {} = ({})\n", u.moves, r.join(", ")));
    }
    if let Some(s) = &g.state {
        out.push_str(&format!("state {s}\n"));
    }
    out
}
