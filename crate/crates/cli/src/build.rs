//! Turning a parsed [`GameExpr`] into an engine game.
//!
//! Payoff indices in a file address the composite payoff vector. Every
//! subtree owns a contiguous block of coordinates: `seq` children share
//! their parent's block, `par` splits it after the last coordinate the left
//! child refers to. A leaf's payoff dimension is its block's width.

use std::collections::{BTreeMap, BTreeSet};

use probgames::dist::{RationalVec, VecAlgebra};
use probgames::game::{structural_game, Bijection, CoordPerm};
use probgames::{
    conditioned_decision_game, decision_game, identity_game, par, seq, GameError, ProbOpenGame, UtilityTable,
    Value,
};

use crate::format::{DeclKind, Expr, FileError, GameDecl, GameExpr, Pos, Spans, Term};

/// A composition leaf, in left-to-right order.
#[derive(Clone, Debug)]
pub struct Leaf {
    pub name: String,
    pub game: ProbOpenGame,
}

/// A ready-to-query game with its utility table and initial state.
#[derive(Clone, Debug)]
pub struct Built {
    pub game: ProbOpenGame,
    pub leaves: Vec<Leaf>,
    pub table: UtilityTable,
    pub state: Value,
    pub dim: usize,
    pub tree: Expr,
}

impl Built {
    pub fn leaf(&self, name: &str) -> Option<&Leaf> {
        self.leaves.iter().find(|l| l.name == name)
    }
}

pub fn term_value(t: &Term) -> Value {
    match t {
        Term::Atom(a) => Value::atom(a),
        Term::Unit => Value::Unit,
        Term::Pair(a, b) => Value::pair(term_value(a), term_value(b)),
    }
}

fn values(ts: &[Term]) -> Vec<Value> {
    ts.iter().map(term_value).collect()
}

fn payoff_ref(d: &GameDecl) -> Option<usize> {
    match d.kind {
        DeclKind::Decision { payoff, .. } | DeclKind::Conditioned { payoff, .. } => Some(payoff),
        _ => None,
    }
}

/// Builds with positions unknown; see [`build_with_spans`].
pub fn build(expr: &GameExpr) -> Result<Built, FileError> {
    build_with_spans(expr, &Spans::default())
}

/// Parses, validates and builds a game file.
pub fn load(text: &str) -> Result<(GameExpr, Built), FileError> {
    let (expr, spans) = crate::format::parse_unchecked(text)?;
    let built = build_with_spans(&expr, &spans)?;
    Ok((expr, built))
}

struct Ctx<'a> {
    decls: BTreeMap<&'a str, (usize, &'a GameDecl)>,
    spans: &'a Spans,
}

impl Ctx<'_> {
    fn decl_pos(&self, i: usize) -> Pos {
        self.spans.games.get(i).copied().unwrap_or_default()
    }

    fn refs(&self, e: &Expr) -> Vec<usize> {
        e.leaves().iter().filter_map(|n| payoff_ref(self.decls[n].1)).collect()
    }

    fn node(&self, e: &Expr, lo: usize, hi: usize, leaves: &mut Vec<Leaf>) -> Result<ProbOpenGame, FileError> {
        let at = self.spans.compose;
        match e {
            Expr::Name(n) => {
                let (i, d) = self.decls[n.as_str()];
                let g = self.leaf(d, lo, hi).map_err(|e| self.decl_pos(i).invalid(format!("game `{n}`: {e}")))?;
                let g = g.with_label(n);
                leaves.push(Leaf { name: n.clone(), game: g.clone() });
                Ok(g)
            }
            Expr::Seq(a, b) => {
                let ga = self.node(a, lo, hi, leaves)?;
                let gb = self.node(b, lo, hi, leaves)?;
                seq(&ga, &gb).map_err(|err| at.invalid(format!("in `{e}`: {err}")))
            }
            Expr::Par(a, b) => {
                let (ra, rb) = (self.refs(a), self.refs(b));
                let mid = match (ra.iter().max(), rb.iter().min()) {
                    (Some(&m), Some(&r)) if r <= m => {
                        return Err(at.invalid(format!(
                            "in `{e}`: payoff indices of the right component must follow those of the left"
                        )))
                    }
                    (Some(&m), _) => m + 1,
                    (None, Some(&r)) => r,
                    (None, None) => lo,
                };
                Ok(par(&self.node(a, lo, mid, leaves)?, &self.node(b, mid, hi, leaves)?))
            }
        }
    }

    fn leaf(&self, d: &GameDecl, lo: usize, hi: usize) -> Result<ProbOpenGame, GameError> {
        let alg = VecAlgebra::new(hi - lo);
        let local = |p: usize| {
            if p < lo || p >= hi {
                Err(GameError::BadCoordinate { coord: p, dim: hi })
            } else {
                Ok(p - lo)
            }
        };
        match &d.kind {
            DeclKind::Decision { moves, payoff } => decision_game(values(moves), alg, local(*payoff)?),
            DeclKind::Conditioned { obs, moves, payoff } => {
                conditioned_decision_game(values(obs), values(moves), alg, local(*payoff)?)
            }
            DeclKind::Identity { states } => identity_game(values(states), alg),
            DeclKind::Structural { map, perm } => {
                let fx = Bijection::from_pairs(map.iter().map(|(a, b)| (term_value(a), term_value(b))))?;
                let fs = match perm {
                    Some(p) if p.len() != hi - lo => {
                        return Err(GameError::DimensionMismatch { expected: hi - lo, found: p.len() })
                    }
                    Some(p) => CoordPerm::new(p.clone())?,
                    None => CoordPerm::identity(hi - lo),
                };
                structural_game(&fx, &fs)
            }
        }
    }
}

pub fn build_with_spans(expr: &GameExpr, spans: &Spans) -> Result<Built, FileError> {
    let mut decls = BTreeMap::new();
    for (i, d) in expr.games.iter().enumerate() {
        let at = spans.games.get(i).copied().unwrap_or_default();
        if decls.insert(d.name.as_str(), (i, d)).is_some() {
            return Err(at.invalid(format!("game `{}` is declared more than once", d.name)));
        }
    }
    let mut used = BTreeSet::new();
    for (k, n) in expr.compose.leaves().into_iter().enumerate() {
        let at = spans.compose_names.get(k).map(|(_, p)| *p).unwrap_or(spans.compose);
        if !decls.contains_key(n) {
            return Err(at.invalid(format!("unknown game `{n}`")));
        }
        if !used.insert(n) {
            return Err(at.invalid(format!("game `{n}` is used more than once in the composition")));
        }
    }
    let ctx = Ctx { decls, spans };

    // the payoff dimension comes from the utility table
    let first_util = spans.utility.first().copied().unwrap_or(spans.compose);
    let dim = match expr.utility.first() {
        Some(u) => u.payoff.len(),
        None => return Err(first_util.invalid("no `utility` lines; the utility table must be total")),
    };
    for (i, u) in expr.utility.iter().enumerate() {
        if u.payoff.len() != dim {
            let at = spans.utility.get(i).copied().unwrap_or_default();
            return Err(at.invalid(format!("payoff has {} components, expected {dim}", u.payoff.len())));
        }
    }
    if let Some(r) = ctx.refs(&expr.compose).into_iter().find(|&r| r >= dim) {
        return Err(spans.compose.invalid(format!("payoff index {r} out of range for {dim}-player payoffs")));
    }

    let mut leaves = Vec::new();
    let game = ctx.node(&expr.compose, 0, dim, &mut leaves)?;

    let mut entries = BTreeMap::new();
    for (i, u) in expr.utility.iter().enumerate() {
        let at = spans.utility.get(i).copied().unwrap_or_default();
        let y = term_value(&u.moves);
        if !game.moves().contains(&y) {
            return Err(at.invalid(format!("`{y}` is not a move of the composed game")));
        }
        if entries.insert(y.clone(), RationalVec::new(u.payoff.clone())).is_some() {
            return Err(at.invalid(format!("duplicate utility entry for `{y}`")));
        }
    }
    if let Some(y) = game.moves().iter().find(|y| !entries.contains_key(*y)) {
        return Err(first_util.invalid(format!("utility table has no entry for move `{y}`")));
    }
    let table = UtilityTable::new(entries);

    let state = match &expr.state {
        Some(t) => {
            let x = term_value(t);
            if !game.has_state(&x) {
                return Err(spans.state.invalid(format!("`{x}` is not a state of the composed game")));
            }
            x
        }
        None if game.states().len() == 1 => game.states()[0].clone(),
        None => {
            return Err(spans
                .compose
                .invalid(format!("the composed game has {} states; add a `state` line", game.states().len())))
        }
    };
    Ok(Built { game, leaves, table, state, dim, tree: expr.compose.clone() })
}
