//! Equilibrium search.
//!
//! - [`support_enumeration`]: two simultaneous decision games, exact.
//! - [`backward_induction`]: a decision game followed by a conditioned one.
//! - [`grid_oracle`]: brute force over a rational grid with an `f64`
//!   evaluator that shares no code with the exact membership engine. It
//!   exists to cross-check the other two.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::compose::value_ell;
use crate::dist::{q_to_f64, simplex_grid, simplex_grid_size, Dist, RationalVec, Q};
use crate::game::{check_equilibrium, EquilibriumSpec, GameError, GameKind, ProbOpenGame, UtilityTable};
use crate::value::Value;

/// Largest move set accepted by [`support_enumeration`].
pub const SUPPORT_ENUM_MAX_MOVES: usize = 4;
/// Largest grid [`grid_oracle`] will enumerate.
pub const GRID_LIMIT: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("unsupported game shape: {0}")]
    UnsupportedShape(String),
    #[error("grid of {size} points exceeds the limit of {limit}")]
    GridTooLarge { size: u128, limit: u128 },
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("solver output failed exact verification: {0}")]
    SelfCheck(String),
}

/// Output of [`support_enumeration`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportEnumResult {
    pub equilibria: Vec<(Dist<Value>, Dist<Value>)>,
    /// Some support pair has a polytope of equilibria, not a single point;
    /// only its vertices are listed.
    pub degenerate: bool,
}

/// Solves `A x = b` exactly; `None` unless the solution exists and is unique.
fn solve_unique(mut a: Vec<Vec<Q>>, mut b: Vec<Q>, nvars: usize) -> Option<Vec<Q>> {
    let rows = a.len();
    let mut r = 0;
    for c in 0..nvars {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            return None;
        };
        a.swap(r, p);
        b.swap(r, p);
        let inv = Q::one() / &a[r][c];
        for j in c..nvars {
            a[r][j] = &a[r][j] * &inv;
        }
        b[r] = &b[r] * &inv;
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..nvars {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
                let t = &f * &b[r];
                b[i] -= t;
            }
        }
        r += 1;
    }
    if (r..rows).any(|i| !b[i].is_zero()) {
        return None;
    }
    Some(b[..nvars].to_vec())
}

/// Vertices of `{ q ∈ Δ(cols) | supp q ⊆ own, (M q)_i = v for i ∈ rival,
/// (M q)_i ≤ v otherwise }`, projected to `q`. `m[i][j]` is the payoff to
/// the rival at rival move `i` and own move `j`.
fn indifference_vertices(m: &[Vec<Q>], own: &[usize], rival: &[usize]) -> Vec<Vec<Q>> {
    let n_own = own.len();
    let nvars = n_own + 1; // weights on `own`, then v
    let mut eq_rows: Vec<(Vec<Q>, Q)> = Vec::new();
    let mut sum = vec![Q::one(); n_own];
    sum.push(Q::zero());
    eq_rows.push((sum, Q::one()));
    for &i in rival {
        let mut row: Vec<Q> = own.iter().map(|&j| m[i][j].clone()).collect();
        row.push(-Q::one());
        eq_rows.push((row, Q::zero()));
    }
    // inequalities as (row, rhs) meaning row·z ≥ rhs
    let mut ineq: Vec<(Vec<Q>, Q)> = Vec::new();
    for j in 0..n_own {
        let mut row = vec![Q::zero(); nvars];
        row[j] = Q::one();
        ineq.push((row, Q::zero()));
    }
    for i in 0..m.len() {
        if rival.contains(&i) {
            continue;
        }
        let mut row: Vec<Q> = own.iter().map(|&j| -m[i][j].clone()).collect();
        row.push(Q::one());
        ineq.push((row, Q::zero()));
    }
    let mut found: BTreeSet<Vec<Q>> = BTreeSet::new();
    for mask in 0u32..(1 << ineq.len()) {
        let tight = mask.count_ones() as usize;
        if eq_rows.len() + tight < nvars {
            continue;
        }
        let mut a: Vec<Vec<Q>> = eq_rows.iter().map(|(r, _)| r.clone()).collect();
        let mut b: Vec<Q> = eq_rows.iter().map(|(_, c)| c.clone()).collect();
        for (t, (row, rhs)) in ineq.iter().enumerate() {
            if mask & (1 << t) != 0 {
                a.push(row.clone());
                b.push(rhs.clone());
            }
        }
        let Some(z) = solve_unique(a, b, nvars) else { continue };
        let feasible = ineq.iter().all(|(row, rhs)| {
            let lhs: Q = row.iter().zip(&z).map(|(x, y)| x * y).sum();
            lhs >= *rhs
        });
        if feasible {
            found.insert(z[..n_own].to_vec());
        }
    }
    found.into_iter().collect()
}

fn subsets(n: usize) -> Vec<Vec<usize>> {
    (1u32..(1 << n))
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
        .collect()
}

fn decision_parts(g: &ProbOpenGame) -> Result<(&ProbOpenGame, usize, &ProbOpenGame, usize), SolveError> {
    let EquilibriumSpec::Par(a, b) = g.eq_spec() else {
        return Err(SolveError::UnsupportedShape(format!(
            "support enumeration needs a parallel composite, got `{}`",
            g.label()
        )));
    };
    let coord = |h: &ProbOpenGame| match h.kind() {
        GameKind::Decision { coord } => Ok(*coord),
        _ => Err(SolveError::UnsupportedShape(format!("`{}` is not a decision game", h.label()))),
    };
    Ok((a, coord(a)?, b, coord(b)?))
}

/// All equilibria of two simultaneous decision games, by support
/// enumeration with exact arithmetic. Every returned pair is re-checked
/// against the exact membership engine.
pub fn support_enumeration(g: &ProbOpenGame, x: &Value, k: &UtilityTable) -> Result<SupportEnumResult, SolveError> {
    let (p1, c1, p2, c2) = decision_parts(g)?;
    let (ys1, ys2) = (p1.moves(), p2.moves());
    if ys1.len() > SUPPORT_ENUM_MAX_MOVES || ys2.len() > SUPPORT_ENUM_MAX_MOVES {
        return Err(SolveError::UnsupportedShape(format!(
            "support enumeration is limited to {SUPPORT_ENUM_MAX_MOVES} moves per player"
        )));
    }
    k.validate(g.moves(), g.utility_dim())?;
    let n1 = p1.utility_dim();
    let mut a = vec![vec![Q::zero(); ys2.len()]; ys1.len()];
    let mut bt = vec![vec![Q::zero(); ys1.len()]; ys2.len()];
    for (i, y1) in ys1.iter().enumerate() {
        for (j, y2) in ys2.iter().enumerate() {
            let r = k.get(&Value::pair(y1.clone(), y2.clone()))?;
            a[i][j] = r[c1].clone();
            bt[j][i] = r[n1 + c2].clone();
        }
    }
    let mut out: BTreeSet<(Dist<Value>, Dist<Value>)> = BTreeSet::new();
    let mut degenerate = false;
    let to_dist = |ys: &[Value], idx: &[usize], w: &[Q]| {
        Dist::new(idx.iter().zip(w).map(|(&i, p)| (ys[i].clone(), p.clone()))).expect("vertex weights form a distribution")
    };
    for s1 in subsets(ys1.len()) {
        for s2 in subsets(ys2.len()) {
            // player 2's mixtures keeping player 1 indifferent on s1, and vice versa
            let qs = indifference_vertices(&a, &s2, &s1);
            if qs.is_empty() {
                continue;
            }
            let ps = indifference_vertices(&bt, &s1, &s2);
            if ps.is_empty() {
                continue;
            }
            if qs.len() > 1 || ps.len() > 1 {
                degenerate = true;
            }
            for p in &ps {
                for qv in &qs {
                    out.insert((to_dist(ys1, &s1, p), to_dist(ys2, &s2, qv)));
                }
            }
        }
    }
    for (d1, d2) in &out {
        if !check_equilibrium(g, x, k, &value_ell(d1, d2))? {
            return Err(SolveError::SelfCheck(format!("({d1}, {d2})")));
        }
    }
    Ok(SupportEnumResult {
        equilibria: out.into_iter().collect(),
        degenerate,
    })
}

/// Subgame-perfect profiles of a decision game followed by a conditioned
/// decision game observing it: every pure profile, plus the uniform mixture
/// over the first mover's ties.
pub fn backward_induction(g: &ProbOpenGame, x: &Value, k: &UtilityTable) -> Result<Vec<(Dist<Value>, Dist<Value>)>, SolveError> {
    let EquilibriumSpec::Seq(first, second) = g.eq_spec() else {
        return Err(SolveError::UnsupportedShape(format!(
            "backward induction needs a sequential composite, got `{}`",
            g.label()
        )));
    };
    let GameKind::Decision { coord: c1 } = first.kind() else {
        return Err(SolveError::UnsupportedShape(format!("`{}` is not a decision game", first.label())));
    };
    let GameKind::Conditioned {
        coord: c2,
        observations,
        moves,
    } = second.kind()
    else {
        return Err(SolveError::UnsupportedShape(format!("`{}` is not a conditioned game", second.label())));
    };
    if observations.as_slice() != first.moves() {
        return Err(SolveError::UnsupportedShape("second game must observe the first game's moves".into()));
    }
    k.validate(g.moves(), g.utility_dim())?;
    let payoff = |y: &Value, m: &Value, c: usize| -> Result<Q, GameError> {
        Ok(k.get(&Value::pair(y.clone(), m.clone()))?[c].clone())
    };
    let argmax = |items: &[Value], f: &dyn Fn(&Value) -> Result<Q, GameError>| -> Result<Vec<Value>, GameError> {
        let mut best: Option<Q> = None;
        let mut out = Vec::new();
        for it in items {
            let v = f(it)?;
            match &best {
                Some(b) if v < *b => {}
                Some(b) if v == *b => out.push(it.clone()),
                _ => {
                    best = Some(v);
                    out = vec![it.clone()];
                }
            }
        }
        Ok(out)
    };
    let mut br: BTreeMap<Value, Vec<Value>> = BTreeMap::new();
    for y in observations {
        br.insert(y.clone(), argmax(moves, &|m| payoff(y, m, *c2))?);
    }
    let perfect: Vec<&Value> = second
        .strategies()
        .iter()
        .filter(|f| observations.iter().all(|y| f.apply(y).is_some_and(|m| br[y].contains(m))))
        .collect();
    let mut out = Vec::new();
    for f in perfect {
        let best = argmax(first.moves(), &|y| payoff(y, f.apply(y).expect("total table"), *c1))?;
        for y in &best {
            out.push((Dist::point(y.clone()), Dist::point(f.clone())));
        }
        if best.len() > 1 {
            out.push((Dist::uniform(best.clone()), Dist::point(f.clone())));
        }
    }
    for (d1, d2) in &out {
        if !check_equilibrium(g, x, k, &value_ell(d1, d2))? {
            return Err(SolveError::SelfCheck(format!("({d1}, {d2})")));
        }
    }
    Ok(out)
}

/// Exact re-entry into the membership engine.
pub fn verify(g: &ProbOpenGame, x: &Value, k: &UtilityTable, candidate: &Dist<Value>) -> Result<bool, SolveError> {
    Ok(check_equilibrium(g, x, k, candidate)?)
}

/// A grid point: one distribution per leaf, left to right, and their
/// independent joint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridPoint {
    pub leaves: Vec<Dist<Value>>,
    pub joint: Dist<Value>,
}

/// A candidate shaped like the composition tree, with float weights.
#[derive(Clone, Debug)]
enum Profile {
    Leaf(Vec<(Value, f64)>),
    Pair(Box<Profile>, Box<Profile>),
}

impl Profile {
    fn weights(&self) -> &[(Value, f64)] {
        match self {
            Profile::Leaf(w) => w,
            Profile::Pair(..) => panic!("composite profile has no leaf weights"),
        }
    }

    /// The marginal over joint strategies, as float weights.
    fn flatten(&self) -> Vec<(Value, f64)> {
        match self {
            Profile::Leaf(w) => w.clone(),
            Profile::Pair(a, b) => {
                let (fa, fb) = (a.flatten(), b.flatten());
                let mut out = Vec::with_capacity(fa.len() * fb.len());
                for (s, p) in &fa {
                    for (t, q) in &fb {
                        out.push((Value::pair(s.clone(), t.clone()), p * q));
                    }
                }
                out
            }
        }
    }
}

/// Float view of a utility table.
type FloatTable = BTreeMap<Value, Vec<f64>>;

fn to_float(k: &UtilityTable) -> FloatTable {
    k.iter()
        .map(|(y, r)| (y.clone(), r.components().iter().map(q_to_f64).collect()))
        .collect()
}

fn fget<'a>(k: &'a FloatTable, y: &Value) -> Result<&'a Vec<f64>, GameError> {
    k.get(y).ok_or_else(|| GameError::MissingUtility(y.to_string()))
}

fn to_rational(v: &[f64]) -> RationalVec {
    // coutility functions only accept rationals; binary floats convert exactly
    RationalVec::new(v.iter().map(|x| Q::from_float(*x).unwrap_or_else(Q::zero)).collect())
}

/// The ε-best strategies of a support-characterized leaf.
fn leaf_best(g: &ProbOpenGame, k: &FloatTable, eps: f64) -> Result<Option<BTreeSet<Value>>, GameError> {
    let top = |vals: &[f64]| vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    match g.kind() {
        GameKind::Decision { coord } => {
            let vals: Vec<f64> = g.moves().iter().map(|y| fget(k, y).map(|r| r[*coord])).collect::<Result<_, _>>()?;
            let m = top(&vals);
            Ok(Some(
                g.moves()
                    .iter()
                    .zip(&vals)
                    .filter(|(_, v)| **v >= m - eps)
                    .map(|(y, _)| y.clone())
                    .collect(),
            ))
        }
        GameKind::Conditioned {
            coord,
            observations,
            moves,
        } => {
            let mut ok_moves: BTreeMap<&Value, BTreeSet<&Value>> = BTreeMap::new();
            for o in observations {
                let vals: Vec<f64> = moves
                    .iter()
                    .map(|m| fget(k, &Value::pair(o.clone(), m.clone())).map(|r| r[*coord]))
                    .collect::<Result<_, _>>()?;
                let t = top(&vals);
                ok_moves.insert(o, moves.iter().zip(&vals).filter(|(_, v)| **v >= t - eps).map(|(m, _)| m).collect());
            }
            Ok(Some(
                g.strategies()
                    .iter()
                    .filter(|f| observations.iter().all(|o| f.apply(o).is_some_and(|m| ok_moves[o].contains(m))))
                    .cloned()
                    .collect(),
            ))
        }
        GameKind::Identity | GameKind::Unit | GameKind::Structural => Ok(Some(g.strategies().iter().cloned().collect())),
        _ => Ok(None),
    }
}

fn float_member(g: &ProbOpenGame, x: &Value, k: &FloatTable, phi: &Profile, eps: f64) -> Result<bool, SolveError> {
    if let Some(best) = leaf_best(g, k, eps)? {
        return Ok(phi.weights().iter().all(|(s, w)| *w <= 0.0 || best.contains(s)));
    }
    let (p1, p2) = match phi {
        Profile::Pair(a, b) => (a.as_ref(), b.as_ref()),
        Profile::Leaf(_) => return Err(SolveError::UnsupportedShape(format!("`{}` has no grid", g.label()))),
    };
    match (g.kind(), g.eq_spec()) {
        (GameKind::Par, EquilibriumSpec::Par(a, b)) => {
            let (x1, x2) = x.as_pair().ok_or_else(|| GameError::NotAPair(x.to_string()))?;
            let n1 = a.utility_dim();
            let (f1, f2) = (p1.flatten(), p2.flatten());
            let mut k1 = FloatTable::new();
            for y1 in a.moves() {
                let mut acc = vec![0.0; n1];
                for (s2, w) in &f2 {
                    let r = fget(k, &Value::pair(y1.clone(), b.play(s2, x2)))?;
                    for (c, v) in acc.iter_mut().enumerate() {
                        *v += w * r[c];
                    }
                }
                k1.insert(y1.clone(), acc);
            }
            let mut k2 = FloatTable::new();
            for y2 in b.moves() {
                let mut acc = vec![0.0; b.utility_dim()];
                for (s1, w) in &f1 {
                    let r = fget(k, &Value::pair(a.play(s1, x1), y2.clone()))?;
                    for (c, v) in acc.iter_mut().enumerate() {
                        *v += w * r[n1 + c];
                    }
                }
                k2.insert(y2.clone(), acc);
            }
            Ok(float_member(a, x1, &k1, p1, eps)? && float_member(b, x2, &k2, p2, eps)?)
        }
        (GameKind::Seq, EquilibriumSpec::Seq(a, h)) => {
            let (f1, f2) = (p1.flatten(), p2.flatten());
            let mut kg = FloatTable::new();
            for y in a.moves() {
                let mut acc = vec![0.0; a.utility_dim()];
                for (s, w) in &f2 {
                    let r = fget(k, &h.play(s, y))?;
                    let back = h.coutility(s, y, &to_rational(r));
                    for (c, v) in acc.iter_mut().enumerate() {
                        *v += w * q_to_f64(&back[c]);
                    }
                }
                kg.insert(y.clone(), acc);
            }
            if !float_member(a, x, &kg, p1, eps)? {
                return Ok(false);
            }
            let mut alpha: BTreeMap<Value, f64> = BTreeMap::new();
            for (s, w) in &f1 {
                if *w > 0.0 {
                    *alpha.entry(a.play(s, x)).or_insert(0.0) += w;
                }
            }
            if alpha.len() == 1 {
                let y = alpha.keys().next().expect("nonempty");
                return float_member(h, y, k, p2, eps);
            }
            let Some(sets) = alpha
                .keys()
                .map(|_| leaf_best(h, k, eps))
                .collect::<Result<Option<Vec<_>>, _>>()?
            else {
                return Err(SolveError::UnsupportedShape(format!(
                    "`{}` is not support characterized and the mixed state is not a point mass",
                    h.label()
                )));
            };
            Ok(hall_condition(&alpha.values().cloned().collect::<Vec<_>>(), &sets, &f2, eps))
        }
        _ => Err(SolveError::UnsupportedShape(format!("`{}` has no grid evaluator", g.label()))),
    }
}

/// Transportation feasibility by the supply condition: every set `T` of
/// demanded strategies must be coverable by the branches admitting some
/// strategy in `T`.
fn hall_condition(supplies: &[f64], sets: &[BTreeSet<Value>], demand: &[(Value, f64)], eps: f64) -> bool {
    let demand: Vec<&(Value, f64)> = demand.iter().filter(|(_, w)| *w > 0.0).collect();
    for mask in 1u64..(1u64 << demand.len()) {
        let chosen: Vec<&Value> = (0..demand.len()).filter(|i| mask & (1 << i) != 0).map(|i| &demand[i].0).collect();
        let need: f64 = (0..demand.len()).filter(|i| mask & (1 << i) != 0).map(|i| demand[i].1).sum();
        let cover: f64 = supplies
            .iter()
            .zip(sets)
            .filter(|(_, s)| chosen.iter().any(|c| s.contains(*c)))
            .map(|(p, _)| *p)
            .sum();
        if need > cover + eps {
            return false;
        }
    }
    true
}

fn grid_size(g: &ProbOpenGame, n: u32) -> Result<u128, SolveError> {
    match (g.kind(), g.eq_spec()) {
        (GameKind::Par | GameKind::Seq, EquilibriumSpec::Par(a, b) | EquilibriumSpec::Seq(a, b)) => {
            Ok(grid_size(a, n)?.saturating_mul(grid_size(b, n)?))
        }
        (GameKind::Decision { .. } | GameKind::Conditioned { .. } | GameKind::Identity | GameKind::Unit | GameKind::Structural, _) => {
            Ok(simplex_grid_size(g.strategies().len(), n))
        }
        _ => Err(SolveError::UnsupportedShape(format!("`{}` has no grid evaluator", g.label()))),
    }
}

fn grid_points(g: &ProbOpenGame, n: u32) -> Vec<(Vec<Dist<Value>>, Profile)> {
    match g.eq_spec() {
        EquilibriumSpec::Par(a, b) | EquilibriumSpec::Seq(a, b) if matches!(g.kind(), GameKind::Par | GameKind::Seq) => {
            let (ga, gb) = (grid_points(a, n), grid_points(b, n));
            let mut out = Vec::with_capacity(ga.len() * gb.len());
            for (la, pa) in &ga {
                for (lb, pb) in &gb {
                    let mut leaves = la.clone();
                    leaves.extend(lb.iter().cloned());
                    out.push((leaves, Profile::Pair(Box::new(pa.clone()), Box::new(pb.clone()))));
                }
            }
            out
        }
        _ => simplex_grid(g.strategies(), n)
            .into_iter()
            .map(|d| {
                let w = d.iter().map(|(s, p)| (s.clone(), q_to_f64(p))).collect();
                (vec![d], Profile::Leaf(w))
            })
            .collect(),
    }
}

fn joint_of(g: &ProbOpenGame, leaves: &[Dist<Value>]) -> (Dist<Value>, usize) {
    match g.eq_spec() {
        EquilibriumSpec::Par(a, b) | EquilibriumSpec::Seq(a, b) if matches!(g.kind(), GameKind::Par | GameKind::Seq) => {
            let (ja, used) = joint_of(a, leaves);
            let (jb, used_b) = joint_of(b, &leaves[used..]);
            (value_ell(&ja, &jb), used + used_b)
        }
        _ => (leaves[0].clone(), 1),
    }
}

/// Approximate equilibria on the grid of weights with denominator `n`,
/// with payoff comparisons relaxed by `eps`. Composite games are searched
/// over products of per-leaf grids.
pub fn grid_oracle(g: &ProbOpenGame, x: &Value, k: &UtilityTable, n: u32, eps: f64) -> Result<Vec<GridPoint>, SolveError> {
    if n == 0 {
        return Err(SolveError::UnsupportedShape("grid resolution must be positive".into()));
    }
    let size = grid_size(g, n)?;
    if size > GRID_LIMIT {
        return Err(SolveError::GridTooLarge { size, limit: GRID_LIMIT });
    }
    if !g.has_state(x) {
        return Err(GameError::UnknownState(x.to_string()).into());
    }
    k.validate(g.moves(), g.utility_dim())?;
    let kf = to_float(k);
    let points = grid_points(g, n);
    let verdicts: Vec<Result<bool, SolveError>> = points.par_iter().map(|(_, p)| float_member(g, x, &kf, p, eps)).collect();
    let mut out = Vec::new();
    for ((leaves, _), v) in points.into_iter().zip(verdicts) {
        if v? {
            let (joint, _) = joint_of(g, &leaves);
            out.push(GridPoint { leaves, joint });
        }
    }
    Ok(out)
}

/// Whether every weight of `d` is a multiple of `1/n`.
pub fn on_grid(d: &Dist<Value>, n: u32) -> bool {
    let n = Q::from_integer(n.into());
    d.iter().all(|(_, w)| (w * &n).is_integer() && !w.is_negative())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compose::{par, seq};
    use crate::dist::{q, VecAlgebra};
    use crate::game::{conditioned_decision_game, decision_game};

    fn a(s: &str) -> Value {
        Value::atom(s)
    }

    fn ht() -> Vec<Value> {
        Value::atoms(&["H", "T"])
    }

    fn x0() -> Value {
        Value::pair(Value::Unit, Value::Unit)
    }

    fn bimatrix(r1: &[Value], r2: &[Value], pay: &[[i64; 2]]) -> (ProbOpenGame, UtilityTable) {
        let g = par(
            &decision_game(r1.to_vec(), VecAlgebra::new(1), 0).unwrap().with_label("p1"),
            &decision_game(r2.to_vec(), VecAlgebra::new(1), 0).unwrap().with_label("p2"),
        );
        let mut entries = Vec::new();
        let mut it = pay.iter();
        for y1 in r1 {
            for y2 in r2 {
                let p = it.next().unwrap();
                entries.push((Value::pair(y1.clone(), y2.clone()), RationalVec::from_ints(p)));
            }
        }
        (g, UtilityTable::new(entries))
    }

    fn mp() -> (ProbOpenGame, UtilityTable) {
        bimatrix(&ht(), &ht(), &[[-1, 1], [1, -1], [1, -1], [-1, 1]])
    }

    #[test]
    fn linear_solve() {
        let a = vec![vec![q(1, 1), q(1, 1)], vec![q(1, 1), q(-1, 1)]];
        assert_eq!(solve_unique(a.clone(), vec![q(1, 1), q(0, 1)], 2), Some(vec![q(1, 2), q(1, 2)]));
        let singular = vec![vec![q(1, 1), q(1, 1)], vec![q(2, 1), q(2, 1)]];
        assert_eq!(solve_unique(singular, vec![q(1, 1), q(2, 1)], 2), None);
        let inconsistent = vec![vec![q(1, 1)], vec![q(1, 1)]];
        assert_eq!(solve_unique(inconsistent, vec![q(1, 1), q(2, 1)], 1), None);
    }

    #[test]
    fn matching_pennies_has_one_mixed_equilibrium() {
        let (g, k) = mp();
        let r = support_enumeration(&g, &x0(), &k).unwrap();
        let u = Dist::uniform(ht());
        assert_eq!(r.equilibria, vec![(u.clone(), u)]);
        assert!(!r.degenerate);
    }

    #[test]
    fn dominant_strategies() {
        // prisoner's dilemma with D dominant for both
        let cd = Value::atoms(&["C", "D"]);
        let (g, k) = bimatrix(&cd, &cd, &[[-1, -1], [-3, 0], [0, -3], [-2, -2]]);
        let r = support_enumeration(&g, &x0(), &k).unwrap();
        assert_eq!(r.equilibria, vec![(Dist::point(a("D")), Dist::point(a("D")))]);
    }

    #[test]
    fn zero_game_is_degenerate() {
        let (g, k) = bimatrix(&ht(), &ht(), &[[0, 0]; 4]);
        let r = support_enumeration(&g, &x0(), &k).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.equilibria.len(), 4);
        assert!(r.equilibria.iter().all(|(p, q)| p.as_point().is_some() && q.as_point().is_some()));
    }

    #[test]
    fn support_enumeration_rejects_other_shapes() {
        let g = decision_game(ht(), VecAlgebra::new(1), 0).unwrap();
        let k = UtilityTable::from_fn(&ht(), |_| RationalVec::from_ints(&[0]));
        assert!(matches!(support_enumeration(&g, &Value::Unit, &k), Err(SolveError::UnsupportedShape(_))));
    }

    fn market_entry(pay: [[i64; 2]; 4]) -> (ProbOpenGame, UtilityTable) {
        let ys = Value::atoms(&["E", "NE"]);
        let g1 = decision_game(ys.clone(), VecAlgebra::new(2), 0).unwrap().with_label("g1");
        let g2 = conditioned_decision_game(ys.clone(), ys.clone(), VecAlgebra::new(2), 1).unwrap().with_label("g2");
        let g = seq(&g1, &g2).unwrap();
        let mut entries = Vec::new();
        let mut i = 0;
        for y in &ys {
            for m in &ys {
                entries.push((Value::pair(y.clone(), m.clone()), RationalVec::from_ints(&pay[i])));
                i += 1;
            }
        }
        (g, UtilityTable::new(entries))
    }

    #[test]
    fn market_entry_backward_induction() {
        // order: (E,E), (E,NE), (NE,E), (NE,NE)
        let (g, k) = market_entry([[-10, -10], [5, 0], [0, 5], [0, 0]]);
        let r = backward_induction(&g, &Value::Unit, &k).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].0, Dist::point(a("E")));
        assert_eq!(r[0].1.as_point().unwrap().to_string(), "swap");
    }

    #[test]
    fn backward_induction_with_a_tie() {
        // the second mover is indifferent after NE, so two functions survive
        let (g, k) = market_entry([[-10, -10], [5, 0], [0, 0], [0, 0]]);
        let r = backward_induction(&g, &Value::Unit, &k).unwrap();
        let fs: BTreeSet<String> = r.iter().map(|(_, f)| f.as_point().unwrap().to_string()).collect();
        assert_eq!(fs, ["swap", "const_NE"].iter().map(|s| s.to_string()).collect());
    }

    #[test]
    fn constant_payoffs_make_everything_perfect() {
        let (g, k) = market_entry([[1, 1]; 4]);
        let r = backward_induction(&g, &Value::Unit, &k).unwrap();
        // 4 functions x 2 pure entries, plus a tie mixture for each function
        assert_eq!(r.len(), 12);
    }

    #[test]
    fn grid_finds_matching_pennies() {
        let (g, k) = mp();
        let u = Dist::uniform(ht());
        let r2 = grid_oracle(&g, &x0(), &k, 2, 1e-9).unwrap();
        assert_eq!(r2.len(), 1);
        assert_eq!(r2[0].leaves, vec![u.clone(), u.clone()]);
        let r4 = grid_oracle(&g, &x0(), &k, 4, 0.0).unwrap();
        assert_eq!(r4.len(), 1);
        assert_eq!(r4[0].joint, value_ell(&u, &u));
    }

    #[test]
    fn grid_of_zero_game_is_everything() {
        let (g, k) = bimatrix(&ht(), &ht(), &[[0, 0]; 4]);
        assert_eq!(grid_oracle(&g, &x0(), &k, 2, 1e-9).unwrap().len(), 9);
    }

    #[test]
    fn grid_on_market_entry_agrees_with_backward_induction() {
        let (g, k) = market_entry([[-10, -10], [5, 0], [0, 5], [0, 0]]);
        let r = grid_oracle(&g, &Value::Unit, &k, 4, 1e-9).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].leaves[0], Dist::point(a("E")));
    }

    #[test]
    fn grid_guard() {
        let many: Vec<Value> = (0..9).map(|i| Value::atom(&format!("m{i}"))).collect();
        let g = par(
            &decision_game(many.clone(), VecAlgebra::new(1), 0).unwrap(),
            &decision_game(many.clone(), VecAlgebra::new(1), 0).unwrap(),
        );
        let k = UtilityTable::from_fn(g.moves(), |_| RationalVec::from_ints(&[0, 0]));
        assert!(matches!(grid_oracle(&g, &x0(), &k, 12, 1e-9), Err(SolveError::GridTooLarge { .. })));
    }

    #[test]
    fn perturbed_matching_pennies_fails_verification() {
        let (g, k) = mp();
        let u = Dist::uniform(ht());
        assert!(verify(&g, &x0(), &k, &value_ell(&u, &u)).unwrap());
        let off = Dist::new(vec![(a("H"), q(51, 100)), (a("T"), q(49, 100))]).unwrap();
        assert!(!verify(&g, &x0(), &k, &value_ell(&off, &u)).unwrap());
    }
}
