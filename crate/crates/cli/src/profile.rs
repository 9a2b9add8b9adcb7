//! Candidate profiles: `p1: H=1/2,T=1/2; p2: H=1`, one distribution per
//! composition leaf, combined into their independent joint along the tree.
//! `--joint` takes a whole joint distribution instead: `(H, H)=1/2; (T, T)=1/2`.

use std::collections::BTreeMap;

use num_traits::One;
use probgames::compose::{value_ell, DecompositionWitness};
use probgames::dist::{fmt_q, Q};
use probgames::game::EquilibriumSpec;
use probgames::{Dist, ProbOpenGame, Value};
use serde_json::Value as Json;
use thiserror::Error;

use crate::build::Built;
use crate::format::Expr;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProfileError {
    #[error("malformed profile: {0}")]
    Syntax(String),
    #[error("unknown component `{0}`")]
    UnknownComponent(String),
    #[error("component `{0}` is given twice")]
    Duplicate(String),
    #[error("no distribution for component `{0}`")]
    Missing(String),
    #[error("`{strategy}` is not a strategy of `{game}`")]
    UnknownStrategy { game: String, strategy: String },
    #[error("weights of `{game}` sum to {sum}, not 1")]
    NotNormalized { game: String, sum: String },
    #[error("`{0}` is not a valid weight")]
    BadWeight(String),
    #[error("invalid witness: {0}")]
    Witness(String),
}

/// Splits at `sep` outside brackets.
fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

/// Splits at the last `sep` outside brackets.
fn rsplit_top(s: &str, sep: char) -> Option<(&str, &str)> {
    let parts = split_top(s, sep);
    if parts.len() < 2 {
        return None;
    }
    let head = parts[..parts.len() - 1].iter().map(|p| p.len() + sep.len_utf8()).sum::<usize>() - sep.len_utf8();
    Some((&s[..head], &s[head + sep.len_utf8()..]))
}

fn weight(text: &str) -> Result<Q, ProfileError> {
    text.trim().parse::<Q>().map_err(|_| ProfileError::BadWeight(text.trim().to_string()))
}

/// `strategy=weight, ...` over the strategies of `g`.
fn entries(game: &ProbOpenGame, name: &str, body: &str) -> Result<Dist<Value>, ProfileError> {
    let mut acc: BTreeMap<Value, Q> = BTreeMap::new();
    for item in split_top(body, ',') {
        let item = item.trim();
        if item.is_empty() {
            continue;
        }
        let (s, w) = rsplit_top(item, '=').ok_or_else(|| ProfileError::Syntax(format!("expected `strategy=weight`, got `{item}`")))?;
        let sigma = game.strategy_named(s.trim()).ok_or_else(|| ProfileError::UnknownStrategy {
            game: name.to_string(),
            strategy: s.trim().to_string(),
        })?;
        *acc.entry(sigma.clone()).or_default() += weight(w)?;
    }
    normalized(name, acc)
}

fn normalized(name: &str, acc: BTreeMap<Value, Q>) -> Result<Dist<Value>, ProfileError> {
    let sum: Q = acc.values().sum();
    if !sum.is_one() {
        return Err(ProfileError::NotNormalized { game: name.to_string(), sum: fmt_q(&sum) });
    }
    Dist::new(acc).map_err(|e| ProfileError::Syntax(format!("`{name}`: {e}")))
}

/// Parses a factored profile; leaves with a single strategy may be omitted.
pub fn parse_profile(built: &Built, text: &str) -> Result<Vec<Dist<Value>>, ProfileError> {
    let mut given: BTreeMap<String, Dist<Value>> = BTreeMap::new();
    for part in split_top(text, ';') {
        if part.trim().is_empty() {
            continue;
        }
        let (name, body) = part
            .split_once(':')
            .ok_or_else(|| ProfileError::Syntax(format!("expected `name: strategy=weight,...`, got `{}`", part.trim())))?;
        let name = name.trim();
        let leaf = built.leaf(name).ok_or_else(|| ProfileError::UnknownComponent(name.to_string()))?;
        let d = entries(&leaf.game, name, body)?;
        if given.insert(name.to_string(), d).is_some() {
            return Err(ProfileError::Duplicate(name.to_string()));
        }
    }
    built
        .leaves
        .iter()
        .map(|l| match given.remove(&l.name) {
            Some(d) => Ok(d),
            None if l.game.strategies().len() == 1 => Ok(Dist::point(l.game.strategies()[0].clone())),
            None => Err(ProfileError::Missing(l.name.clone())),
        })
        .collect()
}

/// The independent joint of per-leaf distributions, following the tree.
pub fn joint(tree: &Expr, leaves: &[Dist<Value>]) -> Dist<Value> {
    fn go(e: &Expr, leaves: &[Dist<Value>], at: &mut usize) -> Dist<Value> {
        match e {
            Expr::Name(_) => {
                *at += 1;
                leaves[*at - 1].clone()
            }
            Expr::Par(a, b) | Expr::Seq(a, b) => {
                let l = go(a, leaves, at);
                value_ell(&l, &go(b, leaves, at))
            }
        }
    }
    go(tree, leaves, &mut 0)
}

/// A joint distribution over the composite's strategies.
pub fn parse_joint(built: &Built, text: &str) -> Result<Dist<Value>, ProfileError> {
    entries(&built.game, built.game.label(), &split_top(text, ';').join(","))
}

/// One line per leaf: `p1: {H: 1/2, T: 1/2}; p2: {...}`.
pub fn show(built: &Built, leaves: &[Dist<Value>]) -> String {
    built
        .leaves
        .iter()
        .zip(leaves)
        .map(|(l, d)| format!("{}: {d}", l.name))
        .collect::<Vec<_>>()
        .join("; ")
}

fn sequentials(g: &ProbOpenGame, out: &mut Vec<ProbOpenGame>) {
    match g.eq_spec() {
        EquilibriumSpec::Seq(a, b) => {
            out.push((**b).clone());
            sequentials(a, out);
            sequentials(b, out);
        }
        EquilibriumSpec::Par(a, b) => {
            sequentials(a, out);
            sequentials(b, out);
        }
        _ => {}
    }
}

/// Reads `{"branches": {"<state>": {"<strategy>": "<weight>", ...}, ...}}`
/// against the second component of the first sequential node whose states
/// and strategies all resolve.
pub fn parse_witness(built: &Built, json: &Json) -> Result<DecompositionWitness, ProfileError> {
    let branches = json
        .get("branches")
        .and_then(Json::as_object)
        .ok_or_else(|| ProfileError::Witness("expected an object with a `branches` object".into()))?;
    let mut seconds = Vec::new();
    sequentials(&built.game, &mut seconds);
    let mut last = ProfileError::Witness("the game has no sequential composition".into());
    'games: for h in &seconds {
        let mut out = Vec::new();
        for (state, body) in branches {
            let wanted: String = state.chars().filter(|c| !c.is_whitespace()).collect();
            let Some(y) = h
                .states()
                .iter()
                .find(|y| y.to_string().chars().filter(|c| !c.is_whitespace()).collect::<String>() == wanted)
            else {
                last = ProfileError::Witness(format!("`{state}` is not a state of `{}`", h.label()));
                continue 'games;
            };
            let Some(items) = body.as_object() else {
                return Err(ProfileError::Witness(format!("branch `{state}` must be an object")));
            };
            let mut acc = BTreeMap::new();
            for (s, w) in items {
                let w = match w {
                    Json::String(t) => weight(t)?,
                    Json::Number(n) => weight(&n.to_string())?,
                    other => return Err(ProfileError::BadWeight(other.to_string())),
                };
                let Some(sigma) = h.strategy_named(s) else {
                    last = ProfileError::UnknownStrategy { game: h.label().to_string(), strategy: s.clone() };
                    continue 'games;
                };
                *acc.entry(sigma.clone()).or_default() += w;
            }
            out.push((y.clone(), normalized(&format!("branch {state}"), acc)?));
        }
        return Ok(DecompositionWitness::new(out));
    }
    Err(last)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::build::load;
    use probgames::dist::q;

    fn mp() -> Built {
        load(include_str!("../games/matching_pennies.game")).unwrap().1
    }

    #[test]
    fn splitting_respects_brackets() {
        assert_eq!(split_top("a=1,(b, c)=2,[x->y,y->x]=3", ','), ["a=1", "(b, c)=2", "[x->y,y->x]=3"]);
        assert_eq!(rsplit_top("(a, b)=1/2", '='), Some(("(a, b)", "1/2")));
        assert_eq!(rsplit_top("abc", '='), None);
    }

    #[test]
    fn factored_profiles() {
        let b = mp();
        let ds = parse_profile(&b, "p1: H=1/2,T=1/2; p2: H=1").unwrap();
        assert_eq!(ds[0], Dist::uniform(Value::atoms(&["H", "T"])));
        assert_eq!(ds[1], Dist::point(Value::atom("H")));
        assert_eq!(show(&b, &ds), "p1: {H: 1/2, T: 1/2}; p2: {H: 1}");
        let j = joint(&b.tree, &ds);
        assert_eq!(j.weight(&Value::pair(Value::atom("T"), Value::atom("H"))), q(1, 2));
    }

    #[test]
    fn profile_errors() {
        let b = mp();
        assert!(matches!(parse_profile(&b, "p1: H=1/2; p2: H=1"), Err(ProfileError::NotNormalized { .. })));
        assert!(matches!(parse_profile(&b, "p1: H=1"), Err(ProfileError::Missing(_))));
        assert!(matches!(parse_profile(&b, "p3: H=1"), Err(ProfileError::UnknownComponent(_))));
        assert!(matches!(parse_profile(&b, "p1: Q=1; p2: H=1"), Err(ProfileError::UnknownStrategy { .. })));
        assert!(matches!(parse_profile(&b, "p1: H=1; p1: H=1"), Err(ProfileError::Duplicate(_))));
        assert!(matches!(parse_profile(&b, "p1: H=x; p2: H=1"), Err(ProfileError::BadWeight(_))));
        assert!(matches!(parse_profile(&b, "p1 H=1"), Err(ProfileError::Syntax(_))));
    }

    #[test]
    fn joint_profiles() {
        let b = mp();
        let j = parse_joint(&b, "(H, H)=1/2; (T,T)=1/2").unwrap();
        assert_eq!(j.support_len(), 2);
        assert!(parse_joint(&b, "(H, H)=1/2").is_err());
    }

    #[test]
    fn conditioned_strategies_by_name() {
        let b = load(include_str!("../games/market_entry.game")).unwrap().1;
        let ds = parse_profile(&b, "g1: E=1; g2: swap=1").unwrap();
        assert_eq!(ds[1].as_point().unwrap().to_string(), "swap");
        let ds = parse_profile(&b, "g1: E=1; g2: [E->NE,NE->E]=1").unwrap();
        assert_eq!(ds[1].as_point().unwrap().to_string(), "swap");
    }
}
