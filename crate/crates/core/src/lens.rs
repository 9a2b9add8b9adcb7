//! Lenses `(X, S) -> (Y, R)`: a view `X -> Y` and an update `X × R -> S`.
//!
//! `X`, `Y` are finite value sets and `S`, `R` are rational vector spaces,
//! so equality is extensional: every point of `X` against a fixed family of
//! sample vectors in `R`.

use std::fmt;
use std::sync::Arc;

use crate::dist::{q, RationalVec};
use crate::game::{GameError, ProbOpenGame};
use crate::value::Value;

/// One side of a lens: a finite set of points and a payoff dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Boundary {
    pub points: Vec<Value>,
    pub dim: usize,
}

impl Boundary {
    pub fn new(mut points: Vec<Value>, dim: usize) -> Boundary {
        points.sort();
        points.dedup();
        Boundary { points, dim }
    }
}

pub type ViewFn = Arc<dyn Fn(&Value) -> Value + Send + Sync>;
pub type UpdateFn = Arc<dyn Fn(&Value, &RationalVec) -> RationalVec + Send + Sync>;
pub type VecFn = Arc<dyn Fn(&RationalVec) -> RationalVec + Send + Sync>;

#[derive(Clone)]
pub struct Lens {
    /// `(X, S)`: `points` is `X`, `dim` is that of `S`.
    pub src: Boundary,
    /// `(Y, R)`.
    pub dst: Boundary,
    pub view: ViewFn,
    pub update: UpdateFn,
}

impl fmt::Debug for Lens {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Lens").field("src", &self.src).field("dst", &self.dst).finish()
    }
}

impl Lens {
    pub fn identity(points: Vec<Value>, dim: usize) -> Lens {
        let b = Boundary::new(points, dim);
        Lens {
            src: b.clone(),
            dst: b,
            view: Arc::new(|x| x.clone()),
            update: Arc::new(|_, r| r.clone()),
        }
    }

    pub fn view(&self, x: &Value) -> Value {
        (self.view)(x)
    }

    pub fn update(&self, x: &Value, r: &RationalVec) -> RationalVec {
        (self.update)(x, r)
    }

    /// Extensional equality on `src.points × sample_vectors(dst.dim)`.
    pub fn ext_eq(&self, other: &Lens) -> bool {
        self.first_difference(other).is_none()
    }

    /// The first point where two lenses disagree, described for reports.
    pub fn first_difference(&self, other: &Lens) -> Option<String> {
        if self.src != other.src || self.dst != other.dst {
            return Some(format!("boundaries differ: {:?} vs {:?}", (&self.src, &self.dst), (&other.src, &other.dst)));
        }
        let samples = sample_vectors(self.dst.dim);
        for x in &self.src.points {
            let (a, b) = (self.view(x), other.view(x));
            if a != b {
                return Some(format!("view at {x}: {a} vs {b}"));
            }
            for r in &samples {
                let (a, b) = (self.update(x, r), other.update(x, r));
                if a != b {
                    return Some(format!("update at ({x}, {r}): {a} vs {b}"));
                }
            }
        }
        None
    }
}

/// `second ∘ first`: view `v′ ∘ v`, update `(x, r) ↦ u(x, u′(v x, r))`.
pub fn lens_compose(first: &Lens, second: &Lens) -> Result<Lens, GameError> {
    if first.dst != second.src {
        return Err(GameError::InterfaceMismatch(format!(
            "lens boundary {:?} does not match {:?}",
            first.dst, second.src
        )));
    }
    let (v1, u1) = (first.view.clone(), first.update.clone());
    let (v2, u2) = (second.view.clone(), second.update.clone());
    let v1b = v1.clone();
    Ok(Lens {
        src: first.src.clone(),
        dst: second.dst.clone(),
        view: Arc::new(move |x| v2(&v1(x))),
        update: Arc::new(move |x, r| u1(x, &u2(&v1b(x), r))),
    })
}

/// `⟨f, g⟩`: view `f`, update `g ∘ π₂`.
pub fn embed_pair(src: Boundary, dst: Boundary, f: ViewFn, g: VecFn) -> Lens {
    Lens {
        src,
        dst,
        view: f,
        update: Arc::new(move |_, r| g(r)),
    }
}

/// The lens `(P_G(σ, -), C_G(σ, -, -))`.
pub fn game_lens(g: &ProbOpenGame, sigma: &Value) -> Result<Lens, GameError> {
    if !g.has_strategy(sigma) {
        return Err(GameError::UnknownStrategy(sigma.to_string()));
    }
    let (g1, g2) = (g.clone(), g.clone());
    let (s1, s2) = (sigma.clone(), sigma.clone());
    Ok(Lens {
        src: Boundary::new(g.states().to_vec(), g.coutility_dim()),
        dst: Boundary::new(g.moves().to_vec(), g.utility_dim()),
        view: Arc::new(move |x| g1.play(&s1, x)),
        update: Arc::new(move |x, r| g2.coutility(&s2, x, r)),
    })
}

/// Sixteen fixed vectors of dimension `dim` (just the empty vector when
/// `dim = 0`): zero, unit vectors and their negatives, then mixed-sign and
/// fractional patterns.
pub fn sample_vectors(dim: usize) -> Vec<RationalVec> {
    if dim == 0 {
        return vec![RationalVec::zeros(0)];
    }
    let mut out = vec![RationalVec::zeros(dim)];
    let push = |v: RationalVec, out: &mut Vec<RationalVec>| {
        if out.len() < 16 && !out.contains(&v) {
            out.push(v);
        }
    };
    for i in 0..dim {
        let mut e = vec![q(0, 1); dim];
        e[i] = q(1, 1);
        push(RationalVec::new(e.clone()), &mut out);
        e[i] = q(-1, 1);
        push(RationalVec::new(e), &mut out);
    }
    let patterns: [&dyn Fn(usize) -> (i64, i64); 8] = [
        &|i| (if i % 2 == 0 { 1 } else { -1 }, 1),
        &|i| (if i % 2 == 0 { -2 } else { 3 }, 1),
        &|i| (i as i64 + 1, 2),
        &|i| (-(i as i64) - 1, 3),
        &|i| (5 - 2 * i as i64, 1),
        &|i| (7, i as i64 + 2),
        &|i| (-10 + i as i64, 1),
        &|i| (1, 1 + (i as i64 % 3)),
    ];
    for p in patterns.iter() {
        push(RationalVec::new((0..dim).map(|i| { let (n, d) = p(i); q(n, d) }).collect()), &mut out);
    }
    let mut j = 2i64;
    while out.len() < 16 {
        push(
            RationalVec::new((0..dim).map(|i| q(if (i as i64 + j) % 2 == 0 { j } else { -j }, 1 + i as i64)).collect()),
            &mut out,
        );
        j += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::VecAlgebra;
    use crate::game::{conditioned_decision_game, decision_game, identity_game};

    fn abc() -> Vec<Value> {
        Value::atoms(&["a", "b", "c"])
    }

    fn cycle(x: &Value) -> Value {
        match x.to_string().as_str() {
            "a" => Value::atom("b"),
            "b" => Value::atom("c"),
            _ => Value::atom("a"),
        }
    }

    fn collapse(x: &Value) -> Value {
        if *x == Value::atom("c") { Value::atom("a") } else { x.clone() }
    }

    #[test]
    fn samples_are_distinct_and_sized() {
        for d in 0..5 {
            let s = sample_vectors(d);
            assert_eq!(s.len(), if d == 0 { 1 } else { 16 });
            assert!(s.iter().all(|v| v.dim() == d));
            for (i, a) in s.iter().enumerate() {
                assert!(!s[i + 1..].contains(a));
            }
        }
    }

    #[test]
    fn composing_embeds_is_embed_of_composites() {
        let b = Boundary::new(abc(), 2);
        let f: ViewFn = Arc::new(cycle);
        let f2: ViewFn = Arc::new(collapse);
        let g: VecFn = Arc::new(|r: &RationalVec| r.permute(&[1, 0]));
        let g2: VecFn = Arc::new(|r: &RationalVec| r.scale(&q(2, 1)));
        let l1 = embed_pair(b.clone(), b.clone(), f.clone(), g.clone());
        let l2 = embed_pair(b.clone(), b.clone(), f2.clone(), g2.clone());
        let composed = lens_compose(&l1, &l2).unwrap();
        let direct = embed_pair(
            b.clone(),
            b,
            Arc::new(move |x| f2(&f(x))),
            Arc::new(move |r| g(&g2(r))),
        );
        assert!(composed.ext_eq(&direct));
        // the swapped order is a different lens
        let wrong = lens_compose(&l2, &l1).unwrap();
        assert!(!wrong.ext_eq(&direct));
    }

    #[test]
    fn identity_is_neutral() {
        let b = Boundary::new(abc(), 1);
        let l = embed_pair(b.clone(), b, Arc::new(cycle), Arc::new(|r: &RationalVec| -r));
        let id = Lens::identity(abc(), 1);
        assert!(lens_compose(&id, &l).unwrap().ext_eq(&l));
        assert!(lens_compose(&l, &id).unwrap().ext_eq(&l));
        let id2 = embed_pair(Boundary::new(abc(), 1), Boundary::new(abc(), 1), Arc::new(|x| x.clone()), Arc::new(|r| r.clone()));
        assert!(id2.ext_eq(&id));
    }

    #[test]
    fn mismatched_boundaries_are_rejected() {
        let l = Lens::identity(abc(), 1);
        let m = Lens::identity(abc(), 2);
        assert!(matches!(lens_compose(&l, &m), Err(GameError::InterfaceMismatch(_))));
    }

    #[test]
    fn game_lenses_of_atomic_games() {
        let mp1 = decision_game(Value::atoms(&["H", "T"]), VecAlgebra::new(1), 0).unwrap();
        let l = game_lens(&mp1, &Value::atom("H")).unwrap();
        assert_eq!(l.view(&Value::Unit), Value::atom("H"));
        let r = RationalVec::from_ints(&[7]);
        assert_eq!(l.update(&Value::Unit, &r), r);
        assert!(matches!(game_lens(&mp1, &Value::atom("Q")), Err(GameError::UnknownStrategy(_))));

        let id = identity_game(abc(), VecAlgebra::new(2)).unwrap();
        assert!(game_lens(&id, &Value::Unit).unwrap().ext_eq(&Lens::identity(abc(), 2)));

        let ys = Value::atoms(&["E", "NE"]);
        let g2 = conditioned_decision_game(ys.clone(), ys, VecAlgebra::new(2), 1).unwrap();
        let swap = g2.strategy_named("swap").unwrap().clone();
        let l2 = game_lens(&g2, &swap).unwrap();
        assert_eq!(l2.view(&Value::atom("E")), Value::pair(Value::atom("E"), Value::atom("NE")));
    }
}
