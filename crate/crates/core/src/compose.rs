//! Parallel and sequential composition of probabilistic open games.
//!
//! Both composites take pairs of strategies and accept only independent
//! candidates `ℓ(φ₁, φ₂)`. In a parallel game each component must be an
//! equilibrium against the expected utility induced by the other's
//! marginal. In a sequential game the first component is judged against
//! the coutility fed back by the second, and the second component's
//! marginal must lie in the lifted predicate over the mixed state the first
//! component produces.
//!
//! The lifted predicate is decided by the first applicable rule:
//!
//! 1. every branch is support characterized: transportation feasibility,
//!    decided by exact max-flow;
//! 2. the mixed state is a point mass: direct membership;
//! 3. a [`DecompositionWitness`] was supplied: verify it;
//! 4. otherwise refuse with [`GameError::UnsupportedComposition`].

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_traits::Zero;

use crate::dist::{Dist, RationalVec, Q};
use crate::flow::{FlowNetwork, MaxFlow};
use crate::game::{
    support_char_of, Bijection, CoordPerm, EquilibriumSpec, Failure, GameError, GameKind, Interface,
    Membership, ProbOpenGame, UtilityTable, Verdict,
};
use crate::value::{product, Value};

/// Per-branch conditional distributions whose mixture is the candidate.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DecompositionWitness {
    pub branches: BTreeMap<Value, Dist<Value>>,
}

impl DecompositionWitness {
    pub fn new<I: IntoIterator<Item = (Value, Dist<Value>)>>(branches: I) -> DecompositionWitness {
        DecompositionWitness {
            branches: branches.into_iter().collect(),
        }
    }
}

/// Splits a distribution over pairs into its marginals.
pub fn value_marginals(phi: &Dist<Value>) -> Result<(Dist<Value>, Dist<Value>), GameError> {
    if let Some(bad) = phi.support().find(|v| v.as_pair().is_none()) {
        return Err(GameError::NotAPair(bad.to_string()));
    }
    Ok((
        phi.map(|v| v.fst().cloned().unwrap_or(Value::Unit)),
        phi.map(|v| v.snd().cloned().unwrap_or(Value::Unit)),
    ))
}

/// The independent joint over pair values.
pub fn value_ell(a: &Dist<Value>, b: &Dist<Value>) -> Dist<Value> {
    a.product_with(b, |x, y| Value::pair(x.clone(), y.clone()))
}

pub(crate) fn split_pair(x: &Value) -> Result<(&Value, &Value), GameError> {
    x.as_pair().ok_or_else(|| GameError::NotAPair(x.to_string()))
}

/// `G ⊗ G'`: both games played side by side.
pub fn par(g: &ProbOpenGame, h: &ProbOpenGame) -> ProbOpenGame {
    let interface = Interface {
        states: product(g.states(), h.states()),
        moves: product(g.moves(), h.moves()),
        utility_alg: g.interface.utility_alg.product(h.interface.utility_alg),
        coutility_alg: g.interface.coutility_alg.product(h.interface.coutility_alg),
    };
    let (pg, ph) = (g.play.clone(), h.play.clone());
    let (cg, ch) = (g.coutility.clone(), h.coutility.clone());
    let split_at = g.utility_dim();
    let play: Arc<dyn Fn(&Value, &Value) -> Value + Send + Sync> = Arc::new(move |s, x| {
        let (s1, s2) = s.as_pair().expect("parallel strategy is a pair");
        let (x1, x2) = x.as_pair().expect("parallel state is a pair");
        Value::pair(pg(s1, x1), ph(s2, x2))
    });
    let coutility: Arc<dyn Fn(&Value, &Value, &RationalVec) -> RationalVec + Send + Sync> = Arc::new(move |s, x, r| {
        let (s1, s2) = s.as_pair().expect("parallel strategy is a pair");
        let (x1, x2) = x.as_pair().expect("parallel state is a pair");
        let (r1, r2) = r.split(split_at);
        cg(s1, x1, &r1).concat(&ch(s2, x2, &r2))
    });
    ProbOpenGame {
        strategies: product(g.strategies(), h.strategies()),
        interface,
        play,
        coutility,
        label: format!("(par {} {})", g.label(), h.label()),
        eq: EquilibriumSpec::Par(Arc::new(g.clone()), Arc::new(h.clone())),
        kind: GameKind::Par,
    }
}

/// Expected utility table for one side of a parallel game: for each own move
/// `y`, the expectation of the selected coordinates of `k` when the other
/// side's move is drawn from `other`.
pub(crate) fn transformed_table(
    own_moves: &[Value],
    other: &Dist<Value>,
    k: &UtilityTable,
    own_first: bool,
    coords: std::ops::Range<usize>,
) -> Result<UtilityTable, GameError> {
    let mut out = Vec::with_capacity(own_moves.len());
    for y in own_moves {
        let mut acc = RationalVec::zeros(coords.len());
        for (y2, w) in other.iter() {
            let joint = if own_first {
                Value::pair(y.clone(), y2.clone())
            } else {
                Value::pair(y2.clone(), y.clone())
            };
            let r = k.get(&joint)?.slice(coords.clone());
            acc = &acc + &r.scale(w);
        }
        out.push((y.clone(), acc));
    }
    Ok(UtilityTable::new(out))
}

/// Decides membership in `E_{G⊗G'} x k`.
pub fn par_membership(
    g: &ProbOpenGame,
    h: &ProbOpenGame,
    x: &Value,
    k: &UtilityTable,
    phi: &Dist<Value>,
) -> Result<bool, GameError> {
    let label = format!("(par {} {})", g.label(), h.label());
    Ok(par_membership_in(&Membership::new(), g, h, x, k, phi, &label)?.is_member())
}

pub(crate) fn par_membership_in(
    ctx: &Membership<'_>,
    g: &ProbOpenGame,
    h: &ProbOpenGame,
    x: &Value,
    k: &UtilityTable,
    phi: &Dist<Value>,
    label: &str,
) -> Result<Verdict, GameError> {
    let (x1, x2) = split_pair(x)?;
    let (phi1, phi2) = value_marginals(phi)?;
    if value_ell(&phi1, &phi2) != *phi {
        return Ok(Verdict::NotMember(Failure::NotIndependent { game: label.to_string() }));
    }
    let n1 = g.utility_dim();
    let n = n1 + h.utility_dim();
    let alpha2 = phi2.map(|s| h.play(s, x2));
    let k1 = transformed_table(g.moves(), &alpha2, k, true, 0..n1)?;
    let v1 = ctx.check(g, x1, &k1, &phi1)?;
    if !v1.is_member() {
        return Ok(v1);
    }
    let alpha1 = phi1.map(|s| g.play(s, x1));
    let k2 = transformed_table(h.moves(), &alpha1, k, false, n1..n)?;
    ctx.check(h, x2, &k2, &phi2)
}

/// `G ; H`: play `G`, feed its move to `H` as state.
pub fn seq(g: &ProbOpenGame, h: &ProbOpenGame) -> Result<ProbOpenGame, GameError> {
    if g.moves() != h.states() {
        return Err(GameError::InterfaceMismatch(format!(
            "moves of `{}` {:?} differ from states of `{}` {:?}",
            g.label(),
            g.moves(),
            h.label(),
            h.states()
        )));
    }
    if g.utility_dim() != h.coutility_dim() {
        return Err(GameError::InterfaceMismatch(format!(
            "utility dimension {} of `{}` differs from coutility dimension {} of `{}`",
            g.utility_dim(),
            g.label(),
            h.coutility_dim(),
            h.label()
        )));
    }
    let interface = Interface {
        states: g.states().to_vec(),
        moves: h.moves().to_vec(),
        utility_alg: h.interface.utility_alg,
        coutility_alg: g.interface.coutility_alg,
    };
    let (pg, ph) = (g.play.clone(), h.play.clone());
    let (cg, ch) = (g.coutility.clone(), h.coutility.clone());
    let pg2 = pg.clone();
    Ok(ProbOpenGame {
        strategies: product(g.strategies(), h.strategies()),
        interface,
        play: Arc::new(move |s, x| {
            let (s1, s2) = s.as_pair().expect("sequential strategy is a pair");
            ph(s2, &pg(s1, x))
        }),
        coutility: Arc::new(move |s, x, t| {
            let (s1, s2) = s.as_pair().expect("sequential strategy is a pair");
            let y = pg2(s1, x);
            cg(s1, x, &ch(s2, &y, t))
        }),
        label: format!("(seq {} {})", g.label(), h.label()),
        eq: EquilibriumSpec::Seq(Arc::new(g.clone()), Arc::new(h.clone())),
        kind: GameKind::Seq,
    })
}

/// Decides membership in `E_{G;H} x k`.
pub fn seq_membership(
    g: &ProbOpenGame,
    h: &ProbOpenGame,
    x: &Value,
    k: &UtilityTable,
    phi: &Dist<Value>,
) -> Result<bool, GameError> {
    let label = format!("(seq {} {})", g.label(), h.label());
    Ok(seq_membership_in(&Membership::new(), g, h, x, k, phi, &label)?.is_member())
}

pub(crate) fn seq_membership_in(
    ctx: &Membership<'_>,
    g: &ProbOpenGame,
    h: &ProbOpenGame,
    x: &Value,
    k: &UtilityTable,
    phi: &Dist<Value>,
    label: &str,
) -> Result<Verdict, GameError> {
    let (phi1, phi2) = value_marginals(phi)?;
    if value_ell(&phi1, &phi2) != *phi {
        return Ok(Verdict::NotMember(Failure::NotIndependent { game: label.to_string() }));
    }
    // utility for G: the coutility H returns at each of G's moves, averaged over φ₂
    let mut entries = Vec::with_capacity(g.moves().len());
    for y in g.moves() {
        let mut acc = RationalVec::zeros(g.utility_dim());
        for (s, w) in phi2.iter() {
            let r = h.coutility(s, y, k.get(&h.play(s, y))?);
            acc = &acc + &r.scale(w);
        }
        entries.push((y.clone(), acc));
    }
    let k_g = UtilityTable::new(entries);
    let v = ctx.check(g, x, &k_g, &phi1)?;
    if !v.is_member() {
        return Ok(v);
    }
    let alpha = phi1.map(|s| g.play(s, x));
    if liftpred_in(ctx, h, k, &alpha, &phi2)? {
        Ok(Verdict::Member)
    } else {
        Ok(Verdict::NotMember(Failure::Liftpred {
            game: h.label().to_string(),
        }))
    }
}

/// Decides `ψ ∈ liftpred(E_H(-, k))(α)`.
pub fn liftpred_check(
    h: &ProbOpenGame,
    k: &UtilityTable,
    alpha: &Dist<Value>,
    psi: &Dist<Value>,
    witness: Option<&DecompositionWitness>,
) -> Result<bool, GameError> {
    let ctx = match witness {
        Some(w) => Membership::with_witness(w),
        None => Membership::new(),
    };
    liftpred_in(&ctx, h, k, alpha, psi)
}

pub(crate) fn liftpred_in(
    ctx: &Membership<'_>,
    h: &ProbOpenGame,
    k: &UtilityTable,
    alpha: &Dist<Value>,
    psi: &Dist<Value>,
) -> Result<bool, GameError> {
    if let Some(s) = psi.support().find(|s| !h.has_strategy(s)) {
        return Err(GameError::UnknownStrategy(s.to_string()));
    }
    let mut sets = Vec::with_capacity(alpha.support_len());
    for y in alpha.support() {
        if !h.has_state(y) {
            return Err(GameError::UnknownState(y.to_string()));
        }
        match support_char_of(h, y, k)? {
            Some(s) => sets.push(s),
            None => break,
        }
    }
    if sets.len() == alpha.support_len() {
        ctx.count_flow();
        return Ok(FlowNetwork::new(alpha, sets, psi).feasible());
    }
    if let Some(y) = alpha.as_point() {
        ctx.count_point_mass();
        return Ok(ctx.check(h, y, k, psi)?.is_member());
    }
    if let Some(w) = ctx.witness {
        ctx.count_witness();
        return verify_witness(h, k, alpha, psi, w);
    }
    Err(GameError::UnsupportedComposition {
        game: h.label().to_string(),
        detail: format!("its equilibria are not support characterized and the mixed state {alpha} is not a point mass"),
    })
}

/// Verifies a decomposition witness; any defect is an
/// [`GameError::InvalidWitness`] rather than a plain `false`.
pub fn verify_witness(
    h: &ProbOpenGame,
    k: &UtilityTable,
    alpha: &Dist<Value>,
    psi: &Dist<Value>,
    witness: &DecompositionWitness,
) -> Result<bool, GameError> {
    let keys: Vec<&Value> = witness.branches.keys().collect();
    let support: Vec<&Value> = alpha.support().collect();
    if keys != support {
        return Err(GameError::InvalidWitness(format!(
            "branches {keys:?} do not match the support {support:?} of the mixed state"
        )));
    }
    let mixture = Dist::mixture(alpha.iter().map(|(y, p)| (p.clone(), witness.branches[y].clone())));
    if mixture != *psi {
        return Err(GameError::InvalidWitness(format!("mixture {mixture} differs from candidate {psi}")));
    }
    let inner = Membership::new();
    for (y, branch) in &witness.branches {
        if !inner.check(h, y, k, branch)?.is_member() {
            return Err(GameError::InvalidWitness(format!(
                "branch {branch} at state `{y}` is not an equilibrium of `{}`",
                h.label()
            )));
        }
    }
    Ok(true)
}

/// The per-branch decomposition read off a feasible transportation plan:
/// branch `i` plays `q(i, σ) / pᵢ`.
pub fn transport_witness(
    alpha: &Dist<Value>,
    sets: Vec<BTreeSet<Value>>,
    psi: &Dist<Value>,
) -> Option<DecompositionWitness> {
    let net = FlowNetwork::new(alpha, sets, psi);
    let (value, plan) = net.solve();
    if value != Q::from_integer(1.into()) {
        return None;
    }
    let mut branches = BTreeMap::new();
    for (y, p) in alpha.iter() {
        let entries: Vec<(Value, Q)> = plan
            .iter()
            .filter(|((i, _), _)| i == y)
            .map(|((_, s), f)| (s.clone(), f / p))
            .collect();
        branches.insert(y.clone(), Dist::new(entries).ok()?);
    }
    Some(DecompositionWitness { branches })
}

/// Membership in `λ(α)` for `α` a distribution over finite sets: is there a
/// coupling of `α` and `φ` supported on the membership relation?
pub fn lambda_contains(alpha: &Dist<BTreeSet<Value>>, phi: &Dist<Value>) -> bool {
    let branches: Vec<(Value, Q, BTreeSet<Value>)> = alpha
        .iter()
        .enumerate()
        .map(|(i, (s, w))| (Value::atom(&format!("#{i}")), w.clone(), s.clone()))
        .collect();
    let net = FlowNetwork {
        sources: branches.iter().map(|(l, w, _)| (l.clone(), w.clone())).collect(),
        admissible: branches.iter().map(|(_, _, s)| s.clone()).collect(),
        sinks: phi.iter().map(|(s, w)| (s.clone(), w.clone())).collect(),
    };
    net.feasible()
}

/// Is `ψ'` the pushforward along `f` of some member of the lifted
/// support-characterized predicate? Decided on the three-layer network
/// branch → strategy → image, independently of the image sets.
pub fn pushforward_of_lift_contains(
    alpha: &Dist<Value>,
    sets: &[BTreeSet<Value>],
    f: impl Fn(&Value) -> Value,
    target: &Dist<Value>,
) -> bool {
    let strategies: BTreeSet<Value> = sets.iter().flatten().cloned().collect();
    let strategies: Vec<Value> = strategies.into_iter().collect();
    let images: Vec<(&Value, &Q)> = target.iter().collect();
    let m = alpha.support_len();
    let s = strategies.len();
    let t = images.len();
    let (source, sink) = (m + s + t, m + s + t + 1);
    let mut g = MaxFlow::new(m + s + t + 2);
    for (i, (_, p)) in alpha.iter().enumerate() {
        g.add_edge(source, i, Some(p.clone()));
        for (j, st) in strategies.iter().enumerate() {
            if sets[i].contains(st) {
                g.add_edge(i, m + j, None);
            }
        }
    }
    for (j, st) in strategies.iter().enumerate() {
        let img = f(st);
        if let Some(l) = images.iter().position(|(v, _)| **v == img) {
            g.add_edge(m + j, m + s + l, None);
        }
    }
    for (l, (_, w)) in images.iter().enumerate() {
        g.add_edge(m + s + l, sink, Some((*w).clone()));
    }
    let v = g.run(source, sink);
    !v.is_zero() && v == Q::from_integer(1.into())
}

/// Canonical isomorphism data for [`relabel`]: bijections on strategies,
/// states and moves, and coordinate permutations on coutilities and
/// utilities.
#[derive(Clone, Debug)]
pub struct GameIso {
    pub strategies: Bijection,
    pub states: Bijection,
    pub moves: Bijection,
    pub coutility: CoordPerm,
    pub utility: CoordPerm,
}

impl GameIso {
    pub fn identity(g: &ProbOpenGame) -> GameIso {
        GameIso {
            strategies: Bijection::identity(g.strategies()),
            states: Bijection::identity(g.states()),
            moves: Bijection::identity(g.moves()),
            coutility: CoordPerm::identity(g.coutility_dim()),
            utility: CoordPerm::identity(g.utility_dim()),
        }
    }
}

fn pull_table(k: &UtilityTable, moves: &Bijection, utility_inv: &CoordPerm, domain: &[Value]) -> Result<UtilityTable, GameError> {
    let mut out = Vec::with_capacity(domain.len());
    for y in domain {
        let image = moves
            .apply(y)
            .ok_or_else(|| GameError::UnknownState(y.to_string()))?;
        out.push((y.clone(), utility_inv.apply(k.get(image)?)));
    }
    Ok(UtilityTable::new(out))
}

/// Transports every component of `G` along the isomorphisms in `iso`.
pub fn relabel(g: &ProbOpenGame, iso: &GameIso) -> Result<ProbOpenGame, GameError> {
    iso.strategies.covers(g.strategies())?;
    iso.states.covers(g.states())?;
    iso.moves.covers(g.moves())?;
    if iso.coutility.dim() != g.coutility_dim() || iso.utility.dim() != g.utility_dim() {
        return Err(GameError::NotBijective("coordinate permutation has the wrong dimension".into()));
    }
    let interface = Interface {
        states: iso.states.codomain(),
        moves: iso.moves.codomain(),
        utility_alg: g.interface.utility_alg,
        coutility_alg: g.interface.coutility_alg,
    };
    let iso = Arc::new(iso.clone());
    let utility_inv = iso.utility.inverse();
    let inner = Arc::new(g.clone());

    let (i1, g1) = (iso.clone(), inner.clone());
    let play = Arc::new(move |s: &Value, x: &Value| {
        let s0 = i1.strategies.invert(s).cloned().unwrap_or(Value::Unit);
        let x0 = i1.states.invert(x).cloned().unwrap_or(Value::Unit);
        i1.moves.apply(&g1.play(&s0, &x0)).cloned().unwrap_or(Value::Unit)
    });
    let (i2, g2, u2) = (iso.clone(), inner.clone(), utility_inv.clone());
    let coutility = Arc::new(move |s: &Value, x: &Value, r: &RationalVec| {
        let s0 = i2.strategies.invert(s).cloned().unwrap_or(Value::Unit);
        let x0 = i2.states.invert(x).cloned().unwrap_or(Value::Unit);
        i2.coutility.apply(&g2.coutility(&s0, &x0, &u2.apply(r)))
    });
    let eq = match &g.eq {
        EquilibriumSpec::Everything => EquilibriumSpec::Everything,
        EquilibriumSpec::SupportChar(best) => {
            let (i3, best, u3) = (iso.clone(), best.clone(), utility_inv.clone());
            let moves = g.moves().to_vec();
            EquilibriumSpec::SupportChar(Arc::new(move |x, k| {
                let x0 = i3
                    .states
                    .invert(x)
                    .ok_or_else(|| GameError::UnknownState(x.to_string()))?;
                let k0 = pull_table(k, &i3.moves, &u3, &moves)?;
                Ok(best(x0, &k0)?
                    .iter()
                    .filter_map(|s| i3.strategies.apply(s).cloned())
                    .collect())
            }))
        }
        _ => {
            let (i3, g3, u3) = (iso.clone(), inner.clone(), utility_inv.clone());
            EquilibriumSpec::Oracle(Arc::new(move |ctx, x, k, phi| {
                let x0 = i3
                    .states
                    .invert(x)
                    .ok_or_else(|| GameError::UnknownState(x.to_string()))?;
                let k0 = pull_table(k, &i3.moves, &u3, g3.moves())?;
                let phi0 = phi.map(|s| i3.strategies.invert(s).cloned().unwrap_or(Value::Unit));
                ctx.check(&g3, x0, &k0, &phi0)
            }))
        }
    };
    Ok(ProbOpenGame {
        interface,
        strategies: iso.strategies.codomain(),
        play,
        coutility,
        eq,
        kind: GameKind::Relabeled,
        label: g.label().to_string(),
    })
}
