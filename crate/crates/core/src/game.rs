//! Probabilistic open games and the equilibrium-membership engine.
//!
//! A [`ProbOpenGame`] `(X, S) -> (Y, R)` carries a finite strategy set, a
//! play function `Σ × X -> Y`, a coutility function `Σ × X × R -> S` and an
//! [`EquilibriumSpec`] describing which mixed strategies are equilibria for a
//! given state and utility table. Utilities and coutilities live in `Qⁿ`.
//!
//! Membership is decided exactly by recursion on the spec. Atomic games whose
//! equilibria are argmax sets of a linear expectation are support
//! characterized: a mixed strategy is optimal iff its support lies in the set
//! of pure maximizers.

use std::cell::Cell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::compose::{self, DecompositionWitness};
use crate::dist::{Dist, RationalVec, VecAlgebra, Q};
use crate::value::{function_space, product, Value};

/// Default cap on `|observations| · |moves|` for conditioned games.
pub const DEFAULT_CONDITIONED_BOUND: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("move set is empty")]
    EmptyMoveSet,
    #[error("state set is empty")]
    EmptyStateSet,
    #[error("state `{0}` is not in the game's state set")]
    UnknownState(String),
    #[error("strategy `{0}` is not in the game's strategy set")]
    UnknownStrategy(String),
    #[error("utility table has no entry for move `{0}`")]
    MissingUtility(String),
    #[error("payoff vector has dimension {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("payoff coordinate {coord} out of range for dimension {dim}")]
    BadCoordinate { coord: usize, dim: usize },
    #[error("interface mismatch: {0}")]
    InterfaceMismatch(String),
    #[error("map is not a bijection: {0}")]
    NotBijective(String),
    #[error("conditioned game too large: {observations} observations x {moves} moves exceeds {bound}")]
    TooLarge { observations: usize, moves: usize, bound: usize },
    #[error("cannot decide the lifted equilibrium predicate of `{game}`: {detail}; supply a decomposition witness")]
    UnsupportedComposition { game: String, detail: String },
    #[error("invalid decomposition witness: {0}")]
    InvalidWitness(String),
    #[error("expected a pair value, found `{0}`")]
    NotAPair(String),
}

/// The boundary data of a game `(X, S) -> (Y, R)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interface {
    pub states: Vec<Value>,
    pub moves: Vec<Value>,
    pub utility_alg: VecAlgebra,
    pub coutility_alg: VecAlgebra,
}

impl Interface {
    pub fn new(
        states: Vec<Value>,
        moves: Vec<Value>,
        utility_alg: VecAlgebra,
        coutility_alg: VecAlgebra,
    ) -> Result<Interface, GameError> {
        let states = canonical(states);
        let moves = canonical(moves);
        if states.is_empty() {
            return Err(GameError::EmptyStateSet);
        }
        if moves.is_empty() {
            return Err(GameError::EmptyMoveSet);
        }
        Ok(Interface {
            states,
            moves,
            utility_alg,
            coutility_alg,
        })
    }
}

pub(crate) fn canonical(mut v: Vec<Value>) -> Vec<Value> {
    v.sort();
    v.dedup();
    v
}

/// A utility function `Y -> R` given as a finite table.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct UtilityTable(BTreeMap<Value, RationalVec>);

impl UtilityTable {
    pub fn new<I: IntoIterator<Item = (Value, RationalVec)>>(entries: I) -> UtilityTable {
        UtilityTable(entries.into_iter().collect())
    }

    pub fn from_fn(moves: &[Value], f: impl Fn(&Value) -> RationalVec) -> UtilityTable {
        UtilityTable(moves.iter().map(|y| (y.clone(), f(y))).collect())
    }

    pub fn get(&self, y: &Value) -> Result<&RationalVec, GameError> {
        self.0.get(y).ok_or_else(|| GameError::MissingUtility(y.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Value, &RationalVec)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Checks totality on `moves` and the payoff dimension.
    pub fn validate(&self, moves: &[Value], dim: usize) -> Result<(), GameError> {
        for y in moves {
            let v = self.get(y)?;
            if v.dim() != dim {
                return Err(GameError::DimensionMismatch {
                    expected: dim,
                    found: v.dim(),
                });
            }
        }
        Ok(())
    }
}

pub type PlayFn = Arc<dyn Fn(&Value, &Value) -> Value + Send + Sync>;
pub type CoutilityFn = Arc<dyn Fn(&Value, &Value, &RationalVec) -> RationalVec + Send + Sync>;
pub type BestFn = Arc<dyn Fn(&Value, &UtilityTable) -> Result<BTreeSet<Value>, GameError> + Send + Sync>;
pub type OracleFn =
    Arc<dyn Fn(&Membership<'_>, &Value, &UtilityTable, &Dist<Value>) -> Result<Verdict, GameError> + Send + Sync>;

/// How the equilibrium predicate of a game is decided.
#[derive(Clone)]
pub enum EquilibriumSpec {
    /// `{φ | supp(φ) ⊆ best(x, k)}`.
    SupportChar(BestFn),
    Par(Arc<ProbOpenGame>, Arc<ProbOpenGame>),
    Seq(Arc<ProbOpenGame>, Arc<ProbOpenGame>),
    /// Every mixed strategy.
    Everything,
    /// An opaque membership decider.
    Oracle(OracleFn),
}

impl fmt::Debug for EquilibriumSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EquilibriumSpec::SupportChar(_) => write!(f, "SupportChar"),
            EquilibriumSpec::Par(a, b) => write!(f, "Par({}, {})", a.label(), b.label()),
            EquilibriumSpec::Seq(a, b) => write!(f, "Seq({}, {})", a.label(), b.label()),
            EquilibriumSpec::Everything => write!(f, "Everything"),
            EquilibriumSpec::Oracle(_) => write!(f, "Oracle"),
        }
    }
}

/// Constructor provenance, used by solvers to recognise supported shapes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GameKind {
    Decision { coord: usize },
    Conditioned { coord: usize, observations: Vec<Value>, moves: Vec<Value> },
    Identity,
    Unit,
    Structural,
    Par,
    Seq,
    Relabeled,
    Custom,
}

/// A probabilistic open game.
#[derive(Clone)]
pub struct ProbOpenGame {
    pub(crate) interface: Interface,
    pub(crate) strategies: Vec<Value>,
    pub(crate) play: PlayFn,
    pub(crate) coutility: CoutilityFn,
    pub(crate) eq: EquilibriumSpec,
    pub(crate) kind: GameKind,
    pub(crate) label: String,
}

impl fmt::Debug for ProbOpenGame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProbOpenGame")
            .field("label", &self.label)
            .field("states", &self.interface.states)
            .field("moves", &self.interface.moves)
            .field("strategies", &self.strategies.len())
            .field("eq", &self.eq)
            .finish()
    }
}

impl ProbOpenGame {
    /// Assembles a game from raw parts.
    pub fn custom(
        label: &str,
        interface: Interface,
        strategies: Vec<Value>,
        play: PlayFn,
        coutility: CoutilityFn,
        eq: EquilibriumSpec,
    ) -> Result<ProbOpenGame, GameError> {
        let strategies = canonical(strategies);
        if strategies.is_empty() {
            return Err(GameError::UnknownStrategy("<empty strategy set>".into()));
        }
        Ok(ProbOpenGame {
            interface,
            strategies,
            play,
            coutility,
            eq,
            kind: GameKind::Custom,
            label: label.to_string(),
        })
    }

    pub fn with_label(mut self, label: &str) -> ProbOpenGame {
        self.label = label.to_string();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> &GameKind {
        &self.kind
    }

    pub fn interface(&self) -> &Interface {
        &self.interface
    }

    pub fn states(&self) -> &[Value] {
        &self.interface.states
    }

    pub fn moves(&self) -> &[Value] {
        &self.interface.moves
    }

    pub fn utility_dim(&self) -> usize {
        self.interface.utility_alg.dim
    }

    pub fn coutility_dim(&self) -> usize {
        self.interface.coutility_alg.dim
    }

    pub fn strategies(&self) -> &[Value] {
        &self.strategies
    }

    pub fn eq_spec(&self) -> &EquilibriumSpec {
        &self.eq
    }

    pub fn play(&self, sigma: &Value, x: &Value) -> Value {
        (self.play)(sigma, x)
    }

    pub fn coutility(&self, sigma: &Value, x: &Value, r: &RationalVec) -> RationalVec {
        (self.coutility)(sigma, x, r)
    }

    pub fn has_strategy(&self, sigma: &Value) -> bool {
        self.strategies.binary_search(sigma).is_ok()
    }

    pub fn has_state(&self, x: &Value) -> bool {
        self.interface.states.binary_search(x).is_ok()
    }

    /// Looks up a strategy by any of its textual names.
    pub fn strategy_named(&self, name: &str) -> Option<&Value> {
        let wanted: String = name.chars().filter(|c| !c.is_whitespace()).collect();
        self.strategies.iter().find(|s| {
            s.names()
                .iter()
                .any(|n| n.chars().filter(|c| !c.is_whitespace()).collect::<String>() == wanted)
        })
    }
}

fn argmax_moves(moves: &[Value], payoff: impl Fn(&Value) -> Result<Q, GameError>) -> Result<BTreeSet<Value>, GameError> {
    let mut best: Option<Q> = None;
    let mut set = BTreeSet::new();
    for y in moves {
        let p = payoff(y)?;
        match &best {
            Some(b) if p < *b => {}
            Some(b) if p == *b => {
                set.insert(y.clone());
            }
            _ => {
                best = Some(p);
                set.clear();
                set.insert(y.clone());
            }
        }
    }
    Ok(set)
}

fn coord_of(k: &UtilityTable, y: &Value, coord: usize) -> Result<Q, GameError> {
    let v = k.get(y)?;
    if coord >= v.dim() {
        return Err(GameError::BadCoordinate { coord, dim: v.dim() });
    }
    Ok(v[coord].clone())
}

/// A single player choosing a move to maximize one payoff coordinate.
///
/// State-free: `X = 1`, `Σ = Y`, play is the identity on strategies and the
/// coutility passes the utility through unchanged.
pub fn decision_game(moves: Vec<Value>, alg: VecAlgebra, payoff_coord: usize) -> Result<ProbOpenGame, GameError> {
    if moves.is_empty() {
        return Err(GameError::EmptyMoveSet);
    }
    if payoff_coord >= alg.dim {
        return Err(GameError::BadCoordinate {
            coord: payoff_coord,
            dim: alg.dim,
        });
    }
    let interface = Interface::new(vec![Value::Unit], moves, alg, alg)?;
    let ys = interface.moves.clone();
    let best: BestFn = Arc::new(move |_x, k| argmax_moves(&ys, |y| coord_of(k, y, payoff_coord)));
    Ok(ProbOpenGame {
        strategies: interface.moves.clone(),
        interface,
        play: Arc::new(|s, _| s.clone()),
        coutility: Arc::new(|_, _, r| r.clone()),
        eq: EquilibriumSpec::SupportChar(best),
        kind: GameKind::Decision { coord: payoff_coord },
        label: "decision".into(),
    })
}

/// A player who observes the previous move and answers with a function
/// `observations -> moves`, required to be optimal at every observation.
pub fn conditioned_decision_game(
    observations: Vec<Value>,
    moves: Vec<Value>,
    alg: VecAlgebra,
    payoff_coord: usize,
) -> Result<ProbOpenGame, GameError> {
    conditioned_decision_game_bounded(observations, moves, alg, payoff_coord, DEFAULT_CONDITIONED_BOUND)
}

pub fn conditioned_decision_game_bounded(
    observations: Vec<Value>,
    moves: Vec<Value>,
    alg: VecAlgebra,
    payoff_coord: usize,
    bound: usize,
) -> Result<ProbOpenGame, GameError> {
    let observations = canonical(observations);
    let moves = canonical(moves);
    if observations.is_empty() || moves.is_empty() {
        return Err(GameError::EmptyMoveSet);
    }
    if observations.len() * moves.len() > bound {
        return Err(GameError::TooLarge {
            observations: observations.len(),
            moves: moves.len(),
            bound,
        });
    }
    if payoff_coord >= alg.dim {
        return Err(GameError::BadCoordinate {
            coord: payoff_coord,
            dim: alg.dim,
        });
    }
    let strategies = function_space(&observations, &moves);
    let interface = Interface::new(observations.clone(), product(&observations, &moves), alg, alg)?;
    let (obs, mv) = (observations.clone(), moves.clone());
    let all = strategies.clone();
    let best: BestFn = Arc::new(move |_x, k| {
        let mut per_branch = Vec::with_capacity(obs.len());
        for o in &obs {
            per_branch.push(argmax_moves(&mv, |m| coord_of(k, &Value::pair(o.clone(), m.clone()), payoff_coord))?);
        }
        Ok(all
            .iter()
            .filter(|g| {
                obs.iter()
                    .zip(&per_branch)
                    .all(|(o, b)| g.apply(o).is_some_and(|m| b.contains(m)))
            })
            .cloned()
            .collect())
    });
    Ok(ProbOpenGame {
        interface,
        strategies: canonical(strategies),
        play: Arc::new(|g, x| Value::pair(x.clone(), g.apply(x).cloned().unwrap_or(Value::Unit))),
        coutility: Arc::new(|_, _, r| r.clone()),
        eq: EquilibriumSpec::SupportChar(best),
        kind: GameKind::Conditioned {
            coord: payoff_coord,
            observations,
            moves,
        },
        label: "conditioned".into(),
    })
}

/// The identity game on `(X, S)`: one trivial strategy, every candidate an
/// equilibrium.
pub fn identity_game(states: Vec<Value>, alg: VecAlgebra) -> Result<ProbOpenGame, GameError> {
    let interface = Interface::new(states.clone(), states, alg, alg)?;
    Ok(ProbOpenGame {
        interface,
        strategies: vec![Value::Unit],
        play: Arc::new(|_, x| x.clone()),
        coutility: Arc::new(|_, _, s| s.clone()),
        eq: EquilibriumSpec::Everything,
        kind: GameKind::Identity,
        label: "id".into(),
    })
}

/// The monoidal unit `(1, 1) -> (1, 1)`.
pub fn unit_game() -> ProbOpenGame {
    let interface = Interface {
        states: vec![Value::Unit],
        moves: vec![Value::Unit],
        utility_alg: VecAlgebra::new(0),
        coutility_alg: VecAlgebra::new(0),
    };
    ProbOpenGame {
        interface,
        strategies: vec![Value::Unit],
        play: Arc::new(|_, _| Value::Unit),
        coutility: Arc::new(|_, _, _| RationalVec::zeros(0)),
        eq: EquilibriumSpec::Everything,
        kind: GameKind::Unit,
        label: "I".into(),
    }
}

/// A finite bijection given by its graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bijection {
    forward: BTreeMap<Value, Value>,
    backward: BTreeMap<Value, Value>,
}

impl Bijection {
    pub fn from_pairs<I: IntoIterator<Item = (Value, Value)>>(pairs: I) -> Result<Bijection, GameError> {
        let mut forward = BTreeMap::new();
        let mut backward = BTreeMap::new();
        for (a, b) in pairs {
            if forward.insert(a.clone(), b.clone()).is_some() {
                return Err(GameError::NotBijective(format!("`{a}` mapped twice")));
            }
            if backward.insert(b.clone(), a.clone()).is_some() {
                return Err(GameError::NotBijective(format!("`{b}` hit twice")));
            }
        }
        Ok(Bijection { forward, backward })
    }

    /// Tabulates `f` on `domain`, failing if it is not injective.
    pub fn from_fn(domain: &[Value], f: impl Fn(&Value) -> Value) -> Result<Bijection, GameError> {
        Bijection::from_pairs(domain.iter().map(|a| (a.clone(), f(a))))
    }

    pub fn identity(domain: &[Value]) -> Bijection {
        Bijection::from_fn(domain, |a| a.clone()).expect("identity is bijective")
    }

    pub fn apply(&self, a: &Value) -> Option<&Value> {
        self.forward.get(a)
    }

    pub fn invert(&self, b: &Value) -> Option<&Value> {
        self.backward.get(b)
    }

    pub fn domain(&self) -> Vec<Value> {
        self.forward.keys().cloned().collect()
    }

    pub fn codomain(&self) -> Vec<Value> {
        self.backward.keys().cloned().collect()
    }

    pub fn inverse(&self) -> Bijection {
        Bijection {
            forward: self.backward.clone(),
            backward: self.forward.clone(),
        }
    }

    /// Checks that the domain is exactly `domain`.
    pub fn covers(&self, domain: &[Value]) -> Result<(), GameError> {
        let d = canonical(domain.to_vec());
        if d != self.domain() {
            return Err(GameError::NotBijective(format!(
                "domain {:?} does not match carrier {:?}",
                self.domain(),
                d
            )));
        }
        Ok(())
    }
}

/// A coordinate permutation of `Qⁿ`; coordinate `i` of the image is
/// coordinate `perm[i]` of the argument.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordPerm(Vec<usize>);

impl CoordPerm {
    pub fn new(perm: Vec<usize>) -> Result<CoordPerm, GameError> {
        let mut seen = vec![false; perm.len()];
        for &i in &perm {
            if i >= perm.len() || seen[i] {
                return Err(GameError::NotBijective(format!("{perm:?} is not a permutation")));
            }
            seen[i] = true;
        }
        Ok(CoordPerm(perm))
    }

    pub fn identity(dim: usize) -> CoordPerm {
        CoordPerm((0..dim).collect())
    }

    /// Exchanges a leading block of `left` coordinates with the following
    /// block of `right` coordinates.
    pub fn swap_blocks(left: usize, right: usize) -> CoordPerm {
        CoordPerm((left..left + right).chain(0..left).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, v: &RationalVec) -> RationalVec {
        v.permute(&self.0)
    }

    pub fn inverse(&self) -> CoordPerm {
        let mut inv = vec![0; self.0.len()];
        for (i, &p) in self.0.iter().enumerate() {
            inv[p] = i;
        }
        CoordPerm(inv)
    }
}

/// A game realising a canonical isomorphism: play along `fx`, coutility
/// along `fs`, one strategy, trivial equilibria.
///
/// `fs` maps the right-hand coutility `S'` back to `S`.
pub fn structural_game(fx: &Bijection, fs: &CoordPerm) -> Result<ProbOpenGame, GameError> {
    let states = fx.domain();
    let images = fx.codomain();
    let alg = VecAlgebra::new(fs.dim());
    let interface = Interface::new(states, images, alg, alg)?;
    let fx = fx.clone();
    let fs = fs.clone();
    Ok(ProbOpenGame {
        interface,
        strategies: vec![Value::Unit],
        play: Arc::new(move |_, x| fx.apply(x).cloned().unwrap_or(Value::Unit)),
        coutility: Arc::new(move |_, _, s| fs.apply(s)),
        eq: EquilibriumSpec::Everything,
        kind: GameKind::Structural,
        label: "struct".into(),
    })
}

/// Why a candidate was rejected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Failure {
    /// The candidate is not the independent product of its marginals.
    NotIndependent { game: String },
    /// A support-characterized component put weight on a non-best move.
    BestResponse { game: String },
    /// The second component of a sequential game failed the lifted predicate.
    Liftpred { game: String },
    /// An opaque oracle rejected the candidate.
    Rejected { game: String },
}

impl Failure {
    pub fn kind(&self) -> &'static str {
        match self {
            Failure::NotIndependent { .. } => "independence",
            Failure::BestResponse { .. } => "component best-response",
            Failure::Liftpred { .. } => "liftpred",
            Failure::Rejected { .. } => "rejected",
        }
    }

    pub fn game(&self) -> &str {
        match self {
            Failure::NotIndependent { game }
            | Failure::BestResponse { game }
            | Failure::Liftpred { game }
            | Failure::Rejected { game } => game,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.kind(), self.game())
    }
}

/// Outcome of a membership query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Member,
    NotMember(Failure),
}

impl Verdict {
    pub fn is_member(&self) -> bool {
        matches!(self, Verdict::Member)
    }

    pub fn failure(&self) -> Option<&Failure> {
        match self {
            Verdict::Member => None,
            Verdict::NotMember(f) => Some(f),
        }
    }
}

/// Which rule decided each lifted-predicate query.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LiftStats {
    pub flow: usize,
    pub point_mass: usize,
    pub witness: usize,
}

/// A membership query context: an optional decomposition witness for
/// otherwise undecidable sequential compositions, and rule counters.
#[derive(Default)]
pub struct Membership<'w> {
    pub(crate) witness: Option<&'w DecompositionWitness>,
    flow: Cell<usize>,
    point_mass: Cell<usize>,
    witness_uses: Cell<usize>,
}

impl<'w> Membership<'w> {
    pub fn new() -> Membership<'w> {
        Membership::default()
    }

    pub fn with_witness(witness: &'w DecompositionWitness) -> Membership<'w> {
        Membership {
            witness: Some(witness),
            ..Membership::default()
        }
    }

    pub fn stats(&self) -> LiftStats {
        LiftStats {
            flow: self.flow.get(),
            point_mass: self.point_mass.get(),
            witness: self.witness_uses.get(),
        }
    }

    pub(crate) fn count_flow(&self) {
        self.flow.set(self.flow.get() + 1);
    }

    pub(crate) fn count_point_mass(&self) {
        self.point_mass.set(self.point_mass.get() + 1);
    }

    pub(crate) fn count_witness(&self) {
        self.witness_uses.set(self.witness_uses.get() + 1);
    }

    /// Decides `φ ∈ E_G x k`, explaining a rejection.
    pub fn check(&self, g: &ProbOpenGame, x: &Value, k: &UtilityTable, phi: &Dist<Value>) -> Result<Verdict, GameError> {
        if !g.has_state(x) {
            return Err(GameError::UnknownState(x.to_string()));
        }
        if let Some(s) = phi.support().find(|s| !g.has_strategy(s)) {
            return Err(GameError::UnknownStrategy(s.to_string()));
        }
        k.validate(g.moves(), g.utility_dim())?;
        match &g.eq {
            EquilibriumSpec::SupportChar(best) => {
                let b = best(x, k)?;
                if phi.support().all(|s| b.contains(s)) {
                    Ok(Verdict::Member)
                } else {
                    Ok(Verdict::NotMember(Failure::BestResponse { game: g.label.clone() }))
                }
            }
            EquilibriumSpec::Everything => Ok(Verdict::Member),
            EquilibriumSpec::Par(a, b) => compose::par_membership_in(self, a, b, x, k, phi, &g.label),
            EquilibriumSpec::Seq(a, b) => compose::seq_membership_in(self, a, b, x, k, phi, &g.label),
            EquilibriumSpec::Oracle(f) => f(self, x, k, phi),
        }
    }
}

/// Decides `φ ∈ E_G x k` exactly.
pub fn check_equilibrium(g: &ProbOpenGame, x: &Value, k: &UtilityTable, phi: &Dist<Value>) -> Result<bool, GameError> {
    Ok(Membership::new().check(g, x, k, phi)?.is_member())
}

/// Like [`check_equilibrium`] but reports the first failed condition.
pub fn explain_equilibrium(g: &ProbOpenGame, x: &Value, k: &UtilityTable, phi: &Dist<Value>) -> Result<Verdict, GameError> {
    Membership::new().check(g, x, k, phi)
}

/// The best-response set when the game's equilibria are support
/// characterized; `Everything` reports the full strategy set.
pub fn support_char_of(g: &ProbOpenGame, x: &Value, k: &UtilityTable) -> Result<Option<BTreeSet<Value>>, GameError> {
    match &g.eq {
        EquilibriumSpec::SupportChar(best) => {
            k.validate(g.moves(), g.utility_dim())?;
            Ok(Some(best(x, k)?))
        }
        EquilibriumSpec::Everything => Ok(Some(g.strategies.iter().cloned().collect())),
        _ => Ok(None),
    }
}
