//! Pure open games, determinisation, and the adjunction between pure and
//! probabilistic games.
//!
//! [`Determinised`] is the pure game `Δ(G)` over distribution-valued moves
//! and strategies. Its carriers are infinite, so it only answers pointwise
//! queries: play, coutility and membership.
//!
//! [`theta`] embeds a pure game as a probabilistic one whose equilibria are
//! point masses of pure equilibria; [`psi`] keeps the pure strategies whose
//! point masses are equilibria. Both act as the identity on strategy sets
//! and lens structure, so on morphisms they are the identity on components.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::compose::value_ell;
use crate::dist::{simplex_grid, ConvexAlgebra, Dist, RationalVec, VecAlgebra};
use crate::game::{
    canonical, check_equilibrium, CoordPerm, CoutilityFn, EquilibriumSpec, Failure, GameError, Interface, PlayFn,
    ProbOpenGame, UtilityTable, Verdict,
};
use crate::lens::{sample_vectors, VecFn};
use crate::value::Value;

pub type PureMemberFn = Arc<dyn Fn(&Value, &UtilityTable, &Value) -> Result<bool, GameError> + Send + Sync>;

/// A pure open game: equilibria are sets of pure strategies.
#[derive(Clone)]
pub struct PureOpenGame {
    pub interface: Interface,
    pub strategies: Vec<Value>,
    pub play: PlayFn,
    pub coutility: CoutilityFn,
    pub member: PureMemberFn,
    pub label: String,
}

impl fmt::Debug for PureOpenGame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PureOpenGame")
            .field("label", &self.label)
            .field("strategies", &self.strategies)
            .finish()
    }
}

impl PureOpenGame {
    pub fn new(
        label: &str,
        interface: Interface,
        strategies: Vec<Value>,
        play: PlayFn,
        coutility: CoutilityFn,
        member: PureMemberFn,
    ) -> PureOpenGame {
        PureOpenGame {
            interface,
            strategies: canonical(strategies),
            play,
            coutility,
            member,
            label: label.to_string(),
        }
    }

    pub fn play(&self, sigma: &Value, x: &Value) -> Value {
        (self.play)(sigma, x)
    }

    pub fn coutility(&self, sigma: &Value, x: &Value, r: &RationalVec) -> RationalVec {
        (self.coutility)(sigma, x, r)
    }

    pub fn is_equilibrium(&self, x: &Value, k: &UtilityTable, sigma: &Value) -> Result<bool, GameError> {
        if self.strategies.binary_search(sigma).is_err() {
            return Err(GameError::UnknownStrategy(sigma.to_string()));
        }
        k.validate(&self.interface.moves, self.interface.utility_alg.dim)?;
        (self.member)(x, k, sigma)
    }

    pub fn equilibria(&self, x: &Value, k: &UtilityTable) -> Result<Vec<Value>, GameError> {
        let mut out = Vec::new();
        for s in &self.strategies {
            if self.is_equilibrium(x, k, s)? {
                out.push(s.clone());
            }
        }
        Ok(out)
    }
}

/// The pure maximizing decision game.
pub fn pure_decision_game(moves: Vec<Value>, alg: VecAlgebra, coord: usize) -> Result<PureOpenGame, GameError> {
    if coord >= alg.dim {
        return Err(GameError::BadCoordinate { coord, dim: alg.dim });
    }
    let interface = Interface::new(vec![Value::Unit], moves, alg, alg)?;
    let ys = interface.moves.clone();
    Ok(PureOpenGame::new(
        "decision",
        interface.clone(),
        interface.moves,
        Arc::new(|s, _| s.clone()),
        Arc::new(|_, _, r| r.clone()),
        Arc::new(move |_, k, s| {
            let mine = &k.get(s)?[coord];
            for y in &ys {
                if &k.get(y)?[coord] > mine {
                    return Ok(false);
                }
            }
            Ok(true)
        }),
    ))
}

/// `Δ(G)`: the pure game of mixed strategies.
#[derive(Clone, Debug)]
pub struct Determinised {
    pub game: ProbOpenGame,
}

/// A utility function on distribution-valued moves `DY -> DR`.
pub type DistUtility<'a> = &'a dyn Fn(&Dist<Value>) -> Dist<RationalVec>;

pub fn determinise(g: &ProbOpenGame) -> Determinised {
    Determinised { game: g.clone() }
}

impl Determinised {
    /// `D(P_G(-, x)) φ`.
    pub fn play(&self, phi: &Dist<Value>, x: &Value) -> Dist<Value> {
        phi.map(|s| self.game.play(s, x))
    }

    /// `E[D(C_G(-, x, -)) ℓ(φ, ψ)]`.
    pub fn coutility(&self, phi: &Dist<Value>, x: &Value, psi: &Dist<RationalVec>) -> RationalVec {
        let joint = phi.product_with(psi, |s, r| self.game.coutility(s, x, r));
        self.game.interface().coutility_alg.expect(&joint)
    }

    /// `φ ∈ E_{Δ(G)} x k` iff `φ ∈ E_G x (E ∘ k ∘ η)`.
    pub fn is_equilibrium(&self, x: &Value, k: DistUtility<'_>, phi: &Dist<Value>) -> Result<bool, GameError> {
        let table = self.point_table(k);
        check_equilibrium(&self.game, x, &table, phi)
    }

    fn point_table(&self, k: DistUtility<'_>) -> UtilityTable {
        let alg = self.game.interface().utility_alg;
        UtilityTable::from_fn(self.game.moves(), |y| alg.expect(&k(&Dist::point(y.clone()))))
    }
}

/// Lemma: `φ ∈ E_{Δ(G)} x D(k)` iff `φ ∈ E_G x k`. Returns whether the two
/// sides agree.
pub fn check_determinise_dk(g: &ProbOpenGame, x: &Value, k: &UtilityTable, phi: &Dist<Value>) -> Result<bool, GameError> {
    let dk = |alpha: &Dist<Value>| alpha.map(|y| k.get(y).cloned().unwrap_or_else(|_| RationalVec::zeros(0)));
    let through_delta = determinise(g).is_equilibrium(x, &dk, phi)?;
    Ok(through_delta == check_equilibrium(g, x, k, phi)?)
}

/// Utility `Y × Y' -> D(R × R')` as a finite table of distributions.
pub type DistTable = BTreeMap<Value, Dist<RationalVec>>;

/// Lemma on determinising `⊗`: compares `ℓ(φ) ∈ E_{Δ(G⊗G')} x k#` with
/// `φ ∈ E_{Δ(G) ⊗ Δ(G')} x (⟨Dπ₁, Dπ₂⟩ ∘ k# ∘ ℓ)`, the right side decided
/// by the pure parallel rule. Returns `(lhs, rhs)`.
pub fn determinise_otimes_sides(
    g: &ProbOpenGame,
    h: &ProbOpenGame,
    phi: (&Dist<Value>, &Dist<Value>),
    x: (&Value, &Value),
    k: &DistTable,
) -> Result<(bool, bool), GameError> {
    let n1 = g.utility_dim();
    let n = n1 + h.utility_dim();
    let lookup = |y: &Value| -> Result<Dist<RationalVec>, GameError> {
        k.get(y).cloned().ok_or_else(|| GameError::MissingUtility(y.to_string()))
    };
    for y in crate::value::product(g.moves(), h.moves()) {
        if lookup(&y)?.support().any(|r| r.dim() != n) {
            return Err(GameError::DimensionMismatch { expected: n, found: 0 });
        }
    }
    let k_sharp = |alpha: &Dist<Value>| alpha.bind(|y| k.get(y).cloned().unwrap_or_else(|| Dist::point(RationalVec::zeros(n))));

    // left: Δ(G ⊗ G') with k#
    let gg = crate::compose::par(g, h);
    let xx = Value::pair(x.0.clone(), x.1.clone());
    let lhs = determinise(&gg).is_equilibrium(&xx, &k_sharp, &value_ell(phi.0, phi.1))?;

    // right: pure ⊗ of Δ(G), Δ(G'): each factor judged against the other's
    // fixed play, through ⟨Dπ₁, Dπ₂⟩ ∘ k# ∘ ℓ
    let (dg, dh) = (determinise(g), determinise(h));
    let (a1, a2) = (dg.play(phi.0, x.0), dh.play(phi.1, x.1));
    let k1 = |b1: &Dist<Value>| k_sharp(&value_ell(b1, &a2)).map(|r| r.slice(0..n1));
    let k2 = |b2: &Dist<Value>| k_sharp(&value_ell(&a1, b2)).map(|r| r.slice(n1..n));
    let rhs = dg.is_equilibrium(x.0, &k1, phi.0)? && dh.is_equilibrium(x.1, &k2, phi.1)?;
    Ok((lhs, rhs))
}

pub fn check_determinise_otimes(
    g: &ProbOpenGame,
    h: &ProbOpenGame,
    phi: (&Dist<Value>, &Dist<Value>),
    x: (&Value, &Value),
    k: &DistTable,
) -> Result<bool, GameError> {
    let (l, r) = determinise_otimes_sides(g, h, phi, x, k)?;
    Ok(l == r)
}

/// `Θ(G)`: equilibria are the point masses of pure equilibria.
pub fn theta(g: &PureOpenGame) -> ProbOpenGame {
    let inner = g.clone();
    let label = format!("Θ({})", g.label);
    let l2 = label.clone();
    let eq = EquilibriumSpec::Oracle(Arc::new(move |_, x, k, phi| {
        let ok = match phi.as_point() {
            Some(s) => inner.is_equilibrium(x, k, s)?,
            None => false,
        };
        Ok(if ok {
            Verdict::Member
        } else {
            Verdict::NotMember(Failure::Rejected { game: l2.clone() })
        })
    }));
    ProbOpenGame::custom(
        &label,
        g.interface.clone(),
        g.strategies.clone(),
        g.play.clone(),
        g.coutility.clone(),
        eq,
    )
    .expect("pure games have nonempty strategy sets")
}

/// `Ψ(H)`: `σ` is an equilibrium iff `η(σ)` is.
pub fn psi(h: &ProbOpenGame) -> PureOpenGame {
    psi_corrupted(h, Corruption::None)
}

/// Deliberate defects for exercising the adjunction checker.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Corruption {
    None,
    /// Never report this strategy as an equilibrium.
    Drop(Value),
    /// Always report this strategy as an equilibrium.
    Add(Value),
}

pub fn psi_corrupted(h: &ProbOpenGame, corruption: Corruption) -> PureOpenGame {
    let inner = h.clone();
    PureOpenGame::new(
        &format!("Ψ({})", h.label()),
        h.interface().clone(),
        h.strategies().to_vec(),
        h.play.clone(),
        h.coutility.clone(),
        Arc::new(move |x, k, s| match &corruption {
            Corruption::Drop(d) if d == s => Ok(false),
            Corruption::Add(a) if a == s => Ok(true),
            _ => check_equilibrium(&inner, x, k, &Dist::point(s.clone())),
        }),
    )
}

/// A map between payoff vector spaces.
#[derive(Clone)]
pub enum VecMap {
    Identity,
    Permute(CoordPerm),
    Fn(VecFn),
}

impl fmt::Debug for VecMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VecMap::Identity => write!(f, "Identity"),
            VecMap::Permute(p) => write!(f, "Permute({p:?})"),
            VecMap::Fn(_) => write!(f, "Fn"),
        }
    }
}

impl VecMap {
    pub fn apply(&self, r: &RationalVec) -> RationalVec {
        match self {
            VecMap::Identity => r.clone(),
            VecMap::Permute(p) => p.apply(r),
            VecMap::Fn(f) => f(r),
        }
    }

    /// `self ∘ then`: apply `then` first.
    pub fn after(&self, then: &VecMap) -> VecMap {
        match (self, then) {
            (VecMap::Identity, m) | (m, VecMap::Identity) => m.clone(),
            _ => {
                let (a, b) = (self.clone(), then.clone());
                VecMap::Fn(Arc::new(move |r| a.apply(&b.apply(r))))
            }
        }
    }

    /// Extensional equality on the sample vectors of dimension `dim`.
    pub fn ext_eq(&self, other: &VecMap, dim: usize) -> bool {
        sample_vectors(dim).iter().all(|r| self.apply(r) == other.apply(r))
    }
}

/// A total finite map; missing keys are reported, not defaulted.
pub type FiniteMap = BTreeMap<Value, Value>;

pub fn identity_map(carrier: &[Value]) -> FiniteMap {
    carrier.iter().map(|v| (v.clone(), v.clone())).collect()
}

fn compose_maps(first: &FiniteMap, second: &FiniteMap) -> FiniteMap {
    first
        .iter()
        .filter_map(|(a, b)| second.get(b).map(|c| (a.clone(), c.clone())))
        .collect()
}

/// A morphism of games `G -> G'`: a lens square plus a strategy map.
#[derive(Clone, Debug)]
pub struct GameMorphism {
    /// `X -> X'`
    pub f_p: FiniteMap,
    /// `S' -> S`
    pub f_c: VecMap,
    /// `Y -> Y'`
    pub g_p: FiniteMap,
    /// `R' -> R`
    pub g_c: VecMap,
    /// `Σ_G -> Σ_G'`
    pub h: FiniteMap,
}

impl GameMorphism {
    /// The identity morphism on a game's carriers.
    pub fn identity(states: &[Value], moves: &[Value], strategies: &[Value]) -> GameMorphism {
        GameMorphism {
            f_p: identity_map(states),
            f_c: VecMap::Identity,
            g_p: identity_map(moves),
            g_c: VecMap::Identity,
            h: identity_map(strategies),
        }
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &GameMorphism) -> GameMorphism {
        GameMorphism {
            f_p: compose_maps(&self.f_p, &next.f_p),
            f_c: self.f_c.after(&next.f_c),
            g_p: compose_maps(&self.g_p, &next.g_p),
            g_c: self.g_c.after(&next.g_c),
            h: compose_maps(&self.h, &next.h),
        }
    }

    /// Componentwise equality; the vector maps are compared on samples of
    /// the given dimensions of `S'` and `R'`.
    pub fn component_eq(&self, other: &GameMorphism, s_dim: usize, r_dim: usize) -> bool {
        self.f_p == other.f_p
            && self.g_p == other.g_p
            && self.h == other.h
            && self.f_c.ext_eq(&other.f_c, s_dim)
            && self.g_c.ext_eq(&other.g_c, r_dim)
    }
}

/// `Θ` and `Ψ` are the identity on morphism components.
pub fn theta_morphism(m: &GameMorphism) -> GameMorphism {
    m.clone()
}

pub fn psi_morphism(m: &GameMorphism) -> GameMorphism {
    m.clone()
}

/// Either kind of game, for [`check_morphism`].
#[derive(Clone, Copy, Debug)]
pub enum AnyGame<'a> {
    Pure(&'a PureOpenGame),
    Prob(&'a ProbOpenGame),
}

impl AnyGame<'_> {
    fn interface(&self) -> &Interface {
        match self {
            AnyGame::Pure(g) => &g.interface,
            AnyGame::Prob(g) => g.interface(),
        }
    }

    fn strategies(&self) -> &[Value] {
        match self {
            AnyGame::Pure(g) => &g.strategies,
            AnyGame::Prob(g) => g.strategies(),
        }
    }

    fn play(&self, s: &Value, x: &Value) -> Value {
        match self {
            AnyGame::Pure(g) => g.play(s, x),
            AnyGame::Prob(g) => g.play(s, x),
        }
    }

    fn coutility(&self, s: &Value, x: &Value, r: &RationalVec) -> RationalVec {
        match self {
            AnyGame::Pure(g) => g.coutility(s, x, r),
            AnyGame::Prob(g) => g.coutility(s, x, r),
        }
    }
}

/// Which condition of a morphism failed, and where.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MorphismFailure {
    /// A component map is not total on its carrier or lands outside it.
    Partial(String),
    /// Condition (1): the lens square does not commute.
    LensSquare(String),
    /// Condition (2): an equilibrium is not carried to an equilibrium.
    Equilibrium(String),
}

impl fmt::Display for MorphismFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MorphismFailure::Partial(s) => write!(f, "component map: {s}"),
            MorphismFailure::LensSquare(s) => write!(f, "lens square: {s}"),
            MorphismFailure::Equilibrium(s) => write!(f, "equilibrium preservation: {s}"),
        }
    }
}

/// Tables `Y -> Qⁿ`: every table with entries in `{-2, ..., 2}` when
/// `|Y| ≤ 3` and there are at most 4096 of them, else 64 tables drawn
/// from a fixed seed.
pub fn k_family(moves: &[Value], dim: usize) -> Vec<UtilityTable> {
    let cells = moves.len() * dim;
    let exhaustive = moves.len() <= 3 && 5u64.checked_pow(cells as u32).is_some_and(|c| c <= 4096);
    let to_table = |entries: &[i64]| {
        UtilityTable::new(
            moves
                .iter()
                .enumerate()
                .map(|(i, y)| (y.clone(), RationalVec::from_ints(&entries[i * dim..(i + 1) * dim]))),
        )
    };
    if exhaustive {
        let total = 5usize.pow(cells as u32);
        (0..total)
            .map(|mut code| {
                let entries: Vec<i64> = (0..cells)
                    .map(|_| {
                        let e = (code % 5) as i64 - 2;
                        code /= 5;
                        e
                    })
                    .collect();
                to_table(&entries)
            })
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f_6a3e);
        (0..64)
            .map(|_| {
                let entries: Vec<i64> = (0..cells).map(|_| rng.gen_range(-2..=2)).collect();
                to_table(&entries)
            })
            .collect()
    }
}

fn lookup<'m>(map: &'m FiniteMap, v: &Value, what: &str) -> Result<&'m Value, MorphismFailure> {
    map.get(v)
        .ok_or_else(|| MorphismFailure::Partial(format!("{what} undefined at {v}")))
}

/// Checks both conditions of a morphism `G -> G'`. Both games must be of
/// the same kind; probabilistic candidates range over the denominator-2 grid
/// over `D(Σ_G)` (denominator 4 when `|Σ_G| ≤ 3`).
pub fn check_morphism(m: &GameMorphism, g: AnyGame<'_>, g2: AnyGame<'_>) -> Result<Result<(), MorphismFailure>, GameError> {
    let (i1, i2) = (g.interface(), g2.interface());
    for (map, dom, cod, what) in [
        (&m.f_p, &i1.states, &i2.states, "f_P"),
        (&m.g_p, &i1.moves, &i2.moves, "g_P"),
        (&m.h, &g.strategies().to_vec(), &g2.strategies().to_vec(), "h"),
    ] {
        for a in dom {
            match map.get(a) {
                None => return Ok(Err(MorphismFailure::Partial(format!("{what} undefined at {a}")))),
                Some(b) if cod.binary_search(b).is_err() => {
                    return Ok(Err(MorphismFailure::Partial(format!("{what} sends {a} outside its codomain"))))
                }
                _ => {}
            }
        }
    }

    // (1) ⟨f_P, f_C⟩ ; G'(hσ)  =  G(σ) ; ⟨g_P, g_C⟩
    let samples = sample_vectors(i2.utility_alg.dim);
    for s in g.strategies() {
        let hs = lookup(&m.h, s, "h").map_err(|_| GameError::UnknownStrategy(s.to_string()))?;
        for x in &i1.states {
            let fx = &m.f_p[x];
            let left = g2.play(hs, fx);
            let right = &m.g_p[&g.play(s, x)];
            if left != *right {
                return Ok(Err(MorphismFailure::LensSquare(format!(
                    "view at strategy {s}, state {x}: {left} vs {right}"
                ))));
            }
            for r in &samples {
                let left = m.f_c.apply(&g2.coutility(hs, fx, r));
                let right = g.coutility(s, x, &m.g_c.apply(r));
                if left != right {
                    return Ok(Err(MorphismFailure::LensSquare(format!(
                        "update at strategy {s}, state {x}, utility {r}: {left} vs {right}"
                    ))));
                }
            }
        }
    }

    // (2) equilibria of G against g_C ∘ k ∘ g_P map into equilibria of G'
    let family = k_family(&i2.moves, i2.utility_alg.dim);
    let candidates: Vec<Dist<Value>> = match g {
        AnyGame::Pure(_) => g.strategies().iter().map(|s| Dist::point(s.clone())).collect(),
        AnyGame::Prob(_) => {
            let n = if g.strategies().len() <= 3 { 4 } else { 2 };
            simplex_grid(g.strategies(), n)
        }
    };
    for k in &family {
        let pulled = UtilityTable::from_fn(&i1.moves, |y| {
            m.g_c.apply(k.get(&m.g_p[y]).expect("k_family is total"))
        });
        for x in &i1.states {
            let fx = &m.f_p[x];
            for phi in &candidates {
                let (holds, image_holds) = match (g, g2) {
                    (AnyGame::Pure(a), AnyGame::Pure(b)) => {
                        let s = phi.as_point().expect("pure candidates are points");
                        (a.is_equilibrium(x, &pulled, s)?, b.is_equilibrium(fx, k, &m.h[s])?)
                    }
                    (AnyGame::Prob(a), AnyGame::Prob(b)) => {
                        let pushed = phi.map(|s| m.h[s].clone());
                        (check_equilibrium(a, x, &pulled, phi)?, check_equilibrium(b, fx, k, &pushed)?)
                    }
                    _ => {
                        return Err(GameError::InterfaceMismatch(
                            "a morphism relates two pure or two probabilistic games".into(),
                        ))
                    }
                };
                if holds && !image_holds {
                    return Ok(Err(MorphismFailure::Equilibrium(format!(
                        "candidate {phi} at state {x} against {k:?}"
                    ))));
                }
            }
        }
    }
    Ok(Ok(()))
}

/// Outcome of [`check_adjunction_triangles`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangleReport {
    pub comparisons: usize,
    pub failures: Vec<String>,
}

impl TriangleReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

fn ident_for(interface: &Interface, strategies: &[Value]) -> GameMorphism {
    GameMorphism::identity(&interface.states, &interface.moves, strategies)
}

/// Builds the unit `G -> ΨΘG` and counit `ΘΨH -> H`, checks they are
/// morphisms, and checks both triangle identities componentwise. `psi_fn`
/// stands in for `Ψ` so that a corrupted right adjoint can be exercised.
pub fn check_adjunction_triangles_with(
    g: &PureOpenGame,
    h: &ProbOpenGame,
    psi_fn: &dyn Fn(&ProbOpenGame) -> PureOpenGame,
) -> Result<TriangleReport, GameError> {
    let mut report = TriangleReport {
        comparisons: 0,
        failures: Vec::new(),
    };
    fn expect_morphism(
        report: &mut TriangleReport,
        name: &str,
        m: &GameMorphism,
        a: AnyGame<'_>,
        b: AnyGame<'_>,
    ) -> Result<(), GameError> {
        report.comparisons += 1;
        if let Err(f) = check_morphism(m, a, b)? {
            report.failures.push(format!("{name}: {f}"));
        }
        Ok(())
    }

    let theta_g = theta(g);
    let psi_theta_g = psi_fn(&theta_g);
    let unit_g = ident_for(&g.interface, &g.strategies);
    expect_morphism(&mut report, "unit G -> ΨΘG", &unit_g, AnyGame::Pure(g), AnyGame::Pure(&psi_theta_g))?;

    let psi_h = psi_fn(h);
    let theta_psi_h = theta(&psi_h);
    let counit_h = ident_for(h.interface(), h.strategies());
    expect_morphism(&mut report, "counit ΘΨH -> H", &counit_h, AnyGame::Prob(&theta_psi_h), AnyGame::Prob(h))?;

    // ε_{ΘG} ∘ Θ(η_G) = id_{ΘG}
    let theta_psi_theta_g = theta(&psi_theta_g);
    let theta_unit = theta_morphism(&unit_g);
    let counit_theta = ident_for(theta_g.interface(), theta_g.strategies());
    expect_morphism(&mut report, "Θ(unit)", &theta_unit, AnyGame::Prob(&theta_g), AnyGame::Prob(&theta_psi_theta_g))?;
    expect_morphism(&mut report, "counit at ΘG", &counit_theta, AnyGame::Prob(&theta_psi_theta_g), AnyGame::Prob(&theta_g))?;
    let left = theta_unit.then(&counit_theta);
    let id_theta_g = ident_for(theta_g.interface(), theta_g.strategies());
    let (sd, rd) = (theta_g.coutility_dim(), theta_g.utility_dim());
    report.comparisons += 1;
    if !left.component_eq(&id_theta_g, sd, rd) {
        report.failures.push("triangle ε_Θ ∘ Θη ≠ id".into());
    }

    // Ψ(ε_H) ∘ η_{ΨH} = id_{ΨH}
    let psi_theta_psi_h = psi_fn(&theta_psi_h);
    let unit_psi = ident_for(&psi_h.interface, &psi_h.strategies);
    let psi_counit = psi_morphism(&counit_h);
    expect_morphism(&mut report, "unit at ΨH", &unit_psi, AnyGame::Pure(&psi_h), AnyGame::Pure(&psi_theta_psi_h))?;
    expect_morphism(&mut report, "Ψ(counit)", &psi_counit, AnyGame::Pure(&psi_theta_psi_h), AnyGame::Pure(&psi_h))?;
    let right = unit_psi.then(&psi_counit);
    let id_psi_h = ident_for(&psi_h.interface, &psi_h.strategies);
    report.comparisons += 1;
    if !right.component_eq(&id_psi_h, h.coutility_dim(), h.utility_dim()) {
        report.failures.push("triangle Ψε ∘ η_Ψ ≠ id".into());
    }
    Ok(report)
}

pub fn check_adjunction_triangles(g: &PureOpenGame, h: &ProbOpenGame) -> Result<TriangleReport, GameError> {
    check_adjunction_triangles_with(g, h, &psi)
}

/// Hom-set bijection spot check: for every strategy map `h` (other
/// components identities), `(id, h)` is a morphism `ΘG -> H` iff it is a
/// morphism `G -> ΨH`. Requires equal interfaces and `|Σ| ≤ 3` on both
/// sides. Returns the number of maps compared, or the first disagreement.
pub fn check_hom_bijection(g: &PureOpenGame, h: &ProbOpenGame) -> Result<Result<usize, String>, GameError> {
    if g.interface != *h.interface() {
        return Err(GameError::InterfaceMismatch("hom-set check needs equal interfaces".into()));
    }
    if g.strategies.len() > 3 || h.strategies().len() > 3 {
        return Err(GameError::InterfaceMismatch("hom-set check is limited to |Σ| ≤ 3".into()));
    }
    let theta_g = theta(g);
    let psi_h = psi(h);
    let (src, dst) = (&g.strategies, h.strategies());
    let total = dst.len().pow(src.len() as u32);
    for mut code in 0..total {
        let mut map = FiniteMap::new();
        for s in src {
            map.insert(s.clone(), dst[code % dst.len()].clone());
            code /= dst.len();
        }
        let m = GameMorphism {
            h: map,
            ..ident_for(&g.interface, &[])
        };
        let left = check_morphism(&m, AnyGame::Prob(&theta_g), AnyGame::Prob(h))?.is_ok();
        let right = check_morphism(&m, AnyGame::Pure(g), AnyGame::Pure(&psi_h))?.is_ok();
        if left != right {
            return Ok(Err(format!("strategy map {:?}: Θ-side {left}, Ψ-side {right}", m.h)));
        }
    }
    Ok(Ok(total))
}

/// Whether `Ψ(Θ(G))` and `G` agree on play, coutility and equilibria over
/// the states, every strategy, sample utilities and the given tables.
pub fn psi_theta_roundtrip(g: &PureOpenGame, tables: &[UtilityTable]) -> Result<bool, GameError> {
    let back = psi(&theta(g));
    let samples = sample_vectors(g.interface.utility_alg.dim);
    for s in &g.strategies {
        for x in &g.interface.states {
            if g.play(s, x) != back.play(s, x) {
                return Ok(false);
            }
            if samples.iter().any(|r| g.coutility(s, x, r) != back.coutility(s, x, r)) {
                return Ok(false);
            }
            for k in tables {
                if g.is_equilibrium(x, k, s)? != back.is_equilibrium(x, k, s)? {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// The table `η ∘ k`.
pub fn dist_table_from_points(table: &UtilityTable) -> DistTable {
    table.iter().map(|(y, r)| (y.clone(), Dist::point(r.clone()))).collect()
}
