//! Executable laws: a seeded generator of small games and a suite that
//! checks the monad, algebra and category laws on them.
//!
//! Every case draws its own games from a ChaCha stream derived from the
//! seed and the case index, so reports are reproducible and independent of
//! how the cases are scheduled.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::compose::{
    lambda_contains, par, pushforward_of_lift_contains, relabel, seq, split_pair, transformed_table, value_ell,
    value_marginals, GameIso,
};
use crate::determinise::{
    check_adjunction_triangles, check_determinise_dk, check_determinise_otimes, check_hom_bijection,
    pure_decision_game, psi_theta_roundtrip, DistTable, PureOpenGame,
};
use crate::dist::{
    dmap, ell, eta, expect, is_independent, join, kleisli, marginals, q, simplex_grid, simplex_grid_size, Dist,
    FreeAlgebra, RationalVec, Rationals, VecAlgebra, Q,
};
use crate::game::{
    conditioned_decision_game, decision_game, identity_game, structural_game, unit_game, Bijection, CoordPerm,
    EquilibriumSpec, Failure, GameError, LiftStats, Membership, ProbOpenGame, UtilityTable, Verdict,
};
use crate::lens::sample_vectors;
use crate::value::{product, Value};

const NAMES: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

/// Largest number of strategy profiles a membership comparison enumerates.
const CANDIDATE_BUDGET: usize = 160;

/// Generator settings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenConfig {
    pub seed: u64,
    pub max_set_size: usize,
    pub max_payoff_abs: i64,
    pub cases: usize,
}

impl Default for GenConfig {
    fn default() -> GenConfig {
        GenConfig {
            seed: 0,
            max_set_size: 3,
            max_payoff_abs: 3,
            cases: 100,
        }
    }
}

/// Atomic game shapes the generator produces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    Atomic,
    Conditioned,
    Identity,
    Structural,
}

impl Shape {
    pub const ALL: [Shape; 4] = [Shape::Atomic, Shape::Conditioned, Shape::Identity, Shape::Structural];
}

/// Seeded source of random carriers, games, tables and distributions.
pub struct GameGen {
    rng: ChaCha8Rng,
    cfg: GenConfig,
}

impl GameGen {
    /// Stream `stream` of the generator seeded by `cfg.seed`.
    pub fn new(cfg: &GenConfig, stream: u64) -> GameGen {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(stream);
        GameGen { rng, cfg: cfg.clone() }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn carrier(&mut self, lo: usize, hi: usize) -> Vec<Value> {
        let hi = hi.clamp(1, NAMES.len());
        let n = self.rng.gen_range(lo.min(hi)..=hi);
        Value::atoms(&NAMES[..n])
    }

    pub fn shape(&mut self) -> Shape {
        *Shape::ALL.choose(&mut self.rng).expect("nonempty")
    }

    fn perm(&mut self, n: usize) -> Vec<usize> {
        let mut p: Vec<usize> = (0..n).collect();
        p.shuffle(&mut self.rng);
        p
    }

    /// A game of the given shape with payoff dimension `dim`. Conditioned
    /// games are kept to at most two observations and two moves when
    /// `small` is set.
    pub fn game(&mut self, shape: Shape, dim: usize, small: bool) -> ProbOpenGame {
        let max = if small { 2.min(self.cfg.max_set_size) } else { self.cfg.max_set_size };
        let states = match shape {
            Shape::Atomic => vec![Value::Unit],
            _ => self.carrier(1, max),
        };
        match shape {
            Shape::Atomic => self.game_on(&states, shape, dim),
            _ => self.game_on_with(&states, shape, dim, max),
        }
    }

    /// A game whose state set is `states`, for use after a game with those
    /// moves. `Atomic` needs `states = [()]`.
    pub fn game_on(&mut self, states: &[Value], shape: Shape, dim: usize) -> ProbOpenGame {
        let max = self.cfg.max_set_size;
        self.game_on_with(states, shape, dim, max)
    }

    fn game_on_with(&mut self, states: &[Value], shape: Shape, dim: usize, max: usize) -> ProbOpenGame {
        let alg = VecAlgebra::new(dim);
        let coord = self.rng.gen_range(0..dim.max(1));
        match shape {
            Shape::Atomic => {
                let moves = self.carrier(1, max);
                decision_game(moves, alg, coord).expect("valid decision game")
            }
            Shape::Conditioned => {
                // keep |moves|^|obs| ≤ 27 and |obs| · |moves| ≤ 16
                let s = states.len() as u32;
                let cap = (1..=max).rev().find(|m| (*m as u64).pow(s) <= 27 && states.len() * m <= 16).unwrap_or(1);
                let moves = self.carrier(1, cap);
                conditioned_decision_game(states.to_vec(), moves, alg, coord).expect("valid conditioned game")
            }
            Shape::Identity => identity_game(states.to_vec(), alg).expect("valid identity game"),
            Shape::Structural => {
                let p = self.perm(states.len());
                let fx = Bijection::from_pairs(states.iter().cloned().zip(p.iter().map(|&i| states[i].clone())))
                    .expect("permutation");
                let fs = CoordPerm::new(self.perm(dim)).expect("permutation");
                structural_game(&fx, &fs).expect("valid structural game")
            }
        }
    }

    /// A utility table with integer entries in `[-max_payoff_abs, max_payoff_abs]`.
    pub fn table(&mut self, moves: &[Value], dim: usize) -> UtilityTable {
        let m = self.cfg.max_payoff_abs;
        let entries: Vec<(Value, RationalVec)> = moves
            .iter()
            .map(|y| {
                let xs: Vec<i64> = (0..dim).map(|_| self.rng.gen_range(-m..=m)).collect();
                (y.clone(), RationalVec::from_ints(&xs))
            })
            .collect();
        UtilityTable::new(entries)
    }

    /// A distribution on `items` with denominator at most `max_den`.
    pub fn dist<A: Ord + Clone + fmt::Debug>(&mut self, items: &[A], max_den: i64) -> Dist<A> {
        let d = self.rng.gen_range(1..=max_den);
        let mut counts = vec![0i64; items.len()];
        for _ in 0..d {
            counts[self.rng.gen_range(0..items.len())] += 1;
        }
        Dist::new(
            items
                .iter()
                .zip(counts)
                .filter(|(_, c)| *c > 0)
                .map(|(a, c)| (a.clone(), q(c, d))),
        )
        .expect("weights sum to one")
    }

    pub fn pure_decision(&mut self, dim: usize) -> PureOpenGame {
        let moves = self.carrier(1, self.cfg.max_set_size);
        let coord = self.rng.gen_range(0..dim);
        pure_decision_game(moves, VecAlgebra::new(dim), coord).expect("valid pure decision game")
    }
}

/// One random game of the given shape from `cfg.seed`.
pub fn gen_game(cfg: &GenConfig, shape: Shape) -> ProbOpenGame {
    let mut g = GameGen::new(cfg, u64::MAX);
    let dim = g.rng().gen_range(1..=2);
    g.game(shape, dim, false)
}

/// Which tensor to test: the real one, or a deliberately broken one used to
/// check that the suite notices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Composer {
    Sound,
    /// Each side of a parallel game looks its payoffs up with the joint
    /// move in the wrong order.
    Faulty,
}

impl Composer {
    pub fn par(self, g: &ProbOpenGame, h: &ProbOpenGame) -> ProbOpenGame {
        match self {
            Composer::Sound => par(g, h),
            Composer::Faulty => faulty_par(g, h),
        }
    }
}

fn faulty_par(g: &ProbOpenGame, h: &ProbOpenGame) -> ProbOpenGame {
    let mut out = par(g, h);
    let label = out.label.clone();
    let (g, h) = (Arc::new(g.clone()), Arc::new(h.clone()));
    out.eq = EquilibriumSpec::Oracle(Arc::new(move |ctx, x, k, phi| {
        let (x1, x2) = split_pair(x)?;
        let (phi1, phi2) = value_marginals(phi)?;
        if value_ell(&phi1, &phi2) != *phi {
            return Ok(Verdict::NotMember(Failure::NotIndependent { game: label.clone() }));
        }
        let n1 = g.utility_dim();
        let n = n1 + h.utility_dim();
        let alpha2 = phi2.map(|s| h.play(s, x2));
        let k1 = transformed_table(g.moves(), &alpha2, k, false, 0..n1)?;
        let v1 = ctx.check(&g, x1, &k1, &phi1)?;
        if !v1.is_member() {
            return Ok(v1);
        }
        let alpha1 = phi1.map(|s| g.play(s, x1));
        let k2 = transformed_table(h.moves(), &alpha1, k, true, n1..n)?;
        ctx.check(&h, x2, &k2, &phi2)
    }));
    out
}

/// A failed comparison.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub case: usize,
    pub detail: String,
}

/// A comparison that could not be decided.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Skip {
    pub case: usize,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LawResult {
    pub law: String,
    pub cases: usize,
    pub comparisons: usize,
    pub failures: Vec<Counterexample>,
    pub skips: Vec<Skip>,
}

/// How many sequential-associativity cases had a lifted-predicate query
/// decided by each rule.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RuleUsage {
    pub flow: usize,
    pub point_mass: usize,
    pub witness: usize,
}

/// `λ ∘ η_D ≠ η_P`: a member of `λ(η A)` that is not a point mass.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NonUnitWitness {
    pub set: Vec<String>,
    pub candidate: String,
    pub in_lift: bool,
    pub is_point_mass: bool,
}

impl NonUnitWitness {
    pub fn holds(&self) -> bool {
        self.in_lift && !self.is_point_mass
    }
}

impl fmt::Display for NonUnitWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "A = {{{}}}: {} {} λ(η A), and it {} a point mass, so λ(η A) ≠ {{η a | a ∈ A}}",
            self.set.join(", "),
            self.candidate,
            if self.in_lift { "∈" } else { "∉" },
            if self.is_point_mass { "is" } else { "is not" },
        )
    }
}

/// Builds and machine-checks the witness on `A = {H, T}`.
pub fn non_unit_witness() -> NonUnitWitness {
    let set: BTreeSet<Value> = Value::atoms(&["H", "T"]).into_iter().collect();
    let alpha = Dist::point(set.clone());
    let u = Dist::uniform(set.iter().cloned());
    NonUnitWitness {
        set: set.iter().map(|v| v.to_string()).collect(),
        candidate: u.to_string(),
        in_lift: lambda_contains(&alpha, &u),
        is_point_mass: set.iter().any(|a| Dist::point(a.clone()) == u),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub seed: u64,
    pub cases: usize,
    pub laws: Vec<LawResult>,
    pub seq_rules: RuleUsage,
    pub non_unit_witness: NonUnitWitness,
}

impl LawReport {
    pub fn failures(&self) -> usize {
        self.laws.iter().map(|l| l.failures.len()).sum::<usize>() + usize::from(!self.non_unit_witness.holds())
    }

    pub fn skips(&self) -> usize {
        self.laws.iter().map(|l| l.skips.len()).sum()
    }

    pub fn law(&self, name: &str) -> Option<&LawResult> {
        self.laws.iter().find(|l| l.law == name)
    }

    /// Skipped sequential-associativity cases over all of them.
    pub fn seq_skip_ratio(&self) -> f64 {
        match self.law("seq-assoc") {
            Some(l) if l.cases > 0 => l.skips.len() as f64 / l.cases as f64,
            _ => 0.0,
        }
    }

    pub fn is_vacuous(&self) -> bool {
        self.cases == 0
    }
}

/// Law names in report order.
pub const LAWS: [&str; 14] = [
    "monad",
    "strength",
    "algebra",
    "par-assoc",
    "seq-assoc",
    "seq-identity",
    "par-unit",
    "interchange",
    "id-tensor",
    "symmetry",
    "lift-naturality",
    "determinise-dk",
    "determinise-otimes",
    "adjunction",
];

/// One law on one case.
enum Outcome {
    Pass(usize),
    Fail(usize, String),
    Skip(usize, String),
}

fn settle(r: Result<Outcome, GameError>) -> Outcome {
    match r {
        Ok(o) => o,
        Err(e @ GameError::UnsupportedComposition { .. }) => Outcome::Skip(0, e.to_string()),
        Err(e) => Outcome::Fail(0, format!("error: {e}")),
    }
}

struct CaseResult {
    outcomes: Vec<Outcome>,
    seq_stats: LiftStats,
}

/// Runs every law on `cfg.cases` generated cases.
pub fn run_law_suite(cfg: &GenConfig) -> LawReport {
    run_law_suite_with(cfg, Composer::Sound)
}

pub fn run_law_suite_with(cfg: &GenConfig, composer: Composer) -> LawReport {
    let results: Vec<CaseResult> = (0..cfg.cases)
        .into_par_iter()
        .map(|i| run_case(cfg, i, composer))
        .collect();
    let mut laws: Vec<LawResult> = LAWS
        .iter()
        .map(|name| LawResult {
            law: name.to_string(),
            ..LawResult::default()
        })
        .collect();
    let mut seq_rules = RuleUsage::default();
    for (case, r) in results.into_iter().enumerate() {
        for (law, o) in laws.iter_mut().zip(r.outcomes) {
            law.cases += 1;
            match o {
                Outcome::Pass(n) => law.comparisons += n,
                Outcome::Fail(n, detail) => {
                    law.comparisons += n;
                    law.failures.push(Counterexample { case, detail });
                }
                Outcome::Skip(n, reason) => {
                    law.comparisons += n;
                    law.skips.push(Skip { case, reason });
                }
            }
        }
        seq_rules.flow += usize::from(r.seq_stats.flow > 0);
        seq_rules.point_mass += usize::from(r.seq_stats.point_mass > 0);
        seq_rules.witness += usize::from(r.seq_stats.witness > 0);
    }
    LawReport {
        seed: cfg.seed,
        cases: cfg.cases,
        laws,
        seq_rules,
        non_unit_witness: non_unit_witness(),
    }
}

fn run_case(cfg: &GenConfig, case: usize, composer: Composer) -> CaseResult {
    // one stream per (case, law) so laws do not perturb each other's draws
    let stream = |law: usize| (case as u64) * 64 + law as u64;
    let mut seq_stats = LiftStats::default();
    let mut outcomes = Vec::with_capacity(LAWS.len());
    for (i, name) in LAWS.iter().enumerate() {
        let mut gen = GameGen::new(cfg, stream(i));
        let r = match *name {
            "monad" => monad_laws(&mut gen),
            "strength" => strength_laws(&mut gen),
            "algebra" => algebra_laws(&mut gen),
            "par-assoc" => par_assoc(&mut gen, composer),
            "seq-assoc" => seq_assoc(&mut gen, &mut seq_stats),
            "seq-identity" => seq_identity(&mut gen),
            "par-unit" => par_unit(&mut gen, composer),
            "interchange" => interchange(&mut gen, composer),
            "id-tensor" => id_tensor(&mut gen, composer),
            "symmetry" => symmetry(&mut gen, composer),
            "lift-naturality" => lift_naturality(&mut gen),
            "determinise-dk" => determinise_dk(&mut gen),
            "determinise-otimes" => determinise_otimes(&mut gen),
            "adjunction" => adjunction(&mut gen),
            _ => unreachable!("unknown law {name}"),
        };
        outcomes.push(settle(r));
    }
    CaseResult { outcomes, seq_stats }
}

/// Accumulates comparisons and stops at the first disagreement.
struct Tally(usize);

impl Tally {
    fn eq<T: PartialEq + fmt::Debug>(&mut self, what: &str, a: T, b: T) -> Result<(), String> {
        self.0 += 1;
        if a == b {
            Ok(())
        } else {
            Err(format!("{what}: {a:?} vs {b:?}"))
        }
    }

    fn finish(self, r: Result<(), String>) -> Outcome {
        match r {
            Ok(()) => Outcome::Pass(self.0),
            Err(e) => Outcome::Fail(self.0, e),
        }
    }
}

fn random_kleisli(gen: &mut GameGen, dom: &[Value], cod: &[Value]) -> Vec<(Value, Dist<Value>)> {
    dom.iter().map(|a| (a.clone(), gen.dist(cod, 4))).collect()
}

fn lookup<'t>(table: &'t [(Value, Dist<Value>)], a: &Value) -> &'t Dist<Value> {
    &table.iter().find(|(k, _)| k == a).expect("total table").1
}

fn monad_laws(gen: &mut GameGen) -> Result<Outcome, GameError> {
    let xs = gen.carrier(1, 3);
    let ys = gen.carrier(1, 3);
    let zs = gen.carrier(1, 3);
    let d = gen.dist(&xs, 6);
    let f = random_kleisli(gen, &xs, &ys);
    let g = random_kleisli(gen, &ys, &zs);
    let (f, g) = (|a: &Value| lookup(&f, a).clone(), |b: &Value| lookup(&g, b).clone());
    let mut t = Tally(0);
    let r = (|| {
        t.eq("join ∘ η = id", join(&eta(d.clone())), d.clone())?;
        t.eq("join ∘ Dη = id", join(&dmap(|a: &Value| eta(a.clone()), &d)), d.clone())?;
        for a in &xs {
            t.eq("f* ∘ η = f", kleisli(f, &eta(a.clone())), f(a))?;
        }
        t.eq(
            "kleisli associativity",
            kleisli(g, &kleisli(f, &d)),
            kleisli(|a: &Value| kleisli(g, &f(a)), &d),
        )?;
        let ddd = dmap(|a: &Value| dmap(|b: &Value| g(b), &f(a)), &d);
        t.eq("join ∘ join = join ∘ D join", join(&join(&ddd)), join(&dmap(join, &ddd)))?;
        let (u, v) = (|a: &Value| pair(a, a), |p: &Value| p.snd().cloned().unwrap_or(Value::Unit));
        t.eq("D(v ∘ u) = Dv ∘ Du", dmap(|a: &Value| v(&u(a)), &d), dmap(v, &dmap(u, &d)))
    })();
    Ok(t.finish(r))
}

fn strength_laws(gen: &mut GameGen) -> Result<Outcome, GameError> {
    let xs = gen.carrier(1, 3);
    let ys = gen.carrier(1, 3);
    let (a, b) = (gen.dist(&xs, 6), gen.dist(&ys, 6));
    let f: Vec<(Value, Value)> = xs.iter().map(|x| (x.clone(), ys[gen.rng().gen_range(0..ys.len())].clone())).collect();
    let f = |x: &Value| f.iter().find(|(k, _)| k == x).expect("total").1.clone();
    let mut t = Tally(0);
    let r = (|| {
        let ab = ell(&a, &b);
        t.eq("ℓ commutes with swap", dmap(|(x, y): &(Value, Value)| (y.clone(), x.clone()), &ell(&b, &a)), ab.clone())?;
        t.eq("marginals of ℓ", marginals(&ab), (a.clone(), b.clone()))?;
        t.eq("ℓ is independent", is_independent(&ab), true)?;
        t.eq(
            "ℓ natural",
            ell(&dmap(f, &a), &b),
            dmap(|(x, y): &(Value, Value)| (f(x), y.clone()), &ab),
        )?;
        t.eq("ℓ with a point", ell(&eta(xs[0].clone()), &b), dmap(|y: &Value| (xs[0].clone(), y.clone()), &b))
    })();
    Ok(t.finish(r))
}

fn algebra_laws(gen: &mut GameGen) -> Result<Outcome, GameError> {
    let dim = gen.rng().gen_range(1..=3);
    let alg = VecAlgebra::new(dim);
    let m = gen.cfg.max_payoff_abs;
    let vecs: Vec<RationalVec> = (0..3)
        .map(|_| RationalVec::new((0..dim).map(|_| q(gen.rng().gen_range(-m..=m), gen.rng().gen_range(1..=3))).collect()))
        .collect();
    let inner: Vec<Dist<RationalVec>> = (0..3).map(|_| gen.dist(&vecs, 4)).collect();
    let dd = gen.dist(&inner, 4);
    let rats: Vec<Q> = vecs.iter().map(|v| v[0].clone()).collect();
    let rd: Vec<Dist<Q>> = (0..2).map(|_| gen.dist(&rats, 4)).collect();
    let rdd = gen.dist(&rd, 3);
    let atoms = gen.carrier(1, 3);
    let fd: Vec<Dist<Value>> = (0..2).map(|_| gen.dist(&atoms, 4)).collect();
    let fdd = gen.dist(&fd, 3);
    let free = FreeAlgebra::<Value>::new();
    let mut t = Tally(0);
    let r = (|| {
        for v in &vecs {
            t.eq("expect ∘ η = id", expect(&alg, &eta(v.clone())), v.clone())?;
        }
        t.eq("expect ∘ join", expect(&alg, &join(&dd)), expect(&alg, &dmap(|d| expect(&alg, d), &dd)))?;
        t.eq("ℚ: expect ∘ join", expect(&Rationals, &join(&rdd)), expect(&Rationals, &dmap(|d| expect(&Rationals, d), &rdd)))?;
        t.eq("D(A): expect ∘ η", expect(&free, &eta(fd[0].clone())), fd[0].clone())?;
        let fddd = dmap(|d: &Dist<Value>| eta(d.clone()), &fdd);
        t.eq("D(A): expect ∘ join", expect(&free, &join(&fddd)), expect(&free, &dmap(|d| expect(&free, d), &fddd)))
    })();
    Ok(t.finish(r))
}

/// Per-component candidate grids: the finest denominator `≤ 4` whose
/// product stays within [`CANDIDATE_BUDGET`], falling back to a seeded
/// sample of pure profiles.
fn component_grids(gen: &mut GameGen, games: &[&ProbOpenGame], pure_only: &[bool]) -> Vec<Vec<Dist<Value>>> {
    for d in (1..=4u32).rev() {
        let size: u128 = games
            .iter()
            .zip(pure_only)
            .map(|(g, &p)| if p { g.strategies().len() as u128 } else { simplex_grid_size(g.strategies().len(), d) })
            .product();
        if size <= CANDIDATE_BUDGET as u128 {
            let grids: Vec<Vec<Dist<Value>>> = games
                .iter()
                .zip(pure_only)
                .map(|(g, &p)| if p { simplex_grid(g.strategies(), 1) } else { simplex_grid(g.strategies(), d) })
                .collect();
            let mut out: Vec<Vec<Dist<Value>>> = vec![Vec::new()];
            for grid in grids {
                out = out
                    .into_iter()
                    .flat_map(|prefix| {
                        grid.iter().map(move |x| {
                            let mut p = prefix.clone();
                            p.push(x.clone());
                            p
                        })
                    })
                    .collect();
            }
            return out;
        }
    }
    (0..CANDIDATE_BUDGET)
        .map(|_| {
            games
                .iter()
                .map(|g| Dist::point(g.strategies().choose(gen.rng()).expect("nonempty").clone()))
                .collect()
        })
        .collect()
}

/// A correlated candidate on a pair-of-strategies game, when there is one.
fn correlated(g: &ProbOpenGame) -> Option<Dist<Value>> {
    let pairs: Vec<&Value> = g.strategies().iter().collect();
    let a = pairs.first()?;
    let b = pairs.iter().find(|s| s.fst() != a.fst() && s.snd() != a.snd())?;
    Dist::new([((*a).clone(), q(1, 2)), ((*b).clone(), q(1, 2))]).ok()
}

/// The zero table and two random ones.
fn tables(gen: &mut GameGen, g: &ProbOpenGame) -> Vec<UtilityTable> {
    let zero = gen.table(g.moves(), g.utility_dim());
    let zero = UtilityTable::new(zero.iter().map(|(y, r)| (y.clone(), RationalVec::zeros(r.dim()))));
    vec![zero, gen.table(g.moves(), g.utility_dim()), gen.table(g.moves(), g.utility_dim())]
}

/// Extensional comparison: interfaces, strategy sets, play and coutility at
/// every strategy and state (coutility on the sample vectors), and
/// membership of every candidate against every table at every state.
fn ext_compare(
    lhs: &ProbOpenGame,
    rhs: &ProbOpenGame,
    candidates: &[Dist<Value>],
    ks: &[UtilityTable],
    stats: Option<&mut LiftStats>,
) -> Result<Outcome, GameError> {
    let mut t = Tally(0);
    let ctx = Membership::new();
    let r = (|| -> Result<Result<(), String>, GameError> {
        for (what, a, b) in [
            ("states", lhs.states(), rhs.states()),
            ("moves", lhs.moves(), rhs.moves()),
            ("strategies", lhs.strategies(), rhs.strategies()),
        ] {
            if let Err(e) = t.eq(what, a, b) {
                return Ok(Err(e));
            }
        }
        if let Err(e) = t.eq("dimensions", (lhs.utility_dim(), lhs.coutility_dim()), (rhs.utility_dim(), rhs.coutility_dim())) {
            return Ok(Err(e));
        }
        let samples = sample_vectors(lhs.utility_dim());
        for s in rhs.strategies() {
            for x in rhs.states() {
                if let Err(e) = t.eq(&format!("play at ({s}, {x})"), lhs.play(s, x), rhs.play(s, x)) {
                    return Ok(Err(e));
                }
                for v in &samples {
                    if let Err(e) = t.eq(&format!("coutility at ({s}, {x}, {v})"), lhs.coutility(s, x, v), rhs.coutility(s, x, v)) {
                        return Ok(Err(e));
                    }
                }
            }
        }
        for x in rhs.states() {
            for k in ks {
                for phi in candidates {
                    let a = ctx.check(lhs, x, k, phi)?.is_member();
                    let b = ctx.check(rhs, x, k, phi)?.is_member();
                    if let Err(e) = t.eq(&format!("membership of {phi} at {x} against {k:?}"), a, b) {
                        return Ok(Err(e));
                    }
                }
            }
        }
        Ok(Ok(()))
    })();
    if let Some(st) = stats {
        let s = ctx.stats();
        st.flow += s.flow;
        st.point_mass += s.point_mass;
        st.witness += s.witness;
    }
    match r {
        Ok(r) => Ok(t.finish(r)),
        Err(e @ GameError::UnsupportedComposition { .. }) => Ok(Outcome::Skip(t.0, e.to_string())),
        Err(e) => Err(e),
    }
}

fn pair(a: &Value, b: &Value) -> Value {
    Value::pair(a.clone(), b.clone())
}

/// `((a, b), c) ↦ (a, (b, c))` on a carrier of left-nested triples.
fn reassoc(carrier: &[Value]) -> Result<Bijection, GameError> {
    Bijection::from_fn(carrier, |v| {
        let (ab, c) = v.as_pair().expect("pair");
        let (a, b) = ab.as_pair().expect("pair");
        pair(a, &pair(b, c))
    })
}

fn swap_pairs(carrier: &[Value]) -> Result<Bijection, GameError> {
    Bijection::from_fn(carrier, |v| {
        let (a, b) = v.as_pair().expect("pair");
        pair(b, a)
    })
}

fn iso(g: &ProbOpenGame, strategies: Bijection, states: Bijection, moves: Bijection) -> GameIso {
    GameIso {
        strategies,
        states,
        moves,
        ..GameIso::identity(g)
    }
}

fn par_assoc(gen: &mut GameGen, composer: Composer) -> Result<Outcome, GameError> {
    let dims: Vec<usize> = (0..3).map(|_| gen.rng().gen_range(1..=2)).collect();
    let gs: Vec<ProbOpenGame> = dims
        .iter()
        .map(|&d| {
            let shape = gen.shape();
            gen.game(shape, d, true)
        })
        .collect();
    let left = composer.par(&composer.par(&gs[0], &gs[1]), &gs[2]);
    let right = composer.par(&gs[0], &composer.par(&gs[1], &gs[2]));
    let moved = relabel(
        &left,
        &iso(&left, reassoc(left.strategies())?, reassoc(left.states())?, reassoc(left.moves())?),
    )?;
    let refs: Vec<&ProbOpenGame> = gs.iter().collect();
    let mut candidates: Vec<Dist<Value>> = component_grids(gen, &refs, &[false; 3])
        .into_iter()
        .map(|c| value_ell(&c[0], &value_ell(&c[1], &c[2])))
        .collect();
    candidates.extend(correlated(&right));
    let ks = tables(gen, &right);
    ext_compare(&moved, &right, &candidates, &ks, None)
}

fn dim_of(g: &ProbOpenGame) -> usize {
    g.utility_dim()
}

fn seq_assoc(gen: &mut GameGen, stats: &mut LiftStats) -> Result<Outcome, GameError> {
    let dim = gen.rng().gen_range(1..=2);
    let shape = gen.shape();
    let a = gen.game(shape, dim, true);
    let next = |gen: &mut GameGen, prev: &ProbOpenGame| {
        let shape = match gen.rng().gen_range(0..4) {
            0 => Shape::Identity,
            1 => Shape::Structural,
            _ => Shape::Conditioned,
        };
        gen.game_on(prev.moves(), shape, dim_of(prev))
    };
    let b = next(gen, &a);
    let c = next(gen, &b);
    let left = seq(&seq(&a, &b)?, &c)?;
    let right = seq(&a, &seq(&b, &c)?)?;
    let moved = relabel(
        &left,
        &iso(&left, reassoc(left.strategies())?, Bijection::identity(left.states()), Bijection::identity(left.moves())),
    )?;
    // the first component is mixed only when it has a single strategy, so
    // the mixed state it feeds to `b ; c` is a point mass
    let first_pure = a.strategies().len() > 1;
    let candidates: Vec<Dist<Value>> = component_grids(gen, &[&a, &b, &c], &[first_pure, false, false])
        .into_iter()
        .map(|c| value_ell(&c[0], &value_ell(&c[1], &c[2])))
        .collect();
    let ks = tables(gen, &right);
    ext_compare(&moved, &right, &candidates, &ks, Some(stats))
}

fn seq_identity(gen: &mut GameGen) -> Result<Outcome, GameError> {
    let dim = gen.rng().gen_range(1..=2);
    let shape = gen.shape();
    let g = gen.game(shape, dim, false);
    let id_x = identity_game(g.states().to_vec(), VecAlgebra::new(g.coutility_dim()))?;
    let id_y = identity_game(g.moves().to_vec(), VecAlgebra::new(g.utility_dim()))?;
    let candidates: Vec<Dist<Value>> = component_grids(gen, &[&g], &[false]).into_iter().map(|mut c| c.remove(0)).collect();
    let ks = tables(gen, &g);
    let mut total = 0;
    for (composite, unit_left) in [(seq(&id_x, &g)?, true), (seq(&g, &id_y)?, false)] {
        let strip = Bijection::from_fn(composite.strategies(), |v| {
            if unit_left { v.snd() } else { v.fst() }.cloned().expect("pair")
        })?;
        let ident_states = Bijection::identity(composite.states());
        let ident_moves = Bijection::identity(composite.moves());
        let moved = relabel(&composite, &iso(&composite, strip, ident_states, ident_moves))?;
        match ext_compare(&moved, &g, &candidates, &ks, None)? {
            Outcome::Pass(n) => total += n,
            Outcome::Fail(n, e) => return Ok(Outcome::Fail(total + n, format!("{}: {e}", if unit_left { "id ; G" } else { "G ; id" }))),
            s @ Outcome::Skip(..) => return Ok(s),
        }
    }
    Ok(Outcome::Pass(total))
}

fn par_unit(gen: &mut GameGen, composer: Composer) -> Result<Outcome, GameError> {
    let dim = gen.rng().gen_range(1..=2);
    let shape = gen.shape();
    let g = gen.game(shape, dim, false);
    let unit = unit_game();
    let candidates: Vec<Dist<Value>> = component_grids(gen, &[&g], &[false]).into_iter().map(|mut c| c.remove(0)).collect();
    let ks = tables(gen, &g);
    let mut total = 0;
    for unit_left in [true, false] {
        let composite = if unit_left { composer.par(&unit, &g) } else { composer.par(&g, &unit) };
        let strip = |carrier: &[Value]| {
            Bijection::from_fn(carrier, |v| if unit_left { v.snd() } else { v.fst() }.cloned().expect("pair"))
        };
        let moved = relabel(
            &composite,
            &iso(&composite, strip(composite.strategies())?, strip(composite.states())?, strip(composite.moves())?),
        )?;
        match ext_compare(&moved, &g, &candidates, &ks, None)? {
            Outcome::Pass(n) => total += n,
            Outcome::Fail(n, e) => return Ok(Outcome::Fail(total + n, format!("{}: {e}", if unit_left { "I ⊗ G" } else { "G ⊗ I" }))),
            s @ Outcome::Skip(..) => return Ok(s),
        }
    }
    Ok(Outcome::Pass(total))
}

/// `(G ⊗ G') ; (H ⊗ H') ≅ (G ; H) ⊗ (G' ; H')` on play and coutility.
fn interchange(gen: &mut GameGen, composer: Composer) -> Result<Outcome, GameError> {
    let (d1, d2) = (gen.rng().gen_range(1..=2), gen.rng().gen_range(1..=2));
    let (s1, s2) = (gen.shape(), gen.shape());
    let g1 = gen.game(s1, d1, true);
    let g2 = gen.game(s2, d2, true);
    let h1 = gen.game_on(g1.moves(), Shape::Conditioned, d1);
    let h2 = gen.game_on(g2.moves(), Shape::Structural, d2);
    let left = seq(&composer.par(&g1, &g2), &composer.par(&h1, &h2))?;
    let right = composer.par(&seq(&g1, &h1)?, &seq(&g2, &h2)?);
    let regroup = Bijection::from_fn(left.strategies(), |v| {
        let (gg, hh) = v.as_pair().expect("pair");
        let ((a, b), (c, d)) = (gg.as_pair().expect("pair"), hh.as_pair().expect("pair"));
        pair(&pair(a, c), &pair(b, d))
    })?;
    let moved = relabel(
        &left,
        &iso(&left, regroup, Bijection::identity(left.states()), Bijection::identity(left.moves())),
    )?;
    ext_compare(&moved, &right, &[], &[], None)
}

/// `id_X ⊗ id_X' ≅ id_{X × X'}`.
fn id_tensor(gen: &mut GameGen, composer: Composer) -> Result<Outcome, GameError> {
    let (d1, d2) = (gen.rng().gen_range(1..=2), gen.rng().gen_range(1..=2));
    let xs = gen.carrier(1, 3);
    let ys = gen.carrier(1, 3);
    let left = composer.par(&identity_game(xs.clone(), VecAlgebra::new(d1))?, &identity_game(ys.clone(), VecAlgebra::new(d2))?);
    let right = identity_game(product(&xs, &ys), VecAlgebra::new(d1 + d2))?;
    let collapse = Bijection::from_fn(left.strategies(), |_| Value::Unit)?;
    let moved = relabel(
        &left,
        &iso(&left, collapse, Bijection::identity(left.states()), Bijection::identity(left.moves())),
    )?;
    let ks = tables(gen, &right);
    ext_compare(&moved, &right, &[Dist::point(Value::Unit)], &ks, None)
}

/// The braiding: `G ⊗ G'` transported along the swap equals `G' ⊗ G`, and
/// the swap is its own inverse.
fn symmetry(gen: &mut GameGen, composer: Composer) -> Result<Outcome, GameError> {
    let (d1, d2) = (gen.rng().gen_range(1..=2), gen.rng().gen_range(1..=2));
    let (s1, s2) = (gen.shape(), gen.shape());
    let g = gen.game(s1, d1, true);
    let h = gen.game(s2, d2, true);
    let gh = composer.par(&g, &h);
    let hg = composer.par(&h, &g);
    let braid = GameIso {
        strategies: swap_pairs(gh.strategies())?,
        states: swap_pairs(gh.states())?,
        moves: swap_pairs(gh.moves())?,
        coutility: CoordPerm::swap_blocks(g.coutility_dim(), h.coutility_dim()),
        utility: CoordPerm::swap_blocks(g.utility_dim(), h.utility_dim()),
    };
    let moved = relabel(&gh, &braid)?;
    let candidates: Vec<Dist<Value>> = component_grids(gen, &[&h, &g], &[false, false])
        .into_iter()
        .map(|c| value_ell(&c[0], &c[1]))
        .collect();
    let ks = tables(gen, &hg);
    let first = ext_compare(&moved, &hg, &candidates, &ks, None)?;
    let Outcome::Pass(n) = first else { return Ok(first) };

    // σ ; σ = id on X × Y
    let xy = product(g.states(), h.states());
    let yx = product(h.states(), g.states());
    let (c1, c2) = (g.coutility_dim(), h.coutility_dim());
    let there = structural_game(&swap_pairs(&xy)?, &CoordPerm::swap_blocks(c2, c1))?;
    let back = structural_game(&swap_pairs(&yx)?, &CoordPerm::swap_blocks(c1, c2))?;
    let round = seq(&there, &back)?;
    let collapse = Bijection::from_fn(round.strategies(), |_| Value::Unit)?;
    let round = relabel(
        &round,
        &iso(&round, collapse, Bijection::identity(round.states()), Bijection::identity(round.moves())),
    )?;
    let id = identity_game(xy, VecAlgebra::new(c1 + c2))?;
    let ks = tables(gen, &id);
    Ok(match ext_compare(&round, &id, &[Dist::point(Value::Unit)], &ks, None)? {
        Outcome::Pass(m) => Outcome::Pass(n + m),
        Outcome::Fail(m, e) => Outcome::Fail(n + m, format!("σ ; σ: {e}")),
        Outcome::Skip(m, e) => Outcome::Skip(n + m, e),
    })
}

/// `𝒫(f) ∘ λ = λ ∘ D𝒫(f)` on support-characterized predicates.
fn lift_naturality(gen: &mut GameGen) -> Result<Outcome, GameError> {
    let universe = gen.carrier(1, 3);
    let images = gen.carrier(1, 3);
    let f: Vec<(Value, Value)> = universe
        .iter()
        .map(|s| (s.clone(), images.choose(gen.rng()).expect("nonempty").clone()))
        .collect();
    let f = |s: &Value| f.iter().find(|(a, _)| a == s).expect("total").1.clone();
    let branches = Value::atoms(&["y0", "y1", "y2"]);
    let nb = gen.rng().gen_range(1..=3);
    let alpha = gen.dist(&branches[..nb], 3);
    let sets: Vec<BTreeSet<Value>> = (0..alpha.support_len())
        .map(|_| {
            let mut s: BTreeSet<Value> = universe.iter().filter(|_| gen.rng().gen_bool(0.5)).cloned().collect();
            if s.is_empty() {
                s.insert(universe.choose(gen.rng()).expect("nonempty").clone());
            }
            s
        })
        .collect();
    let image_sets: Dist<BTreeSet<Value>> = Dist::mixture(
        alpha
            .iter()
            .zip(&sets)
            .map(|((_, w), s)| (w.clone(), Dist::point(s.iter().map(f).collect::<BTreeSet<Value>>()))),
    );
    let mut t = Tally(0);
    let r = (|| {
        for target in simplex_grid(&images, 6) {
            let lhs = pushforward_of_lift_contains(&alpha, &sets, f, &target);
            let rhs = lambda_contains(&image_sets, &target);
            t.eq(&format!("target {target}"), lhs, rhs)?;
        }
        Ok(())
    })();
    Ok(t.finish(r))
}

fn determinise_dk(gen: &mut GameGen) -> Result<Outcome, GameError> {
    let dim = gen.rng().gen_range(1..=2);
    let shape = if gen.rng().gen_bool(0.5) { Shape::Atomic } else { Shape::Conditioned };
    let g = gen.game(shape, dim, false);
    let k = gen.table(g.moves(), dim);
    let mut phis: Vec<Dist<Value>> = (0..4).map(|_| gen.dist(g.strategies(), 4)).collect();
    phis.extend(g.strategies().iter().take(3).map(|s| Dist::point(s.clone())));
    let mut t = Tally(0);
    for x in g.states() {
        for phi in &phis {
            if let Err(e) = t.eq(&format!("Δ agrees at {x} on {phi}"), check_determinise_dk(&g, x, &k, phi)?, true) {
                return Ok(Outcome::Fail(t.0, e));
            }
        }
    }
    Ok(Outcome::Pass(t.0))
}

fn determinise_otimes(gen: &mut GameGen) -> Result<Outcome, GameError> {
    let (d1, d2) = (gen.rng().gen_range(1..=2), gen.rng().gen_range(1..=2));
    let (s1, s2) = (gen.shape(), gen.shape());
    let g = gen.game(s1, d1, true);
    let h = gen.game(s2, d2, true);
    let m = gen.cfg.max_payoff_abs;
    let mut k = DistTable::new();
    for y in product(g.moves(), h.moves()) {
        let outcomes: Vec<RationalVec> = (0..2)
            .map(|_| RationalVec::from_ints(&(0..d1 + d2).map(|_| gen.rng().gen_range(-m..=m)).collect::<Vec<_>>()))
            .collect();
        let d = gen.dist(&outcomes, 3);
        k.insert(y, d);
    }
    let mut t = Tally(0);
    for x1 in g.states() {
        for x2 in h.states() {
            for _ in 0..3 {
                let p1 = gen.dist(g.strategies(), 3);
                let p2 = gen.dist(h.strategies(), 3);
                let ok = check_determinise_otimes(&g, &h, (&p1, &p2), (x1, x2), &k)?;
                if let Err(e) = t.eq(&format!("Δ(G ⊗ H) vs Δ(G) ⊗ Δ(H) at ({x1}, {x2}) on ({p1}, {p2})"), ok, true) {
                    return Ok(Outcome::Fail(t.0, e));
                }
            }
        }
    }
    Ok(Outcome::Pass(t.0))
}

fn adjunction(gen: &mut GameGen) -> Result<Outcome, GameError> {
    let dim = gen.rng().gen_range(1..=2);
    let g = gen.pure_decision(dim);
    let coord = gen.rng().gen_range(0..dim);
    let h = decision_game(gen.carrier(1, 3), VecAlgebra::new(dim), coord)?;
    let mut t = Tally(0);
    let report = check_adjunction_triangles(&g, &h)?;
    t.0 += report.comparisons;
    if let Some(f) = report.failures.first() {
        return Ok(Outcome::Fail(t.0, f.clone()));
    }
    if g.strategies.len() <= 2 {
        let same = decision_game(g.interface.moves.clone(), VecAlgebra::new(dim), coord)?;
        match check_hom_bijection(&g, &same)? {
            Ok(n) => t.0 += n,
            Err(e) => return Ok(Outcome::Fail(t.0, e)),
        }
    }
    let ks: Vec<UtilityTable> = (0..4).map(|_| gen.table(&g.interface.moves, dim)).collect();
    if let Err(e) = t.eq("Ψ Θ G = G", psi_theta_roundtrip(&g, &ks)?, true) {
        return Ok(Outcome::Fail(t.0, e));
    }
    Ok(Outcome::Pass(t.0))
}
