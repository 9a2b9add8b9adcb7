use std::collections::BTreeSet;
use std::sync::Arc;

use num_traits::Zero;
use probgames::compose::{liftpred_check, transport_witness, value_ell};
use probgames::dist::{dmap, ell, eta, join, kleisli, marginals, q, simplex_grid, Dist, RationalVec, VecAlgebra, Q};
use probgames::game::{
    check_equilibrium, conditioned_decision_game, decision_game, Bijection, CoordPerm, EquilibriumSpec, Interface,
    ProbOpenGame, UtilityTable,
};
use probgames::lens::{embed_pair, lens_compose, Boundary, Lens, VecFn, ViewFn};
use probgames::{relabel, GameIso, Value};
use proptest::prelude::*;

const ATOMS: [&str; 3] = ["a", "b", "c"];

fn atoms(n: usize) -> Vec<Value> {
    Value::atoms(&ATOMS[..n])
}

/// A distribution on the first `counts.len()` atoms with weights
/// proportional to `counts`.
fn from_counts(counts: &[u32]) -> Dist<Value> {
    let total: u32 = counts.iter().sum();
    Dist::new(
        counts
            .iter()
            .enumerate()
            .filter(|(_, c)| **c > 0)
            .map(|(i, c)| (Value::atom(ATOMS[i]), q(*c as i64, total as i64))),
    )
    .unwrap()
}

fn arb_dist() -> impl Strategy<Value = Dist<Value>> {
    prop::collection::vec(0u32..6, 1..=3)
        .prop_filter("some mass", |c| c.iter().sum::<u32>() > 0)
        .prop_map(|c| from_counts(&c))
}

/// A Kleisli arrow on `{a, b, c}` as a table of distributions.
fn arb_kleisli() -> impl Strategy<Value = Vec<Dist<Value>>> {
    prop::collection::vec(arb_dist(), 3)
}

fn apply_k(table: &[Dist<Value>], v: &Value) -> Dist<Value> {
    let i = ATOMS.iter().position(|a| Value::atom(a) == *v).unwrap();
    table[i].clone()
}

fn arb_table(moves: Vec<Value>, dim: usize) -> impl Strategy<Value = UtilityTable> {
    prop::collection::vec(prop::collection::vec(-3i64..=3, dim), moves.len()).prop_map(move |rows| {
        UtilityTable::new(moves.iter().cloned().zip(rows.iter().map(|r| RationalVec::from_ints(r))))
    })
}

proptest! {
    #[test]
    fn unit_laws(d in arb_dist(), f in arb_kleisli()) {
        prop_assert_eq!(join(&eta(d.clone())), d.clone());
        prop_assert_eq!(join(&dmap(|x: &Value| eta(x.clone()), &d)), d.clone());
        for a in atoms(3) {
            prop_assert_eq!(kleisli(|x| apply_k(&f, x), &eta(a.clone())), apply_k(&f, &a));
        }
    }

    #[test]
    fn kleisli_is_associative(d in arb_dist(), f in arb_kleisli(), g in arb_kleisli()) {
        let left = kleisli(|y| apply_k(&g, y), &kleisli(|x| apply_k(&f, x), &d));
        let right = kleisli(|x| kleisli(|y| apply_k(&g, y), &apply_k(&f, x)), &d);
        prop_assert_eq!(left, right);
    }

    #[test]
    fn join_is_associative(d in arb_dist(), f in arb_kleisli(), g in arb_kleisli()) {
        let ddd = dmap(|x: &Value| dmap(|y: &Value| apply_k(&g, y), &apply_k(&f, x)), &d);
        prop_assert_eq!(join(&join(&ddd)), join(&dmap(join, &ddd)));
    }

    #[test]
    fn strength_is_commutative(a in arb_dist(), b in arb_dist()) {
        let ab = ell(&a, &b);
        prop_assert_eq!(dmap(|(x, y): &(Value, Value)| (y.clone(), x.clone()), &ell(&b, &a)), ab.clone());
        prop_assert_eq!(marginals(&ab), (a, b));
    }

    #[test]
    fn distributions_are_normalised(d in arb_dist(), f in arb_kleisli()) {
        let total: Q = kleisli(|x| apply_k(&f, x), &d).iter().map(|(_, w)| w.clone()).sum();
        prop_assert_eq!(total, q(1, 1));
        prop_assert!(d.iter().all(|(_, w)| *w > Q::zero()));
    }

    /// Decision games accept exactly the candidates supported on the
    /// brute-force argmax.
    #[test]
    fn decision_game_is_argmax(n in 1usize..=3, k in arb_table(atoms(3), 2), counts in prop::collection::vec(0u32..4, 3)) {
        prop_assume!(counts[..n].iter().sum::<u32>() > 0);
        let g = decision_game(atoms(n), VecAlgebra::new(2), 1).unwrap();
        let k = UtilityTable::new(k.iter().filter(|(y, _)| atoms(n).contains(y)).map(|(y, r)| (y.clone(), r.clone())));
        let best = atoms(n).iter().map(|y| k.get(y).unwrap()[1].clone()).max().unwrap();
        let phi = from_counts(&counts[..n]);
        let expected = phi.support().all(|y| k.get(y).unwrap()[1] == best);
        prop_assert_eq!(check_equilibrium(&g, &Value::Unit, &k, &phi).unwrap(), expected);
    }

    /// Support-characterized equilibrium sets are closed under mixing.
    #[test]
    fn support_char_is_convex(k in arb_table(atoms(3), 1), c1 in prop::collection::vec(1u32..=4, 3), c2 in prop::collection::vec(1u32..=4, 3), t in 0i64..=8) {
        let g = decision_game(atoms(3), VecAlgebra::new(1), 0).unwrap();
        let x = Value::Unit;
        let best = probgames::game::support_char_of(&g, &x, &k).unwrap().unwrap();
        let on_best = |c: &[u32]| {
            let total: u32 = atoms(3).iter().zip(c).filter(|(y, _)| best.contains(y)).map(|(_, n)| n).sum();
            Dist::new(atoms(3).into_iter().zip(c).filter(|(y, _)| best.contains(y)).map(|(y, n)| (y, q(*n as i64, total as i64)))).unwrap()
        };
        let (p, r) = (on_best(&c1), on_best(&c2));
        prop_assert!(check_equilibrium(&g, &x, &k, &p).unwrap() && check_equilibrium(&g, &x, &k, &r).unwrap());
        let mix = Dist::mixture([(q(t, 8), p), (q(8 - t, 8), r)]);
        prop_assert!(check_equilibrium(&g, &x, &k, &mix).unwrap());
    }

    #[test]
    fn conditioned_game_is_convex(k in arb_table(atoms(2), 1), i in 0usize..200, j in 0usize..200) {
        let g = conditioned_decision_game(atoms(2), atoms(2), VecAlgebra::new(1), 0).unwrap();
        let grid = simplex_grid(g.strategies(), 4);
        let (p, r) = (&grid[i % grid.len()], &grid[j % grid.len()]);
        let k = UtilityTable::new(
            g.moves().iter().map(|y| (y.clone(), k.get(y.snd().unwrap()).unwrap().clone())),
        );
        for x in g.states() {
            if check_equilibrium(&g, x, &k, p).unwrap() && check_equilibrium(&g, x, &k, r).unwrap() {
                let mix = Dist::mixture([(q(1, 2), p.clone()), (q(1, 2), r.clone())]);
                prop_assert!(check_equilibrium(&g, x, &k, &mix).unwrap());
            }
        }
    }

    /// Flow feasibility agrees with an explicit per-branch decomposition:
    /// a feasible plan yields branches that replay to the candidate.
    #[test]
    fn liftpred_flow_has_a_witness(
        alpha in arb_dist(),
        masks in prop::collection::vec(1u8..8, 3),
        psi in arb_dist(),
    ) {
        let sets: Vec<BTreeSet<Value>> = alpha
            .support()
            .enumerate()
            .map(|(i, _)| atoms(3).into_iter().enumerate().filter(|(b, _)| masks[i] >> b & 1 == 1).map(|(_, v)| v).collect())
            .collect();
        if let Some(w) = transport_witness(&alpha, sets.clone(), &psi) {
            let replay = Dist::mixture(alpha.iter().map(|(y, p)| (p.clone(), w.branches[y].clone())));
            prop_assert_eq!(replay, psi.clone());
            for ((y, _), set) in alpha.iter().zip(&sets) {
                prop_assert!(w.branches[y].support().all(|s| set.contains(s)));
            }
        } else {
            // infeasible: some union of branches is too light for the mass it must cover
            let branch_sets: Vec<(Q, &BTreeSet<Value>)> = alpha.iter().map(|(_, p)| p.clone()).zip(&sets).collect();
            let mut violated = false;
            for mask in 1u8..8 {
                let chosen: BTreeSet<Value> = atoms(3).into_iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, v)| v).collect();
                let demand: Q = psi.iter().filter(|(s, _)| chosen.contains(*s)).map(|(_, w)| w.clone()).sum();
                let supply: Q = branch_sets.iter().filter(|(_, s)| s.iter().any(|v| chosen.contains(v))).map(|(p, _)| p.clone()).sum();
                violated |= demand > supply;
            }
            prop_assert!(violated, "no Hall violation but the flow is infeasible");
        }
    }
}

fn everything_game(n: usize) -> ProbOpenGame {
    let alg = VecAlgebra::new(1);
    ProbOpenGame::custom(
        "free",
        Interface::new(vec![Value::Unit], vec![Value::Unit], alg, alg).unwrap(),
        atoms(n),
        Arc::new(|_, _| Value::Unit),
        Arc::new(|_, _, r| r.clone()),
        EquilibriumSpec::Everything,
    )
    .unwrap()
}

#[test]
fn everything_accepts_the_whole_grid() {
    let g = everything_game(3);
    let k = UtilityTable::new([(Value::Unit, RationalVec::from_ints(&[4]))]);
    for d in 1..=4 {
        for phi in simplex_grid(&atoms(3), d) {
            assert!(check_equilibrium(&g, &Value::Unit, &k, &phi).unwrap());
        }
    }
}

#[test]
fn liftpred_contains_every_brute_force_mixture() {
    // H observes y or z and picks a or b; every mixture of per-branch
    // equilibria on the denominator-6 grid must pass the lifted predicate,
    // and the flow must reject everything else on that grid
    let h = conditioned_decision_game(Value::atoms(&["y", "z"]), atoms(2), VecAlgebra::new(1), 0).unwrap();
    let grid = simplex_grid(h.strategies(), 6);
    let tables = [[2i64, 1, 0, 0], [0, 1, 1, 0], [1, 1, 1, 1], [0, 3, 2, 2]];
    for ks in tables {
        let k = UtilityTable::new(h.moves().iter().cloned().zip(ks.iter().map(|v| RationalVec::from_ints(&[*v]))));
        for alpha in (1..=3).flat_map(|d| simplex_grid(&Value::atoms(&["y", "z"]), d)) {
            let branch_eq: Vec<Vec<&Dist<Value>>> = alpha
                .support()
                .map(|y| grid.iter().filter(|b| check_equilibrium(&h, y, &k, b).unwrap()).collect())
                .collect();
            let mut reachable = BTreeSet::new();
            match branch_eq.as_slice() {
                [only] => reachable.extend(only.iter().map(|b| (*b).clone())),
                [first, second] => {
                    let w: Vec<Q> = alpha.iter().map(|(_, p)| p.clone()).collect();
                    for b1 in first {
                        for b2 in second {
                            reachable.insert(Dist::mixture([(w[0].clone(), (*b1).clone()), (w[1].clone(), (*b2).clone())]));
                        }
                    }
                }
                _ => unreachable!(),
            }
            for psi in &grid {
                let lifted = liftpred_check(&h, &k, &alpha, psi, None).unwrap();
                if reachable.contains(psi) {
                    assert!(lifted, "{psi} mixes branch equilibria over {alpha} but was rejected");
                }
                if !lifted {
                    assert!(!reachable.contains(psi));
                }
            }
        }
    }
}

fn arb_view() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..3, 3)
}

fn view_of(map: Vec<usize>) -> ViewFn {
    Arc::new(move |x: &Value| {
        let i = ATOMS.iter().position(|a| Value::atom(a) == *x).unwrap();
        Value::atom(ATOMS[map[i]])
    })
}

fn update_of(perm: bool, scale: i64) -> VecFn {
    Arc::new(move |r: &RationalVec| {
        let r = if perm { r.permute(&[1, 0]) } else { r.clone() };
        r.scale(&q(scale, 1))
    })
}

proptest! {
    #[test]
    fn lens_composition_is_associative(
        f in arb_view(), g in arb_view(), h in arb_view(),
        p in any::<[bool; 3]>(), s in prop::array::uniform3(-2i64..=2),
    ) {
        let b = Boundary::new(atoms(3), 2);
        let mk = |v: Vec<usize>, i: usize| embed_pair(b.clone(), b.clone(), view_of(v), update_of(p[i], s[i]));
        let (l1, l2, l3) = (mk(f, 0), mk(g, 1), mk(h, 2));
        let left = lens_compose(&lens_compose(&l1, &l2).unwrap(), &l3).unwrap();
        let right = lens_compose(&l1, &lens_compose(&l2, &l3).unwrap()).unwrap();
        prop_assert!(left.ext_eq(&right), "{:?}", left.first_difference(&right));
        let id = Lens::identity(atoms(3), 2);
        prop_assert!(lens_compose(&id, &l1).unwrap().ext_eq(&l1));
        prop_assert!(lens_compose(&l1, &id).unwrap().ext_eq(&l1));
    }

    /// `⟨-, -⟩` is a functor: embedding a composite is composing embeddings.
    #[test]
    fn embedding_is_functorial(f in arb_view(), g in arb_view(), p in any::<[bool; 2]>(), s in prop::array::uniform2(-2i64..=2)) {
        let b = Boundary::new(atoms(3), 2);
        let (vf, vg) = (view_of(f), view_of(g));
        let (uf, ug) = (update_of(p[0], s[0]), update_of(p[1], s[1]));
        let composed = lens_compose(
            &embed_pair(b.clone(), b.clone(), vf.clone(), uf.clone()),
            &embed_pair(b.clone(), b.clone(), vg.clone(), ug.clone()),
        )
        .unwrap();
        let direct = embed_pair(b.clone(), b.clone(), Arc::new(move |x| vg(&vf(x))), Arc::new(move |r| uf(&ug(r))));
        prop_assert!(composed.ext_eq(&direct));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    /// A relabeled game judges a candidate as the original judges its
    /// pullback.
    #[test]
    fn relabel_agrees_with_pullback(
        k in arb_table(Value::atoms(&["p", "q", "r"]), 2),
        counts in prop::collection::vec(0u32..4, 3),
        rot in 0usize..3,
        swap in any::<bool>(),
    ) {
        prop_assume!(counts.iter().sum::<u32>() > 0);
        let g = decision_game(atoms(3), VecAlgebra::new(2), 0).unwrap();
        let names = Value::atoms(&["p", "q", "r"]);
        let rename = |i: usize| names[(i + rot) % 3].clone();
        let strategies = Bijection::from_pairs(atoms(3).into_iter().enumerate().map(|(i, a)| (a, rename(i)))).unwrap();
        let perm = if swap { CoordPerm::swap_blocks(1, 1) } else { CoordPerm::identity(2) };
        let iso = GameIso {
            strategies: strategies.clone(),
            moves: strategies.clone(),
            utility: perm.clone(),
            coutility: perm.clone(),
            ..GameIso::identity(&g)
        };
        let moved = relabel(&g, &iso).unwrap();
        let phi = from_counts(&counts).map(|s| strategies.apply(s).unwrap().clone());
        let pulled_phi = phi.map(|s| strategies.invert(s).unwrap().clone());
        let pulled_k = UtilityTable::new(atoms(3).into_iter().map(|y| {
            let r = k.get(strategies.apply(&y).unwrap()).unwrap();
            (y, perm.inverse().apply(r))
        }));
        prop_assert_eq!(
            check_equilibrium(&moved, &Value::Unit, &k, &phi).unwrap(),
            check_equilibrium(&g, &Value::Unit, &pulled_k, &pulled_phi).unwrap()
        );
    }

    /// Parallel membership factors through the two components.
    #[test]
    fn par_membership_factors(
        k in arb_table(probgames::value::product(&atoms(2), &atoms(2)), 2),
        c1 in prop::collection::vec(0u32..4, 2),
        c2 in prop::collection::vec(0u32..4, 2),
    ) {
        prop_assume!(c1.iter().sum::<u32>() > 0 && c2.iter().sum::<u32>() > 0);
        let p1 = decision_game(atoms(2), VecAlgebra::new(1), 0).unwrap();
        let p2 = decision_game(atoms(2), VecAlgebra::new(1), 0).unwrap();
        let g = probgames::par(&p1, &p2);
        let (a, b) = (from_counts(&c1), from_counts(&c2));
        let x = Value::pair(Value::Unit, Value::Unit);
        let k1 = UtilityTable::from_fn(&atoms(2), |y| {
            RationalVec::new(vec![b.iter().map(|(y2, w)| &k.get(&Value::pair(y.clone(), y2.clone())).unwrap()[0] * w).sum()])
        });
        let k2 = UtilityTable::from_fn(&atoms(2), |y| {
            RationalVec::new(vec![a.iter().map(|(y1, w)| &k.get(&Value::pair(y1.clone(), y.clone())).unwrap()[1] * w).sum()])
        });
        let expected = check_equilibrium(&p1, &Value::Unit, &k1, &a).unwrap()
            && check_equilibrium(&p2, &Value::Unit, &k2, &b).unwrap();
        prop_assert_eq!(check_equilibrium(&g, &x, &k, &value_ell(&a, &b)).unwrap(), expected);
    }
}
