//! End-to-end acceptance checks. One PASS/FAIL line per criterion; the
//! process exits non-zero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;
use std::time::{Duration, Instant};

use probgames::compose::{seq_membership, transport_witness, value_ell, verify_witness};
use probgames::dist::{q, qi};
use probgames::game::{BestFn, EquilibriumSpec, Interface};
use probgames::laws::non_unit_witness;
use probgames::solver::on_grid;
use probgames::{
    backward_induction, check_equilibrium, decision_game, grid_oracle, par, support_enumeration, Dist, ProbOpenGame,
    RationalVec, UtilityTable, Value, VecAlgebra,
};
use probgames_cli::{load, parse_game_file, run, serialize};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value as Json;

const MP: &str = include_str!("../games/matching_pennies.game");
const ME: &str = include_str!("../games/market_entry.game");

// pinned limits
const FAST: Duration = Duration::from_secs(1);
const LAWS_LIMIT: Duration = Duration::from_secs(60);
const LIFTPRED_LIMIT: Duration = Duration::from_secs(30);
const CROSSCHECK_LIMIT: Duration = Duration::from_secs(60);
const DEMO_LIMIT: Duration = Duration::from_secs(10);
const LAW_SEED: u64 = 7;
const LAW_CASES: usize = 100;
const MAX_SEQ_SKIP_RATIO: f64 = 0.2;
const LIFT_MAX_BRANCHES: usize = 3;
const LIFT_MAX_STRATEGIES: usize = 3;
const LIFT_MAX_DENOMINATOR: i64 = 6;
const CROSSCHECK_GAMES: u64 = 50;
const CROSSCHECK_SEED: u64 = 2024;
const GRID_RESOLUTION: u32 = 12;
const GRID_EPSILON: f64 = 1e-9;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn a(s: &str) -> Value {
    Value::atom(s)
}

fn ht() -> Vec<Value> {
    Value::atoms(&["H", "T"])
}

// 1
fn mp_support_enumeration() -> Check {
    let (_, b) = load(MP).map_err(|e| e.to_string())?;
    let r = support_enumeration(&b.game, &b.state, &b.table).map_err(|e| e.to_string())?;
    let half = Dist::uniform(ht());
    ensure(r.equilibria == vec![(half.clone(), half.clone())], || format!("got {:?}", r.equilibria))?;
    ensure(r.equilibria[0].0.weight(&a("H")) == q(1, 2), || "φ₁(H) ≠ 1/2".into())?;
    Ok(format!("unique equilibrium {}", probgames_cli::profile::show(&b, &[half.clone(), half])))
}

// 2
fn mp_membership() -> Check {
    let (_, b) = load(MP).map_err(|e| e.to_string())?;
    let (h, t, u) = (Dist::point(a("H")), Dist::point(a("T")), Dist::uniform(ht()));
    let pair = |x: &str, y: &str| Value::pair(a(x), a(y));
    let correlated = Dist::new([(pair("H", "H"), q(1, 2)), (pair("T", "T"), q(1, 2))]).unwrap();
    let cases = [
        ("(uniform, uniform)", value_ell(&u, &u), true),
        ("(η(H), uniform)", value_ell(&h, &u), false),
        ("(uniform, η(H))", value_ell(&u, &h), false),
        ("(η(H), η(T))", value_ell(&h, &t), false),
        ("{(H,H): 1/2, (T,T): 1/2}", correlated, false),
    ];
    for (name, phi, want) in &cases {
        let got = check_equilibrium(&b.game, &b.state, &b.table, phi).map_err(|e| e.to_string())?;
        ensure(got == *want, || format!("{name}: expected {want}, got {got}"))?;
    }
    Ok(format!("{} profiles classified exactly", cases.len()))
}

// 3
fn me_backward_induction() -> Check {
    let (_, b) = load(ME).map_err(|e| e.to_string())?;
    let sols = backward_induction(&b.game, &b.state, &b.table).map_err(|e| e.to_string())?;
    let (g1, g2) = (&b.leaves[0].game, &b.leaves[1].game);
    let named = |s: &str| g2.strategy_named(s).cloned().ok_or(format!("no strategy {s}"));
    let swap = named("swap")?;
    let want = vec![(Dist::point(a("E")), Dist::point(swap.clone()))];
    ensure(sols == want, || format!("got {sols:?}"))?;
    let member = |y: &str, f: &Value| {
        seq_membership(g1, g2, &b.state, &b.table, &value_ell(&Dist::point(a(y)), &Dist::point(f.clone())))
            .map_err(|e| e.to_string())
    };
    ensure(member("E", &swap)?, || "(η σ_E, η swap) rejected".into())?;
    ensure(!member("NE", &swap)?, || "(η σ_NE, η swap) accepted".into())?;
    ensure(!member("E", &named("const_E")?)?, || "(η σ_E, η const_E) accepted".into())?;
    Ok("(η σ_E, η swap) is the unique solution; confirmed, and both alternatives rejected".into())
}

// 4
fn law_suite() -> Check {
    let o = run(["probgames", "laws", "--seed", &LAW_SEED.to_string(), "--cases", &LAW_CASES.to_string(), "--format", "json"]);
    ensure(o.code == 0, || format!("exit {}: {}", o.code, o.stdout))?;
    let v: Json = serde_json::from_str(&o.stdout).map_err(|e| e.to_string())?;
    let laws = v["laws"].as_array().ok_or("no laws")?;
    let mut skipped_seq = (0, 0);
    for l in laws {
        let name = l["law"].as_str().unwrap_or("?");
        ensure(l["failures"].as_array().is_some_and(|f| f.is_empty()), || format!("{name} failed: {}", l["failures"]))?;
        ensure(l["comparisons"].as_u64().unwrap_or(0) > 0, || format!("{name} made no comparisons"))?;
        if name == "seq-assoc" {
            skipped_seq = (l["skips"].as_array().map_or(0, Vec::len), l["cases"].as_u64().unwrap_or(0) as usize);
        }
    }
    ensure(skipped_seq.1 == LAW_CASES, || "seq-assoc did not run every case".into())?;
    let ratio = skipped_seq.0 as f64 / skipped_seq.1 as f64;
    ensure(ratio < MAX_SEQ_SKIP_RATIO, || format!("seq-assoc skip ratio {ratio}"))?;
    Ok(format!(
        "{} laws × {LAW_CASES} cases, 0 failures, seq-assoc skips {}/{} (rules: flow {}, point mass {})",
        laws.len(),
        skipped_seq.0,
        skipped_seq.1,
        v["seq_rules"]["flow"],
        v["seq_rules"]["point_mass"]
    ))
}

// 5

/// Weight vectors with `len` entries, all multiples of `1/n` for some
/// `n ≤ max_den`, summing to 1, in units of `1/60`.
fn lattice(len: usize, positive: bool, max_den: i64) -> Vec<Vec<i64>> {
    fn compositions(len: usize, total: i64, positive: bool, acc: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if acc.len() + 1 == len {
            if !positive || total > 0 {
                acc.push(total);
                out.push(acc.clone());
                acc.pop();
            }
            return;
        }
        let lo = i64::from(positive);
        for c in lo..=total {
            acc.push(c);
            compositions(len, total - c, positive, acc, out);
            acc.pop();
        }
    }
    let mut out = BTreeSet::new();
    for n in 1..=max_den {
        let mut raw = Vec::new();
        compositions(len, n, positive, &mut Vec::new(), &mut raw);
        out.extend(raw.into_iter().map(|v| v.into_iter().map(|c| c * 60 / n).collect::<Vec<_>>()));
    }
    out.into_iter().collect()
}

fn dist_60(items: &[Value], w: &[i64]) -> Dist<Value> {
    Dist::new(items.iter().cloned().zip(w.iter().map(|&c| q(c, 60)))).expect("lattice weights sum to 1")
}

/// A game whose best responses at state `yᵢ` are the fixed set `sets[i]`.
fn fixed_best_game(states: &[Value], sigma: &[Value], sets: &[BTreeSet<Value>]) -> ProbOpenGame {
    let by_state: BTreeMap<Value, BTreeSet<Value>> = states.iter().cloned().zip(sets.iter().cloned()).collect();
    let best: BestFn = Arc::new(move |x, _| Ok(by_state[x].clone()));
    let interface = Interface::new(states.to_vec(), sigma.to_vec(), VecAlgebra::new(1), VecAlgebra::new(1)).unwrap();
    ProbOpenGame::custom(
        "H",
        interface,
        sigma.to_vec(),
        Arc::new(|s, _| s.clone()),
        Arc::new(|_, _, r| r.clone()),
        EquilibriumSpec::SupportChar(best),
    )
    .unwrap()
}

/// Searches decompositions `ψ = Σ αᵢ βᵢ` with `supp βᵢ ⊆ Sᵢ`, the first
/// `m - 1` branches drawn from the lattice and the last one solved for.
/// Everything is in units of `1/60`.
fn brute_decomposition(alpha: &[i64], sets: &[Vec<usize>], psi: &[i64], grids: &[Vec<Vec<i64>>]) -> bool {
    let m = alpha.len();
    let s = psi.len();
    fn go(i: usize, acc: &mut Vec<i64>, alpha: &[i64], sets: &[Vec<usize>], psi: &[i64], grids: &[Vec<Vec<i64>>]) -> bool {
        let m = alpha.len();
        if i + 1 == m {
            // αₘ βₘ(σ) = 60 ψ(σ) − Σ αᵢ βᵢ(σ)
            return (0..psi.len()).all(|t| {
                let r = 60 * psi[t] - acc[t];
                r >= 0 && (r == 0 || sets[i].contains(&t))
            });
        }
        for beta in &grids[sets[i].len()] {
            let mut full = vec![0; psi.len()];
            for (k, &t) in sets[i].iter().enumerate() {
                full[t] = beta[k];
            }
            for t in 0..psi.len() {
                acc[t] += alpha[i] * full[t];
            }
            let found = go(i + 1, acc, alpha, sets, psi, grids);
            for t in 0..psi.len() {
                acc[t] -= alpha[i] * full[t];
            }
            if found {
                return true;
            }
        }
        false
    }
    debug_assert!(m >= 1 && s >= 1);
    go(0, &mut vec![0; s], alpha, sets, psi, grids)
}

fn liftpred_equivalence() -> Check {
    let names = ["s0", "s1", "s2"];
    let states = Value::atoms(&["y0", "y1", "y2"]);
    let grids: Vec<Vec<Vec<i64>>> =
        (0..=LIFT_MAX_STRATEGIES).map(|k| if k == 0 { vec![] } else { lattice(k, false, LIFT_MAX_DENOMINATOR) }).collect();
    let table_for = |sigma: &[Value]| UtilityTable::from_fn(sigma, |_| RationalVec::zeros(1));
    let (mut configs, mut feasible, mut brute_runs, mut brute_hits) = (0usize, 0usize, 0usize, 0usize);
    for s in 1..=LIFT_MAX_STRATEGIES {
        let sigma = Value::atoms(&names[..s]);
        let k = table_for(&sigma);
        // every subset of Σ, as an index list
        let subsets: Vec<Vec<usize>> = (0..1u32 << s).map(|mask| (0..s).filter(|t| mask >> t & 1 == 1).collect()).collect();
        let psis = lattice(s, false, LIFT_MAX_DENOMINATOR);
        for m in 1..=LIFT_MAX_BRANCHES {
            let alphas = lattice(m, true, LIFT_MAX_DENOMINATOR);
            let ys = &states[..m];
            // m-tuples of subsets up to reordering the branches; every order
            // of α is enumerated, so this still covers all configurations
            for code in 0..subsets.len().pow(m as u32) {
                let choice: Vec<usize> = (0..m).map(|i| code / subsets.len().pow(i as u32) % subsets.len()).collect();
                if choice.windows(2).any(|w| w[0] > w[1]) {
                    continue;
                }
                let sets_idx: Vec<Vec<usize>> = choice.iter().map(|&c| subsets[c].clone()).collect();
                let sets: Vec<BTreeSet<Value>> =
                    sets_idx.iter().map(|ix| ix.iter().map(|&t| sigma[t].clone()).collect()).collect();
                let h = fixed_best_game(ys, &sigma, &sets);
                for aw in &alphas {
                    let alpha = dist_60(ys, aw);
                    for pw in &psis {
                        configs += 1;
                        let psi = dist_60(&sigma, pw);
                        let flow = probgames::compose::liftpred_check(&h, &k, &alpha, &psi, None).map_err(|e| e.to_string())?;
                        if flow {
                            feasible += 1;
                            // replay the decomposition read off the flow
                            let w = transport_witness(&alpha, sets.clone(), &psi)
                                .ok_or_else(|| format!("feasible but no plan: α={alpha} ψ={psi} sets={sets:?}"))?;
                            let ok = verify_witness(&h, &k, &alpha, &psi, &w).map_err(|e| format!("{e} (α={alpha} ψ={psi})"))?;
                            ensure(ok, || format!("witness replay failed at α={alpha} ψ={psi}"))?;
                            // sample the brute force on feasible cases too, to show it is not vacuous
                            if configs % 11 == 0 {
                                brute_runs += 1;
                                brute_hits += usize::from(brute_decomposition(aw, &sets_idx, pw, &grids));
                            }
                        } else {
                            ensure(!brute_decomposition(aw, &sets_idx, pw, &grids), || {
                                format!("flow infeasible but a lattice decomposition exists: α={alpha} ψ={psi} sets={sets:?}")
                            })?;
                        }
                    }
                }
            }
        }
    }
    ensure(brute_hits > 0, || "brute force never found a decomposition".into())?;
    Ok(format!(
        "{configs} configurations: {feasible} feasible (all witnesses replayed), {} infeasible (no lattice decomposition); brute force found {brute_hits}/{brute_runs} sampled feasible cases",
        configs - feasible
    ))
}

// 6
fn non_unit() -> Check {
    let w = non_unit_witness();
    println!("    witness: {w}");
    // re-derive independently of the stored flags
    let set: BTreeSet<Value> = ht().into_iter().collect();
    let u = Dist::uniform(ht());
    let in_lift = probgames::compose::lambda_contains(&Dist::point(set), &u);
    let point = u.as_point().is_some();
    ensure(w.holds() && in_lift && !point, || format!("witness does not hold: {w}"))?;
    let o = run(["probgames", "laws", "--cases", "0"]);
    ensure(o.stdout.contains("is not a point mass"), || "laws report omits the witness".into())?;
    Ok(format!("{} ∈ λ(η {{H, T}}) and is not a point mass", w.candidate))
}

// 7
fn random_bimatrix(rng: &mut ChaCha8Rng, n: usize) -> (ProbOpenGame, UtilityTable) {
    let (r1, r2) = (Value::atoms(&["a", "b", "c"][..n]), Value::atoms(&["x", "y", "z"][..n]));
    let g = par(
        &decision_game(r1.clone(), VecAlgebra::new(1), 0).unwrap().with_label("p1"),
        &decision_game(r2.clone(), VecAlgebra::new(1), 0).unwrap().with_label("p2"),
    );
    let mut entries = Vec::new();
    for y1 in &r1 {
        for y2 in &r2 {
            let v = RationalVec::new(vec![qi(rng.gen_range(-5..=5)), qi(rng.gen_range(-5..=5))]);
            entries.push((Value::pair(y1.clone(), y2.clone()), v));
        }
    }
    (g, UtilityTable::new(entries))
}

fn solver_crosscheck() -> Check {
    let x = Value::pair(Value::Unit, Value::Unit);
    let (mut exact_total, mut grid_total, mut on_grid_total, mut degenerate) = (0, 0, 0, 0);
    for i in 0..CROSSCHECK_GAMES {
        let mut rng = ChaCha8Rng::seed_from_u64(CROSSCHECK_SEED);
        rng.set_stream(i);
        let n = if i % 2 == 0 { 2 } else { 3 };
        let (g, k) = random_bimatrix(&mut rng, n);
        let se = support_enumeration(&g, &x, &k).map_err(|e| format!("game {i}: {e}"))?;
        let grid = grid_oracle(&g, &x, &k, GRID_RESOLUTION, GRID_EPSILON).map_err(|e| format!("game {i}: {e}"))?;
        exact_total += se.equilibria.len();
        grid_total += grid.len();
        degenerate += usize::from(se.degenerate);
        let grid_set: BTreeSet<(Dist<Value>, Dist<Value>)> =
            grid.iter().map(|p| (p.leaves[0].clone(), p.leaves[1].clone())).collect();
        // completeness on the grid: exact equilibria with grid weights are found
        for (d1, d2) in &se.equilibria {
            if on_grid(d1, GRID_RESOLUTION) && on_grid(d2, GRID_RESOLUTION) {
                on_grid_total += 1;
                ensure(grid_set.contains(&(d1.clone(), d2.clone())), || format!("game {i}: grid missed ({d1}, {d2})"))?;
            }
        }
        // soundness: every grid point is an exact equilibrium, and a vertex
        // the enumeration lists whenever the game is nondegenerate
        for p in &grid {
            ensure(check_equilibrium(&g, &x, &k, &p.joint).map_err(|e| e.to_string())?, || {
                format!("game {i}: grid point {:?} is not an exact equilibrium", p.leaves)
            })?;
            if !se.degenerate {
                ensure(se.equilibria.contains(&(p.leaves[0].clone(), p.leaves[1].clone())), || {
                    format!("game {i}: grid point {:?} unknown to support enumeration", p.leaves)
                })?;
            }
        }
    }
    ensure(on_grid_total > 0, || "no equilibrium fell on the grid".into())?;
    Ok(format!(
        "{CROSSCHECK_GAMES} games: {exact_total} exact equilibria ({on_grid_total} on the grid, all found), {grid_total} grid points all exact; {degenerate} degenerate"
    ))
}

// 8
fn cli_round_trip_and_demos() -> Check {
    for (name, text) in [("matching_pennies.game", MP), ("market_entry.game", ME)] {
        let g = parse_game_file(text).map_err(|e| format!("{name}: {e}"))?;
        let back = parse_game_file(&serialize(&g)).map_err(|e| format!("{name} reparse: {e}"))?;
        ensure(back == g, || format!("{name} does not round-trip"))?;
    }
    let mp = run(["probgames", "demo", "matching-pennies"]);
    ensure(mp.code == 0, || format!("matching-pennies exit {}", mp.code))?;
    let last = mp.stdout.lines().last().unwrap_or_default();
    ensure(last == "solution: p1: {H: 1/2, T: 1/2}; p2: {H: 1/2, T: 1/2}", || format!("matching-pennies ends with `{last}`"))?;
    let me = run(["probgames", "demo", "market-entry"]);
    ensure(me.code == 0, || format!("market-entry exit {}", me.code))?;
    let tail: Vec<&str> = me.stdout.lines().rev().take(2).collect();
    ensure(
        tail[0] == "payoff: (5, 0)" && tail[1].ends_with("i.e. (1·σ_E, 1·swap)"),
        || format!("market-entry ends with {tail:?}"),
    )?;
    Ok("both files round-trip; demos end with the expected solutions".into())
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Check); 8] = [
        ("matching pennies: support enumeration", FAST, mp_support_enumeration),
        ("matching pennies: membership table", FAST, mp_membership),
        ("market entry: backward induction and sequential membership", FAST, me_backward_induction),
        ("law suite (seed 7, 100 cases)", LAWS_LIMIT, law_suite),
        ("lifted predicate: flow vs brute-force decomposition", LIFTPRED_LIMIT, liftpred_equivalence),
        ("lifting does not preserve the unit", FAST, non_unit),
        ("solver cross-check: support enumeration vs grid", CROSSCHECK_LIMIT, solver_crosscheck),
        ("cli: round-trip and demos", DEMO_LIMIT, cli_round_trip_and_demos),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let r = f();
        let took = start.elapsed();
        let r = r.and_then(|d| if took <= *limit { Ok(d) } else { Err(format!("{d}; too slow")) });
        let secs = took.as_secs_f64();
        match r {
            Ok(d) => println!("PASS {} {name} ({secs:.2}s, limit {}s): {d}", i + 1, limit.as_secs()),
            Err(d) => {
                failed += 1;
                println!("FAIL {} {name} ({secs:.2}s, limit {}s): {d}", i + 1, limit.as_secs());
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
