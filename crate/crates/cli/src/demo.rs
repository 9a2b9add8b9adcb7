//! Narrated walkthroughs of the two bundled games.

use probgames::dist::{fmt_q, RationalVec, Q};
use probgames::{backward_induction, explain_equilibrium, support_enumeration, Dist, Value};

use crate::build::{load, Built};
use crate::commands::{Output, EXIT_INPUT, EXIT_OK, EXIT_UNSUPPORTED};
use crate::profile::{joint, show};

pub const MATCHING_PENNIES: &str = include_str!("../games/matching_pennies.game");
pub const MARKET_ENTRY: &str = include_str!("../games/market_entry.game");

pub const DEMOS: [&str; 2] = ["matching-pennies", "market-entry"];

pub fn demo(name: &str) -> Output {
    let r = match name {
        "matching-pennies" => matching_pennies(),
        "market-entry" => market_entry(),
        _ => {
            return Output {
                code: EXIT_UNSUPPORTED,
                stdout: String::new(),
                stderr: format!("unknown demo `{name}`; available: {}\n", DEMOS.join(", ")),
            }
        }
    };
    match r {
        Ok(stdout) => Output { code: EXIT_OK, stdout, stderr: String::new() },
        Err(e) => Output { code: EXIT_INPUT, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

fn a(s: &str) -> Value {
    Value::atom(s)
}

fn payoff(b: &Built, y: &Value, coord: usize) -> Q {
    b.table.get(y).expect("table is total")[coord].clone()
}

fn header(out: &mut String, text: &str, b: &Built) {
    out.push_str("== game file ==\n");
    out.push_str(text);
    out.push_str(&format!("\n== composition ==\n{}\n", b.tree));
    out.push_str("\n== utility ==\n");
    for (y, r) in b.table.iter() {
        out.push_str(&format!("  {y:<10} -> {r}\n"));
    }
}

/// Expected final payoff of a joint candidate.
fn expected_payoff(b: &Built, phi: &Dist<Value>) -> RationalVec {
    phi.iter().fold(RationalVec::zeros(b.dim), |acc, (s, w)| {
        &acc + &b.table.get(&b.game.play(s, &b.state)).expect("table is total").scale(w)
    })
}

fn verdict(b: &Built, phi: &Dist<Value>) -> Result<String, Box<dyn std::error::Error>> {
    let v = explain_equilibrium(&b.game, &b.state, &b.table, phi)?;
    Ok(match v.failure() {
        None => "EQUILIBRIUM".into(),
        Some(f) => format!("NOT AN EQUILIBRIUM ({f})"),
    })
}

fn matching_pennies() -> Result<String, Box<dyn std::error::Error>> {
    let (_, b) = load(MATCHING_PENNIES)?;
    let mut out = String::new();
    header(&mut out, MATCHING_PENNIES, &b);
    out.push_str("\np1 scores coordinate 0 and wants a mismatch; p2 scores coordinate 1 and wants a match.\n");

    let pure = [("H", "H"), ("H", "T"), ("T", "H"), ("T", "T")];
    out.push_str("\n== pure profiles ==\n");
    for (x, y) in pure {
        let phi = Dist::point(Value::pair(a(x), a(y)));
        out.push_str(&format!("  ({x}, {y}): {}\n", verdict(&b, &phi)?));
    }

    let r = support_enumeration(&b.game, &b.state, &b.table)?;
    out.push_str("\n== support enumeration ==\n");
    for (d1, d2) in &r.equilibria {
        out.push_str(&format!("  {}\n", show(&b, &[d1.clone(), d2.clone()])));
    }
    let (d1, d2) = r.equilibria.first().ok_or("no equilibrium found")?.clone();

    out.push_str("\n== transformed utilities at the solution ==\n");
    let moves = [a("H"), a("T")];
    for y1 in &moves {
        let e: Q = d2.iter().map(|(y2, w)| w * payoff(&b, &Value::pair(y1.clone(), y2.clone()), 0)).sum();
        out.push_str(&format!("  p1 plays {y1} against {d2}: {}\n", fmt_q(&e)));
    }
    for y2 in &moves {
        let e: Q = d1.iter().map(|(y1, w)| w * payoff(&b, &Value::pair(y1.clone(), y2.clone()), 1)).sum();
        out.push_str(&format!("  p2 plays {y2} against {d1}: {}\n", fmt_q(&e)));
    }
    out.push_str("  both players are indifferent, so mixing is a best response\n");

    let phi = joint(&b.tree, &[d1.clone(), d2.clone()]);
    out.push_str(&format!("\ncheck: {}\n", verdict(&b, &phi)?));
    out.push_str(&format!("expected payoff: {}\n", expected_payoff(&b, &phi)));
    out.push_str(&format!("solution: {}\n", show(&b, &[d1, d2])));
    Ok(out)
}

fn market_entry() -> Result<String, Box<dyn std::error::Error>> {
    let (_, b) = load(MARKET_ENTRY)?;
    let mut out = String::new();
    header(&mut out, MARKET_ENTRY, &b);
    let moves = [a("E"), a("NE")];

    out.push_str("\n== g2 after observing g1 (coordinate 1) ==\n");
    for y in &moves {
        let row: Vec<String> = moves
            .iter()
            .map(|m| format!("{m} -> {}", fmt_q(&payoff(&b, &Value::pair(y.clone(), m.clone()), 1))))
            .collect();
        let best = moves
            .iter()
            .max_by_key(|m| payoff(&b, &Value::pair(y.clone(), (*m).clone()), 1))
            .expect("moves are nonempty");
        out.push_str(&format!("  observed {y}: {}; best {best}\n", row.join(", ")));
    }

    let sols = backward_induction(&b.game, &b.state, &b.table)?;
    let (d1, d2) = sols.first().ok_or("no equilibrium found")?.clone();
    let f = d2.as_point().ok_or("second mover mixes")?.clone();
    out.push_str(&format!("  g2's optimal response at every observation: {f}\n"));

    out.push_str("\n== g1 given g2's response (coordinate 0) ==\n");
    for y in &moves {
        let reply = f.apply(y).expect("total response");
        out.push_str(&format!(
            "  {y} -> g2 answers {reply} -> {}\n",
            fmt_q(&payoff(&b, &Value::pair(y.clone(), reply.clone()), 0))
        ));
    }

    out.push_str("\n== backward induction ==\n");
    for (e1, e2) in &sols {
        out.push_str(&format!("  {}\n", show(&b, &[e1.clone(), e2.clone()])));
    }
    let phi = joint(&b.tree, &[d1.clone(), d2.clone()]);
    out.push_str(&format!("\ncheck: {}\n", verdict(&b, &phi)?));
    for (label, g1, g2) in [("g1: NE=1; g2: swap=1", "NE", "swap"), ("g1: E=1; g2: const_E=1", "E", "const_E")] {
        let s2 = b.leaves[1].game.strategy_named(g2).ok_or("unknown strategy")?.clone();
        let alt = joint(&b.tree, &[Dist::point(a(g1)), Dist::point(s2)]);
        out.push_str(&format!("check {label}: {}\n", verdict(&b, &alt)?));
    }
    // first-mover strategies are moves; name them σ_move
    let sigma = |d: &Dist<Value>, tag: bool| {
        d.iter()
            .map(|(s, w)| if tag { format!("{}·σ_{s}", fmt_q(w)) } else { format!("{}·{s}", fmt_q(w)) })
            .collect::<Vec<_>>()
            .join(" + ")
    };
    out.push_str(&format!(
        "solution: {}  i.e. ({}, {})\n",
        show(&b, &[d1.clone(), d2.clone()]),
        sigma(&d1, true),
        sigma(&d2, false)
    ));
    out.push_str(&format!("payoff: {}\n", expected_payoff(&b, &phi)));
    Ok(out)
}
