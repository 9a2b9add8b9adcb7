//! Fixtures shared by the benchmarks in `benches/`.

use std::collections::BTreeSet;

use probgames::dist::{q, qi};
use probgames::{decision_game, par, Dist, ProbOpenGame, RationalVec, UtilityTable, Value, VecAlgebra};

/// An `n × n` bimatrix game with a cyclic, fully mixed solution.
pub fn cyclic_bimatrix(n: usize) -> (ProbOpenGame, UtilityTable, Value) {
    let r1: Vec<Value> = (0..n).map(|i| Value::atom(&format!("r{i}"))).collect();
    let r2: Vec<Value> = (0..n).map(|i| Value::atom(&format!("c{i}"))).collect();
    let g = par(
        &decision_game(r1.clone(), VecAlgebra::new(1), 0).unwrap().with_label("p1"),
        &decision_game(r2.clone(), VecAlgebra::new(1), 0).unwrap().with_label("p2"),
    );
    let mut entries = Vec::new();
    for (i, y1) in r1.iter().enumerate() {
        for (j, y2) in r2.iter().enumerate() {
            // row player wins on j = i + 1, column player on a match
            let p1 = if j == (i + 1) % n { 1 } else { 0 };
            let p2 = if i == j { 1 } else { 0 };
            entries.push((Value::pair(y1.clone(), y2.clone()), RationalVec::new(vec![qi(p1), qi(p2)])));
        }
    }
    (g, UtilityTable::new(entries), Value::pair(Value::Unit, Value::Unit))
}

/// A transportation instance with `m` branches over `s` strategies; branch
/// `i` admits strategies `i..i+width`.
pub fn transport_instance(m: usize, s: usize, width: usize) -> (Dist<Value>, Vec<BTreeSet<Value>>, Dist<Value>) {
    let states: Vec<Value> = (0..m).map(|i| Value::atom(&format!("y{i}"))).collect();
    let sigma: Vec<Value> = (0..s).map(|i| Value::atom(&format!("s{i}"))).collect();
    let alpha = Dist::uniform(states);
    let sets = (0..m).map(|i| (0..width).map(|k| sigma[(i + k) % s].clone()).collect()).collect();
    let total = (s * (s + 1) / 2) as i64;
    let psi = Dist::new(sigma.iter().enumerate().map(|(k, v)| (v.clone(), q(k as i64 + 1, total)))).unwrap();
    (alpha, sets, psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use probgames::support_enumeration;

    #[test]
    fn fixtures_are_well_formed() {
        let (g, k, x) = cyclic_bimatrix(3);
        let r = support_enumeration(&g, &x, &k).unwrap();
        assert!(!r.equilibria.is_empty());
        let (alpha, sets, psi) = transport_instance(4, 6, 3);
        assert_eq!(alpha.support_len(), sets.len());
        assert_eq!(psi.support_len(), 6);
    }
}
