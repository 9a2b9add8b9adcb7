use probgames::dist::{RationalVec, VecAlgebra};
use probgames::game::{check_equilibrium, decision_game, UtilityTable};
use probgames::solver::{grid_oracle, on_grid, support_enumeration};
use probgames::value::product;
use probgames::{par, Value};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random bimatrix games: support enumeration and the grid oracle must
/// agree wherever both can see an equilibrium.
#[test]
fn support_enumeration_agrees_with_the_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..12 {
        let n = rng.gen_range(2..=3);
        let moves = Value::atoms(&["a", "b", "c"][..n]);
        let g = par(
            &decision_game(moves.clone(), VecAlgebra::new(1), 0).unwrap(),
            &decision_game(moves.clone(), VecAlgebra::new(1), 0).unwrap(),
        );
        let k = UtilityTable::new(
            product(&moves, &moves)
                .into_iter()
                .map(|y| (y, RationalVec::from_ints(&[rng.gen_range(-5..=5), rng.gen_range(-5..=5)]))),
        );
        let x = Value::pair(Value::Unit, Value::Unit);
        let exact = support_enumeration(&g, &x, &k).unwrap();
        let grid = grid_oracle(&g, &x, &k, 6, 1e-9).unwrap();
        for p in &grid {
            assert!(check_equilibrium(&g, &x, &k, &p.joint).unwrap(), "grid point {} is not exact", p.joint);
        }
        for (a, b) in &exact.equilibria {
            if on_grid(a, 6) && on_grid(b, 6) {
                assert!(grid.iter().any(|p| p.leaves[0] == *a && p.leaves[1] == *b), "grid missed ({a}, {b})");
            }
        }
        assert!(!exact.equilibria.is_empty() || exact.degenerate);
    }
}
