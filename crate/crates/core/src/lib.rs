//! Probabilistic open games: exact distributions, composition, equilibrium
//! checking and solving, determinisation, and executable category laws.

pub mod compose;
pub mod determinise;
pub mod dist;
pub mod flow;
pub mod game;
pub mod laws;
pub mod lens;
pub mod solver;
pub mod value;

pub use compose::{par, relabel, seq, DecompositionWitness, GameIso};
pub use dist::{Dist, DistError, RationalVec, VecAlgebra, Q};
pub use game::{
    check_equilibrium, conditioned_decision_game, decision_game, explain_equilibrium, identity_game, unit_game,
    GameError, ProbOpenGame, UtilityTable,
};
pub use value::Value;
pub use laws::{run_law_suite, GenConfig, LawReport};
pub use solver::{backward_induction, grid_oracle, support_enumeration, SolveError};
