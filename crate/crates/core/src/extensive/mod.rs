//! Extensive games with perfect information and their equilibria.

mod equilibria;
mod gal;
mod game;

pub use equilibria::{backward_induction, enumerate_equilibria, oracle_equilibria, Concept};
pub use gal::{
    deviation_var, game_signature, ne_formula, profile_valuation, profile_var, spe_formula, strategy_sort,
    to_gal_structure, utility_fn, HISTORY_SORT, TERMINAL_SORT, UTILITY_SORT,
};
pub use game::{ExtensiveGame, GameError, GameNode, GameViolation, Profile, Strategy, Tree};
